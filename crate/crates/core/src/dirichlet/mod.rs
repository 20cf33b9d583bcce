//! Lattice Dirichlet polynomials `f(s) = 1 - Σ m_j r^{k_j s}` and their roots.
//!
//! Substituting `z = r^s` turns `f` into the integer polynomial
//! `g(z) = 1 - Σ m_j z^{k_j}`. Every root `z` of `g` gives one root `ω` of `f`
//! with imaginary part in `(-p/2, p/2]`, and the full zero set of `f` is the
//! union of the vertical progressions `ω + i p ℤ`, `p = 2π / ln(1/r)`.

pub mod classify;
mod roots;

use std::f64::consts::PI;

use num::bigint::BigInt;
use num::complex::Complex64;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

pub use roots::{solve_roots, RootSolution, SolverConfig, SparsePolynomial};

use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Scalar};

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPolynomial {
    generator: Scalar,
    exponents: Vec<u64>,
    multiplicities: Vec<u64>,
}

impl DirichletPolynomial {
    /// Builds `1 - Σ m_j r^{e_j s}` from rational exponents `e_j`, rescaling
    /// them to coprime integers and raising `r` to the removed common factor.
    pub fn normalize(r: Scalar, terms: Vec<(BigRational, u64)>) -> Result<Self> {
        let rv = r.value();
        if !(rv > 0.0 && rv < 1.0) {
            return Err(Error::InvalidInput(format!("generator r = {r} must lie in (0, 1)")));
        }
        if terms.is_empty() {
            return Err(Error::InvalidInput("a Dirichlet polynomial needs at least one term".into()));
        }
        if let Some((e, _)) = terms.iter().find(|(e, _)| !e.is_positive()) {
            return Err(Error::InvalidInput(format!("exponent {e} must be positive")));
        }
        if terms.iter().any(|&(_, m)| m == 0) {
            return Err(Error::InvalidInput("multiplicities must be positive integers".into()));
        }
        let lcm = terms
            .iter()
            .fold(BigInt::one(), |acc, (e, _)| acc.lcm(e.denom()));
        let scaled: Vec<BigInt> = terms
            .iter()
            .map(|(e, _)| (e * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let gcd = scaled.iter().fold(BigInt::zero(), |acc, k| acc.gcd(k));
        // e_j = k_j · (gcd / lcm), so r^{e_j s} = (r^{gcd/lcm})^{k_j s}.
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(terms.len());
        for (k, (_, m)) in scaled.iter().zip(&terms) {
            let k = (k / &gcd)
                .to_u64()
                .ok_or_else(|| Error::InvalidInput("exponent too large after normalization".into()))?;
            merged.push((k, *m));
        }
        merged.sort();
        let mut exponents: Vec<u64> = Vec::new();
        let mut multiplicities: Vec<u64> = Vec::new();
        for (k, m) in merged {
            if exponents.last() == Some(&k) {
                *multiplicities.last_mut().unwrap() += m;
            } else {
                exponents.push(k);
                multiplicities.push(m);
            }
        }
        let generator = power_scalar(&r, &gcd, &lcm);
        Ok(Self {
            generator,
            exponents,
            multiplicities,
        })
    }

    /// `terms` are `(k_j, m_j)` integer pairs.
    pub fn from_terms(r: Scalar, terms: &[(u64, u64)]) -> Result<Self> {
        Self::normalize(
            r,
            terms
                .iter()
                .map(|&(k, m)| (BigRational::from_integer(BigInt::from(k)), m))
                .collect(),
        )
    }

    /// Classifies exact scaling ratios (repeats count as multiplicity).
    /// Fails with `NonLatticeInput` unless all pairwise log-ratios are rational.
    pub fn from_ratios(ratios: &[BigRational]) -> Result<Self> {
        let distinct = aggregate(ratios, |a, b| a == b);
        if let Some((q, _)) = distinct
            .iter()
            .find(|(q, _)| !q.is_positive() || *q >= BigRational::one())
        {
            return Err(Error::InvalidInput(format!("scaling ratio {q} must lie in (0, 1)")));
        }
        let values: Vec<BigRational> = distinct.iter().map(|(q, _)| q.clone()).collect();
        let vectors = classify::exponent_vectors(&values);
        let (unit, multiples) = classify::common_direction(&vectors).ok_or_else(|| {
            Error::NonLatticeInput(format!(
                "log ratios of {} are not all rational",
                values.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")
            ))
        })?;
        // r0 is the rational with exponent vector `unit`; each ratio is r0^{K_j}.
        let r0 = classify::rational_power(&values[0], 1, multiples[0])
            .expect("ratio is an exact power of its primitive direction");
        debug_assert!(unit.iter().any(|&u| u != 0));
        Self::normalize(
            Scalar::Rational(r0),
            multiples
                .iter()
                .zip(&distinct)
                .map(|(&k, (_, m))| (BigRational::from_integer(BigInt::from(k)), *m as u64))
                .collect(),
        )
    }

    /// Heuristic classification of floating-point ratios: each `ln r_j / ln r_1`
    /// is rationalized by continued fractions (denominator ≤ `max_denominator`,
    /// error ≤ `tol`). A float cannot certify lattice structure, so callers
    /// must opt in explicitly.
    pub fn from_ratios_heuristic(ratios: &[f64], max_denominator: u64, tol: f64) -> Result<Self> {
        let distinct = aggregate(ratios, |a, b| (a - b).abs() <= tol * a.abs().max(b.abs()));
        if let Some((q, _)) = distinct.iter().find(|(q, _)| !(*q > 0.0 && *q < 1.0)) {
            return Err(Error::InvalidInput(format!("scaling ratio {q} must lie in (0, 1)")));
        }
        let base = distinct
            .iter()
            .map(|(q, _)| *q)
            .fold(0.0f64, f64::max);
        let mut terms = Vec::with_capacity(distinct.len());
        for (q, m) in &distinct {
            let ratio = q.ln() / base.ln();
            let (p, d) = classify::rationalize_heuristic(ratio, max_denominator, tol).ok_or_else(|| {
                Error::NonLatticeInput(format!(
                    "ln {q} / ln {base} = {ratio} has no rational approximation with denominator ≤ {max_denominator}"
                ))
            })?;
            terms.push((BigRational::new(BigInt::from(p), BigInt::from(d)), *m as u64));
        }
        Self::normalize(Scalar::Float(base), terms)
    }

    pub fn generator(&self) -> f64 {
        self.generator.value()
    }

    pub fn exact_generator(&self) -> Option<&BigRational> {
        self.generator.as_rational()
    }

    pub fn generator_scalar(&self) -> &Scalar {
        &self.generator
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.exponents.iter().copied().zip(self.multiplicities.iter().copied())
    }

    pub fn degree(&self) -> u64 {
        *self.exponents.last().unwrap()
    }

    /// `ln(1/r)`.
    pub fn log_inverse_generator(&self) -> f64 {
        match &self.generator {
            Scalar::Rational(q) => ln_rational(&q.recip()),
            Scalar::Float(r) => -r.ln(),
        }
    }

    /// Oscillatory period `2π / ln(1/r)`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.log_inverse_generator()
    }

    /// `1 - Σ m_j r^{k_j s}`.
    pub fn evaluate_f(&self, s: Complex64) -> Complex64 {
        let w = -self.log_inverse_generator();
        let mut total = Complex64::new(1.0, 0.0);
        for (k, m) in self.terms() {
            total -= (s * (k as f64 * w)).exp() * m as f64;
        }
        total
    }

    pub fn to_polynomial(&self) -> SparsePolynomial {
        let mut terms = vec![(0u64, 1i64)];
        terms.extend(self.terms().map(|(k, m)| (k, -(m as i64))));
        SparsePolynomial::new(terms)
    }

    /// Solves `g`, maps the roots to `ω` and sorts them.
    pub fn root_set(&self, config: &SolverConfig) -> Result<RootSet> {
        let solution = solve_roots(&self.to_polynomial(), config)?;
        principal_roots(&solution, self, config.cluster_eps)
    }

    pub fn strip_bounds(&self) -> Result<StripBounds> {
        strip_bounds(self)
    }
}

fn aggregate<T: Clone>(items: &[T], same: impl Fn(&T, &T) -> bool) -> Vec<(T, usize)> {
    let mut out: Vec<(T, usize)> = Vec::new();
    for item in items {
        match out.iter_mut().find(|(x, _)| same(x, item)) {
            Some(entry) => entry.1 += 1,
            None => out.push((item.clone(), 1)),
        }
    }
    out
}

/// `r^(numer/denom)`, exact when the root exists.
fn power_scalar(r: &Scalar, numer: &BigInt, denom: &BigInt) -> Scalar {
    if let (Scalar::Rational(q), Some(n), Some(d)) = (r, numer.to_i64(), denom.to_i64()) {
        if let Some(exact) = classify::rational_power(q, n, d) {
            return Scalar::Rational(exact);
        }
    }
    let exponent = rational_to_f64(&BigRational::new(numer.clone(), denom.clone()));
    Scalar::Float(r.value().powf(exponent))
}

/// Natural log of a positive rational without overflowing the `f64` range.
fn ln_rational(q: &BigRational) -> f64 {
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        q * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    rational_to_f64(&scaled).ln() + shift as f64 * std::f64::consts::LN_2
}

/// A vertical progression `ω + i p ℤ` of roots of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootLine {
    pub omega: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    /// Roots of `g`, with multiplicity, in solver order.
    pub roots_z: Vec<Complex64>,
    /// Images of `roots_z` under the ω-map, sorted by real then imaginary part.
    pub principal_roots: Vec<Complex64>,
    /// Distinct principal roots, in the same order.
    pub lines: Vec<RootLine>,
    pub residual_bound: f64,
    pub period: f64,
}

impl RootSet {
    /// The real root `D` (the rightmost line).
    pub fn dimension(&self) -> f64 {
        self.lines
            .iter()
            .filter(|l| l.omega.im == 0.0)
            .map(|l| l.omega.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `ω = -ln|z| / ln(1/r) - i θ / ln(1/r)` with `θ = arg z ∈ (-π, π]`.
pub fn omega_map(z: Complex64, log_inverse_r: f64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroRoot);
    }
    let theta = principal_arg(z);
    Ok(Complex64::new(-z.norm().ln() / log_inverse_r, -theta / log_inverse_r))
}

fn principal_arg(z: Complex64) -> f64 {
    let theta = z.im.atan2(z.re);
    if theta == -PI {
        PI
    } else {
        theta
    }
}

pub fn principal_roots(solution: &RootSolution, poly: &DirichletPolynomial, cluster_eps: f64) -> Result<RootSet> {
    let li = poly.log_inverse_generator();
    let omegas = solution
        .roots
        .iter()
        .map(|&z| omega_map(z, li))
        .collect::<Result<Vec<_>>>()?;

    let labels = roots::cluster_labels(&solution.roots, cluster_eps);
    let mut lines: Vec<RootLine> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        if seen.contains(&label) {
            continue;
        }
        seen.push(label);
        let members: Vec<Complex64> = (0..labels.len())
            .filter(|&j| labels[j] == label)
            .map(|j| solution.roots[j])
            .collect();
        let centroid = members.iter().sum::<Complex64>() / members.len() as f64;
        // A cluster straddling the negative axis would average across the branch cut.
        let z = if members.len() == 1 { solution.roots[i] } else { centroid };
        lines.push(RootLine {
            omega: omega_map(z, li)?,
            multiplicity: members.len(),
        });
    }

    let mut principal = omegas;
    sort_omegas(&mut principal, |w| *w);
    sort_omegas(&mut lines, |l| l.omega);

    Ok(RootSet {
        roots_z: solution.roots.clone(),
        principal_roots: principal,
        lines,
        residual_bound: solution.max_residual(),
        period: poly.period(),
    })
}

/// Sort by real part, treating real parts within `1e-9` as equal, then by
/// imaginary part.
fn sort_omegas<T: Clone>(items: &mut Vec<T>, key: impl Fn(&T) -> Complex64) {
    items.sort_by(|a, b| key(a).re.total_cmp(&key(b).re));
    let mut group = vec![0usize; items.len()];
    for i in 1..items.len() {
        let (prev, cur) = (key(&items[i - 1]).re, key(&items[i]).re);
        group[i] = if cur - prev <= 1e-9 * (1.0 + cur.abs()) {
            group[i - 1]
        } else {
            group[i - 1] + 1
        };
    }
    let mut tagged: Vec<(usize, T)> = group.into_iter().zip(items.drain(..)).collect();
    tagged.sort_by(|a, b| a.0.cmp(&b.0).then(key(&a.1).im.total_cmp(&key(&b.1).im)));
    items.extend(tagged.into_iter().map(|t| t.1));
}

/// Bound on `|f(ω)|` for `ω` mapped from a root `z` with `|g(z)| ≤ tol · Σ|c_k||z|^k`.
///
/// Recomputing `z' = r^ω` moves the root by at most
/// `|z| ((ln(1/r) + 1) · 8ε (1 + |ω|))`, which `g` amplifies by `|g'(z)|`;
/// evaluating `f` adds `8ε Σ|c_k||z|^k`.
pub fn mapped_residual_bound(poly: &DirichletPolynomial, z: Complex64, omega: Complex64, tol: f64) -> f64 {
    let g = poly.to_polynomial();
    let scale = g.magnitude_scale(z);
    let (_, dg) = g.eval_with_derivative(z);
    let eps = f64::EPSILON;
    tol * scale
        + dg.norm() * z.norm() * (poly.log_inverse_generator() + 1.0) * 8.0 * eps * (1.0 + omega.norm())
        + 8.0 * eps * scale
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripBounds {
    pub lower: f64,
    pub dimension: f64,
}

/// `D` solves `Σ m_j r^{k_j D} = 1`; `D_ℓ` solves
/// `1 + Σ_{j<N} m_j r^{k_j D_ℓ} = m_N r^{k_N D_ℓ}`.
pub fn strip_bounds(poly: &DirichletPolynomial) -> Result<StripBounds> {
    let w = -poly.log_inverse_generator();
    let terms: Vec<(f64, f64)> = poly.terms().map(|(k, m)| (k as f64, m as f64)).collect();
    let dimension = bisect(
        |s| terms.iter().map(|&(k, m)| m * (k * w * s).exp()).sum::<f64>() - 1.0,
        "no sign change for the dimension equation",
    )?;
    let lower = if terms.len() == 1 {
        dimension
    } else {
        // Divided through by r^{k_N s} so that the function is monotone.
        let (kn, mn) = *terms.last().unwrap();
        let head = &terms[..terms.len() - 1];
        bisect(
            |s| {
                mn - head.iter().map(|&(k, m)| m * ((k - kn) * w * s).exp()).sum::<f64>()
                    - (-kn * w * s).exp()
            },
            "no sign change for the lower strip bound",
        )?
    };
    Ok(StripBounds { lower, dimension })
}

/// Root of a decreasing function, bracket grown outward from `[-1, 1]`.
fn bisect(f: impl Fn(f64) -> f64, context: &'static str) -> Result<f64> {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut grown = 0;
    while !(f(lo) > 0.0 && f(hi) < 0.0) {
        if grown == 64 {
            return Err(Error::BracketFailure(context));
        }
        if f(lo) <= 0.0 {
            lo *= 2.0;
        }
        if f(hi) >= 0.0 {
            hi *= 2.0;
        }
        grown += 1;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDimension {
    pub value: Complex64,
    /// Index into [`RootSet::lines`].
    pub line: usize,
    pub n: i64,
    pub multiplicity: usize,
}

/// Every `ω_j + i n p` with `|Im| ≤ t_max`, ordered by line then `n`.
pub fn tile_roots(set: &RootSet, t_max: f64) -> Vec<ComplexDimension> {
    let p = set.period;
    let mut out = Vec::new();
    for (j, line) in set.lines.iter().enumerate() {
        let y = line.omega.im;
        let lo = ((-t_max - y) / p).ceil() as i64;
        let hi = ((t_max - y) / p).floor() as i64;
        for n in lo..=hi {
            let im = y + n as f64 * p;
            if im.abs() <= t_max {
                out.push(ComplexDimension {
                    value: Complex64::new(line.omega.re, im),
                    line: j,
                    n,
                    multiplicity: line.multiplicity,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn example() -> DirichletPolynomial {
        DirichletPolynomial::from_ratios(&[q(1, 2), q(1, 8)]).unwrap()
    }

    fn bisect_oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let increasing = f(hi) > f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) < 0.0) == increasing {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn normalize_examples() {
        let p = example();
        assert_eq!(p.exponents(), &[1, 3]);
        assert_eq!(p.multiplicities(), &[1, 1]);
        assert_eq!(p.exact_generator(), Some(&q(1, 2)));

        let p = DirichletPolynomial::from_terms(Scalar::ratio(1, 3), &[(2, 1), (4, 1)]).unwrap();
        assert_eq!(p.exponents(), &[1, 2]);
        assert_eq!(p.exact_generator(), Some(&q(1, 9)));

        let p = DirichletPolynomial::from_terms(Scalar::ratio(1, 2), &[(2, 1), (3, 1)]).unwrap();
        assert_eq!(p.exponents(), &[2, 3]);
        assert_eq!(p.exact_generator(), Some(&q(1, 2)));
    }

    #[test]
    fn rational_exponents_rescale_generator() {
        // exponents (1/2, 1) with r = 1/4: r^{1/2} = 1/2, exponents (1, 2)
        let p = DirichletPolynomial::normalize(Scalar::ratio(1, 4), vec![(q(1, 2), 1), (q(1, 1), 2)]).unwrap();
        assert_eq!(p.exponents(), &[1, 2]);
        assert_eq!(p.multiplicities(), &[1, 2]);
        assert_eq!(p.exact_generator(), Some(&q(1, 2)));
    }

    #[test]
    fn repeated_ratios_are_multiplicities() {
        let p = DirichletPolynomial::from_ratios(&[q(1, 3), q(1, 3)]).unwrap();
        assert_eq!(p.exponents(), &[1]);
        assert_eq!(p.multiplicities(), &[2]);
        assert_eq!(p.exact_generator(), Some(&q(1, 3)));
    }

    #[test]
    fn rejects_nonlattice() {
        let err = DirichletPolynomial::from_ratios(&[q(1, 2), q(1, 3)]).unwrap_err();
        assert!(matches!(err, Error::NonLatticeInput(_)));
    }

    #[test]
    fn heuristic_matches_exact_on_example() {
        let p = DirichletPolynomial::from_ratios_heuristic(&[0.5, 0.125], 1000, 1e-9).unwrap();
        assert_eq!(p.exponents(), &[1, 3]);
        assert!((p.generator() - 0.5).abs() < 1e-15);
        assert!(DirichletPolynomial::from_ratios_heuristic(&[0.5, 1.0 / 3.0], 1000, 1e-12).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let p = example();
        assert!((p.evaluate_f(Complex64::new(0.0, 0.0)) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((p.evaluate_f(Complex64::new(20.0, 0.0)) - 1.0).norm() < 1e-6);
        let d = bisect_oracle(|s| 2f64.powf(-s) + 8f64.powf(-s) - 1.0, 0.0, 1.0);
        assert!(p.evaluate_f(Complex64::new(d, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn polynomial_transcription() {
        assert_eq!(example().to_polynomial().to_string(), "1 - z - z^3");
        let p = DirichletPolynomial::from_terms(Scalar::ratio(1, 2), &[(1, 2)]).unwrap();
        assert_eq!(p.to_polynomial().to_string(), "1 - 2z");
        let p = DirichletPolynomial::from_terms(Scalar::ratio(1, 2), &[(2, 1), (5, 3)]).unwrap();
        assert_eq!(p.to_polynomial().to_string(), "1 - z^2 - 3z^5");
    }

    #[test]
    fn principal_root_examples() {
        let set = example().root_set(&SolverConfig::default()).unwrap();
        assert!((set.period - 9.064720).abs() < 1e-6);
        assert_eq!(set.principal_roots.len(), 3);
        let last = set.principal_roots[2];
        assert!((last.re - 0.551463).abs() < 1e-6 && last.im == 0.0);
        // Oracle: deflate the real root a of z^3 + z - 1, solve z^2 + a z + 1 + a^2.
        let a = bisect_oracle(|z| z * z * z + z - 1.0, 0.0, 1.0);
        let pair = Complex64::new(-a / 2.0, (4.0 + 3.0 * a * a).sqrt() / 2.0);
        let expected = Complex64::new(-pair.norm().ln(), -pair.arg()) / std::f64::consts::LN_2;
        let low = set.principal_roots[0];
        assert!((low - expected).norm() < 1e-10);
        assert!((low.re + 0.2757315).abs() < 1e-6);
        assert!((low.im + 2.6783324).abs() < 1e-6);
        assert_eq!(set.principal_roots[1], low.conj());
        assert_eq!(set.lines.len(), 3);
    }

    #[test]
    fn omega_on_negative_axis_uses_pi() {
        let w = omega_map(Complex64::new(-1.0, 0.0), std::f64::consts::LN_2).unwrap();
        assert!((w.im + PI / std::f64::consts::LN_2).abs() < 1e-15);
        assert!(matches!(omega_map(Complex64::new(0.0, 0.0), 1.0), Err(Error::ZeroRoot)));
    }

    #[test]
    fn strip_bound_examples() {
        let b = example().strip_bounds().unwrap();
        let d = bisect_oracle(|s| 2f64.powf(-s) + 8f64.powf(-s) - 1.0, 0.0, 1.0);
        let u = bisect_oracle(|u| u * u * u - u - 1.0, 1.0, 2.0);
        assert!((b.dimension - d).abs() < 1e-11);
        assert!((b.lower + u.log2()).abs() < 1e-11);
        assert!((b.dimension - 0.551463).abs() < 1e-6);
        assert!((b.lower + 0.405685).abs() < 1e-6);

        let p = DirichletPolynomial::from_terms(Scalar::ratio(1, 3), &[(1, 2)]).unwrap();
        let b = p.strip_bounds().unwrap();
        assert!((b.dimension - 2f64.ln() / 3f64.ln()).abs() < 1e-11);
        assert_eq!(b.lower, b.dimension);
    }

    #[test]
    fn tiling_windows() {
        let set = example().root_set(&SolverConfig::default()).unwrap();
        let dims = tile_roots(&set, 10.0);
        // real line: n = -1, 0, 1; each complex line: two points
        assert_eq!(dims.len(), 7);
        assert_eq!(dims.iter().filter(|d| d.line == 2).count(), 3);
        assert!(dims.iter().any(|d| (d.value.im - 6.386388).abs() < 1e-5));

        let only_d = tile_roots(&set, 0.0);
        assert_eq!(only_d.len(), 1);
        assert_eq!(only_d[0].value.im, 0.0);

        let principal = tile_roots(&set, 2.7);
        assert_eq!(principal.len(), 3);
        assert!(principal.iter().all(|d| d.n == 0));
    }
}
