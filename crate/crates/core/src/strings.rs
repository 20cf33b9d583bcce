//! Lattice self-similar fractal strings.
//!
//! A string on `[0, L]` is generated by similitudes with ratios `r_j` and
//! first-stage gaps `g_k` (relative to `L`). Its geometric zeta function is
//! `ζ(s) = L^s Σ g_k^s / (1 - Σ r_j^s)`, and the complex dimensions are the
//! zeros of the denominator.

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Zero};

use crate::dirichlet::{
    classify, tile_roots, ComplexDimension, DirichletPolynomial, RootSet, SolverConfig,
};
use crate::error::{Error, Result};
use crate::lattice::{IdealCrystal, LatticeBasis};
use crate::par;
use crate::scalar::Scalar;

/// Tolerance for `Σ r_j + Σ g_k = 1`.
pub const PARTITION_TOL: f64 = 1e-12;
/// `ζ` is refused when `|1 - Σ r_j^s|` falls below this.
pub const POLE_TOL: f64 = 1e-9;
pub const DEFAULT_LENGTH_CAP: u128 = 10_000_000;
/// Floating-point ratios are rationalized with denominators up to this bound.
pub const HEURISTIC_MAX_DENOMINATOR: u64 = 1_000;
pub const HEURISTIC_TOL: f64 = 1e-9;
/// A numerator `|N(z)|` below this at a root of `g` counts as cancellation.
pub const CANCELLATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct StringSpec {
    total_length: Scalar,
    ratios: Vec<Scalar>,
    gaps: Vec<Scalar>,
    approx: bool,
    lattice_form: DirichletPolynomial,
}

impl StringSpec {
    /// Checks the string invariants; gaps are stored in nonincreasing order.
    /// Floating-point inputs need `approx`, which classifies the ratios
    /// heuristically instead of exactly.
    pub fn validate(total_length: Scalar, ratios: Vec<Scalar>, gaps: Vec<Scalar>, approx: bool) -> Result<Self> {
        let violation = |msg: String| Err(Error::ConstraintViolation(msg));
        if !(total_length.value() > 0.0 && total_length.value().is_finite()) {
            return violation(format!("total length L = {total_length} must be positive"));
        }
        if ratios.len() < 2 {
            return violation(format!("need at least 2 scaling ratios, found {}", ratios.len()));
        }
        if gaps.is_empty() {
            return violation("need at least 1 gap".into());
        }
        for r in &ratios {
            if !(r.value() > 0.0 && r.value() < 1.0) {
                return violation(format!("scaling ratio {r} must lie in (0, 1)"));
            }
        }
        for g in &gaps {
            if !(g.value() > 0.0 && g.value() < 1.0) {
                return violation(format!("gap {g} must lie in (0, 1)"));
            }
        }
        let ratio_sum = Scalar::sum(&ratios);
        if ratio_sum.cmp_value(&Scalar::integer(1)).is_ge() {
            return violation(format!("scaling ratios sum to {ratio_sum}, must be < 1"));
        }
        let total = ratio_sum.add(&Scalar::sum(&gaps));
        if (total.value() - 1.0).abs() > PARTITION_TOL {
            return violation(format!("ratios and gaps sum to {total}, must equal 1"));
        }
        let exact = total_length.is_exact() && ratios.iter().chain(&gaps).all(Scalar::is_exact);
        if !exact && !approx {
            return violation("floating-point inputs require the approx flag".into());
        }
        let lattice_form = if approx && !exact {
            let values: Vec<f64> = ratios.iter().map(Scalar::value).collect();
            DirichletPolynomial::from_ratios_heuristic(&values, HEURISTIC_MAX_DENOMINATOR, HEURISTIC_TOL)?
        } else {
            let values: Vec<BigRational> = ratios.iter().map(|r| r.as_rational().unwrap().clone()).collect();
            DirichletPolynomial::from_ratios(&values)?
        };
        let mut gaps = gaps;
        gaps.sort_by(|a, b| b.cmp_value(a));
        Ok(Self {
            total_length,
            ratios,
            gaps,
            approx,
            lattice_form,
        })
    }

    pub fn total_length(&self) -> &Scalar {
        &self.total_length
    }

    pub fn ratios(&self) -> &[Scalar] {
        &self.ratios
    }

    pub fn gaps(&self) -> &[Scalar] {
        &self.gaps
    }

    pub fn is_approx(&self) -> bool {
        self.approx
    }

    pub fn lattice_form(&self) -> &DirichletPolynomial {
        &self.lattice_form
    }

    /// `ζ(s) = L^s Σ g_k^s / (1 - Σ r_j^s)`.
    pub fn geometric_zeta(&self, s: Complex64) -> Result<Complex64> {
        let den = 1.0 - self.ratio_power_sum(s);
        if den.norm() < POLE_TOL {
            return Err(Error::NearPole { denominator: den.norm() });
        }
        Ok(self.numerator(s) / den)
    }

    /// `L^s Σ g_k^s`.
    pub fn numerator(&self, s: Complex64) -> Complex64 {
        let l = self.total_length.value().ln();
        self.gaps
            .iter()
            .map(|g| (s * (l + g.value().ln())).exp())
            .sum()
    }

    /// `Σ r_j^s` over ratios with repetition.
    pub fn ratio_power_sum(&self, s: Complex64) -> Complex64 {
        self.ratios.iter().map(|r| (s * r.value().ln()).exp()).sum()
    }

    /// Bound on `Σ ℓ^s` over lengths from words longer than `depth`, for real
    /// `s` with `Σ r_j^s < 1`: `(Σ r_j^s)^{depth+1} / (1 - Σ r_j^s) · L^s Σ g_k^s`.
    pub fn length_tail_bound(&self, s: f64, depth: u32) -> Result<f64> {
        let q = self.ratio_power_sum(Complex64::new(s, 0.0)).re;
        if q >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "tail bound needs Σ r_j^s < 1, got {q} at s = {s}"
            )));
        }
        Ok(q.powi(depth as i32 + 1) / (1.0 - q) * self.numerator(Complex64::new(s, 0.0)).re)
    }

    pub fn enumerate_lengths(&self, depth: u32) -> Result<Vec<Scalar>> {
        enumerate_lengths_with_cap(self, depth, DEFAULT_LENGTH_CAP)
    }

    pub fn dimension_crystal(&self, t_max: f64, config: &SolverConfig) -> Result<DimensionCrystal> {
        dimension_crystal(self, t_max, config)
    }
}

/// All lengths `L · r_{w_1} ⋯ r_{w_n} · g_k` for words of length `n ≤ depth`,
/// in nonincreasing order.
pub fn enumerate_lengths_with_cap(spec: &StringSpec, depth: u32, cap: u128) -> Result<Vec<Scalar>> {
    let m = spec.ratios.len() as u128;
    let k = spec.gaps.len() as u128;
    let words = (0..=depth)
        .try_fold(0u128, |acc, level| acc.checked_add(m.checked_pow(level)?))
        .unwrap_or(u128::MAX);
    let requested = words.saturating_mul(k);
    if requested > cap {
        return Err(Error::CapExceeded { requested, cap });
    }
    // Words with the same letter counts share a product; enumerate the count
    // vectors and repeat each product by its multinomial coefficient.
    let mut classes: Vec<(Scalar, u128)> = Vec::new();
    for n in 0..=depth {
        let mut counts = vec![0u32; spec.ratios.len()];
        letter_counts(&spec.ratios, n, 0, &mut counts, Scalar::integer(1), &mut classes);
    }
    let scaled_gaps: Vec<Scalar> = spec.gaps.iter().map(|g| spec.total_length.mul(g)).collect();
    let mut keyed: Vec<(f64, Scalar, u128)> = par::map(&classes, |(p, count)| {
        scaled_gaps
            .iter()
            .map(|g| {
                let l = p.mul(g);
                (l.value(), l, *count)
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    keyed.sort_by(|(va, a, _), (vb, b, _)| {
        if (va - vb).abs() > 1e-9 * va.abs().max(vb.abs()) {
            vb.total_cmp(va)
        } else {
            b.cmp_value(a)
        }
    });
    let mut lengths = Vec::with_capacity(requested as usize);
    for (_, l, count) in keyed {
        lengths.extend(std::iter::repeat_n(l, count as usize));
    }
    Ok(lengths)
}

/// Pushes `(Π r_j^{c_j}, n! / Π c_j!)` for every count vector of total `remaining`
/// over the letters from `index` on.
fn letter_counts(
    ratios: &[Scalar],
    remaining: u32,
    index: usize,
    counts: &mut Vec<u32>,
    product: Scalar,
    out: &mut Vec<(Scalar, u128)>,
) {
    if index + 1 == ratios.len() {
        counts[index] = remaining;
        let mut p = product;
        for _ in 0..remaining {
            p = p.mul(&ratios[index]);
        }
        out.push((p, multinomial(counts)));
        return;
    }
    let mut p = product;
    for c in 0..=remaining {
        counts[index] = c;
        letter_counts(ratios, remaining - c, index + 1, counts, p.clone(), out);
        p = p.mul(&ratios[index]);
    }
}

fn multinomial(counts: &[u32]) -> u128 {
    let mut total = 0u128;
    let mut result = 1u128;
    for &c in counts {
        for i in 1..=u128::from(c) {
            total += 1;
            result = result * total / i;
        }
    }
    result
}

/// `Σ ℓ^s` over the given lengths, with Neumaier compensated summation.
pub fn partial_zeta(lengths: &[Scalar], s: Complex64) -> Complex64 {
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for l in lengths {
        let term = (s * l.value().ln()).exp();
        re.add(term.re);
        im.add(term.im);
    }
    Complex64::new(re.total(), im.total())
}

/// Rounding allowance for comparing [`partial_zeta`] with the closed form:
/// a few ulps of `|ζ(s)| + Σ |ℓ^s|`.
pub fn partial_zeta_rounding(lengths: &[Scalar], s: Complex64, zeta: Complex64) -> f64 {
    let magnitude: f64 = lengths.iter().map(|l| (s.re * l.value().ln()).exp()).sum();
    64.0 * f64::EPSILON * (zeta.norm() + magnitude)
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// The complex dimensions as a rank-1 ideal crystal in `ℂ ≅ ℝ²` with
/// coordinates `(Im, Re)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionCrystal {
    pub crystal: IdealCrystal,
    pub roots: RootSet,
    /// Points of the crystal with `|Im| ≤ t_max`, as tiled by [`tile_roots`].
    pub window: Vec<ComplexDimension>,
}

impl DimensionCrystal {
    pub fn window_points(&self) -> Vec<Vec<f64>> {
        self.window
            .iter()
            .map(|d| vec![d.value.im, d.value.re])
            .collect()
    }
}

pub fn dimension_crystal(spec: &StringSpec, t_max: f64, config: &SolverConfig) -> Result<DimensionCrystal> {
    let poly = spec.lattice_form();
    let roots = poly.root_set(config)?;
    check_cancellation(spec, &roots)?;
    let basis = LatticeBasis::from_f64_rows(&[vec![roots.period]])?;
    let translates: Vec<Vec<f64>> = roots
        .lines
        .iter()
        .map(|l| vec![l.omega.im, l.omega.re])
        .collect();
    let crystal = IdealCrystal::from_f64(basis, 1, &translates)?;
    let window = tile_roots(&roots, t_max);
    Ok(DimensionCrystal {
        crystal,
        roots,
        window,
    })
}

/// The poles of `ζ` are the zeros of `g` only when the numerator does not
/// vanish there. With a single gap the numerator is an exponential and never
/// vanishes. With several gaps each `g_k / g_1` must be an integer power
/// `r^{n_k}`; the numerator is then `(L g_1)^s N(r^s)` with
/// `N(z) = Σ z^{n_k}`, which is checked at every root.
fn check_cancellation(spec: &StringSpec, roots: &RootSet) -> Result<()> {
    if spec.gaps.len() == 1 {
        return Ok(());
    }
    let poly = spec.lattice_form();
    let head = &spec.gaps[0];
    let mut powers = Vec::with_capacity(spec.gaps.len());
    for g in &spec.gaps {
        let n = gap_power(poly, head, g).ok_or_else(|| {
            Error::CancellationRisk(format!(
                "gap ratio {g} / {head} is not an integer power of the generator {}",
                poly.generator_scalar()
            ))
        })?;
        powers.push(n);
    }
    for &z in &roots.roots_z {
        let value: Complex64 = powers.iter().map(|&n| z.powu(n as u32)).sum();
        let scale: f64 = powers.iter().map(|&n| z.norm().powi(n as i32)).sum();
        if value.norm() <= CANCELLATION_TOL * scale {
            return Err(Error::CancellationRisk(format!(
                "numerator vanishes at the root z = {z} of the denominator"
            )));
        }
    }
    Ok(())
}

fn gap_power(poly: &DirichletPolynomial, head: &Scalar, g: &Scalar) -> Option<u64> {
    match (poly.exact_generator(), head.as_rational(), g.as_rational()) {
        (Some(r), Some(h), Some(g)) => {
            let ratio = g / h;
            if ratio.is_one() {
                return Some(0);
            }
            let vectors = classify::exponent_vectors(&[r.clone(), ratio]);
            let (_, multiples) = classify::common_direction(&vectors)?;
            if multiples[0].is_zero() || multiples[1] % multiples[0] != 0 {
                return None;
            }
            u64::try_from(multiples[1] / multiples[0]).ok()
        }
        _ => {
            let x = (g.value() / head.value()).ln() / poly.generator().ln();
            let n = x.round();
            ((x - n).abs() <= HEURISTIC_TOL * (1.0 + x.abs()) && n >= 0.0).then_some(n as u64)
        }
    }
}

/// `p/q` helper for callers building specs in code.
pub fn ratio(numer: i64, denom: i64) -> Scalar {
    Scalar::Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
}
