//! Pair counting over averaging boxes and the closed-form autocorrelation.
//!
//! For `X = T(Λ) + F` every displacement is `T(B Δ) + f_j - f_k`. The box
//! `R_L` has side `L` along the lattice axes and `C` along the degenerate
//! axes, where `C = max_j |P_d f_j|_∞ + 1`. Averaging always happens on the
//! crystal recentered along its degenerate axes, which makes every result
//! invariant under translation of the crystal.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::gaussian::{lattice_sum, TestFunction, TruncatedSum};
use crate::lattice::{
    determinant, enumerate_points, exact_displacement, lex_cmp, linalg_sup_dist, IdealCrystal, Region,
    DISPLACEMENT_TOL,
};
use crate::par;
use crate::scalar::Scalar;

/// Distinct displacements closer than this (sup norm) cannot be binned in
/// float mode.
pub const AMBIGUITY_TOL: f64 = 1e-8;

/// `max_j |P_d f_j|_∞ + 1` for the crystal as given (`1` when `d = 0`).
pub fn averaging_constant(crystal: &IdealCrystal) -> f64 {
    let m = crystal.rank();
    crystal
        .translates_f64()
        .iter()
        .flat_map(|f| f[m..].iter().map(|x| x.abs()))
        .fold(0.0, f64::max)
        + 1.0
}

/// The centered box with half-widths `L/2` (lattice axes) and `C/2`
/// (degenerate axes), for the crystal as given.
pub fn averaging_region(crystal: &IdealCrystal, scale: f64) -> Result<Region> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidRegion(format!("averaging scale L = {scale} must be positive")));
    }
    let m = crystal.rank();
    let c = averaging_constant(crystal);
    for (index, f) in crystal.translates_f64().iter().enumerate() {
        if let Some(&value) = f[m..].iter().find(|x| x.abs() > c / 2.0) {
            return Err(Error::TranslatesOutsideBox {
                index,
                value,
                half_width: c / 2.0,
            });
        }
    }
    let mut half_widths = vec![scale / 2.0; m];
    half_widths.resize(crystal.ambient_dim(), c / 2.0);
    Region::new(vec![0.0; crystal.ambient_dim()], half_widths)
}

/// `C` as used by the averaging: that of the recentered crystal.
pub fn effective_averaging_constant(crystal: &IdealCrystal) -> f64 {
    averaging_constant(&crystal.recentered())
}

/// `1 / (C^d |det B|)`.
pub fn autocorrelation_prefactor(crystal: &IdealCrystal) -> f64 {
    let c = effective_averaging_constant(crystal);
    1.0 / (c.powi(crystal.degenerate_dim() as i32) * determinant(crystal.basis()))
}

/// Grouping of the ordered translate pairs `(j, k)` by the coset of
/// `f_j - f_k` modulo `T(Λ)`: pairs in one group produce the same set of
/// displacements.
#[derive(Debug, Clone)]
struct PairClasses {
    /// For pair index `j·|F| + k`: its representative pair index and the
    /// lattice shift `λ` with `f_j - f_k = f_rep + T(B λ)` (rep as a pair difference).
    rep: Vec<(usize, Vec<i64>)>,
    size: Vec<usize>,
}

fn pair_difference(crystal: &IdealCrystal, j: usize, k: usize) -> Vec<f64> {
    let f = crystal.translates_f64();
    f[j].iter().zip(&f[k]).map(|(a, b)| a - b).collect()
}

fn pair_difference_exact(crystal: &IdealCrystal, j: usize, k: usize) -> Option<Vec<BigRational>> {
    let f = crystal.translates();
    f[j].iter()
        .zip(&f[k])
        .map(|(a, b)| match a.sub(b) {
            Scalar::Rational(q) => Some(q),
            Scalar::Float(_) => None,
        })
        .collect()
}

/// Whether `w ∈ T(Λ)`: returns the lattice coordinates, or `Ambiguous` when
/// `w` is near but not within the matching tolerance.
enum Membership {
    Yes(Vec<i64>),
    No,
    Ambiguous,
}

fn lattice_membership(crystal: &IdealCrystal, w: &[f64], w_exact: Option<&[BigRational]>) -> Membership {
    let m = crystal.rank();
    let basis = crystal.basis();
    let degenerate = w[m..].iter().map(|x| x.abs()).fold(0.0, f64::max);
    if w_exact.is_none() && degenerate >= AMBIGUITY_TOL {
        return Membership::No;
    }
    if let Some(we) = w_exact {
        if we[m..].iter().any(|x| *x != BigRational::from_integer(0.into())) {
            return Membership::No;
        }
    }
    let a0: Vec<i64> = basis.coordinates(&w[..m]).iter().map(|x| x.round() as i64).collect();
    let mut best: Option<(f64, Vec<i64>)> = None;
    let neighbours = 3usize.pow(m as u32);
    for code in 0..neighbours {
        let mut c = code;
        let a: Vec<i64> = a0
            .iter()
            .map(|&x| {
                let step = (c % 3) as i64 - 1;
                c /= 3;
                x + step
            })
            .collect();
        if let Some(we) = w_exact {
            if basis.exact_point(&a).is_some_and(|p| p[..] == we[..m]) {
                return Membership::Yes(a);
            }
            continue;
        }
        let p = basis.point(&a);
        let dist = p.iter().zip(w).map(|(x, y)| (x - y).abs()).fold(degenerate, f64::max);
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, a));
        }
    }
    match best {
        None => Membership::No,
        Some((d, a)) if d <= DISPLACEMENT_TOL => Membership::Yes(a),
        Some((d, _)) if d < AMBIGUITY_TOL => Membership::Ambiguous,
        Some(_) => Membership::No,
    }
}

fn pair_classes(crystal: &IdealCrystal) -> Result<PairClasses> {
    let nf = crystal.translates().len();
    let exact = crystal.is_exact();
    let diffs: Vec<Vec<f64>> = (0..nf * nf).map(|p| pair_difference(crystal, p / nf, p % nf)).collect();
    let exact_diffs: Vec<Option<Vec<BigRational>>> = (0..nf * nf)
        .map(|p| if exact { pair_difference_exact(crystal, p / nf, p % nf) } else { None })
        .collect();
    let mut rep: Vec<(usize, Vec<i64>)> = Vec::with_capacity(nf * nf);
    let mut size = vec![0usize; nf * nf];
    let mut reps: Vec<usize> = Vec::new();
    for p in 0..nf * nf {
        let mut found = None;
        for &r in &reps {
            let w: Vec<f64> = diffs[p].iter().zip(&diffs[r]).map(|(a, b)| a - b).collect();
            let w_exact: Option<Vec<BigRational>> = match (&exact_diffs[p], &exact_diffs[r]) {
                (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x - y).collect()),
                _ => None,
            };
            match lattice_membership(crystal, &w, w_exact.as_deref()) {
                Membership::Yes(lambda) => {
                    found = Some((r, lambda));
                    break;
                }
                Membership::No => {}
                Membership::Ambiguous => {
                    return Err(Error::AmbiguousDisplacements {
                        first: diffs[r].clone(),
                        second: diffs[p].clone(),
                    })
                }
            }
        }
        let entry = found.unwrap_or_else(|| {
            reps.push(p);
            (p, vec![0; crystal.rank()])
        });
        size[entry.0] += 1;
        rep.push(entry);
    }
    let size = rep.iter().map(|(r, _)| size[*r]).collect();
    Ok(PairClasses { rep, size })
}

/// `c(a)`: the number of ordered pairs `(j, k)` with `a - (f_j - f_k) ∈ T(Λ)`
/// (within the displacement tolerance in float mode).
pub fn pair_multiplicity(crystal: &IdealCrystal, a: &[f64]) -> Result<usize> {
    if a.len() != crystal.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: crystal.ambient_dim(),
            found: a.len(),
            context: "displacement",
        });
    }
    let nf = crystal.translates().len();
    let mut count = 0;
    for j in 0..nf {
        for k in 0..nf {
            let v = pair_difference(crystal, j, k);
            let w: Vec<f64> = a.iter().zip(&v).map(|(x, y)| x - y).collect();
            if let Membership::Yes(_) = lattice_membership(crystal, &w, None) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `c(a) / (C^d |det B|)`, the limiting frequency of displacement `a`.
pub fn closed_form_frequency(crystal: &IdealCrystal, a: &[f64]) -> Result<f64> {
    Ok(pair_multiplicity(crystal, a)? as f64 * autocorrelation_prefactor(crystal))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementEntry {
    pub displacement: Vec<f64>,
    /// Present for rational crystals.
    pub exact: Option<Vec<BigRational>>,
    /// `N_L(a)`, ordered pairs of points in the box with difference `a`.
    pub count: u64,
    /// `c(a)`, ordered translate pairs producing `a`.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementTable {
    /// Sorted lexicographically by displacement.
    pub entries: Vec<DisplacementEntry>,
    pub scale: f64,
    pub region: Region,
    pub averaging_constant: f64,
    pub point_count: usize,
    pub rank: usize,
    pub degenerate_dim: usize,
    pub determinant: f64,
}

impl DisplacementTable {
    /// `C^d L^m`.
    pub fn volume(&self) -> f64 {
        self.averaging_constant.powi(self.degenerate_dim as i32) * self.scale.powi(self.rank as i32)
    }

    pub fn total_pairs(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn get(&self, a: &[f64]) -> Option<&DisplacementEntry> {
        self.entries
            .iter()
            .find(|e| linalg_sup_dist(&e.displacement, a) <= DISPLACEMENT_TOL)
    }

    /// `N_L(a)`, zero for displacements that do not occur.
    pub fn count(&self, a: &[f64]) -> u64 {
        self.get(a).map_or(0, |e| e.count)
    }

    /// `c(a) / (C^d |det B|)` for an entry.
    pub fn closed_form(&self, entry: &DisplacementEntry) -> f64 {
        entry.multiplicity as f64
            / (self.averaging_constant.powi(self.degenerate_dim as i32) * self.determinant)
    }

    /// The `k` entries of smallest Euclidean norm (ties broken lexicographically).
    pub fn smallest(&self, k: usize) -> Vec<&DisplacementEntry> {
        let mut sorted: Vec<&DisplacementEntry> = self.entries.iter().collect();
        sorted.sort_by(|a, b| {
            let na: f64 = a.displacement.iter().map(|x| x * x).sum();
            let nb: f64 = b.displacement.iter().map(|x| x * x).sum();
            let tol = 1e-12 * (1.0 + na.max(nb));
            if (na - nb).abs() <= tol {
                lex_cmp(&a.displacement, &b.displacement)
            } else {
                na.total_cmp(&nb)
            }
        });
        sorted.truncate(k);
        sorted
    }
}

/// `N_L(a)` for every displacement between points of the recentered crystal
/// inside its averaging box.
pub fn count_displacements(crystal: &IdealCrystal, scale: f64) -> Result<DisplacementTable> {
    let centered = crystal.recentered();
    let region = averaging_region(&centered, scale)?;
    let classes = pair_classes(&centered)?;
    let points = enumerate_points(&centered, &region)?;
    let m = centered.rank();
    let nf = centered.translates().len();

    let mut by_translate: Vec<Vec<&[i64]>> = vec![Vec::new(); nf];
    for p in &points {
        by_translate[p.translate].push(&p.lattice_coords);
    }

    // Dense histogram of Δ = a_x - a_y per (j, k).
    let mut merged: BTreeMap<(usize, Vec<i64>), u64> = BTreeMap::new();
    for j in 0..nf {
        for k in 0..nf {
            let (xs, ys) = (&by_translate[j], &by_translate[k]);
            if xs.is_empty() || ys.is_empty() {
                continue;
            }
            let bounds = |set: &[&[i64]], i: usize| {
                set.iter().fold((i64::MAX, i64::MIN), |(lo, hi), a| (lo.min(a[i]), hi.max(a[i])))
            };
            let ranges: Vec<(i64, i64)> = (0..m)
                .map(|i| {
                    let (xl, xh) = bounds(xs, i);
                    let (yl, yh) = bounds(ys, i);
                    (xl - yh, xh - yl)
                })
                .collect();
            let widths: Vec<usize> = ranges.iter().map(|(lo, hi)| (hi - lo + 1) as usize).collect();
            let cells: usize = widths.iter().product();
            let index = |delta: &[i64]| {
                delta
                    .iter()
                    .zip(&ranges)
                    .zip(&widths)
                    .fold(0usize, |acc, ((d, r), w)| acc * w + (d - r.0) as usize)
            };
            let chunk = ys.len().div_ceil(16).max(1);
            let partial = par::map_chunks(ys.len(), chunk, |range| {
                let mut hist = vec![0u64; cells];
                let mut delta = vec![0i64; m];
                for y in &ys[range] {
                    for x in xs {
                        for i in 0..m {
                            delta[i] = x[i] - y[i];
                        }
                        hist[index(&delta)] += 1;
                    }
                }
                hist
            });
            let mut hist = vec![0u64; cells];
            for h in partial {
                for (a, b) in hist.iter_mut().zip(h) {
                    *a += b;
                }
            }
            let (rep, lambda) = &classes.rep[j * nf + k];
            for (cell, &count) in hist.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let mut rest = cell;
                let mut delta = vec![0i64; m];
                for i in (0..m).rev() {
                    delta[i] = ranges[i].0 + (rest % widths[i]) as i64;
                    rest /= widths[i];
                }
                let shifted: Vec<i64> = delta.iter().zip(lambda).map(|(d, l)| d + l).collect();
                *merged.entry((*rep, shifted)).or_insert(0) += count;
            }
        }
    }

    let exact = centered.is_exact();
    let mut entries: Vec<DisplacementEntry> = merged
        .into_iter()
        .map(|((rep, delta), count)| {
            let (j, k) = (rep / nf, rep % nf);
            let y = centered.basis().point(&delta);
            let v = pair_difference(&centered, j, k);
            let displacement = (0..centered.ambient_dim())
                .map(|i| if i < m { y[i] + v[i] } else { v[i] })
                .collect();
            DisplacementEntry {
                displacement,
                exact: exact.then(|| exact_displacement(&centered, &delta, j, k)),
                count,
                multiplicity: classes.size[rep],
            }
        })
        .collect();
    entries.sort_by(|a, b| lex_cmp(&a.displacement, &b.displacement));

    Ok(DisplacementTable {
        entries,
        scale,
        region,
        averaging_constant: averaging_constant(&centered),
        point_count: points.len(),
        rank: m,
        degenerate_dim: centered.degenerate_dim(),
        determinant: determinant(centered.basis()),
    })
}

/// `n̂_a = N_L(a) / (C^d L^m)` for every entry of the table.
pub fn empirical_frequency(table: &DisplacementTable) -> Vec<(Vec<f64>, f64)> {
    let volume = table.volume();
    table
        .entries
        .iter()
        .map(|e| (e.displacement.clone(), e.count as f64 / volume))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutocorrelationValue {
    pub value: Complex64,
    /// Bound on the omitted tails of all truncated lattice sums.
    pub truncation_bound: f64,
}

/// `γ(φ) = 1/(C^d |det B|) Σ_{a ∈ Λ} Σ_{j,k} φ(T(a) + f_j - f_k)`, every
/// lattice sum truncated so the total dropped tail is at most `eps`.
pub fn autocorrelation_apply(crystal: &IdealCrystal, phi: &TestFunction, eps: f64) -> Result<AutocorrelationValue> {
    let n = crystal.ambient_dim();
    if phi.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: phi.dim(),
            context: "test function dimension",
        });
    }
    let m = crystal.rank();
    let nf = crystal.translates().len();
    let prefactor = autocorrelation_prefactor(crystal);
    let share = eps / (prefactor * (phi.atoms().len() * nf * nf) as f64);
    let mut total = TruncatedSum::ZERO;
    for atom in phi.atoms() {
        let lead = atom.leading(m);
        for j in 0..nf {
            for k in 0..nf {
                let v = pair_difference(crystal, j, k);
                let factor = atom.trailing_value(m, &v[m..]);
                if factor.norm() == 0.0 {
                    continue;
                }
                let sum = lattice_sum(crystal.basis(), &lead, &v[..m], share / factor.norm())?;
                total = total.plus(sum.scaled(factor));
            }
        }
    }
    let total = total.scaled(Complex64::new(prefactor, 0.0));
    Ok(AutocorrelationValue {
        value: total.value,
        truncation_bound: total.bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianAtom;
    use crate::lattice::LatticeBasis;

    fn integers() -> IdealCrystal {
        IdealCrystal::lattice(LatticeBasis::identity(1))
    }

    fn two_z_pair() -> IdealCrystal {
        IdealCrystal::new(
            LatticeBasis::from_ratio_rows(&[vec![(2, 1)]]).unwrap(),
            0,
            vec![vec![Scalar::integer(0)], vec![Scalar::ratio(1, 4)]],
        )
        .unwrap()
    }

    fn degenerate() -> IdealCrystal {
        IdealCrystal::new(
            LatticeBasis::identity(1),
            1,
            vec![vec![Scalar::integer(0), Scalar::integer(0)], vec![Scalar::ratio(1, 2), Scalar::ratio(1, 2)]],
        )
        .unwrap()
    }

    #[test]
    fn constants_and_regions() {
        assert_eq!(averaging_constant(&integers()), 1.0);
        assert_eq!(averaging_constant(&degenerate()), 1.5);
        let r = averaging_region(&integers(), 10.0).unwrap();
        assert_eq!(r.half_widths, vec![5.0]);
        let crystal = IdealCrystal::new(
            LatticeBasis::identity(1),
            1,
            vec![vec![Scalar::integer(0), Scalar::ratio(9, 10)]],
        )
        .unwrap();
        let r = averaging_region(&crystal, 4.0).unwrap();
        assert!((r.half_widths[1] - 0.95).abs() < 1e-15);
        let far = IdealCrystal::new(
            LatticeBasis::identity(1),
            1,
            vec![vec![Scalar::integer(0), Scalar::integer(3)]],
        )
        .unwrap();
        assert!(matches!(averaging_region(&far, 4.0), Err(Error::TranslatesOutsideBox { .. })));
        // recentering moves the translate to the origin, so counting succeeds
        assert_eq!(count_displacements(&far, 4.0).unwrap().point_count, 5);
    }

    #[test]
    fn integer_counts() {
        let t = count_displacements(&integers(), 10.0).unwrap();
        assert_eq!(t.point_count, 11);
        assert_eq!(t.count(&[0.0]), 11);
        assert_eq!(t.count(&[1.0]), 10);
        assert_eq!(t.count(&[7.0]), 4);
        assert_eq!(t.count(&[-7.0]), 4);
        assert_eq!(t.total_pairs(), 121);
    }

    #[test]
    fn even_lattice_skips_odd() {
        let crystal = IdealCrystal::lattice(LatticeBasis::from_ratio_rows(&[vec![(2, 1)]]).unwrap());
        let t = count_displacements(&crystal, 20.0).unwrap();
        assert_eq!(t.count(&[1.0]), 0);
        assert_eq!(t.count(&[2.0]), 10);
    }

    #[test]
    fn frequencies_approach_closed_form() {
        let t = count_displacements(&integers(), 1000.0).unwrap();
        let freq = empirical_frequency(&t);
        let zero = freq.iter().find(|(a, _)| a[0] == 0.0).unwrap().1;
        assert!((zero - 1.001).abs() < 1e-12);
        let crystal = IdealCrystal::lattice(LatticeBasis::from_ratio_rows(&[vec![(2, 1)]]).unwrap());
        let t = count_displacements(&crystal, 1000.0).unwrap();
        assert!((t.count(&[0.0]) as f64 / 1000.0 - 0.5).abs() < 2e-3);
    }

    #[test]
    fn pair_multiplicities() {
        let c = two_z_pair();
        assert_eq!(pair_multiplicity(&c, &[0.0]).unwrap(), 2);
        assert_eq!(pair_multiplicity(&c, &[0.25]).unwrap(), 1);
        assert_eq!(pair_multiplicity(&c, &[-2.25]).unwrap(), 1);
        assert_eq!(pair_multiplicity(&c, &[1.0]).unwrap(), 0);
        // translates in the same coset share displacements
        let same = IdealCrystal::new(
            LatticeBasis::identity(1),
            0,
            vec![vec![Scalar::integer(0)], vec![Scalar::integer(1)]],
        )
        .unwrap();
        assert_eq!(pair_multiplicity(&same, &[3.0]).unwrap(), 4);
        let t = count_displacements(&same, 10.0).unwrap();
        assert!(t.entries.iter().all(|e| e.multiplicity == 4));
    }

    #[test]
    fn table_is_symmetric_and_totals_match() {
        let t = count_displacements(&degenerate(), 12.0).unwrap();
        for e in &t.entries {
            let neg: Vec<f64> = e.displacement.iter().map(|x| -x).collect();
            assert_eq!(t.count(&neg), e.count);
        }
        assert_eq!(t.total_pairs(), (t.point_count * t.point_count) as u64);
        assert_eq!(t.count(&[0.0, 0.0]), t.point_count as u64);
    }

    #[test]
    fn ambiguous_float_crystal_rejected() {
        let crystal =
            IdealCrystal::from_f64(LatticeBasis::identity(1), 0, &[vec![0.0], vec![1.0 + 5e-9]]).unwrap();
        assert!(matches!(
            count_displacements(&crystal, 10.0),
            Err(Error::AmbiguousDisplacements { .. })
        ));
    }

    #[test]
    fn integer_autocorrelation() {
        let phi = TestFunction::from(GaussianAtom::standard(1));
        let v = autocorrelation_apply(&integers(), &phi, 1e-12).unwrap();
        assert!((v.value.re - 1.086435).abs() < 1e-6);
        assert!(v.truncation_bound <= 1e-12);
        let shifted = IdealCrystal::new(LatticeBasis::identity(1), 0, vec![vec![Scalar::ratio(3, 10)]]).unwrap();
        let w = autocorrelation_apply(&shifted, &phi, 1e-12).unwrap();
        assert_eq!(v.value, w.value);
    }

    #[test]
    fn two_translate_expansion() {
        let crystal = two_z_pair();
        let atom = GaussianAtom::isotropic(vec![0.1], 0.8);
        let phi = TestFunction::from(atom.clone());
        let got = autocorrelation_apply(&crystal, &phi, 1e-13).unwrap().value;
        let v = 0.25;
        let oracle: Complex64 = (-60..=60)
            .map(|a| {
                let y = 2.0 * a as f64;
                atom.eval(&[y]) * 2.0 + atom.eval(&[y + v]) + atom.eval(&[y - v])
            })
            .sum::<Complex64>()
            / 2.0;
        assert!((got - oracle).norm() < 1e-12);
    }
}
