//! Lattice bases, the zero-padding embedding into higher dimensions, possibly
//! degenerate ideal crystals `X = T(Λ) + F`, and point enumeration.
//!
//! A basis is stored as the matrix `B` in row-major order; the lattice vectors
//! are its columns, so `Λ = B ℤ^m` and the dual lattice is `(B^{-1})^T ℤ^m`.
//! Entries that are all rational keep an exact copy alongside the `f64` one.

use std::cmp::Ordering;

use num::rational::BigRational;
use num::traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::par;
use crate::scalar::{rational_to_f64, Scalar};

/// `|det B|` below this rejects a basis.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Default bound on the number of points a single enumeration may return.
pub const DEFAULT_POINT_CAP: u128 = 100_000_000;

/// Float-mode tolerance for treating two displacement vectors as equal.
pub const DISPLACEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LatticeBasis {
    rank: usize,
    entries: Vec<Scalar>,
    float: Vec<f64>,
    inverse: Vec<f64>,
    det: f64,
    exact: Option<ExactBasis>,
}

#[derive(Debug, Clone)]
struct ExactBasis {
    entries: Vec<BigRational>,
    inverse: Vec<BigRational>,
    det: BigRational,
}

impl PartialEq for LatticeBasis {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.entries == other.entries
    }
}

impl LatticeBasis {
    /// Builds a basis from the rows of `B`.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        Self::with_threshold(rows, SINGULARITY_THRESHOLD)
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::Float(x)).collect())
                .collect(),
        )
    }

    /// Rows given as `(numerator, denominator)` pairs.
    pub fn from_ratio_rows(rows: &[Vec<(i64, i64)>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| Scalar::ratio(n, d)).collect())
                .collect(),
        )
    }

    pub fn identity(rank: usize) -> Self {
        let rows = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| Scalar::integer(i64::from(i == j)))
                    .collect()
            })
            .collect();
        Self::from_rows(rows).expect("identity is nonsingular")
    }

    pub fn with_threshold(rows: Vec<Vec<Scalar>>, threshold: f64) -> Result<Self> {
        let rank = rows.len();
        if rank == 0 {
            return Err(Error::InvalidInput("lattice rank must be at least 1".into()));
        }
        for row in &rows {
            if row.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: row.len(),
                    context: "basis row length",
                });
            }
        }
        let entries: Vec<Scalar> = rows.into_iter().flatten().collect();
        if entries.iter().any(|e| !e.value().is_finite()) {
            return Err(Error::InvalidInput("basis entries must be finite".into()));
        }
        let float: Vec<f64> = entries.iter().map(Scalar::value).collect();

        let exact_entries: Option<Vec<BigRational>> =
            entries.iter().map(|e| e.as_rational().cloned()).collect();
        let (det, inverse, exact) = match exact_entries {
            Some(q) => {
                let (det, inv) = linalg::det_inverse_rational(rank, &q);
                let det_f = rational_to_f64(&det);
                match inv {
                    Some(inv) if det_f.abs() >= threshold => {
                        let inv_f = inv.iter().map(rational_to_f64).collect();
                        (
                            det_f,
                            inv_f,
                            Some(ExactBasis {
                                entries: q,
                                inverse: inv,
                                det,
                            }),
                        )
                    }
                    _ => return Err(Error::SingularBasis { det: det_f, threshold }),
                }
            }
            None => {
                let (det, inv) = linalg::det_inverse_f64(rank, &float);
                match inv {
                    Some(inv) if det.abs() >= threshold => (det, inv, None),
                    _ => return Err(Error::SingularBasis { det, threshold }),
                }
            }
        };
        Ok(Self {
            rank,
            entries,
            float,
            inverse,
            det,
            exact,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Row-major entries of `B`.
    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.entries.chunks(self.rank).map(<[Scalar]>::to_vec).collect()
    }

    pub fn matrix(&self) -> &[f64] {
        &self.float
    }

    pub fn inverse_matrix(&self) -> &[f64] {
        &self.inverse
    }

    /// The i-th lattice vector (column i of `B`).
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.rank).map(|r| self.float[r * self.rank + i]).collect()
    }

    pub fn signed_determinant(&self) -> f64 {
        self.det
    }

    pub fn exact_determinant(&self) -> Option<BigRational> {
        self.exact.as_ref().map(|e| e.det.abs())
    }

    /// `B a` for integer coordinates `a`.
    pub fn point(&self, coords: &[i64]) -> Vec<f64> {
        linalg::mat_vec_i64(self.rank, &self.float, coords)
    }

    pub fn exact_point(&self, coords: &[i64]) -> Option<Vec<BigRational>> {
        let e = self.exact.as_ref()?;
        let m = self.rank;
        Some(
            (0..m)
                .map(|i| {
                    (0..m).fold(BigRational::zero(), |acc, k| {
                        acc + &e.entries[i * m + k] * BigRational::from_integer(coords[k].into())
                    })
                })
                .collect(),
        )
    }

    /// Real coordinates `B^{-1} y` of a point of `ℝ^m`.
    pub fn coordinates(&self, y: &[f64]) -> Vec<f64> {
        linalg::mat_vec(self.rank, &self.inverse, y)
    }

    /// Half the sum of the basis vector lengths: every fundamental cell
    /// `B(a + [-1/2, 1/2]^m)` lies within this distance of `B a`.
    pub fn cell_radius(&self) -> f64 {
        0.5 * (0..self.rank).map(|i| linalg::norm(&self.column(i))).sum::<f64>()
    }
}

/// `|det B|`, the covolume of the lattice.
pub fn determinant(basis: &LatticeBasis) -> f64 {
    basis.det.abs()
}

/// Basis `(B^{-1})^T` of the dual lattice `{x : x·y ∈ ℤ for all y ∈ Λ}`.
pub fn dual_basis(basis: &LatticeBasis) -> Result<LatticeBasis> {
    let m = basis.rank;
    let rows: Vec<Vec<Scalar>> = match &basis.exact {
        Some(e) => linalg::transpose(m, &e.inverse)
            .chunks(m)
            .map(|r| r.iter().cloned().map(Scalar::Rational).collect())
            .collect(),
        None => linalg::transpose(m, &basis.inverse)
            .chunks(m)
            .map(|r| r.iter().copied().map(Scalar::Float).collect())
            .collect(),
    };
    // The dual of a valid basis has determinant 1/|det B|, which may fall
    // under the default threshold for very coarse lattices.
    LatticeBasis::with_threshold(rows, 0.0)
}

/// The map `T`: appends `d` zeros.
pub fn embed(point: &[f64], d: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(point.len() + d);
    out.extend_from_slice(point);
    out.resize(point.len() + d, 0.0);
    out
}

/// `X = T(Λ) + F` in `ℝ^{m+d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealCrystal {
    basis: LatticeBasis,
    degenerate_dim: usize,
    translates: Vec<Vec<Scalar>>,
    translates_f64: Vec<Vec<f64>>,
}

impl IdealCrystal {
    pub fn new(basis: LatticeBasis, degenerate_dim: usize, translates: Vec<Vec<Scalar>>) -> Result<Self> {
        if translates.is_empty() {
            return Err(Error::InvalidInput("an ideal crystal needs at least one translate".into()));
        }
        let n = basis.rank() + degenerate_dim;
        for t in &translates {
            if t.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: t.len(),
                    context: "translate length",
                });
            }
            if t.iter().any(|x| !x.value().is_finite()) {
                return Err(Error::InvalidInput("translates must be finite".into()));
            }
        }
        for (index, t) in translates.iter().enumerate() {
            if let Some(first) = translates[..index].iter().position(|u| same_vector(u, t)) {
                return Err(Error::DuplicateTranslate { index, first });
            }
        }
        let translates_f64 = translates
            .iter()
            .map(|t| t.iter().map(Scalar::value).collect())
            .collect();
        Ok(Self {
            basis,
            degenerate_dim,
            translates,
            translates_f64,
        })
    }

    pub fn from_f64(basis: LatticeBasis, degenerate_dim: usize, translates: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            basis,
            degenerate_dim,
            translates
                .iter()
                .map(|t| t.iter().map(|&x| Scalar::Float(x)).collect())
                .collect(),
        )
    }

    /// `Λ = ℤ^m`, `d = 0`, `F = {0}`.
    pub fn lattice(basis: LatticeBasis) -> Self {
        let m = basis.rank();
        Self::new(basis, 0, vec![vec![Scalar::integer(0); m]]).expect("single translate is valid")
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn degenerate_dim(&self) -> usize {
        self.degenerate_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rank() + self.degenerate_dim
    }

    pub fn translates(&self) -> &[Vec<Scalar>] {
        &self.translates
    }

    pub fn translates_f64(&self) -> &[Vec<f64>] {
        &self.translates_f64
    }

    pub fn is_exact(&self) -> bool {
        self.basis.is_exact() && self.translates.iter().flatten().all(Scalar::is_exact)
    }

    /// The crystal translated by `v ∈ ℝ^{m+d}`.
    pub fn shifted(&self, v: &[Scalar]) -> Result<Self> {
        if v.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: v.len(),
                context: "shift vector",
            });
        }
        let translates = self
            .translates
            .iter()
            .map(|t| t.iter().zip(v).map(|(a, b)| a.add(b)).collect())
            .collect();
        Self::new(self.basis.clone(), self.degenerate_dim, translates)
    }

    /// Shift along the degenerate axes putting the midrange of each
    /// degenerate coordinate of `F` at zero.
    pub fn recentered(&self) -> Self {
        let m = self.rank();
        let mut shift = vec![Scalar::integer(0); self.ambient_dim()];
        for (axis, slot) in shift.iter_mut().enumerate().skip(m) {
            let column: Vec<&Scalar> = self.translates.iter().map(|t| &t[axis]).collect();
            let lo = column.iter().min_by(|a, b| a.cmp_value(b)).unwrap();
            let hi = column.iter().max_by(|a, b| a.cmp_value(b)).unwrap();
            let mid = lo.add(hi).mul(&Scalar::ratio(1, 2));
            *slot = Scalar::integer(0).sub(&mid);
        }
        self.shifted(&shift).expect("recentering keeps translates distinct")
    }
}

fn same_vector(a: &[Scalar], b: &[Scalar]) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x.as_rational(), y.as_rational()) {
        (Some(p), Some(q)) => p == q,
        _ => x.value() == y.value(),
    })
}

/// Closed axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub center: Vec<f64>,
    pub half_widths: Vec<f64>,
}

impl Region {
    pub fn new(center: Vec<f64>, half_widths: Vec<f64>) -> Result<Self> {
        if center.len() != half_widths.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: half_widths.len(),
                context: "region half-widths",
            });
        }
        if half_widths.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidRegion("half-widths must be positive and finite".into()));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidRegion("center must be finite".into()));
        }
        Ok(Self { center, half_widths })
    }

    /// The box centered at the origin with the given side lengths.
    pub fn centered(sides: &[f64]) -> Result<Self> {
        Self::new(vec![0.0; sides.len()], sides.iter().map(|s| s / 2.0).collect())
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        self.half_widths.iter().map(|h| 2.0 * h).product()
    }

    fn lower(&self, i: usize) -> f64 {
        self.center[i] - self.half_widths[i]
    }

    fn upper(&self, i: usize) -> f64 {
        self.center[i] + self.half_widths[i]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().enumerate().all(|(i, &v)| {
            let slack = 1e-12 * (1.0 + self.lower(i).abs().max(self.upper(i).abs()));
            v >= self.lower(i) - slack && v <= self.upper(i) + slack
        })
    }

    fn contains_exact(&self, x: &[BigRational]) -> bool {
        x.iter().enumerate().all(|(i, v)| {
            let lo = BigRational::from_float(self.lower(i)).expect("finite");
            let hi = BigRational::from_float(self.upper(i)).expect("finite");
            *v >= lo && *v <= hi
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalPoint {
    pub position: Vec<f64>,
    pub lattice_coords: Vec<i64>,
    pub translate: usize,
}

pub fn enumerate_points(crystal: &IdealCrystal, region: &Region) -> Result<Vec<CrystalPoint>> {
    enumerate_points_with_cap(crystal, region, DEFAULT_POINT_CAP)
}

/// All points of the crystal in the closed box, in ascending lexicographic
/// order of position. Rational crystals are tested for membership exactly.
pub fn enumerate_points_with_cap(
    crystal: &IdealCrystal,
    region: &Region,
    cap: u128,
) -> Result<Vec<CrystalPoint>> {
    let n = crystal.ambient_dim();
    if region.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: region.dim(),
            context: "region dimension",
        });
    }
    let m = crystal.rank();
    let basis = crystal.basis();
    let exact = crystal.is_exact();

    let mut boxes = Vec::new();
    let mut candidates: u128 = 0;
    for (j, f) in crystal.translates_f64().iter().enumerate() {
        // Degenerate coordinates of the translate are fixed; skip translates
        // whose slab misses the box.
        let degenerate_ok = (m..n).all(|i| {
            let probe: Vec<f64> = (0..n).map(|k| if k == i { f[i] } else { region.center[k] }).collect();
            region.contains(&probe)
        });
        if !degenerate_ok {
            continue;
        }
        let shifted_center: Vec<f64> = (0..m).map(|i| region.center[i] - f[i]).collect();
        let ranges = integer_box(basis, &shifted_center, &region.half_widths[..m]);
        let count = ranges
            .iter()
            .map(|&(lo, hi)| (hi - lo + 1).max(0) as u128)
            .product::<u128>();
        candidates = candidates.saturating_add(count);
        boxes.push((j, ranges));
    }
    if candidates > cap {
        return Err(Error::CapExceeded {
            requested: candidates,
            cap,
        });
    }

    let mut points = Vec::new();
    for (j, ranges) in boxes {
        let (lo0, hi0) = ranges[0];
        if hi0 < lo0 {
            continue;
        }
        let translate = &crystal.translates()[j];
        let f = &crystal.translates_f64()[j];
        let chunks = par::map_range((hi0 - lo0 + 1) as usize, |offset| {
            let first = lo0 + offset as i64;
            let mut out = Vec::new();
            for_each_in_box(&ranges[1..], |rest| {
                let mut coords = Vec::with_capacity(m);
                coords.push(first);
                coords.extend_from_slice(rest);
                let inside = if exact {
                    let p = basis.exact_point(&coords).expect("exact basis");
                    let full: Vec<BigRational> = (0..n)
                        .map(|i| {
                            let t = translate[i].as_rational().expect("exact translate").clone();
                            if i < m {
                                &p[i] + t
                            } else {
                                t
                            }
                        })
                        .collect();
                    region.contains_exact(&full)
                } else {
                    let pos = position(basis, &coords, f);
                    region.contains(&pos)
                };
                if inside {
                    out.push(CrystalPoint {
                        position: position(basis, &coords, f),
                        lattice_coords: coords,
                        translate: j,
                    });
                }
            });
            out
        });
        points.extend(chunks.into_iter().flatten());
    }
    if points.len() as u128 > cap {
        return Err(Error::CapExceeded {
            requested: points.len() as u128,
            cap,
        });
    }
    points.sort_by(compare_points);
    Ok(points)
}

fn compare_points(a: &CrystalPoint, b: &CrystalPoint) -> Ordering {
    lex_cmp(&a.position, &b.position)
        .then_with(|| a.lattice_coords.cmp(&b.lattice_coords))
        .then_with(|| a.translate.cmp(&b.translate))
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn position(basis: &LatticeBasis, coords: &[i64], f: &[f64]) -> Vec<f64> {
    let p = basis.point(coords);
    f.iter()
        .enumerate()
        .map(|(i, &fi)| if i < p.len() { p[i] + fi } else { fi })
        .collect()
}

/// Integer coordinate ranges covering `{a : B a ∈ center + [-h, h]}`.
fn integer_box(basis: &LatticeBasis, center: &[f64], half_widths: &[f64]) -> Vec<(i64, i64)> {
    let m = basis.rank();
    let inv = basis.inverse_matrix();
    let a0 = basis.coordinates(center);
    (0..m)
        .map(|i| {
            let radius: f64 = (0..m).map(|k| inv[i * m + k].abs() * half_widths[k]).sum();
            let slack = 1e-9 * (1.0 + radius + a0[i].abs());
            (
                (a0[i] - radius - slack).ceil() as i64,
                (a0[i] + radius + slack).floor() as i64,
            )
        })
        .collect()
}

fn for_each_in_box(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|&(lo, hi)| hi < lo) {
        return;
    }
    let mut current: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&current);
        let mut axis = ranges.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if current[axis] < ranges[axis].1 {
                current[axis] += 1;
                for (k, c) in current.iter_mut().enumerate().skip(axis + 1) {
                    *c = ranges[k].0;
                }
                break;
            }
        }
    }
}

/// Lattice points `B a` with `|B a - center| ≤ radius`, in lexicographic order of `a`.
pub fn lattice_points_in_ball(
    basis: &LatticeBasis,
    center: &[f64],
    radius: f64,
    cap: u128,
) -> Result<Vec<(Vec<i64>, Vec<f64>)>> {
    let m = basis.rank();
    let inv = basis.inverse_matrix();
    let a0 = basis.coordinates(center);
    let ranges: Vec<(i64, i64)> = (0..m)
        .map(|i| {
            let row_norm = linalg::norm(&inv[i * m..(i + 1) * m]);
            let r = radius * row_norm;
            ((a0[i] - r).ceil() as i64, (a0[i] + r).floor() as i64)
        })
        .collect();
    let candidates = ranges
        .iter()
        .map(|&(lo, hi)| (hi - lo + 1).max(0) as u128)
        .product::<u128>();
    if candidates > cap {
        return Err(Error::CapExceeded {
            requested: candidates,
            cap,
        });
    }
    let mut out = Vec::new();
    for_each_in_box(&ranges, |a| {
        let y = basis.point(a);
        let dist2: f64 = y.iter().zip(center).map(|(p, c)| (p - c) * (p - c)).sum();
        if dist2 <= radius * radius {
            out.push((a.to_vec(), y));
        }
    });
    Ok(out)
}

/// For one lattice point `a`: the distinct vectors `T(B a) + f_j - f_k` and
/// how many ordered pairs `(j, k)` produce each.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDisplacements {
    pub lattice_coords: Vec<i64>,
    pub lattice_point: Vec<f64>,
    pub displacements: Vec<(Vec<f64>, usize)>,
}

impl LatticeDisplacements {
    pub fn total_pairs(&self) -> usize {
        self.displacements.iter().map(|(_, c)| c).sum()
    }
}

/// Pair counts `c(a)` for every lattice point within `lattice_radius` of the origin.
pub fn displacement_index(crystal: &IdealCrystal, lattice_radius: f64) -> Result<Vec<LatticeDisplacements>> {
    if !(lattice_radius >= 0.0) {
        return Err(Error::InvalidInput("lattice radius must be nonnegative".into()));
    }
    let m = crystal.rank();
    let n = crystal.ambient_dim();
    let points = lattice_points_in_ball(crystal.basis(), &vec![0.0; m], lattice_radius, DEFAULT_POINT_CAP)?;
    let f = crystal.translates_f64();
    let exact = crystal.is_exact();
    Ok(par::map(&points, |(coords, y)| {
        let mut groups: Vec<(Vec<f64>, Option<Vec<BigRational>>, usize)> = Vec::new();
        for fj in f.iter().enumerate() {
            for fk in f.iter().enumerate() {
                let v: Vec<f64> = (0..n)
                    .map(|i| if i < m { y[i] } else { 0.0 } + fj.1[i] - fk.1[i])
                    .collect();
                let key = exact.then(|| exact_displacement(crystal, coords, fj.0, fk.0));
                match groups.iter_mut().find(|(w, wk, _)| match (wk, &key) {
                    (Some(a), Some(b)) => a == b,
                    _ => linalg_sup_dist(w, &v) <= DISPLACEMENT_TOL,
                }) {
                    Some(g) => g.2 += 1,
                    None => groups.push((v, key, 1)),
                }
            }
        }
        groups.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        LatticeDisplacements {
            lattice_coords: coords.clone(),
            lattice_point: y.clone(),
            displacements: groups.into_iter().map(|(v, _, c)| (v, c)).collect(),
        }
    }))
}

/// Exact `T(B Δ) + f_j - f_k`: the displacement from a point on translate `k`
/// to a point on translate `j` whose lattice coordinates exceed it by `Δ`.
pub(crate) fn exact_displacement(crystal: &IdealCrystal, delta: &[i64], j: usize, k: usize) -> Vec<BigRational> {
    let m = crystal.rank();
    let p = crystal.basis().exact_point(delta).expect("exact basis");
    let fj = &crystal.translates()[j];
    let fk = &crystal.translates()[k];
    (0..crystal.ambient_dim())
        .map(|i| {
            let base = if i < m { p[i].clone() } else { BigRational::zero() };
            base + fj[i].as_rational().unwrap() - fk[i].as_rational().unwrap()
        })
        .collect()
}

pub(crate) fn linalg_sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
