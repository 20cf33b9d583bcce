//! Modulated anisotropic Gaussians `A e(k·x) Π exp(-π t_i (x_i - c_i)²)`,
//! `e(u) = exp(2πiu)`, with closed-form Fourier transforms, and truncated
//! lattice sums with a certified tail bound.

use std::f64::consts::PI;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{determinant, lattice_points_in_ball, LatticeBasis, DEFAULT_POINT_CAP};
use crate::par;

/// `e(u) = exp(2πiu)`.
pub fn e(u: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianAtom {
    center: Vec<f64>,
    inverse_scales: Vec<f64>,
    modulation: Vec<f64>,
    amplitude: Complex64,
}

impl GaussianAtom {
    pub fn new(center: Vec<f64>, inverse_scales: Vec<f64>, modulation: Vec<f64>, amplitude: Complex64) -> Result<Self> {
        let n = center.len();
        if n == 0 {
            return Err(Error::InvalidInput("a Gaussian atom needs at least one axis".into()));
        }
        for (len, context) in [(inverse_scales.len(), "inverse scales"), (modulation.len(), "modulation")] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: len,
                    context,
                });
            }
        }
        if inverse_scales.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidInput("inverse scales must be positive and finite".into()));
        }
        if center.iter().chain(&modulation).any(|x| !x.is_finite()) || !amplitude.is_finite() {
            return Err(Error::InvalidInput("atom parameters must be finite".into()));
        }
        Ok(Self {
            center,
            inverse_scales,
            modulation,
            amplitude,
        })
    }

    /// `exp(-π |x|²)` on `ℝ^n`.
    pub fn standard(n: usize) -> Self {
        Self::isotropic(vec![0.0; n], 1.0)
    }

    pub fn isotropic(center: Vec<f64>, t: f64) -> Self {
        let n = center.len();
        Self::new(center, vec![t; n], vec![0.0; n], Complex64::new(1.0, 0.0)).expect("valid isotropic atom")
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn inverse_scales(&self) -> &[f64] {
        &self.inverse_scales
    }

    pub fn modulation(&self) -> &[f64] {
        &self.modulation
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..self.clone()
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut phase = 0.0;
        let mut exponent = 0.0;
        for i in 0..self.dim() {
            let u = x[i] - self.center[i];
            phase += self.modulation[i] * x[i];
            exponent -= PI * self.inverse_scales[i] * u * u;
        }
        self.amplitude * e(phase) * exponent.exp()
    }

    /// `φ̂(ξ) = ∫ φ(x) e(-ξ·x) dx`, again an atom: per axis the center becomes
    /// `k`, the modulation `-c`, the inverse scale `1/t`, and the amplitude
    /// picks up `t^{-1/2} e(c k)`.
    pub fn fourier(&self) -> Self {
        let mut factor = 1.0;
        let mut phase = 0.0;
        for i in 0..self.dim() {
            factor /= self.inverse_scales[i].sqrt();
            phase += self.center[i] * self.modulation[i];
        }
        Self {
            center: self.modulation.clone(),
            inverse_scales: self.inverse_scales.iter().map(|t| 1.0 / t).collect(),
            modulation: self.center.iter().map(|c| -c).collect(),
            amplitude: self.amplitude * factor * e(phase),
        }
    }

    /// `x ↦ φ(-x)`.
    pub fn reflected(&self) -> Self {
        Self {
            center: self.center.iter().map(|c| -c).collect(),
            modulation: self.modulation.iter().map(|k| -k).collect(),
            ..self.clone()
        }
    }

    /// The factor on the first `m` axes, carrying the full amplitude.
    pub fn leading(&self, m: usize) -> Self {
        Self {
            center: self.center[..m].to_vec(),
            inverse_scales: self.inverse_scales[..m].to_vec(),
            modulation: self.modulation[..m].to_vec(),
            amplitude: self.amplitude,
        }
    }

    /// Multiplies by `e(μ·x)`.
    pub fn modulated(&self, mu: &[f64]) -> Self {
        Self {
            modulation: self.modulation.iter().zip(mu).map(|(k, m)| k + m).collect(),
            ..self.clone()
        }
    }

    /// The unit-amplitude factor on the axes from `m` on, evaluated at `y`.
    pub fn trailing_value(&self, m: usize, y: &[f64]) -> Complex64 {
        let mut phase = 0.0;
        let mut exponent = 0.0;
        for (i, yi) in (m..self.dim()).zip(y) {
            let u = yi - self.center[i];
            phase += self.modulation[i] * yi;
            exponent -= PI * self.inverse_scales[i] * u * u;
        }
        e(phase) * exponent.exp()
    }

    /// `∫ e(μ·y) Π_{i ≥ m} e(k_i y_i) exp(-π t_i (y_i - c_i)²) dy`
    /// `= Π e(c_i (k_i + μ_i)) t_i^{-1/2} exp(-π (k_i + μ_i)² / t_i)`.
    pub fn trailing_integral(&self, m: usize, mu: &[f64]) -> Complex64 {
        let mut factor = 1.0;
        let mut phase = 0.0;
        for (i, mui) in (m..self.dim()).zip(mu) {
            let w = self.modulation[i] + mui;
            let t = self.inverse_scales[i];
            factor *= (-PI * w * w / t).exp() / t.sqrt();
            phase += self.center[i] * w;
        }
        e(phase) * factor
    }

    /// `|φ(x)| ≤ |A| exp(-π t_min |x - c|²)`.
    pub fn min_inverse_scale(&self) -> f64 {
        self.inverse_scales.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A finite sum of atoms on a common `ℝ^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    atoms: Vec<GaussianAtom>,
}

impl TestFunction {
    pub fn new(atoms: Vec<GaussianAtom>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidInput("a test function needs at least one atom".into()));
        };
        let n = first.dim();
        if let Some(a) = atoms.iter().find(|a| a.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.dim(),
                context: "atom dimension",
            });
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[GaussianAtom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.atoms.iter().map(|a| a.eval(x)).sum()
    }

    pub fn fourier(&self) -> Self {
        Self {
            atoms: self.atoms.iter().map(GaussianAtom::fourier).collect(),
        }
    }

    pub fn reflected(&self) -> Self {
        Self {
            atoms: self.atoms.iter().map(GaussianAtom::reflected).collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| a.scaled(factor)).collect(),
        }
    }
}

impl From<GaussianAtom> for TestFunction {
    fn from(atom: GaussianAtom) -> Self {
        Self { atoms: vec![atom] }
    }
}

/// A truncated series together with a bound on what was dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSum {
    pub value: Complex64,
    pub bound: f64,
    pub terms: usize,
}

impl TruncatedSum {
    pub const ZERO: Self = Self {
        value: Complex64 { re: 0.0, im: 0.0 },
        bound: 0.0,
        terms: 0,
    };

    pub fn scaled(self, factor: Complex64) -> Self {
        Self {
            value: self.value * factor,
            bound: self.bound * factor.norm(),
            terms: self.terms,
        }
    }

    pub fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            bound: self.bound + other.bound,
            terms: self.terms + other.terms,
        }
    }
}

/// Volume of the unit ball in `ℝ^m`.
fn unit_ball_volume(m: usize) -> f64 {
    // Γ(m/2 + 1) by the half-integer recursion.
    let mut gamma = if m % 2 == 0 { 1.0 } else { PI.sqrt() / 2.0 };
    let mut x = if m % 2 == 0 { 1.0 } else { 1.5 };
    while x < m as f64 / 2.0 + 1.0 - 1e-9 {
        gamma *= x;
        x += 1.0;
    }
    PI.powf(m as f64 / 2.0) / gamma
}

/// Bound on `Σ exp(-π t |y - c|²)` over points of a translated lattice with
/// `|y - c| > R`, valid for `R ≥ δ` and `π t R² ≥ m`.
///
/// Lattice cells centered at points within `r` lie in the ball of radius
/// `r + δ` (`δ` = cell radius), so at most `V_m (r + δ)^m / det` points lie
/// within `r`. Summing by parts and using `r + δ ≤ 2r`:
/// `tail ≤ V_m 2^m / det · (π t)^{-m/2} Γ(m/2 + 1, π t R²)`, and
/// `Γ(a, U) ≤ U^{a-1} e^{-U} U / (U - a + 1) ≤ 2 U^{m/2} e^{-U}` for `U ≥ m`.
pub fn gaussian_tail_bound(m: usize, det: f64, t: f64, radius: f64) -> f64 {
    let u = PI * t * radius * radius;
    let mf = m as f64;
    unit_ball_volume(m) * 2f64.powi(m as i32) / det * (PI * t).powf(-mf / 2.0) * 2.0 * (u.powf(mf / 2.0) * (-u).exp())
}

/// Smallest radius (to bisection accuracy) whose tail bound is at most `eps`.
pub fn truncation_radius(m: usize, det: f64, cell_radius: f64, t: f64, eps: f64) -> f64 {
    let floor = cell_radius.max((m as f64 / (PI * t)).sqrt());
    if gaussian_tail_bound(m, det, t, floor) <= eps {
        return floor;
    }
    let mut hi = floor * 2.0;
    while gaussian_tail_bound(m, det, t, hi) > eps {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if gaussian_tail_bound(m, det, t, mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `Σ_{a ∈ ℤ^m} φ(B a + offset)` for an atom on `ℝ^m`, truncated so the
/// dropped tail is at most `eps`.
pub fn lattice_sum(basis: &LatticeBasis, atom: &GaussianAtom, offset: &[f64], eps: f64) -> Result<TruncatedSum> {
    let m = basis.rank();
    if atom.dim() != m || offset.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: if atom.dim() != m { atom.dim() } else { offset.len() },
            context: "lattice sum atom/offset",
        });
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("truncation eps must be positive".into()));
    }
    let amp = atom.amplitude().norm();
    if amp == 0.0 {
        return Ok(TruncatedSum::ZERO);
    }
    let det = determinant(basis);
    let t = atom.min_inverse_scale();
    let radius = truncation_radius(m, det, basis.cell_radius(), t, eps / amp);
    let target: Vec<f64> = atom.center().iter().zip(offset).map(|(c, o)| c - o).collect();
    let points = lattice_points_in_ball(basis, &target, radius, DEFAULT_POINT_CAP)?;
    let values = par::map(&points, |(_, y)| {
        let x: Vec<f64> = y.iter().zip(offset).map(|(a, b)| a + b).collect();
        atom.eval(&x)
    });
    Ok(TruncatedSum {
        value: values.iter().sum(),
        bound: amp * gaussian_tail_bound(m, det, t, radius),
        terms: points.len(),
    })
}
