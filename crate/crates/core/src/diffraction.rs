//! Poisson summation on lattices, structure factors and the diffraction
//! measure of an ideal crystal.
//!
//! The diffraction measure is `γ̂ = 1/(C^d |det B|²) Σ_{b ∈ Λ*} δ_b ⊗ h_b`
//! with density `h_b(α) = |Σ_j e((b, α)·f_j)|²` on the degenerate axes.
//! When all translates share their degenerate coordinates, `h_b` is the
//! constant structure intensity `I(b) = |Σ_j e(b·f_j)|²`.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlation::effective_averaging_constant;
use crate::dirichlet::SolverConfig;
use crate::error::{Error, Result};
use crate::gaussian::{e, lattice_sum, GaussianAtom, TestFunction, TruncatedSum};
use crate::lattice::{determinant, dual_basis, lattice_points_in_ball, IdealCrystal, LatticeBasis, DEFAULT_POINT_CAP};
use crate::par;
use crate::scalar::Scalar;
use crate::strings::StringSpec;

pub fn fourier_transform(phi: &TestFunction) -> TestFunction {
    phi.fourier()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfReport {
    /// `Σ_{a ∈ Λ} φ(a + α, x)`.
    pub lhs: TruncatedSum,
    /// `|det B|^{-1} ∫ Σ_{b ∈ Λ*} φ̂(b, y) e(α·b + x·y) dy`.
    pub rhs: TruncatedSum,
}

impl PsfReport {
    pub fn difference(&self) -> f64 {
        (self.lhs.value - self.rhs.value).norm()
    }
}

/// Both sides of the Poisson summation formula for `φ` on `ℝ^{m+d}`, with
/// the lattice acting on the first `m` axes; each side is truncated with a
/// dropped tail of at most `eps`.
pub fn psf_check(
    basis: &LatticeBasis,
    d: usize,
    phi: &TestFunction,
    alpha: &[f64],
    x: &[f64],
    eps: f64,
) -> Result<PsfReport> {
    let m = basis.rank();
    check_dim(phi.dim(), m + d, "test function dimension")?;
    check_dim(alpha.len(), m, "alpha")?;
    check_dim(x.len(), d, "x")?;
    let dual = dual_basis(basis)?;
    let det = determinant(basis);
    let share = eps / phi.atoms().len() as f64;

    let mut lhs = TruncatedSum::ZERO;
    let mut rhs = TruncatedSum::ZERO;
    for atom in phi.atoms() {
        let factor = atom.trailing_value(m, x);
        if factor.norm() > 0.0 {
            let s = lattice_sum(basis, &atom.leading(m), alpha, share / factor.norm())?;
            lhs = lhs.plus(s.scaled(factor));
        }
        let hat = atom.fourier();
        let factor = hat.trailing_integral(m, x) / det;
        if factor.norm() > 0.0 {
            let lead = hat.leading(m).modulated(alpha);
            let s = lattice_sum(&dual, &lead, &vec![0.0; m], share / factor.norm())?;
            rhs = rhs.plus(s.scaled(factor));
        }
    }
    Ok(PsfReport { lhs, rhs })
}

fn check_dim(found: usize, expected: usize, context: &'static str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found,
            context,
        })
    }
}

/// `|Σ_j e(T(b)·f_j)|²`; only the lattice-direction coordinates of `f_j` enter.
pub fn structure_intensity(crystal: &IdealCrystal, b: &[f64]) -> f64 {
    let m = crystal.rank();
    let sum: Complex64 = crystal
        .translates_f64()
        .iter()
        .map(|f| e(b.iter().zip(&f[..m]).map(|(x, y)| x * y).sum()))
        .sum();
    sum.norm_sqr()
}

/// `|Σ_j e((b, α)·f_j)|²`, the density of the diffraction measure on the
/// degenerate slice over the dual point `b`.
pub fn structure_density(crystal: &IdealCrystal, b: &[f64], alpha: &[f64]) -> f64 {
    let sum: Complex64 = crystal
        .translates_f64()
        .iter()
        .map(|f| e(b.iter().chain(alpha).zip(f).map(|(x, y)| x * y).sum()))
        .sum();
    sum.norm_sqr()
}

/// `1/(C^d |det B|²)`.
pub fn diffraction_prefactor(crystal: &IdealCrystal) -> f64 {
    let det = determinant(crystal.basis());
    1.0 / (effective_averaging_constant(crystal).powi(crystal.degenerate_dim() as i32) * det * det)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombPoint {
    pub coords: Vec<i64>,
    pub b: Vec<f64>,
    /// `I(b)`.
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousComb {
    pub prefactor: f64,
    /// Dual lattice points ordered by their coordinates.
    pub points: Vec<CombPoint>,
    crystal: IdealCrystal,
}

impl ContinuousComb {
    /// `prefactor · I(b)`.
    pub fn weight(&self, point: &CombPoint) -> f64 {
        self.prefactor * point.intensity
    }

    /// Density of the measure at `(b, α)`: `prefactor · |Σ_j e((b, α)·f_j)|²`.
    pub fn density(&self, b: &[f64], alpha: &[f64]) -> f64 {
        self.prefactor * structure_density(&self.crystal, b, alpha)
    }
}

/// The dual-lattice points with `|b| ≤ b_max` and their intensities.
pub fn diffraction_comb(crystal: &IdealCrystal, b_max: f64) -> Result<ContinuousComb> {
    let dual = dual_basis(crystal.basis())?;
    let m = crystal.rank();
    let found = lattice_points_in_ball(&dual, &vec![0.0; m], b_max * (1.0 + 1e-12), DEFAULT_POINT_CAP)?;
    let points = par::map(&found, |(coords, b)| CombPoint {
        coords: coords.clone(),
        b: b.clone(),
        intensity: structure_intensity(crystal, b),
    });
    Ok(ContinuousComb {
        prefactor: diffraction_prefactor(crystal),
        points,
        crystal: crystal.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffractionValue {
    pub value: Complex64,
    pub truncation_bound: f64,
}

/// `γ̂(φ) = 1/(C^d |det B|²) Σ_{b ∈ Λ*} Σ_{j,k} e(b·(f_j - f_k)) ∫ φ(b, α) e(α·(f_j - f_k)) dα`,
/// split into lattice and degenerate parts of `f_j - f_k`.
pub fn diffraction_apply(crystal: &IdealCrystal, phi: &TestFunction, eps: f64) -> Result<DiffractionValue> {
    apply_comb(crystal, phi, eps, true)
}

/// The intensity form `1/(C^d |det B|²) Σ_b I(b) ∫ φ(b, α) dα`. It agrees
/// with [`diffraction_apply`] exactly when all translates share their
/// degenerate coordinates.
pub fn diffraction_apply_intensity_form(
    crystal: &IdealCrystal,
    phi: &TestFunction,
    eps: f64,
) -> Result<DiffractionValue> {
    apply_comb(crystal, phi, eps, false)
}

fn apply_comb(crystal: &IdealCrystal, phi: &TestFunction, eps: f64, degenerate_phase: bool) -> Result<DiffractionValue> {
    let m = crystal.rank();
    check_dim(phi.dim(), crystal.ambient_dim(), "test function dimension")?;
    let dual = dual_basis(crystal.basis())?;
    let prefactor = diffraction_prefactor(crystal);
    let f = crystal.translates_f64();
    let nf = f.len();
    let share = eps / (prefactor * (phi.atoms().len() * nf * nf) as f64);
    let origin = vec![0.0; m];
    let mut total = TruncatedSum::ZERO;
    for atom in phi.atoms() {
        for j in 0..nf {
            for k in 0..nf {
                let delta: Vec<f64> = f[j].iter().zip(&f[k]).map(|(a, b)| a - b).collect();
                let mu: Vec<f64> = if degenerate_phase {
                    delta[m..].to_vec()
                } else {
                    vec![0.0; delta.len() - m]
                };
                let factor = atom.trailing_integral(m, &mu);
                if factor.norm() == 0.0 {
                    continue;
                }
                let lead = atom.leading(m).modulated(&delta[..m]);
                let s = lattice_sum(&dual, &lead, &origin, share / factor.norm())?;
                total = total.plus(s.scaled(factor));
            }
        }
    }
    let total = total.scaled(Complex64::new(prefactor, 0.0));
    Ok(DiffractionValue {
        value: total.value,
        truncation_bound: total.bound,
    })
}

/// Diffraction of the complex-dimension crystal of a lattice string.
pub fn string_diffraction(
    spec: &StringSpec,
    phi: &TestFunction,
    eps: f64,
    config: &SolverConfig,
) -> Result<DiffractionValue> {
    let dc = spec.dimension_crystal(0.0, config)?;
    diffraction_apply(&dc.crystal, phi, eps)
}

/// A random atom: centers and modulations in `[-1, 1]`, inverse scales in
/// `[1/2, 2]`, complex amplitude of modulus at most 1.
pub fn random_atom(rng: &mut impl Rng, dim: usize) -> GaussianAtom {
    let center = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let scales = (0..dim).map(|_| rng.gen_range(0.5..=2.0)).collect();
    let modulation = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let amplitude = Complex64::from_polar(rng.gen_range(0.1..=1.0), rng.gen_range(-3.14..=3.14));
    GaussianAtom::new(center, scales, modulation, amplitude).expect("valid random atom")
}

/// Largest accepted `Π |b_i| / |det B|` for random trial bases.
pub const MAX_ORTHOGONALITY_DEFECT: f64 = 10.0;

/// A random rational basis with entries in `[1/3, 3]` (denominators ≤ 6),
/// resampled until its orthogonality defect is at most
/// [`MAX_ORTHOGONALITY_DEFECT`].
pub fn random_basis(rng: &mut impl Rng, m: usize) -> LatticeBasis {
    loop {
        let rows: Vec<Vec<Scalar>> = (0..m)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let q = rng.gen_range(1..=6i64);
                        let p = rng.gen_range(((q + 2) / 3)..=(3 * q));
                        Scalar::ratio(p, q)
                    })
                    .collect()
            })
            .collect();
        let Ok(basis) = LatticeBasis::from_rows(rows) else {
            continue;
        };
        let product: f64 = (0..m)
            .map(|i| basis.column(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        if product / determinant(&basis) <= MAX_ORTHOGONALITY_DEFECT {
            return basis;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsfTrial {
    pub basis: LatticeBasis,
    pub degenerate_dim: usize,
    pub phi: TestFunction,
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
    pub report: PsfReport,
}

/// Randomized PSF trials: `m ∈ {1, 2, 3}`, `d ∈ {0, 1, 2}`, one to three atoms.
pub fn psf_trials(count: usize, seed: u64, eps: f64) -> Result<Vec<PsfTrial>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let m = rng.gen_range(1..=3usize);
        let d = rng.gen_range(0..=2usize);
        let basis = random_basis(&mut rng, m);
        let atoms = (0..rng.gen_range(1..=3)).map(|_| random_atom(&mut rng, m + d)).collect();
        let phi = TestFunction::new(atoms)?;
        let alpha: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let report = psf_check(&basis, d, &phi, &alpha, &x, eps)?;
        out.push(PsfTrial {
            basis,
            degenerate_dim: d,
            phi,
            alpha,
            x,
            report,
        });
    }
    Ok(out)
}
