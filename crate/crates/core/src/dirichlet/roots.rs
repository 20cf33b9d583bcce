//! Sparse integer-coefficient polynomials and simultaneous root refinement
//! (Aberth–Ehrlich iteration).

use std::f64::consts::PI;
use std::fmt;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;

/// `Σ c_k z^k` with the nonzero terms stored in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    terms: Vec<(u64, i64)>,
}

impl SparsePolynomial {
    pub fn new(mut terms: Vec<(u64, i64)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(u64, i64)> = Vec::with_capacity(terms.len());
        for (deg, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == deg => last.1 += c,
                _ => merged.push((deg, c)),
            }
        }
        merged.retain(|t| t.1 != 0);
        Self { terms: merged }
    }

    pub fn terms(&self) -> &[(u64, i64)] {
        &self.terms
    }

    pub fn degree(&self) -> u64 {
        self.terms.last().map_or(0, |t| t.0)
    }

    pub fn coefficient(&self, degree: u64) -> i64 {
        self.terms
            .iter()
            .find(|t| t.0 == degree)
            .map_or(0, |t| t.1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(k, c)| z.powu(k as u32) * c as f64)
            .sum()
    }

    /// `(p(z), p'(z))`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &(k, c) in &self.terms {
            let c = c as f64;
            if k == 0 {
                p += c;
                continue;
            }
            let zk1 = z.powu(k as u32 - 1);
            p += zk1 * z * c;
            dp += zk1 * (c * k as f64);
        }
        (p, dp)
    }

    /// `Σ |c_k| |z|^k`, the scale against which residuals are measured.
    pub fn magnitude_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.terms
            .iter()
            .map(|&(k, c)| (c as f64).abs() * r.powi(k as i32))
            .sum()
    }

    pub fn dense_coefficients(&self) -> Vec<i64> {
        let mut out = vec![0; self.degree() as usize + 1];
        for &(k, c) in &self.terms {
            out[k as usize] = c;
        }
        out
    }
}

/// Renders as `1 - z - z^3`.
impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, &(k, c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.unsigned_abs();
            match (k, mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, 1) => write!(f, "z")?,
                (1, _) => write!(f, "{mag}z")?,
                (_, 1) => write!(f, "z^{k}")?,
                _ => write!(f, "{mag}z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Extra sweeps allowed after the residual target is met.
const POLISH_ITERATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Target for `|g(z)| / Σ|c_k||z|^k` at every root.
    pub tol: f64,
    pub max_iterations: usize,
    /// Roots closer than this in `z` are reported as one multiple root.
    pub cluster_eps: f64,
    /// Seeds the angular offset of the initial circle.
    pub seed: u64,
    /// Initial circle radius relative to `|c_0 / c_n|^{1/n}`.
    pub radius_scale: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 10_000,
            cluster_eps: 1e-7,
            seed: 0,
            radius_scale: 1.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSolution {
    /// All `n` roots counted with multiplicity.
    pub roots: Vec<Complex64>,
    /// `|g(z_i)|` for each root.
    pub residuals: Vec<f64>,
    /// Cluster size of each root (equal entries for members of one cluster).
    pub multiplicities: Vec<usize>,
    pub iterations: usize,
}

impl RootSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn solve_roots(poly: &SparsePolynomial, config: &SolverConfig) -> Result<RootSolution> {
    let n = poly.degree() as usize;
    if n == 0 {
        return Err(Error::InvalidInput("polynomial degree must be at least 1".into()));
    }
    // Factor out z^k for a vanishing constant term.
    let low = poly.terms()[0].0 as usize;
    let reduced = SparsePolynomial::new(poly.terms().iter().map(|&(k, c)| (k - low as u64, c)).collect());
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let mut iterations = 0;
    if reduced.degree() > 0 {
        let (found, its) = aberth(&reduced, config)?;
        roots.extend(found);
        iterations = its;
    }
    symmetrize_conjugates(&mut roots);
    let residuals = roots.iter().map(|&z| poly.eval(z).norm()).collect();
    let multiplicities = cluster_sizes(&roots, config.cluster_eps);
    Ok(RootSolution {
        roots,
        residuals,
        multiplicities,
        iterations,
    })
}

fn aberth(poly: &SparsePolynomial, config: &SolverConfig) -> Result<(Vec<Complex64>, usize)> {
    let n = poly.degree() as usize;
    let c0 = poly.coefficient(0) as f64;
    let cn = poly.coefficient(n as u64) as f64;
    let radius = (c0 / cn).abs().powf(1.0 / n as f64) * config.radius_scale;
    let offset = ChaCha8Rng::seed_from_u64(config.seed).gen_range(0.0..2.0 * PI / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius, offset + 2.0 * PI * j as f64 / n as f64))
        .collect();

    let mut worst = f64::INFINITY;
    let mut converged_at: Option<usize> = None;
    let mut accepted: Option<Vec<Complex64>> = None;
    for iteration in 0..config.max_iterations {
        let current = &z;
        // Jacobi-style sweep: every correction reads the previous iterate, so
        // the update does not depend on evaluation order.
        let steps: Vec<(Complex64, f64)> = par::map_range(n, |i| {
            let zi = current[i];
            let (p, dp) = poly.eval_with_derivative(zi);
            let relative = p.norm() / poly.magnitude_scale(zi).max(f64::MIN_POSITIVE);
            let ratio = p / dp;
            let repulsion: Complex64 = current
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (zi - zj).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            let step = if step.is_finite() {
                step
            } else {
                // p'(z) = 0 or coincident iterates: nudge off the critical point.
                Complex64::new(1e-8 * (1.0 + zi.norm()), 1e-8 * (1.0 + zi.norm()))
            };
            (step, relative)
        });
        worst = steps.iter().map(|s| s.1).fold(0.0, f64::max);
        let largest_step = steps
            .iter()
            .zip(&z)
            .map(|((step, _), zi)| step.norm() / (1.0 + zi.norm()))
            .fold(0.0, f64::max);
        if worst <= config.tol {
            // Keep polishing: near a multiple root the residual test is met
            // while the iterates are still ~sqrt(tol) apart.
            let since = *converged_at.get_or_insert(iteration);
            if largest_step <= 4.0 * f64::EPSILON || iteration - since >= POLISH_ITERATIONS {
                return Ok((z, iteration));
            }
            accepted = Some(z.clone());
        } else if let Some(previous) = accepted.take() {
            return Ok((previous, iteration));
        }
        for (zi, (step, _)) in z.iter_mut().zip(&steps) {
            *zi -= step;
        }
    }
    if let Some(previous) = accepted {
        return Ok((previous, config.max_iterations));
    }
    Err(Error::NoConvergence {
        iterations: config.max_iterations,
        residual: worst,
    })
}

/// Real-coefficient polynomials have conjugate-closed root sets; snap nearly
/// real roots onto the axis and average each matched conjugate pair.
fn symmetrize_conjugates(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut matched = vec![false; n];
    for i in 0..n {
        if roots[i].im.abs() <= 1e-12 * (1.0 + roots[i].norm()) {
            roots[i].im = 0.0;
            matched[i] = true;
        }
    }
    for i in 0..n {
        if matched[i] || roots[i].im < 0.0 {
            continue;
        }
        let target = roots[i].conj();
        let partner = (0..n)
            .filter(|&j| !matched[j] && j != i && roots[j].im < 0.0)
            .min_by(|&a, &b| (roots[a] - target).norm().total_cmp(&(roots[b] - target).norm()));
        if let Some(j) = partner {
            if (roots[j] - target).norm() <= 1e-6 * (1.0 + target.norm()) {
                let avg = (roots[i] + roots[j].conj()) * 0.5;
                roots[i] = avg;
                roots[j] = avg.conj();
                matched[i] = true;
                matched[j] = true;
            }
        }
    }
}

/// Size of the cluster (transitive closure of `|z_i - z_j| ≤ eps`) containing each root.
fn cluster_sizes(roots: &[Complex64], eps: f64) -> Vec<usize> {
    let labels = cluster_labels(roots, eps);
    labels
        .iter()
        .map(|l| labels.iter().filter(|m| *m == l).count())
        .collect()
}

pub(crate) fn cluster_labels(roots: &[Complex64], eps: f64) -> Vec<usize> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= eps {
                let a = find(&mut label, i);
                let b = find(&mut label, j);
                label[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|i| find(&mut label, i)).collect()
}
