#![allow(dead_code)]

use fracdiff_core::diffraction::{random_atom, random_basis};
use fracdiff_core::{GaussianAtom, IdealCrystal, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn config() -> ProptestConfig {
    ProptestConfig::with_cases(100)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational(rng: &mut ChaCha8Rng, limit: i64) -> Scalar {
    let q = rng.gen_range(1..=6i64);
    let bound = limit * q / 5;
    Scalar::ratio(rng.gen_range(-bound..=bound), q)
}

/// Random rational crystal: rank 1 or 2, up to one degenerate axis, one to
/// three translates with coordinates in `[-2/5, 2/5]`.
pub fn random_crystal(rng: &mut ChaCha8Rng) -> IdealCrystal {
    loop {
        let m = rng.gen_range(1..=2usize);
        let d = rng.gen_range(0..=1usize);
        let basis = random_basis(rng, m);
        let count = rng.gen_range(1..=3usize);
        let translates = (0..count)
            .map(|_| (0..m + d).map(|_| small_rational(rng, 2)).collect())
            .collect();
        if let Ok(crystal) = IdealCrystal::new(basis, d, translates) {
            return crystal;
        }
    }
}

pub fn random_shift(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Scalar> {
    (0..dim).map(|_| small_rational(rng, 10)).collect()
}

pub fn atom_for(rng: &mut ChaCha8Rng, crystal: &IdealCrystal) -> GaussianAtom {
    random_atom(rng, crystal.ambient_dim())
}
