use std::collections::BTreeMap;

use fracdiff_core::dirichlet::{mapped_residual_bound, omega_map};
use fracdiff_core::{DirichletPolynomial, Scalar, SolverConfig};
use num::complex::Complex64;
use proptest::prelude::*;

const GENERATORS: [(i64, i64); 6] = [(1, 2), (1, 3), (2, 3), (2, 5), (3, 7), (5, 8)];

fn polynomial() -> impl Strategy<Value = DirichletPolynomial> {
    (
        0..GENERATORS.len(),
        proptest::collection::vec((1u64..=6, 1u64..=3), 1..=4),
    )
        .prop_map(|(g, raw)| {
            let mut terms = BTreeMap::new();
            for (k, m) in raw {
                *terms.entry(k).or_insert(0) += m;
            }
            let terms: Vec<(u64, u64)> = terms.into_iter().collect();
            let (p, q) = GENERATORS[g];
            DirichletPolynomial::from_terms(Scalar::ratio(p, q), &terms).unwrap()
        })
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(100)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn f_is_periodic_along_the_imaginary_axis(
        poly in polynomial(),
        re in -2.0f64..2.0,
        im in -10.0f64..10.0,
    ) {
        let s = Complex64::new(re, im);
        let f = poly.evaluate_f(s);
        let shifted = poly.evaluate_f(s + Complex64::new(0.0, poly.period()));
        prop_assert!((shifted - f).norm() <= 1e-10 * (1.0 + f.norm()), "{} vs {}", f, shifted);
    }

    #[test]
    fn roots_are_closed_under_conjugation(poly in polynomial()) {
        let set = poly.root_set(&SolverConfig::default()).unwrap();
        let mut unmatched = set.roots_z.clone();
        for z in &set.roots_z {
            let pos = unmatched.iter().position(|w| (w - z.conj()).norm() <= 1e-8);
            prop_assert!(pos.is_some(), "no conjugate for {}", z);
            unmatched.swap_remove(pos.unwrap());
        }
    }

    #[test]
    fn root_magnitudes_obey_vieta(poly in polynomial()) {
        let set = poly.root_set(&SolverConfig::default()).unwrap();
        prop_assert_eq!(set.roots_z.len() as u64, poly.degree());
        let product: f64 = set.roots_z.iter().map(|z| z.norm()).product();
        let leading = *poly.multiplicities().last().unwrap() as f64;
        let expected = 1.0 / leading;
        prop_assert!((product - expected).abs() <= 1e-8 * expected.max(1.0), "{} vs {}", product, expected);
    }

    #[test]
    fn principal_roots_lie_in_the_strip(poly in polynomial()) {
        let set = poly.root_set(&SolverConfig::default()).unwrap();
        let strip = poly.strip_bounds().unwrap();
        for w in &set.principal_roots {
            prop_assert!(w.re >= strip.lower - 1e-6 && w.re <= strip.dimension + 1e-6,
                "{} outside [{}, {}]", w, strip.lower, strip.dimension);
        }
        prop_assert!((set.dimension() - strip.dimension).abs() <= 1e-9);
    }

    #[test]
    fn real_f_changes_sign_once(poly in polynomial()) {
        let strip = poly.strip_bounds().unwrap();
        let total: u64 = poly.multiplicities().iter().sum();
        let positive = if total >= 2 { strip.dimension > 0.0 } else { strip.dimension.abs() < 1e-12 };
        prop_assert!(positive, "D = {} with total multiplicity {}", strip.dimension, total);
        let start = strip.lower - 1.0;
        let steps = ((strip.dimension + 1.0 - start) / 1e-3).ceil() as usize;
        let mut changes = 0;
        let mut previous = poly.evaluate_f(Complex64::new(start, 0.0)).re;
        for i in 1..=steps {
            let value = poly.evaluate_f(Complex64::new(start + i as f64 * 1e-3, 0.0)).re;
            if (value > 0.0) != (previous > 0.0) {
                changes += 1;
            }
            previous = value;
        }
        prop_assert_eq!(changes, 1);
    }

    #[test]
    fn reported_roots_have_small_residuals(poly in polynomial()) {
        let cfg = SolverConfig::default();
        let set = poly.root_set(&cfg).unwrap();
        let g = poly.to_polynomial();
        for &z in &set.roots_z {
            prop_assert!(g.eval(z).norm() <= cfg.tol * g.magnitude_scale(z), "|g({})| = {}", z, g.eval(z).norm());
            let w = omega_map(z, poly.log_inverse_generator()).unwrap();
            let bound = mapped_residual_bound(&poly, z, w, cfg.tol);
            prop_assert!(poly.evaluate_f(w).norm() <= bound, "|f({})| = {} > {}", w, poly.evaluate_f(w).norm(), bound);
        }
    }
}
