//! Deciding whether logarithms of positive rationals are commensurable.
//!
//! Every value is factored over a coprime base built from all numerators and
//! denominators; `log x / log y` is rational exactly when the exponent vectors
//! of `x` and `y` are proportional.

use num::bigint::BigUint;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Exponent vectors of each value over a shared pairwise-coprime base.
pub(crate) fn exponent_vectors(values: &[BigRational]) -> Vec<Vec<i64>> {
    let mut generators: Vec<BigUint> = Vec::new();
    for v in values {
        for part in [v.numer(), v.denom()] {
            let u = part.magnitude().clone();
            if u > BigUint::one() {
                generators.push(u);
            }
        }
    }
    let base = coprime_base(generators);
    values
        .iter()
        .map(|v| {
            let num = valuation(v.numer().magnitude().clone(), &base);
            let den = valuation(v.denom().magnitude().clone(), &base);
            num.iter().zip(&den).map(|(a, b)| a - b).collect()
        })
        .collect()
}

fn coprime_base(mut items: Vec<BigUint>) -> Vec<BigUint> {
    items.sort();
    items.dedup();
    'refine: loop {
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let g = items[i].gcd(&items[j]);
                if g > BigUint::one() {
                    let a = &items[i] / &g;
                    let b = &items[j] / &g;
                    items.swap_remove(j);
                    items.swap_remove(i);
                    items.extend([a, b, g].into_iter().filter(|x| *x > BigUint::one()));
                    items.sort();
                    items.dedup();
                    continue 'refine;
                }
            }
        }
        return items;
    }
}

fn valuation(mut x: BigUint, base: &[BigUint]) -> Vec<i64> {
    let out = base
        .iter()
        .map(|b| {
            let mut count = 0;
            while (&x % b).is_zero() {
                x /= b;
                count += 1;
            }
            count
        })
        .collect();
    debug_assert!(x.is_one(), "value does not factor over its coprime base");
    out
}

/// A primitive integer direction `u` and multiples `K_i` with `v_i = K_i u`
/// for every vector, oriented so the first nonzero vector has `K > 0`.
/// `None` when the vectors are not all proportional.
pub(crate) fn common_direction(vectors: &[Vec<i64>]) -> Option<(Vec<i64>, Vec<i64>)> {
    let first = vectors.iter().find(|v| v.iter().any(|&x| x != 0))?;
    let g = first.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let unit: Vec<i64> = first.iter().map(|x| x / g).collect();
    let pivot = unit.iter().position(|&x| x != 0)?;
    let mut multiples = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v[pivot] % unit[pivot] != 0 {
            return None;
        }
        let k = v[pivot] / unit[pivot];
        if v.iter().zip(&unit).any(|(a, b)| *a != k * b) {
            return None;
        }
        multiples.push(k);
    }
    Some((unit, multiples))
}

/// `value^(numer/denom)` when the root is rational.
pub(crate) fn rational_power(value: &BigRational, numer: i64, denom: i64) -> Option<BigRational> {
    if denom == 1 {
        return Some(pow_i64(value, numer));
    }
    let n = value.numer().magnitude();
    let d = value.denom().magnitude();
    let rn = n.nth_root(denom as u32);
    let rd = d.nth_root(denom as u32);
    if num::pow(rn.clone(), denom as usize) != *n || num::pow(rd.clone(), denom as usize) != *d || value.is_negative() {
        return None;
    }
    let root = BigRational::new(rn.into(), rd.into());
    Some(pow_i64(&root, numer))
}

fn pow_i64(value: &BigRational, e: i64) -> BigRational {
    let p = num::pow(value.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

/// Best rational approximation `p/q` of `x` with `q ≤ max_denominator` found
/// by continued fractions, accepted only when `|x - p/q| ≤ tol`.
///
/// This is a heuristic: a float cannot certify that a ratio is rational.
pub fn rationalize_heuristic(x: f64, max_denominator: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = a.to_i64()? as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_denominator as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1 as i64, k1 as u64));
        }
        let frac = rest - a;
        if frac.abs() < 1e-300 {
            break;
        }
        rest = 1.0 / frac;
    }
    if k1 > 0 && (x - h1 as f64 / k1 as f64).abs() <= tol {
        Some((h1 as i64, k1 as u64))
    } else {
        None
    }
}
