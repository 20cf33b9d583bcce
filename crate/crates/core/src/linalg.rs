//! Small dense matrix routines (row-major, square) over `f64` and `BigRational`.

use num::rational::BigRational;
use num::traits::{One, Zero};

/// Determinant and inverse by Gauss-Jordan elimination with partial pivoting.
/// Returns `None` for the inverse when an exact zero pivot is met.
pub(crate) fn det_inverse_f64(m: usize, a: &[f64]) -> (f64, Option<Vec<f64>>) {
    let mut work = a.to_vec();
    let mut inv = identity_f64(m);
    let mut det = 1.0;
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| work[i * m + col].abs().total_cmp(&work[j * m + col].abs()))
            .unwrap();
        if work[pivot * m + col] == 0.0 {
            return (0.0, None);
        }
        if pivot != col {
            swap_rows(&mut work, m, pivot, col);
            swap_rows(&mut inv, m, pivot, col);
            det = -det;
        }
        let p = work[col * m + col];
        det *= p;
        for k in 0..m {
            work[col * m + k] /= p;
            inv[col * m + k] /= p;
        }
        for row in 0..m {
            if row == col {
                continue;
            }
            let factor = work[row * m + col];
            if factor == 0.0 {
                continue;
            }
            for k in 0..m {
                work[row * m + k] -= factor * work[col * m + k];
                inv[row * m + k] -= factor * inv[col * m + k];
            }
        }
    }
    (det, Some(inv))
}

pub(crate) fn det_inverse_rational(
    m: usize,
    a: &[BigRational],
) -> (BigRational, Option<Vec<BigRational>>) {
    let mut work = a.to_vec();
    let mut inv: Vec<BigRational> = (0..m * m)
        .map(|i| {
            if i / m == i % m {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    let mut det = BigRational::one();
    for col in 0..m {
        let Some(pivot) = (col..m).find(|&i| !work[i * m + col].is_zero()) else {
            return (BigRational::zero(), None);
        };
        if pivot != col {
            swap_rows(&mut work, m, pivot, col);
            swap_rows(&mut inv, m, pivot, col);
            det = -det;
        }
        let p = work[col * m + col].clone();
        det *= &p;
        for k in 0..m {
            work[col * m + k] /= &p;
            inv[col * m + k] /= &p;
        }
        for row in 0..m {
            if row == col || work[row * m + col].is_zero() {
                continue;
            }
            let factor = work[row * m + col].clone();
            for k in 0..m {
                let w = &factor * &work[col * m + k];
                work[row * m + k] -= w;
                let v = &factor * &inv[col * m + k];
                inv[row * m + k] -= v;
            }
        }
    }
    (det, Some(inv))
}

fn swap_rows<T>(a: &mut [T], m: usize, i: usize, j: usize) {
    for k in 0..m {
        a.swap(i * m + k, j * m + k);
    }
}

pub(crate) fn identity_f64(m: usize) -> Vec<f64> {
    (0..m * m)
        .map(|i| if i / m == i % m { 1.0 } else { 0.0 })
        .collect()
}

pub(crate) fn transpose<T: Clone>(m: usize, a: &[T]) -> Vec<T> {
    (0..m * m).map(|i| a[(i % m) * m + i / m].clone()).collect()
}

/// `A x` for row-major `A`.
pub(crate) fn mat_vec(m: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..m)
        .map(|i| (0..m).map(|k| a[i * m + k] * x[k]).sum())
        .collect()
}

pub(crate) fn mat_vec_i64(m: usize, a: &[f64], x: &[i64]) -> Vec<f64> {
    (0..m)
        .map(|i| (0..m).map(|k| a[i * m + k] * x[k] as f64).sum())
        .collect()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_shear() {
        let (det, inv) = det_inverse_f64(2, &[1.0, 1.0, 0.0, 1.0]);
        assert_eq!(det, 1.0);
        assert_eq!(inv.unwrap(), vec![1.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn singular_rational() {
        let q = |n: i64| BigRational::from_integer(n.into());
        let (det, inv) = det_inverse_rational(2, &[q(1), q(2), q(2), q(4)]);
        assert!(det.is_zero());
        assert!(inv.is_none());
    }

    #[test]
    fn transpose_3x3() {
        let a: Vec<i32> = (0..9).collect();
        assert_eq!(transpose(3, &a), vec![0, 3, 6, 1, 4, 7, 2, 5, 8]);
    }
}
