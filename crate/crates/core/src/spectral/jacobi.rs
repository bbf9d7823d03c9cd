//! Cyclic Jacobi eigenvalue iteration for dense symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Relative stopping threshold on the off-diagonal Frobenius norm.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (unsorted, in diagonal order) and the orthogonal matrix
/// whose columns are the matching eigenvectors. Iteration stops once the
/// off-diagonal Frobenius norm is at most `1e-13 · max(1, ‖A‖_F)`.
pub fn symmetric_eigen(matrix: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: matrix.ncols(),
        });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigenproblem matrix"));
    }
    let mut a = matrix.clone();
    let mut v = DMatrix::identity(n, n);
    let tol = OFF_DIAGONAL_TOL * matrix.norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= tol {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Ok(((0..n).map(|i| a[(i, i)]).collect(), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn diagonal_and_two_by_two() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0]));
        let (vals, _) = symmetric_eigen(&d).unwrap();
        assert_eq!(vals, vec![3.0, -1.0, 2.0]);

        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        let vals = sorted(vals);
        assert!((vals[0] - 1.0).abs() < 1e-15 && (vals[1] - 3.0).abs() < 1e-15);
        assert!((&vecs.transpose() * &vecs - DMatrix::identity(2, 2)).amax() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        let a = DMatrix::from_row_slice(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(matches!(symmetric_eigen(&a), Err(Error::NonFinite(_))));
    }

    proptest! {
        #[test]
        fn matches_reference_decomposition(entries in prop::collection::vec(-5.0..5.0f64, 64), n in 1usize..=8) {
            let mut a = DMatrix::from_fn(n, n, |i, j| entries[i * 8 + j]);
            a = (&a + a.transpose()) * 0.5;
            let (vals, vecs) = symmetric_eigen(&a).unwrap();
            // Independent reference: nalgebra's Householder/QR symmetric solver.
            let reference = sorted(a.clone().symmetric_eigen().eigenvalues.iter().copied().collect());
            let ours = sorted(vals.clone());
            for (x, y) in ours.iter().zip(&reference) {
                prop_assert!((x - y).abs() < 1e-10 * (1.0 + y.abs()));
            }
            prop_assert!((&vecs.transpose() * &vecs - DMatrix::identity(n, n)).amax() < 1e-12);
            let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals));
            prop_assert!((&a * &vecs - &vecs * lambda).amax() < 1e-11);
        }
    }
}
