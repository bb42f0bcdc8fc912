//! Dense symmetric-definite generalized eigenvalue solver.
//!
//! Solves `lhs A = rhs A Lambda` for the k smallest eigenpairs by reducing to
//! a standard symmetric problem through a Cholesky factorization of the
//! (jittered) right-hand side. Eigenvectors come back `rhs'`-orthonormal with
//! a deterministic sign convention.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::{Matrix, Scalar, Vector};

/// The k smallest eigenpairs of a symmetric-definite pencil.
#[derive(Debug, Clone)]
pub struct EigenSolution<T: Scalar> {
    /// `n x k` coefficient matrix; columns are eigenvectors.
    pub vectors: Matrix<T>,
    /// Eigenvalues, sorted ascending.
    pub values: Vector<T>,
    /// `max_j ||lhs a_j - lambda_j rhs' a_j|| / (||lhs||_F ||a_j||)`.
    pub residual: T,
    /// Diagonal shift actually applied to `rhs` before factorization.
    pub jitter_used: T,
}

fn check_symmetric<T: Scalar>(m: &Matrix<T>, what: &'static str) -> Result<()> {
    let scale = T::one() + m.abs().max();
    let tol = T::from_double(1e-8) * scale;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > tol {
                return Err(Error::InvalidArgument(format!(
                    "{what} is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Ok(())
}

fn symmetrize<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    (m + m.transpose()) * T::from_double(0.5)
}

/// Solve `lhs A = rhs A Lambda` for the `k` smallest eigenvalues.
///
/// `rhs` gets `jitter * I` added before its Cholesky factorization; if the
/// factorization fails the jitter is escalated tenfold up to three times
/// before giving up.
pub fn generalized_eig_smallest<T: Scalar>(
    lhs: &Matrix<T>,
    rhs: &Matrix<T>,
    k: usize,
    jitter: T,
) -> Result<EigenSolution<T>> {
    let n = lhs.nrows();
    if !lhs.is_square() || !rhs.is_square() || rhs.nrows() != n {
        return Err(Error::DimensionMismatch {
            context: "generalized eigenproblem operands",
            left: n,
            right: rhs.nrows(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenpairs from an order-{n} problem"
        )));
    }
    if jitter < T::zero() {
        return Err(Error::InvalidArgument("jitter must be nonnegative".into()));
    }
    check_symmetric(lhs, "lhs")?;
    check_symmetric(rhs, "rhs")?;

    let lhs_s = symmetrize(lhs);
    let rhs_s = symmetrize(rhs);

    // Jitter escalation: the given value, then three tenfold retries. A zero
    // starting jitter escalates from a trace-scaled floor instead.
    let floor = T::from_double(1e-10) * (T::one() + rhs_s.trace().abs() / T::from_double(n as f64));
    let mut eff = jitter;
    let mut chol: Option<Cholesky<T, nalgebra::Dyn>> = None;
    let mut attempts = 0usize;
    for attempt in 0..4 {
        attempts = attempt;
        let shifted = &rhs_s + Matrix::from_diagonal_element(n, n, eff);
        if let Some(c) = shifted.cholesky() {
            chol = Some(c);
            break;
        }
        eff = if eff > T::zero() {
            eff * T::from_double(10.0)
        } else {
            floor
        };
    }
    let chol = chol.ok_or(Error::NotPositiveDefinite {
        attempts,
        last_jitter: eff.to_double(),
    })?;
    let rhs_eff = &rhs_s + Matrix::from_diagonal_element(n, n, eff);

    // Reduce to a standard symmetric problem: B = C^-1 lhs C^-T where
    // rhs' = C C^T, then map eigenvectors back through A = C^-T Y.
    let c_lower = chol.l();
    let x = c_lower
        .solve_lower_triangular(&lhs_s)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let b = c_lower
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let b = symmetrize(&b);

    let eig = b
        .try_symmetric_eigen(T::default_epsilon(), 50_000)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });

    let mut y = Matrix::zeros(n, k);
    let mut values = Vector::zeros(k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        y.set_column(col, &eig.eigenvectors.column(idx));
        values[col] = eig.eigenvalues[idx];
    }
    let mut vectors = c_lower
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    for col in 0..k {
        let mut column = vectors.column(col).clone_owned();
        crate::data::fix_sign(&mut column);
        vectors.set_column(col, &column);
    }

    let tiny = T::from_double(1e-30);
    let lhs_norm = lhs_s.norm().max(tiny);
    let mut residual = T::zero();
    for col in 0..k {
        let a = vectors.column(col);
        let r = (&lhs_s * a - (&rhs_eff * a) * values[col]).norm();
        let denom = lhs_norm * a.norm().max(tiny);
        residual = residual.max(r / denom);
    }

    Ok(EigenSolution {
        vectors,
        values,
        residual,
        jitter_used: eff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Matrix64, Vector64};

    #[test]
    fn identity_problem() {
        let id = Matrix64::identity(3, 3);
        let sol = generalized_eig_smallest(&id, &id, 2, 0.0).unwrap();
        assert_eq!(sol.values, Vector64::from_element(2, 1.0));
        let gram = sol.vectors.transpose() * &sol.vectors;
        assert!((gram - Matrix64::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn diagonal_problem_hand_solution() {
        let lhs = Matrix64::from_diagonal(&Vector64::from_vec(vec![3.0, 1.0, 2.0]));
        let rhs = Matrix64::identity(3, 3);
        let sol = generalized_eig_smallest(&lhs, &rhs, 2, 0.0).unwrap();
        assert!((sol.values[0] - 1.0).abs() < 1e-12);
        assert!((sol.values[1] - 2.0).abs() < 1e-12);
        // eigenvectors are the signed unit basis vectors e2, e3
        let e2 = Vector64::from_vec(vec![0.0, 1.0, 0.0]);
        let e3 = Vector64::from_vec(vec![0.0, 0.0, 1.0]);
        assert!((sol.vectors.column(0) - e2).abs().max() < 1e-12);
        assert!((sol.vectors.column(1) - e3).abs().max() < 1e-12);
    }

    #[test]
    fn rejects_k_out_of_range() {
        let id = Matrix64::identity(3, 3);
        assert!(generalized_eig_smallest(&id, &id, 4, 0.0).is_err());
        assert!(generalized_eig_smallest(&id, &id, 0, 0.0).is_err());
    }

    #[test]
    fn rejects_asymmetric_input() {
        let mut m = Matrix64::identity(3, 3);
        m[(0, 1)] = 0.5;
        let id = Matrix64::identity(3, 3);
        assert!(generalized_eig_smallest(&m, &id, 1, 0.0).is_err());
    }

    #[test]
    fn escalates_jitter_for_singular_rhs() {
        // rank-1 rhs: plain Cholesky fails, escalation succeeds
        let v = Vector64::from_vec(vec![1.0, 2.0, 3.0]);
        let rhs = &v * v.transpose();
        let lhs = Matrix64::identity(3, 3);
        let sol = generalized_eig_smallest(&lhs, &rhs, 1, 0.0).unwrap();
        assert!(sol.jitter_used > 0.0);
        // the returned vector is rhs'-orthonormal
        let rhs_eff = &rhs + Matrix64::identity(3, 3) * sol.jitter_used;
        let g = sol.vectors.transpose() * rhs_eff * &sol.vectors;
        assert!((g[(0, 0)] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reports_failure_when_rhs_is_indefinite() {
        let rhs = Matrix64::from_diagonal(&Vector64::from_vec(vec![1.0, -5.0, 1.0]));
        let lhs = Matrix64::identity(3, 3);
        let err = generalized_eig_smallest(&lhs, &rhs, 1, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn f32_instantiation_works() {
        let lhs = Matrix::<f32>::from_diagonal(&Vector::<f32>::from_vec(vec![3.0, 1.0, 2.0]));
        let rhs = Matrix::<f32>::identity(3, 3);
        let sol = generalized_eig_smallest(&lhs, &rhs, 2, 0.0).unwrap();
        assert!((sol.values[0] - 1.0).abs() < 1e-5);
        assert!((sol.values[1] - 2.0).abs() < 1e-5);
    }
}
