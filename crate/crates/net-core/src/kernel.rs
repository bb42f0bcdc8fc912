//! Kernel evaluation and Gram matrix construction.
//!
//! All kernels operate on samples-as-rows feature matrices. The Gram matrix
//! over stacked `[source; target]` data is the backbone of every downstream
//! step, so construction validates inputs once and guarantees exact symmetry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{Matrix, Scalar, Vector};

/// Kernel family plus parameters; determines the Gram matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSpec<T: Scalar> {
    Linear,
    /// Squared-exponential kernel `exp(-r^2 / (2 sigma^2))`.
    Rbf { bandwidth: T },
    /// `(x.y + offset)^degree`; positive semidefinite for `offset >= 0`.
    Polynomial { degree: u32, offset: T },
}

impl<T: Scalar> KernelSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { bandwidth } => {
                if *bandwidth > T::zero() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "rbf bandwidth must be positive, got {}",
                        bandwidth.to_double()
                    )))
                }
            }
            KernelSpec::Polynomial { degree, .. } => {
                if *degree >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(
                        "polynomial degree must be >= 1".into(),
                    ))
                }
            }
        }
    }

    /// Rbf kernel with the median-heuristic bandwidth of `x`.
    pub fn rbf_median(x: &Matrix<T>) -> Self {
        KernelSpec::Rbf {
            bandwidth: median_bandwidth(x),
        }
    }

    fn eval(&self, a: &[T], b: &[T]) -> T {
        match self {
            KernelSpec::Linear => dot(a, b),
            KernelSpec::Rbf { bandwidth } => {
                let two = T::from_double(2.0);
                (-sq_dist(a, b) / (two * *bandwidth * *bandwidth)).exp()
            }
            KernelSpec::Polynomial { degree, offset } => {
                (dot(a, b) + *offset).powi(*degree as i32)
            }
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| {
        let d = *x - *y;
        s + d * d
    })
}

/// Symmetric Gram matrix over stacked source-then-target samples.
#[derive(Debug, Clone)]
pub struct GramMatrix<T: Scalar> {
    pub values: Matrix<T>,
    pub spec: KernelSpec<T>,
    pub source_count: usize,
}

impl<T: Scalar> GramMatrix<T> {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn target_count(&self) -> usize {
        self.n() - self.source_count
    }

    /// Jitter scale added to Gram-derived matrices before factorization:
    /// `1e-8 * trace / n`.
    pub fn jitter_epsilon(&self) -> T {
        jitter_epsilon(&self.values)
    }
}

/// `1e-8 * trace(m) / n`, the default diagonal regularization scale.
pub fn jitter_epsilon<T: Scalar>(m: &Matrix<T>) -> T {
    let n = T::from_double(m.nrows() as f64);
    T::from_double(1e-8) * m.trace() / n
}

fn check_finite<T: Scalar>(x: &Matrix<T>, what: &str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} contains a non-finite value"
        )))
    }
}

/// Rows of a column-major matrix, copied once into contiguous buffers.
fn rows<T: Scalar>(x: &Matrix<T>) -> Vec<Vec<T>> {
    (0..x.nrows())
        .map(|i| x.row(i).iter().copied().collect())
        .collect()
}

/// Gram matrix `K[i][j] = k(x_i, x_j)` over stacked features
/// (source rows first, then target rows).
///
/// Symmetry is exact: each pair is evaluated once and mirrored.
pub fn kernel_matrix<T: Scalar>(
    x: &Matrix<T>,
    spec: &KernelSpec<T>,
    source_count: usize,
) -> Result<GramMatrix<T>> {
    spec.validate()?;
    check_finite(x, "features")?;
    let n = x.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty feature matrix".into()));
    }
    if source_count > n {
        return Err(Error::DimensionMismatch {
            context: "source_count exceeds sample count",
            left: source_count,
            right: n,
        });
    }
    let pts = rows(x);
    let mut k = Matrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let v = spec.eval(&pts[i], &pts[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(GramMatrix {
        values: k,
        spec: spec.clone(),
        source_count,
    })
}

/// Cross-kernel `K[i][j] = k(a_i, b_j)` between two row-major sample sets.
pub fn cross_kernel<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    spec: &KernelSpec<T>,
) -> Result<Matrix<T>> {
    spec.validate()?;
    check_finite(a, "features")?;
    check_finite(b, "features")?;
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            context: "cross_kernel feature dimensions",
            left: a.ncols(),
            right: b.ncols(),
        });
    }
    let pa = rows(a);
    let pb = rows(b);
    Ok(Matrix::from_fn(a.nrows(), b.nrows(), |i, j| {
        spec.eval(&pa[i], &pb[j])
    }))
}

/// Median pairwise Euclidean distance, the stock rbf bandwidth heuristic.
///
/// Uses at most 2000 evenly strided rows so the cost stays bounded; falls
/// back to 1 when the median distance is zero.
pub fn median_bandwidth<T: Scalar>(x: &Matrix<T>) -> T {
    const CAP: usize = 2000;
    let n = x.nrows();
    assert!(n >= 2, "median_bandwidth needs at least two samples");
    let idx: Vec<usize> = if n <= CAP {
        (0..n).collect()
    } else {
        (0..CAP).map(|i| i * n / CAP).collect()
    };
    let pts = rows(x);
    let mut dists = Vec::with_capacity(idx.len() * (idx.len() - 1) / 2);
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            dists.push(sq_dist(&pts[i], &pts[j]).sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let m = dists.len();
    let median = if m % 2 == 1 {
        dists[m / 2]
    } else {
        (dists[m / 2 - 1] + dists[m / 2]) / T::from_double(2.0)
    };
    if median > T::zero() {
        median
    } else {
        T::one()
    }
}

/// Stack source rows over target rows into one feature matrix.
pub fn stack_rows<T: Scalar>(source: &Matrix<T>, target: &Matrix<T>) -> Result<Matrix<T>> {
    if source.ncols() != target.ncols() {
        return Err(Error::DimensionMismatch {
            context: "stacked feature dimensions",
            left: source.ncols(),
            right: target.ncols(),
        });
    }
    let n = source.nrows() + target.nrows();
    let mut out = Matrix::zeros(n, source.ncols());
    out.view_mut((0, 0), source.shape()).copy_from(source);
    out.view_mut((source.nrows(), 0), target.shape())
        .copy_from(target);
    Ok(out)
}

/// Euclidean length of each row.
pub fn row_norms<T: Scalar>(x: &Matrix<T>) -> Vector<T> {
    Vector::from_iterator(x.nrows(), (0..x.nrows()).map(|i| x.row(i).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix64;

    #[test]
    fn linear_kernel_on_basis_vectors_is_identity() {
        let x = Matrix64::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let k = kernel_matrix(&x, &KernelSpec::Linear, 1).unwrap();
        assert_eq!(k.values, Matrix64::identity(2, 2));
    }

    #[test]
    fn rbf_diagonal_is_exactly_one() {
        let x = Matrix64::from_row_slice(3, 2, &[0.3, -1.2, 4.0, 0.1, -2.0, 2.5]);
        let k = kernel_matrix(&x, &KernelSpec::Rbf { bandwidth: 0.7 }, 2).unwrap();
        for i in 0..3 {
            assert_eq!(k.values[(i, i)], 1.0);
        }
    }

    #[test]
    fn rbf_off_diagonal_matches_scalar_formula() {
        // two points at distance r = 5 along one axis
        let x = Matrix64::from_row_slice(2, 2, &[0.0, 0.0, 5.0, 0.0]);
        let sigma = 1.3;
        let k = kernel_matrix(&x, &KernelSpec::Rbf { bandwidth: sigma }, 1).unwrap();
        let expected = (-25.0 / (2.0 * sigma * sigma)).exp();
        assert!((k.values[(0, 1)] - expected).abs() < 1e-15);
    }

    #[test]
    fn cross_kernel_orthogonal_linear() {
        let a = Matrix64::from_row_slice(1, 2, &[1.0, 0.0]);
        let b = Matrix64::from_row_slice(1, 2, &[0.0, 1.0]);
        let k = cross_kernel(&a, &b, &KernelSpec::Linear).unwrap();
        assert_eq!(k[(0, 0)], 0.0);
    }

    #[test]
    fn cross_kernel_dimension_mismatch_rejected() {
        let a = Matrix64::zeros(2, 3);
        let b = Matrix64::zeros(2, 2);
        assert!(cross_kernel(&a, &b, &KernelSpec::Linear).is_err());
    }

    #[test]
    fn non_finite_features_rejected() {
        let x = Matrix64::from_row_slice(2, 1, &[1.0, f64::NAN]);
        assert!(kernel_matrix(&x, &KernelSpec::Linear, 1).is_err());
    }

    #[test]
    fn median_bandwidth_single_pair() {
        let x = Matrix64::from_row_slice(2, 1, &[0.0, 3.0]);
        assert_eq!(median_bandwidth(&x), 3.0);
    }

    #[test]
    fn median_bandwidth_degenerate_falls_back_to_one() {
        let x = Matrix64::from_row_slice(3, 2, &[2.0, 2.0, 2.0, 2.0, 2.0, 2.0]);
        assert_eq!(median_bandwidth(&x), 1.0);
    }

    #[test]
    fn invalid_bandwidth_rejected() {
        let x = Matrix64::zeros(2, 2);
        assert!(kernel_matrix(&x, &KernelSpec::Rbf { bandwidth: 0.0 }, 1).is_err());
    }

    #[test]
    fn f32_gram_matches_f64_loosely() {
        let xs: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin()).collect();
        let x64 = Matrix64::from_row_slice(4, 3, &xs);
        let x32 =
            Matrix::<f32>::from_row_slice(4, 3, &xs.iter().map(|v| *v as f32).collect::<Vec<_>>());
        let k64 = kernel_matrix(&x64, &KernelSpec::Rbf { bandwidth: 0.9 }, 2).unwrap();
        let k32 = kernel_matrix(&x32, &KernelSpec::Rbf { bandwidth: 0.9 }, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((k64.values[(i, j)] - k32.values[(i, j)] as f64).abs() < 1e-5);
            }
        }
    }
}
