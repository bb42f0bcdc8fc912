//! Similarity adjacency and normalized Laplacian for the embedding term.
//!
//! Edges connect source samples that share a label; every sample keeps a
//! self-edge, so degrees are positive and the Laplacian is always defined.
//! Target labels are unknown at fit time and contribute no edges.

use crate::error::{Error, Result};
use crate::{Labels, Matrix, Scalar, Vector};

/// Binary similarity graph with its degree vector and normalized Laplacian
/// `L = I - D^{-1/2} W D^{-1/2}`.
#[derive(Debug, Clone)]
pub struct SimilarityGraph<T: Scalar> {
    pub adjacency: Matrix<T>,
    pub degrees: Vector<T>,
    pub laplacian: Matrix<T>,
}

impl<T: Scalar> SimilarityGraph<T> {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Dense diagonal degree matrix `D`.
    pub fn degree_matrix(&self) -> Matrix<T> {
        Matrix::from_diagonal(&self.degrees)
    }
}

/// Adjacency over stacked `[source; target]` samples: `W_ij = 1` iff both
/// are source samples with equal labels, or `i == j`.
pub fn build_adjacency<T: Scalar>(source_labels: &Labels, n_t: usize) -> Matrix<T> {
    let n_s = source_labels.len();
    let n = n_s + n_t;
    let mut w = Matrix::zeros(n, n);
    for i in 0..n_s {
        for j in 0..n_s {
            if source_labels[i] == source_labels[j] {
                w[(i, j)] = T::one();
            }
        }
    }
    for i in 0..n {
        w[(i, i)] = T::one();
    }
    w
}

/// Degree vector and normalized Laplacian of a symmetric adjacency with
/// positive row sums.
pub fn normalized_laplacian<T: Scalar>(w: &Matrix<T>) -> Result<SimilarityGraph<T>> {
    let n = w.nrows();
    if !w.is_square() {
        return Err(Error::DimensionMismatch {
            context: "adjacency must be square",
            left: w.nrows(),
            right: w.ncols(),
        });
    }
    let tol = T::from_double(1e-10);
    for i in 0..n {
        for j in (i + 1)..n {
            if (w[(i, j)] - w[(j, i)]).abs() > tol {
                return Err(Error::InvalidArgument(format!(
                    "adjacency not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let degrees = Vector::from_fn(n, |i, _| w.row(i).iter().fold(T::zero(), |s, v| s + *v));
    if let Some(i) = degrees.iter().position(|d| *d <= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "row {i} of the adjacency has non-positive degree"
        )));
    }
    let inv_sqrt = degrees.map(|d| T::one() / d.sqrt());
    let mut lap = Matrix::from_fn(n, n, |i, j| -inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]);
    for i in 0..n {
        lap[(i, i)] += T::one();
    }
    // exact symmetrization
    let lap = (&lap + lap.transpose()) * T::from_double(0.5);
    Ok(SimilarityGraph {
        adjacency: w.clone(),
        degrees,
        laplacian: lap,
    })
}

/// Embedding smoothness `tr(Z L Z^T)` of projected data `Z` (`k x n`).
pub fn embedding_cost<T: Scalar>(z: &Matrix<T>, laplacian: &Matrix<T>) -> Result<T> {
    if z.ncols() != laplacian.nrows() || !laplacian.is_square() {
        return Err(Error::DimensionMismatch {
            context: "embedding_cost Z columns vs L order",
            left: z.ncols(),
            right: laplacian.nrows(),
        });
    }
    let zl = z * laplacian;
    Ok(zl.zip_fold(z, T::zero(), |acc, a, b| acc + a * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix64;

    #[test]
    fn adjacency_two_source_same_class_one_target() {
        let w = build_adjacency::<f64>(&vec![1, 1], 1);
        let want = Matrix64::from_row_slice(3, 3, &[1., 1., 0., 1., 1., 0., 0., 0., 1.]);
        assert_eq!(w, want);
    }

    #[test]
    fn adjacency_all_distinct_labels_is_identity() {
        let w = build_adjacency::<f64>(&vec![1, 2, 3], 2);
        assert_eq!(w, Matrix64::identity(5, 5));
    }

    #[test]
    fn identity_adjacency_gives_zero_laplacian() {
        let g = normalized_laplacian(&Matrix64::identity(4, 4)).unwrap();
        assert!(g.laplacian.abs().max() < 1e-15);
        assert_eq!(g.degrees, crate::Vector64::from_element(4, 1.0));
    }

    #[test]
    fn all_ones_two_by_two_laplacian() {
        let w = Matrix64::from_element(2, 2, 1.0);
        let g = normalized_laplacian(&w).unwrap();
        let want = Matrix64::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]);
        assert!((&g.laplacian - &want).abs().max() < 1e-15);
    }

    #[test]
    fn zero_degree_row_rejected() {
        let w = Matrix64::zeros(3, 3);
        assert!(normalized_laplacian(&w).is_err());
    }

    #[test]
    fn asymmetric_adjacency_rejected() {
        let mut w = Matrix64::identity(3, 3);
        w[(0, 1)] = 1.0;
        assert!(normalized_laplacian(&w).is_err());
    }

    #[test]
    fn zero_laplacian_means_zero_cost() {
        let g = normalized_laplacian(&Matrix64::identity(4, 4)).unwrap();
        let z = Matrix64::from_row_slice(2, 4, &[1., -2., 3., 0.5, 0., 1., 1., -1.]);
        assert!(embedding_cost(&z, &g.laplacian).unwrap().abs() < 1e-14);
    }

    #[test]
    fn normalized_constant_block_contributes_zero() {
        // two source points, same class; z_i / sqrt(d_i) equal on the block
        let labels = vec![1, 1];
        let w = build_adjacency::<f64>(&labels, 1);
        let g = normalized_laplacian(&w).unwrap();
        let s = g.degrees[0].sqrt();
        // column 2 (the target) is isolated: self-edge only, no contribution
        let z = Matrix64::from_row_slice(1, 3, &[2.0 * s, 2.0 * s, 7.0]);
        assert!(embedding_cost(&z, &g.laplacian).unwrap().abs() < 1e-12);
    }

    #[test]
    fn permuting_samples_permutes_adjacency() {
        let labels = vec![1, 2, 1];
        let w = build_adjacency::<f64>(&labels, 0);
        let perm = [2usize, 0, 1];
        let permuted = build_adjacency::<f64>(&perm.iter().map(|&i| labels[i]).collect(), 0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(permuted[(i, j)], w[(perm[i], perm[j])]);
            }
        }
    }
}
