//! Joint-distribution MMD coefficient matrices.
//!
//! The marginal matrix `M0` and the per-class matrices `M_c` are all rank-one:
//! each equals `v v^T` for an indicator-derived vector `v` over the stacked
//! `[source; target]` samples. The outer-product form is what this module
//! builds; brute-force case enumeration is left to the tests as the oracle.

use crate::error::{Error, Result};
use crate::{Labels, Matrix, Scalar, Vector};

/// The MMD matrix family for one pseudo-label assignment.
///
/// Per-class matrices are not stored densely (memory stays `O(n^2)` for the
/// sum alone); `per_class_matrix` materializes any `M_c` on demand from its
/// rank-one factor.
#[derive(Debug, Clone)]
pub struct MmdSet<T: Scalar> {
    pub m0: Matrix<T>,
    /// `M0 + sum_c M_c`.
    pub sum: Matrix<T>,
    /// Per class `c` (1-based): `(n_s^(c), n_t^(c))`.
    pub class_counts: Vec<(usize, usize)>,
    /// Rank-one factor of each `M_c`; `None` when the class term is skipped.
    class_vectors: Vec<Option<Vector<T>>>,
    /// Rank-one factor of `M0`.
    v0: Vector<T>,
}

impl<T: Scalar> MmdSet<T> {
    pub fn n(&self) -> usize {
        self.m0.nrows()
    }

    pub fn classes(&self) -> usize {
        self.class_counts.len()
    }

    /// Dense `M_c` for class `c` in `1..=C`; zero when the class is absent
    /// from either domain.
    pub fn per_class_matrix(&self, c: usize) -> Matrix<T> {
        match &self.class_vectors[c - 1] {
            Some(v) => v * v.transpose(),
            None => Matrix::zeros(self.n(), self.n()),
        }
    }

    /// Rank-one factors of every active term, `v0` first.
    pub fn factors(&self) -> impl Iterator<Item = &Vector<T>> {
        std::iter::once(&self.v0).chain(self.class_vectors.iter().flatten())
    }
}

/// Marginal-discrepancy matrix `M0`: `1/n_s^2` on source-source entries,
/// `1/n_t^2` on target-target, `-1/(n_s n_t)` across.
pub fn build_m0<T: Scalar>(n_s: usize, n_t: usize) -> Matrix<T> {
    let v0 = marginal_vector::<T>(n_s, n_t);
    &v0 * v0.transpose()
}

fn marginal_vector<T: Scalar>(n_s: usize, n_t: usize) -> Vector<T> {
    assert!(n_s >= 1 && n_t >= 1, "both domains must be non-empty");
    let ps = T::one() / T::from_double(n_s as f64);
    let pt = -T::one() / T::from_double(n_t as f64);
    Vector::from_fn(n_s + n_t, |i, _| if i < n_s { ps } else { pt })
}

fn class_vector<T: Scalar>(
    source_labels: &Labels,
    target_pseudo_labels: &Labels,
    c: usize,
) -> (Option<Vector<T>>, (usize, usize)) {
    let n_s = source_labels.len();
    let n_t = target_pseudo_labels.len();
    let ns_c = source_labels.iter().filter(|&&l| l == c).count();
    let nt_c = target_pseudo_labels.iter().filter(|&&l| l == c).count();
    if ns_c == 0 || nt_c == 0 {
        // Eq.-level term is undefined without members on both sides; the
        // class contributes nothing to the discrepancy.
        return (None, (ns_c, nt_c));
    }
    let ps = T::one() / T::from_double(ns_c as f64);
    let pt = -T::one() / T::from_double(nt_c as f64);
    let v = Vector::from_fn(n_s + n_t, |i, _| {
        if i < n_s {
            if source_labels[i] == c {
                ps
            } else {
                T::zero()
            }
        } else if target_pseudo_labels[i - n_s] == c {
            pt
        } else {
            T::zero()
        }
    });
    (Some(v), (ns_c, nt_c))
}

/// Class-conditional matrix `M_c` from source labels and target pseudo-labels.
///
/// Returns the zero matrix when class `c` has no members on either side.
pub fn build_mc<T: Scalar>(
    source_labels: &Labels,
    target_pseudo_labels: &Labels,
    c: usize,
) -> Matrix<T> {
    let n = source_labels.len() + target_pseudo_labels.len();
    match class_vector::<T>(source_labels, target_pseudo_labels, c).0 {
        Some(v) => &v * v.transpose(),
        None => Matrix::zeros(n, n),
    }
}

fn check_labels(labels: &Labels, classes: usize, what: &str) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} must be non-empty")));
    }
    for &l in labels {
        if l < 1 || l > classes {
            return Err(Error::InvalidArgument(format!(
                "{what} contains label {l} outside 1..={classes}"
            )));
        }
    }
    Ok(())
}

/// Assemble `M0`, every `M_c`, and their sum.
pub fn build_mmd_set<T: Scalar>(
    source_labels: &Labels,
    target_pseudo_labels: &Labels,
    classes: usize,
) -> Result<MmdSet<T>> {
    check_labels(source_labels, classes, "source labels")?;
    check_labels(target_pseudo_labels, classes, "target pseudo-labels")?;
    let n_s = source_labels.len();
    let n_t = target_pseudo_labels.len();
    let v0 = marginal_vector::<T>(n_s, n_t);
    let m0 = &v0 * v0.transpose();

    let mut sum = m0.clone();
    let mut class_counts = Vec::with_capacity(classes);
    let mut class_vectors = Vec::with_capacity(classes);
    for c in 1..=classes {
        let (v, counts) = class_vector::<T>(source_labels, target_pseudo_labels, c);
        if let Some(v) = &v {
            sum.ger(T::one(), v, v, T::one());
        }
        class_counts.push(counts);
        class_vectors.push(v);
    }
    Ok(MmdSet {
        m0,
        sum,
        class_counts,
        class_vectors,
        v0,
    })
}

/// Alignment cost `tr(Z M Z^T)` of projected data `Z` (features-as-rows of
/// `k x n`) against a coefficient matrix `M`.
pub fn mmd_cost<T: Scalar>(z: &Matrix<T>, m: &Matrix<T>) -> Result<T> {
    if z.ncols() != m.nrows() || !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "mmd_cost Z columns vs M order",
            left: z.ncols(),
            right: m.nrows(),
        });
    }
    let zm = z * m;
    Ok(zm.zip_fold(z, T::zero(), |acc, a, b| acc + a * b))
}
