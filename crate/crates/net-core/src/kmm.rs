//! Kernel mean matching: source instance weights and the weighted
//! validation-set split.
//!
//! The weights solve `min_w 0.5 w' K_S w - kappa' w` over the box `[0, B]^n`
//! intersected with the sum-slab `|sum(w) - n_s| <= n_s * eps`, by projected
//! gradient descent with a monotone Armijo line search. Projections onto the
//! intersection are computed exactly through the knapsack multiplier.

use crate::error::{Error, Result};
use crate::kernel::{cross_kernel, kernel_matrix, KernelSpec};
use crate::{Matrix, Scalar, Vector};

/// Per-source-sample weights plus QP diagnostics.
#[derive(Debug, Clone)]
pub struct KmmResult<T: Scalar> {
    pub weights: Vector<T>,
    /// Final QP objective value.
    pub objective: T,
    pub iterations_used: usize,
    pub feasible: bool,
    pub b: T,
    pub epsilon: T,
    /// Objective after each accepted step (first entry is the start point);
    /// nonincreasing by construction.
    pub objective_history: Vec<T>,
}

/// Validation/train partition of the source indices (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSplit {
    /// Indices of the largest-weight fraction, ascending.
    pub validation_indices: Vec<usize>,
    /// The complement, ascending.
    pub train_indices: Vec<usize>,
    pub fraction: f64,
}

/// The stock sum-slack default `(sqrt(n_s) - 1) / sqrt(n_s)`.
pub fn default_epsilon(n_s: usize) -> f64 {
    let r = (n_s as f64).sqrt();
    (r - 1.0) / r
}

/// Stock box bound.
pub const DEFAULT_B: f64 = 1000.0;

const MAX_ITERATIONS: usize = 10_000;

/// Euclidean projection onto `[0, b]^n intersect {lo <= sum x <= hi}` via
/// bisection on the shift multiplier.
fn project_box_slab<T: Scalar>(v: &Vector<T>, b: T, lo: T, hi: T) -> Vector<T> {
    let clamp_sum = |tau: T| -> T {
        v.iter()
            .fold(T::zero(), |s, &x| s + (x - tau).max(T::zero()).min(b))
    };
    let boxed = v.map(|x| x.max(T::zero()).min(b));
    let sum0 = boxed.sum();
    if sum0 >= lo && sum0 <= hi {
        return boxed;
    }
    // sum(clamp(v - tau)) is continuous and nonincreasing in tau
    let target = if sum0 > hi { hi } else { lo };
    let mut t_lo = v.iter().fold(T::zero(), |m, &x| m.min(x)) - b;
    let mut t_hi = v.iter().fold(T::zero(), |m, &x| m.max(x));
    for _ in 0..200 {
        let mid = (t_lo + t_hi) * T::from_double(0.5);
        if clamp_sum(mid) > target {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
        if t_hi - t_lo <= T::from_double(1e-16) * (T::one() + t_hi.abs()) {
            break;
        }
    }
    let tau = (t_lo + t_hi) * T::from_double(0.5);
    v.map(|x| (x - tau).max(T::zero()).min(b))
}

/// Source instance weights matching the weighted source mean embedding to
/// the target's.
pub fn kmm_weights<T: Scalar>(
    source_features: &Matrix<T>,
    target_features: &Matrix<T>,
    spec: &KernelSpec<T>,
    b: T,
    epsilon: T,
) -> Result<KmmResult<T>> {
    if b <= T::zero() {
        return Err(Error::InvalidArgument("B must be positive".into()));
    }
    if epsilon < T::zero() {
        return Err(Error::InvalidArgument("epsilon must be nonnegative".into()));
    }
    let n_s = source_features.nrows();
    let n_t = target_features.nrows();
    if n_s == 0 || n_t == 0 {
        return Err(Error::InvalidArgument("both domains must be non-empty".into()));
    }
    let ns = T::from_double(n_s as f64);
    let s_lo = (ns * (T::one() - epsilon)).max(T::zero());
    let s_hi = ns * (T::one() + epsilon);
    if b * ns < s_lo {
        return Err(Error::Infeasible(format!(
            "B*n_s = {} cannot reach the sum lower bound n_s*(1-eps) = {}",
            (b * ns).to_double(),
            s_lo.to_double()
        )));
    }

    let mut k_s = kernel_matrix(source_features, spec, n_s)?.values;
    let jitter = crate::kernel::jitter_epsilon(&k_s);
    for i in 0..n_s {
        k_s[(i, i)] += jitter;
    }
    let cross = cross_kernel(source_features, target_features, spec)?;
    let scale = ns / T::from_double(n_t as f64);
    let kappa = Vector::from_fn(n_s, |i, _| {
        cross.row(i).iter().fold(T::zero(), |s, v| s + *v) * scale
    });

    let objective = |w: &Vector<T>| -> T {
        let kw = &k_s * w;
        w.dot(&kw) * T::from_double(0.5) - kappa.dot(w)
    };

    // Constraints pin a unique point when the box total exactly meets the
    // sum lower bound (e.g. B = 1, eps = 0): return it outright.
    if b * ns == s_lo {
        let w = Vector::from_element(n_s, b);
        let obj = objective(&w);
        return Ok(KmmResult {
            weights: w,
            objective: obj,
            iterations_used: 0,
            feasible: true,
            b,
            epsilon,
            objective_history: vec![obj],
        });
    }

    let mut w = project_box_slab(&Vector::from_element(n_s, T::one()), b, s_lo, s_hi);
    let mut f_w = objective(&w);
    let mut history = vec![f_w];
    let tol = T::from_double(1e-6) * ns;
    let mut step = T::one();
    let mut iterations_used = 0;

    for iter in 0..MAX_ITERATIONS {
        iterations_used = iter;
        let grad = &k_s * &w - &kappa;
        let pg = &w - project_box_slab(&(&w - &grad), b, s_lo, s_hi);
        if pg.norm() <= tol {
            break;
        }
        // Armijo backtracking along the projection arc.
        let sigma = T::from_double(1e-4);
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = project_box_slab(&(&w - &grad * step), b, s_lo, s_hi);
            let delta = &candidate - &w;
            let f_c = objective(&candidate);
            if f_c <= f_w - sigma / step * delta.norm_squared() {
                w = candidate;
                f_w = f_c;
                history.push(f_w);
                step = (step * T::from_double(2.0)).min(T::from_double(1e6));
                accepted = true;
                break;
            }
            step *= T::from_double(0.5);
        }
        if !accepted {
            // no admissible step left at this scale: stationary in float
            break;
        }
    }

    Ok(KmmResult {
        weights: w,
        objective: f_w,
        iterations_used,
        feasible: true,
        b,
        epsilon,
        objective_history: history,
    })
}

/// Split the source into the top-weighted validation fraction and the rest.
///
/// The validation size is `fraction * n_s` rounded half away from zero; ties
/// in weight go to the lower index.
pub fn select_validation<T: Scalar>(
    weights: &Vector<T>,
    fraction: f64,
) -> Result<ValidationSplit> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "validation fraction {fraction} not in (0, 1)"
        )));
    }
    let n_s = weights.len();
    if n_s == 0 {
        return Err(Error::InvalidArgument("no weights given".into()));
    }
    let count = (fraction * n_s as f64).round() as usize;
    let mut order: Vec<usize> = (0..n_s).collect();
    order.sort_by(|&a, &b| {
        weights[b]
            .partial_cmp(&weights[a])
            .expect("finite weights")
            .then(a.cmp(&b))
    });
    let mut validation: Vec<usize> = order[..count].to_vec();
    validation.sort_unstable();
    let in_val: std::collections::HashSet<usize> = validation.iter().copied().collect();
    let train: Vec<usize> = (0..n_s).filter(|i| !in_val.contains(i)).collect();
    Ok(ValidationSplit {
        validation_indices: validation,
        train_indices: train,
        fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix64;
    use crate::Vector64;

    #[test]
    fn pinned_constraints_return_exact_ones() {
        let src = Matrix64::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        let tgt = Matrix64::from_row_slice(2, 1, &[0.5, 1.5]);
        let spec = KernelSpec::Rbf { bandwidth: 1.0 };
        let r = kmm_weights(&src, &tgt, &spec, 1.0, 0.0).unwrap();
        assert_eq!(r.weights, Vector64::from_element(3, 1.0));
        assert_eq!(r.iterations_used, 0);
    }

    #[test]
    fn infeasible_bounds_rejected() {
        let src = Matrix64::from_row_slice(2, 1, &[0.0, 1.0]);
        let tgt = Matrix64::from_row_slice(2, 1, &[0.0, 1.0]);
        let spec = KernelSpec::Linear;
        let err = kmm_weights(&src, &tgt, &spec, 0.5, 0.1).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn constraints_hold_on_output() {
        let src = Matrix64::from_row_slice(4, 2, &[0., 0., 1., 0., 5., 5., 6., 5.]);
        let tgt = Matrix64::from_row_slice(3, 2, &[0.2, 0.1, 0.8, -0.1, 0.5, 0.4]);
        let spec = KernelSpec::Rbf { bandwidth: 1.0 };
        let b = 5.0;
        let eps = 0.5;
        let r = kmm_weights(&src, &tgt, &spec, b, eps).unwrap();
        for w in r.weights.iter() {
            assert!(*w >= -1e-12 && *w <= b + 1e-12);
        }
        let sum = r.weights.sum();
        assert!((sum - 4.0).abs() <= 4.0 * eps + 1e-6, "sum {sum}");
        assert!(r.feasible);
    }

    #[test]
    fn objective_history_nonincreasing() {
        let src = Matrix64::from_row_slice(5, 1, &[0., 1., 2., 3., 4.]);
        let tgt = Matrix64::from_row_slice(4, 1, &[0.1, 0.2, 0.3, 0.4]);
        let spec = KernelSpec::Rbf { bandwidth: 2.0 };
        let r = kmm_weights(&src, &tgt, &spec, 10.0, 0.9).unwrap();
        for pair in r.objective_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-10);
        }
    }

    #[test]
    fn source_point_near_target_gets_larger_weight() {
        // point 0 sits on the target cluster, point 1 far away
        let src = Matrix64::from_row_slice(2, 1, &[0.0, 10.0]);
        let tgt = Matrix64::from_row_slice(4, 1, &[-0.1, 0.0, 0.1, 0.05]);
        let spec = KernelSpec::Rbf { bandwidth: 1.0 };
        let r = kmm_weights(&src, &tgt, &spec, 5.0, 0.5).unwrap();
        assert!(r.weights[0] > r.weights[1]);
    }

    #[test]
    fn select_validation_hand_case() {
        let w = Vector64::from_vec(vec![0.1, 0.9, 0.5, 0.7]);
        let split = select_validation(&w, 0.5).unwrap();
        assert_eq!(split.validation_indices, vec![1, 3]);
        assert_eq!(split.train_indices, vec![0, 2]);
    }

    #[test]
    fn select_validation_ties_take_lower_indices() {
        let w = Vector64::from_element(5, 1.0);
        let split = select_validation(&w, 0.4).unwrap();
        assert_eq!(split.validation_indices, vec![0, 1]);
    }

    #[test]
    fn select_validation_rounding() {
        let w = Vector64::from_element(10, 1.0);
        let split = select_validation(&w, 0.3).unwrap();
        assert_eq!(split.validation_indices.len(), 3);
        assert_eq!(split.train_indices.len(), 7);
    }

    #[test]
    fn select_validation_rejects_bad_fraction() {
        let w = Vector64::from_element(4, 1.0);
        assert!(select_validation(&w, 0.0).is_err());
        assert!(select_validation(&w, 1.0).is_err());
    }

    #[test]
    fn projection_respects_box_and_slab() {
        let v = Vector64::from_vec(vec![5.0, -3.0, 0.2, 2.0]);
        let p = project_box_slab(&v, 1.5, 2.0, 3.0);
        for x in p.iter() {
            assert!(*x >= -1e-12 && *x <= 1.5 + 1e-12);
        }
        let s = p.sum();
        assert!(s >= 2.0 - 1e-9 && s <= 3.0 + 1e-9, "sum {s}");
    }

    #[test]
    fn projection_is_identity_inside_the_set() {
        let v = Vector64::from_vec(vec![0.5, 0.75, 1.0]);
        let p = project_box_slab(&v, 2.0, 1.0, 4.0);
        assert_eq!(p, v);
    }
}
