//! The adaptation driver: assemble the alignment-plus-embedding system,
//! iterate pseudo-label refinement, project, and classify.

use serde::{Deserialize, Serialize};

use crate::data::LabeledDomain;
use crate::eigsolve::{generalized_eig_smallest, EigenSolution};
use crate::error::{Error, Result};
use crate::graph::{build_adjacency, embedding_cost, normalized_laplacian, SimilarityGraph};
use crate::kernel::{jitter_epsilon, kernel_matrix, stack_rows, GramMatrix, KernelSpec};
use crate::mmd::{build_mmd_set, mmd_cost};
use crate::{Labels, Matrix, Scalar, Vector};

/// Objective weights and projection size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParams<T: Scalar> {
    /// Distribution-alignment weight.
    pub alpha: T,
    /// Embedding-smoothness weight.
    pub beta: T,
    /// Frobenius regularization weight.
    pub gamma: T,
    /// Projection dimension.
    pub k: usize,
    /// Pseudo-label refinement rounds.
    pub iterations: usize,
}

impl<T: Scalar> Default for HyperParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::one(),
            beta: T::one(),
            gamma: T::one(),
            k: 20,
            iterations: 10,
        }
    }
}

impl<T: Scalar> HyperParams<T> {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidArgument(format!(
                "projection dimension {} not in 1..={n}",
                self.k
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iterations must be >= 1".into()));
        }
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        if a < T::zero() || b < T::zero() || g < T::zero() {
            return Err(Error::InvalidArgument(
                "alpha, beta, gamma must be nonnegative".into(),
            ));
        }
        if a == T::zero() && b == T::zero() && g == T::zero() {
            return Err(Error::InvalidArgument(
                "at least one of alpha, beta, gamma must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One pseudo-label refinement round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord<T: Scalar> {
    /// Target pseudo-labels predicted after this round's projection.
    pub pseudo_labels: Labels,
    /// Fraction of pseudo-labels matching true target labels, when known.
    pub target_accuracy: Option<f64>,
    pub mmd_cost: T,
    pub embedding_cost: T,
    /// `alpha * mmd + beta * embedding + gamma * ||A||_F^2`.
    pub objective: T,
    /// Sum of the k smallest eigenvalues of this round's system.
    pub eigenvalue_sum: T,
    /// How many pseudo-labels changed relative to the previous round.
    pub pseudo_label_changes: usize,
}

/// A fitted model: coefficients, spectra, kernel reference data, and the
/// per-iteration history.
#[derive(Debug, Clone)]
pub struct NetModel<T: Scalar> {
    /// `n x k` coefficient matrix from the final iteration.
    pub coefficients: Matrix<T>,
    /// The k smallest eigenvalues from the final iteration, ascending.
    pub eigenvalues: Vector<T>,
    pub kernel_spec: KernelSpec<T>,
    pub gram: GramMatrix<T>,
    pub params: HyperParams<T>,
    pub history: Vec<IterationRecord<T>>,
    /// Pseudo-labels from the input-space classifier that seeds iteration 1.
    pub initial_pseudo_labels: Labels,
    /// Diagonal shift applied to the constraint matrix in every solve.
    pub rhs_jitter: T,
}

impl<T: Scalar> NetModel<T> {
    pub fn final_pseudo_labels(&self) -> &Labels {
        &self.history.last().expect("non-empty history").pseudo_labels
    }

    pub fn final_target_accuracy(&self) -> Option<f64> {
        self.history.last().expect("non-empty history").target_accuracy
    }
}

/// Build the generalized-eigenproblem pencil:
/// `lhs = alpha K M K^T + beta K L K^T + gamma I`, `rhs = K D K^T`.
pub fn assemble_system<T: Scalar>(
    gram: &Matrix<T>,
    mmd_sum: &Matrix<T>,
    laplacian: &Matrix<T>,
    degrees: &Vector<T>,
    params: &HyperParams<T>,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let n = gram.nrows();
    for m in [mmd_sum, laplacian] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "assemble_system operand order",
                left: n,
                right: m.nrows(),
            });
        }
    }
    if degrees.len() != n || !gram.is_square() {
        return Err(Error::DimensionMismatch {
            context: "assemble_system degree vector",
            left: n,
            right: degrees.len(),
        });
    }
    // K is symmetric, so K^T products reuse K directly.
    let mut lhs = gram * (mmd_sum * gram) * params.alpha;
    lhs += gram * (laplacian * gram) * params.beta;
    for i in 0..n {
        lhs[(i, i)] += params.gamma;
    }
    // K D: scale the columns of K by the degrees.
    let mut kd = gram.clone();
    for (j, mut col) in kd.column_iter_mut().enumerate() {
        col *= degrees[j];
    }
    let rhs = kd * gram;
    let half = T::from_double(0.5);
    Ok((
        (&lhs + lhs.transpose()) * half,
        (&rhs + rhs.transpose()) * half,
    ))
}

/// Project kernel columns through the coefficients: `Z = A^T K_block`.
pub fn project<T: Scalar>(k_block: &Matrix<T>, coefficients: &Matrix<T>) -> Result<Matrix<T>> {
    if k_block.nrows() != coefficients.nrows() {
        return Err(Error::DimensionMismatch {
            context: "project kernel rows vs coefficient rows",
            left: k_block.nrows(),
            right: coefficients.nrows(),
        });
    }
    Ok(coefficients.transpose() * k_block)
}

/// 1-nearest-neighbor under Euclidean distance over matrix *columns*;
/// distance ties go to the lowest training index.
pub fn nn_classify<T: Scalar>(
    train: &Matrix<T>,
    train_labels: &Labels,
    test: &Matrix<T>,
) -> Result<Labels> {
    let m = train.ncols();
    if m == 0 {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    if train_labels.len() != m {
        return Err(Error::DimensionMismatch {
            context: "training labels vs training points",
            left: train_labels.len(),
            right: m,
        });
    }
    if train.nrows() != test.nrows() {
        return Err(Error::DimensionMismatch {
            context: "train vs test point dimension",
            left: train.nrows(),
            right: test.nrows(),
        });
    }
    let mut out = Vec::with_capacity(test.ncols());
    for j in 0..test.ncols() {
        let t = test.column(j);
        let mut best = 0usize;
        let mut best_d = (train.column(0) - t).norm_squared();
        for i in 1..m {
            let d = (train.column(i) - t).norm_squared();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        out.push(train_labels[best]);
    }
    Ok(out)
}

/// Fraction of predictions matching the truth.
pub fn accuracy(predicted: &Labels, truth: &Labels) -> f64 {
    assert_eq!(predicted.len(), truth.len());
    let hits = predicted.iter().zip(truth).filter(|(p, t)| p == t).count();
    hits as f64 / predicted.len() as f64
}

/// 1-NN from labeled source to target in the raw feature space.
pub fn na_baseline<T: Scalar>(
    source: &LabeledDomain<T>,
    target: &LabeledDomain<T>,
) -> Result<(Labels, Option<f64>)> {
    let labels = source.require_labels()?;
    let predictions = nn_classify(
        &source.features().transpose(),
        labels,
        &target.features().transpose(),
    )?;
    let acc = target.labels().map(|truth| accuracy(&predictions, truth));
    Ok((predictions, acc))
}

/// Fit the adaptation model on a labeled source and unlabeled target.
///
/// Target labels, when present, are used only to score the history.
pub fn net_fit<T: Scalar>(
    source: &LabeledDomain<T>,
    target: &LabeledDomain<T>,
    spec: &KernelSpec<T>,
    params: &HyperParams<T>,
) -> Result<NetModel<T>> {
    let source_labels = source.require_labels()?.clone();
    let n_s = source.n();
    let n_t = target.n();
    let n = n_s + n_t;
    params.validate(n)?;
    let classes = source.class_count().expect("labeled source");

    let stacked = stack_rows(source.features(), target.features())?;
    let gram = kernel_matrix(&stacked, spec, n_s)?;
    let graph: SimilarityGraph<T> = normalized_laplacian(&build_adjacency(&source_labels, n_t))?;

    // Input-space classifier seeds the pseudo-labels.
    let initial_pseudo = nn_classify(
        &source.features().transpose(),
        &source_labels,
        &target.features().transpose(),
    )?;

    let mut pseudo = initial_pseudo.clone();
    let mut history = Vec::with_capacity(params.iterations);
    let mut final_solution: Option<EigenSolution<T>> = None;
    let mut rhs_jitter = T::zero();

    for iteration in 1..=params.iterations {
        let mmd_set = build_mmd_set::<T>(&source_labels, &pseudo, classes)?;
        let (lhs, rhs) = assemble_system(
            &gram.values,
            &mmd_set.sum,
            &graph.laplacian,
            &graph.degrees,
            params,
        )?;
        let jitter = jitter_epsilon(&rhs);
        let solution = generalized_eig_smallest(&lhs, &rhs, params.k, jitter).map_err(|e| {
            Error::EigenAtIteration {
                iteration,
                source: Box::new(e),
            }
        })?;
        rhs_jitter = solution.jitter_used;

        let z = project(&gram.values, &solution.vectors)?;
        let z_source = z.columns(0, n_s).clone_owned();
        let z_target = z.columns(n_s, n_t).clone_owned();
        let new_pseudo = nn_classify(&z_source, &source_labels, &z_target)?;

        let mmd = mmd_cost(&z, &mmd_set.sum)?;
        let emb = embedding_cost(&z, &graph.laplacian)?;
        let fro2 = solution.vectors.norm_squared();
        let objective = params.alpha * mmd + params.beta * emb + params.gamma * fro2;
        let changes = new_pseudo
            .iter()
            .zip(&pseudo)
            .filter(|(a, b)| a != b)
            .count();
        history.push(IterationRecord {
            pseudo_labels: new_pseudo.clone(),
            target_accuracy: target.labels().map(|t| accuracy(&new_pseudo, t)),
            mmd_cost: mmd,
            embedding_cost: emb,
            objective,
            eigenvalue_sum: solution.values.sum(),
            pseudo_label_changes: changes,
        });
        pseudo = new_pseudo;
        final_solution = Some(solution);
    }

    let solution = final_solution.expect("at least one iteration");
    Ok(NetModel {
        coefficients: solution.vectors,
        eigenvalues: solution.values,
        kernel_spec: spec.clone(),
        gram,
        params: params.clone(),
        history,
        initial_pseudo_labels: initial_pseudo,
        rhs_jitter,
    })
}
