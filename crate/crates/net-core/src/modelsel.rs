//! Hyperparameter selection scored on a source-side validation set.
//!
//! Selection fits treat the validation points as extra unlabeled "target"
//! samples: their kernel rows participate in the transductive fit, their
//! labels only ever score predictions afterwards.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDomain;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::kmm::{default_epsilon, kmm_weights, select_validation, KmmResult, ValidationSplit};
use crate::net::{accuracy, net_fit, HyperParams, NetModel};
use crate::{Labels, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Every (k, alpha, beta, gamma) combination.
    Full,
    /// One parameter at a time, holding the rest at the current best;
    /// two passes over (k, alpha, beta, gamma).
    Coordinate,
}

/// Hyperparameter grids to search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T: Scalar> {
    pub k_grid: Vec<usize>,
    /// Candidate values for each of alpha, beta, gamma.
    pub weight_grid: Vec<T>,
    pub search_mode: SearchMode,
    /// Refinement rounds per fit.
    pub iterations: usize,
}

impl<T: Scalar> Default for GridSpec<T> {
    fn default() -> Self {
        let mut k_grid: Vec<usize> = (1..=10).map(|i| i * 10).collect();
        k_grid.push(200);
        let weight_grid = [0.0, 0.0001, 0.0005, 0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0]
            .iter()
            .map(|&w| T::from_double(w))
            .collect();
        Self {
            k_grid,
            weight_grid,
            search_mode: SearchMode::Coordinate,
            iterations: 10,
        }
    }
}

impl<T: Scalar> GridSpec<T> {
    /// Sorted, deduplicated copy; errors when a grid is empty or no weight
    /// combination can be strictly positive.
    fn normalized(&self) -> Result<Self> {
        if self.k_grid.is_empty() || self.weight_grid.is_empty() {
            return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidArgument("iterations must be >= 1".into()));
        }
        let mut k_grid = self.k_grid.clone();
        k_grid.sort_unstable();
        k_grid.dedup();
        let mut weight_grid = self.weight_grid.clone();
        if weight_grid.iter().any(|w| *w < T::zero() || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "weight grid entries must be finite and nonnegative".into(),
            ));
        }
        weight_grid.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
        weight_grid.dedup();
        if weight_grid.iter().all(|w| *w == T::zero()) {
            return Err(Error::InvalidArgument(
                "weight grid needs at least one positive value".into(),
            ));
        }
        Ok(Self {
            k_grid,
            weight_grid,
            search_mode: self.search_mode,
            iterations: self.iterations,
        })
    }
}

/// Outcome of evaluating one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigScore<T: Scalar> {
    pub params: HyperParams<T>,
    /// Validation accuracy; absent when the fit failed.
    pub accuracy: Option<f64>,
    pub error: Option<String>,
    /// Predicted labels for the validation points (empty when the fit failed).
    pub validation_predictions: Labels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport<T: Scalar> {
    pub best_params: HyperParams<T>,
    pub scores: Vec<ConfigScore<T>>,
    pub mode: SearchMode,
}

type ConfigKey = (usize, u64, u64, u64);

fn key_of<T: Scalar>(p: &HyperParams<T>) -> ConfigKey {
    (
        p.k,
        p.alpha.to_double().to_bits(),
        p.beta.to_double().to_bits(),
        p.gamma.to_double().to_bits(),
    )
}

/// Grid value closest to `target`; ties go to the smaller value.
fn nearest_usize(grid: &[usize], target: usize) -> usize {
    *grid
        .iter()
        .min_by_key(|&&v| (v.abs_diff(target), v))
        .expect("non-empty grid")
}

fn nearest_weight<T: Scalar>(grid: &[T], target: T) -> T {
    let mut best = grid[0];
    for &v in grid {
        let (dv, db) = ((v - target).abs(), (best - target).abs());
        if dv < db || (dv == db && v < best) {
            best = v;
        }
    }
    best
}

struct Evaluator<'a, T: Scalar> {
    train: &'a LabeledDomain<T>,
    fit_target: LabeledDomain<T>,
    validation_labels: &'a Labels,
    spec: &'a KernelSpec<T>,
}

impl<'a, T: Scalar + Send + Sync> Evaluator<'a, T> {
    fn eval(&self, params: HyperParams<T>) -> ConfigScore<T> {
        match net_fit(self.train, &self.fit_target, self.spec, &params) {
            Ok(model) => {
                let n_val = self.validation_labels.len();
                let preds: Labels = model.final_pseudo_labels()[..n_val].to_vec();
                let acc = accuracy(&preds, self.validation_labels);
                ConfigScore {
                    params,
                    accuracy: Some(acc),
                    error: None,
                    validation_predictions: preds,
                }
            }
            Err(e) => ConfigScore {
                params,
                accuracy: None,
                error: Some(e.to_string()),
                validation_predictions: Vec::new(),
            },
        }
    }

    fn eval_batch(&self, configs: Vec<HyperParams<T>>) -> Vec<ConfigScore<T>> {
        configs.into_par_iter().map(|p| self.eval(p)).collect()
    }
}

/// Value-based argmax: highest accuracy, ties broken by smaller k then
/// smaller (alpha, beta, gamma) lexicographically.
fn pick_best<T: Scalar>(scores: &[ConfigScore<T>]) -> Result<HyperParams<T>> {
    let mut best: Option<&ConfigScore<T>> = None;
    for s in scores {
        let Some(acc) = s.accuracy else { continue };
        let better = match best {
            None => true,
            Some(b) => {
                let bacc = b.accuracy.expect("scored");
                if acc != bacc {
                    acc > bacc
                } else {
                    let lhs = (
                        s.params.k,
                        s.params.alpha.to_double(),
                        s.params.beta.to_double(),
                        s.params.gamma.to_double(),
                    );
                    let rhs = (
                        b.params.k,
                        b.params.alpha.to_double(),
                        b.params.beta.to_double(),
                        b.params.gamma.to_double(),
                    );
                    lhs < rhs
                }
            }
        };
        if better {
            best = Some(s);
        }
    }
    best.map(|s| s.params.clone())
        .ok_or_else(|| Error::Numerical("every grid configuration failed".into()))
}

/// Search the grid, scoring each configuration by accuracy on the
/// validation points after a transductive fit against
/// `[validation; target]`.
pub fn grid_search<T: Scalar + Send + Sync>(
    train_source: &LabeledDomain<T>,
    validation_source: &LabeledDomain<T>,
    target: &LabeledDomain<T>,
    spec: &KernelSpec<T>,
    grid: &GridSpec<T>,
) -> Result<SelectionReport<T>> {
    let grid = grid.normalized()?;
    train_source.require_labels()?;
    let validation_labels = validation_source.require_labels()?;
    let fit_features =
        crate::kernel::stack_rows(validation_source.features(), target.features())?;
    let fit_target = LabeledDomain::new(fit_features, None, "selection-target")?;
    let ev = Evaluator {
        train: train_source,
        fit_target,
        validation_labels,
        spec,
    };

    let scores = match grid.search_mode {
        SearchMode::Full => {
            let mut configs = Vec::new();
            for &k in &grid.k_grid {
                for &alpha in &grid.weight_grid {
                    for &beta in &grid.weight_grid {
                        for &gamma in &grid.weight_grid {
                            configs.push(HyperParams {
                                alpha,
                                beta,
                                gamma,
                                k,
                                iterations: grid.iterations,
                            });
                        }
                    }
                }
            }
            ev.eval_batch(configs)
        }
        SearchMode::Coordinate => coordinate_search(&ev, &grid),
    };

    let best_params = pick_best(&scores)?;
    Ok(SelectionReport {
        best_params,
        scores,
        mode: grid.search_mode,
    })
}

enum Axis {
    K,
    Alpha,
    Beta,
    Gamma,
}

fn coordinate_search<T: Scalar + Send + Sync>(
    ev: &Evaluator<'_, T>,
    grid: &GridSpec<T>,
) -> Vec<ConfigScore<T>> {
    let one = nearest_weight(&grid.weight_grid, T::one());
    let mut current = HyperParams {
        alpha: one,
        beta: one,
        gamma: one,
        k: nearest_usize(&grid.k_grid, 20),
        iterations: grid.iterations,
    };

    let mut table: Vec<ConfigScore<T>> = Vec::new();
    let mut index: HashMap<ConfigKey, usize> = HashMap::new();

    for _pass in 0..2 {
        for axis in [Axis::K, Axis::Alpha, Axis::Beta, Axis::Gamma] {
            let candidates: Vec<HyperParams<T>> = match axis {
                Axis::K => grid
                    .k_grid
                    .iter()
                    .map(|&k| HyperParams { k, ..current.clone() })
                    .collect(),
                Axis::Alpha => grid
                    .weight_grid
                    .iter()
                    .map(|&alpha| HyperParams { alpha, ..current.clone() })
                    .collect(),
                Axis::Beta => grid
                    .weight_grid
                    .iter()
                    .map(|&beta| HyperParams { beta, ..current.clone() })
                    .collect(),
                Axis::Gamma => grid
                    .weight_grid
                    .iter()
                    .map(|&gamma| HyperParams { gamma, ..current.clone() })
                    .collect(),
            };
            let fresh: Vec<HyperParams<T>> = candidates
                .iter()
                .filter(|p| !index.contains_key(&key_of(p)))
                .cloned()
                .collect();
            for score in ev.eval_batch(fresh) {
                index.insert(key_of(&score.params), table.len());
                table.push(score);
            }
            // argmax along this axis; ties go to the smaller swept value
            let mut best: Option<(&ConfigScore<T>, f64)> = None;
            for p in &candidates {
                let s = &table[index[&key_of(p)]];
                if let Some(acc) = s.accuracy {
                    if best.map_or(true, |(_, b)| acc > b) {
                        best = Some((s, acc));
                    }
                }
            }
            if let Some((s, _)) = best {
                current = s.params.clone();
            }
        }
    }
    table
}

/// KMM solver and split settings for the validation pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmmSettings<T: Scalar> {
    /// Box bound on the instance weights.
    pub b: T,
    /// Sum-slack; `None` selects `(sqrt(n_s)-1)/sqrt(n_s)`.
    pub epsilon: Option<T>,
    /// Fraction of the source routed to validation.
    pub fraction: f64,
}

impl<T: Scalar> Default for KmmSettings<T> {
    fn default() -> Self {
        Self {
            b: T::from_double(crate::kmm::DEFAULT_B),
            epsilon: None,
            fraction: 0.3,
        }
    }
}

/// Everything the end-to-end validated run produces.
#[derive(Debug, Clone)]
pub struct PipelineOutcome<T: Scalar> {
    pub report: SelectionReport<T>,
    pub model: NetModel<T>,
    pub kmm: KmmResult<T>,
    pub split: ValidationSplit,
}

/// End-to-end validated fit: KMM weights select the validation split, the
/// grid search picks hyperparameters on it, and the final model is refit on
/// the full source against the true target.
pub fn validate_pipeline<T: Scalar + Send + Sync>(
    source: &LabeledDomain<T>,
    target: &LabeledDomain<T>,
    spec: &KernelSpec<T>,
    grid: &GridSpec<T>,
    settings: &KmmSettings<T>,
) -> Result<PipelineOutcome<T>> {
    source.require_labels()?;
    let epsilon = settings
        .epsilon
        .unwrap_or_else(|| T::from_double(default_epsilon(source.n())));
    let kmm = kmm_weights(
        source.features(),
        target.features(),
        spec,
        settings.b,
        epsilon,
    )?;
    let split = select_validation(&kmm.weights, settings.fraction)?;
    if split.validation_indices.is_empty() || split.train_indices.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "validation split {} / {} is degenerate",
            split.validation_indices.len(),
            split.train_indices.len()
        )));
    }
    let train = source.subset(&split.train_indices)?;
    let validation = source.subset(&split.validation_indices)?;
    let report = grid_search(&train, &validation, target, spec, grid)?;
    let model = net_fit(source, target, spec, &report.best_params)?;
    Ok(PipelineOutcome {
        report,
        model,
        kmm,
        split,
    })
}
