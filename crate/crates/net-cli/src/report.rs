//! Machine-readable run reports.
//!
//! One self-describing JSON document per invocation. Accuracies are
//! percentages rounded to two decimals (e.g. `75.39`); wall-clock timings
//! live under their own key so reports stay comparable across runs.

use net_core::modelsel::{SearchMode, SelectionReport};
use net_core::net::{HyperParams, NetModel};
use net_core::{KernelSpec64, Scalar};
use serde::{Deserialize, Serialize};

/// Fraction -> percentage with two decimals.
pub fn pct(fraction: f64) -> f64 {
    (fraction * 10_000.0).round() / 100.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub source: Option<String>,
    pub target: Option<String>,
    pub labels: Option<String>,
    pub synth: Option<SynthEcho>,
    pub preprocess: PreprocessEcho,
    /// Kernel with any `median` bandwidth already resolved.
    pub kernel: KernelSpec64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthEcho {
    pub n_s: usize,
    pub n_t: usize,
    pub classes: usize,
    pub dim: usize,
    pub shift: f64,
    pub rotation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessEcho {
    pub standardize: bool,
    pub standardize_pooled: bool,
    pub pca_dims: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub accuracy_pct: Option<f64>,
    pub mmd_cost: f64,
    pub embedding_cost: f64,
    pub objective: f64,
    pub pseudo_label_changes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSection {
    pub params: HyperParams<f64>,
    pub final_accuracy_pct: Option<f64>,
    pub history: Vec<HistoryEntry>,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEcho {
    pub mode: SearchMode,
    pub configurations: Vec<ConfigRow>,
    pub kmm: KmmSummary,
    pub validation_size: usize,
    pub train_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRow {
    pub params: HyperParams<f64>,
    pub accuracy_pct: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmmSummary {
    pub b: f64,
    pub epsilon: f64,
    pub objective: f64,
    pub iterations_used: usize,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Timings {
    pub total_ms: f64,
    pub fit_ms: f64,
    pub baseline_ms: f64,
    pub selection_ms: Option<f64>,
}

/// The per-run report: config echo, baseline and fit accuracies, iteration
/// history, selection summary when a grid search ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub na_accuracy_pct: Option<f64>,
    pub net: FitSection,
    pub selection: Option<SelectionEcho>,
    pub timings: Timings,
}

/// Report for the weights-only subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmmReport {
    pub config: ConfigEcho,
    pub kmm: KmmSummary,
    pub weights: Vec<f64>,
    pub validation_indices: Vec<usize>,
    pub train_indices: Vec<usize>,
    pub fraction: f64,
    pub timings: Timings,
}

pub fn fit_section<T: Scalar>(model: &NetModel<T>) -> FitSection {
    FitSection {
        params: HyperParams {
            alpha: model.params.alpha.to_double(),
            beta: model.params.beta.to_double(),
            gamma: model.params.gamma.to_double(),
            k: model.params.k,
            iterations: model.params.iterations,
        },
        final_accuracy_pct: model.final_target_accuracy().map(pct),
        history: model
            .history
            .iter()
            .enumerate()
            .map(|(i, rec)| HistoryEntry {
                iteration: i + 1,
                accuracy_pct: rec.target_accuracy.map(pct),
                mmd_cost: rec.mmd_cost.to_double(),
                embedding_cost: rec.embedding_cost.to_double(),
                objective: rec.objective.to_double(),
                pseudo_label_changes: rec.pseudo_label_changes,
            })
            .collect(),
        eigenvalues: model.eigenvalues.iter().map(|v| v.to_double()).collect(),
    }
}

pub fn config_rows<T: Scalar>(report: &SelectionReport<T>) -> Vec<ConfigRow> {
    report
        .scores
        .iter()
        .map(|s| ConfigRow {
            params: HyperParams {
                alpha: s.params.alpha.to_double(),
                beta: s.params.beta.to_double(),
                gamma: s.params.gamma.to_double(),
                k: s.params.k,
                iterations: s.params.iterations,
            },
            accuracy_pct: s.accuracy.map(pct),
            error: s.error.clone(),
        })
        .collect()
}
