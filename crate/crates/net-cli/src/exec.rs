use std::io::Write;
use std::path::Path;
use std::time::Instant;

use net_core::data::{
    load_dataset, make_shifted_gaussians, pca_reduce, standardize, LabeledDomain,
    StandardizeStats,
};
use net_core::kernel::{median_bandwidth, stack_rows};
use net_core::kmm::{default_epsilon, kmm_weights, select_validation};
use net_core::modelsel::{validate_pipeline, GridSpec, KmmSettings, SearchMode};
use net_core::net::{na_baseline, net_fit, HyperParams};
use net_core::{Error, ErrorKind, KernelSpec64, LabeledDomain64, Matrix64};

use crate::args::{
    BandwidthArg, Cli, Command, DataArgs, EpsilonArg, GridsearchArgs, KernelArgs, KernelFamily,
    KmmArgs, PreprocessArgs, RunArgs, SearchArg, SynthArgs,
};
use crate::report::{
    config_rows, fit_section, pct, ConfigEcho, KmmReport, KmmSummary, PreprocessEcho, RunReport,
    SelectionEcho, SynthEcho, Timings,
};

/// Exit codes: 0 success, 1 config error, 2 data error, 3 numerical failure.
pub struct AppError {
    pub code: i32,
    pub message: String,
}

impl AppError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Config => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numeric => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Gridsearch(args) => gridsearch(args),
        Command::Synth(args) => synth(args),
        Command::Kmm(args) => kmm(args),
    }
}

fn load_domains(
    data: &DataArgs,
    seed: u64,
) -> Result<(LabeledDomain64, LabeledDomain64, Option<SynthEcho>), AppError> {
    if data.synth {
        let (source, mut target) = make_shifted_gaussians::<f64>(
            seed,
            data.n_s,
            data.n_t,
            data.classes,
            data.dim,
            data.shift,
            data.rotation,
        )?;
        if data.strip_target_labels {
            target = target.unlabeled();
        }
        let echo = SynthEcho {
            n_s: data.n_s,
            n_t: data.n_t,
            classes: data.classes,
            dim: data.dim,
            shift: data.shift,
            rotation: data.rotation,
        };
        return Ok((source, target, Some(echo)));
    }
    let (Some(source_path), Some(target_path)) = (&data.source, &data.target) else {
        return Err(AppError::config(
            "either --synth or both --source and --target are required",
        ));
    };
    let source = load_dataset::<f64>(source_path, data.labels.as_ref())?;
    // The target label column is optional: it only scores accuracy.
    let target = match load_dataset::<f64>(target_path, data.labels.as_ref()) {
        Ok(t) => t,
        Err(Error::MissingColumn(_)) => load_dataset::<f64>(target_path, None)?,
        Err(e) => return Err(e.into()),
    };
    Ok((source, target, None))
}

fn apply_preprocess(
    source: LabeledDomain64,
    target: LabeledDomain64,
    args: &PreprocessArgs,
) -> Result<(LabeledDomain64, LabeledDomain64), AppError> {
    let (mut source, mut target) = (source, target);
    if args.standardize {
        let stats = if args.standardize_pooled {
            StandardizeStats::fit(&stack_rows(source.features(), target.features())?)
        } else {
            StandardizeStats::fit(source.features())
        };
        source = standardize(&source, Some(&stats))?.0;
        target = standardize(&target, Some(&stats))?.0;
    }
    if let Some(dims) = args.pca {
        let (s, t) = pca_reduce(&source, &target, dims)?;
        source = s;
        target = t;
    }
    Ok((source, target))
}

fn resolve_kernel(args: &KernelArgs, stacked: &Matrix64) -> Result<KernelSpec64, AppError> {
    let spec = match args.kernel {
        KernelFamily::Linear => KernelSpec64::Linear,
        KernelFamily::Rbf => KernelSpec64::Rbf {
            bandwidth: match args.bandwidth {
                BandwidthArg::Median => median_bandwidth(stacked),
                BandwidthArg::Value(v) => v,
            },
        },
        KernelFamily::Poly => KernelSpec64::Polynomial {
            degree: args.degree,
            offset: args.offset,
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn config_echo(
    command: &str,
    data: &DataArgs,
    synth: Option<SynthEcho>,
    preprocess: &PreprocessArgs,
    kernel: KernelSpec64,
    seed: u64,
) -> ConfigEcho {
    ConfigEcho {
        command: command.to_string(),
        source: data.source.as_ref().map(|p| p.display().to_string()),
        target: data.target.as_ref().map(|p| p.display().to_string()),
        labels: data.labels.as_ref().map(|l| l.to_string()),
        synth,
        preprocess: PreprocessEcho {
            standardize: preprocess.standardize,
            standardize_pooled: preprocess.standardize_pooled,
            pca_dims: preprocess.pca,
        },
        kernel,
        seed,
    }
}

fn emit<R: serde::Serialize>(report: &R, out: Option<&Path>) -> Result<(), AppError> {
    let mut body = serde_json::to_string_pretty(report)
        .map_err(|e| AppError::data(format!("cannot serialize report: {e}")))?;
    body.push('\n');
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| AppError::data(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| AppError::data(format!("cannot write report: {e}"))),
    }
}

fn run(args: RunArgs) -> Result<(), AppError> {
    let t_total = Instant::now();
    let (source, target, synth_echo) = load_domains(&args.data, args.seed)?;
    source
        .labels()
        .ok_or_else(|| AppError::config("the source needs a label column (--labels)"))?;
    let (source, target) = apply_preprocess(source, target, &args.preprocess)?;
    let stacked = stack_rows(source.features(), target.features())?;
    let kernel = resolve_kernel(&args.kernel, &stacked)?;

    let t_na = Instant::now();
    let (_, na_accuracy) = na_baseline(&source, &target)?;
    let baseline_ms = t_na.elapsed().as_secs_f64() * 1e3;

    let params = HyperParams {
        alpha: args.hyper.alpha,
        beta: args.hyper.beta,
        gamma: args.hyper.gamma,
        k: args.hyper.k,
        iterations: args.hyper.iters,
    };
    let t_fit = Instant::now();
    let model = net_fit(&source, &target, &kernel, &params)?;
    let fit_ms = t_fit.elapsed().as_secs_f64() * 1e3;

    let report = RunReport {
        config: config_echo("run", &args.data, synth_echo, &args.preprocess, kernel, args.seed),
        na_accuracy_pct: na_accuracy.map(pct),
        net: fit_section(&model),
        selection: None,
        timings: Timings {
            total_ms: t_total.elapsed().as_secs_f64() * 1e3,
            fit_ms,
            baseline_ms,
            selection_ms: None,
        },
    };
    emit(&report, args.out.as_deref())
}

fn gridsearch(args: GridsearchArgs) -> Result<(), AppError> {
    let t_total = Instant::now();
    if args.grid.jobs == 0 {
        return Err(AppError::config("--jobs must be at least 1"));
    }
    let (source, target, synth_echo) = load_domains(&args.data, args.seed)?;
    source
        .labels()
        .ok_or_else(|| AppError::config("the source needs a label column (--labels)"))?;
    let (source, target) = apply_preprocess(source, target, &args.preprocess)?;
    let stacked = stack_rows(source.features(), target.features())?;
    let kernel = resolve_kernel(&args.kernel, &stacked)?;

    let defaults = GridSpec::<f64>::default();
    let grid = GridSpec {
        k_grid: args.grid.k_grid.clone().unwrap_or(defaults.k_grid),
        weight_grid: args.grid.weight_grid.clone().unwrap_or(defaults.weight_grid),
        search_mode: match args.grid.search {
            SearchArg::Full => SearchMode::Full,
            SearchArg::Coordinate => SearchMode::Coordinate,
        },
        iterations: args.grid.iters,
    };
    let settings = KmmSettings {
        b: args.kmm.kmm_b,
        epsilon: match args.kmm.kmm_eps {
            EpsilonArg::Auto => None,
            EpsilonArg::Value(v) => Some(v),
        },
        fraction: args.kmm.val_fraction,
    };

    let t_na = Instant::now();
    let (_, na_accuracy) = na_baseline(&source, &target)?;
    let baseline_ms = t_na.elapsed().as_secs_f64() * 1e3;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.grid.jobs)
        .build()
        .map_err(|e| AppError::config(format!("cannot build worker pool: {e}")))?;
    let t_sel = Instant::now();
    let outcome = pool.install(|| validate_pipeline(&source, &target, &kernel, &grid, &settings))?;
    let selection_ms = t_sel.elapsed().as_secs_f64() * 1e3;

    let report = RunReport {
        config: config_echo(
            "gridsearch",
            &args.data,
            synth_echo,
            &args.preprocess,
            kernel,
            args.seed,
        ),
        na_accuracy_pct: na_accuracy.map(pct),
        net: fit_section(&outcome.model),
        selection: Some(SelectionEcho {
            mode: outcome.report.mode,
            configurations: config_rows(&outcome.report),
            kmm: KmmSummary {
                b: outcome.kmm.b,
                epsilon: outcome.kmm.epsilon,
                objective: outcome.kmm.objective,
                iterations_used: outcome.kmm.iterations_used,
                feasible: outcome.kmm.feasible,
            },
            validation_size: outcome.split.validation_indices.len(),
            train_size: outcome.split.train_indices.len(),
        }),
        timings: Timings {
            total_ms: t_total.elapsed().as_secs_f64() * 1e3,
            fit_ms: 0.0,
            baseline_ms,
            selection_ms: Some(selection_ms),
        },
    };
    emit(&report, args.out.as_deref())
}

fn write_table(
    path: &Path,
    domain: &LabeledDomain<f64>,
    with_labels: bool,
) -> Result<(), AppError> {
    let mut out = String::new();
    let header: Vec<String> = (0..domain.dim()).map(|j| format!("f{j}")).collect();
    out.push_str(&header.join(","));
    if with_labels {
        out.push_str(",label");
    }
    out.push('\n');
    for i in 0..domain.n() {
        let row: Vec<String> = (0..domain.dim())
            .map(|j| format!("{}", domain.features()[(i, j)]))
            .collect();
        out.push_str(&row.join(","));
        if with_labels {
            out.push_str(&format!(",{}", domain.labels().expect("labeled")[i]));
        }
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| AppError::data(format!("cannot write {}: {e}", path.display())))
}

fn synth(args: SynthArgs) -> Result<(), AppError> {
    let (source, target) = make_shifted_gaussians::<f64>(
        args.seed,
        args.n_s,
        args.n_t,
        args.classes,
        args.dim,
        args.shift,
        args.rotation,
    )?;
    write_table(&args.out_source, &source, true)?;
    write_table(&args.out_target, &target, !args.strip_target_labels)?;
    Ok(())
}

fn kmm(args: KmmArgs) -> Result<(), AppError> {
    let t_total = Instant::now();
    let (source, target, synth_echo) = load_domains(&args.data, args.seed)?;
    let (source, target) = apply_preprocess(source, target, &args.preprocess)?;
    let stacked = stack_rows(source.features(), target.features())?;
    let kernel = resolve_kernel(&args.kernel, &stacked)?;

    let epsilon = match args.kmm.kmm_eps {
        EpsilonArg::Auto => default_epsilon(source.n()),
        EpsilonArg::Value(v) => v,
    };
    let result = kmm_weights(
        source.features(),
        target.features(),
        &kernel,
        args.kmm.kmm_b,
        epsilon,
    )?;
    let split = select_validation(&result.weights, args.kmm.val_fraction)?;

    let report = KmmReport {
        config: config_echo("kmm", &args.data, synth_echo, &args.preprocess, kernel, args.seed),
        kmm: KmmSummary {
            b: result.b,
            epsilon: result.epsilon,
            objective: result.objective,
            iterations_used: result.iterations_used,
            feasible: result.feasible,
        },
        weights: result.weights.iter().copied().collect(),
        validation_indices: split.validation_indices,
        train_indices: split.train_indices,
        fraction: split.fraction,
        timings: Timings {
            total_ms: t_total.elapsed().as_secs_f64() * 1e3,
            ..Default::default()
        },
    };
    emit(&report, args.out.as_deref())
}
