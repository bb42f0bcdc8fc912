// scratch probe, deleted before finishing
use net_core::data::make_shifted_gaussians;
use net_core::graph::{build_adjacency, normalized_laplacian};
use net_core::kernel::{jitter_epsilon, kernel_matrix, median_bandwidth, stack_rows, KernelSpec};
use net_core::mmd::build_mmd_set;
use net_core::net::{accuracy, assemble_system, na_baseline, nn_classify, project, HyperParams};
use net_core::{eigsolve::generalized_eig_smallest, Matrix64};

fn fit_variant(
    seed: u64,
    params: &HyperParams<f64>,
    bw_scale: f64,
    normalize: bool,
    shift: f64,
) -> (f64, f64, Vec<f64>) {
    let (src, tgt) = make_shifted_gaussians::<f64>(seed, 300, 300, 2, 2, shift, 0.0).unwrap();
    let (_, na) = na_baseline(&src, &tgt).unwrap();
    let stacked = stack_rows(src.features(), tgt.features()).unwrap();
    let spec = KernelSpec::Rbf {
        bandwidth: median_bandwidth(&stacked) * bw_scale,
    };
    let n_s = src.n();
    let n_t = tgt.n();
    let gram = kernel_matrix(&stacked, &spec, n_s).unwrap();
    let labels = src.labels().unwrap().clone();
    let graph = normalized_laplacian(&build_adjacency::<f64>(&labels, n_t)).unwrap();
    let mut pseudo = nn_classify(
        &src.features().transpose(),
        &labels,
        &tgt.features().transpose(),
    )
    .unwrap();
    let mut accs = Vec::new();
    for _ in 0..params.iterations {
        let mmd = build_mmd_set::<f64>(&labels, &pseudo, 2).unwrap();
        let (lhs, rhs) =
            assemble_system(&gram.values, &mmd.sum, &graph.laplacian, &graph.degrees, params)
                .unwrap();
        let jitter = jitter_epsilon(&rhs);
        let sol = generalized_eig_smallest(&lhs, &rhs, params.k, jitter).unwrap();
        let mut z = project(&gram.values, &sol.vectors).unwrap();
        if normalize {
            for j in 0..z.ncols() {
                let norm = z.column(j).norm();
                if norm > 0.0 {
                    let scaled = z.column(j) / norm;
                    z.set_column(j, &scaled);
                }
            }
        }
        let z_src: Matrix64 = z.columns(0, n_s).clone_owned();
        let z_tgt: Matrix64 = z.columns(n_s, n_t).clone_owned();
        pseudo = nn_classify(&z_src, &labels, &z_tgt).unwrap();
        accs.push(accuracy(&pseudo, tgt.labels().unwrap()));
    }
    (na.unwrap(), *accs.last().unwrap(), accs)
}

#[test]
#[ignore]
fn probe_variants() {
    let base = HyperParams { alpha: 1.0, beta: 1.0, gamma: 1.0, k: 20, iterations: 10 };
    let jda = HyperParams { alpha: 1.0, beta: 0.0, gamma: 1.0, k: 20, iterations: 10 };
    for (name, params, bw, norm, shift) in [
        ("paper-params raw      s1.5", &base, 1.0, false, 1.5),
        ("paper-params norm     s1.5", &base, 1.0, true, 1.5),
        ("jda raw               s1.5", &jda, 1.0, false, 1.5),
        ("jda norm              s1.5", &jda, 1.0, true, 1.5),
        ("paper-params norm bw.5 s1.5", &base, 0.5, true, 1.5),
        ("paper-params norm     s3.0", &base, 1.0, true, 3.0),
        ("paper-params raw      s3.0", &base, 1.0, false, 3.0),
    ] {
        let mut na_m = 0.0;
        let mut net_m = 0.0;
        let mut first = Vec::new();
        for seed in 0..3 {
            let (na, net, accs) = fit_variant(seed, params, bw, norm, shift);
            na_m += na / 3.0;
            net_m += net / 3.0;
            if seed == 0 {
                first = accs;
            }
        }
        let hist: Vec<String> = first.iter().map(|a| format!("{:.0}", 100.0 * a)).collect();
        println!(
            "{name}: NA {:.1}%  NET {:.1}%  gain {:+.1}  [seed0 iters: {}]",
            100.0 * na_m,
            100.0 * net_m,
            100.0 * (net_m - na_m),
            hist.join(",")
        );
    }
}
