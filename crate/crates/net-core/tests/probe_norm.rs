// scratch probe, deleted before finishing
use net_core::data::make_shifted_gaussians;
use net_core::graph::{build_adjacency, embedding_cost, normalized_laplacian};
use net_core::kernel::{jitter_epsilon, kernel_matrix, median_bandwidth, stack_rows, KernelSpec};
use net_core::mmd::{build_mmd_set, mmd_cost};
use net_core::net::{accuracy, assemble_system, na_baseline, nn_classify, project, HyperParams};
use net_core::{eigsolve::generalized_eig_smallest, Matrix64};

#[allow(clippy::too_many_arguments)]
fn fit(seed: u64, params: &HyperParams<f64>, norm_m: bool, shift: f64, verbose: bool) -> (f64, f64) {
    let (src, tgt) = make_shifted_gaussians::<f64>(seed, 300, 300, 2, 2, shift, 0.0).unwrap();
    let (_, na) = na_baseline(&src, &tgt).unwrap();
    let stacked = stack_rows(src.features(), tgt.features()).unwrap();
    let spec = KernelSpec::Rbf { bandwidth: median_bandwidth(&stacked) };
    let (n_s, n_t) = (src.n(), tgt.n());
    let gram = kernel_matrix(&stacked, &spec, n_s).unwrap();
    let labels = src.labels().unwrap().clone();
    let graph = normalized_laplacian(&build_adjacency::<f64>(&labels, n_t)).unwrap();
    let mut pseudo = nn_classify(
        &src.features().transpose(),
        &labels,
        &tgt.features().transpose(),
    )
    .unwrap();
    let mut acc = 0.0;
    for it in 0..params.iterations {
        let mmd = build_mmd_set::<f64>(&labels, &pseudo, 2).unwrap();
        let m = if norm_m {
            let f = mmd.sum.norm();
            &mmd.sum / f
        } else {
            mmd.sum.clone()
        };
        let (lhs, rhs) =
            assemble_system(&gram.values, &m, &graph.laplacian, &graph.degrees, params).unwrap();
        let jitter = jitter_epsilon(&rhs);
        let sol = generalized_eig_smallest(&lhs, &rhs, params.k, jitter).unwrap();
        let z = project(&gram.values, &sol.vectors).unwrap();
        let z_src: Matrix64 = z.columns(0, n_s).clone_owned();
        let z_tgt: Matrix64 = z.columns(n_s, n_t).clone_owned();
        pseudo = nn_classify(&z_src, &labels, &z_tgt).unwrap();
        acc = accuracy(&pseudo, tgt.labels().unwrap());
        if verbose && it < 3 {
            let mc = mmd_cost(&z, &m).unwrap();
            let ec = embedding_cost(&z, &graph.laplacian).unwrap();
            let fro = sol.vectors.norm_squared();
            println!(
                "  it{it}: acc {:.1}%  a*mmd {:.3e}  b*emb {:.3e}  g*fro {:.3e}  sumlam {:.3e}",
                100.0 * acc,
                params.alpha * mc,
                params.beta * ec,
                params.gamma * fro,
                sol.values.sum()
            );
        }
    }
    (na.unwrap(), acc)
}

#[test]
#[ignore]
fn probe_m_normalization() {
    let base = HyperParams { alpha: 1.0, beta: 1.0, gamma: 1.0, k: 20, iterations: 10 };
    println!("=== raw M, seed 0, cost breakdown ===");
    fit(0, &base, false, 1.5, true);
    println!("=== normalized M, seed 0, cost breakdown ===");
    fit(0, &base, true, 1.5, true);
    for shift in [1.5, 3.0] {
        for norm_m in [false, true] {
            let mut na_m = 0.0;
            let mut net_m = 0.0;
            let mut wins = 0;
            for seed in 0..5 {
                let (na, net) = fit(seed, &base, norm_m, shift, false);
                na_m += na / 5.0;
                net_m += net / 5.0;
                if net > na {
                    wins += 1;
                }
            }
            println!(
                "shift {shift}: norm_m={norm_m}: NA {:.1}%  NET {:.1}%  gain {:+.1}  wins {wins}/5",
                100.0 * na_m,
                100.0 * net_m,
                100.0 * (net_m - na_m)
            );
        }
    }
}
