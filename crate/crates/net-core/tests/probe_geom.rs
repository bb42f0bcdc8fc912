// scratch probe, deleted before finishing
use nalgebra::DMatrix;
use net_core::data::LabeledDomain;
use net_core::kernel::{median_bandwidth, stack_rows, KernelSpec};
use net_core::net::{na_baseline, net_fit, HyperParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gen(
    seed: u64,
    n: usize,
    sep: f64,
    shift: [f64; 2],
) -> (LabeledDomain<f64>, LabeledDomain<f64>) {
    let means = [[sep / 2.0, 0.0], [-sep / 2.0, 0.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = |mu: &[[f64; 2]; 2], delta: [f64; 2]| {
        let mut f = DMatrix::zeros(n, 2);
        let mut labels = Vec::new();
        for c in 0..2 {
            for i in 0..n / 2 {
                let row = c * (n / 2) + i;
                for j in 0..2 {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    f[(row, j)] = mu[c][j] + delta[j] + e;
                }
                labels.push(c + 1);
            }
        }
        LabeledDomain::new(f, Some(labels), "g").unwrap()
    };
    let src = sample(&means, [0.0, 0.0]);
    let tgt = sample(&means, shift);
    (src, tgt)
}

#[test]
#[ignore]
fn probe_geometry() {
    let dirs: Vec<(&str, [f64; 2])> = vec![
        ("para", [1.5, 0.0]),
        ("perp", [0.0, 1.5]),
        ("diag", [1.5 / 2f64.sqrt(), 1.5 / 2f64.sqrt()]),
    ];
    for sep in [2.0, 3.0, 4.0] {
        for (dname, delta) in &dirs {
            for bw_scale in [0.25, 0.5, 1.0] {
                let mut na_sum = 0.0;
                let mut net_sum = 0.0;
                for seed in 0..3u64 {
                    let (src, tgt) = gen(seed, 300, sep, *delta);
                    let (_, na) = na_baseline(&src, &tgt).unwrap();
                    let stacked = stack_rows(src.features(), tgt.features()).unwrap();
                    let bw = median_bandwidth(&stacked) * bw_scale;
                    let spec = KernelSpec::Rbf { bandwidth: bw };
                    let params = HyperParams { alpha: 1.0, beta: 1.0, gamma: 1.0, k: 20, iterations: 10 };
                    let m = net_fit(&src, &tgt, &spec, &params).unwrap();
                    na_sum += na.unwrap();
                    net_sum += m.final_target_accuracy().unwrap();
                }
                println!(
                    "sep {sep:.1} {dname} bw x{bw_scale:.2}: NA {:.1}%  NET {:.1}%  gain {:+.1}",
                    100.0 * na_sum / 3.0,
                    100.0 * net_sum / 3.0,
                    100.0 * (net_sum - na_sum) / 3.0
                );
            }
        }
    }
}
