// scratch probe, deleted before finishing
use net_core::data::make_shifted_gaussians;
use net_core::kernel::KernelSpec;
use net_core::net::{na_baseline, net_fit, HyperParams};

#[test]
#[ignore]
fn probe_adaptation_gain() {
    let params = HyperParams::<f64> {
        alpha: 1.0,
        beta: 1.0,
        gamma: 1.0,
        k: 20,
        iterations: 10,
    };
    let mut wins = 0;
    let mut gains = Vec::new();
    for seed in 0..10u64 {
        let (src, tgt) = make_shifted_gaussians::<f64>(seed, 300, 300, 2, 2, 1.5, 0.0).unwrap();
        let (_, na_acc) = na_baseline(&src, &tgt).unwrap();
        let na_acc = na_acc.unwrap();
        let spec = KernelSpec::rbf_median(&net_core::kernel::stack_rows(src.features(), tgt.features()).unwrap());
        let t0 = std::time::Instant::now();
        let model = net_fit(&src, &tgt, &spec, &params).unwrap();
        let net_acc = model.final_target_accuracy().unwrap();
        let gain = 100.0 * (net_acc - na_acc);
        println!(
            "seed {seed}: NA {:.2}%  NET {:.2}%  gain {gain:+.2} pts  ({:?})  iter0 {:.2}%",
            100.0 * na_acc,
            100.0 * net_acc,
            t0.elapsed(),
            100.0 * model.history[0].target_accuracy.unwrap()
        );
        if net_acc > na_acc {
            wins += 1;
        }
        gains.push(gain);
    }
    let mean: f64 = gains.iter().sum::<f64>() / gains.len() as f64;
    println!("wins {wins}/10, mean gain {mean:+.2} pts");
}
