//! Temporary diagnostics; not part of the suite.

use minar::em::{fit, FitConfig};
use minar::mixtures::Family;
use minar::process::simulate;
use minar::scenarios::Scenario;
use minar::study::replication_seed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
#[ignore]
fn truth_init_gl_all50() {
    let sc = Scenario::parse("A2B1C1").unwrap();
    let family = Family::GeometricLogitnormal;
    let truth = sc.model_params(family).unwrap();
    let tsig = truth.innovations().sigma().clone();
    let mut sums = [0.0f64; 6];
    for rep in 0..50 {
        let seed = replication_seed(2026, "A2B1C1", family, 300, rep);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let series = simulate(&truth, 300, 500, &mut rng).unwrap();
        let max_count = (0..series.len())
            .flat_map(|t| series.row(t).iter().copied())
            .max()
            .unwrap();
        let report = fit(
            &series,
            family,
            &FitConfig {
                quad_nodes: 10,
                tol: 1e-6,
                max_iter: 3000,
                init: Some(truth.clone()),
            },
        )
        .unwrap();
        let esig = report.params.innovations().sigma().clone();
        let mut devs = [0.0f64; 6];
        let mut k = 0;
        for s in 0..3 {
            for u in s..3 {
                devs[k] = esig.get(s, u) - tsig.get(s, u);
                sums[k] += devs[k];
                k += 1;
            }
        }
        println!(
            "rep {rep:2}: iters {:4} maxc {max_count:2} ll {:9.2} devs \
             ({:+.3},{:+.3},{:+.3},{:+.3},{:+.3},{:+.3})",
            report.iterations, report.loglik,
            devs[0], devs[1], devs[2], devs[3], devs[4], devs[5]
        );
    }
    let m: Vec<String> = sums.iter().map(|s| format!("{:+.4}", s / 50.0)).collect();
    println!("mean devs over 50: {}", m.join(","));
}
