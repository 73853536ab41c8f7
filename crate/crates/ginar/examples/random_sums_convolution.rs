//! Two building blocks of the tail analysis: sums of independent heavy
//! tails (the convolution case split) and random sums over a regularly
//! varying number of light summands, whose tail picks up the factor
//! (E zeta)^beta.

use ginar::dists::DistSpec;
use ginar::tailstats::{convolution_check, random_sum_check};

fn main() {
    println!("convolution of independent tails, exact computation:");
    let heavy = DistSpec::discrete_pareto(0.8, 0.0).unwrap();

    let report = convolution_check(&heavy, &heavy, &[1e-3, 1e-4]).unwrap();
    for i in 0..report.x_grid.len() {
        let single = heavy.exact_tail(report.x_grid[i]);
        println!(
            "  equal indices, level {:5}: sum-tail / single-tail = {:.4} (-> 2)",
            report.levels[i],
            report.empirical_tail[i] / single
        );
    }

    let light = DistSpec::poisson(1.0).unwrap();
    let report = convolution_check(&heavy, &light, &[1e-4]).unwrap();
    println!(
        "  heavy + light,   level 1e-4: sum-tail / heavy-tail  = {:.4} (-> 1)",
        report.ratio[0]
    );

    println!("\nrandom sums over a heavy-tailed count (index 0.8):");
    let tau = DistSpec::discrete_pareto(0.8, 0.0).unwrap();
    for (zeta, label) in [
        (DistSpec::bernoulli(0.5).unwrap(), "Bernoulli(0.5)"),
        (DistSpec::constant(2), "Constant(2)"),
        (DistSpec::poisson(3.0).unwrap(), "Poisson(3)"),
    ] {
        let report = random_sum_check(&tau, &zeta, &[1e-3], 300_000, 17).unwrap();
        println!(
            "  zeta = {label:15}: tail ratio {:.4}, predicted (E zeta)^0.8 = {:.4}",
            report.ratio[0], report.predicted_limit
        );
    }
}
