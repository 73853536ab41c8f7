//! Deterministic regular-variation machinery: Karamata integral ratios,
//! Potter sandwich thresholds, and the slowly varying integer floor
//! construction for a vanishing positive function.

use ginar::dists::{construct_slowly_varying, DistSpec, TabulatedFn};
use ginar::tailstats::{karamata_check, karamata_check_upper, potter_check};

fn main() {
    println!("Karamata, direct form (alpha < 1): x T(x) / int_0^x T -> 1 - alpha");
    for alpha in [0.5, 0.8] {
        let spec = DistSpec::discrete_pareto(alpha, 0.0).unwrap();
        let pts = karamata_check(&spec, &[1e3, 1e4, 1e5, 1e6]).unwrap();
        print!("  alpha = {alpha}: ");
        for p in &pts {
            print!("{:.5} ", p.ratio);
        }
        println!("-> {:.1}", 1.0 - alpha);
    }

    println!("\nKaramata, reciprocal form (alpha > 1): x T(x) / int_x^inf T -> alpha - 1");
    let spec = DistSpec::discrete_pareto(1.5, 0.0).unwrap();
    let pts = karamata_check_upper(&spec, &[1e3, 1e4, 1e5, 1e6]).unwrap();
    print!("  alpha = 1.5: ");
    for p in &pts {
        print!("{:.5} ", p.ratio);
    }
    println!("-> 0.5");

    println!("\nPotter sandwich thresholds (delta = 0.1, q in {{2, 5, 10}}):");
    for beta in [0.0, 1.0, 2.0] {
        let spec = DistSpec::discrete_pareto(1.0, beta).unwrap();
        let report = potter_check(&spec, 0.1, &[2.0, 5.0, 10.0], 1e7).unwrap();
        println!(
            "  log factor beta = {beta}: x0 = {:9.1} ({} violations below, none beyond)",
            report.x0, report.violations_before
        );
    }

    println!("\nslowly varying floor for h(y) = y^(-1/2):");
    let mut xs = Vec::new();
    let mut x = 1e-4f64;
    while x <= 1e8 {
        xs.push(x);
        x *= 1.001;
    }
    let hs: Vec<f64> = xs.iter().map(|y| y.powf(-0.5)).collect();
    let tab = TabulatedFn::new(xs, hs).unwrap();
    let floor = construct_slowly_varying(&tab, 8, false).unwrap();
    println!("  level k+1 holds on (x_k-1, x_k] with breakpoints:");
    for (k, b) in floor.breakpoints().iter().enumerate() {
        println!("    x_{k} = {b:.4}");
    }
    for probe in [0.5, 1.5, 20.0, 1e5] {
        println!("  L({probe}) = {}, L*h = {:.4}", floor.eval(probe), floor.eval(probe) * probe.powf(-0.5));
    }
}
