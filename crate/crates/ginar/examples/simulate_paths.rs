//! Simulate a handful of trajectories of the second-order branching
//! recursion with immigration and print them side by side.

use ginar::{simulate_path, DistSpec, ModelParams};

fn main() {
    let model = ModelParams {
        xi: DistSpec::bernoulli(0.3).unwrap(),
        eta: DistSpec::bernoulli(0.2).unwrap(),
        eps: DistSpec::poisson(1.0).unwrap(),
        x0: DistSpec::poisson(2.0).unwrap(),
        xm1: DistSpec::constant(0),
    };
    let ms = model.mean_structure().unwrap();
    println!(
        "model: subcritical second-order branching, rho = {:.6} ({})",
        ms.rho, ms.class
    );
    println!("stationary mean: {:.4}\n", ms.stationary_mean(1.0).unwrap());

    let n_steps = 15;
    let paths: Vec<_> = (0..4).map(|seed| simulate_path(&model, n_steps, seed)).collect();
    println!("   n | seed 0 | seed 1 | seed 2 | seed 3 | E(X_n)");
    for n in -1..=n_steps as i64 {
        let expected = if n < 0 {
            0.0
        } else {
            ms.expectation(n as u32, 2.0, 0.0, 1.0)
        };
        print!("{n:4} |");
        for p in &paths {
            print!(" {:6} |", p.get(n));
        }
        println!(" {expected:.3}");
    }
    println!("\nsame seed reproduces the same path:");
    let again = simulate_path(&model, n_steps, 0);
    println!(
        "  seed 0 rerun equals first run: {}",
        again == paths[0]
    );
}
