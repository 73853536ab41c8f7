//! The first-order special case: with no age-2 reproduction the process
//! is the classical single-type branching recursion with immigration,
//! and the stationary tail constant collapses to the geometric series
//! 1 / (1 - m_xi^alpha).

use ginar::analytics::first_order_constant;
use ginar::process::{ensemble, EnsembleKind};
use ginar::{tail_ratio_curve, DistSpec, ModelParams};

fn main() {
    let alpha = 1.0;
    let model = ModelParams {
        xi: DistSpec::bernoulli(0.5).unwrap(),
        eta: DistSpec::constant(0), // first-order case
        eps: DistSpec::discrete_pareto(alpha, 0.0).unwrap(),
        x0: DistSpec::constant(0),
        xm1: DistSpec::constant(0),
    };
    let constant = first_order_constant(0.5, alpha).unwrap();
    println!("m_xi = 0.5, eta = 0, alpha = {alpha}: constant 1/(1 - 0.5^{alpha}) = {constant}");
    println!("(the immigration mean is infinite here; draws are still finite)\n");

    let count = 300_000;
    let set = ensemble(EnsembleKind::Stationary { tol: 1e-6 }, &model, count, 99).unwrap();
    let report = tail_ratio_curve(&set, &model.eps, &[0.01, 0.001], constant).unwrap();
    for i in 0..report.x_grid.len() {
        println!(
            "level {:5}: x = {:6.0}, stationary tail / eps tail = {:.4}  (predicted {constant})",
            report.levels[i], report.x_grid[i], report.ratio[i]
        );
    }
}
