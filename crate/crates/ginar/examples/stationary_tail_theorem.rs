//! Desk-scale check of the stationary tail law: with regularly varying
//! immigration of index alpha in (0, 2) and a subcritical primitive mean
//! matrix, the stationary marginal satisfies
//!
//! ```text
//! P(pi > x)  ~  (sum_{i>=0} m_i^alpha) P(eps > x),   x -> inf.
//! ```
//!
//! The constant is evaluated by certified truncation and the law checked
//! against an ensemble of truncated stationary draws.

use ginar::analytics::stationary_tail_constant;
use ginar::process::{ensemble, EnsembleKind};
use ginar::{tail_ratio_curve, DistSpec, ModelParams};

fn main() {
    let alpha = 0.8;
    let model = ModelParams {
        xi: DistSpec::bernoulli(0.3).unwrap(),
        eta: DistSpec::bernoulli(0.2).unwrap(),
        eps: DistSpec::discrete_pareto(alpha, 0.0).unwrap(),
        x0: DistSpec::constant(0),
        xm1: DistSpec::constant(0),
    };
    let ms = model.mean_structure().unwrap();
    let (constant, terms) = stationary_tail_constant(&ms, alpha, 1e-10).unwrap();
    println!("immigration tail index alpha = {alpha}");
    println!("tail constant sum m_i^alpha = {constant:.6} ({terms} terms)\n");

    let count = 200_000;
    let set = ensemble(EnsembleKind::Stationary { tol: 1e-6 }, &model, count, 2024).unwrap();
    let report = tail_ratio_curve(&set, &model.eps, &[0.1, 0.01, 0.001], constant).unwrap();
    println!("{count} stationary draws, truncation N = {}:", set.meta.truncation.unwrap());
    println!("  level |       x | empirical/eps-tail | predicted");
    for i in 0..report.x_grid.len() {
        println!(
            "  {:5} | {:7.0} | {:18.4} | {:.4}{}",
            report.levels[i],
            report.x_grid[i],
            report.ratio[i],
            constant,
            if report.unreliable[i] { "  (unreliable)" } else { "" }
        );
    }
    println!("\nratios drift toward the constant as the level deepens;");
    println!("finite-x bias shrinks like the immigration tail itself.");
}
