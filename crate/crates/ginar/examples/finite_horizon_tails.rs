//! Finite-horizon tail transfer without immigration: when the initial
//! sizes are regularly varying, X_n inherits their index and the tail
//! ratio converges to a coefficient built from m_n and m_eta. Three
//! cases, depending on which initial index is smaller.

use ginar::analytics::{mean_structure, predicted_tail_ratio, TailRatioPrediction};
use ginar::process::{ensemble, EnsembleKind};
use ginar::{tail_ratio_curve, DistSpec, ModelParams};

fn main() {
    let ms = mean_structure(0.3, 0.2).unwrap();
    let beta0 = 0.8;
    let heavy = DistSpec::discrete_pareto(beta0, 0.0).unwrap();
    let count = 400_000;
    let level = [1e-3];

    println!("X_0 heavy (index {beta0}), X_-1 = 0: P(X_n > x) ~ m_n^b0 P(X_0 > x)");
    let one_sided = ModelParams {
        xi: DistSpec::bernoulli(0.3).unwrap(),
        eta: DistSpec::bernoulli(0.2).unwrap(),
        eps: DistSpec::constant(0),
        x0: heavy.clone(),
        xm1: DistSpec::constant(0),
    };
    for n in 1..=3u32 {
        let coeff = match predicted_tail_ratio(&ms, n, beta0, f64::INFINITY).unwrap() {
            TailRatioPrediction::InitialDominates { coeff } => coeff,
            other => panic!("unexpected {other:?}"),
        };
        let set = ensemble(EnsembleKind::PathEndpoint { n_steps: n }, &one_sided, count, n as u64).unwrap();
        let rep = tail_ratio_curve(&set, &heavy, &level, coeff).unwrap();
        println!("  n = {n}: observed {:.4}, predicted m_{n}^{beta0} = {coeff:.4}", rep.ratio[0]);
    }

    println!("\nboth initials heavy with equal index: coefficients add");
    let two_sided = ModelParams {
        xm1: heavy.clone(),
        ..one_sided
    };
    for n in 1..=3u32 {
        let coeff = match predicted_tail_ratio(&ms, n, beta0, beta0).unwrap() {
            TailRatioPrediction::EqualIndices { coeff_x0, coeff_xm1 } => coeff_x0 + coeff_xm1,
            other => panic!("unexpected {other:?}"),
        };
        let set =
            ensemble(EnsembleKind::PathEndpoint { n_steps: n }, &two_sided, count, 100 + n as u64)
                .unwrap();
        let rep = tail_ratio_curve(&set, &heavy, &level, coeff).unwrap();
        println!(
            "  n = {n}: observed {:.4}, predicted m_{n}^b + (m_{}, m_eta)^b = {coeff:.4}",
            rep.ratio[0],
            n - 1
        );
    }
}
