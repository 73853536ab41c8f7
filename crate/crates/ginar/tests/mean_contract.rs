//! Ensemble means match the closed-form expectations within 3 standard
//! errors on a set of pinned model configurations.

use ginar::process::{ensemble, EnsembleKind};
use ginar::{DistSpec, ModelParams};

#[test]
fn ensemble_means_match_expectations() {
    let configs: [(ModelParams, u32, u64); 5] = [
        (
            ModelParams {
                xi: DistSpec::bernoulli(0.3).unwrap(),
                eta: DistSpec::bernoulli(0.2).unwrap(),
                eps: DistSpec::poisson(1.0).unwrap(),
                x0: DistSpec::constant(1),
                xm1: DistSpec::constant(0),
            },
            10,
            1,
        ),
        (
            ModelParams {
                xi: DistSpec::geometric(0.7).unwrap(),
                eta: DistSpec::binomial(2, 0.25).unwrap(),
                eps: DistSpec::finite_pmf(vec![0.5, 0.25, 0.25]).unwrap(),
                x0: DistSpec::poisson(2.0).unwrap(),
                xm1: DistSpec::bernoulli(0.5).unwrap(),
            },
            8,
            2,
        ),
        (
            // critical regime
            ModelParams {
                xi: DistSpec::bernoulli(0.5).unwrap(),
                eta: DistSpec::bernoulli(0.5).unwrap(),
                eps: DistSpec::poisson(0.5).unwrap(),
                x0: DistSpec::constant(2),
                xm1: DistSpec::constant(1),
            },
            12,
            3,
        ),
        (
            // supercritical regime
            ModelParams {
                xi: DistSpec::poisson(0.9).unwrap(),
                eta: DistSpec::bernoulli(0.4).unwrap(),
                eps: DistSpec::constant(1),
                x0: DistSpec::constant(1),
                xm1: DistSpec::constant(1),
            },
            8,
            4,
        ),
        (
            // pure immigration noise
            ModelParams {
                xi: DistSpec::constant(0),
                eta: DistSpec::constant(0),
                eps: DistSpec::geometric(0.4).unwrap(),
                x0: DistSpec::constant(0),
                xm1: DistSpec::constant(0),
            },
            6,
            5,
        ),
    ];
    for (model, n_steps, seed) in configs {
        let ms = model.mean_structure().unwrap();
        let expected = ms.expectation(
            n_steps,
            model.x0.mean().as_f64(),
            model.xm1.mean().as_f64(),
            model.eps.mean().as_f64(),
        );
        let set = ensemble(
            EnsembleKind::PathEndpoint { n_steps },
            &model,
            100_000,
            9_900 + seed,
        )
        .unwrap();
        let n = set.draws.len() as f64;
        let mean = set.draws.iter().map(|v| *v as f64).sum::<f64>() / n;
        let var = set.draws.iter().map(|v| (*v as f64 - mean).powi(2)).sum::<f64>() / n;
        let se = (var / n).sqrt().max(1e-12);
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "seed {seed}: mean {mean:.5}, expected {expected:.5}, se {se:.5}"
        );
    }
}
