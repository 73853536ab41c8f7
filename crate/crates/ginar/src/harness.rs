//! Config-driven experiment harness: reproducible simulation runs,
//! analytics reports, tail diagnostics, and named verification suites
//! with machine-readable outcomes.
//!
//! Every run is a pure function of the effective config: artifacts are
//! written atomically (temp file + rename), a manifest records the config
//! fingerprint and seed, and reruns of the same config produce
//! byte-identical CSV bodies regardless of the worker count.

use crate::analytics::{
    first_order_constant, second_moment_bound, stationary_tail_constant, variance_xn,
    AnalyticsError, Criticality,
};
use crate::dists::{construct_slowly_varying, DistSpec, TabulatedFn};
use crate::process::{
    ensemble, simulate_path, simulate_two_type, EnsembleKind, ModelParams, ProcessError,
};
use crate::tailstats::{
    convolution_check, hill, karamata_check, large_dev_check, potter_check, random_sum_check,
    tail_ratio_curve, TailError,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Tail(#[from] TailError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Simulate,
    Stationary,
    Analytics,
    Tails,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Moments,
    Embedding,
    Additive,
    StationaryTail,
    RegularVariation,
    LargeDeviations,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| format!("unknown suite '{s}'"))
    }
}

/// One experiment: a model, an action, and the action's knobs. Unknown
/// fields are rejected at parse time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_steps: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.model
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(HarnessError::Config("tol must lie in (0, 1)".into()));
            }
        }
        if let Some(levels) = &self.levels {
            if levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
                return Err(HarnessError::Config("levels must lie in (0, 1)".into()));
            }
        }
        match self.action {
            Action::Simulate => {
                if self.n_steps.is_none() {
                    return Err(HarnessError::Config("simulate requires n_steps".into()));
                }
            }
            Action::Verify => {
                if self.suite.is_none() {
                    return Err(HarnessError::Config("verify requires a suite".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        for b in json.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn levels_or_default(&self) -> Vec<f64> {
        self.levels.clone().unwrap_or_else(|| vec![0.1, 0.01, 0.001])
    }

    fn mc_or(&self, default: u64) -> u64 {
        self.mc_count.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Unreliable,
}

/// Result of one verification check. The status is derived mechanically:
/// unreliable when the estimate cannot resolve the question, otherwise
/// pass exactly when |observed - predicted| <= tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationOutcome {
    pub check: String,
    pub status: Status,
    pub observed: f64,
    pub predicted: f64,
    pub tolerance: f64,
    pub runtime_secs: f64,
}

impl VerificationOutcome {
    pub fn evaluate(
        check: impl Into<String>,
        observed: f64,
        predicted: f64,
        tolerance: f64,
        reliable: bool,
        started: Instant,
    ) -> Self {
        let status = if !reliable {
            Status::Unreliable
        } else if (observed - predicted).abs() <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        VerificationOutcome {
            check: check.into(),
            status,
            observed,
            predicted,
            tolerance,
            runtime_secs: started.elapsed().as_secs_f64(),
        }
    }
}

/// Exit-code contract: 0 all pass, 3 any failure, 4 unreliable-only.
/// (Config errors exit 2; the binary maps them before reaching here.)
pub fn exit_code(outcomes: &[VerificationOutcome]) -> i32 {
    if outcomes.iter().any(|o| o.status == Status::Fail) {
        3
    } else if outcomes.iter().any(|o| o.status == Status::Unreliable) {
        4
    } else {
        0
    }
}

pub struct RunOutput {
    pub outcomes: Vec<VerificationOutcome>,
    pub artifacts: Vec<PathBuf>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a> {
    config_hash: String,
    seed: u64,
    crate_version: &'a str,
    config: &'a ExperimentConfig,
}

/// Executes a config: writes the artifacts and manifest into
/// `output_dir`, returning the outcome list (empty for non-verify
/// actions that produced data artifacts only).
pub fn run(config: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    let manifest = Manifest {
        config_hash: config.fingerprint(),
        seed: config.seed,
        crate_version: env!("CARGO_PKG_VERSION"),
        config,
    };
    let mut artifacts = Vec::new();
    let manifest_path = config.output_dir.join("manifest.json");
    write_atomic(
        &manifest_path,
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;
    artifacts.push(manifest_path);

    let outcomes = match config.action {
        Action::Simulate => {
            run_simulate(config, &mut artifacts)?;
            Vec::new()
        }
        Action::Stationary => {
            run_stationary(config, &mut artifacts)?;
            Vec::new()
        }
        Action::Analytics => {
            run_analytics(config, &mut artifacts)?;
            Vec::new()
        }
        Action::Tails => {
            run_tails(config, &mut artifacts)?;
            Vec::new()
        }
        Action::Verify => {
            let suite = config.suite.expect("validated");
            let outcomes = verify(suite, config)?;
            let path = config.output_dir.join("verify.json");
            write_atomic(&path, serde_json::to_string_pretty(&outcomes)?.as_bytes())?;
            artifacts.push(path);
            outcomes
        }
    };
    Ok(RunOutput { outcomes, artifacts })
}

fn run_simulate(config: &ExperimentConfig, artifacts: &mut Vec<PathBuf>) -> Result<(), HarnessError> {
    let n_steps = config.n_steps.expect("validated");
    let count = config.path_count.unwrap_or(1);
    let mut csv = Vec::new();
    csv.extend_from_slice(b"path,n,value\n");
    for p in 0..count {
        // Distinct paths use seed offsets through the ensemble child
        // convention: one master seed, one sub-stream per path index.
        let path = simulate_path(&config.model, n_steps, config.seed.wrapping_add(p));
        for (n, v) in path.iter() {
            writeln!(&mut csv, "{p},{n},{v}").expect("vec write");
        }
    }
    let path = config.output_dir.join("paths.csv");
    write_atomic(&path, &csv)?;
    artifacts.push(path);
    Ok(())
}

fn export_sample_set(
    set: &crate::process::SampleSet,
    dir: &Path,
    stem: &str,
    artifacts: &mut Vec<PathBuf>,
) -> Result<(), HarnessError> {
    let mut csv = Vec::new();
    set.write_csv(&mut csv).expect("vec write");
    let csv_path = dir.join(format!("{stem}.csv"));
    write_atomic(&csv_path, &csv)?;
    artifacts.push(csv_path);
    let meta_path = dir.join(format!("{stem}.meta.json"));
    write_atomic(&meta_path, set.meta_json().as_bytes())?;
    artifacts.push(meta_path);
    Ok(())
}

fn run_stationary(
    config: &ExperimentConfig,
    artifacts: &mut Vec<PathBuf>,
) -> Result<(), HarnessError> {
    let count = config.path_count.unwrap_or_else(|| config.mc_or(100_000));
    let tol = config.tol_or(1e-6);
    let set = ensemble(
        EnsembleKind::Stationary { tol },
        &config.model,
        count,
        config.seed,
    )?;
    export_sample_set(&set, &config.output_dir, "samples", artifacts)
}

#[derive(Serialize)]
struct AnalyticsReport {
    model: ModelParams,
    m_xi: f64,
    m_eta: f64,
    m_eps: crate::dists::ExtReal,
    lambda_plus: f64,
    lambda_minus: f64,
    rho: f64,
    class: Criticality,
    primitive: bool,
    m_seq: Vec<f64>,
    expectation_horizon: u32,
    expectation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stationary_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variance: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    second_moment_bounds: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_constant_terms: Option<u32>,
    tol: f64,
}

fn run_analytics(
    config: &ExperimentConfig,
    artifacts: &mut Vec<PathBuf>,
) -> Result<(), HarnessError> {
    let ms = config.model.mean_structure()?;
    let horizon = config.n_steps.unwrap_or(40);
    let ex0 = config
        .model
        .x0
        .mean()
        .finite()
        .ok_or_else(|| HarnessError::Config("analytics needs E(X_0) finite".into()))?;
    let exm1 = config
        .model
        .xm1
        .mean()
        .finite()
        .ok_or_else(|| HarnessError::Config("analytics needs E(X_-1) finite".into()))?;
    let m_eps = config.model.eps.mean();
    let tol = config.tol_or(1e-10);

    let var_xi = config.model.xi.moment(2.0).finite().map(|m2| m2 - ms.m_xi * ms.m_xi);
    let var_eta = config.model.eta.moment(2.0).finite().map(|m2| m2 - ms.m_eta * ms.m_eta);
    let (variance, bounds) = match (var_xi, var_eta) {
        (Some(vx), Some(ve)) if ms.rho > 0.0 => {
            let v: Vec<f64> = (1..=horizon.min(30)).map(|n| variance_xn(&ms, vx, ve, n)).collect();
            let b: Vec<f64> = (1..=horizon.min(30))
                .map(|n| second_moment_bound(&ms, vx, ve, n).expect("rho > 0"))
                .collect();
            (Some(v), Some(b))
        }
        _ => (None, None),
    };

    let tail = match config.model.eps.tail_index() {
        Some(alpha) if alpha < 2.0 => stationary_tail_constant(&ms, alpha, tol).ok(),
        _ => None,
    };
    let report = AnalyticsReport {
        model: config.model.clone(),
        m_xi: ms.m_xi,
        m_eta: ms.m_eta,
        m_eps,
        lambda_plus: ms.lambda_plus,
        lambda_minus: ms.lambda_minus,
        rho: ms.rho,
        class: ms.class,
        primitive: ms.primitive,
        m_seq: (0..=20.min(horizon)).map(|k| ms.m_seq(k)).collect(),
        expectation_horizon: horizon,
        expectation: ms.expectation(horizon, ex0, exm1, m_eps.finite().unwrap_or(f64::NAN)),
        stationary_mean: m_eps
            .finite()
            .and_then(|me| ms.stationary_mean(me).ok()),
        variance,
        second_moment_bounds: bounds,
        tail_constant: tail.map(|t| t.0),
        tail_constant_terms: tail.map(|t| t.1),
        tol,
    };
    let path = config.output_dir.join("analytics.json");
    write_atomic(&path, serde_json::to_string_pretty(&report)?.as_bytes())?;
    artifacts.push(path);
    Ok(())
}

/// Predicted stationary-tail limit for the configured model: the
/// second-order constant when both offspring means are positive, the
/// geometric first-order constant when the age-2 channel is absent.
fn predicted_stationary_limit(
    model: &ModelParams,
    alpha: f64,
    tol: f64,
) -> Result<f64, HarnessError> {
    let ms = model.mean_structure()?;
    if ms.m_eta == 0.0 {
        Ok(first_order_constant(ms.m_xi, alpha)?)
    } else {
        Ok(stationary_tail_constant(&ms, alpha, tol)?.0)
    }
}

fn run_tails(config: &ExperimentConfig, artifacts: &mut Vec<PathBuf>) -> Result<(), HarnessError> {
    let alpha = config.model.eps.tail_index().ok_or_else(|| {
        HarnessError::Config("tails requires regularly varying immigration".into())
    })?;
    let tol = config.tol_or(1e-6);
    let count = config.mc_or(1_000_000);
    let levels = config.levels_or_default();
    let predicted = predicted_stationary_limit(&config.model, alpha, tol.min(1e-8))?;
    let set = ensemble(
        EnsembleKind::Stationary { tol },
        &config.model,
        count,
        config.seed,
    )?;
    let report = tail_ratio_curve(&set, &config.model.eps, &levels, predicted)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).expect("vec write");
    let csv_path = config.output_dir.join("tails.csv");
    write_atomic(&csv_path, &csv)?;
    artifacts.push(csv_path);

    let summary_path = config.output_dir.join("tails_summary.json");
    write_atomic(&summary_path, report.summary_json(0.2).as_bytes())?;
    artifacts.push(summary_path);

    if let Ok(est) = hill(&set, (count as f64).sqrt() as usize) {
        let hill_path = config.output_dir.join("hill.json");
        write_atomic(&hill_path, serde_json::to_string_pretty(&est)?.as_bytes())?;
        artifacts.push(hill_path);
    }
    Ok(())
}

/// Runs one named verification suite against the configured model at the
/// configured scale.
pub fn verify(suite: Suite, config: &ExperimentConfig) -> Result<Vec<VerificationOutcome>, HarnessError> {
    match suite {
        Suite::Moments => verify_moments(config),
        Suite::Embedding => verify_embedding(config),
        Suite::Additive => verify_additive(config),
        Suite::StationaryTail => verify_stationary_tail(config),
        Suite::RegularVariation => verify_regular_variation(config),
        Suite::LargeDeviations => verify_large_deviations(config),
    }
}

fn mean_and_se(draws: &[u64]) -> (f64, f64) {
    let n = draws.len() as f64;
    let mean = draws.iter().map(|v| *v as f64).sum::<f64>() / n;
    let var = draws.iter().map(|v| (*v as f64 - mean).powi(2)).sum::<f64>() / n;
    (mean, (var / n).sqrt())
}

fn verify_moments(config: &ExperimentConfig) -> Result<Vec<VerificationOutcome>, HarnessError> {
    let mut out = Vec::new();
    let ms = config.model.mean_structure()?;

    // m_k closed form against the linear recursion.
    let t = Instant::now();
    let mut max_dev = 0.0f64;
    let (mut prev, mut prev2) = (1.0f64, 0.0f64);
    for k in 1..=100u32 {
        let next = ms.m_xi * prev + ms.m_eta * prev2;
        let scale = next.abs().max(1.0);
        max_dev = max_dev.max((ms.m_seq(k) - next).abs() / scale);
        prev2 = prev;
        prev = next;
    }
    out.push(VerificationOutcome::evaluate(
        "m_seq closed form vs recursion",
        max_dev,
        0.0,
        1e-12,
        true,
        t,
    ));

    // Matrix powers against naive multiplication.
    let t = Instant::now();
    let mul = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        let mut c = [[0.0f64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    };
    let mut naive = [[1.0, 0.0], [0.0, 1.0]];
    let m1 = [[ms.m_xi, ms.m_eta], [1.0, 0.0]];
    let mut max_dev = 0.0f64;
    for n in 1..=50u32 {
        naive = mul(naive, m1);
        let closed = ms.matrix_power(n);
        for i in 0..2 {
            for j in 0..2 {
                let scale = naive[i][j].abs().max(1.0);
                max_dev = max_dev.max((closed[i][j] - naive[i][j]).abs() / scale);
            }
        }
    }
    out.push(VerificationOutcome::evaluate(
        "matrix power vs naive multiplication",
        max_dev,
        0.0,
        1e-12,
        true,
        t,
    ));

    // Expectation against the scalar recursion, with the model's means.
    let t = Instant::now();
    let ex0 = config.model.x0.mean().as_f64();
    let exm1 = config.model.xm1.mean().as_f64();
    let m_eps = config.model.eps.mean().as_f64();
    let reliable = ex0.is_finite() && exm1.is_finite() && m_eps.is_finite();
    let mut max_dev = 0.0f64;
    if reliable {
        let (mut prev2, mut prev) = (exm1, ex0);
        for n in 1..=50u32 {
            let next = ms.m_xi * prev + ms.m_eta * prev2 + m_eps;
            let scale = next.abs().max(1.0);
            max_dev = max_dev.max((ms.expectation(n, ex0, exm1, m_eps) - next).abs() / scale);
            prev2 = prev;
            prev = next;
        }
    }
    out.push(VerificationOutcome::evaluate(
        "expectation vs scalar recursion",
        max_dev,
        0.0,
        1e-12,
        reliable,
        t,
    ));

    // Eigenvalue identities.
    let t = Instant::now();
    let dev = (ms.lambda_plus + ms.lambda_minus - ms.m_xi)
        .abs()
        .max((ms.lambda_plus * ms.lambda_minus + ms.m_eta).abs());
    out.push(VerificationOutcome::evaluate(
        "eigenvalue sum/product identities",
        dev,
        0.0,
        1e-12,
        true,
        t,
    ));

    // Second-moment bound dominates variance + mean^2 (model variances).
    let t = Instant::now();
    let var_xi = config.model.xi.moment(2.0).finite().map(|m2| m2 - ms.m_xi * ms.m_xi);
    let var_eta = config.model.eta.moment(2.0).finite().map(|m2| m2 - ms.m_eta * ms.m_eta);
    match (var_xi, var_eta) {
        (Some(vx), Some(ve)) if ms.rho > 0.0 => {
            let mut worst = 0.0f64;
            for n in 1..=30u32 {
                let second = variance_xn(&ms, vx, ve, n) + ms.m_seq(n).powi(2);
                let bound = second_moment_bound(&ms, vx, ve, n)?;
                worst = worst.max((second - bound) / bound.max(1e-300));
            }
            out.push(VerificationOutcome::evaluate(
                "variance + mean^2 within second-moment bound",
                worst.max(0.0),
                0.0,
                1e-12,
                true,
                t,
            ));
        }
        _ => out.push(VerificationOutcome::evaluate(
            "variance + mean^2 within second-moment bound",
            f64::NAN,
            0.0,
            1e-12,
            false,
            t,
        )),
    }

    // Monte Carlo endpoint mean against the exact expectation.
    let t = Instant::now();
    if reliable {
        let n_steps = config.n_steps.unwrap_or(10);
        let count = config.mc_or(100_000);
        let set = ensemble(
            EnsembleKind::PathEndpoint { n_steps },
            &config.model,
            count,
            config.seed,
        )?;
        let (mean, se) = mean_and_se(&set.draws);
        let expected = ms.expectation(n_steps, ex0, exm1, m_eps);
        let z = if se > 0.0 {
            (mean - expected).abs() / se
        } else if (mean - expected).abs() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        out.push(VerificationOutcome::evaluate(
            format!("Monte Carlo mean of X_{n_steps} (z-score)"),
            z,
            0.0,
            3.0,
            true,
            t,
        ));
    }
    Ok(out)
}

fn verify_embedding(config: &ExperimentConfig) -> Result<Vec<VerificationOutcome>, HarnessError> {
    let t = Instant::now();
    let steps = config.n_steps.unwrap_or(50);
    let seeds = config.mc_or(100);
    let mut mismatches = 0u64;
    for seed in 0..seeds {
        let x = simulate_path(&config.model, steps, seed.wrapping_add(config.seed));
        let y = simulate_two_type(&config.model, steps, seed.wrapping_add(config.seed));
        for n in 0..=steps as i64 {
            if y.vectors[n as usize] != (x.get(n), x.get(n - 1)) {
                mismatches += 1;
            }
        }
    }
    Ok(vec![VerificationOutcome::evaluate(
        format!("pathwise embedding equality over {seeds} seeds"),
        mismatches as f64,
        0.0,
        0.0,
        true,
        t,
    )])
}

/// Exact pmf of X_n by joint propagation of (X_{n-1}, X_{n-2}) for
/// small-support laws; used as the brute-force oracle for the additive
/// property.
pub fn enumerate_recursion_pmf(params: &ModelParams, n: u32) -> Vec<f64> {
    let pmf_of = |spec: &DistSpec| -> Vec<f64> {
        let mut v = Vec::new();
        let mut k = 0u64;
        loop {
            let p = spec.pmf(k);
            let tail = spec.exact_tail(k as f64);
            v.push(p);
            if tail < 1e-15 {
                break;
            }
            k += 1;
            assert!(k < 10_000, "enumeration support too large");
        }
        v
    };
    let conv = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0.0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        c
    };
    let conv_pow = |p: &[f64], k: usize| -> Vec<f64> {
        let mut acc = vec![1.0];
        for _ in 0..k {
            acc = conv(&acc, p);
        }
        acc
    };
    let xi = pmf_of(&params.xi);
    let eta = pmf_of(&params.eta);
    let eps = pmf_of(&params.eps);

    // joint[(a, b)] = P(X_t = a, X_{t-1} = b)
    let x0 = pmf_of(&params.x0);
    let xm1 = pmf_of(&params.xm1);
    let mut joint = std::collections::HashMap::new();
    for (a, pa) in x0.iter().enumerate() {
        for (b, pb) in xm1.iter().enumerate() {
            if pa * pb > 0.0 {
                *joint.entry((a, b)).or_insert(0.0) += pa * pb;
            }
        }
    }
    for _ in 0..n {
        let mut next = std::collections::HashMap::new();
        for ((a, b), p) in &joint {
            let step_pmf = conv(&conv(&conv_pow(&xi, *a), &conv_pow(&eta, *b)), &eps);
            for (v, q) in step_pmf.iter().enumerate() {
                if p * q > 0.0 {
                    *next.entry((v, *a)).or_insert(0.0) += p * q;
                }
            }
        }
        joint = next;
    }
    let max_v = joint.keys().map(|(a, _)| *a).max().unwrap_or(0);
    let mut out = vec![0.0; max_v + 1];
    for ((a, _), p) in joint {
        out[a] += p;
    }
    out
}

/// Exact pmf of the additive representation at horizon n: mixture over
/// the initial sizes of convolution powers of the descendant laws.
pub fn enumerate_additive_pmf(params: &ModelParams, n: u32) -> Vec<f64> {
    let one_zero = ModelParams {
        x0: DistSpec::constant(1),
        xm1: DistSpec::constant(0),
        eps: DistSpec::constant(0),
        ..params.clone()
    };
    let zero_one = ModelParams {
        x0: DistSpec::constant(0),
        xm1: DistSpec::constant(1),
        eps: DistSpec::constant(0),
        ..params.clone()
    };
    let v_n0 = enumerate_recursion_pmf(&one_zero, n);
    let v_nm1 = enumerate_recursion_pmf(&zero_one, n);

    let conv = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0.0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        c
    };
    let mixture = |init: &DistSpec, part: &[f64]| -> Vec<f64> {
        let mut acc = vec![0.0];
        let mut power = vec![1.0];
        let mut k = 0u64;
        loop {
            let p = init.pmf(k);
            if p > 0.0 {
                if acc.len() < power.len() {
                    acc.resize(power.len(), 0.0);
                }
                for (i, q) in power.iter().enumerate() {
                    acc[i] += p * q;
                }
            }
            if init.exact_tail(k as f64) < 1e-15 {
                break;
            }
            power = conv(&power, part);
            k += 1;
            assert!(k < 256, "initial support too large");
        }
        acc
    };
    conv(&mixture(&params.x0, &v_n0), &mixture(&params.xm1, &v_nm1))
}

fn verify_additive(config: &ExperimentConfig) -> Result<Vec<VerificationOutcome>, HarnessError> {
    let mut out = Vec::new();
    // Exact distributional identity on a small-support model.
    let toy = ModelParams {
        xi: DistSpec::bernoulli(0.4).map_err(ProcessError::from)?,
        eta: DistSpec::finite_pmf(vec![0.5, 0.3, 0.2]).map_err(ProcessError::from)?,
        eps: DistSpec::constant(0),
        x0: DistSpec::finite_pmf(vec![0.2, 0.5, 0.3]).map_err(ProcessError::from)?,
        xm1: DistSpec::bernoulli(0.5).map_err(ProcessError::from)?,
    };
    for n in 1..=3u32 {
        let t = Instant::now();
        let rec = enumerate_recursion_pmf(&toy, n);
        let add = enumerate_additive_pmf(&toy, n);
        let len = rec.len().max(add.len());
        let mut max_dev = 0.0f64;
        for i in 0..len {
            let a = rec.get(i).copied().unwrap_or(0.0);
            let b = add.get(i).copied().unwrap_or(0.0);
            max_dev = max_dev.max((a - b).abs());
        }
        out.push(VerificationOutcome::evaluate(
            format!("additive vs recursion pmf, horizon {n}"),
            max_dev,
            0.0,
            1e-9,
            true,
            t,
        ));
    }
    // Sampled two-sample comparison on the configured model when it has
    // no immigration; with immigration the flagged form is used.
    let t = Instant::now();
    let count = config.mc_or(100_000);
    let immigration = config.model.has_immigration();
    let add = ensemble(
        EnsembleKind::Additive { horizon: 2, immigration },
        &config.model,
        count,
        config.seed,
    )?;
    let rec = ensemble(
        EnsembleKind::PathEndpoint { n_steps: 2 },
        &config.model,
        count,
        config.seed.wrapping_add(1),
    )?;
    let k_max = 30u64;
    let mut ca = vec![0.0f64; k_max as usize + 1];
    let mut cb = vec![0.0f64; k_max as usize + 1];
    for v in &add.draws {
        ca[(*v).min(k_max) as usize] += 1.0;
    }
    for v in &rec.draws {
        cb[(*v).min(k_max) as usize] += 1.0;
    }
    let mut stat = 0.0;
    let mut cells = 0u32;
    for (oa, ob) in ca.iter().zip(&cb) {
        let tot = oa + ob;
        if tot < 10.0 {
            continue;
        }
        let ea = tot / 2.0;
        stat += (oa - ea).powi(2) / ea + (ob - ea).powi(2) / ea;
        cells += 1;
    }
    let df = (cells.max(2) - 1) as f64;
    let crit = statrs::distribution::ChiSquared::new(df)
        .map(|d| statrs::distribution::ContinuousCDF::inverse_cdf(&d, 0.999))
        .unwrap_or(f64::INFINITY);
    out.push(VerificationOutcome::evaluate(
        "additive vs recursion two-sample chi-square",
        stat,
        0.0,
        crit,
        true,
        t,
    ));
    Ok(out)
}

fn verify_stationary_tail(
    config: &ExperimentConfig,
) -> Result<Vec<VerificationOutcome>, HarnessError> {
    let alpha = config.model.eps.tail_index().ok_or_else(|| {
        HarnessError::Config("stationary-tail verification needs regularly varying immigration".into())
    })?;
    let tol = config.tol_or(1e-6);
    let count = config.mc_or(1_000_000);
    let levels = config.levels_or_default();
    let predicted = predicted_stationary_limit(&config.model, alpha, 1e-10)?;
    let t = Instant::now();
    let set = ensemble(
        EnsembleKind::Stationary { tol },
        &config.model,
        count,
        config.seed,
    )?;
    let report = tail_ratio_curve(&set, &config.model.eps, &levels, predicted)?;
    let mut out = Vec::new();
    for i in 0..report.x_grid.len() {
        out.push(VerificationOutcome::evaluate(
            format!(
                "stationary tail ratio at level {} (x = {})",
                report.levels[i], report.x_grid[i]
            ),
            report.ratio[i],
            predicted,
            0.2 * predicted,
            !report.unreliable[i],
            t,
        ));
    }
    Ok(out)
}

fn verify_regular_variation(
    config: &ExperimentConfig,
) -> Result<Vec<VerificationOutcome>, HarnessError> {
    let mut out = Vec::new();

    // Karamata direct part at alpha in {0.5, 0.8}, x = 1e6.
    for alpha in [0.5, 0.8] {
        let t = Instant::now();
        let spec = DistSpec::discrete_pareto(alpha, 0.0).map_err(ProcessError::from)?;
        let pts = karamata_check(&spec, &[1e6])?;
        out.push(VerificationOutcome::evaluate(
            format!("Karamata ratio, alpha = {alpha}, x = 1e6"),
            pts[0].ratio,
            1.0 - alpha,
            0.01,
            true,
            t,
        ));
    }

    // Potter sandwich threshold for alpha = 0.8.
    let t = Instant::now();
    let spec = DistSpec::discrete_pareto(0.8, 0.0).map_err(ProcessError::from)?;
    match potter_check(&spec, 0.1, &[2.0, 5.0, 10.0], 1e4) {
        Ok(report) => {
            out.push(VerificationOutcome::evaluate(
                "Potter threshold below 1e4 (alpha 0.8, delta 0.1)",
                report.violations_beyond as f64,
                0.0,
                0.0,
                true,
                t,
            ));
        }
        Err(_) => out.push(VerificationOutcome::evaluate(
            "Potter threshold below 1e4 (alpha 0.8, delta 0.1)",
            f64::INFINITY,
            0.0,
            0.0,
            true,
            t,
        )),
    }

    // Ratio test of the tail family itself.
    let t = Instant::now();
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.5] {
        let spec = DistSpec::discrete_pareto(alpha, 0.0).map_err(ProcessError::from)?;
        for q in [2.0, 10.0] {
            let ratio = spec.exact_tail(q * 1e6) / spec.exact_tail(1e6);
            worst = worst.max((ratio - q.powf(-alpha)).abs());
        }
    }
    out.push(VerificationOutcome::evaluate(
        "regular variation q-ratio test at x = 1e6",
        worst,
        0.0,
        0.01,
        true,
        t,
    ));

    // Slowly varying floor contract.
    let t = Instant::now();
    let mut xs = Vec::new();
    let mut x = 1e-3f64;
    while x <= 1e8 {
        xs.push(x);
        x *= 1.01;
    }
    let hs: Vec<f64> = xs.iter().map(|y| y.powf(-0.5)).collect();
    let tab = TabulatedFn::new(xs.clone(), hs.clone()).map_err(ProcessError::from)?;
    let floor = construct_slowly_varying(&tab, 8, false).map_err(ProcessError::from)?;
    let lh_max = |lo: f64, hi: f64| {
        xs.iter()
            .zip(&hs)
            .filter(|(x, _)| **x >= lo && **x < hi)
            .map(|(x, h)| floor.eval(*x) * h)
            .fold(0.0f64, f64::max)
    };
    let head = lh_max(1e-3, 1e-2);
    let tail = lh_max(1e7, 1e8);
    out.push(VerificationOutcome::evaluate(
        "slowly varying floor decay (last decade below first)",
        (tail - head).max(0.0),
        0.0,
        0.0,
        true,
        t,
    ));

    // Convolution: equal indices double the tail.
    let t = Instant::now();
    let spec = DistSpec::discrete_pareto(0.8, 0.0).map_err(ProcessError::from)?;
    let conv = convolution_check(&spec, &spec, &[1e-4])?;
    let single = spec.exact_tail(conv.x_grid[0]);
    out.push(VerificationOutcome::evaluate(
        "convolution equal-index tail doubling at level 1e-4",
        conv.empirical_tail[0] / single,
        2.0,
        0.1,
        true,
        t,
    ));

    // Random sums: (E zeta)^beta scaling.
    let t = Instant::now();
    let tau = DistSpec::discrete_pareto(0.8, 0.0).map_err(ProcessError::from)?;
    let zeta = DistSpec::bernoulli(0.5).map_err(ProcessError::from)?;
    let rs = random_sum_check(&tau, &zeta, &[1e-3], config.mc_or(1_000_000), config.seed)?;
    out.push(VerificationOutcome::evaluate(
        "random-sum tail scaling at level 1e-3",
        rs.ratio[0],
        rs.predicted_limit,
        0.15 * rs.predicted_limit,
        !rs.unreliable[0],
        t,
    ));
    Ok(out)
}

fn verify_large_deviations(
    config: &ExperimentConfig,
) -> Result<Vec<VerificationOutcome>, HarnessError> {
    let t = Instant::now();
    let spec = DistSpec::discrete_pareto(1.5, 0.0).map_err(ProcessError::from)?;
    let report = large_dev_check(
        &spec,
        3.0,
        &[2, 4, 8, 16],
        &[1.0, 2.0, 5.0, 10.0],
        config.mc_or(1_000_000),
        config.seed,
    )?;
    let mut out = Vec::new();
    let n1_dev = report
        .n1_exact
        .iter()
        .map(|r| (r.ratio - 1.0).abs())
        .fold(0.0f64, f64::max);
    out.push(VerificationOutcome::evaluate(
        "large deviations: n = 1 ratio exactly 1",
        n1_dev,
        0.0,
        0.0,
        true,
        t,
    ));
    out.push(VerificationOutcome::evaluate(
        "large deviations: bounded growth of tail ratios",
        (report.max_upper_large - 3.0 * report.max_upper_small).max(0.0),
        0.0,
        0.0,
        true,
        t,
    ));
    Ok(out)
}
