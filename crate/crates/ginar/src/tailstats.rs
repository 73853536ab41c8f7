//! Empirical tail estimation and numerical checks of regular-variation
//! machinery: tail ratio curves against exact reference tails, the Hill
//! estimator, Karamata integral ratios, Potter sandwich thresholds,
//! heavy-tailed large-deviation bounds, convolution asymptotics, and
//! random-sum asymptotics.
//!
//! The asymptotic statements checked here are limits; every finite-x
//! tolerance is a calibration choice of this toolkit (pinned in the test
//! fixtures), not a rate claimed by the theory.

use crate::dists::{DistSpec, ExtReal};
use crate::process::{branch_sum, SampleSet};
use crate::rng::{Role, StreamFactory};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TailError {
    #[error("empty sample set")]
    EmptySamples,
    #[error("need at least {needed} positive samples, have {have}")]
    InsufficientSamples { needed: usize, have: usize },
    #[error("degenerate sample: {0}")]
    Degenerate(&'static str),
    #[error("spec is not regularly varying in the required sense: {0}")]
    NotRegularlyVarying(&'static str),
    #[error("levels must lie in (0, 1)")]
    BadLevels,
    #[error("support cutoff insufficient for the requested level (needs x = {needed:.3e})")]
    CutoffInsufficient { needed: f64 },
    #[error("no Potter threshold within the search range")]
    NoPotterThreshold,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Smallest non-negative integer x with P(X > x) <= level.
pub fn tail_quantile(spec: &DistSpec, level: f64) -> f64 {
    if spec.exact_tail(0.0) <= level {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while spec.exact_tail(hi) > level {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1.0 {
        let mid = ((lo + hi) / 2.0).floor();
        if spec.exact_tail(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Fraction of draws strictly greater than x.
pub fn empirical_tail(samples: &SampleSet, x: f64) -> Result<f64, TailError> {
    if samples.draws.is_empty() {
        return Err(TailError::EmptySamples);
    }
    let n = samples.draws.len();
    let over = samples.draws.iter().filter(|v| (**v as f64) > x).count();
    Ok(over as f64 / n as f64)
}

/// 95% Wilson score upper bound for a binomial proportion.
pub fn wilson_upper(successes: u64, trials: u64) -> f64 {
    let z = 1.959_963_984_540_054f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    ((p + z2 / (2.0 * n) + z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()) / (1.0 + z2 / n))
        .min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HillEstimate {
    /// Order statistics actually used (after any tie reduction).
    pub k: usize,
    pub alpha_hat: f64,
    pub ci95: (f64, f64),
    /// Set when ties at the k-th order statistic forced a smaller k.
    pub reduced_from: Option<usize>,
}

/// Hill tail-index estimator on the positive part of the sample:
/// alpha_hat = k / sum_{i=1}^{k} ln(X_(n-i+1) / X_(n-k)). Zeros are
/// excluded before ranking; ties at the threshold reduce k to the largest
/// value breaking the tie.
pub fn hill(samples: &SampleSet, k: usize) -> Result<HillEstimate, TailError> {
    if k < 10 {
        return Err(TailError::Precondition("hill needs k >= 10".into()));
    }
    let mut pos: Vec<u64> = samples.draws.iter().copied().filter(|v| *v > 0).collect();
    if pos.len() < k + 1 {
        return Err(TailError::InsufficientSamples {
            needed: k + 1,
            have: pos.len(),
        });
    }
    pos.sort_unstable();
    let n = pos.len();
    let mut k_used = k;
    while k_used >= 1 && pos[n - 1 - k_used] == pos[n - k_used] {
        k_used -= 1;
    }
    if k_used == 0 {
        return Err(TailError::Degenerate("all upper order statistics tie"));
    }
    let threshold = pos[n - 1 - k_used] as f64;
    let sum_log: f64 = pos[n - k_used..]
        .iter()
        .map(|v| (*v as f64 / threshold).ln())
        .sum();
    if sum_log <= 0.0 {
        return Err(TailError::Degenerate("zero log-spacings"));
    }
    let alpha_hat = k_used as f64 / sum_log;
    let half = 1.96 / (k_used as f64).sqrt();
    Ok(HillEstimate {
        k: k_used,
        alpha_hat,
        ci95: (alpha_hat * (1.0 - half), alpha_hat * (1.0 + half)),
        reduced_from: (k_used != k).then_some(k),
    })
}

/// Grid of tail comparisons at reference quantiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub levels: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub empirical_tail: Vec<f64>,
    pub reference_tail: Vec<f64>,
    /// empirical / reference where the reference is positive, else NaN.
    pub ratio: Vec<f64>,
    /// Binomial standard errors sqrt(p(1-p)/n) of the empirical tails
    /// (zero for deterministic reports).
    pub standard_errors: Vec<f64>,
    /// Level too deep for the sample size (below 10/n).
    pub unreliable: Vec<bool>,
    pub predicted_limit: f64,
    pub sample_count: u64,
}

impl TailReport {
    /// CSV body `x,empirical,reference,ratio,se`.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(b"x,empirical,reference,ratio,se\n")?;
        for i in 0..self.x_grid.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.x_grid[i],
                self.empirical_tail[i],
                self.reference_tail[i],
                self.ratio[i],
                self.standard_errors[i]
            )?;
        }
        Ok(())
    }

    /// Structured summary with a pass flag per level at the given
    /// relative tolerance (unreliable levels neither pass nor fail).
    pub fn summary_json(&self, rel_tol: f64) -> String {
        #[derive(Serialize)]
        struct Row {
            level: f64,
            x: f64,
            ratio: f64,
            se: f64,
            predicted: f64,
            status: &'static str,
        }
        #[derive(Serialize)]
        struct Summary {
            predicted_limit: f64,
            sample_count: u64,
            rel_tol: f64,
            rows: Vec<Row>,
        }
        let rows = (0..self.x_grid.len())
            .map(|i| Row {
                level: self.levels[i],
                x: self.x_grid[i],
                ratio: self.ratio[i],
                se: self.standard_errors[i],
                predicted: self.predicted_limit,
                status: if self.unreliable[i] {
                    "unreliable"
                } else if (self.ratio[i] - self.predicted_limit).abs()
                    <= rel_tol * self.predicted_limit.abs()
                {
                    "pass"
                } else {
                    "fail"
                },
            })
            .collect();
        serde_json::to_string_pretty(&Summary {
            predicted_limit: self.predicted_limit,
            sample_count: self.sample_count,
            rel_tol,
            rows,
        })
        .expect("summary serializes")
    }
}

fn validate_levels(levels: &[f64]) -> Result<(), TailError> {
    if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(TailError::BadLevels);
    }
    Ok(())
}

/// Empirical tail of `numerator` against the exact tail of `reference`,
/// evaluated at the reference-tail quantiles of the given levels. The
/// predicted limit is supplied by the caller (from the analytics side).
pub fn tail_ratio_curve(
    numerator: &SampleSet,
    reference: &DistSpec,
    levels: &[f64],
    predicted_limit: f64,
) -> Result<TailReport, TailError> {
    validate_levels(levels)?;
    if numerator.draws.is_empty() {
        return Err(TailError::EmptySamples);
    }
    let mut sorted = numerator.draws.clone();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut report = TailReport {
        levels: levels.to_vec(),
        x_grid: Vec::new(),
        empirical_tail: Vec::new(),
        reference_tail: Vec::new(),
        ratio: Vec::new(),
        standard_errors: Vec::new(),
        unreliable: Vec::new(),
        predicted_limit,
        sample_count: sorted.len() as u64,
    };
    for &level in levels {
        let x = tail_quantile(reference, level);
        let t_ref = reference.exact_tail(x);
        let over = sorted.len() - sorted.partition_point(|v| (*v as f64) <= x);
        let p_hat = over as f64 / n;
        let se = (p_hat * (1.0 - p_hat) / n).sqrt();
        report.x_grid.push(x);
        report.empirical_tail.push(p_hat);
        report.reference_tail.push(t_ref);
        report
            .ratio
            .push(if t_ref > 0.0 { p_hat / t_ref } else { f64::NAN });
        report.standard_errors.push(se);
        report.unreliable.push(level * n < 10.0);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KaramataPoint {
    pub x: f64,
    pub ratio: f64,
    pub target: f64,
}

/// Integral of the step tail over [0, x]:
/// sum_{k < floor(x)} T(k) + frac(x) T(floor(x)). The xs must be
/// increasing; partial sums are shared across the grid.
fn step_tail_integrals(spec: &DistSpec, xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0f64;
    let mut k = 0.0f64;
    for &x in xs {
        let fl = x.floor();
        while k < fl {
            acc += spec.exact_tail(k);
            k += 1.0;
        }
        out.push(acc + (x - fl) * spec.exact_tail(fl));
    }
    out
}

/// Direct part of Karamata's theorem for tail index alpha in (0, 1):
/// x T(x) / int_0^x T(t) dt converges to 1 - alpha. Deterministic.
pub fn karamata_check(spec: &DistSpec, x_grid: &[f64]) -> Result<Vec<KaramataPoint>, TailError> {
    let alpha = spec
        .tail_index()
        .ok_or(TailError::NotRegularlyVarying("need a regularly varying spec"))?;
    if !(alpha < 1.0) {
        return Err(TailError::NotRegularlyVarying(
            "direct Karamata check needs alpha < 1",
        ));
    }
    if x_grid.is_empty() || x_grid.windows(2).any(|w| w[1] <= w[0]) || x_grid[0] <= 0.0 {
        return Err(TailError::Precondition(
            "x grid must be positive increasing".into(),
        ));
    }
    let integrals = step_tail_integrals(spec, x_grid);
    Ok(x_grid
        .iter()
        .zip(integrals)
        .map(|(&x, integral)| KaramataPoint {
            x,
            ratio: x * spec.exact_tail(x) / integral,
            target: 1.0 - alpha,
        })
        .collect())
}

/// Reciprocal part of Karamata's theorem for alpha > 1:
/// x T(x) / int_x^inf T(t) dt converges to alpha - 1. The full integral
/// is the mean, evaluated once by certified summation.
pub fn karamata_check_upper(
    spec: &DistSpec,
    x_grid: &[f64],
) -> Result<Vec<KaramataPoint>, TailError> {
    let alpha = spec
        .tail_index()
        .ok_or(TailError::NotRegularlyVarying("need a regularly varying spec"))?;
    if !(alpha > 1.0) {
        return Err(TailError::NotRegularlyVarying(
            "upper Karamata check needs alpha > 1",
        ));
    }
    if x_grid.is_empty() || x_grid.windows(2).any(|w| w[1] <= w[0]) || x_grid[0] <= 0.0 {
        return Err(TailError::Precondition(
            "x grid must be positive increasing".into(),
        ));
    }
    let total = match spec.mean() {
        ExtReal::Finite(v) => v,
        ExtReal::Infinite => {
            return Err(TailError::NotRegularlyVarying(
                "mean must be finite for alpha > 1",
            ))
        }
    };
    let integrals = step_tail_integrals(spec, x_grid);
    Ok(x_grid
        .iter()
        .zip(integrals)
        .map(|(&x, head)| KaramataPoint {
            x,
            ratio: x * spec.exact_tail(x) / (total - head),
            target: alpha - 1.0,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotterReport {
    /// Smallest grid point beyond which the sandwich held everywhere.
    pub x0: f64,
    pub violations_before: usize,
    pub violations_beyond: usize,
    pub checked_points: usize,
}

/// Finds the smallest grid threshold x0 past which the two-sided Potter
/// sandwich (1-delta) q^(-alpha-delta) < T(qx)/T(x) < (1+delta) q^(-alpha+delta)
/// holds for every q in the grid.
pub fn potter_check(
    spec: &DistSpec,
    delta: f64,
    q_grid: &[f64],
    x0_search_max: f64,
) -> Result<PotterReport, TailError> {
    let alpha = spec
        .tail_index()
        .ok_or(TailError::NotRegularlyVarying("need a regularly varying spec"))?;
    if !(delta > 0.0) {
        return Err(TailError::Precondition("delta must be positive".into()));
    }
    if q_grid.iter().any(|q| *q < 1.0) {
        return Err(TailError::Precondition("q grid must lie in [1, inf)".into()));
    }
    // ~200 logarithmic points per decade from 1 to the search maximum.
    let decades = x0_search_max.log10().max(0.1);
    let n_points = (decades * 200.0).ceil() as usize;
    let xs: Vec<f64> = (0..=n_points)
        .map(|i| 10f64.powf(i as f64 * decades / n_points as f64))
        .collect();
    let violated: Vec<bool> = xs
        .iter()
        .map(|&x| {
            let tx = spec.exact_tail(x);
            q_grid.iter().any(|&q| {
                let ratio = spec.exact_tail(q * x) / tx;
                !(ratio > (1.0 - delta) * q.powf(-alpha - delta)
                    && ratio < (1.0 + delta) * q.powf(-alpha + delta))
            })
        })
        .collect();
    let last_bad = violated.iter().rposition(|v| *v);
    match last_bad {
        Some(i) if i + 1 >= xs.len() => Err(TailError::NoPotterThreshold),
        Some(i) => Ok(PotterReport {
            x0: xs[i + 1],
            violations_before: violated[..=i].iter().filter(|v| **v).count(),
            violations_beyond: 0,
            checked_points: xs.len(),
        }),
        None => Ok(PotterReport {
            x0: xs[0],
            violations_before: 0,
            violations_beyond: 0,
            checked_points: xs.len(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeDevRow {
    pub n: u32,
    pub multiplier: f64,
    pub y: f64,
    pub hits: u64,
    pub p_hat: f64,
    /// p_hat / (n T(y)).
    pub ratio: f64,
    /// Wilson 95% upper bound on the ratio.
    pub ratio_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeDevReport {
    /// Exact rows at n = 1 (S_1 = eta_1, so the ratio is identically 1).
    pub n1_exact: Vec<LargeDevRow>,
    pub rows: Vec<LargeDevRow>,
    pub max_upper_small: f64,
    pub max_upper_large: f64,
    /// Boundedness proxy: the max Wilson upper over n > 4 stays within
    /// 3x the max over n in {2, 4}; trivially true without large rows.
    pub bounded: bool,
}

/// Monte Carlo check that P(eta_1 + ... + eta_n > y) stays of order
/// n P(eta_1 > y) on y >= gamma n, for a regularly varying summand with
/// index in (1, 2) and gamma above the mean. The theory asserts the
/// existence of a bounding constant, so the check is boundedness of the
/// observed ratios, not any specific value.
pub fn large_dev_check(
    spec_eta: &DistSpec,
    gamma: f64,
    n_grid: &[u32],
    multipliers: &[f64],
    mc_count: u64,
    seed: u64,
) -> Result<LargeDevReport, TailError> {
    let alpha = spec_eta
        .tail_index()
        .ok_or(TailError::NotRegularlyVarying("summand must be regularly varying"))?;
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(TailError::Precondition("alpha must lie in (1, 2)".into()));
    }
    let mean = spec_eta.mean().finite().expect("alpha > 1 has finite mean");
    if !(gamma > mean) {
        return Err(TailError::Precondition(format!(
            "gamma must exceed the summand mean {mean:.6}"
        )));
    }
    if multipliers.iter().any(|m| *m < 1.0) {
        return Err(TailError::Precondition(
            "y multipliers below 1 put y under gamma n".into(),
        ));
    }
    if n_grid.iter().any(|n| *n < 2) {
        return Err(TailError::Precondition(
            "n grid starts at 2; n = 1 is reported exactly".into(),
        ));
    }
    let fac = StreamFactory::new(seed);
    let n1_exact = multipliers
        .iter()
        .map(|&m| {
            let y = gamma * m;
            LargeDevRow {
                n: 1,
                multiplier: m,
                y,
                hits: 0,
                p_hat: spec_eta.exact_tail(y),
                ratio: 1.0,
                ratio_upper: 1.0,
            }
        })
        .collect();
    let mut rows = Vec::new();
    for (ni, &n) in n_grid.iter().enumerate() {
        let ys: Vec<f64> = multipliers.iter().map(|m| gamma * n as f64 * m).collect();
        let nfac = fac.child(ni as u64);
        let hits: Vec<u64> = (0..mc_count)
            .into_par_iter()
            .fold(
                || vec![0u64; ys.len()],
                |mut acc, rep| {
                    let mut rng = nfac.child(rep).stream(0, Role::Xi);
                    let mut s = 0u64;
                    for _ in 0..n {
                        s = s.saturating_add(spec_eta.sample(&mut rng));
                    }
                    let sf = s as f64;
                    for (j, y) in ys.iter().enumerate() {
                        if sf > *y {
                            acc[j] += 1;
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; ys.len()],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
        for (j, &y) in ys.iter().enumerate() {
            let p_hat = hits[j] as f64 / mc_count as f64;
            let denom = n as f64 * spec_eta.exact_tail(y);
            rows.push(LargeDevRow {
                n,
                multiplier: multipliers[j],
                y,
                hits: hits[j],
                p_hat,
                ratio: p_hat / denom,
                ratio_upper: wilson_upper(hits[j], mc_count) / denom,
            });
        }
    }
    let max_upper_small = rows
        .iter()
        .filter(|r| r.n <= 4)
        .map(|r| r.ratio_upper)
        .fold(0.0f64, f64::max);
    let max_upper_large = rows
        .iter()
        .filter(|r| r.n > 4)
        .map(|r| r.ratio_upper)
        .fold(0.0f64, f64::max);
    let bounded = max_upper_large <= 3.0 * max_upper_small || max_upper_large == 0.0;
    Ok(LargeDevReport {
        n1_exact,
        rows,
        max_upper_small,
        max_upper_large,
        bounded,
    })
}

const CONV_SUPPORT_CAP: f64 = 3e7;

/// Exact tail of the independent sum X1 + X2 at the dominant-tail
/// quantiles of the levels, against the convolution asymptote
/// (T1, T1 + T2, or T2 by index ordering). The sum tail is computed by
/// exact convolution: P(S > x) = T1(x) + sum_{i<=x} pmf1(i) T2(x - i).
pub fn convolution_check(
    spec1: &DistSpec,
    spec2: &DistSpec,
    levels: &[f64],
) -> Result<TailReport, TailError> {
    validate_levels(levels)?;
    let a1 = spec1.tail_index();
    let a2 = spec2.tail_index();
    if a1.is_none() && a2.is_none() {
        return Err(TailError::NotRegularlyVarying(
            "at least one summand must be regularly varying",
        ));
    }
    enum Case {
        First,
        Both,
        Second,
    }
    let case = match (a1, a2) {
        (Some(x), Some(y)) if x < y => Case::First,
        (Some(x), Some(y)) if x > y => Case::Second,
        (Some(_), Some(_)) => Case::Both,
        (Some(_), None) => Case::First,
        (None, _) => Case::Second,
    };
    let dominant = match case {
        Case::Second => spec2,
        _ => spec1,
    };
    let mut report = TailReport {
        levels: levels.to_vec(),
        x_grid: Vec::new(),
        empirical_tail: Vec::new(),
        reference_tail: Vec::new(),
        ratio: Vec::new(),
        standard_errors: Vec::new(),
        unreliable: Vec::new(),
        predicted_limit: 1.0,
        sample_count: 0,
    };
    for &level in levels {
        let x = tail_quantile(dominant, level);
        if x > CONV_SUPPORT_CAP {
            return Err(TailError::CutoffInsufficient { needed: x });
        }
        let mut sum_tail = spec1.exact_tail(x);
        let mut t_prev = 1.0; // T1 at -1
        let mut i = 0.0f64;
        while i <= x {
            let t_cur = spec1.exact_tail(i);
            let pmf1 = (t_prev - t_cur).max(0.0);
            if pmf1 > 0.0 {
                sum_tail += pmf1 * spec2.exact_tail(x - i);
            }
            t_prev = t_cur;
            i += 1.0;
        }
        let asymptote = match case {
            Case::First => spec1.exact_tail(x),
            Case::Second => spec2.exact_tail(x),
            Case::Both => spec1.exact_tail(x) + spec2.exact_tail(x),
        };
        report.x_grid.push(x);
        report.empirical_tail.push(sum_tail);
        report.reference_tail.push(asymptote);
        report.ratio.push(sum_tail / asymptote);
        report.standard_errors.push(0.0);
        report.unreliable.push(false);
    }
    Ok(report)
}

/// Monte Carlo check of the random-sum asymptotics: for tau regularly
/// varying with index beta and zeta with positive finite mean,
/// P(sum_{i<=tau} zeta_i > x) ~ (E zeta)^beta P(tau > x). The report's
/// ratio is the empirical tail over the plain tau tail, with predicted
/// limit (E zeta)^beta.
pub fn random_sum_check(
    tau: &DistSpec,
    zeta: &DistSpec,
    levels: &[f64],
    mc_count: u64,
    seed: u64,
) -> Result<TailReport, TailError> {
    validate_levels(levels)?;
    let beta = tau
        .tail_index()
        .ok_or(TailError::NotRegularlyVarying("tau must be regularly varying"))?;
    let mean_zeta = match zeta.mean() {
        ExtReal::Finite(v) if v > 0.0 => v,
        _ => {
            return Err(TailError::Precondition(
                "zeta must have a positive finite mean".into(),
            ))
        }
    };
    if beta >= 1.0 {
        // need some r > beta with E(zeta^r) finite
        let r = match zeta.tail_index() {
            Some(az) if az <= beta => {
                return Err(TailError::Precondition(format!(
                    "zeta needs a finite moment of order above beta = {beta}"
                )))
            }
            Some(az) => (beta + az) / 2.0,
            None => beta + 1.0,
        };
        if !zeta.moment(r).is_finite() {
            return Err(TailError::Precondition(format!(
                "zeta needs a finite moment of order {r} > beta"
            )));
        }
    }
    let fac = StreamFactory::new(seed);
    let draws: Vec<u64> = (0..mc_count)
        .into_par_iter()
        .map(|d| {
            let sub = fac.child(d);
            let t = tau.sample(&mut sub.stream(0, Role::Immigration));
            branch_sum(t, zeta, &mut sub.stream(1, Role::Xi))
        })
        .collect();
    let n = draws.len() as f64;
    let mut sorted = draws;
    sorted.sort_unstable();
    let mut report = TailReport {
        levels: levels.to_vec(),
        x_grid: Vec::new(),
        empirical_tail: Vec::new(),
        reference_tail: Vec::new(),
        ratio: Vec::new(),
        standard_errors: Vec::new(),
        unreliable: Vec::new(),
        predicted_limit: mean_zeta.powf(beta),
        sample_count: mc_count,
    };
    for &level in levels {
        let x = tail_quantile(tau, level);
        let t_ref = tau.exact_tail(x);
        let over = sorted.len() - sorted.partition_point(|v| (*v as f64) <= x);
        let p_hat = over as f64 / n;
        report.x_grid.push(x);
        report.empirical_tail.push(p_hat);
        report.reference_tail.push(t_ref);
        report
            .ratio
            .push(if t_ref > 0.0 { p_hat / t_ref } else { f64::NAN });
        report
            .standard_errors
            .push((p_hat * (1.0 - p_hat) / n).sqrt());
        report.unreliable.push(level * n < 10.0);
    }
    Ok(report)
}
