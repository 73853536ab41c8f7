//! Closed-form quantities of the second-order branching recursion with
//! immigration: the mean matrix eigenstructure, the sequence m_k of
//! expected no-immigration population sizes, exact expectations and
//! variances, second-moment growth bounds, and the stationary tail
//! constants.
//!
//! With offspring means (m_xi, m_eta), the mean matrix
//!
//! ```text
//! M = [ m_xi  m_eta ]
//!     [  1      0   ]
//! ```
//!
//! has eigenvalues lambda_+/- = (m_xi +- sqrt(m_xi^2 + 4 m_eta)) / 2, and
//! m_k = (lambda_+^{k+1} - lambda_-^{k+1}) / (lambda_+ - lambda_-). The
//! spectral radius rho = lambda_+ classifies the process: subcritical,
//! critical, or supercritical exactly as m_xi + m_eta compares to 1.

use crate::dists::ExtReal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("offspring means must be finite and non-negative (got {0})")]
    NegativeMean(f64),
    #[error("hypotheses violated: {0}")]
    Hypotheses(&'static str),
    #[error("parameter out of domain: {0}")]
    Domain(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

impl std::fmt::Display for Criticality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Criticality::Subcritical => "subcritical",
            Criticality::Critical => "critical",
            Criticality::Supercritical => "supercritical",
        };
        write!(f, "{s}")
    }
}

/// Mean structure of the process: eigenvalues, spectral radius,
/// criticality class, and the m_k evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStructure {
    pub m_xi: f64,
    pub m_eta: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub rho: f64,
    pub class: Criticality,
    /// The mean matrix is primitive (M^2 strictly positive) exactly when
    /// both offspring means are positive.
    pub primitive: bool,
}

/// Builds the mean structure from the two offspring means.
pub fn mean_structure(m_xi: f64, m_eta: f64) -> Result<MeanStructure, AnalyticsError> {
    if !(m_xi.is_finite() && m_xi >= 0.0) {
        return Err(AnalyticsError::NegativeMean(m_xi));
    }
    if !(m_eta.is_finite() && m_eta >= 0.0) {
        return Err(AnalyticsError::NegativeMean(m_eta));
    }
    let disc = (m_xi * m_xi + 4.0 * m_eta).sqrt();
    let lambda_plus = (m_xi + disc) / 2.0;
    let lambda_minus = (m_xi - disc) / 2.0;
    // Classify by m_xi + m_eta against 1; this is exact in the inputs,
    // unlike rho which carries the square root's rounding.
    let sum = m_xi + m_eta;
    let class = if sum < 1.0 {
        Criticality::Subcritical
    } else if sum == 1.0 {
        Criticality::Critical
    } else {
        Criticality::Supercritical
    };
    Ok(MeanStructure {
        m_xi,
        m_eta,
        lambda_plus,
        lambda_minus,
        rho: lambda_plus,
        class,
        primitive: m_xi > 0.0 && m_eta > 0.0,
    })
}

impl MeanStructure {
    /// m_k: the expected population at time k of the no-immigration
    /// process started from sizes (1, 0); m_0 = 1.
    pub fn m_seq(&self, k: u32) -> f64 {
        let (lp, lm) = (self.lambda_plus, self.lambda_minus);
        if lp == lm {
            // only possible at m_xi = m_eta = 0
            return if k == 0 { 1.0 } else { 0.0 };
        }
        (lp.powi(k as i32 + 1) - lm.powi(k as i32 + 1)) / (lp - lm)
    }

    /// Partial sum over j < n of m_j by direct accumulation (no geometric
    /// shortcut, so the critical case needs no special branch).
    pub fn m_partial_sum(&self, n: u32) -> f64 {
        (0..n).map(|j| self.m_seq(j)).sum()
    }

    /// M^n in closed form via the spectral decomposition; entry (0,0) is
    /// m_n and entry (1,0) is m_{n-1}.
    pub fn matrix_power(&self, n: u32) -> [[f64; 2]; 2] {
        let (lp, lm) = (self.lambda_plus, self.lambda_minus);
        if n == 0 {
            return [[1.0, 0.0], [0.0, 1.0]];
        }
        if n == 1 {
            return [[self.m_xi, self.m_eta], [1.0, 0.0]];
        }
        if lp == lm {
            // degenerate zero-mean case: M = [[0,0],[1,0]], M^n = 0 for n >= 2
            return if n == 1 {
                [[0.0, 0.0], [1.0, 0.0]]
            } else {
                [[0.0; 2]; 2]
            };
        }
        let d = lp - lm;
        let a = lp.powi(n as i32) / d;
        let b = lm.powi(n as i32) / d;
        [
            [a * lp - b * lm, (a - b) * self.m_eta],
            [a - b, -a * lm + b * lp],
        ]
    }

    /// E(X_n) for the process with immigration:
    /// m_n E(X_0) + m_{n-1} m_eta E(X_{-1}) + m_eps sum_{j<n} m_j.
    pub fn expectation(&self, n: u32, ex0: f64, exm1: f64, m_eps: f64) -> f64 {
        if n == 0 {
            return ex0;
        }
        self.m_seq(n) * ex0
            + self.m_seq(n - 1) * self.m_eta * exm1
            + m_eps * self.m_partial_sum(n)
    }

    /// rho^n E(X_0) + rho^{n-1} m_eta E(X_{-1}): an upper bound for the
    /// no-immigration expectation, exact when m_eta = 0.
    pub fn first_moment_bound(&self, n: u32, ex0: f64, exm1: f64) -> f64 {
        if n == 0 {
            return ex0;
        }
        self.rho.powi(n as i32) * ex0 + self.rho.powi(n as i32 - 1) * self.m_eta * exm1
    }

    /// Limit of E(X_n) in the subcritical case:
    /// m_eps / ((1 - lambda_+)(1 - lambda_-)) = m_eps / (1 - m_xi - m_eta).
    pub fn stationary_mean(&self, m_eps: f64) -> Result<f64, AnalyticsError> {
        if self.class != Criticality::Subcritical {
            return Err(AnalyticsError::Hypotheses(
                "stationary mean needs m_xi + m_eta < 1",
            ));
        }
        Ok(m_eps / ((1.0 - self.lambda_plus) * (1.0 - self.lambda_minus)))
    }
}

/// Var(X_n) of the no-immigration process started from (1, 0):
/// Var(xi) sum_{j=0}^{n-1} m_j^2 m_{n-j-1} + Var(eta) sum_{j=0}^{n-2} m_j^2 m_{n-j-2}.
pub fn variance_xn(ms: &MeanStructure, var_xi: f64, var_eta: f64, n: u32) -> f64 {
    assert!(n >= 1, "variance recursion starts at n = 1");
    let mut v = 0.0;
    for j in 0..n {
        let mj = ms.m_seq(j);
        v += var_xi * mj * mj * ms.m_seq(n - j - 1);
    }
    for j in 0..n.saturating_sub(1) {
        let mj = ms.m_seq(j);
        v += var_eta * mj * mj * ms.m_seq(n - j - 2);
    }
    v
}

/// The three regime constants bounding E(X_n^2) for the (1, 0) start.
/// Each is meaningful only in its own regime; the others are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentBounds {
    pub c_sub: f64,
    pub c_crit: f64,
    pub c_sup: f64,
}

pub fn moment_bounds(
    ms: &MeanStructure,
    var_xi: f64,
    var_eta: f64,
) -> Result<MomentBounds, AnalyticsError> {
    let rho = ms.rho;
    if rho <= 0.0 {
        return Err(AnalyticsError::Domain("second-moment bounds need rho > 0"));
    }
    let c_sub = if rho < 1.0 {
        1.0 + var_xi / (rho * (1.0 - rho)) + var_eta / (rho * rho * (1.0 - rho))
    } else {
        f64::NAN
    };
    let c_sup = if rho > 1.0 {
        1.0 + var_xi / (rho * (rho - 1.0)) + var_eta / (rho.powi(3) * (rho - 1.0))
    } else {
        f64::NAN
    };
    Ok(MomentBounds {
        c_sub,
        c_crit: 1.0 + var_xi + var_eta,
        c_sup,
    })
}

/// Regime-matched bound on E(X_n^2) for the no-immigration process from
/// (1, 0): c_sub rho^n, c_crit n, or c_sup rho^{2n}.
pub fn second_moment_bound(
    ms: &MeanStructure,
    var_xi: f64,
    var_eta: f64,
    n: u32,
) -> Result<f64, AnalyticsError> {
    let b = moment_bounds(ms, var_xi, var_eta)?;
    let rho = ms.rho;
    Ok(if rho < 1.0 {
        b.c_sub * rho.powi(n as i32)
    } else if rho == 1.0 {
        b.c_crit * n as f64
    } else {
        b.c_sup * rho.powi(2 * n as i32)
    })
}

/// Sufficient condition for E(X_n^r) < inf, r > 1: the r-th moments of
/// X_0, X_{-1}, xi and eta are all finite.
pub fn moment_finite(r: f64, x0: ExtReal, xm1: ExtReal, xi: ExtReal, eta: ExtReal) -> bool {
    assert!(r > 1.0, "criterion applies for r > 1");
    x0.is_finite() && xm1.is_finite() && xi.is_finite() && eta.is_finite()
}

/// Truncated evaluation of sum_{i=0}^inf m_i^alpha: the constant relating
/// the stationary tail to the immigration tail. The remainder past N is
/// below rho^{(N+1) alpha} / (1 - rho^alpha) since m_i <= rho^i.
pub fn stationary_tail_constant(
    ms: &MeanStructure,
    alpha: f64,
    tol: f64,
) -> Result<(f64, u32), AnalyticsError> {
    if !(ms.m_xi > 0.0 && ms.m_eta > 0.0 && ms.m_xi + ms.m_eta < 1.0) {
        return Err(AnalyticsError::Hypotheses(
            "tail constant needs m_xi > 0, m_eta > 0, m_xi + m_eta < 1",
        ));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(AnalyticsError::Domain("alpha must lie in (0, 2)"));
    }
    if !(tol > 0.0) {
        return Err(AnalyticsError::Domain("tol must be positive"));
    }
    let ra = ms.rho.powf(alpha);
    let mut sum = 0.0;
    let mut n = 0u32;
    loop {
        sum += ms.m_seq(n).powf(alpha);
        let remainder = ms.rho.powf((n + 1) as f64 * alpha) / (1.0 - ra);
        if remainder < tol {
            return Ok((sum, n));
        }
        n += 1;
    }
}

/// First-order constant sum_i m_xi^{i alpha} = 1 / (1 - m_xi^alpha).
pub fn first_order_constant(m_xi: f64, alpha: f64) -> Result<f64, AnalyticsError> {
    if !(m_xi > 0.0 && m_xi < 1.0) {
        return Err(AnalyticsError::Domain("m_xi must lie in (0, 1)"));
    }
    if !(alpha > 0.0) {
        return Err(AnalyticsError::Domain("alpha must be positive"));
    }
    Ok(1.0 / (1.0 - m_xi.powf(alpha)))
}

/// Which initial tail dominates P(X_n > x) for the no-immigration process
/// with regularly varying starts, and the predicted limit coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRatioPrediction {
    /// beta_0 < beta_{-1} (including a light-tailed X_{-1}):
    /// P(X_n > x) ~ m_n^{beta_0} P(X_0 > x).
    InitialDominates { coeff: f64 },
    /// beta_0 = beta_{-1}: both terms contribute;
    /// P(X_n > x) ~ coeff_x0 P(X_0 > x) + coeff_xm1 P(X_{-1} > x).
    EqualIndices { coeff_x0: f64, coeff_xm1: f64 },
    /// beta_{-1} < beta_0:
    /// P(X_n > x) ~ (m_{n-1} m_eta)^{beta_{-1}} P(X_{-1} > x).
    AncestorDominates { coeff: f64 },
}

/// Case-tagged finite-horizon tail prediction. `beta0`/`betam1` are the
/// regular-variation indices of X_0 and X_{-1}; `f64::INFINITY` encodes a
/// light-tailed initial value.
pub fn predicted_tail_ratio(
    ms: &MeanStructure,
    n: u32,
    beta0: f64,
    betam1: f64,
) -> Result<TailRatioPrediction, AnalyticsError> {
    if n < 1 {
        return Err(AnalyticsError::Domain("prediction starts at n = 1"));
    }
    if !(ms.m_xi > 0.0) {
        return Err(AnalyticsError::Hypotheses("prediction needs m_xi > 0"));
    }
    if beta0 < 0.0 || betam1 < 0.0 {
        return Err(AnalyticsError::Domain("tail indices must be non-negative"));
    }
    if beta0.is_infinite() && betam1.is_infinite() {
        return Err(AnalyticsError::Domain(
            "at least one initial law must be heavy-tailed",
        ));
    }
    let two_sided = betam1.is_finite();
    if two_sided && !(ms.m_eta > 0.0) {
        return Err(AnalyticsError::Hypotheses(
            "two-sided prediction needs m_eta > 0",
        ));
    }
    let c0 = ms.m_seq(n).powf(beta0);
    let cm1 = (ms.m_seq(n - 1) * ms.m_eta).powf(betam1);
    Ok(if beta0 < betam1 {
        TailRatioPrediction::InitialDominates { coeff: c0 }
    } else if beta0 == betam1 {
        TailRatioPrediction::EqualIndices {
            coeff_x0: c0,
            coeff_xm1: cm1,
        }
    } else {
        TailRatioPrediction::AncestorDominates { coeff: cm1 }
    })
}
