//! Approximation-factor bounds and efficiency certificates.
//!
//! Posterior bounds are computed from a solved relaxation `w*` and a concrete
//! design; prior bounds depend only on `(p, N, s)`. All of them lower-bound
//! `phi_p(n) / phi_p(w*)` at an exact relaxation optimum.

use serde::{Deserialize, Serialize};

use crate::error::{DesignError, Result};
use crate::instance::{BudgetMode, DesignProblem, IntegerDesign};
use crate::relax::RelaxationCertificate;
use crate::rounding::pow0;

/// `(1/N) sum_{i in S} (w_i*)^{1-p}`.
pub fn posterior_binary(set: &IntegerDesign, w: &[f64], n: u64, p: f64) -> f64 {
    set.n
        .iter()
        .zip(w)
        .filter(|(&k, _)| k > 0)
        .map(|(_, &wi)| pow0(wi, 1.0 - p))
        .sum::<f64>()
        / n as f64
}

/// `(1/N) sum_i n_i^p (w_i*)^{1-p}`.
pub fn posterior_replicated(design: &IntegerDesign, w: &[f64], n: u64, p: f64) -> f64 {
    crate::rounding::surrogate(&design.n, w, p) / n as f64
}

/// `(1/B) sum_i c_i n_i^p (w_i*)^{1-p}`.
pub fn posterior_budgeted(
    design: &IntegerDesign,
    w: &[f64],
    costs: &[f64],
    budget: f64,
    p: f64,
) -> f64 {
    crate::rounding::budgeted_surrogate(&design.n, w, costs, p) / budget
}

/// Guaranteed factor `F(p, N, s)` of incremental rounding.
pub fn prior_factor_replicated(p: f64, n: u64, s: usize) -> f64 {
    prior_factor_at_ratio(p, n as f64 / s as f64)
}

/// `F` as a function of `x = N/s`: `x^{1-p}` while that is at most
/// `1/(2-p)`, and `1 - (1-p)(1/(2-p))^{(2-p)/(1-p)} / x` beyond.
pub fn prior_factor_at_ratio(p: f64, ratio: f64) -> f64 {
    if p >= 1.0 {
        return 1.0;
    }
    let first = ratio.powf(1.0 - p);
    let knee = 1.0 / (2.0 - p);
    if first <= knee {
        first
    } else {
        1.0 - (1.0 - p) * knee.powf((2.0 - p) / (1.0 - p)) / ratio
    }
}

/// `(N/s)^{1-p}` for the top-`N` binary rounding, applicable when
/// `p <= 1 - ln N / ln s`.
pub fn prior_factor_binary(p: f64, n: u64, s: usize) -> Option<f64> {
    if n as usize > s || n == 0 {
        return None;
    }
    let threshold = if n as usize == s {
        0.0
    } else {
        1.0 - (n as f64).ln() / (s as f64).ln()
    };
    (p <= threshold + 1e-12).then(|| (n as f64 / s as f64).powf(1.0 - p))
}

/// `(1 - s/N)^p` for efficient apportionment, defined for `N >= s`.
pub fn apportionment_factor(p: f64, n: u64, s: usize) -> Option<f64> {
    (n as usize >= s).then(|| (1.0 - s as f64 / n as f64).powf(p))
}

/// `1 - (1 - 1/N)^N`, or `(1/c)(1 - (1 - c/N)^N)` for total curvature `c`.
pub fn greedy_factor(n: u64, curvature: Option<f64>) -> f64 {
    let c = curvature.unwrap_or(1.0);
    if c <= 0.0 {
        return 1.0;
    }
    let n = n as f64;
    -(n * (-c / n).ln_1p()).exp_m1() / c
}

/// Root of `e^x = 2 - x`, by bisection to `1e-12`.
pub fn wolsey_beta() -> f64 {
    let f = |x: f64| x.exp() - 2.0 + x;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `1 - e^{-beta}`, the guarantee of the better of cost-benefit greedy and
/// best single atom.
pub fn wolsey_factor() -> f64 {
    -(-wolsey_beta()).exp_m1()
}

/// `1 - 1/e`, the guarantee of partial enumeration with greedy completion.
pub fn sviridenko_factor() -> f64 {
    -(-1.0f64).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaCondition {
    /// Every `w_i <= 1`.
    Capped,
    /// `p <= 1 - ln r / ln s`.
    SmallP,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    /// `(1/r) sum_{i <= r} w_i^{1-p}`.
    pub lhs: f64,
    /// `(r/s)^{1-p}`.
    pub rhs: f64,
    pub holds: bool,
    /// Whether the chosen hypothesis is satisfied by the inputs.
    pub hypothesis: bool,
}

/// Evaluates `(1/r) sum_{i<=r} w_i^{1-p} >= (r/s)^{1-p}` for `w` sorted
/// in nonincreasing order with `sum w = r`, `s = w.len()`.
pub fn lemma_floor_bound(
    w_sorted: &[f64],
    r: usize,
    p: f64,
    condition: LemmaCondition,
) -> Result<LemmaCheck> {
    let s = w_sorted.len();
    if w_sorted.windows(2).any(|x| x[0] < x[1]) || w_sorted.iter().any(|&x| x < 0.0) {
        return Err(DesignError::NotSorted);
    }
    let sum: f64 = w_sorted.iter().sum();
    if r == 0 || r > s || (sum - r as f64).abs() > 1e-9 * r as f64 {
        return Err(DesignError::BadSum {
            sum,
            expected: r as f64,
        });
    }
    let lhs = w_sorted[..r].iter().map(|&x| pow0(x, 1.0 - p)).sum::<f64>() / r as f64;
    let rhs = (r as f64 / s as f64).powf(1.0 - p);
    let hypothesis = match condition {
        LemmaCondition::Capped => w_sorted.iter().all(|&x| x <= 1.0 + 1e-12),
        LemmaCondition::SmallP => {
            let threshold = if r == s {
                0.0
            } else {
                1.0 - (r as f64).ln() / (s as f64).ln()
            };
            p <= threshold + 1e-12
        }
    };
    Ok(LemmaCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-12,
        hypothesis,
    })
}

/// How a design was produced; selects which prior bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignMethod {
    Greedy,
    GreedyBinary,
    Incremental,
    TopN,
    Apportionment,
    BudgetedDp,
    Wolsey,
    Sviridenko,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCertificate {
    pub method: DesignMethod,
    pub design: IntegerDesign,
    /// `phi_p(w*)`.
    pub relax_objective: f64,
    /// `phi_p(n)`.
    pub design_objective: f64,
    /// `phi_p(n) / phi_p(w*)`.
    pub ratio: f64,
    pub posterior_bound: f64,
    /// A priori factor of the rounding method, relative to `phi_p(w*)`.
    pub prior_bound: Option<f64>,
    /// Greedy guarantee, relative to the best discrete design (which is
    /// itself at most `phi_p(w*)`).
    pub greedy_bound: Option<f64>,
    pub relax_gap: f64,
}

/// Assembles all applicable bounds for `design` against the relaxation
/// certificate `relax`.
pub fn build_certificate(
    problem: &DesignProblem,
    design: &IntegerDesign,
    relax: &RelaxationCertificate,
    method: DesignMethod,
) -> Result<EfficiencyCertificate> {
    let s = problem.s();
    let w = &relax.weights.w;
    if design.n.len() != s || w.len() != s {
        return Err(DesignError::DimensionMismatch(format!(
            "design has {} entries and weights {}, expected {s}",
            design.n.len(),
            w.len()
        )));
    }
    let p = problem.p();
    let design_objective = problem.phi(&design.as_f64())?;
    let relax_objective = relax.objective;
    let ratio = if relax_objective > 0.0 {
        design_objective / relax_objective
    } else {
        0.0
    };
    let (posterior_bound, prior_bound, greedy_bound) = match problem.mode() {
        BudgetMode::Replication { n } => {
            let n = *n;
            let posterior = if design.binary {
                posterior_binary(design, w, n, p)
            } else {
                posterior_replicated(design, w, n, p)
            };
            let prior = match method {
                DesignMethod::Incremental => Some(prior_factor_replicated(p, n, s)),
                DesignMethod::TopN => prior_factor_binary(p, n, s),
                DesignMethod::Apportionment => apportionment_factor(p, n, s),
                _ => None,
            };
            let greedy = match method {
                DesignMethod::Greedy | DesignMethod::GreedyBinary => Some(greedy_factor(n, None)),
                _ => None,
            };
            (posterior, prior, greedy)
        }
        BudgetMode::Budget { costs, budget } => {
            let greedy = match method {
                DesignMethod::Wolsey => Some(wolsey_factor()),
                DesignMethod::Sviridenko => Some(sviridenko_factor()),
                _ => None,
            };
            (
                posterior_budgeted(design, w, costs, *budget, p),
                None,
                greedy,
            )
        }
    };
    Ok(EfficiencyCertificate {
        method,
        design: design.clone(),
        relax_objective,
        design_objective,
        ratio,
        posterior_bound,
        prior_bound,
        greedy_bound,
        relax_gap: relax.gap,
    })
}
