//! Rounding of continuous weights into integer designs.
//!
//! The replicated rounders maximize the separable concave surrogate
//! `sum_i n_i^p w_i^{1-p}` (with `0^0 = 0`), whose value divided by `N` is a
//! lower bound on the efficiency `phi_p(n) / phi_p(w*)` when `w*` solves the
//! relaxation.

use serde::{Deserialize, Serialize};

use crate::error::{DesignError, Result};
use crate::instance::IntegerDesign;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingMethod {
    Incremental,
    TopN,
    Apportionment,
    BudgetedDp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingResult {
    pub design: IntegerDesign,
    /// `sum_i c_i n_i^p w_i^{1-p}` (`c = 1` outside budgeted rounding).
    pub surrogate: f64,
    pub method: RoundingMethod,
}

/// `x^e` with the convention `0^0 = 0`.
pub fn pow0(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// `sum_i n_i^p w_i^{1-p}`.
pub fn surrogate(n: &[u64], w: &[f64], p: f64) -> f64 {
    n.iter()
        .zip(w)
        .map(|(&ni, &wi)| pow0(ni as f64, p) * pow0(wi, 1.0 - p))
        .sum()
}

/// `sum_i c_i n_i^p w_i^{1-p}`.
pub fn budgeted_surrogate(n: &[u64], w: &[f64], costs: &[f64], p: f64) -> f64 {
    n.iter()
        .zip(w)
        .zip(costs)
        .map(|((&ni, &wi), &ci)| ci * pow0(ni as f64, p) * pow0(wi, 1.0 - p))
        .sum()
}

/// Checks that `w >= 0` sums to a positive integer `N` (within `1e-9`) and
/// returns `N` together with `w` rescaled to sum to exactly `N`.
fn integral_total(w: &[f64]) -> Result<(u64, Vec<f64>)> {
    let sum: f64 = w.iter().sum();
    if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(DesignError::BadBudget { sum });
    }
    let total = sum.round();
    if total < 1.0 || (sum - total).abs() > 1e-9 * total {
        return Err(DesignError::BadBudget { sum });
    }
    let w = if sum == total {
        w.to_vec()
    } else {
        w.iter().map(|x| x * total / sum).collect()
    };
    Ok((total as u64, w))
}

/// Indices sorted by nonincreasing weight; ties keep index order.
fn sorted_order(w: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    order
}

/// Incremental rounding: starting from one unit on the largest weight, adds
/// `N - 1` units one at a time, each to the coordinate with the largest
/// increment `((n_i+1)^p - n_i^p) w_i^{1-p}`.
///
/// Returns a design maximizing `sum n_i^p w_i^{1-p}` over `sum n_i = N`.
/// Since the optimum is nonincreasing along the sorted weights, only the
/// first coordinate and coordinates with `n_i + 1 <= n_{i-1}` are examined.
pub fn incremental_rounding(w: &[f64], p: f64) -> Result<RoundingResult> {
    let (total, w) = integral_total(w)?;
    let order = sorted_order(&w);
    let sorted: Vec<f64> = order.iter().map(|&i| w[i]).collect();
    let lifted: Vec<f64> = sorted.iter().map(|&x| pow0(x, 1.0 - p)).collect();
    let mut n = vec![0u64; w.len()];
    n[0] = 1;
    for _ in 1..total {
        let mut best = 0;
        let mut best_gain = f64::NEG_INFINITY;
        for i in 0..n.len() {
            if i > 0 && n[i] + 1 > n[i - 1] {
                continue;
            }
            let gain = (pow0((n[i] + 1) as f64, p) - pow0(n[i] as f64, p)) * lifted[i];
            if gain > best_gain {
                best_gain = gain;
                best = i;
            }
        }
        n[best] += 1;
    }
    let mut design = vec![0u64; w.len()];
    for (k, &i) in order.iter().enumerate() {
        design[i] = n[k];
    }
    let value = surrogate(&design, &w, p);
    Ok(RoundingResult {
        design: IntegerDesign::new(design),
        surrogate: value,
        method: RoundingMethod::Incremental,
    })
}

/// Binary design on the `n` largest weights (ties by lowest index).
pub fn top_n_binary(w: &[f64], n: usize, p: f64) -> Result<RoundingResult> {
    if n > w.len() {
        return Err(DesignError::Inapplicable(format!(
            "cannot select {n} distinct atoms out of {}",
            w.len()
        )));
    }
    let order = sorted_order(w);
    let design = IntegerDesign::from_set(w.len(), &order[..n]);
    let value = surrogate(&design.n, w, p);
    Ok(RoundingResult {
        design,
        surrogate: value,
        method: RoundingMethod::TopN,
    })
}

/// Efficient apportionment of `w` (summing to `N`) on its support.
///
/// Starts from `n_i = ceil((N - s'/2) w_i / N)` where `s'` is the support
/// size, then increments `argmin n_i / w_i` or decrements
/// `argmax (n_i - 1) / w_i` until `sum n_i = N`. Ties go to the lowest index.
pub fn apportionment(w: &[f64], p: f64) -> Result<RoundingResult> {
    let (total, w) = integral_total(w)?;
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    let s_prime = support.len();
    if (total as usize) < s_prime {
        return Err(DesignError::BudgetTooSmall {
            budget: total as usize,
            support: s_prime,
        });
    }
    let nf = total as f64;
    let multiplier = nf - 0.5 * s_prime as f64;
    let mut n = vec![0u64; w.len()];
    for &i in &support {
        n[i] = (multiplier * w[i] / nf).ceil() as u64;
    }
    let mut sum: u64 = n.iter().sum();
    while sum < total {
        let j = pick(&support, |i| n[i] as f64 / w[i], |a, b| a < b);
        n[j] += 1;
        sum += 1;
    }
    while sum > total {
        let k = pick(&support, |i| (n[i] as f64 - 1.0) / w[i], |a, b| a > b);
        n[k] -= 1;
        sum -= 1;
    }
    let value = surrogate(&n, &w, p);
    Ok(RoundingResult {
        design: IntegerDesign::new(n),
        surrogate: value,
        method: RoundingMethod::Apportionment,
    })
}

fn pick(idx: &[usize], key: impl Fn(usize) -> f64, better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = idx[0];
    let mut best_key = key(best);
    for &i in &idx[1..] {
        let k = key(i);
        if better(k, best_key) {
            best = i;
            best_key = k;
        }
    }
    best
}

/// Default limit on `(scaled budget + 1) * atoms` for [`budgeted_dp`].
pub const DP_STATE_CAP: u128 = 1_000_000;
/// Limit on the total number of DP transitions.
pub const DP_WORK_CAP: u128 = 200_000_000;

/// Number of decimal places of a cost written as a decimal literal.
fn decimal_places(x: f64) -> Option<u32> {
    if !(x.is_finite() && x >= 0.0) {
        return None;
    }
    (0..=9).find(|&d| {
        let y = x * 10f64.powi(d as i32);
        (y - y.round()).abs() <= (4.0 * f64::EPSILON * y.abs()).max(1e-6)
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Costs and budget rescaled to integers by their common decimal
/// denominator, then divided by their gcd.
pub fn integer_costs(costs: &[f64], budget: f64) -> Result<(Vec<u64>, u64)> {
    let mut places = 0;
    for &c in costs.iter().chain(std::iter::once(&budget)) {
        places = places.max(decimal_places(c).ok_or(DesignError::IrrationalCost(c))?);
    }
    let factor = 10f64.powi(places as i32);
    let mut ints: Vec<u64> = costs.iter().map(|c| (c * factor).round() as u64).collect();
    let mut b = (budget * factor).round() as u64;
    let g = ints.iter().fold(b, |acc, &c| gcd(acc, c));
    if g > 1 {
        ints.iter_mut().for_each(|c| *c /= g);
        b /= g;
    }
    Ok((ints, b))
}

/// Maximizes `sum c_i n_i^p w_i^{1-p}` subject to `sum c_i n_i <= B` and
/// `n_i <= max_rep_i`, by dynamic programming over (atom prefix, residual
/// integer budget).
pub fn budgeted_dp(
    w: &[f64],
    costs: &[f64],
    budget: f64,
    p: f64,
    max_rep: Option<&[u64]>,
) -> Result<RoundingResult> {
    let s = w.len();
    if costs.len() != s || max_rep.is_some_and(|r| r.len() != s) {
        return Err(DesignError::DimensionMismatch(format!(
            "{} weights, {} costs",
            s,
            costs.len()
        )));
    }
    let (int_costs, int_budget) = integer_costs(costs, budget)?;
    let b = int_budget as usize;
    let states = (int_budget as u128 + 1) * s as u128;
    if states > DP_STATE_CAP {
        return Err(DesignError::BudgetScaleOverflow {
            states,
            cap: DP_STATE_CAP,
        });
    }
    let caps: Vec<u64> = (0..s)
        .map(|i| {
            let by_budget = int_budget.checked_div(int_costs[i]).unwrap_or(0);
            max_rep.map_or(by_budget, |r| r[i].min(by_budget))
        })
        .collect();
    let work: u128 = caps
        .iter()
        .map(|&c| (b as u128 + 1) * (c as u128 + 1))
        .sum();
    if work > DP_WORK_CAP {
        return Err(DesignError::BudgetScaleOverflow {
            states: work,
            cap: DP_WORK_CAP,
        });
    }

    // value[b]: best surrogate over the processed prefix with residual budget b.
    let mut value = vec![0.0_f64; b + 1];
    let mut choice = vec![vec![0u64; b + 1]; s];
    for i in 0..s {
        let lifted = pow0(w[i], 1.0 - p);
        let ci = int_costs[i] as usize;
        let mut next = value.clone();
        for budget_left in 0..=b {
            let mut best = value[budget_left];
            let mut best_k = 0;
            for k in 1..=caps[i] as usize {
                let spent = k * ci;
                if spent > budget_left {
                    break;
                }
                let v = value[budget_left - spent] + costs[i] * pow0(k as f64, p) * lifted;
                if v > best {
                    best = v;
                    best_k = k as u64;
                }
            }
            next[budget_left] = best;
            choice[i][budget_left] = best_k;
        }
        value = next;
    }
    let mut n = vec![0u64; s];
    let mut left = b;
    for i in (0..s).rev() {
        let k = choice[i][left];
        n[i] = k;
        left -= k as usize * int_costs[i] as usize;
    }
    let value = budgeted_surrogate(&n, w, costs, p);
    Ok(RoundingResult {
        design: IntegerDesign::new(n),
        surrogate: value,
        method: RoundingMethod::BudgetedDp,
    })
}
