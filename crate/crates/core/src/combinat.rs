//! Greedy algorithms for the discrete problems.
//!
//! All selection rules break ties (objective values within a relative `1e-12`)
//! by the lowest atom index, so lazy and plain evaluation agree pick for pick.

use serde::{Deserialize, Serialize};

use crate::error::{DesignError, Result};
use crate::instance::{BudgetMode, DesignProblem, IntegerDesign};

const TIE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyMode {
    /// Pool with `N` copies of each atom.
    Replicated,
    /// Each atom at most once.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyPick {
    pub index: usize,
    pub gain: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub picks: Vec<GreedyPick>,
    /// Number of `phi_p` evaluations.
    pub evaluations: u64,
}

/// `phi_p` with an evaluation counter.
struct Oracle<'a> {
    problem: &'a DesignProblem,
    evaluations: u64,
}

impl<'a> Oracle<'a> {
    fn new(problem: &'a DesignProblem) -> Self {
        Self {
            problem,
            evaluations: 0,
        }
    }

    fn phi(&mut self, n: &[u64]) -> Result<f64> {
        self.evaluations += 1;
        let design: Vec<f64> = n.iter().map(|&x| x as f64).collect();
        self.problem.phi(&design)
    }

    /// `phi_p(n + e_i)`.
    fn phi_plus(&mut self, n: &mut [u64], i: usize) -> Result<f64> {
        n[i] += 1;
        let v = self.phi(n);
        n[i] -= 1;
        v
    }
}

fn tie_tol(scale: f64) -> f64 {
    TIE_RTOL * scale.abs().max(1.0)
}

/// Lowest index whose score is within tolerance of the maximum.
fn select(scores: &[(usize, f64)], tol: f64) -> Option<(usize, f64)> {
    let max = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .filter(|s| s.1 >= max - tol)
        .min_by_key(|s| s.0)
        .copied()
}

/// Greedy maximization of `phi_p` over designs with `sum n_i = N`.
///
/// Each of the `N` steps adds the unit increment maximizing `phi_p(n + e_i)`.
/// In binary mode every atom is used at most once and the loop stops after
/// `min(N, s)` picks. With `lazy`, marginal gains from earlier steps are kept
/// as upper bounds (valid by submodularity) and only candidates that may still
/// reach the maximum are re-evaluated.
pub fn greedy(
    problem: &DesignProblem,
    mode: GreedyMode,
    lazy: bool,
) -> Result<(IntegerDesign, GreedyTrace)> {
    let total = problem.replication().ok_or_else(|| {
        DesignError::Inapplicable("greedy requires a replication budget N".into())
    })?;
    let s = problem.s();
    let steps = match mode {
        GreedyMode::Replicated => total as usize,
        GreedyMode::Binary => (total as usize).min(s),
    };
    let mut oracle = Oracle::new(problem);
    let mut n = vec![0u64; s];
    let mut current = 0.0;
    let mut picks = Vec::with_capacity(steps);
    let mut bounds = vec![f64::INFINITY; s];
    for _ in 0..steps {
        let candidates: Vec<usize> = (0..s)
            .filter(|&i| mode == GreedyMode::Replicated || n[i] == 0)
            .collect();
        let tol = tie_tol(current);
        let mut scores = Vec::new();
        if lazy {
            let mut order = candidates;
            order.sort_by(|&a, &b| bounds[b].total_cmp(&bounds[a]).then(a.cmp(&b)));
            let mut best = f64::NEG_INFINITY;
            for i in order {
                if bounds[i] < best - 2.0 * tol {
                    break;
                }
                let gain = oracle.phi_plus(&mut n, i)? - current;
                bounds[i] = gain;
                best = best.max(gain);
                scores.push((i, gain));
            }
        } else {
            for i in candidates {
                scores.push((i, oracle.phi_plus(&mut n, i)? - current));
            }
        }
        let (index, gain) = select(&scores, tol).expect("at least one atom is available");
        n[index] += 1;
        current += gain;
        picks.push(GreedyPick {
            index,
            gain,
            objective: current,
        });
    }
    let design = match mode {
        GreedyMode::Replicated => IntegerDesign::new(n),
        GreedyMode::Binary => IntegerDesign::binary(n),
    };
    Ok((
        design,
        GreedyTrace {
            picks,
            evaluations: oracle.evaluations,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundSet {
    /// `E = [s]`, each atom once.
    Binary,
    /// `E` holds `N` copies of each atom.
    Replicated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    pub value: f64,
    pub ground_set: GroundSet,
    /// Atoms with `phi_p({i}) = 0`, left out of the maximum.
    pub skipped: Vec<usize>,
}

/// Total curvature `c = max_i 1 - (phi(E) - phi(E - {i})) / phi({i})`,
/// clamped to `[0, 1]`.
pub fn total_curvature(problem: &DesignProblem, ground_set: GroundSet) -> Result<Curvature> {
    let s = problem.s();
    let copies = match ground_set {
        GroundSet::Binary => 1,
        GroundSet::Replicated => problem.replication().ok_or_else(|| {
            DesignError::Inapplicable(
                "the replicated ground set requires a replication budget N".into(),
            )
        })?,
    };
    let mut oracle = Oracle::new(problem);
    let mut full = vec![copies; s];
    let phi_full = oracle.phi(&full)?;
    let mut value = f64::NEG_INFINITY;
    let mut skipped = Vec::new();
    let mut single = vec![0u64; s];
    for i in 0..s {
        single[i] = 1;
        let alone = oracle.phi(&single)?;
        single[i] = 0;
        if alone <= 0.0 {
            skipped.push(i);
            continue;
        }
        full[i] -= 1;
        let without = oracle.phi(&full)?;
        full[i] += 1;
        value = value.max(1.0 - (phi_full - without) / alone);
    }
    if skipped.len() == s {
        return Err(DesignError::AllAtomsNull);
    }
    Ok(Curvature {
        value: value.clamp(0.0, 1.0),
        ground_set,
        skipped,
    })
}

fn budget_of(problem: &DesignProblem) -> Result<(Vec<f64>, f64)> {
    match problem.mode() {
        BudgetMode::Budget { costs, budget } => Ok((costs.clone(), *budget)),
        BudgetMode::Replication { .. } => Err(DesignError::Inapplicable(
            "budgeted greedy requires costs and a budget B".into(),
        )),
    }
}

fn slack(budget: f64) -> f64 {
    1e-9 * budget.abs().max(1.0)
}

/// Cost-benefit greedy from `n`: repeatedly adds the affordable increment with
/// the largest `(phi(n + e_i) - phi(n)) / c_i` until nothing fits.
fn cost_benefit_completion(
    oracle: &mut Oracle,
    costs: &[f64],
    budget: f64,
    mut n: Vec<u64>,
) -> Result<(Vec<u64>, f64)> {
    let mut spent: f64 = n.iter().zip(costs).map(|(&k, c)| k as f64 * c).sum();
    let mut current = oracle.phi(&n)?;
    loop {
        let mut scores = Vec::new();
        let mut values = Vec::new();
        for (i, &c) in costs.iter().enumerate() {
            if spent + c <= budget + slack(budget) {
                let v = oracle.phi_plus(&mut n, i)?;
                scores.push((i, (v - current) / c));
                values.push(v);
            }
        }
        let Some((i, _)) = select(&scores, tie_tol(current)) else {
            return Ok((n, current));
        };
        let pos = scores
            .iter()
            .position(|s| s.0 == i)
            .expect("selected from scores");
        n[i] += 1;
        spent += costs[i];
        current = values[pos];
    }
}

/// Better of the cost-benefit greedy and the best single affordable atom
/// (ties favor the greedy design).
pub fn greedy_budgeted_wolsey(problem: &DesignProblem) -> Result<IntegerDesign> {
    let (costs, budget) = budget_of(problem)?;
    let affordable: Vec<usize> = (0..costs.len())
        .filter(|&i| costs[i] <= budget + slack(budget))
        .collect();
    if affordable.is_empty() {
        return Err(DesignError::NothingAffordable { budget });
    }
    let mut oracle = Oracle::new(problem);
    let (greedy_n, greedy_value) =
        cost_benefit_completion(&mut oracle, &costs, budget, vec![0; costs.len()])?;
    let mut zero = vec![0u64; costs.len()];
    let mut singles = Vec::new();
    for &i in &affordable {
        singles.push((i, oracle.phi_plus(&mut zero, i)?));
    }
    let (best_i, best_single) = select(&singles, tie_tol(greedy_value)).expect("nonempty");
    if best_single > greedy_value + tie_tol(greedy_value) {
        zero[best_i] = 1;
        Ok(IntegerDesign::new(zero))
    } else {
        Ok(IntegerDesign::new(greedy_n))
    }
}

/// Default limit on `s` for [`sviridenko_budgeted`].
pub const SVIRIDENKO_CAP: usize = 25;

/// Partial enumeration: every feasible seed multiset of at most three unit
/// increments is completed by the cost-benefit greedy; the best result wins
/// (earlier seeds win ties).
pub fn sviridenko_budgeted(problem: &DesignProblem, cap_s: usize) -> Result<IntegerDesign> {
    let (costs, budget) = budget_of(problem)?;
    let s = costs.len();
    if s > cap_s {
        return Err(DesignError::TooLarge { s, cap: cap_s });
    }
    if costs.iter().all(|&c| c > budget + slack(budget)) {
        return Err(DesignError::NothingAffordable { budget });
    }
    let mut seeds: Vec<Vec<usize>> = vec![vec![]];
    for a in 0..s {
        seeds.push(vec![a]);
        for b in a..s {
            seeds.push(vec![a, b]);
            for c in b..s {
                seeds.push(vec![a, b, c]);
            }
        }
    }
    seeds.sort_by_key(|seed| seed.len());
    let mut oracle = Oracle::new(problem);
    let mut best: Option<(Vec<u64>, f64)> = None;
    for seed in seeds {
        let cost: f64 = seed.iter().map(|&i| costs[i]).sum();
        if cost > budget + slack(budget) {
            continue;
        }
        let mut n = vec![0u64; s];
        for &i in &seed {
            n[i] += 1;
        }
        let (n, value) = cost_benefit_completion(&mut oracle, &costs, budget, n)?;
        let improves = match &best {
            None => true,
            Some((_, v)) => value > v + tie_tol(*v),
        };
        if improves {
            best = Some((n, value));
        }
    }
    Ok(IntegerDesign::new(
        best.expect("the empty seed is always feasible").0,
    ))
}
