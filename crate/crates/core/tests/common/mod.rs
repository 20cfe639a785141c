#![allow(dead_code)]

use nalgebra::DMatrix;
use optdesign::instance::{generate, BudgetMode, DesignProblem, GeneratorKind, GeneratorParams};
use optdesign::spectra::{eig_psd, info_matrix, RankTol, SymmetricMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `G G^T` with `G` an `m x rank` Gaussian matrix.
pub fn random_psd(rng: &mut ChaCha8Rng, m: usize, rank: usize) -> SymmetricMatrix {
    let g = DMatrix::from_fn(m, rank, |_, _| rng.sample::<f64, _>(StandardNormal));
    SymmetricMatrix::new(&g * g.transpose()).unwrap()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, m: usize) -> SymmetricMatrix {
    let g = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    SymmetricMatrix::new(&g + g.transpose()).unwrap()
}

/// Largest condition number of `M_F(1)` accepted for random instances.
pub const MAX_CONDITION: f64 = 1e3;

/// Gaussian instance, redrawn until `M_F(1)` has condition number at most
/// [`MAX_CONDITION`] whenever `s * rows >= m` makes full rank possible.
pub fn random_problem(seed: u64, s: usize, m: usize, rows: usize, p: f64, n: u64) -> DesignProblem {
    let params = GeneratorParams {
        s,
        m,
        rows,
        p,
        n,
        ..Default::default()
    };
    (0..)
        .map(|k| {
            generate(
                GeneratorKind::RandomPsd,
                &params,
                seed.wrapping_add(k * 1_000_003),
            )
            .unwrap()
        })
        .find(|prob| {
            if s * rows < m {
                return true;
            }
            let full = info_matrix(&vec![1.0; s], prob.atoms()).unwrap();
            let spec = eig_psd(&full, RankTol::Auto).unwrap();
            spec.lambda_max() <= MAX_CONDITION * spec.lambda_min()
        })
        .unwrap()
}

/// Budgeted instance with costs from `{0.5, 1.0, ..., 2.0}`.
pub fn random_budget_problem(seed: u64, s: usize, m: usize, p: f64, budget: f64) -> DesignProblem {
    let mut r = rng(seed ^ 0x5eed);
    let costs: Vec<f64> = (0..s).map(|_| 0.5 * r.random_range(1..=4) as f64).collect();
    let budget = budget.max(costs.iter().cloned().fold(f64::INFINITY, f64::min));
    random_problem(seed, s, m, 1, p, 1)
        .with_mode(BudgetMode::Budget { costs, budget })
        .unwrap()
}

/// Point on the scaled simplex `{w >= 0, sum scale_i^{-1} w_i = 1}`.
pub fn random_feasible_weights(rng: &mut ChaCha8Rng, problem: &DesignProblem) -> Vec<f64> {
    let total = problem.total_budget();
    let costs = problem.unit_costs();
    let e: Vec<f64> = (0..problem.s()).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = e.iter().sum();
    e.iter()
        .zip(&costs)
        .map(|(x, c)| x / sum * total / c)
        .collect()
}

pub fn phi_int(problem: &DesignProblem, n: &[u64]) -> f64 {
    problem
        .phi(&n.iter().map(|&x| x as f64).collect::<Vec<_>>())
        .unwrap()
}

/// All compositions of `total` into `parts` nonnegative integers.
pub fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    fn rec(left: u64, parts: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// All 0/1 vectors of length `s` with exactly `k` ones.
pub fn subsets(s: usize, k: usize) -> Vec<Vec<u64>> {
    (0u32..1 << s)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..s).map(|i| ((mask >> i) & 1) as u64).collect())
        .collect()
}

/// All `n` with `sum c_i n_i <= B`.
pub fn budget_designs(costs: &[f64], budget: f64) -> Vec<Vec<u64>> {
    fn rec(i: usize, left: f64, costs: &[f64], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == costs.len() {
            out.push(cur.clone());
            return;
        }
        let mut k = 0u64;
        while k as f64 * costs[i] <= left + 1e-9 {
            cur.push(k);
            rec(i + 1, left - k as f64 * costs[i], costs, cur, out);
            cur.pop();
            k += 1;
        }
    }
    let mut out = Vec::new();
    rec(0, budget, costs, &mut Vec::new(), &mut out);
    out
}

pub fn best_of(problem: &DesignProblem, designs: &[Vec<u64>]) -> f64 {
    designs
        .iter()
        .map(|n| phi_int(problem, n))
        .fold(0.0, f64::max)
}

/// `sum_i n_i^p w_i^{1-p}` with `0^0 = 0`, evaluated directly.
pub fn surrogate_oracle(n: &[u64], w: &[f64], p: f64) -> f64 {
    let pw = |x: f64, e: f64| if x == 0.0 { 0.0 } else { x.powf(e) };
    n.iter()
        .zip(w)
        .map(|(&k, &x)| pw(k as f64, p) * pw(x, 1.0 - p))
        .sum()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
