//! Acceptance gate: one line per criterion, nonzero exit if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use optdesign::bounds::{
    lemma_floor_bound, posterior_binary, posterior_budgeted, posterior_replicated,
    prior_factor_at_ratio, prior_factor_binary, prior_factor_replicated, sviridenko_factor,
    wolsey_beta, wolsey_factor, LemmaCondition,
};
use optdesign::combinat::{
    greedy, greedy_budgeted_wolsey, sviridenko_budgeted, GreedyMode, SVIRIDENKO_CAP,
};
use optdesign::instance::{BudgetMode, DesignProblem, IntegerDesign};
use optdesign::relax::{solve_continuous, RelaxOptions};
use optdesign::rounding::{incremental_rounding, top_n_binary};
use optdesign::spectra::{
    eig_psd, frechet_derivative, gradient_trace, info_matrix, kiefer_phi, submodularity_slack,
    trace_power, PsdAtom, RankTol, ScalarFn, SymmetricMatrix,
};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Collected failures of one criterion.
#[derive(Default)]
struct Checks {
    total: usize,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

type Criterion = (&'static str, fn(&mut Checks));

fn main() {
    let criteria: [Criterion; 10] = [
        ("submodularity of trace x^p", submodularity),
        ("greedy guarantee", greedy_guarantee),
        ("relaxation certificate", relaxation_certificate),
        (
            "incremental rounding surrogate optimality",
            surrogate_optimality,
        ),
        ("posterior bounds", posterior_bounds),
        ("prior bounds", prior_bounds),
        ("rank limit of trace M^p", rank_limit),
        ("lemma floor bound", lemma_bound),
        ("budgeted factors", budgeted_factors),
        ("Frechet derivative identities", frechet_identities),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut checks = Checks::default();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&mut checks)));
        let secs = start.elapsed().as_secs_f64();
        let pass = outcome.is_ok() && checks.failures.is_empty();
        println!(
            "criterion {:>2} {} {name}: {} checks, {} failed ({secs:.1}s)",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            checks.total,
            checks.failures.len() + usize::from(outcome.is_err()),
        );
        if outcome.is_err() {
            println!("    panicked");
        }
        for f in checks.failures.iter().take(8) {
            println!("    {f}");
        }
        if checks.failures.len() > 8 {
            println!("    ... {} more", checks.failures.len() - 8);
        }
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}

fn submodularity(c: &mut Checks) {
    let mut r = rng(1);
    let tol = RankTol::Auto;
    for t in 0..1000 {
        let m = r.random_range(2..=4);
        let draw = |r: &mut _| {
            let rank = rand::Rng::random_range(r, 1..=m);
            random_psd(r, m, rank)
        };
        let (x, y, z) = (draw(&mut r), draw(&mut r), draw(&mut r));
        for k in 1..=10 {
            let p = k as f64 / 10.0;
            let slack = submodularity_slack(&x, &y, &z, p, tol).unwrap();
            let scale = trace_power(&x.sum(&y).sum(&z), p, tol).unwrap().max(1.0);
            c.check(slack >= -1e-9 * scale, || {
                format!("triple {t}, p={p}: slack {slack:e}")
            });
        }
    }
    // set-function form on random instances
    let mut r = rng(2);
    for t in 0..200 {
        let s = 6;
        let p = [0.0, 0.2, 0.5, 0.8, 1.0][t % 5];
        let prob = random_problem(1000 + t as u64, s, 3, 1, p, 1);
        let i: Vec<u64> = (0..s).map(|_| r.random_range(0..=2)).collect();
        let j: Vec<u64> = (0..s).map(|_| r.random_range(0..=2)).collect();
        let union: Vec<u64> = i.iter().zip(&j).map(|(a, b)| *a.max(b)).collect();
        let inter: Vec<u64> = i.iter().zip(&j).map(|(a, b)| *a.min(b)).collect();
        let lhs = phi_int(&prob, &i) + phi_int(&prob, &j);
        let rhs = phi_int(&prob, &union) + phi_int(&prob, &inter);
        c.check(lhs >= rhs - 1e-9 * rhs.max(1.0), || {
            format!("pair {t}: {lhs} < {rhs}")
        });
    }
}

fn greedy_guarantee(c: &mut Checks) {
    let mut r = rng(3);
    let ps = [0.0, 0.25, 0.5, 0.75, 1.0];
    for t in 0..50u64 {
        let s = r.random_range(3..=8);
        let n = r.random_range(1..=4u64);
        let p = ps[t as usize % 5];
        let m = r.random_range(2..=4);
        let prob = random_problem(2000 + t, s, m, r.random_range(1..=2), p, n);
        let factor = 1.0 - (1.0 - 1.0 / n as f64).powi(n as i32);
        let (plain, plain_trace) = greedy(&prob, GreedyMode::Replicated, false).unwrap();
        let (lazy, lazy_trace) = greedy(&prob, GreedyMode::Replicated, true).unwrap();
        let value = phi_int(&prob, &plain.n);
        let opt = best_of(&prob, &compositions(n, s));
        c.check(value >= factor * opt - 1e-9 * opt.max(1.0), || {
            format!("instance {t}: greedy {value} < {factor} * {opt}")
        });
        if p == 1.0 {
            c.check((value - opt).abs() <= 1e-12 * opt, || {
                format!("instance {t}: p=1 greedy {value} != {opt}")
            });
        }
        c.check(
            plain == lazy && plain_trace.picks == lazy_trace.picks,
            || format!("instance {t}: lazy and plain greedy differ"),
        );

        let (bin, bin_trace) = greedy(&prob, GreedyMode::Binary, false).unwrap();
        let (bin_lazy, bin_lazy_trace) = greedy(&prob, GreedyMode::Binary, true).unwrap();
        let k = (n as usize).min(s);
        let opt_bin = best_of(&prob, &subsets(s, k));
        let value_bin = phi_int(&prob, &bin.n);
        c.check(
            value_bin >= factor * opt_bin - 1e-9 * opt_bin.max(1.0),
            || format!("instance {t}: binary greedy {value_bin} < {factor} * {opt_bin}"),
        );
        c.check(
            bin == bin_lazy && bin_trace.picks == bin_lazy_trace.picks,
            || format!("instance {t}: lazy and plain binary greedy differ"),
        );
    }
}

fn two_atom(p: f64, n: u64) -> DesignProblem {
    let atoms = vec![
        PsdAtom::from_matrix("a", SymmetricMatrix::diagonal(&[1.0, 0.0])).unwrap(),
        PsdAtom::from_matrix("b", SymmetricMatrix::diagonal(&[0.0, 1.0])).unwrap(),
    ];
    DesignProblem::new("two", atoms, p, BudgetMode::Replication { n }).unwrap()
}

/// Random replication and budget instances for the relaxation suites.
fn relaxation_suite(count: u64) -> Vec<DesignProblem> {
    let mut r = rng(4);
    let ps = [0.0, 0.25, 0.5, 0.75];
    (0..count)
        .map(|t| {
            let s = r.random_range(3..=8);
            let m = r.random_range(2..=s.min(4));
            let p = ps[t as usize % 4];
            if t % 3 == 2 {
                random_budget_problem(3000 + t, s, m, p, r.random_range(2..=5) as f64)
            } else {
                random_problem(
                    3000 + t,
                    s,
                    m,
                    r.random_range(1..=2),
                    p,
                    r.random_range(1..=6),
                )
            }
        })
        .collect()
}

fn relaxation_certificate(c: &mut Checks) {
    let opts = RelaxOptions::default();
    for p in [0.0, 0.5] {
        for n in [1, 4] {
            let cert = solve_continuous(&two_atom(p, n), &opts).unwrap();
            let half = 0.5 * n as f64;
            c.check(
                cert.weights
                    .w
                    .iter()
                    .all(|w| (w - half).abs() <= 1e-6 * n as f64),
                || format!("two-atom p={p} N={n}: {:?}", cert.weights.w),
            );
        }
    }
    let mut r = rng(5);
    for (t, prob) in relaxation_suite(30).iter().enumerate() {
        let cert = solve_continuous(prob, &opts).unwrap();
        c.check(cert.converged && cert.gap <= 1e-6, || {
            format!("instance {t}: gap {:e}", cert.gap)
        });
        let p = prob.p();
        let at = |w: &[f64]| {
            kiefer_phi(&info_matrix(w, prob.atoms()).unwrap(), p, RankTol::Auto).unwrap()
        };
        let best = at(&cert.weights.w);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let w = random_feasible_weights(&mut r, prob);
            worst = worst.max(at(&w) / best - 1.0);
        }
        c.check(worst <= 1e-6, || {
            format!("instance {t}: a probe beats the optimum by {worst:e}")
        });
    }
}

fn surrogate_optimality(c: &mut Checks) {
    let r = incremental_rounding(&[1.5, 0.5], 0.5).unwrap();
    let exact = 1.5f64.sqrt() + 0.5f64.sqrt();
    c.check(r.design.n == vec![1, 1], || {
        format!("worked example design {:?}", r.design.n)
    });
    c.check((r.surrogate - exact).abs() <= 1e-9, || {
        format!("worked example value {}", r.surrogate)
    });
    c.check((r.surrogate - 1.93185).abs() < 5e-6, || {
        format!("worked example value {}", r.surrogate)
    });

    let mut rng = rng(6);
    let ps = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
    for s in 2..=7usize {
        for n in 1..=10u64 {
            if binomial(s as u64 + n - 1, n) > 100_000 {
                continue;
            }
            let all = compositions(n, s);
            for &p in &ps {
                for _ in 0..3 {
                    let raw: Vec<f64> = (0..s)
                        .map(|_| {
                            if rng.random_bool(0.2) {
                                0.0
                            } else {
                                Exp1.sample(&mut rng)
                            }
                        })
                        .collect();
                    let sum: f64 = raw.iter().sum();
                    if sum == 0.0 {
                        continue;
                    }
                    let w: Vec<f64> = raw.iter().map(|x| x * n as f64 / sum).collect();
                    let got = incremental_rounding(&w, p).unwrap();
                    // the rounder rescales to an exact sum; evaluate on the same weights
                    let total: f64 = w.iter().sum();
                    let w_exact: Vec<f64> = if total == n as f64 {
                        w.clone()
                    } else {
                        w.iter().map(|x| x * n as f64 / total).collect()
                    };
                    let best = all
                        .iter()
                        .map(|k| surrogate_oracle(k, &w_exact, p))
                        .fold(0.0, f64::max);
                    let value = surrogate_oracle(&got.design.n, &w_exact, p);
                    c.check(value == best && got.design.total() == n, || {
                        format!("s={s} N={n} p={p}: {value} vs enumeration {best}")
                    });
                }
            }
        }
    }
}

fn posterior_bounds(c: &mut Checks) {
    let opts = RelaxOptions::default();
    let mut r = rng(7);
    for (t, prob) in relaxation_suite(50).iter().enumerate() {
        let cert = solve_continuous(prob, &opts).unwrap();
        let w = &cert.weights.w;
        let p = prob.p();
        let slack = 10.0 * cert.gap.max(0.0) + 1e-9;
        let s = prob.s();
        for _ in 0..20 {
            let (design, bound) = match prob.mode() {
                BudgetMode::Replication { n } => {
                    let n = *n;
                    if r.random_bool(0.5) {
                        let mut d = vec![0u64; s];
                        for _ in 0..r.random_range(1..=n) {
                            d[r.random_range(0..s)] += 1;
                        }
                        let design = IntegerDesign::new(d);
                        let b = posterior_replicated(&design, w, n, p);
                        (design, b)
                    } else {
                        let k = r.random_range(1..=(n as usize).min(s));
                        let mut idx: Vec<usize> = (0..s).collect();
                        for i in 0..k {
                            let j = r.random_range(i..s);
                            idx.swap(i, j);
                        }
                        let design = IntegerDesign::from_set(s, &idx[..k]);
                        let b = posterior_binary(&design, w, n, p);
                        (design, b)
                    }
                }
                BudgetMode::Budget { costs, budget } => {
                    let mut d = vec![0u64; s];
                    let mut left = *budget;
                    for _ in 0..8 {
                        let i = r.random_range(0..s);
                        if costs[i] <= left + 1e-9 {
                            d[i] += 1;
                            left -= costs[i];
                        }
                    }
                    let design = IntegerDesign::new(d);
                    let b = posterior_budgeted(&design, w, costs, *budget, p);
                    (design, b)
                }
            };
            let ratio = phi_int(prob, &design.n) / cert.objective;
            c.check(bound <= ratio + slack, || {
                format!(
                    "instance {t}: bound {bound} > ratio {ratio} for {:?}",
                    design.n
                )
            });
        }
    }
}

/// Floating-point evaluation noise allowed on top of `10 * gap`.
const EVAL_SLACK: f64 = 1e-9;

fn prior_bounds(c: &mut Checks) {
    let opts = RelaxOptions::default();
    let mut r = rng(8);
    let ps = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    for t in 0..40u64 {
        let s = r.random_range(3..=9);
        let n = r.random_range(1..=2 * s as u64);
        let p = ps[t as usize % ps.len()];
        let m = r.random_range(2..=3);
        let prob = random_problem(4000 + t, s, m, 1, p, n);
        let cert = solve_continuous(&prob, &opts).unwrap();
        let slack = 10.0 * cert.gap.max(0.0) + EVAL_SLACK;
        let rounded = incremental_rounding(&cert.weights.w, p).unwrap();
        let ratio = phi_int(&prob, &rounded.design.n) / cert.objective;
        let f = prior_factor_replicated(p, n, s);
        c.check(ratio >= f - slack, || {
            format!("instance {t}: incremental ratio {ratio} < F {f}")
        });
        if let Some(fb) = prior_factor_binary(p, n, s) {
            let top = top_n_binary(&cert.weights.w, n as usize, p).unwrap();
            let ratio = phi_int(&prob, &top.design.n) / cert.objective;
            c.check(ratio >= fb - slack, || {
                format!("instance {t}: top-N ratio {ratio} < {fb}")
            });
        }
    }
    // small p so that the top-N condition holds on every instance
    for t in 0..20u64 {
        let s = r.random_range(6..=12);
        let n = r.random_range(1..=s as u64 / 2);
        let threshold = 1.0 - (n as f64).ln() / (s as f64).ln();
        let p = threshold * (t as f64 % 4.0) / 3.0;
        let prob = random_problem(4100 + t, s, 3, 1, p, n);
        let cert = solve_continuous(&prob, &opts).unwrap();
        let top = top_n_binary(&cert.weights.w, n as usize, p).unwrap();
        let ratio = phi_int(&prob, &top.design.n) / cert.objective;
        let fb = prior_factor_binary(p, n, s).unwrap();
        c.check(ratio >= fb - 10.0 * cert.gap.max(0.0) - EVAL_SLACK, || {
            format!("top-N {t}: ratio {ratio} < {fb}")
        });
    }

    c.check(prior_factor_replicated(0.0, 5, 5) == 0.75, || {
        "F(0, N=s) != 3/4".into()
    });
    for (n, s) in [(1, 3), (4, 4), (7, 2)] {
        c.check(prior_factor_replicated(1.0, n, s) == 1.0, || {
            format!("F(1, {n}, {s}) != 1")
        });
    }
    for x in [0.1, 0.5, 1.0, 2.0] {
        let grid: Vec<f64> = (0..100)
            .map(|k| prior_factor_at_ratio(k as f64 / 99.0, x))
            .collect();
        c.check(grid.windows(2).all(|w| w[1] >= w[0]), || {
            format!("F not monotone in p at N/s={x}")
        });
        c.check(grid[99] == 1.0, || format!("F(1) != 1 at N/s={x}"));
    }
    // closed form at p = 0 over an (N, s) grid
    for s in 1..=12u64 {
        for n in 1..=12u64 {
            let f = prior_factor_replicated(0.0, n, s as usize);
            let closed = (n as f64 / s as f64).min(1.0 - s as f64 / (4.0 * n as f64));
            c.check((f - closed).abs() <= 1e-12, || {
                format!("p=0, N={n}, s={s}: F={f} but min(N/s, 1-s/(4N))={closed}")
            });
        }
    }
}

fn rank_limit(c: &mut Checks) {
    let mut r = rng(9);
    let mut decade_ratios = Vec::new();
    for t in 0..100 {
        let m = 5;
        let rank = r.random_range(1..m);
        let mat = random_psd(&mut r, m, rank);
        let spec = eig_psd(&mat, RankTol::Auto).unwrap();
        c.check(spec.effective_rank == rank, || {
            format!("matrix {t}: rank {}", spec.effective_rank)
        });
        let logdet = spec.log_pseudo_det();
        let rk = rank as f64;
        for p in [1e-3, 1e-4] {
            let tr = trace_power(&mat, p, RankTol::Auto).unwrap();
            c.check((tr - rk).abs() <= 2.0 * p * logdet.abs(), || {
                format!(
                    "matrix {t}, p={p}: |trace M^p - rank| = {:e}",
                    (tr - rk).abs()
                )
            });
        }
        let err = |p: f64| (trace_power(&mat, p, RankTol::Auto).unwrap() - rk - p * logdet).abs();
        let (e2, e3, e4) = (err(1e-2), err(1e-3), err(1e-4));
        decade_ratios.push((e2 / e3, e3 / e4));
    }
    for (t, (a, b)) in decade_ratios.iter().enumerate() {
        for ratio in [a, b] {
            c.check((10.0..=1000.0).contains(ratio), || {
                format!("matrix {t}: decade error ratio {ratio}")
            });
        }
    }
}

fn lemma_bound(c: &mut Checks) {
    let mut r = rng(10);
    for (s, rr) in [(4usize, 2usize), (6, 3), (8, 2)] {
        let threshold = 1.0 - (rr as f64).ln() / (s as f64).ln();
        let capped_ps = [0.0, 0.25, 0.5, 0.75, 1.0];
        let small_ps = [0.0, threshold / 2.0, threshold];
        // capped vectors: rejection sampling of sorted simplex points with w_i <= 1
        let mut capped = Vec::new();
        while capped.len() < 10_000 {
            let w = sorted_simplex_point(&mut r, s, rr);
            if w[0] <= 1.0 {
                capped.push(w);
            }
        }
        let free: Vec<Vec<f64>> = (0..10_000)
            .map(|_| sorted_simplex_point(&mut r, s, rr))
            .collect();
        for (vectors, cond, ps) in [
            (&capped, LemmaCondition::Capped, &capped_ps[..]),
            (&free, LemmaCondition::SmallP, &small_ps[..]),
        ] {
            for &p in ps {
                let mut min_gap = f64::INFINITY;
                for w in vectors {
                    let check = lemma_floor_bound(w, rr, p, cond).unwrap();
                    c.check(check.hypothesis, || {
                        format!("s={s} r={rr} p={p}: hypothesis fails")
                    });
                    min_gap = min_gap.min(check.lhs - check.rhs);
                }
                c.check(min_gap >= -1e-12, || {
                    format!("s={s} r={rr} p={p} {cond:?}: min lhs - rhs = {min_gap:e}")
                });
            }
        }
        let uniform = vec![rr as f64 / s as f64; s];
        for p in [0.0, 0.3, 0.7] {
            let check = lemma_floor_bound(&uniform, rr, p, LemmaCondition::Capped).unwrap();
            c.check((check.lhs - check.rhs).abs() <= 1e-12, || {
                format!("uniform s={s} r={rr} p={p}")
            });
        }
    }
}

fn sorted_simplex_point(r: &mut rand_chacha::ChaCha8Rng, s: usize, total: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..s).map(|_| Exp1.sample(r)).collect();
    let sum: f64 = e.iter().sum();
    let mut w: Vec<f64> = e.iter().map(|x| x / sum * total as f64).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w
}

fn budgeted_factors(c: &mut Checks) {
    let beta = wolsey_beta();
    c.check((beta.exp() - 2.0 + beta).abs() <= 1e-12, || {
        format!("beta residual at {beta}")
    });
    let factor = wolsey_factor();
    c.check((0.357..=0.358).contains(&factor), || {
        format!("1 - e^-beta = {factor}")
    });
    let mut r = rng(11);
    for t in 0..20u64 {
        let s = r.random_range(3..=5);
        let p = [0.0, 0.3, 0.5, 0.7][t as usize % 4];
        let prob = random_budget_problem(5000 + t, s, 3, p, r.random_range(2..=4) as f64);
        let (costs, budget) = match prob.mode() {
            BudgetMode::Budget { costs, budget } => (costs.clone(), *budget),
            _ => unreachable!(),
        };
        let opt = best_of(&prob, &budget_designs(&costs, budget));
        let wo = greedy_budgeted_wolsey(&prob).unwrap();
        let sv = sviridenko_budgeted(&prob, SVIRIDENKO_CAP).unwrap();
        for (name, design) in [("wolsey", &wo), ("sviridenko", &sv)] {
            c.check(prob.is_feasible(&design.as_f64()), || {
                format!("{name} {t}: infeasible")
            });
        }
        let wv = phi_int(&prob, &wo.n);
        let sv_value = phi_int(&prob, &sv.n);
        c.check(wv >= 0.357 * opt - 1e-9, || {
            format!("instance {t}: wolsey {wv} vs optimum {opt}")
        });
        c.check(sv_value >= sviridenko_factor() * opt - 1e-9, || {
            format!("instance {t}: sviridenko {sv_value} vs optimum {opt}")
        });
    }
}

fn frechet_identities(c: &mut Checks) {
    let mut r = rng(12);
    let tol = RankTol::Auto;
    for t in 0..200 {
        let m = r.random_range(2..=5);
        let mat = random_psd(&mut r, m, m).sum(&SymmetricMatrix::identity(m).scaled(0.1));
        let a = random_symmetric(&mut r, m);
        let b = random_symmetric(&mut r, m);
        let f = if t % 4 == 0 {
            ScalarFn::Log
        } else {
            ScalarFn::Pow(r.random_range(0.05..0.95))
        };
        let lhs = a.trace_product(&frechet_derivative(f, &mat, &b, tol).unwrap());
        let rhs = b.trace_product(&frechet_derivative(f, &mat, &a, tol).unwrap());
        c.check((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0), || {
            format!("triple {t}: {lhs} vs {rhs}")
        });
    }
    for t in 0..50 {
        let m = r.random_range(2..=5);
        let d: Vec<f64> = (0..m).map(|_| r.random_range(0.1..5.0)).collect();
        let h: Vec<f64> = (0..m).map(|_| r.random_range(-2.0..2.0)).collect();
        let p = r.random_range(0.05..0.95);
        let f = ScalarFn::Pow(p);
        let got = frechet_derivative(
            f,
            &SymmetricMatrix::diagonal(&d),
            &SymmetricMatrix::diagonal(&h),
            tol,
        )
        .unwrap();
        for i in 0..m {
            for j in 0..m {
                let expect = if i == j {
                    f.derivative(d[i]) * h[i]
                } else {
                    0.0
                };
                c.check(got.get(i, j) == expect, || {
                    format!(
                        "diagonal {t}: entry ({i},{j}) {} vs {expect}",
                        got.get(i, j)
                    )
                });
            }
        }
    }
    for t in 0..100 {
        let m = r.random_range(2..=4);
        let mat = random_psd(&mut r, m, m).sum(&SymmetricMatrix::identity(m).scaled(0.1));
        let rows = nalgebra::DMatrix::from_fn(1, m, |_, _| r.random_range(-1.0..1.0));
        let atom = PsdAtom::from_rows("a", rows);
        let p = [0.0, 0.2, 0.5, 0.8][t % 4];
        let g = gradient_trace(&mat, p, &atom, tol).unwrap();
        let h = 1e-5 * mat.max_abs_entry();
        let phi = |x: f64| {
            let shifted = mat.sum(&atom.matrix().scaled(x));
            if p == 0.0 {
                eig_psd(&shifted, tol).unwrap().log_pseudo_det()
            } else {
                trace_power(&shifted, p, tol).unwrap() / p
            }
        };
        let fd = (phi(h) - phi(-h)) / (2.0 * h);
        c.check((fd - g).abs() <= 1e-6 * g.abs().max(1e-12), || {
            format!("gradient {t}, p={p}: {g} vs {fd}")
        });
    }
}
