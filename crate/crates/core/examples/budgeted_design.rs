//! Designs under a cost budget: knapsack rounding and two greedy variants.

use optdesign::combinat::{greedy_budgeted_wolsey, sviridenko_budgeted, SVIRIDENKO_CAP};
use optdesign::instance::BudgetMode;
use optdesign::instance::{generate, GeneratorKind, GeneratorParams};
use optdesign::relax::{solve_continuous, RelaxOptions};
use optdesign::rounding::budgeted_dp;

fn main() -> optdesign::error::Result<()> {
    let params = GeneratorParams {
        s: 6,
        m: 3,
        rows: 1,
        p: 0.5,
        budget: Some(6.0),
        ..Default::default()
    };
    let problem = generate(GeneratorKind::RandomPsd, &params, 11)?;
    let BudgetMode::Budget { costs, budget } = problem.mode().clone() else {
        unreachable!("generated with a budget")
    };
    println!("costs {costs:?}, budget {budget}");

    let relax = solve_continuous(&problem, &RelaxOptions::default())?;
    let dp = budgeted_dp(&relax.weights.w, &costs, budget, problem.p(), None)?.design;
    let wolsey = greedy_budgeted_wolsey(&problem)?;
    let sviridenko = sviridenko_budgeted(&problem, SVIRIDENKO_CAP)?;
    for (name, design) in [("dp", dp), ("wolsey", wolsey), ("sviridenko", sviridenko)] {
        let x = design.as_f64();
        println!(
            "{name:<10} n = {:?} cost {:.1} ratio {:.4}",
            design.n,
            problem.budget_used(&x),
            problem.phi(&x)? / relax.objective
        );
    }
    Ok(())
}
