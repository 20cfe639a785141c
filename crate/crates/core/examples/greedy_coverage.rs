//! Greedy selection on a coverage instance, with curvature and guarantees.

use optdesign::bounds::greedy_factor;
use optdesign::combinat::{greedy, total_curvature, GreedyMode, GroundSet};
use optdesign::instance::coverage_problem;

fn main() -> optdesign::error::Result<()> {
    let sets = vec![
        vec![0, 1, 2, 3],
        vec![0, 4],
        vec![1, 5],
        vec![4, 5, 6],
        vec![6, 7],
        vec![2, 3, 7],
    ];
    let n = 3;
    let problem = coverage_problem(8, &sets, 0.0, n)?;
    let (design, trace) = greedy(&problem, GreedyMode::Binary, true)?;
    for pick in &trace.picks {
        println!(
            "pick S{} gain {} -> covered {}",
            pick.index + 1,
            pick.gain,
            pick.objective
        );
    }
    println!(
        "design {:?} after {} evaluations",
        design.n, trace.evaluations
    );

    let curvature = total_curvature(&problem, GroundSet::Binary)?;
    println!("guarantee 1-(1-1/N)^N = {:.4}", greedy_factor(n, None));
    println!(
        "curvature {:.3} gives {:.4}",
        curvature.value,
        greedy_factor(n, Some(curvature.value))
    );
    Ok(())
}
