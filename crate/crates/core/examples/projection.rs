//! Atoms that do not span the parameter space are projected onto their range.

use nalgebra::DMatrix;
use optdesign::instance::{project_if_rank_deficient, BudgetMode, DesignProblem};
use optdesign::relax::{solve_continuous, RelaxOptions};
use optdesign::spectra::PsdAtom;

fn main() -> optdesign::error::Result<()> {
    // every observation row has a zero third coordinate
    let rows = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [1.0, 1.0, 0.0],
        [1.0, -2.0, 0.0],
    ];
    let atoms = rows
        .iter()
        .enumerate()
        .map(|(i, r)| PsdAtom::from_rows(format!("x{i}"), DMatrix::from_row_slice(1, 3, r)))
        .collect();
    let problem = DesignProblem::new("planar", atoms, 0.0, BudgetMode::Replication { n: 4 })?;
    let (projected, projector) = project_if_rank_deficient(&problem)?;
    println!("rank {} of {}", projector.rank, problem.dim());

    let design = [1.0, 1.0, 1.0, 1.0];
    println!(
        "phi_0 before {:.6}, after {:.6}",
        problem.phi(&design)?,
        projected.phi(&design)?
    );
    let cert = solve_continuous(&projected, &RelaxOptions::default())?;
    println!("relaxed weights {:?}", cert.weights.w);
    Ok(())
}
