//! Continuous relaxation of a random instance and its optimality certificate.

use optdesign::instance::{generate, GeneratorKind, GeneratorParams};
use optdesign::relax::{solve_continuous, stationarity_ratios, RelaxOptions};

fn main() -> optdesign::error::Result<()> {
    let params = GeneratorParams {
        s: 8,
        m: 3,
        rows: 1,
        p: 0.5,
        n: 6,
        ..Default::default()
    };
    let problem = generate(GeneratorKind::RandomPsd, &params, 2024)?;
    let cert = solve_continuous(&problem, &RelaxOptions::default())?;
    println!(
        "converged after {} iterations, gap {:.2e}",
        cert.iterations, cert.gap
    );
    println!("phi_p(w*) = {:.6}", cert.objective);
    let ratios = stationarity_ratios(&problem, &cert.weights.w)?;
    for (i, (w, r)) in cert.weights.w.iter().zip(&ratios).enumerate() {
        println!("  atom {i}: w = {w:.6}  ratio = {r:.6}");
    }
    Ok(())
}
