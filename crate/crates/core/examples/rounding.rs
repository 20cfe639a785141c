//! Rounding a relaxed design and certifying the result.

use optdesign::bounds::{build_certificate, DesignMethod};
use optdesign::instance::{generate, GeneratorKind, GeneratorParams};
use optdesign::relax::{solve_continuous, RelaxOptions};
use optdesign::rounding::{apportionment, incremental_rounding};

fn main() -> optdesign::error::Result<()> {
    let worked = incremental_rounding(&[1.5, 0.5], 0.5)?;
    println!(
        "w = (1.5, 0.5), p = 0.5: n = {:?}, surrogate {:.5}",
        worked.design.n, worked.surrogate
    );

    let params = GeneratorParams {
        s: 10,
        m: 4,
        rows: 1,
        p: 0.3,
        n: 12,
        ..Default::default()
    };
    let problem = generate(GeneratorKind::RandomPsd, &params, 7)?;
    let relax = solve_continuous(&problem, &RelaxOptions::default())?;
    for (method, design) in [
        (
            DesignMethod::Incremental,
            incremental_rounding(&relax.weights.w, 0.3)?.design,
        ),
        (
            DesignMethod::Apportionment,
            apportionment(&relax.weights.w, 0.3)?.design,
        ),
    ] {
        let cert = build_certificate(&problem, &design, &relax, method)?;
        println!(
            "{method:?}: n = {:?} ratio {:.4} posterior {:.4} prior {:?}",
            cert.design.n, cert.ratio, cert.posterior_bound, cert.prior_bound
        );
    }
    Ok(())
}
