//! Spectral objective, Kiefer criterion, gradients and a Fréchet derivative.

use optdesign::spectra::{
    eig_psd, frechet_derivative, gradient_trace, kiefer_phi, trace_power, PsdAtom, RankTol,
    ScalarFn, SymmetricMatrix,
};

fn main() -> optdesign::error::Result<()> {
    let m = SymmetricMatrix::from_rows(&[
        vec![4.0, 1.0, 0.0],
        vec![1.0, 3.0, 0.5],
        vec![0.0, 0.5, 2.0],
    ])?;
    let spectrum = eig_psd(&m, RankTol::Auto)?;
    println!("eigenvalues {:?}", spectrum.eigenvalues);

    for p in [0.0, 0.25, 0.5, 1.0] {
        println!(
            "p = {p:<4}  trace M^p = {:<10.6}  Phi_p = {:.6}",
            trace_power(&m, p, RankTol::Auto)?,
            kiefer_phi(&m, p, RankTol::Auto)?
        );
    }

    let atom = PsdAtom::from_matrix("e1", SymmetricMatrix::diagonal(&[1.0, 0.0, 0.0]))?;
    println!(
        "trace(M^-1/2 M_1) = {:.6}",
        gradient_trace(&m, 0.5, &atom, RankTol::Auto)?
    );

    let h = SymmetricMatrix::from_rows(&[
        vec![0.0, 1.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ])?;
    let d = frechet_derivative(ScalarFn::Pow(0.5), &m, &h, RankTol::Auto)?;
    println!("D sqrt(M)[H] =");
    for row in d.to_rows() {
        println!(
            "  {:?}",
            row.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
