//! Continuous relaxation `max Phi_p(M_F(w))` over `w >= 0` with
//! `sum w_i <= N` (or `sum c_i w_i <= B`), solved by the multiplicative
//! algorithm and certified by the general equivalence theorem.
//!
//! Writing `scale_i = N` (or `B / c_i`) and `g_i = trace(M_F(w)^{p-1} M_i)`,
//! a feasible `w` is optimal iff `scale_i * g_i <= phi_p(w)` for every `i`
//! (with `phi_0 := m` and exponent `-1` at `p = 0`). The reported gap is
//! `max_i scale_i g_i / phi_p(w) - 1`.
//!
//! The solver works with normalized weights `z_i = w_i / scale_i`, which sum
//! to one, and applies `z_i <- z_i (scale_i g_i)^lambda / sum_k z_k (scale_k g_k)^lambda`.

use serde::{Deserialize, Serialize};

use crate::error::{DesignError, Result};
use crate::instance::{DesignProblem, WeightVector};
use crate::spectra::{decompose_psd, info_matrix, RankTol, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Exponent `lambda` of the multiplicative update, in `(0, 1]`.
    pub exponent: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 100_000,
            exponent: 1.0,
        }
    }
}

/// Solution of the continuous relaxation with its optimality certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationCertificate {
    pub weights: WeightVector,
    pub objective: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Weights below this fraction of the budget are zeroed at termination.
pub const ACTIVE_TOL: f64 = 1e-12;

fn scales(problem: &DesignProblem) -> Vec<f64> {
    let total = problem.total_budget();
    problem.unit_costs().iter().map(|c| total / c).collect()
}

/// Stationarity ratios `scale_i g_i / phi_p(w)`; all `<= 1` at the optimum,
/// with equality on the support.
pub fn stationarity_ratios(problem: &DesignProblem, weights: &[f64]) -> Result<Vec<f64>> {
    let m = info_matrix(weights, problem.atoms())?;
    Ok(ratios_at(problem, &m, &scales(problem))?.0)
}

/// Returns `(ratios, phi_p(w))`.
fn ratios_at(
    problem: &DesignProblem,
    m: &SymmetricMatrix,
    scale: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let p = problem.p();
    let atoms = problem.atoms();
    if p == 1.0 {
        let phi = m.trace();
        let r = atoms
            .iter()
            .zip(scale)
            .map(|(a, s)| s * a.matrix().trace() / phi)
            .collect();
        return Ok((r, phi));
    }
    let dec = decompose_psd(m, RankTol::Auto)?;
    let spec = &dec.spectrum;
    if spec.effective_rank < m.dim() || spec.lambda_min() <= 0.0 {
        return Err(DesignError::SingularInformationMatrix {
            min_eigenvalue: spec.lambda_min(),
        });
    }
    let exponent = if p == 0.0 { -1.0 } else { p - 1.0 };
    let g = dec.apply(|l| l.powf(exponent));
    let phi = spec.trace_power(p);
    let denom = if p == 0.0 { m.dim() as f64 } else { phi };
    let r = atoms
        .iter()
        .zip(scale)
        .map(|(a, s)| s * g.trace_product(a.matrix()) / denom)
        .collect();
    Ok((r, phi))
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `max_i scale_i g_i / phi_p(w) - 1`; a value `<= 0` certifies global
/// optimality of `weights`.
pub fn equivalence_gap(problem: &DesignProblem, weights: &[f64]) -> Result<f64> {
    Ok(max_of(&stationarity_ratios(problem, weights)?) - 1.0)
}

/// One multiplicative update from feasible `weights`; the result uses the
/// whole budget exactly.
pub fn multiplicative_step(
    problem: &DesignProblem,
    weights: &[f64],
    exponent: f64,
) -> Result<Vec<f64>> {
    let scale = scales(problem);
    let m = info_matrix(weights, problem.atoms())?;
    let (ratios, _) = ratios_at(problem, &m, &scale).map_err(singular_iterate)?;
    let z: Vec<f64> = weights.iter().zip(&scale).map(|(w, s)| w / s).collect();
    let z = update(&z, &ratios, exponent);
    Ok(z.iter().zip(&scale).map(|(z, s)| z * s).collect())
}

fn update(z: &[f64], ratios: &[f64], exponent: f64) -> Vec<f64> {
    let mut next: Vec<f64> = z
        .iter()
        .zip(ratios)
        .map(|(z, r)| {
            if exponent == 1.0 {
                z * r
            } else {
                z * r.powf(exponent)
            }
        })
        .collect();
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|x| *x /= total);
    next
}

fn singular_iterate(e: DesignError) -> DesignError {
    match e {
        DesignError::SingularInformationMatrix { min_eigenvalue } => {
            DesignError::SingularIterate { min_eigenvalue }
        }
        other => other,
    }
}

/// Solves the continuous relaxation from the uniform feasible start.
///
/// Iterates until the gap is at most `opts.tol` and every weight above
/// [`ACTIVE_TOL`] has a stationarity ratio within `10 * opts.tol` of 1.
/// Requires `M_F(1)` of full rank; call
/// [`project_if_rank_deficient`](crate::instance::project_if_rank_deficient)
/// first otherwise. When the iteration budget runs out the certificate is
/// still returned, with `converged == false`.
pub fn solve_continuous(
    problem: &DesignProblem,
    opts: &RelaxOptions,
) -> Result<RelaxationCertificate> {
    if !(opts.exponent > 0.0 && opts.exponent <= 1.0) {
        return Err(DesignError::Schema(format!(
            "update exponent {} is outside (0, 1]",
            opts.exponent
        )));
    }
    let s = problem.s();
    let scale = scales(problem);
    if problem.p() == 1.0 {
        return Ok(linear_solution(problem, &scale));
    }

    let mut z = vec![1.0 / s as f64; s];
    let mut iterations = 0;
    let slack_tol = 10.0 * opts.tol;
    // stale: positive weight although the ratio is clearly below 1
    let stale =
        |z: &[f64], ratios: &[f64], i: usize| z[i] >= ACTIVE_TOL && ratios[i] < 1.0 - slack_tol;
    loop {
        let (_, ratios, _) = finish(problem, &z, &scale)?;
        if max_of(&ratios) - 1.0 <= opts.tol {
            if !(0..s).any(|i| stale(&z, &ratios, i)) {
                break;
            }
            // inactive weights only decay geometrically; drop them outright
            // when the certificate survives
            let trimmed: Vec<f64> = (0..s)
                .map(|i| if stale(&z, &ratios, i) { 0.0 } else { z[i] })
                .collect();
            if let Ok((_, r, _)) = finish(problem, &trimmed, &scale) {
                if max_of(&r) - 1.0 <= opts.tol && !(0..s).any(|i| stale(&trimmed, &r, i)) {
                    z = trimmed;
                    break;
                }
            }
        }
        if iterations >= opts.max_iter {
            break;
        }
        z = update(&z, &ratios, opts.exponent);
        iterations += 1;
    }

    for zi in z.iter_mut() {
        if *zi < ACTIVE_TOL {
            *zi = 0.0;
        }
    }
    let (w, ratios, objective) = finish(problem, &z, &scale)?;
    // the ratios average to 1 on feasible weights, so a negative maximum is rounding
    let gap = (max_of(&ratios) - 1.0).max(0.0);
    Ok(RelaxationCertificate {
        weights: WeightVector::new(w),
        objective,
        gap,
        iterations,
        converged: gap <= opts.tol,
    })
}

/// Weights, ratios and objective for the normalized fractions `z`.
fn finish(problem: &DesignProblem, z: &[f64], scale: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let total: f64 = z.iter().sum();
    let w: Vec<f64> = z.iter().zip(scale).map(|(z, s)| z / total * s).collect();
    let m = info_matrix(&w, problem.atoms())?;
    let (ratios, objective) = ratios_at(problem, &m, scale).map_err(singular_iterate)?;
    Ok((w, ratios, objective))
}

/// At `p = 1` the objective is linear: all budget goes to the lowest-index
/// maximizer of `trace(M_i) / c_i`.
fn linear_solution(problem: &DesignProblem, scale: &[f64]) -> RelaxationCertificate {
    let value: Vec<f64> = problem
        .atoms()
        .iter()
        .zip(scale)
        .map(|(a, s)| s * a.matrix().trace())
        .collect();
    let mut best = 0;
    for (i, v) in value.iter().enumerate() {
        if *v > value[best] {
            best = i;
        }
    }
    let mut w = vec![0.0; problem.s()];
    w[best] = scale[best];
    let objective = value[best];
    let gap = if objective > 0.0 {
        max_of(&value) / objective - 1.0
    } else {
        0.0
    };
    RelaxationCertificate {
        weights: WeightVector::new(w),
        objective,
        gap,
        iterations: 0,
        converged: true,
    }
}
