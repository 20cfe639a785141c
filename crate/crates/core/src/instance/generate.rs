use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{BudgetMode, DesignProblem};
use crate::error::{DesignError, Result};
use crate::spectra::{PsdAtom, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Diagonal 0/1 atoms from a random set system (max-coverage instances).
    Coverage,
    /// `A_i^T A_i` with Gaussian `A_i` of `rows x m`.
    RandomPsd,
    /// Outer products `a_i a_i^T` of Gaussian vectors.
    RankOne,
}

impl std::str::FromStr for GeneratorKind {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coverage" => Ok(Self::Coverage),
            "random-psd" => Ok(Self::RandomPsd),
            "rank-one" => Ok(Self::RankOne),
            other => Err(DesignError::BadParams(format!(
                "unknown generator kind `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    /// Number of atoms.
    pub s: usize,
    /// Dimension (ground-set size for coverage).
    pub m: usize,
    /// Observation rows per atom (random-psd only).
    pub rows: usize,
    /// Inclusion probability of each ground element (coverage only).
    pub density: f64,
    pub p: f64,
    /// `N` in replication mode.
    pub n: u64,
    /// When set, emit a budgeted instance with costs drawn from
    /// `{0.5, 1.0, ..., 3.0}` and this total budget.
    pub budget: Option<f64>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            s: 6,
            m: 3,
            rows: 1,
            density: 0.4,
            p: 0.5,
            n: 3,
            budget: None,
        }
    }
}

/// Deterministic random instance for the given seed.
pub fn generate(kind: GeneratorKind, params: &GeneratorParams, seed: u64) -> Result<DesignProblem> {
    if params.s == 0 || params.m == 0 {
        return Err(DesignError::BadParams("s and m must be positive".into()));
    }
    if !(0.0..=1.0).contains(&params.p) {
        return Err(DesignError::BadParams(format!(
            "p = {} is outside [0, 1]",
            params.p
        )));
    }
    if params.n == 0 && params.budget.is_none() {
        return Err(DesignError::BadParams("N must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<PsdAtom> = match kind {
        GeneratorKind::Coverage => {
            if !(params.density > 0.0 && params.density <= 1.0) {
                return Err(DesignError::BadParams("density must lie in (0, 1]".into()));
            }
            (0..params.s)
                .map(|i| {
                    let mut diag: Vec<f64> = (0..params.m)
                        .map(|_| {
                            if rng.random_bool(params.density) {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    if diag.iter().all(|&d| d == 0.0) {
                        diag[rng.random_range(0..params.m)] = 1.0;
                    }
                    PsdAtom::from_matrix(format!("S{}", i + 1), SymmetricMatrix::diagonal(&diag))
                })
                .collect::<Result<_>>()?
        }
        GeneratorKind::RandomPsd => {
            if params.rows == 0 {
                return Err(DesignError::BadParams("rows must be positive".into()));
            }
            (0..params.s)
                .map(|i| {
                    PsdAtom::from_rows(
                        format!("E{}", i + 1),
                        gaussian(&mut rng, params.rows, params.m),
                    )
                })
                .collect()
        }
        GeneratorKind::RankOne => (0..params.s)
            .map(|i| PsdAtom::from_rows(format!("a{}", i + 1), gaussian(&mut rng, 1, params.m)))
            .collect(),
    };
    let mode = match params.budget {
        None => BudgetMode::Replication { n: params.n },
        Some(budget) => {
            let costs: Vec<f64> = (0..params.s)
                .map(|_| 0.5 * rng.random_range(1..=6) as f64)
                .collect();
            BudgetMode::Budget { costs, budget }
        }
    };
    let label = format!("{kind:?}-s{}-m{}-seed{seed}", params.s, params.m).to_lowercase();
    DesignProblem::new(label, atoms, params.p, mode)
        .map_err(|e| DesignError::BadParams(e.to_string()))
}

/// Coverage instance from an explicit set system over `{0, .., m-1}`.
pub fn coverage_problem(m: usize, sets: &[Vec<usize>], p: f64, n: u64) -> Result<DesignProblem> {
    let atoms = sets
        .iter()
        .enumerate()
        .map(|(i, set)| {
            let mut diag = vec![0.0; m];
            for &k in set {
                if k >= m {
                    return Err(DesignError::BadParams(format!(
                        "element {k} outside ground set of size {m}"
                    )));
                }
                diag[k] = 1.0;
            }
            PsdAtom::from_matrix(format!("S{}", i + 1), SymmetricMatrix::diagonal(&diag))
        })
        .collect::<Result<Vec<_>>>()?;
    DesignProblem::new("coverage", atoms, p, BudgetMode::Replication { n })
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::save_problem;

    #[test]
    fn coverage_optimum_by_enumeration() {
        let prob = coverage_problem(3, &[vec![0, 1], vec![1, 2], vec![2]], 0.0, 2).unwrap();
        let mut best = 0.0_f64;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let mut d = vec![0.0; 3];
                d[i] = 1.0;
                d[j] = 1.0;
                best = best.max(prob.phi(&d).unwrap());
            }
        }
        assert_eq!(best, 3.0);
    }

    #[test]
    fn coverage_atoms_are_diagonal_01() {
        let params = GeneratorParams {
            s: 8,
            m: 5,
            ..Default::default()
        };
        let prob = generate(GeneratorKind::Coverage, &params, 4).unwrap();
        for a in prob.atoms() {
            let m = a.matrix();
            for i in 0..5 {
                for j in 0..5 {
                    let v = m.get(i, j);
                    if i == j {
                        assert!(v == 0.0 || v == 1.0);
                    } else {
                        assert_eq!(v, 0.0);
                    }
                }
            }
            assert!(m.trace() >= 1.0);
        }
    }

    #[test]
    fn orthonormal_rank_one_atoms_sum_to_identity() {
        let atoms: Vec<PsdAtom> = (0..3)
            .map(|i| {
                let mut row = DMatrix::zeros(1, 3);
                row[(0, i)] = 1.0;
                PsdAtom::from_rows(format!("e{i}"), row)
            })
            .collect();
        let total = crate::spectra::info_matrix(&[1.0; 3], &atoms).unwrap();
        assert_eq!(total, SymmetricMatrix::identity(3));
    }

    #[test]
    fn same_seed_same_document() {
        for kind in [
            GeneratorKind::Coverage,
            GeneratorKind::RandomPsd,
            GeneratorKind::RankOne,
        ] {
            let params = GeneratorParams {
                rows: 2,
                budget: Some(4.0),
                ..Default::default()
            };
            let a = save_problem(&generate(kind, &params, 12).unwrap());
            let b = save_problem(&generate(kind, &params, 12).unwrap());
            let c = save_problem(&generate(kind, &params, 13).unwrap());
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn bad_params() {
        let zero = GeneratorParams {
            s: 0,
            ..Default::default()
        };
        assert!(matches!(
            generate(GeneratorKind::RankOne, &zero, 1),
            Err(DesignError::BadParams(_))
        ));
        assert!("hexagon".parse::<GeneratorKind>().is_err());
    }
}
