//! Problem data model: atoms, budget modes, designs and the rank-deficiency
//! projection.

mod document;
mod generate;

pub use document::{load_problem, save_problem, AtomDocument, ProblemDocument};
pub use generate::{coverage_problem, generate, GeneratorKind, GeneratorParams};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{DesignError, Result};
use crate::spectra::{decompose_psd, phi_p, PsdAtom, RankTol};

/// How the design size is constrained.
#[derive(Debug, Clone, PartialEq)]
pub enum BudgetMode {
    /// At most `n` unit experiments: `sum_i n_i <= N`.
    Replication { n: u64 },
    /// Weighted budget: `sum_i c_i n_i <= B`.
    Budget { costs: Vec<f64>, budget: f64 },
}

/// A discrete optimal design instance.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    pub label: String,
    atoms: Vec<PsdAtom>,
    dim: usize,
    p: f64,
    mode: BudgetMode,
}

impl DesignProblem {
    pub fn new(
        label: impl Into<String>,
        atoms: Vec<PsdAtom>,
        p: f64,
        mode: BudgetMode,
    ) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| DesignError::Schema("a problem needs at least one atom".into()))?;
        let dim = first.dim();
        if dim == 0 {
            return Err(DesignError::Schema("dimension m must be positive".into()));
        }
        if let Some(bad) = atoms.iter().find(|a| a.dim() != dim) {
            return Err(DesignError::DimensionMismatch(format!(
                "atom `{}` has dimension {}, expected {dim}",
                bad.name,
                bad.dim()
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(DesignError::Schema(format!("p = {p} is outside [0, 1]")));
        }
        match &mode {
            BudgetMode::Replication { n } if *n == 0 => {
                return Err(DesignError::Schema("N must be at least 1".into()));
            }
            BudgetMode::Budget { costs, budget } => {
                if costs.len() != atoms.len() {
                    return Err(DesignError::DimensionMismatch(format!(
                        "{} costs for {} atoms",
                        costs.len(),
                        atoms.len()
                    )));
                }
                if let Some(c) = costs.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                    return Err(DesignError::Schema(format!("cost {c} is not positive")));
                }
                let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
                if !(budget.is_finite() && *budget >= min) {
                    return Err(DesignError::Schema(format!(
                        "budget {budget} is below the cheapest cost {min}"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self {
            label: label.into(),
            atoms,
            dim,
            p,
            mode,
        })
    }

    pub fn atoms(&self) -> &[PsdAtom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of available experiments `s`.
    pub fn s(&self) -> usize {
        self.atoms.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> &BudgetMode {
        &self.mode
    }

    /// `N` in replication mode.
    pub fn replication(&self) -> Option<u64> {
        match self.mode {
            BudgetMode::Replication { n } => Some(n),
            BudgetMode::Budget { .. } => None,
        }
    }

    /// `N` or `B`.
    pub fn total_budget(&self) -> f64 {
        match &self.mode {
            BudgetMode::Replication { n } => *n as f64,
            BudgetMode::Budget { budget, .. } => *budget,
        }
    }

    /// Cost of one unit of each experiment (all ones in replication mode).
    pub fn unit_costs(&self) -> Vec<f64> {
        match &self.mode {
            BudgetMode::Replication { .. } => vec![1.0; self.s()],
            BudgetMode::Budget { costs, .. } => costs.clone(),
        }
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.label.clone(), self.atoms.clone(), p, self.mode.clone())
    }

    pub fn with_mode(&self, mode: BudgetMode) -> Result<Self> {
        Self::new(self.label.clone(), self.atoms.clone(), self.p, mode)
    }

    /// `phi_p` of a (real or integer) design at the problem's exponent.
    pub fn phi(&self, design: &[f64]) -> Result<f64> {
        phi_p(design, &self.atoms, self.p, RankTol::Auto)
    }

    /// Budget consumed by a design: `sum n_i` or `sum c_i n_i`.
    pub fn budget_used(&self, design: &[f64]) -> f64 {
        match &self.mode {
            BudgetMode::Replication { .. } => design.iter().sum(),
            BudgetMode::Budget { costs, .. } => design.iter().zip(costs).map(|(d, c)| d * c).sum(),
        }
    }

    pub fn is_feasible(&self, design: &[f64]) -> bool {
        let total = self.total_budget();
        design.len() == self.s()
            && design.iter().all(|&d| d >= 0.0)
            && self.budget_used(design) <= total + 1e-9 * total
    }
}

/// Continuous design `w >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub w: Vec<f64>,
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Self {
        Self { w }
    }

    pub fn sum(&self) -> f64 {
        self.w.iter().sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.w.len()).filter(|&i| self.w[i] > 0.0).collect()
    }

    /// The same direction rescaled to sum exactly to `total`.
    pub fn renormalized(&self, total: f64) -> Self {
        let sum = self.sum();
        Self {
            w: self.w.iter().map(|x| x * total / sum).collect(),
        }
    }
}

/// Integer design: replication counts `n_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerDesign {
    pub n: Vec<u64>,
    pub binary: bool,
}

impl IntegerDesign {
    pub fn new(n: Vec<u64>) -> Self {
        Self { n, binary: false }
    }

    pub fn binary(n: Vec<u64>) -> Self {
        debug_assert!(n.iter().all(|&x| x <= 1));
        Self { n, binary: true }
    }

    pub fn zeros(s: usize) -> Self {
        Self::new(vec![0; s])
    }

    /// Binary design selecting the given indices.
    pub fn from_set(s: usize, set: &[usize]) -> Self {
        let mut n = vec![0; s];
        for &i in set {
            n[i] = 1;
        }
        Self::binary(n)
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.n.iter().map(|&x| x as f64).collect()
    }

    pub fn total(&self) -> u64 {
        self.n.iter().sum()
    }

    pub fn is_binary_valued(&self) -> bool {
        self.n.iter().all(|&x| x <= 1)
    }
}

/// Orthonormal basis (`m x r`) of the range of `M_F(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub basis: DMatrix<f64>,
    pub rank: usize,
}

impl Projector {
    pub fn is_identity(&self) -> bool {
        self.basis.nrows() == self.basis.ncols()
            && self.basis == DMatrix::identity(self.rank, self.rank)
    }
}

/// Restricts the atoms to the range of `M_F(1) = sum_i M_i` when it is
/// singular, so that the continuous relaxation has a full-rank optimum.
/// `phi_p` of every design is unchanged by the restriction.
pub fn project_if_rank_deficient(problem: &DesignProblem) -> Result<(DesignProblem, Projector)> {
    let ones = vec![1.0; problem.s()];
    let total = crate::spectra::info_matrix(&ones, problem.atoms())?;
    let dec = decompose_psd(&total, RankTol::Auto)?;
    let rank = dec.spectrum.effective_rank;
    let m = problem.dim();
    if rank == m {
        return Ok((
            problem.clone(),
            Projector {
                basis: DMatrix::identity(m, m),
                rank: m,
            },
        ));
    }
    if rank == 0 {
        return Err(DesignError::Schema("every atom is zero".into()));
    }
    let basis = dec.vectors.columns(0, rank).into_owned();
    let atoms = problem.atoms().iter().map(|a| a.project(&basis)).collect();
    let projected = DesignProblem::new(
        problem.label.clone(),
        atoms,
        problem.p(),
        problem.mode().clone(),
    )?;
    Ok((projected, Projector { basis, rank }))
}
