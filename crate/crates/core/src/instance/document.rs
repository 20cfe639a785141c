use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use super::{BudgetMode, DesignProblem};
use crate::error::{DesignError, Result};
use crate::spectra::{PsdAtom, SymmetricMatrix};

/// On-disk problem document (UTF-8 JSON).
///
/// Exactly one of `N` or the pair `costs`/`budget` must be present, and every
/// atom carries exactly one of `matrix` (`m x m`) or `rows` (`l x m`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    pub m: usize,
    pub p: f64,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    pub atoms: Vec<AtomDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<f64>>>,
}

impl ProblemDocument {
    pub fn from_problem(problem: &DesignProblem) -> Self {
        let (n, costs, budget) = match problem.mode() {
            BudgetMode::Replication { n } => (Some(*n), None, None),
            BudgetMode::Budget { costs, budget } => (None, Some(costs.clone()), Some(*budget)),
        };
        let atoms = problem
            .atoms()
            .iter()
            .map(|a| match a.rows() {
                Some(rows) => AtomDocument {
                    name: a.name.clone(),
                    matrix: None,
                    rows: Some(
                        rows.row_iter()
                            .map(|r| r.iter().copied().collect())
                            .collect(),
                    ),
                },
                None => AtomDocument {
                    name: a.name.clone(),
                    matrix: Some(a.matrix().to_rows()),
                    rows: None,
                },
            })
            .collect();
        Self {
            label: problem.label.clone(),
            m: problem.dim(),
            p: problem.p(),
            n,
            costs,
            budget,
            atoms,
        }
    }

    pub fn into_problem(self) -> Result<DesignProblem> {
        let m = self.m;
        if m == 0 {
            return Err(DesignError::Schema("`m` must be positive".into()));
        }
        let mode = match (self.n, self.costs, self.budget) {
            (Some(n), None, None) => BudgetMode::Replication { n },
            (None, Some(costs), Some(budget)) => BudgetMode::Budget { costs, budget },
            _ => {
                return Err(DesignError::Schema(
                    "exactly one of `N` or the pair `costs`/`budget` is required".into(),
                ))
            }
        };
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for doc in self.atoms {
            let atom = match (doc.matrix, doc.rows) {
                (Some(matrix), None) => {
                    check_shape(&doc.name, "matrix", &matrix, Some(m), m)?;
                    PsdAtom::from_matrix(doc.name, SymmetricMatrix::from_rows(&matrix)?)?
                }
                (None, Some(rows)) => {
                    check_shape(&doc.name, "rows", &rows, None, m)?;
                    let a = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
                    PsdAtom::from_rows(doc.name, a)
                }
                _ => {
                    return Err(DesignError::Schema(format!(
                        "atom `{}` needs exactly one of `matrix` or `rows`",
                        doc.name
                    )))
                }
            };
            atoms.push(atom);
        }
        DesignProblem::new(self.label, atoms, self.p, mode)
    }
}

fn check_shape(
    name: &str,
    key: &str,
    data: &[Vec<f64>],
    nrows: Option<usize>,
    ncols: usize,
) -> Result<()> {
    if let Some(r) = nrows {
        if data.len() != r {
            return Err(DesignError::DimensionMismatch(format!(
                "atom `{name}`: `{key}` has {} rows, expected {r}",
                data.len()
            )));
        }
    }
    if data.is_empty() {
        return Err(DesignError::Schema(format!(
            "atom `{name}`: `{key}` is empty"
        )));
    }
    if let Some(row) = data.iter().find(|row| row.len() != ncols) {
        return Err(DesignError::DimensionMismatch(format!(
            "atom `{name}`: `{key}` has a row of length {}, expected {ncols}",
            row.len()
        )));
    }
    Ok(())
}

/// Parses and validates a problem document.
pub fn load_problem(text: &str) -> Result<DesignProblem> {
    let doc: ProblemDocument = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        match e.classify() {
            Category::Data => DesignError::Schema(format!("{e}")),
            _ => DesignError::Parse {
                line,
                column,
                message: e.to_string(),
            },
        }
    })?;
    doc.into_problem()
}

/// Canonical serialization: pretty JSON with a trailing newline.
pub fn save_problem(problem: &DesignProblem) -> String {
    let mut out = serde_json::to_string_pretty(&ProblemDocument::from_problem(problem))
        .expect("problem documents always serialize");
    out.push('\n');
    out
}
