use thiserror::Error;

/// Errors produced by the design solvers and the instance loader.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {deviation:e}")]
    NotSymmetric {
        row: usize,
        col: usize,
        deviation: f64,
    },
    #[error("matrix has eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    IndefiniteBeyondTol { eigenvalue: f64, tolerance: f64 },
    #[error("atom `{name}` is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { name: String, min_eigenvalue: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("information matrix is singular (min eigenvalue {min_eigenvalue:e})")]
    SingularInformationMatrix { min_eigenvalue: f64 },
    #[error("stacked observation matrix has rank {rank} < {dim}")]
    RankDeficientObservations { rank: usize, dim: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("relaxation iterate lost rank (min eigenvalue {min_eigenvalue:e})")]
    SingularIterate { min_eigenvalue: f64 },
    #[error("weights sum to {sum}, which is not a positive integer")]
    BadBudget { sum: f64 },
    #[error("budget N = {budget} is smaller than the support size {support}")]
    BudgetTooSmall { budget: usize, support: usize },
    #[error("scaled budget needs {states} DP states, above the cap {cap}")]
    BudgetScaleOverflow { states: u128, cap: u128 },
    #[error("cost {0} is not a finite decimal literal with at most 9 fractional digits")]
    IrrationalCost(f64),
    #[error("no atom is affordable within budget {budget}")]
    NothingAffordable { budget: f64 },
    #[error("instance has {s} atoms, more than the enumeration cap {cap}")]
    TooLarge { s: usize, cap: usize },
    #[error("every atom has zero objective on its own")]
    AllAtomsNull,
    #[error("weights are not sorted in nonincreasing order")]
    NotSorted,
    #[error("weights sum to {sum}, expected {expected}")]
    BadSum { sum: f64, expected: f64 },
    #[error("{0}")]
    Inapplicable(String),
}

pub type Result<T> = std::result::Result<T, DesignError>;
