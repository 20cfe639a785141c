//! Symmetric and positive semidefinite matrix machinery.
//!
//! Everything in this module works on small dense real symmetric matrices
//! through a full eigendecomposition. The spectral objective
//! `phi_p(M) = trace M^p = sum_k lambda_k^p` is evaluated with the convention
//! `0^0 = 0`, so at `p = 0` it is the numerical rank of `M`.
//!
//! Eigenvalues in `[-rank_tol, rank_tol]` are treated as exact zeros: they are
//! clamped before powering and they never contribute to `trace M^p`. Without
//! this, rounding noise of order `1e-16` in the null space of a singular matrix
//! would contribute `(1e-16)^p`, which is far from zero for small `p`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{DesignError, Result};

/// Relative symmetry tolerance used when validating input matrices.
pub const SYM_TOL: f64 = 1e-10;
/// Relative tolerance on negative eigenvalues of an input atom.
pub const PSD_TOL: f64 = 1e-10;
/// Relative tolerance under which two eigenvalues are treated as tied when
/// forming first divided differences.
pub const EIG_TIE_TOL: f64 = 1e-8;

/// Numerical-rank threshold.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum RankTol {
    /// `dim * f64::EPSILON * lambda_max`.
    #[default]
    Auto,
    /// A fixed absolute threshold.
    Absolute(f64),
}

impl RankTol {
    pub fn resolve(self, dim: usize, lambda_max: f64) -> f64 {
        match self {
            RankTol::Auto => dim as f64 * f64::EPSILON * lambda_max.max(0.0),
            RankTol::Absolute(t) => t,
        }
    }
}

/// Dense real symmetric matrix.
///
/// Construction checks symmetry within [`SYM_TOL`] relative to the largest
/// entry and then stores the exact symmetrization `(A + A^T) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(DesignError::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows();
        let scale = matrix.amax();
        for i in 0..n {
            for j in (i + 1)..n {
                let deviation = (matrix[(i, j)] - matrix[(j, i)]).abs();
                if deviation > SYM_TOL * scale {
                    return Err(DesignError::NotSymmetric {
                        row: i,
                        col: j,
                        deviation,
                    });
                }
            }
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Builds a matrix from row-major nested vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(DesignError::DimensionMismatch(format!(
                "matrix with {n} rows has a row of length {}",
                bad.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    fn symmetrized(matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        let mut out = matrix;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        Self(out)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// `A^T A` for an `l x m` observation matrix `A`.
    pub fn gram(rows: &DMatrix<f64>) -> Self {
        Self::symmetrized(rows.transpose() * rows)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.amax()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// `self += coef * other`.
    pub fn add_scaled(&mut self, coef: f64, other: &SymmetricMatrix) {
        self.0.zip_apply(&other.0, |a, b| *a += coef * b);
    }

    pub fn scaled(&self, coef: f64) -> Self {
        Self(&self.0 * coef)
    }

    pub fn sum(&self, other: &SymmetricMatrix) -> Self {
        Self(&self.0 + &other.0)
    }

    /// `trace(self * other)` for symmetric operands.
    pub fn trace_product(&self, other: &SymmetricMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    /// `U^T self U`.
    pub fn congruence(&self, u: &DMatrix<f64>) -> Self {
        Self::symmetrized(u.transpose() * &self.0 * u)
    }
}

/// Eigenvalues of a PSD matrix, sorted in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub rank_tol: f64,
    pub effective_rank: usize,
}

impl Spectrum {
    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Eigenvalues above the rank threshold.
    pub fn positive(&self) -> &[f64] {
        &self.eigenvalues[..self.effective_rank]
    }

    /// `sum_k lambda_k^p` with `0^0 = 0`; the rank at `p = 0`.
    pub fn trace_power(&self, p: f64) -> f64 {
        if p == 0.0 {
            self.effective_rank as f64
        } else {
            self.positive().iter().map(|l| l.powf(p)).sum()
        }
    }

    /// `log` of the product of the eigenvalues above the rank threshold.
    pub fn log_pseudo_det(&self) -> f64 {
        self.positive().iter().map(|l| l.ln()).sum()
    }
}

/// Eigendecomposition `M = Q diag(lambda) Q^T` of a PSD matrix.
#[derive(Debug, Clone)]
pub struct PsdDecomposition {
    pub spectrum: Spectrum,
    /// Eigenvectors as columns, in the order of `spectrum.eigenvalues`.
    pub vectors: DMatrix<f64>,
}

impl PsdDecomposition {
    /// `Q diag(f(lambda)) Q^T`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        let q = &self.vectors;
        let vals = DVector::from_iterator(
            self.spectrum.eigenvalues.len(),
            self.spectrum.eigenvalues.iter().map(|&l| f(l)),
        );
        let scaled = q * DMatrix::from_diagonal(&vals);
        SymmetricMatrix::symmetrized(scaled * q.transpose())
    }

    fn require_definite(&self) -> Result<()> {
        let min = self.spectrum.lambda_min();
        if self.spectrum.effective_rank < self.spectrum.eigenvalues.len() || min <= 0.0 {
            return Err(DesignError::SingularInformationMatrix {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }
}

/// Full eigendecomposition with eigenvalues sorted in nonincreasing order.
pub fn decompose_psd(m: &SymmetricMatrix, rank_tol: RankTol) -> Result<PsdDecomposition> {
    let dim = m.dim();
    // diagonal inputs are decomposed exactly; the iterative solver rescales
    let is_diagonal = (0..dim).all(|j| (0..dim).all(|i| i == j || m.0[(i, j)] == 0.0));
    let (values, basis) = if is_diagonal {
        (m.0.diagonal(), DMatrix::identity(dim, dim))
    } else {
        let eig = SymmetricEigen::new(m.0.clone());
        (eig.eigenvalues, eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let lambda_max = order.first().map_or(0.0, |&i| values[i]);
    let tol = rank_tol.resolve(dim, lambda_max);

    let mut eigenvalues = Vec::with_capacity(dim);
    let mut vectors = DMatrix::zeros(dim, dim);
    for (k, &i) in order.iter().enumerate() {
        let lambda = values[i];
        if lambda < -tol {
            return Err(DesignError::IndefiniteBeyondTol {
                eigenvalue: lambda,
                tolerance: tol,
            });
        }
        eigenvalues.push(lambda.max(0.0));
        vectors.set_column(k, &basis.column(i));
    }
    let effective_rank = eigenvalues.iter().filter(|&&l| l > tol).count();
    Ok(PsdDecomposition {
        spectrum: Spectrum {
            eigenvalues,
            rank_tol: tol,
            effective_rank,
        },
        vectors,
    })
}

/// Eigenvalues of a PSD matrix, negatives within `rank_tol` clamped to zero.
pub fn eig_psd(m: &SymmetricMatrix, rank_tol: RankTol) -> Result<Spectrum> {
    decompose_psd(m, rank_tol).map(|d| d.spectrum)
}

/// The information matrix `M_i` of one experiment, optionally with the
/// observation rows `A_i` it was built from (`M_i = A_i^T A_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct PsdAtom {
    pub name: String,
    matrix: SymmetricMatrix,
    rows: Option<DMatrix<f64>>,
}

impl PsdAtom {
    pub fn from_matrix(name: impl Into<String>, matrix: SymmetricMatrix) -> Result<Self> {
        let name = name.into();
        let eig = SymmetricEigen::new(matrix.as_matrix().clone());
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if min < -PSD_TOL * max.max(0.0) {
            return Err(DesignError::NotPsd {
                name,
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            name,
            matrix,
            rows: None,
        })
    }

    pub fn from_rows(name: impl Into<String>, rows: DMatrix<f64>) -> Self {
        Self {
            name: name.into(),
            matrix: SymmetricMatrix::gram(&rows),
            rows: Some(rows),
        }
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> Option<&DMatrix<f64>> {
        self.rows.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The atom restricted to the column space spanned by `u` (`m x r`).
    pub fn project(&self, u: &DMatrix<f64>) -> Self {
        Self {
            name: self.name.clone(),
            matrix: self.matrix.congruence(u),
            rows: self.rows.as_ref().map(|a| a * u),
        }
    }
}

/// `M_F = sum_i design_i M_i`.
pub fn info_matrix(design: &[f64], atoms: &[PsdAtom]) -> Result<SymmetricMatrix> {
    if design.len() != atoms.len() {
        return Err(DesignError::DimensionMismatch(format!(
            "design has {} entries for {} atoms",
            design.len(),
            atoms.len()
        )));
    }
    let first = atoms
        .first()
        .ok_or_else(|| DesignError::DimensionMismatch("empty atom list".into()))?;
    let dim = first.dim();
    let mut out = SymmetricMatrix::zeros(dim);
    for (coef, atom) in design.iter().zip(atoms) {
        if atom.dim() != dim {
            return Err(DesignError::DimensionMismatch(format!(
                "atom `{}` has dimension {}, expected {dim}",
                atom.name,
                atom.dim()
            )));
        }
        if *coef != 0.0 {
            out.add_scaled(*coef, atom.matrix());
        }
    }
    Ok(out)
}

/// `trace M^p` for `p` in `[0, 1]`, the rank at `p = 0`.
pub fn trace_power(m: &SymmetricMatrix, p: f64, rank_tol: RankTol) -> Result<f64> {
    Ok(eig_psd(m, rank_tol)?.trace_power(p))
}

/// The spectral objective `phi_p(design) = trace M_F(design)^p`.
pub fn phi_p(design: &[f64], atoms: &[PsdAtom], p: f64, rank_tol: RankTol) -> Result<f64> {
    trace_power(&info_matrix(design, atoms)?, p, rank_tol)
}

/// Kiefer's criterion `Phi_p(M)` for `p` in `[-inf, 1]`, extended by
/// continuity to singular `M` (zero for `p <= 0`).
pub fn kiefer_phi(m: &SymmetricMatrix, p: f64, rank_tol: RankTol) -> Result<f64> {
    let spec = eig_psd(m, rank_tol)?;
    let dim = m.dim() as f64;
    let singular = spec.effective_rank < m.dim();
    if p == f64::NEG_INFINITY {
        return Ok(if singular { 0.0 } else { spec.lambda_min() });
    }
    if p <= 0.0 && singular {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok((spec.log_pseudo_det() / dim).exp());
    }
    Ok((spec.trace_power(p) / dim).powf(1.0 / p))
}

/// `trace(M^{p-1} M_i)`, the partial derivative of `phi_p` along atom `i`.
/// At `p = 0` the exponent is `-1` (derivative of `log det`).
pub fn gradient_trace(
    m: &SymmetricMatrix,
    p: f64,
    atom: &PsdAtom,
    rank_tol: RankTol,
) -> Result<f64> {
    Ok(gradient_traces(m, p, std::slice::from_ref(atom), rank_tol)?[0])
}

/// [`gradient_trace`] for every atom, sharing one eigendecomposition.
pub fn gradient_traces(
    m: &SymmetricMatrix,
    p: f64,
    atoms: &[PsdAtom],
    rank_tol: RankTol,
) -> Result<Vec<f64>> {
    if p == 1.0 {
        return Ok(atoms.iter().map(|a| a.matrix().trace()).collect());
    }
    let g = gradient_matrix(m, p, rank_tol)?;
    Ok(atoms.iter().map(|a| g.trace_product(a.matrix())).collect())
}

/// `M^{p-1}` (or `M^{-1}` at `p = 0`).
pub fn gradient_matrix(m: &SymmetricMatrix, p: f64, rank_tol: RankTol) -> Result<SymmetricMatrix> {
    if p == 1.0 {
        return Ok(SymmetricMatrix::identity(m.dim()));
    }
    let dec = decompose_psd(m, rank_tol)?;
    dec.require_definite()?;
    let exponent = if p == 0.0 { -1.0 } else { p - 1.0 };
    Ok(dec.apply(|l| l.powf(exponent)))
}

/// Scalar functions whose matrix Fréchet derivative is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFn {
    /// `x -> x^e`
    Pow(f64),
    /// `x -> ln x`
    Log,
}

impl ScalarFn {
    pub fn value(self, x: f64) -> f64 {
        match self {
            ScalarFn::Pow(e) => x.powf(e),
            ScalarFn::Log => x.ln(),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            ScalarFn::Pow(0.0) => 0.0,
            ScalarFn::Pow(e) => e * x.powf(e - 1.0),
            ScalarFn::Log => 1.0 / x,
        }
    }
}

/// First divided differences `f[l_i, l_j]` of `f` on the eigenvalues; near
/// ties (within `EIG_TIE_TOL * lambda_max`) use `f'` at the midpoint.
pub fn divided_differences(f: ScalarFn, eigenvalues: &[f64]) -> DMatrix<f64> {
    let n = eigenvalues.len();
    let lmax = eigenvalues.iter().fold(0.0_f64, |a, &b| a.max(b));
    let tie = EIG_TIE_TOL * lmax;
    DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (eigenvalues[i], eigenvalues[j]);
        if (a - b).abs() <= tie {
            f.derivative(0.5 * (a + b))
        } else {
            (f.value(a) - f.value(b)) / (a - b)
        }
    })
}

/// Directional derivative `Df(M)(H) = Q (f^[1](D) .* Q^T H Q) Q^T` at a
/// positive definite `M`.
pub fn frechet_derivative(
    f: ScalarFn,
    m: &SymmetricMatrix,
    h: &SymmetricMatrix,
    rank_tol: RankTol,
) -> Result<SymmetricMatrix> {
    if m.dim() != h.dim() {
        return Err(DesignError::DimensionMismatch(format!(
            "M is {0}x{0} but H is {1}x{1}",
            m.dim(),
            h.dim()
        )));
    }
    let dec = decompose_psd(m, rank_tol)?;
    dec.require_definite()?;
    let q = &dec.vectors;
    let dd = divided_differences(f, &dec.spectrum.eigenvalues);
    let inner = (q.transpose() * h.as_matrix() * q).component_mul(&dd);
    Ok(SymmetricMatrix::symmetrized(q * inner * q.transpose()))
}

/// `trace(X+Z)^p + trace(Y+Z)^p - trace(X+Y+Z)^p - trace(Z)^p`, which is
/// nonnegative for PSD `X, Y, Z` and `p` in `(0, 1]`.
pub fn submodularity_slack(
    x: &SymmetricMatrix,
    y: &SymmetricMatrix,
    z: &SymmetricMatrix,
    p: f64,
    rank_tol: RankTol,
) -> Result<f64> {
    if x.dim() != y.dim() || y.dim() != z.dim() {
        return Err(DesignError::DimensionMismatch(
            "X, Y and Z must have the same dimension".into(),
        ));
    }
    let xz = x.sum(z);
    let yz = y.sum(z);
    let xyz = xz.sum(y);
    Ok(
        trace_power(&xz, p, rank_tol)? + trace_power(&yz, p, rank_tol)?
            - trace_power(&xyz, p, rank_tol)?
            - trace_power(z, p, rank_tol)?,
    )
}

/// Stacks `A_i` once per replication: the observation matrix of design `n`.
pub fn stack_observations(atoms: &[PsdAtom], design: &[u64]) -> Result<DMatrix<f64>> {
    if design.len() != atoms.len() {
        return Err(DesignError::DimensionMismatch(format!(
            "design has {} entries for {} atoms",
            design.len(),
            atoms.len()
        )));
    }
    let dim = atoms.first().map_or(0, |a| a.dim());
    let mut blocks: Vec<&DMatrix<f64>> = Vec::new();
    for (atom, &count) in atoms.iter().zip(design) {
        if count == 0 {
            continue;
        }
        let rows = atom.rows().ok_or_else(|| {
            DesignError::Schema(format!("atom `{}` has no observation rows", atom.name))
        })?;
        for _ in 0..count {
            blocks.push(rows);
        }
    }
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(total, dim);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, 0), (b.nrows(), dim)).copy_from(b);
        at += b.nrows();
    }
    Ok(out)
}

/// Best linear unbiased estimator `(A^T A)^{-1} A^T y`.
pub fn blue_estimate(observations: &DMatrix<f64>, y: &[f64]) -> Result<Vec<f64>> {
    if observations.nrows() != y.len() {
        return Err(DesignError::DimensionMismatch(format!(
            "{} observation rows but {} measurements",
            observations.nrows(),
            y.len()
        )));
    }
    let dim = observations.ncols();
    let gram = SymmetricMatrix::gram(observations);
    let spec = eig_psd(&gram, RankTol::Auto)?;
    if spec.effective_rank < dim {
        return Err(DesignError::RankDeficientObservations {
            rank: spec.effective_rank,
            dim,
        });
    }
    let rhs = observations.transpose() * DVector::from_column_slice(y);
    let chol = gram
        .into_inner()
        .cholesky()
        .ok_or(DesignError::RankDeficientObservations {
            rank: spec.effective_rank,
            dim,
        })?;
    Ok(chol.solve(&rhs).iter().copied().collect())
}
