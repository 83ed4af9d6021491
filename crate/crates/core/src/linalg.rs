//! Dense symmetric-matrix kernels.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;

/// Default relative tolerance below which an orthogonalized row is treated as
/// degenerate.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

/// Diagonal entries of a correlation matrix must be within this of 1.
pub const UNIT_DIAGONAL_TOL: f64 = 1e-12;

/// Square real matrix with exactly symmetric, finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Validates that `m` is square, finite and exactly symmetric.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("matrix has non-finite entries".into()));
        }
        let p = m.nrows();
        for i in 0..p {
            for j in (i + 1)..p {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    /// Builds the matrix from its lower triangle: `f(i, j)` is called for
    /// `j <= i` and mirrored.
    pub fn from_lower_fn(p: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..=i {
                let x = f(i, j);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        Self(m)
    }

    pub fn identity(p: usize) -> Self {
        Self(DMatrix::identity(p, p))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `self + shift * I`.
    pub fn shift_diagonal(&self, shift: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += shift;
        }
        Self(m)
    }

    /// Permutes rows and columns so that entry `(a, b)` moves to
    /// `(perm[a], perm[b])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let p = self.dim();
        let mut m = DMatrix::zeros(p, p);
        for a in 0..p {
            for b in 0..p {
                m[(perm[a], perm[b])] = self.0[(a, b)];
            }
        }
        Self(m)
    }

    /// `m_ii > sum_{j != i} |m_ij|` for every row.
    pub fn is_strictly_diagonally_dominant(&self) -> bool {
        let p = self.dim();
        (0..p).all(|i| {
            let off: f64 = (0..p).filter(|&j| j != i).map(|j| self.0[(i, j)].abs()).sum();
            self.0[(i, i)] > off
        })
    }
}

/// Symmetric positive definite matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(SymmetricMatrix);

impl CorrelationMatrix {
    /// Accepts `m` if its diagonal is within [`UNIT_DIAGONAL_TOL`] of one and it
    /// is positive definite. The diagonal is then set to exactly one.
    pub fn new(m: SymmetricMatrix) -> Result<Self> {
        for i in 0..m.dim() {
            let d = m.get(i, i);
            if (d - 1.0).abs() > UNIT_DIAGONAL_TOL {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {i} is {d}, not 1"
                )));
            }
        }
        if !is_positive_definite(&m) {
            return Err(Error::NotPositiveDefinite);
        }
        let mut inner = m.into_inner();
        inner.fill_diagonal(1.0);
        Ok(Self(SymmetricMatrix(inner)))
    }

    pub fn as_symmetric(&self) -> &SymmetricMatrix {
        &self.0
    }

    pub fn into_symmetric(self) -> SymmetricMatrix {
        self.0
    }
}

impl Deref for CorrelationMatrix {
    type Target = SymmetricMatrix;

    fn deref(&self) -> &SymmetricMatrix {
        &self.0
    }
}

impl From<CorrelationMatrix> for SymmetricMatrix {
    fn from(c: CorrelationMatrix) -> Self {
        c.0
    }
}

/// Upper triangular matrix with strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor(DMatrix<f64>);

impl CholeskyFactor {
    pub fn new(u: DMatrix<f64>) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: u.nrows(),
                found: u.ncols(),
            });
        }
        let p = u.nrows();
        for i in 0..p {
            if !(u[(i, i)] > 0.0) {
                return Err(Error::InvalidFactor(format!("diagonal entry {i} is {}", u[(i, i)])));
            }
            for j in 0..i {
                if u[(i, j)] != 0.0 {
                    return Err(Error::InvalidFactor(format!("nonzero entry below diagonal at ({i}, {j})")));
                }
            }
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidFactor("non-finite entry".into()));
        }
        Ok(Self(u))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `U U^t`.
    pub fn gram(&self) -> SymmetricMatrix {
        gram(&self.0)
    }
}

/// Upper triangular factor with positive diagonal and unit Euclidean rows, so
/// that `U U^t` is a correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRowCholeskyFactor(CholeskyFactor);

impl UnitRowCholeskyFactor {
    /// Row norms must be within `1e-12` of one.
    pub fn new(u: DMatrix<f64>) -> Result<Self> {
        let f = CholeskyFactor::new(u)?;
        for (i, row) in f.0.row_iter().enumerate() {
            let n = row.norm();
            if (n - 1.0).abs() > UNIT_DIAGONAL_TOL {
                return Err(Error::InvalidFactor(format!("row {i} has norm {n}")));
            }
        }
        Ok(Self(f))
    }

    /// True if every nonzero above the diagonal sits on an arc of `orientation`,
    /// with rows and columns indexed by position in its ordering.
    pub fn respects(&self, orientation: &crate::graph::AcyclicOrientation) -> bool {
        let order = orientation.order();
        let p = self.dim();
        p == orientation.p()
            && (0..p).all(|a| {
                let ch = orientation.children(order.vertex(a));
                ((a + 1)..p).all(|b| self.0 .0[(a, b)] == 0.0 || ch.contains(&order.vertex(b)))
            })
    }

    /// `U U^t` with the diagonal set to exactly one.
    pub fn correlation(&self) -> Result<CorrelationMatrix> {
        CorrelationMatrix::new(self.0.gram())
    }
}

impl Deref for UnitRowCholeskyFactor {
    type Target = CholeskyFactor;

    fn deref(&self) -> &CholeskyFactor {
        &self.0
    }
}

/// Parameters of the Gaussian Bayesian network `X = B X + e` read off an upper
/// Cholesky factor of the precision matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BnParams {
    /// Strictly lower triangular regression coefficients; `b[(i, j)]` is the
    /// coefficient of `X_j` in the regression of `X_i`.
    pub b: DMatrix<f64>,
    /// Conditional variances `var(X_i | X_pa(i))`.
    pub v: DVector<f64>,
}

impl BnParams {
    /// `(I - B)^t V^{-1} (I - B)`, the precision matrix the parameters encode.
    pub fn precision(&self) -> DMatrix<f64> {
        let p = self.v.len();
        let i_minus_b = DMatrix::identity(p, p) - &self.b;
        let v_inv = DMatrix::from_diagonal(&self.v.map(|x| 1.0 / x));
        i_minus_b.transpose() * v_inv * i_minus_b
    }
}

/// Reads regression coefficients and conditional variances off `U`:
/// `beta_ij = -u_ji / u_ii` for `j < i` and `v_ii = 1 / u_ii^2`.
pub fn chol_to_bn_params(u: &CholeskyFactor) -> BnParams {
    let p = u.dim();
    let m = u.as_matrix();
    let mut b = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..i {
            b[(i, j)] = -m[(j, i)] / m[(i, i)];
        }
    }
    let v = DVector::from_fn(p, |i, _| 1.0 / (m[(i, i)] * m[(i, i)]));
    BnParams { b, v }
}

/// Partial modified Gram–Schmidt on the rows of `q`.
///
/// Rows are processed in ascending order. Row `i` is projected off the span of
/// the already processed rows `j < i` that are not adjacent to `i` in `g`,
/// then normalized. Those rows need not be mutually orthogonal, so an
/// orthonormal basis of their span is built first (MGS with one
/// reorthogonalization pass) and the row is swept against it twice.
///
/// Fails with [`Error::DegenerateRow`] if the residual norm of a row drops
/// below `tol` times its original norm.
pub fn mgs_partial_orthogonalize(q: &DMatrix<f64>, g: &UndirectedGraph, tol: f64) -> Result<DMatrix<f64>> {
    let p = g.p();
    if q.nrows() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: q.nrows(),
        });
    }
    let n = q.ncols();
    let mut rows: Vec<DVector<f64>> = q.row_iter().map(|r| r.transpose()).collect();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(p);

    for i in 0..p {
        basis.clear();
        for j in (0..i).filter(|&j| !g.has_edge(i, j)) {
            let mut w = rows[j].clone();
            sweep(&mut w, &basis);
            sweep(&mut w, &basis);
            let nw = w.norm();
            // Processed rows are unit norm, so a tiny remainder means `q_j`
            // already lies in the span collected so far.
            if nw > 1e-12 {
                w /= nw;
                basis.push(w);
            }
        }

        let row = &mut rows[i];
        let original = row.norm();
        sweep(row, &basis);
        sweep(row, &basis);
        let residual = row.norm();
        if !(residual > tol * original) || !residual.is_finite() {
            return Err(Error::DegenerateRow {
                row: i,
                residual: if original > 0.0 { residual / original } else { 0.0 },
            });
        }
        *row /= residual;
    }

    Ok(DMatrix::from_fn(p, n, |i, k| rows[i][k]))
}

fn sweep(v: &mut DVector<f64>, basis: &[DVector<f64>]) {
    for b in basis {
        let c = v.dot(b);
        v.axpy(-c, b, 1.0);
    }
}

/// `Q Q^t`, with each off-diagonal entry computed once and mirrored so the
/// result is exactly symmetric.
pub fn gram(q: &DMatrix<f64>) -> SymmetricMatrix {
    let rows: Vec<_> = q.row_iter().collect();
    SymmetricMatrix::from_lower_fn(q.nrows(), |i, j| rows[i].dot(&rows[j]))
}

/// Eigenvalues of `m` in ascending order.
pub fn sym_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    let eig = m
        .as_matrix()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Returns `m + (max(-lambda_min, 0) + eps) I`, whose eigenvalues are all at
/// least `eps`.
pub fn shift_min_eigenvalue(m: &SymmetricMatrix, eps: f64) -> Result<SymmetricMatrix> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if m.dim() == 0 {
        return Ok(m.clone());
    }
    let lambda_min = sym_eigenvalues(m)?[0];
    let negative_part = (-lambda_min).max(0.0);
    Ok(m.shift_diagonal(negative_part + eps))
}

/// Returns `m + s I` with `s = (lambda_max - kappa0 lambda_min) / (kappa0 - 1)`,
/// whose condition number is `kappa0`.
pub fn shift_condition_number(m: &SymmetricMatrix, kappa0: f64) -> Result<SymmetricMatrix> {
    if !(kappa0 > 1.0) || !kappa0.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa0 must be a finite value > 1, got {kappa0}")));
    }
    let values = sym_eigenvalues(m)?;
    let (Some(&lambda_min), Some(&lambda_max)) = (values.first(), values.last()) else {
        return Err(Error::InvalidParameter("empty matrix".into()));
    };
    if !(lambda_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "largest eigenvalue must be positive, got {lambda_max}"
        )));
    }
    if lambda_max == lambda_min {
        return Err(Error::InvalidParameter(
            "scalar matrix: condition number is fixed at 1".into(),
        ));
    }
    Ok(m.shift_diagonal((lambda_max - kappa0 * lambda_min) / (kappa0 - 1.0)))
}

/// `D^{-1/2} M D^{-1/2}` with `D = diag(M)`.
pub fn rescale_to_correlation(m: &SymmetricMatrix) -> Result<CorrelationMatrix> {
    let p = m.dim();
    let mut scale = Vec::with_capacity(p);
    for i in 0..p {
        let d = m.get(i, i);
        if !(d > 0.0) {
            return Err(Error::NonPositiveDiagonal { index: i, value: d });
        }
        scale.push(d.sqrt());
    }
    let r = SymmetricMatrix::from_lower_fn(p, |i, j| {
        if i == j {
            1.0
        } else {
            m.get(i, j) / scale[i] / scale[j]
        }
    });
    CorrelationMatrix::new(r)
}

/// True if `|m_ij| <= tol` for every pair `i != j` not adjacent in `g`.
pub fn matches_pattern(m: &SymmetricMatrix, g: &UndirectedGraph, tol: f64) -> bool {
    let p = m.dim();
    p == g.p()
        && (0..p).all(|i| ((i + 1)..p).all(|j| g.has_edge(i, j) || m.get(i, j).abs() <= tol))
}

/// Lower Cholesky factor `L` with `M = L L^t`, or `None` if a pivot is not
/// strictly positive.
pub fn cholesky_lower(m: &SymmetricMatrix) -> Option<DMatrix<f64>> {
    let p = m.dim();
    let a = m.as_matrix();
    let mut l = DMatrix::<f64>::zeros(p, p);
    for j in 0..p {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > 0.0) {
            return None;
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..p {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

pub fn is_positive_definite(m: &SymmetricMatrix) -> bool {
    cholesky_lower(m).is_some()
}

/// `n` draws from `N(0, sigma)` as the rows of an `n x p` matrix, computed as
/// `L z` with `sigma = L L^t` and `z` standard normal.
pub fn sample_gaussian<R: Rng + ?Sized>(sigma: &SymmetricMatrix, n: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    let l = cholesky_lower(sigma).ok_or(Error::NotPositiveDefinite)?;
    let p = sigma.dim();
    let mut data = DMatrix::zeros(n, p);
    let mut z = DVector::zeros(p);
    for r in 0..n {
        for k in 0..p {
            z[k] = rng.sample(StandardNormal);
        }
        let x = &l * &z;
        data.set_row(r, &x.transpose());
    }
    Ok(data)
}
