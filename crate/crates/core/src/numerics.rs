//! Dense complex linear algebra with one tolerance policy.
//!
//! Every rank, kernel and positivity decision in the crate is routed through
//! this module so that the cutoffs are applied consistently.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Shorthand for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank and kernel decisions.
    pub rank_rel: f64,
    /// Slack on the minimum eigenvalue in positivity tests.
    pub psd_abs: f64,
    /// Residual bound for equality checks.
    pub eq_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rel: 1e-10,
            psd_abs: 1e-9,
            eq_abs: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn new(rank_rel: f64, psd_abs: f64, eq_abs: f64) -> Result<Self> {
        for (name, v) in [
            ("rank_rel", rank_rel),
            ("psd_abs", psd_abs),
            ("eq_abs", eq_abs),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "tolerance {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            rank_rel,
            psd_abs,
            eq_abs,
        })
    }
}

pub fn ensure_finite(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Builds a matrix from row-major `(re, im)` pairs.
pub fn from_rows(rows: usize, cols: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    assert_eq!(
        entries.len(),
        rows * cols,
        "entry count must equal rows * cols"
    );
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&(re, im)| c64(re, im)))
}

/// Builds a real-valued complex matrix from row-major entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(
        entries.len(),
        rows * cols,
        "entry count must equal rows * cols"
    );
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&re| c64(re, 0.0)))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Thin singular value decomposition `m = u diag(s) v_t` with `s` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v_t: ComplexMatrix,
}

impl Svd {
    fn reconstruction_error(&self, m: &ComplexMatrix) -> f64 {
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        max_abs(&(us * &self.v_t - m))
    }

    fn sorted(mut self) -> Self {
        let mut order: Vec<usize> = (0..self.singular_values.len()).collect();
        order.sort_by(|&a, &b| self.singular_values[b].total_cmp(&self.singular_values[a]));
        let u = ComplexMatrix::from_fn(self.u.nrows(), order.len(), |i, j| self.u[(i, order[j])]);
        let v_t = ComplexMatrix::from_fn(order.len(), self.v_t.ncols(), |i, j| {
            self.v_t[(order[i], j)]
        });
        self.singular_values = order.iter().map(|&k| self.singular_values[k]).collect();
        self.u = u;
        self.v_t = v_t;
        self
    }
}

/// Copy of `m` with entries far below working precision set to zero.
///
/// nalgebra's iterative decompositions can underflow into NaN when such
/// entries sit next to entries of order one.
pub(crate) fn chopped(m: &ComplexMatrix) -> ComplexMatrix {
    let cutoff = 1e-3 * f64::EPSILON * max_abs(m);
    m.map(|z| if z.norm() <= cutoff { c64(0.0, 0.0) } else { z })
}

fn raw_svd(m: &ComplexMatrix) -> Svd {
    let svd = chopped(m).svd(true, true);
    Svd {
        u: svd.u.expect("requested left singular vectors"),
        singular_values: svd.singular_values.iter().copied().collect(),
        v_t: svd.v_t.expect("requested right singular vectors"),
    }
}

/// Unitary discrete Fourier matrix of order `n`.
fn fourier(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::from_polar(
            scale,
            -2.0 * std::f64::consts::PI * (i * j) as f64 / n as f64,
        )
    })
}

/// Checked SVD.
///
/// The complex bidiagonal iteration in nalgebra occasionally converges to a
/// factorization that does not reproduce its input. Each candidate is
/// verified, and the adjoint and a Fourier-rotated copy are tried in turn.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.is_empty() {
        let k = m.nrows().min(m.ncols());
        return Svd {
            u: ComplexMatrix::zeros(m.nrows(), k),
            singular_values: vec![0.0; k],
            v_t: ComplexMatrix::zeros(k, m.ncols()),
        };
    }
    let accept = 1e-12 * (1.0 + max_abs(m)) * (m.nrows().max(m.ncols()) as f64);
    let direct = raw_svd(m);
    let mut best_err = direct.reconstruction_error(m);
    let mut best = direct;
    if best_err <= accept {
        return best.sorted();
    }
    let adj = raw_svd(&m.adjoint());
    let flipped = Svd {
        u: adj.v_t.adjoint(),
        singular_values: adj.singular_values,
        v_t: adj.u.adjoint(),
    };
    let err = flipped.reconstruction_error(m);
    if err < best_err {
        best = flipped;
        best_err = err;
    }
    if best_err <= accept {
        return best.sorted();
    }
    let f = fourier(m.ncols());
    let rot = raw_svd(&(m * &f));
    let rotated = Svd {
        v_t: rot.v_t * f.adjoint(),
        ..rot
    };
    if rotated.reconstruction_error(m) < best_err {
        best = rotated;
    }
    best.sorted()
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    svd(m).singular_values
}

pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerances) -> usize {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol.rank_rel * smax).count()
}

/// Orthonormal basis of the numerical kernel of `m`.
///
/// The column count is always `m.ncols() - numerical_rank(m)`.
pub fn nullspace_basis(m: &ComplexMatrix, tol: &Tolerances) -> ComplexMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(cols);
    }
    // Thin SVD only yields min(rows, cols) right vectors; pad wide inputs to
    // square so the full right singular basis is available.
    let padded = if m.nrows() < cols {
        let mut p = ComplexMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(&padded);
    let v_t = svd.v_t;
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let rank = numerical_rank(m, tol);
    let kernel_rows: Vec<usize> = if smax == 0.0 {
        (0..cols).collect()
    } else {
        (rank..cols).collect()
    };
    let mut basis = ComplexMatrix::zeros(cols, kernel_rows.len());
    for (j, &r) in kernel_rows.iter().enumerate() {
        for i in 0..cols {
            basis[(i, j)] = v_t[(r, i)].conj();
        }
    }
    basis
}

/// Orthonormal basis of the numerical column space of `m`.
pub fn range_basis(m: &ComplexMatrix, tol: &Tolerances) -> ComplexMatrix {
    if m.is_empty() {
        return ComplexMatrix::zeros(m.nrows(), 0);
    }
    let svd = svd(m);
    let smax = svd.singular_values.first().copied().unwrap_or(0.0);
    let keep = svd
        .singular_values
        .iter()
        .take_while(|&&s| smax > 0.0 && s > tol.rank_rel * smax)
        .count();
    svd.u.columns(0, keep).into_owned()
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

pub fn is_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> bool {
    if !m.is_square() {
        return false;
    }
    let skew = m - m.adjoint();
    operator_norm(&skew) <= tol.eq_abs * (1.0 + operator_norm(m))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let herm = chopped(&hermitian_part(m));
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    if ev.iter().any(|v| !v.is_finite()) {
        ev = eigenvalues(&herm).iter().map(|z| z.re).collect();
    }
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn is_psd_hermitian(m: &ComplexMatrix, tol: &Tolerances) -> bool {
    if !is_hermitian(m, tol) {
        return false;
    }
    match hermitian_eigenvalues(m).first() {
        None => true,
        Some(&lo) => lo >= -tol.psd_abs * (1.0 + operator_norm(m)),
    }
}

/// Eigenvalues of a general square matrix from its complex Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<Complex64> {
    if m.is_empty() {
        return Vec::new();
    }
    let (_, t) = nalgebra::linalg::Schur::new(m.clone()).unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Solves `a x = b`, rejecting `a` whose smallest singular value falls below
/// the relative rank cutoff.
pub fn solve(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerances,
    what: &'static str,
) -> Result<ComplexMatrix> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(Error::Shape(format!(
            "cannot solve {}x{} system with {}x{} right-hand side",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if numerical_rank(a, tol) < a.nrows() {
        return Err(Error::Singular { what });
    }
    a.clone().lu().solve(b).ok_or(Error::Singular { what })
}

pub fn inverse(a: &ComplexMatrix, tol: &Tolerances, what: &'static str) -> Result<ComplexMatrix> {
    solve(a, &identity(a.nrows()), tol, what)
}

/// Sine of the largest principal angle between the column spans of two
/// orthonormal bases; 1 when the dimensions differ.
pub fn subspace_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return 1.0;
    }
    if u.ncols() == 0 {
        return 0.0;
    }
    let residual = u - v * (v.adjoint() * u);
    operator_norm(&residual)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest eigenvalue of the Hermitian pencil `(s, m)` with `m` positive
/// definite, via a Cholesky congruence.
pub fn pencil_max_eigenvalue(s: &ComplexMatrix, m: &ComplexMatrix) -> Result<f64> {
    if s.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let chol = m.clone().cholesky().ok_or(Error::Singular {
        what: "mass matrix",
    })?;
    let l = chol.l();
    let linv_s = l
        .solve_lower_triangular(&hermitian_part(s))
        .ok_or(Error::Singular {
            what: "mass factor",
        })?;
    let congruent = l
        .solve_lower_triangular(&linv_s.adjoint())
        .ok_or(Error::Singular {
            what: "mass factor",
        })?;
    Ok(hermitian_eigenvalues(&congruent)
        .last()
        .copied()
        .unwrap_or(f64::NEG_INFINITY))
}
