//! Extension calculus on boundary data.
//!
//! A boundary condition is a subspace `V` of `C^d x C^d` holding pairs
//! `(g1, g2)` of triplet boundary values. Maximal dissipative subspaces are
//! in bijection with contractions `K` on `C^d` through
//!
//! ```text
//! phi: V -> K,   K (g1 + g2) = g1 - g2
//! psi: K -> V,   V = { (g1, g2) : K (g1 + g2) = g1 - g2 }
//! ```
//!
//! and with admissible matrices `W = [W1 W2]` (rank `d`, `W Sigma W* >= 0`)
//! through `theta(W) = -(W1 + W2)^-1 (W1 - W2)`.
//!
//! `W` acts on flow/effort pairs `(f, e)` while `phi`/`psi` act on triplet
//! pairs. The two are related by `(g1, g2) = (-f, e)`; with this sign the
//! domain law `(K - 1) f - (K + 1) e = 0`, `theta`, and the `W Sigma W* >= 0`
//! test agree with each other.

use crate::error::{Error, Result};
use crate::numerics::{
    self, c64, identity, is_psd_hermitian, nullspace_basis, numerical_rank, operator_norm,
    range_basis, solve, ComplexMatrix, ComplexVector, Tolerances,
};

/// Triplet boundary values `(g1, g2)` of a single state.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPair {
    pub g1: ComplexVector,
    pub g2: ComplexVector,
}

impl BoundaryPair {
    pub fn new(g1: ComplexVector, g2: ComplexVector) -> Result<Self> {
        if g1.len() != g2.len() {
            return Err(Error::Shape(format!(
                "boundary pair components have lengths {} and {}",
                g1.len(),
                g2.len()
            )));
        }
        Ok(Self { g1, g2 })
    }

    pub fn dim(&self) -> usize {
        self.g1.len()
    }

    /// Stacks the pair into a single vector of length `2d`.
    pub fn stacked(&self) -> ComplexVector {
        let d = self.dim();
        ComplexVector::from_fn(
            2 * d,
            |i, _| if i < d { self.g1[i] } else { self.g2[i - d] },
        )
    }
}

/// Subspace of `C^d x C^d` with an orthonormal basis stored as a `2d x k`
/// matrix: upper block `G1`, lower block `G2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySubspace {
    d: usize,
    basis: ComplexMatrix,
}

impl BoundarySubspace {
    /// Wraps an already orthonormal basis.
    pub fn new(d: usize, basis: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if basis.nrows() != 2 * d || basis.ncols() > 2 * d {
            return Err(Error::Shape(format!(
                "basis of a subspace of C^{d} x C^{d} must be {}xk with k <= {}, got {}x{}",
                2 * d,
                2 * d,
                basis.nrows(),
                basis.ncols()
            )));
        }
        let gram = basis.adjoint() * &basis - identity(basis.ncols());
        if gram.iter().any(|z| z.norm() > tol.eq_abs) {
            return Err(Error::InvalidArgument(
                "basis columns are not orthonormal".into(),
            ));
        }
        Ok(Self { d, basis })
    }

    /// Span of arbitrary `2d x m` spanning vectors.
    pub fn from_spanning(d: usize, vectors: &ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if vectors.nrows() != 2 * d {
            return Err(Error::Shape(format!(
                "spanning vectors must have {} rows, got {}",
                2 * d,
                vectors.nrows()
            )));
        }
        Ok(Self {
            d,
            basis: range_basis(vectors, tol),
        })
    }

    pub fn zero(d: usize) -> Self {
        Self {
            d,
            basis: ComplexMatrix::zeros(2 * d, 0),
        }
    }

    pub fn ambient_half_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn g1(&self) -> ComplexMatrix {
        self.basis.rows(0, self.d).into_owned()
    }

    pub fn g2(&self) -> ComplexMatrix {
        self.basis.rows(self.d, self.d).into_owned()
    }

    /// Sine of the largest principal angle to `other`.
    pub fn distance(&self, other: &BoundarySubspace) -> f64 {
        crate::numerics::subspace_distance(&self.basis, &other.basis)
    }
}

/// Contraction on `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionK(ComplexMatrix);

impl ContractionK {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "contraction must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        crate::numerics::ensure_finite(&matrix, "contraction")?;
        let n = operator_norm(&matrix);
        if n > 1.0 + tol.eq_abs {
            return Err(Error::InvalidArgument(format!(
                "operator norm {n} exceeds 1"
            )));
        }
        Ok(Self(matrix))
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn norm(&self) -> f64 {
        operator_norm(&self.0)
    }
}

/// Boundary matrix `W = [W1 W2]` of shape `d x 2d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrixW(ComplexMatrix);

impl BoundaryMatrixW {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() != 2 * matrix.nrows() {
            return Err(Error::Shape(format!(
                "boundary matrix must be d x 2d, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        crate::numerics::ensure_finite(&matrix, "boundary matrix")?;
        Ok(Self(matrix))
    }

    /// Builds `[w1 w2]` from its halves.
    pub fn from_blocks(w1: &ComplexMatrix, w2: &ComplexMatrix) -> Result<Self> {
        if w1.shape() != w2.shape() || !w1.is_square() {
            return Err(Error::Shape(
                "W1 and W2 must be square of equal size".into(),
            ));
        }
        let d = w1.nrows();
        let mut m = ComplexMatrix::zeros(d, 2 * d);
        m.columns_mut(0, d).copy_from(w1);
        m.columns_mut(d, d).copy_from(w2);
        Self::new(m)
    }

    pub fn d(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn w1(&self) -> ComplexMatrix {
        self.0.columns(0, self.d()).into_owned()
    }

    pub fn w2(&self) -> ComplexMatrix {
        self.0.columns(self.d(), self.d()).into_owned()
    }

    /// `W Sigma W* = W1 W2* + W2 W1*`.
    pub fn sigma_form(&self) -> ComplexMatrix {
        let (w1, w2) = (self.w1(), self.w2());
        &w1 * w2.adjoint() + &w2 * w1.adjoint()
    }
}

/// Contraction defined on a subspace of `C^d`: `action` holds the images of
/// the orthonormal `domain_basis` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialContraction {
    pub domain_basis: ComplexMatrix,
    pub action: ComplexMatrix,
}

impl PartialContraction {
    pub fn domain_dim(&self) -> usize {
        self.domain_basis.ncols()
    }

    /// Zero extension to the orthogonal complement of the domain.
    pub fn to_full(&self) -> ContractionK {
        ContractionK(&self.action * self.domain_basis.adjoint())
    }

    pub fn apply(&self, coeffs: &ComplexVector) -> ComplexVector {
        &self.action * coeffs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WVerdict {
    pub rank_ok: bool,
    pub psd_ok: bool,
}

impl WVerdict {
    pub fn admissible(&self) -> bool {
        self.rank_ok && self.psd_ok
    }
}

/// `Sigma = [[0, I], [I, 0]]`.
pub fn sigma(d: usize) -> ComplexMatrix {
    let mut s = ComplexMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        s[(i, d + i)] = c64(1.0, 0.0);
        s[(d + i, i)] = c64(1.0, 0.0);
    }
    s
}

/// `Re <g1, g2> >= 0` on all of `V`.
pub fn is_dissipative_subspace(v: &BoundarySubspace, tol: &Tolerances) -> bool {
    if v.dim() == 0 {
        return true;
    }
    let (g1, g2) = (v.g1(), v.g2());
    let form = g1.adjoint() * &g2 + g2.adjoint() * &g1;
    is_psd_hermitian(&form, tol)
}

pub fn is_maximal_dissipative_subspace(v: &BoundarySubspace, tol: &Tolerances) -> bool {
    v.dim() == v.ambient_half_dim() && is_dissipative_subspace(v, tol)
}

/// The contraction `g1 + g2 -> g1 - g2` induced by a dissipative subspace.
pub fn phi(v: &BoundarySubspace, tol: &Tolerances) -> Result<PartialContraction> {
    let d = v.ambient_half_dim();
    if v.dim() == 0 {
        return Ok(PartialContraction {
            domain_basis: ComplexMatrix::zeros(d, 0),
            action: ComplexMatrix::zeros(d, 0),
        });
    }
    if !is_dissipative_subspace(v, tol) {
        return Err(Error::NotDissipative);
    }
    let (g1, g2) = (v.g1(), v.g2());
    let sum = &g1 + &g2;
    let diff = &g1 - &g2;
    let k = v.dim();
    // On a dissipative V, |(g1 + g2) c|^2 = 1 + 2 Re <g1 c, g2 c> >= 1 for unit
    // coefficient vectors c, so the sum map is injective.
    if numerical_rank(&sum, tol) < k {
        return Err(Error::NotDissipative);
    }
    let svd = numerics::svd(&sum);
    let u = svd.u;
    // Columns of U are images of V diag(1/s); carry the same map over to g1 - g2.
    let mut scaled = svd.v_t.adjoint();
    for (j, s) in svd.singular_values.iter().enumerate() {
        let inv = c64(1.0 / s, 0.0);
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= inv);
    }
    Ok(PartialContraction {
        domain_basis: u,
        action: diff * scaled,
    })
}

/// Maximal dissipative subspace parametrized by `s = g1 + g2`:
/// `g1 = (s + K s) / 2`, `g2 = (s - K s) / 2`.
pub fn psi(k: &ContractionK, tol: &Tolerances) -> BoundarySubspace {
    let d = k.dim();
    let id = identity(d);
    let half = c64(0.5, 0.0);
    let mut spanning = ComplexMatrix::zeros(2 * d, d);
    spanning
        .rows_mut(0, d)
        .copy_from(&((&id + k.matrix()) * half));
    spanning
        .rows_mut(d, d)
        .copy_from(&((&id - k.matrix()) * half));
    BoundarySubspace {
        d,
        basis: range_basis(&spanning, tol),
    }
}

pub fn validate_w(w: &BoundaryMatrixW, tol: &Tolerances) -> WVerdict {
    WVerdict {
        rank_ok: numerical_rank(w.matrix(), tol) == w.d(),
        psd_ok: is_psd_hermitian(&w.sigma_form(), tol),
    }
}

/// `-(W1 + W2)^-1 (W1 - W2)` without checking contractivity.
pub fn theta_matrix(w: &BoundaryMatrixW, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (w1, w2) = (w.w1(), w.w2());
    Ok(-solve(&(&w1 + &w2), &(&w1 - &w2), tol, "W1 + W2")?)
}

/// The contraction parametrizing the boundary condition `W`.
pub fn theta(w: &BoundaryMatrixW, tol: &Tolerances) -> Result<ContractionK> {
    ContractionK::new(theta_matrix(w, tol)?, tol)
}

/// Right inverse of `theta`: `[K - I, -(K + I)]`.
pub fn theta_section(k: &ContractionK) -> BoundaryMatrixW {
    let id = identity(k.dim());
    BoundaryMatrixW::from_blocks(&(k.matrix() - &id), &(-(k.matrix() + &id)))
        .expect("square blocks")
}

/// `ker W` in flow/effort coordinates, returned in triplet coordinates.
pub fn w_kernel_subspace(w: &BoundaryMatrixW, tol: &Tolerances) -> Result<BoundarySubspace> {
    let d = w.d();
    let rank = numerical_rank(w.matrix(), tol);
    if rank != d {
        return Err(Error::RankDeficient {
            what: "W",
            expected: d,
            found: rank,
        });
    }
    let mut basis = nullspace_basis(w.matrix(), tol);
    basis.rows_mut(0, d).neg_mut();
    Ok(BoundarySubspace { d, basis })
}

/// Converts a stacked flow/effort vector `(f, e)` to triplet coordinates
/// `(-f, e)`. The map is its own inverse.
pub fn flip_flow(stacked: &ComplexMatrix) -> ComplexMatrix {
    let d = stacked.nrows() / 2;
    let mut out = stacked.clone();
    out.rows_mut(0, d).neg_mut();
    out
}

/// Largest `|(K - 1) f - (K + 1) e|` over the columns of a `2d x m` matrix of
/// flow/effort pairs.
pub fn domain_law_residual(k: &ContractionK, flow_effort: &ComplexMatrix) -> f64 {
    let d = k.dim();
    let id = identity(d);
    let f = flow_effort.rows(0, d);
    let e = flow_effort.rows(d, d);
    let r = (k.matrix() - &id) * f - (k.matrix() + &id) * e;
    r.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{from_real_rows, max_abs};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn span(d: usize, rows: &[f64]) -> BoundarySubspace {
        let cols = rows.len() / (2 * d);
        BoundarySubspace::from_spanning(d, &from_real_rows(2 * d, cols, rows), &tol()).unwrap()
    }

    fn scalar(k: f64) -> ContractionK {
        ContractionK::new(from_real_rows(1, 1, &[k]), &tol()).unwrap()
    }

    fn w1x2(a: f64, b: f64) -> BoundaryMatrixW {
        BoundaryMatrixW::new(from_real_rows(1, 2, &[a, b])).unwrap()
    }

    #[test]
    fn dissipative_subspace_examples() {
        assert!(is_dissipative_subspace(&span(1, &[1.0, 1.0]), &tol()));
        assert!(!is_dissipative_subspace(&span(1, &[1.0, -1.0]), &tol()));
        assert!(is_dissipative_subspace(&BoundarySubspace::zero(1), &tol()));
    }

    #[test]
    fn maximality_examples() {
        assert!(is_maximal_dissipative_subspace(
            &span(1, &[1.0, 1.0]),
            &tol()
        ));
        assert!(!is_maximal_dissipative_subspace(
            &BoundarySubspace::zero(1),
            &tol()
        ));
        // (e1, e1) in C^2 x C^2: one dimension short of maximal.
        let v = span(2, &[1.0, 0.0, 1.0, 0.0]);
        assert!(is_dissipative_subspace(&v, &tol()));
        assert!(!is_maximal_dissipative_subspace(&v, &tol()));
    }

    #[test]
    fn phi_examples() {
        let p = phi(&span(1, &[1.0, 1.0]), &tol()).unwrap();
        assert_eq!(p.domain_dim(), 1);
        assert!(max_abs(&p.action) < 1e-15);

        // Lemma: K = -1 has domain ker g1.
        let p = phi(&span(1, &[0.0, 1.0]), &tol()).unwrap();
        assert!((p.to_full().matrix()[(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-15);

        let p = phi(&BoundarySubspace::zero(1), &tol()).unwrap();
        assert_eq!(p.domain_dim(), 0);
        assert!(max_abs(p.to_full().matrix()) == 0.0);
    }

    #[test]
    fn phi_rejects_non_dissipative() {
        assert_eq!(
            phi(&span(1, &[1.0, -1.0]), &tol()),
            Err(Error::NotDissipative)
        );
    }

    #[test]
    fn partial_contraction_on_proper_domain() {
        // V = span{(e1, 0)} in d = 2: domain span{e1}, maps e1 -> e1.
        let p = phi(&span(2, &[1.0, 0.0, 0.0, 0.0]), &tol()).unwrap();
        assert_eq!(p.domain_dim(), 1);
        let full = p.to_full();
        let expected = from_real_rows(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(max_abs(&(full.matrix() - expected)) < 1e-14);
        assert!(full.norm() <= 1.0 + 1e-14);
    }

    #[test]
    fn psi_examples() {
        let v = psi(&scalar(0.0), &tol());
        assert!(v.distance(&span(1, &[1.0, 1.0])) < 1e-14);

        let minus = ContractionK::new(-identity(2), &tol()).unwrap();
        let expected = span(2, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert!(psi(&minus, &tol()).distance(&expected) < 1e-14);

        let plus = ContractionK::new(identity(2), &tol()).unwrap();
        let expected = span(2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(psi(&plus, &tol()).distance(&expected) < 1e-14);
        assert!(is_maximal_dissipative_subspace(&psi(&plus, &tol()), &tol()));
    }

    #[test]
    fn validate_w_examples() {
        assert_eq!(
            validate_w(&w1x2(1.0, 1.0), &tol()),
            WVerdict {
                rank_ok: true,
                psd_ok: true
            }
        );
        assert_eq!(
            validate_w(&w1x2(1.0, -1.0), &tol()),
            WVerdict {
                rank_ok: true,
                psd_ok: false
            }
        );
        assert!(!validate_w(&w1x2(0.0, 0.0), &tol()).rank_ok);
    }

    #[test]
    fn theta_examples() {
        let id = identity(2);
        let z = ComplexMatrix::zeros(2, 2);
        let k = theta(&BoundaryMatrixW::from_blocks(&id, &z).unwrap(), &tol()).unwrap();
        assert!(max_abs(&(k.matrix() + &id)) < 1e-15);
        let k = theta(&BoundaryMatrixW::from_blocks(&z, &id).unwrap(), &tol()).unwrap();
        assert!(max_abs(&(k.matrix() - &id)) < 1e-15);
        let k = theta(&w1x2(2.0, 1.0), &tol()).unwrap();
        assert!((k.matrix()[(0, 0)] - c64(-1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn theta_signals_singular_sum() {
        assert_eq!(
            theta(&w1x2(1.0, -1.0), &tol()),
            Err(Error::Singular { what: "W1 + W2" })
        );
    }

    #[test]
    fn theta_section_examples() {
        let t = tol();
        let w = theta_section(&scalar(0.0));
        assert!(max_abs(&(w.matrix() - from_real_rows(1, 2, &[-1.0, -1.0]))) < 1e-15);
        let w = theta_section(&scalar(-1.0));
        assert!(max_abs(&(w.matrix() - from_real_rows(1, 2, &[-2.0, 0.0]))) < 1e-15);
        let w = theta_section(&scalar(-1.0 / 3.0));
        assert!(max_abs(&(w.matrix() - from_real_rows(1, 2, &[-4.0 / 3.0, -2.0 / 3.0]))) < 1e-15);
        assert!(validate_w(&w, &t).admissible());
        // Same kernel as [2, 1].
        let a = w_kernel_subspace(&w, &t).unwrap();
        let b = w_kernel_subspace(&w1x2(2.0, 1.0), &t).unwrap();
        assert!(a.distance(&b) < 1e-14);
    }

    #[test]
    fn kernel_subspace_examples() {
        let t = tol();
        let v = w_kernel_subspace(&w1x2(1.0, 1.0), &t).unwrap();
        assert!(v.distance(&span(1, &[1.0, 1.0])) < 1e-14);
        assert!(is_dissipative_subspace(&v, &t));
        let k = phi(&v, &t).unwrap().to_full();
        assert!(k.matrix()[(0, 0)].norm() < 1e-14);

        let v = w_kernel_subspace(&w1x2(1.0, 0.0), &t).unwrap();
        assert!(v.distance(&span(1, &[0.0, 1.0])) < 1e-14);
        let k = phi(&v, &t).unwrap().to_full();
        assert!((k.matrix()[(0, 0)] + c64(1.0, 0.0)).norm() < 1e-14);

        let v = w_kernel_subspace(&w1x2(1.0, -1.0), &t).unwrap();
        assert!(!is_dissipative_subspace(&v, &t));
    }

    #[test]
    fn kernel_subspace_rejects_rank_deficiency() {
        assert_eq!(
            w_kernel_subspace(&w1x2(0.0, 0.0), &tol()),
            Err(Error::RankDeficient {
                what: "W",
                expected: 1,
                found: 0
            })
        );
    }

    #[test]
    fn sigma_form_matches_expansion() {
        let w = from_real_rows(2, 4, &[1.0, 2.0, 3.0, 4.0, 0.5, -1.0, 2.0, 0.0]);
        let bw = BoundaryMatrixW::new(w.clone()).unwrap();
        assert!(max_abs(&(&w * sigma(2) * w.adjoint() - bw.sigma_form())) < 1e-13);
    }

    #[test]
    fn shape_errors() {
        assert!(BoundaryMatrixW::new(ComplexMatrix::zeros(1, 3)).is_err());
        assert!(ContractionK::new(identity(2) * c64(2.0, 0.0), &tol()).is_err());
        assert!(BoundarySubspace::new(1, from_real_rows(2, 1, &[1.0, 1.0]), &tol()).is_err());
    }
}
