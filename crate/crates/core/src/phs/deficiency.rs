//! Deficiency spaces `ker(1 -+ A*)`, the decomposition
//! `D(A*) = D(A) + ker(1 - A*) + ker(1 + A*)`, and the boundary triplet
//! built from it.
//!
//! All of this is done for the reduced operator (`H = I`); a general
//! Hamiltonian is related to it by the substitution `y = H x`.

use super::{validate_system, PHSystem};
use crate::boundary::BoundaryPair;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, SpatialGrid};
use crate::numerics::{c64, identity, inverse, solve, ComplexMatrix, ComplexVector, Tolerances};

/// `d` independent solutions of `A* x = epsilon x`, i.e.
/// `x' = -P1^-1 (epsilon + P0) x`, normalized to the identity at `a`.
#[derive(Debug, Clone)]
pub struct DeficiencyBasis {
    pub epsilon: f64,
    pub columns: Vec<GridFunction>,
    /// `[X(a); X(b)]`, `2d x d`.
    pub endpoint_matrix: ComplexMatrix,
    /// Relative `L^2` defect of `A* x - epsilon x` for each column.
    pub residuals: Vec<f64>,
}

impl DeficiencyBasis {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn grid(&self) -> &SpatialGrid {
        self.columns[0].grid()
    }

    /// `sum_j coeffs[j] * columns[j]`.
    pub fn combine(&self, coeffs: &ComplexVector) -> GridFunction {
        let grid = *self.grid();
        let d = self.columns[0].dim();
        let mut acc = GridFunction::zeros(grid, d);
        for (col, &c) in self.columns.iter().zip(coeffs.iter()) {
            acc = acc.add(&col.scaled(c));
        }
        acc
    }

    /// Trapezoid Gram matrix `G[i][j] = <col_j, col_i>`.
    pub fn gram(&self) -> ComplexMatrix {
        let k = self.dim();
        ComplexMatrix::from_fn(k, k, |i, j| self.columns[j].inner_l2(&self.columns[i]))
    }
}

pub fn deficiency_basis(
    sys: &PHSystem,
    epsilon: f64,
    n: usize,
    tol: &Tolerances,
) -> Result<DeficiencyBasis> {
    if epsilon != 1.0 && epsilon != -1.0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be +1 or -1, got {epsilon}"
        )));
    }
    let verdict = validate_system(sys, tol);
    if !(verdict.p0_skew && verdict.p1_hermitian && verdict.p1_invertible) {
        return Err(Error::InvalidSystem(verdict.failures().join(", ")));
    }
    let d = sys.d;
    let grid = sys.grid(n)?;
    let p1_inv = inverse(&sys.p1, tol, "P1")?;
    let generator = -(&p1_inv * (identity(d) * c64(epsilon, 0.0) + &sys.p0));

    let fundamental: Vec<ComplexMatrix> = grid
        .points()
        .map(|xi| (&generator * c64(xi - sys.a, 0.0)).exp())
        .collect();

    let columns: Vec<GridFunction> = (0..d)
        .map(|j| {
            GridFunction::zeros(grid, d).map_nodes(|i, _| fundamental[i].column(j).into_owned())
        })
        .collect();

    // The derivative of exp(G s) is exp(G s) G; using the right-hand form
    // keeps the defect sensitive to errors in the exponential.
    let residuals = (0..d)
        .map(|j| {
            let defect = columns[j].map_nodes(|i, x| {
                let dx = (&fundamental[i] * &generator).column(j).into_owned();
                -(&sys.p0 * &x) - &sys.p1 * dx - x * c64(epsilon, 0.0)
            });
            defect.norm_l2() / columns[j].norm_l2()
        })
        .collect();

    let mut endpoint_matrix = ComplexMatrix::zeros(2 * d, d);
    endpoint_matrix.rows_mut(0, d).copy_from(&fundamental[0]);
    endpoint_matrix
        .rows_mut(d, d)
        .copy_from(&fundamental[grid.cells()]);

    Ok(DeficiencyBasis {
        epsilon,
        columns,
        endpoint_matrix,
        residuals,
    })
}

/// Both deficiency spaces on one grid.
#[derive(Debug, Clone)]
pub struct DeficiencyPair {
    /// `ker(1 - A*)`.
    pub plus: DeficiencyBasis,
    /// `ker(1 + A*)`.
    pub minus: DeficiencyBasis,
}

pub fn deficiency_spaces(sys: &PHSystem, n: usize, tol: &Tolerances) -> Result<DeficiencyPair> {
    Ok(DeficiencyPair {
        plus: deficiency_basis(sys, 1.0, n, tol)?,
        minus: deficiency_basis(sys, -1.0, n, tol)?,
    })
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Remainder vanishing at both endpoints, i.e. an element of `D(A)`.
    pub core: GridFunction,
    pub coeff_plus: ComplexVector,
    pub coeff_minus: ComplexVector,
    /// Largest endpoint magnitude of `core`.
    pub residual: f64,
}

impl DeficiencyPair {
    pub fn dims(&self) -> (usize, usize) {
        (self.plus.dim(), self.minus.dim())
    }

    /// Splits `x` into a part vanishing at both endpoints plus deficiency
    /// components, by matching endpoint values.
    pub fn decompose(&self, x: &GridFunction, tol: &Tolerances) -> Result<Decomposition> {
        let grid = self.plus.grid();
        if x.grid() != grid || x.dim() != self.plus.dim() {
            return Err(Error::Shape(
                "state does not live on the deficiency grid".into(),
            ));
        }
        let d = x.dim();
        let mut system = ComplexMatrix::zeros(2 * d, 2 * d);
        system
            .columns_mut(0, d)
            .copy_from(&self.plus.endpoint_matrix);
        system
            .columns_mut(d, d)
            .copy_from(&self.minus.endpoint_matrix);
        let mut rhs = ComplexMatrix::zeros(2 * d, 1);
        rhs.rows_mut(0, d).copy_from(&x.first());
        rhs.rows_mut(d, d).copy_from(&x.last());
        let coeffs = solve(&system, &rhs, tol, "endpoint system")?;
        let coeff_plus = coeffs.rows(0, d).column(0).into_owned();
        let coeff_minus = coeffs.rows(d, d).column(0).into_owned();
        let core = x
            .sub(&self.plus.combine(&coeff_plus))
            .sub(&self.minus.combine(&coeff_minus));
        let residual = core.first().norm().max(core.last().norm());
        Ok(Decomposition {
            core,
            coeff_plus,
            coeff_minus,
            residual,
        })
    }
}

/// Boundary triplet on `H = ker(1 - A*)`:
/// `G1 = p1 + phi p2`, `G2 = p1 - phi p2`, where `p1`, `p2` are the
/// deficiency components and `phi` matches the `j`-th orthonormal vector of
/// `ker(1 + A*)` with the `j`-th of `ker(1 - A*)`. Values are coordinates in
/// the orthonormalized `ker(1 - A*)` basis.
#[derive(Debug, Clone)]
pub struct CanonicalTriplet {
    spaces: DeficiencyPair,
    /// `L*` from the Cholesky factor of each Gram matrix: maps raw
    /// coefficients to orthonormal-basis coordinates.
    to_ortho_plus: ComplexMatrix,
    to_ortho_minus: ComplexMatrix,
    from_ortho_plus: ComplexMatrix,
    from_ortho_minus: ComplexMatrix,
    tol: Tolerances,
}

impl CanonicalTriplet {
    pub fn new(spaces: DeficiencyPair, tol: &Tolerances) -> Result<Self> {
        let (dp, dm) = spaces.dims();
        if dp != dm {
            return Err(Error::InvalidSystem(format!(
                "deficiency dimensions differ: {dp} vs {dm}"
            )));
        }
        let factor = |basis: &DeficiencyBasis| -> Result<(ComplexMatrix, ComplexMatrix)> {
            let chol = basis.gram().cholesky().ok_or(Error::Singular {
                what: "deficiency Gram matrix",
            })?;
            let lt = chol.l().adjoint();
            let lt_inv = inverse(&lt, tol, "deficiency Gram factor")?;
            Ok((lt, lt_inv))
        };
        let (to_ortho_plus, from_ortho_plus) = factor(&spaces.plus)?;
        let (to_ortho_minus, from_ortho_minus) = factor(&spaces.minus)?;
        Ok(Self {
            spaces,
            to_ortho_plus,
            to_ortho_minus,
            from_ortho_plus,
            from_ortho_minus,
            tol: *tol,
        })
    }

    pub fn from_system(sys: &PHSystem, n: usize, tol: &Tolerances) -> Result<Self> {
        Self::new(deficiency_spaces(sys, n, tol)?, tol)
    }

    pub fn spaces(&self) -> &DeficiencyPair {
        &self.spaces
    }

    /// `(G1 x, G2 x)`.
    pub fn evaluate(&self, x: &GridFunction) -> Result<BoundaryPair> {
        let dec = self.spaces.decompose(x, &self.tol)?;
        let p1 = &self.to_ortho_plus * dec.coeff_plus;
        let p2 = &self.to_ortho_minus * dec.coeff_minus;
        Ok(BoundaryPair {
            g1: &p1 + &p2,
            g2: p1 - p2,
        })
    }

    /// The element `x1 + x2` with `x1 = (y1 + y2)/2` in `ker(1 - A*)` and
    /// `x2 = phi^-1 (y1 - y2)/2` in `ker(1 + A*)`, which maps to `(y1, y2)`.
    pub fn preimage(&self, y1: &ComplexVector, y2: &ComplexVector) -> GridFunction {
        let half = c64(0.5, 0.0);
        let plus = &self.from_ortho_plus * ((y1 + y2) * half);
        let minus = &self.from_ortho_minus * ((y1 - y2) * half);
        self.spaces
            .plus
            .combine(&plus)
            .add(&self.spaces.minus.combine(&minus))
    }

    /// Green identity residual for this triplet, with the interior side
    /// evaluated on the reduced operator.
    pub fn green_residual(
        &self,
        x: &GridFunction,
        y: &GridFunction,
        sys: &PHSystem,
    ) -> Result<f64> {
        let reduced = sys.reduced();
        let ax = super::apply_operator(x, &reduced)?;
        let ay = super::apply_operator(y, &reduced)?;
        let interior = -(ax.inner_l2(y) + x.inner_l2(&ay));
        let (tx, ty) = (self.evaluate(x)?, self.evaluate(y)?);
        let boundary = ty.g2.dotc(&tx.g1) + ty.g1.dotc(&tx.g2);
        Ok((interior - boundary).norm())
    }
}
