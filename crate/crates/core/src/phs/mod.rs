//! The port-Hamiltonian model
//!
//! ```text
//! dx/dt = P0 (H x) + P1 d(H x)/dxi   on [a, b],   W (f; e)(H x) = 0,
//! ```
//!
//! with flow `f = P1 (y(b) - y(a)) / sqrt 2` and effort
//! `e = (y(b) + y(a)) / sqrt 2` of `y = H x`.

mod deficiency;
mod operator;

pub use deficiency::{
    deficiency_basis, deficiency_spaces, CanonicalTriplet, Decomposition, DeficiencyBasis,
    DeficiencyPair,
};
pub use operator::{
    apply_operator, boundary_power, energy, flow_effort, green_identity_residual,
    green_identity_sides, inner_x, triplet_boundary, FlowEffort, GreenSides,
};

use crate::boundary::{self, BoundaryMatrixW, WVerdict};
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::numerics::{
    hermitian_eigenvalues, identity, is_hermitian, numerical_rank, operator_norm, ComplexMatrix,
    Tolerances,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// One matrix on the whole interval.
    Constant,
    /// One matrix per equal-width cell of `[a, b]`.
    Cells,
    /// One matrix per grid node; only usable on a grid with matching size.
    NodeSampled,
}

/// Coercive Hermitian field with `m |z|^2 <= <H z, z> <= M |z|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianField {
    kind: HamiltonianKind,
    values: Vec<ComplexMatrix>,
    lower: f64,
    upper: f64,
}

impl HamiltonianField {
    pub fn new(
        kind: HamiltonianKind,
        values: Vec<ComplexMatrix>,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "hamiltonian needs at least one value".into(),
            ));
        }
        if kind == HamiltonianKind::Constant && values.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "constant hamiltonian takes exactly one value, got {}",
                values.len()
            )));
        }
        let d = values[0].nrows();
        if values.iter().any(|v| v.nrows() != d || v.ncols() != d) {
            return Err(Error::Shape("hamiltonian values must all be d x d".into()));
        }
        for v in &values {
            crate::numerics::ensure_finite(v, "hamiltonian")?;
        }
        if !(lower.is_finite() && upper.is_finite()) {
            return Err(Error::InvalidArgument(
                "hamiltonian bounds must be finite".into(),
            ));
        }
        Ok(Self {
            kind,
            values,
            lower,
            upper,
        })
    }

    pub fn constant(value: ComplexMatrix, lower: f64, upper: f64) -> Result<Self> {
        Self::new(HamiltonianKind::Constant, vec![value], lower, upper)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kind: HamiltonianKind::Constant,
            values: vec![identity(d)],
            lower: 1.0,
            upper: 1.0,
        }
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn dim(&self) -> usize {
        self.values[0].nrows()
    }

    pub fn is_identity(&self) -> bool {
        self.kind == HamiltonianKind::Constant && self.values[0] == identity(self.dim())
    }

    /// Value at every node of `grid`. Nodes on a cell interface take the
    /// value of the cell to their right; the last node takes the last cell.
    pub fn nodal_values(&self, grid: &SpatialGrid) -> Result<Vec<ComplexMatrix>> {
        match self.kind {
            HamiltonianKind::Constant => Ok(vec![self.values[0].clone(); grid.nodes()]),
            HamiltonianKind::Cells => {
                let cells = self.values.len();
                let width = grid.b() - grid.a();
                Ok(grid
                    .points()
                    .map(|xi| {
                        let t = (xi - grid.a()) / width * cells as f64;
                        let idx = (t.floor().max(0.0) as usize).min(cells - 1);
                        self.values[idx].clone()
                    })
                    .collect())
            }
            HamiltonianKind::NodeSampled => {
                if self.values.len() != grid.nodes() {
                    return Err(Error::Shape(format!(
                        "node-sampled hamiltonian has {} values but the grid has {} nodes",
                        self.values.len(),
                        grid.nodes()
                    )));
                }
                Ok(self.values.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PHSystem {
    pub d: usize,
    pub a: f64,
    pub b: f64,
    pub p0: ComplexMatrix,
    pub p1: ComplexMatrix,
    pub hamiltonian: HamiltonianField,
    pub w: BoundaryMatrixW,
}

impl PHSystem {
    /// Checks shapes only; semantic conditions are reported by
    /// [`validate_system`].
    pub fn new(
        a: f64,
        b: f64,
        p0: ComplexMatrix,
        p1: ComplexMatrix,
        hamiltonian: HamiltonianField,
        w: BoundaryMatrixW,
    ) -> Result<Self> {
        let d = p1.nrows();
        if d == 0 {
            return Err(Error::Shape("system dimension must be positive".into()));
        }
        let square = |m: &ComplexMatrix| m.nrows() == d && m.ncols() == d;
        if !square(&p0) || !square(&p1) {
            return Err(Error::Shape(format!(
                "P0 and P1 must be {d}x{d}, got {}x{} and {}x{}",
                p0.nrows(),
                p0.ncols(),
                p1.nrows(),
                p1.ncols()
            )));
        }
        if hamiltonian.dim() != d {
            return Err(Error::Shape(format!("hamiltonian must be {d}x{d}")));
        }
        if w.d() != d {
            return Err(Error::Shape(format!("W must be {d}x{}", 2 * d)));
        }
        crate::numerics::ensure_finite(&p0, "P0")?;
        crate::numerics::ensure_finite(&p1, "P1")?;
        SpatialGrid::new(a, b, 1)?;
        Ok(Self {
            d,
            a,
            b,
            p0,
            p1,
            hamiltonian,
            w,
        })
    }

    pub fn grid(&self, n: usize) -> Result<SpatialGrid> {
        SpatialGrid::new(self.a, self.b, n)
    }

    pub fn with_w(&self, w: BoundaryMatrixW) -> Result<Self> {
        Self::new(
            self.a,
            self.b,
            self.p0.clone(),
            self.p1.clone(),
            self.hamiltonian.clone(),
            w,
        )
    }

    /// The same system with `H = I`.
    pub fn reduced(&self) -> Self {
        Self {
            hamiltonian: HamiltonianField::identity(self.d),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemVerdict {
    pub p0_skew: bool,
    pub p1_hermitian: bool,
    pub p1_invertible: bool,
    pub hamiltonian_ok: bool,
    pub w: WVerdict,
}

impl SystemVerdict {
    /// Everything except admissibility of `W` holds; the system can be
    /// discretized and its boundary condition judged.
    pub fn structure_ok(&self) -> bool {
        self.p0_skew
            && self.p1_hermitian
            && self.p1_invertible
            && self.hamiltonian_ok
            && self.w.rank_ok
    }

    pub fn all_ok(&self) -> bool {
        self.structure_ok() && self.w.psd_ok
    }

    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("p0_skew", self.p0_skew),
            ("p1_hermitian", self.p1_hermitian),
            ("p1_invertible", self.p1_invertible),
            ("hamiltonian_ok", self.hamiltonian_ok),
            ("w_rank_ok", self.w.rank_ok),
            ("w_psd_ok", self.w.psd_ok),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| name)
        .collect()
    }
}

pub fn validate_system(sys: &PHSystem, tol: &Tolerances) -> SystemVerdict {
    let p0_skew = {
        let sum = &sys.p0 + sys.p0.adjoint();
        operator_norm(&sum) <= tol.eq_abs * (1.0 + operator_norm(&sys.p0))
    };
    let (m, big_m) = sys.hamiltonian.bounds();
    let hamiltonian_ok = m > 0.0
        && m <= big_m
        && sys.hamiltonian.values().iter().all(|h| {
            if !is_hermitian(h, tol) {
                return false;
            }
            let ev = hermitian_eigenvalues(h);
            let slack = tol.psd_abs * (1.0 + operator_norm(h));
            ev.first().is_some_and(|&lo| lo >= m - slack)
                && ev.last().is_some_and(|&hi| hi <= big_m + slack)
        });
    SystemVerdict {
        p0_skew,
        p1_hermitian: is_hermitian(&sys.p1, tol),
        p1_invertible: numerical_rank(&sys.p1, tol) == sys.d,
        hamiltonian_ok,
        w: boundary::validate_w(&sys.w, tol),
    }
}

/// Reference systems used throughout the tests and benchmarks.
pub mod fixtures {
    use super::*;
    use crate::numerics::from_real_rows;

    /// `dx/dt = dx/dxi` on `(0, 1)` with boundary matrix `[w1, w2]`.
    pub fn transport(w1: f64, w2: f64) -> PHSystem {
        PHSystem::new(
            0.0,
            1.0,
            ComplexMatrix::zeros(1, 1),
            identity(1),
            HamiltonianField::identity(1),
            BoundaryMatrixW::new(from_real_rows(1, 2, &[w1, w2])).expect("1x2"),
        )
        .expect("valid shapes")
    }

    pub fn transport_with(w: BoundaryMatrixW) -> PHSystem {
        transport(1.0, 1.0).with_w(w).expect("d = 1")
    }

    /// Wave-type system with `P1 = [[0, 1], [1, 0]]`, `H = I` on `(0, 1)`.
    pub fn wave(w: BoundaryMatrixW) -> PHSystem {
        PHSystem::new(
            0.0,
            1.0,
            ComplexMatrix::zeros(2, 2),
            from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            HamiltonianField::identity(2),
            w,
        )
        .expect("valid shapes")
    }

    /// `[I, 0]`: the conservative extension with `K = -I`.
    pub fn conservative_w(d: usize) -> BoundaryMatrixW {
        BoundaryMatrixW::from_blocks(&identity(d), &ComplexMatrix::zeros(d, d)).expect("square")
    }

    /// `[I, I]`: the contraction `K = 0`.
    pub fn dissipative_w(d: usize) -> BoundaryMatrixW {
        BoundaryMatrixW::from_blocks(&identity(d), &identity(d)).expect("square")
    }
}
