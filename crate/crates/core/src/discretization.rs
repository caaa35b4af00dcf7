//! Energy-exact semi-discretization and Crank–Nicolson time stepping.
//!
//! The state `X` holds the `d` components at each of the `n + 1` nodes,
//! node-major. With `U = H_h X`, the unconstrained operator is
//! `raw X = (I (x) P0) U + (D (x) P1) U` where `D` is the SBP derivative.
//! Because `M_q D + D^T M_q = diag(-1, 0, ..., 0, 1)`, the discrete energy
//! `X* M X / 2` with `M = M_q (x) H` changes at exactly the boundary power
//! `Re <f, e>`. The boundary condition `W (f; e) = 0` is a rank-`d` linear
//! constraint on `X`; the generator is the Galerkin restriction of `raw` to
//! its kernel in the `M` inner product.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, SpatialGrid};
use crate::numerics::{
    c64, identity, nullspace_basis, numerical_rank, pencil_max_eigenvalue, solve, ComplexMatrix,
    ComplexVector, Tolerances,
};
use crate::phs::{self, validate_system, PHSystem};

/// Smallest grid the generator is assembled on.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone)]
pub struct DiscreteGenerator {
    system: PHSystem,
    grid: SpatialGrid,
    raw: ComplexMatrix,
    mass: ComplexMatrix,
    constraint: ComplexMatrix,
    basis: ComplexMatrix,
    mass_reduced: ComplexMatrix,
    form_reduced: ComplexMatrix,
    reduced: ComplexMatrix,
}

pub fn assemble(sys: &PHSystem, n: usize, tol: &Tolerances) -> Result<DiscreteGenerator> {
    if n < MIN_CELLS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_CELLS} cells, got {n}"
        )));
    }
    let verdict = validate_system(sys, tol);
    if !verdict.w.rank_ok {
        return Err(Error::RankDeficient {
            what: "W",
            expected: sys.d,
            found: numerical_rank(sys.w.matrix(), tol),
        });
    }
    if !verdict.structure_ok() {
        return Err(Error::InvalidSystem(verdict.failures().join(", ")));
    }

    let d = sys.d;
    let grid = sys.grid(n)?;
    let nodes = grid.nodes();
    let size = d * nodes;
    let h_nodes = sys.hamiltonian.nodal_values(&grid)?;
    let weights = grid.trapezoid_weights();
    let diff = grid.sbp_derivative();

    let mut raw = ComplexMatrix::zeros(size, size);
    let mut mass = ComplexMatrix::zeros(size, size);
    let p1_h: Vec<ComplexMatrix> = h_nodes.iter().map(|h| &sys.p1 * h).collect();
    for i in 0..nodes {
        for j in 0..nodes {
            let dij = diff[(i, j)];
            if dij != 0.0 {
                let block = &p1_h[j] * c64(dij, 0.0);
                let mut view = raw.view_mut((i * d, j * d), (d, d));
                view += block;
            }
        }
        let mut view = raw.view_mut((i * d, i * d), (d, d));
        view += &sys.p0 * &h_nodes[i];
        mass.view_mut((i * d, i * d), (d, d))
            .copy_from(&(&h_nodes[i] * c64(weights[i], 0.0)));
    }

    let s = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (w1, w2) = (sys.w.w1(), sys.w.w2());
    let mut constraint = ComplexMatrix::zeros(d, size);
    let last = grid.cells();
    constraint
        .view_mut((0, last * d), (d, d))
        .copy_from(&((&w1 * &sys.p1 + &w2) * &h_nodes[last] * s));
    {
        let mut view = constraint.view_mut((0, 0), (d, d));
        view += (&w2 - &w1 * &sys.p1) * &h_nodes[0] * s;
    }
    let rank = numerical_rank(&constraint, tol);
    if rank != d {
        return Err(Error::RankDeficient {
            what: "boundary constraint",
            expected: d,
            found: rank,
        });
    }

    let basis = nullspace_basis(&constraint, tol);
    let mass_reduced = {
        let m = basis.adjoint() * &mass * &basis;
        crate::numerics::hermitian_part(&m)
    };
    let form_reduced = basis.adjoint() * (&mass * &raw) * &basis;
    let chol = mass_reduced.clone().cholesky().ok_or(Error::Singular {
        what: "reduced mass matrix",
    })?;
    let reduced = chol.solve(&form_reduced);

    Ok(DiscreteGenerator {
        system: sys.clone(),
        grid,
        raw,
        mass,
        constraint,
        basis,
        mass_reduced,
        form_reduced,
        reduced,
    })
}

impl DiscreteGenerator {
    pub fn system(&self) -> &PHSystem {
        &self.system
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Reduced generator, `r x r`.
    pub fn reduced(&self) -> &ComplexMatrix {
        &self.reduced
    }

    /// Orthonormal basis `Q` of the constraint kernel.
    pub fn constraint_basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn constraint(&self) -> &ComplexMatrix {
        &self.constraint
    }

    pub fn mass(&self) -> &ComplexMatrix {
        &self.mass
    }

    /// `Q* M Q`.
    pub fn mass_reduced(&self) -> &ComplexMatrix {
        &self.mass_reduced
    }

    pub fn raw(&self) -> &ComplexMatrix {
        &self.raw
    }

    pub fn reduced_dim(&self) -> usize {
        self.reduced.nrows()
    }

    pub fn lift(&self, x: &ComplexVector) -> GridFunction {
        GridFunction::from_flat(self.grid, self.system.d, &(&self.basis * x))
            .expect("basis rows match the grid")
    }

    /// Orthogonal projection onto the constraint kernel; returns reduced
    /// coordinates and the relative projection defect.
    pub fn restrict(&self, x: &GridFunction) -> Result<(ComplexVector, f64)> {
        if x.grid() != &self.grid || x.dim() != self.system.d {
            return Err(Error::Shape(
                "state does not live on the generator grid".into(),
            ));
        }
        let flat = x.flatten();
        let coords = self.basis.adjoint() * &flat;
        let defect = (&flat - &self.basis * &coords).norm();
        let scale = flat.norm();
        Ok((coords, if scale > 0.0 { defect / scale } else { 0.0 }))
    }

    /// `x* M_r x / 2`.
    pub fn energy(&self, x: &ComplexVector) -> f64 {
        0.5 * x.dotc(&(&self.mass_reduced * x)).re
    }

    pub fn boundary_power(&self, x: &ComplexVector) -> f64 {
        phs::boundary_power(&self.lift(x), &self.system).expect("lifted state matches the system")
    }
}

/// Largest eigenvalue of the pencil `(Herm(M_r G), M_r)`; non-positive
/// exactly when the reduced generator is dissipative in the energy norm.
pub fn dissipativity_margin(g: &DiscreteGenerator) -> f64 {
    pencil_max_eigenvalue(&g.form_reduced, &g.mass_reduced)
        .expect("reduced mass was factored during assembly")
}

/// Eigenvalues of the reduced generator, sorted by decreasing real part.
pub fn spectrum(g: &DiscreteGenerator) -> Vec<Complex64> {
    let mut ev = crate::numerics::eigenvalues(&g.reduced);
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Precomputed Crank–Nicolson propagator
/// `(I - dt/2 G)^-1 (I + dt/2 G)`, the Cayley transform of `dt/2 G`.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    dt: f64,
    propagator: ComplexMatrix,
}

impl CrankNicolson {
    pub fn new(g: &DiscreteGenerator, dt: f64, tol: &Tolerances) -> Result<Self> {
        Self::from_matrix(&g.reduced, dt, tol)
    }

    pub fn from_matrix(g: &ComplexMatrix, dt: f64, tol: &Tolerances) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let r = g.nrows();
        let half = g * c64(0.5 * dt, 0.0);
        let propagator = solve(
            &(identity(r) - &half),
            &(identity(r) + &half),
            tol,
            "I - dt/2 G",
        )?;
        Ok(Self { dt, propagator })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn propagator(&self) -> &ComplexMatrix {
        &self.propagator
    }

    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        &self.propagator * x
    }
}

/// One Crank–Nicolson step.
pub fn step(
    g: &DiscreteGenerator,
    x: &ComplexVector,
    dt: f64,
    tol: &Tolerances,
) -> Result<ComplexVector> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let r = g.reduced_dim();
    let half = &g.reduced * c64(0.5 * dt, 0.0);
    let rhs = (identity(r) + &half) * x;
    let out = solve(
        &(identity(r) - &half),
        &ComplexMatrix::from_column_slice(r, 1, rhs.as_slice()),
        tol,
        "I - dt/2 G",
    )?;
    Ok(out.column(0).into_owned())
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
    pub energies: Vec<f64>,
    pub boundary_powers: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest single-step energy increase (negative when strictly decaying).
    pub fn max_energy_increase(&self) -> f64 {
        self.energies
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub trajectory: Trajectory,
    /// Relative distance of the initial state from the constraint kernel.
    pub projection_defect: f64,
    pub steps: usize,
    pub dt: f64,
}

/// Integrates from `x0` to time `t_end` with steps close to `dt` (the step is
/// shrunk so that an integer number of steps lands on `t_end`).
pub fn simulate(
    g: &DiscreteGenerator,
    x0: &GridFunction,
    t_end: f64,
    dt: f64,
    tol: &Tolerances,
) -> Result<Simulation> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "final time must be positive, got {t_end}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let stepper = CrankNicolson::new(g, dt, tol)?;
    let (mut x, projection_defect) = g.restrict(x0)?;

    let mut traj = Trajectory::default();
    let record = |k: usize, x: &ComplexVector, traj: &mut Trajectory| {
        traj.times.push(k as f64 * dt);
        traj.energies.push(g.energy(x));
        traj.boundary_powers.push(g.boundary_power(x));
        traj.states.push(g.lift(x));
    };
    record(0, &x, &mut traj);
    for k in 1..=steps {
        x = stepper.apply(&x);
        record(k, &x, &mut traj);
    }
    Ok(Simulation {
        trajectory: traj,
        projection_defect,
        steps,
        dt,
    })
}

/// Largest `|dE/dt - boundary power|` over interior samples, with `dE/dt`
/// from centered differences.
pub fn power_balance_residual(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "power balance needs at least 3 states, got {}",
            traj.len()
        )));
    }
    Ok((1..traj.len() - 1)
        .map(|k| {
            let rate = (traj.energies[k + 1] - traj.energies[k - 1])
                / (traj.times[k + 1] - traj.times[k - 1]);
            (rate - traj.boundary_powers[k]).abs()
        })
        .fold(0.0, f64::max))
}
