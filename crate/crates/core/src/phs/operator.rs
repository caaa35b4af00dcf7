use num_complex::Complex64;

use super::PHSystem;
use crate::boundary::BoundaryPair;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numerics::{c64, ComplexVector};

/// Port-Hamiltonian boundary flow and effort of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEffort {
    pub flow: ComplexVector,
    pub effort: ComplexVector,
}

impl FlowEffort {
    /// Triplet coordinates `(g1, g2) = (-f, e)`.
    pub fn to_triplet(&self) -> BoundaryPair {
        BoundaryPair {
            g1: -&self.flow,
            g2: self.effort.clone(),
        }
    }
}

fn check_domain(y: &GridFunction, sys: &PHSystem) -> Result<()> {
    let g = y.grid();
    if y.dim() != sys.d || g.a() != sys.a || g.b() != sys.b {
        return Err(Error::Shape(format!(
            "grid function of dimension {} on [{}, {}] does not belong to a system of dimension {} on [{}, {}]",
            y.dim(),
            g.a(),
            g.b(),
            sys.d,
            sys.a,
            sys.b
        )));
    }
    Ok(())
}

/// `H y` node by node.
pub(crate) fn weighted(y: &GridFunction, sys: &PHSystem) -> Result<GridFunction> {
    check_domain(y, sys)?;
    if sys.hamiltonian.is_identity() {
        return Ok(y.clone());
    }
    let h = sys.hamiltonian.nodal_values(y.grid())?;
    Ok(y.map_nodes(|i, v| &h[i] * v))
}

/// `f = P1 (y(b) - y(a)) / sqrt 2`, `e = (y(b) + y(a)) / sqrt 2`.
pub fn flow_effort(y: &GridFunction, sys: &PHSystem) -> Result<FlowEffort> {
    check_domain(y, sys)?;
    let s = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (ya, yb) = (y.first(), y.last());
    Ok(FlowEffort {
        flow: &sys.p1 * (&yb - &ya) * s,
        effort: (yb + ya) * s,
    })
}

pub fn triplet_boundary(y: &GridFunction, sys: &PHSystem) -> Result<BoundaryPair> {
    Ok(flow_effort(y, sys)?.to_triplet())
}

/// `P0 (H y) + P1 (H y)'` with the second-order closed difference stencil.
pub fn apply_operator(y: &GridFunction, sys: &PHSystem) -> Result<GridFunction> {
    let u = weighted(y, sys)?;
    let du = u.derivative();
    Ok(u.map_nodes(|i, ui| &sys.p0 * ui + &sys.p1 * du.at(i)))
}

/// `<x, y>_X = <H x, y>_{L^2}` by trapezoid quadrature.
pub fn inner_x(x: &GridFunction, y: &GridFunction, sys: &PHSystem) -> Result<Complex64> {
    check_domain(y, sys)?;
    Ok(weighted(x, sys)?.inner_l2(y))
}

/// `E = <H x, x>_{L^2} / 2`.
pub fn energy(x: &GridFunction, sys: &PHSystem) -> Result<f64> {
    Ok(0.5 * inner_x(x, x, sys)?.re.max(0.0))
}

/// `Re <f, e>` evaluated on `H x`; the rate of change of [`energy`] along
/// solutions.
pub fn boundary_power(x: &GridFunction, sys: &PHSystem) -> Result<f64> {
    let fe = flow_effort(&weighted(x, sys)?, sys)?;
    Ok(fe.effort.dotc(&fe.flow).re)
}

/// Both sides of the Green identity
/// `<A* x, y>_X + <x, A* y>_X = <g1 x, g2 y> + <g2 x, g1 y>` with
/// `A* = -apply_operator` and triplet values taken from `H x`, `H y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenSides {
    pub interior: Complex64,
    pub boundary: Complex64,
}

impl GreenSides {
    pub fn residual(&self) -> f64 {
        (self.interior - self.boundary).norm()
    }
}

pub fn green_identity_sides(
    x: &GridFunction,
    y: &GridFunction,
    sys: &PHSystem,
) -> Result<GreenSides> {
    let ax = apply_operator(x, sys)?;
    let ay = apply_operator(y, sys)?;
    let interior = -(inner_x(&ax, y, sys)? + inner_x(x, &ay, sys)?);
    let tx = triplet_boundary(&weighted(x, sys)?, sys)?;
    let ty = triplet_boundary(&weighted(y, sys)?, sys)?;
    let boundary = ty.g2.dotc(&tx.g1) + ty.g1.dotc(&tx.g2);
    Ok(GreenSides { interior, boundary })
}

pub fn green_identity_residual(x: &GridFunction, y: &GridFunction, sys: &PHSystem) -> Result<f64> {
    Ok(green_identity_sides(x, y, sys)?.residual())
}
