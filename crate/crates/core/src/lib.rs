//! Classification of boundary conditions for one-dimensional
//! port-Hamiltonian systems as generators of contraction semigroups, with
//! structure-preserving simulation to cross-check the verdict.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: dense complex linear algebra and the tolerance policy.
//! - [`cayley`]: dissipative matrices and the Cayley transform.
//! - [`boundary`]: boundary subspaces, contractions and boundary matrices.
//! - [`phs`]: the continuous model, its boundary maps and deficiency spaces.
//! - [`discretization`]: SBP spatial discretization and Crank–Nicolson stepping.

pub mod boundary;
pub mod cayley;
pub mod discretization;
pub mod error;
pub mod grid;
pub mod numerics;
pub mod phs;
pub mod sampling;

pub use boundary::{
    BoundaryMatrixW, BoundaryPair, BoundarySubspace, ContractionK, PartialContraction, WVerdict,
};
pub use discretization::{DiscreteGenerator, Trajectory};
pub use error::{Error, Result};
pub use grid::{GridFunction, SpatialGrid};
pub use numerics::{ComplexMatrix, ComplexVector, Tolerances};
pub use phs::{HamiltonianField, HamiltonianKind, PHSystem};
