//! Dissipative matrices and the Cayley transform `C = (1 + A)(1 - A)^-1`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    c64, hermitian_eigenvalues, identity, inverse, operator_norm, ComplexMatrix, Tolerances,
};
use crate::sampling;

/// `Re <Ax, x> <= 0` for all `x`, decided on the spectrum of the Hermitian part.
pub fn is_dissipative(a: &ComplexMatrix, tol: &Tolerances) -> bool {
    if !a.is_square() {
        return false;
    }
    match hermitian_eigenvalues(a).last() {
        None => true,
        Some(&top) => top <= tol.psd_abs * (1.0 + operator_norm(a)),
    }
}

/// Probes `lambda |x| <= |(lambda - A) x|` for every `lambda` on `samples`
/// random unit vectors plus the leading eigenvector of the Hermitian part of
/// `A`, which is where the bound is tightest for large `lambda`.
pub fn resolvent_bound_check<R: Rng + ?Sized>(
    a: &ComplexMatrix,
    lambdas: &[f64],
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "{}x{} matrix is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    if let Some(&bad) = lambdas.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {bad}"
        )));
    }
    let d = a.nrows();
    if d == 0 {
        return Ok(true);
    }
    let mut probes: Vec<ComplexMatrix> = (0..samples)
        .map(|_| sampling::random_unit_vector(rng, d))
        .collect();
    let herm = crate::numerics::chopped(&crate::numerics::hermitian_part(a));
    let eig = herm.symmetric_eigen();
    let top = (0..d)
        .max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]))
        .expect("nonempty");
    probes.push(eig.eigenvectors.columns(top, 1).into_owned());

    for &lambda in lambdas {
        let shifted = identity(d) * c64(lambda, 0.0) - a;
        for x in &probes {
            let lhs = lambda * x.norm();
            let rhs = (&shifted * x).norm();
            if lhs > rhs + tol.eq_abs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn cayley_transform(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let id = identity(a.nrows());
    let inv = inverse(&(&id - a), tol, "1 - A")?;
    Ok((&id + a) * inv)
}

/// Recovers `A = -(1 - C)(1 + C)^-1`.
pub fn inverse_cayley(c: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let id = identity(c.nrows());
    let inv = inverse(&(&id + c), tol, "1 + C")?;
    Ok(-((&id - c) * inv))
}
