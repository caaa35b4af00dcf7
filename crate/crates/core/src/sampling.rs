//! Seeded random generators for the matrix classes exercised by the
//! property sweeps and the `green` command.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::boundary::{self, BoundaryMatrixW, ContractionK};
use crate::numerics::{c64, identity, operator_norm, ComplexMatrix};

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c64(re, im) / c64(std::f64::consts::SQRT_2, 0.0)
    })
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    loop {
        let v = gaussian(rng, d, 1);
        let n = v.norm();
        if n > 1e-12 {
            return v / c64(n, 0.0);
        }
    }
}

/// Skew-Hermitian matrix with operator norm of order one.
pub fn random_skew_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = gaussian(rng, d, d);
    (&g - g.adjoint()) * c64(0.5 / (d as f64).sqrt(), 0.0)
}

/// Positive semidefinite matrix `G G*` with a random (possibly deficient) rank.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let k = rng.random_range(0..=d);
    let g = gaussian(rng, d, k) * c64(1.0 / (d as f64).sqrt(), 0.0);
    &g * g.adjoint()
}

/// Dissipative matrix built as (skew-Hermitian) - (PSD).
pub fn random_dissipative<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    random_skew_hermitian(rng, d) - random_psd(rng, d)
}

/// Matrix whose Hermitian part has its top eigenvalue at least `margin`.
pub fn random_non_dissipative<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    margin: f64,
) -> ComplexMatrix {
    let a = random_dissipative(rng, d);
    let herm = crate::numerics::hermitian_part(&a);
    let top = crate::numerics::hermitian_eigenvalues(&herm)
        .last()
        .copied()
        .unwrap_or(0.0);
    let shift = margin - top + rng.random_range(0.0..1.0);
    a + identity(d) * c64(shift, 0.0)
}

/// Contraction with norm drawn uniformly from `[0, 1]`; one draw in eight is
/// an exact isometry.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ContractionK {
    let g = gaussian(rng, d, d);
    let m = if rng.random_range(0..8) == 0 {
        g.qr().q()
    } else {
        let n = operator_norm(&g).max(1e-300);
        let target: f64 = rng.random_range(0.0..=1.0);
        g * c64(target / n, 0.0)
    };
    ContractionK::new_unchecked(m)
}

/// Admissible boundary matrix `S [K - I, -(K + I)]` with random contraction
/// `K` and random invertible `S`.
pub fn random_admissible_w<R: Rng + ?Sized>(rng: &mut R, d: usize) -> BoundaryMatrixW {
    let k = random_contraction(rng, d);
    let section = boundary::theta_section(&k);
    let s = gaussian(rng, d, d) + identity(d) * c64(2.0, 0.0);
    BoundaryMatrixW::new(s * section.matrix()).expect("shape is d x 2d")
}

/// Generic `d x 2d` boundary matrix, full rank with probability one.
pub fn random_w<R: Rng + ?Sized>(rng: &mut R, d: usize) -> BoundaryMatrixW {
    BoundaryMatrixW::new(gaussian(rng, d, 2 * d)).expect("shape is d x 2d")
}

/// Random trigonometric profile `c0 + sum_k (a_k cos(k pi s) + b_k sin(k pi s))`
/// in the rescaled coordinate `s = (xi - a) / (b - a)`, one independent
/// profile per component. Coefficients are drawn once, so the same profile
/// can be sampled on several grids.
#[derive(Debug, Clone)]
pub struct SmoothProfile {
    modes: usize,
    coeffs: Vec<Vec<(num_complex::Complex64, num_complex::Complex64)>>,
}

impl SmoothProfile {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, modes: usize) -> Self {
        let coeffs = (0..d)
            .map(|_| {
                (0..=modes)
                    .map(|_| {
                        let g = gaussian(rng, 2, 1);
                        (g[0], g[1])
                    })
                    .collect()
            })
            .collect();
        Self { modes, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, s: f64) -> crate::numerics::ComplexVector {
        let pi = std::f64::consts::PI;
        crate::numerics::ComplexVector::from_fn(self.dim(), |c, _| {
            let row = &self.coeffs[c];
            let mut acc = row[0].0;
            for (k, &(cos_c, sin_c)) in row.iter().enumerate().take(self.modes + 1).skip(1) {
                let arg = k as f64 * pi * s;
                acc += cos_c * arg.cos() + sin_c * arg.sin();
            }
            acc
        })
    }

    pub fn sample(&self, grid: crate::grid::SpatialGrid) -> crate::grid::GridFunction {
        let (a, width) = (grid.a(), grid.b() - grid.a());
        crate::grid::GridFunction::from_fn(grid, self.dim(), |xi| self.eval((xi - a) / width))
    }
}
