//! End-to-end acceptance gate. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use phs_core::boundary::{
    domain_law_residual, is_dissipative_subspace, phi, psi, theta, theta_section, validate_w,
    w_kernel_subspace, BoundaryMatrixW,
};
use phs_core::cayley::{cayley_transform, inverse_cayley, resolvent_bound_check};
use phs_core::discretization::{assemble, dissipativity_margin, power_balance_residual, simulate};
use phs_core::numerics::{
    c64, from_rows, identity, max_abs, nullspace_basis, operator_norm, ComplexVector, Tolerances,
};
use phs_core::phs::fixtures::{conservative_w, dissipative_w, transport, wave};
use phs_core::phs::{
    deficiency_spaces, green_identity_residual, green_identity_sides, CanonicalTriplet,
};
use phs_core::sampling::{self, SmoothProfile};
use phs_core::{GridFunction, PHSystem, SpatialGrid};
use rand::Rng;

const SAMPLES: usize = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Criterion 1: Cayley transform of dissipative matrices.
fn cayley_suite() -> Outcome {
    let t = tol();
    let mut rng = sampling::seeded(0xC1);
    let mut worst_norm = 0.0_f64;
    let mut worst_iso = 0.0_f64;
    let mut worst_round = 0.0_f64;
    let mut resolvent_ok = true;
    for i in 0..SAMPLES {
        let d = 1 + i % 8;
        let a = sampling::random_dissipative(&mut rng, d);
        let c = cayley_transform(&a, &t).expect("1 - A invertible for dissipative A");
        worst_norm = worst_norm.max(operator_norm(&c) - 1.0);
        let back = inverse_cayley(&c, &t).expect("1 + C invertible");
        worst_round = worst_round.max(operator_norm(&(&back - &a)) / operator_norm(&a).max(1e-300));
        resolvent_ok &= resolvent_bound_check(&a, &[1e-2, 1.0, 1e2], 8, &mut rng, &t).unwrap();

        let s = sampling::random_skew_hermitian(&mut rng, d);
        let cs = cayley_transform(&s, &t).unwrap();
        worst_iso = worst_iso.max(max_abs(&(cs.adjoint() * &cs - identity(d))));
    }
    let pass = worst_norm <= 1e-10 && worst_iso <= 1e-10 && worst_round <= 1e-9 && resolvent_ok;
    outcome(
        pass,
        format!(
            "max(|C|-1) = {worst_norm:.2e}, isometry residual = {worst_iso:.2e}, round-trip rel err = {worst_round:.2e}, resolvent bound {}",
            if resolvent_ok { "holds" } else { "violated" }
        ),
    )
}

/// Criterion 2: phi and psi are mutually inverse.
fn extension_bijection() -> Outcome {
    let t = tol();
    let mut rng = sampling::seeded(0xC2);
    let mut worst_k = 0.0_f64;
    let mut worst_v = 0.0_f64;
    for i in 0..SAMPLES {
        let d = 1 + i % 8;
        let k = sampling::random_contraction(&mut rng, d);
        let v = psi(&k, &t);
        let k_back = phi(&v, &t).expect("psi(K) is dissipative").to_full();
        worst_k = worst_k.max(max_abs(&(k_back.matrix() - k.matrix())));
        let v_back = psi(&k_back, &t);
        worst_v = worst_v.max(v_back.distance(&v));
    }
    outcome(
        worst_k <= 1e-9 && worst_v <= 1e-9,
        format!(
            "phi(psi(K)) entrywise err = {worst_k:.2e}, psi(phi(V)) angle residual = {worst_v:.2e}"
        ),
    )
}

/// Criterion 3: theta calculus and the domain law.
fn theta_calculus() -> Outcome {
    let t = tol();
    let mut rng = sampling::seeded(0xC3);
    let mut worst_section = 0.0_f64;
    for i in 0..SAMPLES {
        let d = 1 + i % 8;
        let k = sampling::random_contraction(&mut rng, d);
        let back = theta(&theta_section(&k), &t).expect("section is admissible");
        worst_section = worst_section.max(max_abs(&(back.matrix() - k.matrix())));
    }
    let mut worst_norm = 0.0_f64;
    let mut worst_kernel = 0.0_f64;
    let mut worst_law = 0.0_f64;
    for i in 0..SAMPLES {
        let d = 1 + i % 8;
        let w = sampling::random_admissible_w(&mut rng, d);
        let k = theta(&w, &t).expect("admissible W");
        worst_norm = worst_norm.max(k.norm() - 1.0);
        let kernel = w_kernel_subspace(&w, &t).unwrap();
        worst_kernel = worst_kernel.max(kernel.distance(&psi(&k, &t)));
        let flow_effort = nullspace_basis(w.matrix(), &t);
        worst_law = worst_law.max(domain_law_residual(&k, &flow_effort));
    }
    outcome(
        worst_section <= 1e-10 && worst_norm <= 1e-9 && worst_kernel <= 1e-9 && worst_law <= 1e-9,
        format!(
            "theta(section(K)) err = {worst_section:.2e}, max(|theta(W)|-1) = {worst_norm:.2e}, ker W vs psi(theta W) = {worst_kernel:.2e}, domain law = {worst_law:.2e}"
        ),
    )
}

/// Criterion 4: admissibility agrees with dissipativity of ker W, and with
/// the sign of the discrete margin on a d = 1 sweep.
fn admissibility() -> Outcome {
    let t = tol();
    let mut rng = sampling::seeded(0xC4);
    let mut disagreements = 0usize;
    let mut admissible = 0usize;
    for i in 0..SAMPLES {
        let d = 1 + i % 6;
        let w = if rng.random_bool(0.5) {
            sampling::random_admissible_w(&mut rng, d)
        } else {
            sampling::random_w(&mut rng, d)
        };
        let verdict = validate_w(&w, &t);
        assert!(verdict.rank_ok);
        let kernel = w_kernel_subspace(&w, &t).unwrap();
        if verdict.psd_ok != is_dissipative_subspace(&kernel, &t) {
            disagreements += 1;
        }
        admissible += usize::from(verdict.psd_ok);
    }

    let mut checked = 0usize;
    let mut sweep_failures = Vec::new();
    for ti in 0..=180 {
        let th = ti as f64 * PI / 180.0;
        for pj in 0..=12 {
            let ph = pj as f64 * PI / 6.0;
            let z = Complex64::from_polar(th.sin(), ph);
            let w =
                BoundaryMatrixW::new(from_rows(1, 2, &[(th.cos(), 0.0), (z.re, z.im)])).unwrap();
            let verdict = validate_w(&w, &t);
            let g = assemble(&transport(1.0, 1.0).with_w(w).unwrap(), 64, &t).unwrap();
            let margin = dissipativity_margin(&g);
            if margin.abs() > 1e-6 {
                checked += 1;
                if verdict.psd_ok != (margin < 0.0) {
                    sweep_failures.push((ti, pj, margin));
                }
            } else if !verdict.psd_ok {
                sweep_failures.push((ti, pj, margin));
            }
        }
    }
    outcome(
        disagreements == 0 && sweep_failures.is_empty(),
        format!(
            "{disagreements} disagreements in {SAMPLES} random W ({admissible} admissible); sweep: {checked} non-degenerate points, {} mismatches",
            sweep_failures.len()
        ),
    )
}

fn green_ratio(sys: &PHSystem, seed: u64) -> (f64, f64) {
    let mut rng = sampling::seeded(seed);
    let pairs: Vec<(SmoothProfile, SmoothProfile)> = (0..8)
        .map(|_| {
            (
                SmoothProfile::random(&mut rng, sys.d, 3),
                SmoothProfile::random(&mut rng, sys.d, 3),
            )
        })
        .collect();
    let max_residual = |n: usize| {
        let grid = sys.grid(n).unwrap();
        pairs
            .iter()
            .map(|(x, y)| green_identity_residual(&x.sample(grid), &y.sample(grid), sys).unwrap())
            .fold(0.0, f64::max)
    };
    let coarse = max_residual(100);
    let fine = max_residual(200);
    (coarse / fine, fine)
}

/// Criterion 5: second-order convergence of the Green identity.
fn green_identity() -> Outcome {
    let (r_transport, f_transport) = green_ratio(&transport(1.0, 1.0), 0xC5);
    let (r_wave, f_wave) = green_ratio(&wave(dissipative_w(2)), 0xC5 + 1);

    let sys = transport(1.0, 1.0);
    let grid = sys.grid(200).unwrap();
    let one = ComplexVector::from_element(1, c64(1.0, 0.0));
    let x = GridFunction::from_profile(grid, &one, |xi| c64(xi, 0.0));
    let y = GridFunction::from_profile(grid, &one, |_| c64(1.0, 0.0));
    let sides = green_identity_sides(&x, &y, &sys).unwrap();
    let anchor = (sides.interior - c64(-1.0, 0.0))
        .norm()
        .max((sides.boundary - c64(-1.0, 0.0)).norm());

    let in_band = |r: f64| (3.2..=4.8).contains(&r);
    outcome(
        in_band(r_transport) && in_band(r_wave) && anchor <= 1e-3,
        format!(
            "ratio transport = {r_transport:.3} (res {f_transport:.2e} at n=200), wave = {r_wave:.3} (res {f_wave:.2e}), anchor err = {anchor:.2e}"
        ),
    )
}

/// Criterion 6: deficiency spaces and the decomposition of x = 1.
fn deficiency_decomposition() -> Outcome {
    let t = tol();
    let sys = transport(1.0, 1.0);
    let pair = deficiency_spaces(&sys, 200, &t).unwrap();
    let grid = *pair.plus.grid();
    let mut kernel_err = 0.0_f64;
    for (i, xi) in grid.points().enumerate() {
        kernel_err = kernel_err
            .max((pair.plus.columns[0].at(i)[0] - c64((-xi).exp(), 0.0)).norm())
            .max((pair.minus.columns[0].at(i)[0] - c64(xi.exp(), 0.0)).norm());
    }
    let one = ComplexVector::from_element(1, c64(1.0, 0.0));
    let x = GridFunction::from_profile(grid, &one, |_| c64(1.0, 0.0));
    let dec = pair.decompose(&x, &t).unwrap();
    let beta = (1.0 - 1.0 / E) / (E - 1.0 / E);
    let beta_err = (dec.coeff_minus[0] - c64(beta, 0.0)).norm();
    let alpha_err = (dec.coeff_plus[0] - c64(1.0 - beta, 0.0)).norm();
    let reassembled = dec
        .core
        .add(&pair.plus.combine(&dec.coeff_plus))
        .add(&pair.minus.combine(&dec.coeff_minus));
    let reassembly = reassembled.sub(&x).max_abs();
    outcome(
        kernel_err <= 1e-8 && beta_err <= 1e-8 && alpha_err <= 1e-8 && reassembly <= 1e-9,
        format!(
            "kernel err = {kernel_err:.2e}, beta err = {beta_err:.2e}, alpha err = {alpha_err:.2e}, reassembly = {reassembly:.2e}, dims = {:?}",
            pair.dims()
        ),
    )
}

/// Criterion 7: the canonical triplet satisfies both triplet axioms.
fn canonical_triplet() -> Outcome {
    let t = tol();
    let sys = transport(1.0, 1.0);
    let mut rng = sampling::seeded(0xC7);

    let triplet = CanonicalTriplet::from_system(&sys, 200, &t).unwrap();
    let mut surj = 0.0_f64;
    for _ in 0..64 {
        let y1 = sampling::gaussian(&mut rng, 1, 1).column(0).into_owned();
        let y2 = sampling::gaussian(&mut rng, 1, 1).column(0).into_owned();
        let g = triplet.evaluate(&triplet.preimage(&y1, &y2)).unwrap();
        surj = surj.max((g.g1 - y1).norm()).max((g.g2 - y2).norm());
    }

    let pairs: Vec<(SmoothProfile, SmoothProfile)> = (0..8)
        .map(|_| {
            (
                SmoothProfile::random(&mut rng, 1, 3),
                SmoothProfile::random(&mut rng, 1, 3),
            )
        })
        .collect();
    let bt1 = |n: usize| {
        let tr = CanonicalTriplet::from_system(&sys, n, &t).unwrap();
        let grid = sys.grid(n).unwrap();
        pairs
            .iter()
            .map(|(x, y)| {
                tr.green_residual(&x.sample(grid), &y.sample(grid), &sys)
                    .unwrap()
            })
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (bt1(100), bt1(200));
    let ratio = coarse / fine;
    outcome(
        surj <= 1e-8 && (3.2..=4.8).contains(&ratio),
        format!(
            "BT-2 err = {surj:.2e}, BT-1 residual {coarse:.2e} -> {fine:.2e} (ratio {ratio:.3})"
        ),
    )
}

fn bump(grid: SpatialGrid) -> GridFunction {
    let one = ComplexVector::from_element(1, c64(1.0, 0.0));
    GridFunction::from_profile(grid, &one, |xi| {
        let r = (xi - 0.5) / 0.3;
        if r.abs() < 1.0 {
            c64((1.0 - 1.0 / (1.0 - r * r)).exp(), 0.0)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// Criterion 8: generation end to end.
fn generation() -> Outcome {
    let t = tol();
    let (n, dt, t_end) = (200, 1e-3, 2.0);

    let g = assemble(&transport(1.0, 1.0), n, &t).unwrap();
    let sim = simulate(&g, &bump(*g.grid()), t_end, dt, &t).unwrap();
    let traj = &sim.trajectory;
    let e0 = traj.energies[0];
    let e_end = *traj.energies.last().unwrap();
    let increase = traj.max_energy_increase();
    let balance = power_balance_residual(traj).unwrap();
    let dissipative_ok = increase <= 1e-10 && e_end <= 0.05 * e0 && balance <= 1e-2;

    let g = assemble(
        &transport(1.0, 1.0).with_w(conservative_w(1)).unwrap(),
        n,
        &t,
    )
    .unwrap();
    let sim = simulate(&g, &bump(*g.grid()), t_end, dt, &t).unwrap();
    let c = &sim.trajectory.energies;
    let drift = (c.last().unwrap() - c[0]).abs() / c[0];

    let g = assemble(&transport(1.0, -1.0), n, &t).unwrap();
    let margin = dissipativity_margin(&g);
    let one = ComplexVector::from_element(1, c64(1.0, 0.0));
    let generic = GridFunction::from_profile(*g.grid(), &one, |xi| {
        c64((0.5 * PI * xi).sin(), 0.25 * xi * xi)
    });
    let sim = simulate(&g, &generic, 0.2, dt, &t).unwrap();
    let u = &sim.trajectory.energies;
    let strictly_increasing = u.windows(2).all(|w| w[1] > w[0]);

    outcome(
        dissipative_ok && drift <= 1e-8 && margin > 0.0 && strictly_increasing,
        format!(
            "W=[1,1]: max step increase {increase:.2e}, E(2)/E(0) = {:.3e}, power balance {balance:.2e}; W=[1,0]: drift {drift:.2e}; W=[1,-1]: margin {margin:.3e}, energy {:.4e} -> {:.4e} (strictly increasing: {strictly_increasing})",
            e_end / e0,
            u[0],
            u.last().unwrap()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1 cayley transform", cayley_suite),
        ("AC2 extension bijection", extension_bijection),
        ("AC3 theta calculus", theta_calculus),
        ("AC4 admissibility", admissibility),
        ("AC5 green identity", green_identity),
        ("AC6 deficiency + decomposition", deficiency_decomposition),
        ("AC7 canonical triplet", canonical_triplet),
        ("AC8 generation", generation),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {name}: {} ({:.1}s)",
            out.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!out.pass);
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
