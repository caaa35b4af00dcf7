//! The five subcommands.

use std::path::{Path, PathBuf};

use phs_core::boundary::theta;
use phs_core::discretization::{
    assemble, dissipativity_margin, power_balance_residual, simulate, spectrum, MIN_CELLS,
};
use phs_core::numerics::Tolerances;
use phs_core::phs::{deficiency_spaces, validate_system, CanonicalTriplet};
use phs_core::sampling::{self, SmoothProfile};
use phs_core::{GridFunction, PHSystem};

use crate::config::{InitialCondition, SystemConfig};
use crate::record::{matrix_value, ResultRecord};
use crate::table::{write_csv, CsvError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Simulate,
    Spectrum,
    Deficiency,
    Green,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Simulate => "simulate",
            Command::Spectrum => "spectrum",
            Command::Deficiency => "deficiency",
            Command::Green => "green",
        }
    }

    fn default_cells(self) -> usize {
        match self {
            Command::Check => 32,
            Command::Spectrum => 64,
            Command::Simulate | Command::Green => 100,
            Command::Deficiency => 200,
        }
    }

    /// Commands that write a table.
    pub fn writes_csv(self) -> bool {
        matches!(self, Command::Simulate | Command::Spectrum)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tol: Tolerances,
    /// Append the flattened state to each simulate row.
    pub with_state: bool,
    /// Smooth input pairs drawn by `green`.
    pub trials: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            n: None,
            dt: None,
            t_end: None,
            out: None,
            seed: 0,
            tol: Tolerances::default(),
            with_state: false,
            trials: 8,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] phs_core::Error),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("{0}")]
    Invalid(String),
}

type Run<T> = std::result::Result<T, RunError>;

pub fn run_command(cmd: Command, cfg: &SystemConfig, opts: &RunOptions) -> Run<ResultRecord> {
    let mut rec = ResultRecord::new(cmd.name());
    rec.setting("seed", opts.seed);
    rec.setting("tol_rank", opts.tol.rank_rel);
    rec.setting("tol_psd", opts.tol.psd_abs);
    rec.setting("tol_eq", opts.tol.eq_abs);
    let sim_block = cfg.simulate.as_ref();
    let n = opts
        .n
        .or(if cmd == Command::Simulate {
            sim_block.and_then(|s| s.n)
        } else {
            None
        })
        .unwrap_or(cmd.default_cells());
    if n < MIN_CELLS {
        return Err(RunError::Invalid(format!(
            "need at least {MIN_CELLS} cells, got {n}"
        )));
    }
    rec.setting("n", n);
    match cmd {
        Command::Check => check(&cfg.system, n, opts, &mut rec)?,
        Command::Simulate => run_simulate(cfg, n, opts, &mut rec)?,
        Command::Spectrum => run_spectrum(&cfg.system, n, opts, &mut rec)?,
        Command::Deficiency => run_deficiency(&cfg.system, n, opts, &mut rec)?,
        Command::Green => run_green(&cfg.system, n, opts, &mut rec)?,
    }
    Ok(rec)
}

fn check(sys: &PHSystem, n: usize, opts: &RunOptions, rec: &mut ResultRecord) -> Run<()> {
    let tol = &opts.tol;
    let v = validate_system(sys, tol);
    rec.verdict("p0_skew", v.p0_skew);
    rec.verdict("p1_hermitian", v.p1_hermitian);
    rec.verdict("p1_invertible", v.p1_invertible);
    rec.verdict("hamiltonian_ok", v.hamiltonian_ok);
    rec.verdict("rank_ok", v.w.rank_ok);
    rec.verdict("psd_ok", v.w.psd_ok);
    rec.verdict("generates_contraction_semigroup", v.all_ok());
    rec.scalar("failures", v.failures());

    if v.w.admissible() {
        let k = theta(&sys.w, tol)?;
        rec.scalar("K", matrix_value(k.matrix()));
        rec.scalar("norm_K", k.norm());
    } else {
        rec.scalar("K", serde_json::Value::Null);
        rec.scalar("norm_K", serde_json::Value::Null);
    }

    if v.structure_ok() && v.w.rank_ok {
        let g = assemble(sys, n, tol)?;
        let margin = dissipativity_margin(&g);
        rec.scalar("margin", margin);
        let abscissa = spectrum(&g).first().map_or(f64::NEG_INFINITY, |z| z.re);
        rec.scalar("spectral_abscissa", abscissa);
    } else {
        rec.scalar("margin", serde_json::Value::Null);
        rec.scalar("spectral_abscissa", serde_json::Value::Null);
    }
    Ok(())
}

fn output_path(cmd: &str, opts: &RunOptions) -> PathBuf {
    opts.out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{cmd}.csv")))
}

fn emit(rec: &mut ResultRecord, path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Run<()> {
    write_csv(path, header, rows)?;
    rec.outputs.push(path.to_path_buf());
    Ok(())
}

fn initial_state(
    sys: &PHSystem,
    grid: phs_core::SpatialGrid,
    ic: &InitialCondition,
) -> GridFunction {
    GridFunction::from_fn(grid, sys.d, |xi| ic.eval(xi, sys.a, sys.b))
}

fn run_simulate(
    cfg: &SystemConfig,
    n: usize,
    opts: &RunOptions,
    rec: &mut ResultRecord,
) -> Run<()> {
    let sys = &cfg.system;
    let block = cfg.simulate.as_ref();
    let g = assemble(sys, n, &opts.tol)?;
    let h = g.grid().h();
    let dt = opts.dt.or(block.and_then(|s| s.dt)).unwrap_or(0.5 * h);
    let t_end = opts.t_end.or(block.and_then(|s| s.t_end)).unwrap_or(1.0);
    let ic = block.and_then(|s| s.initial.clone()).unwrap_or_else(|| {
        let mut e1 = phs_core::ComplexVector::zeros(sys.d);
        e1[0] = phs_core::numerics::c64(1.0, 0.0);
        InitialCondition::Gaussian {
            center: 0.5 * (sys.a + sys.b),
            width: 0.1 * (sys.b - sys.a),
            amplitude: 1.0,
            direction: e1,
        }
    });
    let sim = simulate(
        &g,
        &initial_state(sys, *g.grid(), &ic),
        t_end,
        dt,
        &opts.tol,
    )?;
    let traj = &sim.trajectory;

    rec.setting("dt", sim.dt);
    rec.setting("T", t_end);
    rec.setting("with_state", opts.with_state);
    rec.scalar("steps", sim.steps);
    rec.scalar("projection_defect", sim.projection_defect);
    rec.scalar("energy_initial", traj.energies[0]);
    rec.scalar(
        "energy_final",
        *traj.energies.last().expect("initial state recorded"),
    );
    rec.scalar("max_energy_increase", traj.max_energy_increase());
    rec.scalar(
        "power_balance_residual",
        power_balance_residual(traj).map_or(serde_json::Value::Null, Into::into),
    );
    rec.scalar("margin", dissipativity_margin(&g));

    let mut header: Vec<String> = ["t", "energy", "boundary_power"].map(String::from).to_vec();
    if opts.with_state {
        for i in 0..g.grid().nodes() {
            for c in 0..sys.d {
                header.push(format!("x{i}_{c}_re"));
                header.push(format!("x{i}_{c}_im"));
            }
        }
    }
    let rows: Vec<Vec<f64>> = (0..traj.len())
        .map(|k| {
            let mut row = vec![traj.times[k], traj.energies[k], traj.boundary_powers[k]];
            if opts.with_state {
                row.extend(traj.states[k].flatten().iter().flat_map(|z| [z.re, z.im]));
            }
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    emit(rec, &output_path("simulate", opts), &header, &rows)
}

fn run_spectrum(sys: &PHSystem, n: usize, opts: &RunOptions, rec: &mut ResultRecord) -> Run<()> {
    let g = assemble(sys, n, &opts.tol)?;
    let ev = spectrum(&g);
    rec.scalar("count", ev.len());
    rec.scalar(
        "spectral_abscissa",
        ev.first().map_or(f64::NEG_INFINITY, |z| z.re),
    );
    rec.scalar("margin", dissipativity_margin(&g));
    let rows: Vec<Vec<f64>> = ev.iter().map(|z| vec![z.re, z.im]).collect();
    emit(rec, &output_path("spectrum", opts), &["re", "im"], &rows)
}

fn run_deficiency(sys: &PHSystem, n: usize, opts: &RunOptions, rec: &mut ResultRecord) -> Run<()> {
    let pair = deficiency_spaces(sys, n, &opts.tol)?;
    let (plus, minus) = pair.dims();
    rec.scalar("dim_plus", plus);
    rec.scalar("dim_minus", minus);
    let worst = |r: &[f64]| r.iter().copied().fold(0.0, f64::max);
    rec.scalar("residual_plus", worst(&pair.plus.residuals));
    rec.scalar("residual_minus", worst(&pair.minus.residuals));
    rec.scalar("endpoints_plus", matrix_value(&pair.plus.endpoint_matrix));
    rec.scalar("endpoints_minus", matrix_value(&pair.minus.endpoint_matrix));
    Ok(())
}

fn run_green(sys: &PHSystem, n: usize, opts: &RunOptions, rec: &mut ResultRecord) -> Run<()> {
    if opts.trials == 0 {
        return Err(RunError::Invalid("green needs at least one trial".into()));
    }
    let mut rng = sampling::seeded(opts.seed);
    let pairs: Vec<(SmoothProfile, SmoothProfile)> = (0..opts.trials)
        .map(|_| {
            (
                SmoothProfile::random(&mut rng, sys.d, 3),
                SmoothProfile::random(&mut rng, sys.d, 3),
            )
        })
        .collect();
    let max_residual = |cells: usize| -> Run<f64> {
        let triplet = CanonicalTriplet::from_system(sys, cells, &opts.tol)?;
        let grid = sys.grid(cells)?;
        let mut worst = 0.0_f64;
        for (x, y) in &pairs {
            worst = worst.max(triplet.green_residual(&x.sample(grid), &y.sample(grid), sys)?);
        }
        Ok(worst)
    };
    let coarse = max_residual(n)?;
    let fine = max_residual(2 * n)?;
    rec.setting("trials", opts.trials);
    rec.scalar("n_coarse", n);
    rec.scalar("n_fine", 2 * n);
    rec.scalar("residual_coarse", coarse);
    rec.scalar("residual_fine", fine);
    rec.scalar(
        "ratio",
        if fine > 0.0 {
            serde_json::Value::from(coarse / fine)
        } else {
            serde_json::Value::Null
        },
    );
    Ok(())
}
