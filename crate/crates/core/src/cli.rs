//! `scottlab` command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::assemble::{assemble_energy, atom_terms, atomic_tf, bounds_report, ScottEntry, ScottTable};
use crate::config::Config;
use crate::error::{LabError, Result};
use crate::io;
use crate::ltlab::{run_ensemble, EnsembleSpec, Variant};
use crate::params::validate_system;
use crate::phase_space::{LawKind, PressureLaw};
use crate::sgf::{gaussian_bump_benchmark, lattice_weyl, minimize, random_start, MinimizeOptions, SgfParams};
use crate::spectral::channel::{scott_series, ScottProtocol};
use crate::tf_atom::{solve_tf_atom, RadialGrid, TfOptions};

#[derive(Parser, Debug)]
#[command(name = "scottlab", version, about = "Relativistic Scott-correction laboratory")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a Thomas-Fermi atom.
    Tf(TfArgs),
    /// Estimate the Scott coefficient S(0, beta Z).
    Scott(ScottArgs),
    /// Minimise the self-generated field functional on a lattice.
    Sgf(SgfArgs),
    /// Run a Daubechies inequality ensemble.
    Ltcheck(LtArgs),
    /// Tabulate density and pressure of a phase-space law.
    PhaseSpace(PhaseArgs),
    /// Assemble the ground-state energy expansion (needs --config).
    Assemble,
    /// Evaluate the excess-charge, ionisation and distance bounds (needs --config).
    Bounds,
    /// Check the regime conditions of a configuration (needs --config).
    Validate,
}

#[derive(Args, Debug)]
struct TfArgs {
    #[arg(long)]
    z: f64,
    /// Electron number, defaults to Z.
    #[arg(long)]
    n: Option<f64>,
    #[arg(long, default_value = "nonrel")]
    law: LawKind,
    /// Relativistic parameter for the `rel` law.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 2000)]
    nodes: usize,
}

#[derive(Args, Debug)]
struct ScottArgs {
    #[arg(long, default_value_t = 1.0)]
    z: f64,
    /// Values of beta*Z.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    beta_args: Vec<f64>,
    #[arg(long, default_value_t = 12)]
    l_max: usize,
}

#[derive(Args, Debug)]
struct SgfArgs {
    #[arg(long, default_value_t = 6)]
    lattice: usize,
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    #[arg(long, default_value_t = 0.1)]
    kappa: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    /// CSV `i,j,k,V`; defaults to a centred Gaussian bump.
    #[arg(long)]
    potential: Option<PathBuf>,
    /// Field energy of a random start; zero starts from A = 0.
    #[arg(long, default_value_t = 0.0)]
    start_energy: f64,
    #[arg(long)]
    coulomb_gauge: bool,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args, Debug)]
struct LtArgs {
    #[arg(long, default_value = "plain")]
    variant: Variant,
    #[arg(long, default_value_t = 100)]
    samples: usize,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[arg(long, default_value = "nonrel")]
    law: LawKind,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-3)]
    w_min: f64,
    #[arg(long, default_value_t = 1e3)]
    w_max: f64,
    #[arg(long, default_value_t = 60)]
    points: usize,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn config(cli: &Cli) -> Result<Config> {
    let path = cli.config.as_ref().ok_or_else(|| LabError::Config("--config is required".into()))?;
    Config::load(path)
}

fn out(cli: &Cli, name: &str) -> PathBuf {
    cli.out_dir.join(name)
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Tf(a) => tf(cli, a),
        Command::Scott(a) => scott(cli, a),
        Command::Sgf(a) => sgf(cli, a),
        Command::Ltcheck(a) => ltcheck(cli, a),
        Command::PhaseSpace(a) => phase_space(cli, a),
        Command::Assemble => assemble(cli),
        Command::Bounds => {
            let cfg = config(cli)?;
            let report = bounds_report(&cfg.system()?, &cfg.constants);
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            io::write_json(&out(cli, "bounds.json"), &report)?;
            Ok(0)
        }
        Command::Validate => {
            let cfg = config(cli)?;
            let report = validate_system(&cfg.system()?, cfg.thresholds())?;
            io::write_json(&out(cli, "validation.json"), &report)?;
            Ok(if report.passed() { 0 } else { 2 })
        }
    }
}

#[derive(Serialize)]
struct TfSummary {
    z: f64,
    n: f64,
    law: PressureLaw,
    nu: f64,
    electrons: f64,
    residual: f64,
    iterations: usize,
    energy: crate::tf_atom::EnergyParts,
}

fn tf(cli: &Cli, a: &TfArgs) -> Result<i32> {
    let law = match a.law {
        LawKind::NonRel => PressureLaw::nonrel(2.0, 1.0),
        LawKind::Rel => PressureLaw::rel(a.beta, 2.0, 1.0),
    };
    let z = a.z;
    let grid = RadialGrid::log(1e-6 / z, 2000.0 * z.powf(-1.0 / 3.0), a.nodes);
    let sol = solve_tf_atom(z, a.n.unwrap_or(z), law, grid, &TfOptions::default())?;
    io::write_json(
        &out(cli, "tf.json"),
        &TfSummary {
            z: sol.z,
            n: sol.n_target,
            law: sol.law,
            nu: sol.nu,
            electrons: sol.electrons,
            residual: sol.residual,
            iterations: sol.iterations,
            energy: sol.energy,
        },
    )?;
    io::write_records(
        &out(cli, "tf_profile.csv"),
        Some(&["r", "W", "rho"]),
        sol.grid.r.iter().zip(&sol.w).zip(&sol.rho).map(|((r, w), rho)| (r, w, rho)),
    )?;
    Ok(0)
}

fn scott(cli: &Cli, a: &ScottArgs) -> Result<i32> {
    let protocol = ScottProtocol { l_max: a.l_max, ..ScottProtocol::default() };
    let mut table = ScottTable::default();
    let mut series = Vec::new();
    let mut all_converged = true;
    for &arg in &a.beta_args {
        let est = scott_series(a.z, arg / a.z, &protocol)?;
        all_converged &= est.converged;
        for (k, r) in est.radii.iter().enumerate() {
            series.push((arg, r * a.z, est.partial[k]));
        }
        table.entries.push(ScottEntry { kappa_arg: 0.0, beta_arg: arg, s: est.s, err: est.error });
    }
    io::write_scott_table(&out(cli, "scott.csv"), &table)?;
    io::write_records(&out(cli, "scott_series.csv"), Some(&["beta_arg", "radius_z", "partial"]), series)?;
    Ok(if all_converged { 0 } else { 3 })
}

#[derive(Serialize)]
struct SgfSummary {
    converged: bool,
    iterations: usize,
    restarts: usize,
    initial_energy: f64,
    final_energy: f64,
    energy_at_zero: f64,
    residual: f64,
    penalty_term: f64,
    lattice_weyl: f64,
}

fn sgf(cli: &Cli, a: &SgfArgs) -> Result<i32> {
    let mut lat = gaussian_bump_benchmark(a.lattice, a.spacing);
    if let Some(p) = &a.potential {
        lat.v = io::read_potential(p, &lat)?;
    }
    let p = SgfParams::new(a.kappa, a.h, a.gamma);
    let start = if a.start_energy > 0.0 { random_start(&lat, cli.seed, a.start_energy) } else { lat.clone() };
    let opts = MinimizeOptions {
        tol: a.tol,
        max_iter: a.max_iter,
        coulomb_gauge: a.coulomb_gauge,
        seed: cli.seed,
        ..MinimizeOptions::default()
    };
    let res = minimize(&start, &p, &opts)?;
    let energy_at_zero = crate::sgf::energy_functional(&lat, &p)?.total;
    io::write_records(
        &out(cli, "sgf_log.csv"),
        Some(&["step", "E", "residual", "field_energy"]),
        res.log.iter().map(|l| (l.step, l.energy, l.residual, l.field_energy)),
    )?;
    io::write_field(&out(cli, "sgf_field.csv"), &res.lattice)?;
    io::write_json(
        &out(cli, "sgf.json"),
        &SgfSummary {
            converged: res.converged,
            iterations: res.log.len(),
            restarts: res.restarts,
            initial_energy: res.initial_energy,
            final_energy: res.final_energy,
            energy_at_zero,
            residual: res.residual,
            penalty_term: p.penalty() * res.lattice.field_energy(),
            lattice_weyl: lattice_weyl(&lat, a.h),
        },
    )?;
    Ok(if res.converged { 0 } else { 3 })
}

fn ltcheck(cli: &Cli, a: &LtArgs) -> Result<i32> {
    let spec = match a.variant {
        Variant::Plain => EnsembleSpec::plain(a.samples, cli.seed),
        Variant::Coulomb => EnsembleSpec::coulomb(a.samples, cli.seed),
    };
    let (reports, summary) = run_ensemble(&spec)?;
    io::write_records(&out(cli, "ltcheck.csv"), None, reports)?;
    io::write_json(&out(cli, "ltcheck.json"), &summary)?;
    Ok(if summary.all_finite && summary.within_baseline { 0 } else { 3 })
}

fn phase_space(cli: &Cli, a: &PhaseArgs) -> Result<i32> {
    if a.points < 2 || !(a.w_min > 0.0 && a.w_max > a.w_min) {
        return Err(LabError::Config("need points >= 2 and 0 < w_min < w_max".into()));
    }
    let law = match a.law {
        LawKind::NonRel => PressureLaw::nonrel(2.0, 1.0),
        LawKind::Rel => PressureLaw::rel(a.gamma, 2.0, 1.0),
    };
    let ratio = (a.w_max / a.w_min).ln() / (a.points - 1) as f64;
    io::write_records(
        &out(cli, "phase_space.csv"),
        Some(&["w", "density", "pressure"]),
        (0..a.points).map(|k| {
            let w = a.w_min * (ratio * k as f64).exp();
            (w, law.density(w), law.pressure(w))
        }),
    )?;
    Ok(0)
}

fn assemble(cli: &Cli) -> Result<i32> {
    let cfg = config(cli)?;
    let sys = cfg.system()?;
    let report = validate_system(&sys, cfg.thresholds())?;
    if !report.passed() {
        io::write_json(&out(cli, "validation.json"), &report)?;
        report.into_result(&sys, cfg.thresholds())?;
    }
    let table = match cfg.scott_table_path() {
        Some(p) => io::read_scott_table(&p)?,
        None => return Err(LabError::Config("scott_table is required for assemble".into())),
    };
    let coeffs = cfg.coefficients();
    let atoms: Vec<_> = atomic_tf(&sys)?.iter().map(|s| atom_terms(s, sys.beta, coeffs.counterterm)).collect();
    let breakdown = assemble_energy(&sys, &atoms, cfg.tf_correction, &table, &coeffs)?;
    if breakdown.interpolated {
        eprintln!("warning: interpolated Scott entries in use");
    }
    io::write_json(&out(cli, "breakdown.json"), &breakdown)?;
    Ok(0)
}
