//! The `vanka-mg` command-line driver.
//!
//! Every subcommand writes a CSV (to `--out` or stdout) that starts with
//! `#`-prefixed manifest lines, followed by a header row. A short
//! human-readable summary goes to stdout when `--out` is given and to
//! stderr otherwise.
//!
//! Exit codes: 0 ran to completion (a non-converged solve or sweep still
//! counts), 1 usage error, 2 numerical failure (singular operator,
//! eigensolver failure, or a ParaDIAG run with a non-converged shift).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, GridFunction, Shift};
use crate::lfa::{optimize_omega, smoothing_factor, two_grid_factor, LfaConfig, Objective};
use crate::multigrid::{build_hierarchy, coarsening_depth, CycleType, MultigridConfig, SolveReport};
use crate::paradiag::{
    all_at_once_apply, build_b, dense_all_at_once_solve, helmholtz_shifts, manufactured_problem,
    paradiag_solve, scheme_shifts, stack_norm, TimeDiscretization,
};
use crate::smoothers::{SmootherConfig, SmootherKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vanka-mg", version, about = "Multigrid and LFA for complex-shifted Laplacians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal relaxation parameters, smoothing factors and two-grid factors.
    LfaTable(LfaTableArgs),
    /// One multigrid solve; writes the residual history.
    Solve(SolveArgs),
    /// One solve per shift of an example family, for each smoother.
    Sweep(SweepArgs),
    /// All-at-once ParaDIAG solve of a manufactured space-time problem.
    Paradiag(ParadiagArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    HeatBvm,
    BackwardHeat,
    Helmholtz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleArg {
    Heat,
    BackwardHeat,
    Helmholtz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmootherArg {
    Vanka,
    Jacobi,
}

impl From<SmootherArg> for SmootherKind {
    fn from(s: SmootherArg) -> Self {
        match s {
            SmootherArg::Vanka => SmootherKind::Vanka,
            SmootherArg::Jacobi => SmootherKind::Jacobi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CycleArg {
    V,
    W,
}

/// Parses a step size `1/N` (or a decimal equal to one) into `N`.
pub fn parse_step(s: &str) -> std::result::Result<usize, String> {
    let s = s.trim();
    let value = if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
        let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
        num / den
    } else {
        s.parse::<f64>().map_err(|_| format!("'{s}' is not a number or fraction"))?
    };
    if !(value > 0.0 && value.is_finite()) {
        return Err(format!("step '{s}' must be positive"));
    }
    let n = (1.0 / value).round();
    if n < 1.0 || ((1.0 / value) - n).abs() > 1e-9 * n {
        return Err(format!("step '{s}' is not of the form 1/N"));
    }
    Ok(n as usize)
}

#[derive(Debug, Args)]
pub struct LfaTableArgs {
    /// Spatial step, e.g. 1/256.
    #[arg(long, default_value = "1/256", value_parser = parse_step)]
    pub h: usize,
    /// Time step, e.g. 1/256.
    #[arg(long, default_value = "1/256", value_parser = parse_step)]
    pub tau: usize,
    #[arg(long, value_enum, default_value = "heat-bvm")]
    pub scheme: SchemeArg,
    /// Regularization parameter for the backward-heat scheme.
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    /// Which shift of the scheme to analyze (1-based).
    #[arg(long, default_value_t = 1)]
    pub shift_index: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "jacobi,vanka")]
    pub smoothers: Vec<SmootherArg>,
    #[arg(long, default_value_t = 4)]
    pub nu_max: usize,
    /// Low-frequency samples per dimension.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_parser = parse_step)]
    pub h: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_im: Option<f64>,
    /// Take the shift from a scheme instead of --lambda-re/--lambda-im.
    #[arg(long, value_enum, requires = "shift_index")]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub shift_index: Option<usize>,
    /// Time step for scheme shifts; defaults to h.
    #[arg(long, value_parser = parse_step)]
    pub tau: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "vanka")]
    pub smoother: SmootherArg,
    /// Relaxation parameter; defaults to 0.96 (Vanka) or 0.8 (Jacobi).
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, value_enum, default_value = "w")]
    pub cycle: CycleArg,
    #[arg(long, default_value_t = 1)]
    pub nu1: usize,
    #[arg(long, default_value_t = 0)]
    pub nu2: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Seed of the random right-hand side.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub example: ExampleArg,
    #[arg(long, value_parser = parse_step)]
    pub h: usize,
    /// Time step; defaults to h.
    #[arg(long, value_parser = parse_step)]
    pub tau: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "vanka,jacobi")]
    pub smoothers: Vec<SmootherArg>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParadiagArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,
    #[arg(long, value_parser = parse_step)]
    pub h: usize,
    /// Time step; defaults to h.
    #[arg(long, value_parser = parse_step)]
    pub tau: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    #[arg(long, value_enum, default_value = "vanka")]
    pub smoother: SmootherArg,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Compare against a dense direct solve when the all-at-once system
    /// has at most this many unknowns.
    #[arg(long, default_value_t = 1000)]
    pub oracle_limit: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a subcommand before it is written anywhere.
#[derive(Debug, Clone)]
pub struct Output {
    pub csv: String,
    pub summary: Vec<String>,
    pub exit_code: i32,
    pub out: Option<PathBuf>,
}

/// CSV number formatting: 13 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.12e}")
}

struct Manifest {
    command: &'static str,
    params: Vec<(&'static str, String)>,
    out: Option<PathBuf>,
}

impl Manifest {
    fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.command.as_bytes());
        for (k, v) in &self.params {
            hasher.update(format!("\n{k}={v}").as_bytes());
        }
        hasher.update(env!("CARGO_PKG_VERSION").as_bytes());
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn render(&self) -> String {
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let out = self
            .out
            .as_ref()
            .map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
        format!(
            "# command: {}\n# parameters: {}\n# version: {}\n# timestamp: {}\n# output: {}\n# manifest-hash: {}\n",
            self.command,
            params.join(" "),
            env!("CARGO_PKG_VERSION"),
            stamp,
            out,
            self.hash()
        )
    }
}

fn grid(n: usize) -> Result<Grid2D> {
    Grid2D::new(n)
}

fn pick_shift(scheme: SchemeArg, h_n: usize, tau_n: usize, beta: f64, index: usize) -> Result<Shift> {
    let example = match scheme {
        SchemeArg::HeatBvm => ExampleArg::Heat,
        SchemeArg::BackwardHeat => ExampleArg::BackwardHeat,
        SchemeArg::Helmholtz => ExampleArg::Helmholtz,
    };
    let shifts = example_shifts(example, h_n, tau_n, beta)?;
    if index == 0 || index > shifts.len() {
        return Err(Error::InvalidConfig(format!(
            "shift index {index} out of range 1..={}",
            shifts.len()
        )));
    }
    Ok(shifts[index - 1])
}

/// Rejects grids the hierarchy cannot coarsen before any work is done.
fn check_layout(grid: Grid2D, cfg: &MultigridConfig) -> Result<()> {
    cfg.validate()?;
    let n = grid.subdivisions();
    coarsening_depth(n, cfg.coarsest)
        .map(|_| ())
        .ok_or(Error::NonConformingGrid { n, coarsest: cfg.coarsest })
}

fn random_rhs(grid: Grid2D, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    GridFunction::from_values(grid, values).expect("length matches grid")
}

fn default_omega(kind: SmootherKind) -> f64 {
    SmootherConfig::preset(kind).omega.re
}

pub fn cmd_lfa_table(args: &LfaTableArgs) -> Result<Output> {
    let h = 1.0 / args.h as f64;
    let shift = pick_shift(args.scheme, args.h, args.tau, args.beta, args.shift_index)?;
    let lfa = LfaConfig {
        samples_per_dim: args.samples,
        ..LfaConfig::default()
    };
    lfa.validate()?;
    if args.nu_max == 0 {
        return Err(Error::InvalidConfig("--nu-max must be at least 1".into()));
    }
    let manifest = Manifest {
        command: "lfa-table",
        params: vec![
            ("h", format!("1/{}", args.h)),
            ("tau", format!("1/{}", args.tau)),
            ("scheme", format!("{:?}", args.scheme)),
            ("beta", args.beta.to_string()),
            ("shift_index", args.shift_index.to_string()),
            ("smoothers", format!("{:?}", args.smoothers)),
            ("nu_max", args.nu_max.to_string()),
            ("samples", args.samples.to_string()),
        ],
        out: args.out.clone(),
    };
    let mut csv = manifest.render();
    let rho_cols: Vec<String> = (1..=args.nu_max).map(|k| format!("rho_{k}")).collect();
    writeln!(csv, "smoother,omega_opt,mu_opt,{}", rho_cols.join(",")).unwrap();
    let mut summary = vec![format!(
        "shift lambda = {:.6} {:+.6}i, h = 1/{}",
        shift.lambda.re, shift.lambda.im, args.h
    )];
    for &s in &args.smoothers {
        let kind = SmootherKind::from(s);
        let (omega, _) = optimize_omega(&shift, h, kind, Objective::Rho1, &lfa)?;
        let cfg = SmootherConfig::with_real(kind, omega)?;
        let mu = smoothing_factor(&shift, h, &cfg, &lfa)?.mu;
        let rhos = (1..=args.nu_max)
            .map(|nu| two_grid_factor(&shift, h, &cfg, nu, &lfa))
            .collect::<Result<Vec<f64>>>()?;
        let cells: Vec<String> = rhos.iter().map(|&r| fmt_num(r)).collect();
        writeln!(csv, "{},{},{},{}", kind.name(), fmt_num(omega), fmt_num(mu), cells.join(",")).unwrap();
        let short: Vec<String> = rhos.iter().map(|r| format!("{r:.3}")).collect();
        summary.push(format!(
            "{:>6}: omega_opt = {omega:.3}, mu_opt = {mu:.3}, rho = [{}]",
            kind.name(),
            short.join(", ")
        ));
    }
    Ok(Output {
        csv,
        summary,
        exit_code: EXIT_OK,
        out: args.out.clone(),
    })
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Output> {
    let g = grid(args.h)?;
    let shift = match args.scheme {
        Some(scheme) => {
            if args.lambda_re.is_some() || args.lambda_im.is_some() {
                return Err(Error::InvalidConfig("give either --lambda-re/--lambda-im or --scheme".into()));
            }
            let index = args.shift_index.unwrap_or(1);
            pick_shift(scheme, args.h, args.tau.unwrap_or(args.h), args.beta, index)?
        }
        None => Shift::new(Complex64::new(
            args.lambda_re.unwrap_or(0.0),
            args.lambda_im.unwrap_or(0.0),
        )),
    };
    let kind = SmootherKind::from(args.smoother);
    let omega = args.omega.unwrap_or_else(|| default_omega(kind));
    let cfg = MultigridConfig {
        cycle: match args.cycle {
            CycleArg::V => CycleType::V,
            CycleArg::W => CycleType::W,
        },
        nu1: args.nu1,
        nu2: args.nu2,
        tol: args.tol,
        max_iter: args.max_iter,
        smoother: SmootherConfig::with_real(kind, omega)?,
        ..MultigridConfig::default()
    };
    let b = random_rhs(g, args.seed);
    let (_, report) = build_hierarchy(g, &shift, &cfg)?.solve(&b)?;

    let manifest = Manifest {
        command: "solve",
        params: vec![
            ("h", format!("1/{}", args.h)),
            ("lambda", format!("{}", shift.lambda)),
            ("smoother", kind.name().into()),
            ("omega", omega.to_string()),
            ("cycle", format!("{:?}", args.cycle)),
            ("nu1", args.nu1.to_string()),
            ("nu2", args.nu2.to_string()),
            ("tol", args.tol.to_string()),
            ("max_iter", args.max_iter.to_string()),
            ("seed", args.seed.to_string()),
        ],
        out: args.out.clone(),
    };
    let mut csv = manifest.render();
    csv.push_str("iteration,residual_norm,relative_residual\n");
    let r0 = report.residual_history[0];
    for (k, r) in report.residual_history.iter().enumerate() {
        let rel = if r0 > 0.0 { r / r0 } else { 0.0 };
        writeln!(csv, "{k},{},{}", fmt_num(*r), fmt_num(rel)).unwrap();
    }
    let summary = vec![format!(
        "iterations={} rate={:.4} converged={} wall_time={:.3}s",
        report.iterations, report.rate, report.converged, report.wall_time
    )];
    Ok(Output {
        csv,
        summary,
        exit_code: EXIT_OK,
        out: args.out.clone(),
    })
}

/// One row of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub shift: Shift,
    pub smoother: SmootherKind,
    pub report: SolveReport,
}

/// Shifts of an example family at spatial step `1/h_n`.
pub fn example_shifts(example: ExampleArg, h_n: usize, tau_n: usize, beta: f64) -> Result<Vec<Shift>> {
    let h = 1.0 / h_n as f64;
    match example {
        ExampleArg::Heat => scheme_shifts(&TimeDiscretization::heat(tau_n)?, h),
        ExampleArg::BackwardHeat => scheme_shifts(&TimeDiscretization::backward_heat(tau_n, beta)?, h),
        ExampleArg::Helmholtz => Ok(helmholtz_shifts(h)),
    }
}

/// Solves with every (shift, smoother) pair in parallel; rows come back in
/// shift order, smoothers in the given order.
pub fn run_sweep(
    shifts: &[Shift],
    smoothers: &[SmootherKind],
    grid: Grid2D,
    base: &MultigridConfig,
    b: &GridFunction,
) -> Vec<Result<SweepRow>> {
    let jobs: Vec<(Shift, SmootherKind)> = shifts
        .iter()
        .flat_map(|s| smoothers.iter().map(move |k| (*s, *k)))
        .collect();
    jobs.par_iter()
        .map(|&(shift, kind)| {
            let cfg = MultigridConfig {
                smoother: SmootherConfig::preset(kind),
                ..*base
            };
            let (_, report) = build_hierarchy(grid, &shift, &cfg)?.solve(b)?;
            Ok(SweepRow {
                shift,
                smoother: kind,
                report,
            })
        })
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Output> {
    let g = grid(args.h)?;
    let tau_n = args.tau.unwrap_or(args.h);
    let shifts = example_shifts(args.example, args.h, tau_n, args.beta)?;
    let smoothers: Vec<SmootherKind> = args.smoothers.iter().map(|&s| s.into()).collect();
    let base = MultigridConfig {
        tol: args.tol,
        max_iter: args.max_iter,
        ..MultigridConfig::default()
    };
    check_layout(g, &base)?;
    let b = random_rhs(g, args.seed);
    let started = Instant::now();
    let rows = run_sweep(&shifts, &smoothers, g, &base, &b);

    let manifest = Manifest {
        command: "sweep",
        params: vec![
            ("example", format!("{:?}", args.example)),
            ("h", format!("1/{}", args.h)),
            ("tau", format!("1/{tau_n}")),
            ("beta", args.beta.to_string()),
            ("smoothers", format!("{:?}", args.smoothers)),
            ("tol", args.tol.to_string()),
            ("max_iter", args.max_iter.to_string()),
            ("seed", args.seed.to_string()),
        ],
        out: args.out.clone(),
    };
    let mut csv = manifest.render();
    csv.push_str("shift_index,lambda_re,lambda_im,smoother,iterations,rate,converged\n");
    let mut failures = Vec::new();
    for row in &rows {
        match row {
            Ok(r) => {
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{}",
                    r.shift.index,
                    fmt_num(r.shift.lambda.re),
                    fmt_num(r.shift.lambda.im),
                    r.smoother.name(),
                    r.report.iterations,
                    fmt_num(r.report.rate),
                    r.report.converged
                )
                .unwrap();
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    let mut summary = Vec::new();
    for kind in &smoothers {
        let mine: Vec<&SweepRow> = rows.iter().flatten().filter(|r| r.smoother == *kind).collect();
        if mine.is_empty() {
            continue;
        }
        let rates: Vec<f64> = mine.iter().map(|r| r.report.rate).collect();
        let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = rates.iter().sum::<f64>() / rates.len() as f64;
        let iters: usize = mine.iter().map(|r| r.report.iterations).sum();
        let conv = mine.iter().filter(|r| r.report.converged).count();
        summary.push(format!(
            "{:>6}: {} shifts, converged {conv}, rate min/mean/max = {min:.4}/{mean:.4}/{max:.4}, total cycles {iters}",
            kind.name(),
            mine.len()
        ));
    }
    summary.push(format!("wall_time={:.2}s", started.elapsed().as_secs_f64()));
    for f in &failures {
        summary.push(format!("failed: {f}"));
    }
    Ok(Output {
        csv,
        summary,
        exit_code: if failures.is_empty() { EXIT_OK } else { EXIT_NUMERICAL },
        out: args.out.clone(),
    })
}

pub fn cmd_paradiag(args: &ParadiagArgs) -> Result<Output> {
    let g = grid(args.h)?;
    let tau_n = args.tau.unwrap_or(args.h);
    let td = match args.scheme {
        SchemeArg::HeatBvm => TimeDiscretization::heat(tau_n)?,
        SchemeArg::BackwardHeat => TimeDiscretization::backward_heat(tau_n, args.beta)?,
        SchemeArg::Helmholtz => {
            return Err(Error::InvalidConfig("paradiag needs a time scheme (heat-bvm or backward-heat)".into()))
        }
    };
    let kind = SmootherKind::from(args.smoother);
    let cfg = MultigridConfig {
        tol: args.tol,
        max_iter: args.max_iter,
        smoother: SmootherConfig::preset(kind),
        ..MultigridConfig::default()
    };
    check_layout(g, &cfg)?;

    let started = Instant::now();
    let (u_exact, f) = manufactured_problem(&td, g)?;
    let sol = paradiag_solve(&f, &td, &cfg)?;
    let elapsed = started.elapsed().as_secs_f64();
    let b = build_b(&td)?;
    let applied = all_at_once_apply(&b, &sol.u_all)?;
    let resid: Vec<GridFunction> = applied
        .iter()
        .zip(&f)
        .map(|(a, fi)| {
            let mut r = fi.clone();
            r.axpy(Complex64::new(-1.0, 0.0), a).map(|_| r)
        })
        .collect::<Result<_>>()?;
    let rel_residual = stack_norm(&resid) / stack_norm(&f);
    let diff = |a: &[GridFunction], b: &[GridFunction]| -> Result<f64> {
        let d: Vec<GridFunction> = a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let mut d = x.clone();
                d.axpy(Complex64::new(-1.0, 0.0), y).map(|_| d)
            })
            .collect::<Result<_>>()?;
        Ok(stack_norm(&d) / stack_norm(b))
    };
    let rel_error = diff(&sol.u_all, &u_exact)?;
    let total = td.dim() * g.len();
    let oracle = if total <= args.oracle_limit {
        Some(diff(&sol.u_all, &dense_all_at_once_solve(&b, &f)?)?)
    } else {
        None
    };

    let manifest = Manifest {
        command: "paradiag",
        params: vec![
            ("scheme", td.scheme.name().into()),
            ("h", format!("1/{}", args.h)),
            ("tau", format!("1/{tau_n}")),
            ("beta", args.beta.to_string()),
            ("smoother", kind.name().into()),
            ("tol", args.tol.to_string()),
            ("max_iter", args.max_iter.to_string()),
        ],
        out: args.out.clone(),
    };
    let mut csv = manifest.render();
    writeln!(csv, "# all_at_once_relative_residual: {}", fmt_num(rel_residual)).unwrap();
    writeln!(csv, "# relative_error_vs_manufactured: {}", fmt_num(rel_error)).unwrap();
    if let Some(o) = oracle {
        writeln!(csv, "# relative_difference_vs_dense_solve: {}", fmt_num(o)).unwrap();
    }
    writeln!(csv, "# eigenvector_condition_estimate: {}", fmt_num(sol.cond_estimate)).unwrap();
    csv.push_str("shift_index,lambda_re,lambda_im,iterations,rate,converged\n");
    for (s, r) in sol.shifts.iter().zip(&sol.reports) {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            s.index,
            fmt_num(s.lambda.re),
            fmt_num(s.lambda.im),
            r.iterations,
            fmt_num(r.rate),
            r.converged
        )
        .unwrap();
    }
    let max_it = sol.reports.iter().map(|r| r.iterations).max().unwrap_or(0);
    let min_it = sol.reports.iter().map(|r| r.iterations).min().unwrap_or(0);
    let mut summary = vec![
        format!(
            "{} shifts, {} unknowns, all converged: {}",
            sol.shifts.len(),
            total,
            sol.all_converged
        ),
        format!("iterations per shift: min {min_it}, max {max_it}"),
        format!("all-at-once relative residual: {rel_residual:.3e}"),
        format!("relative error vs manufactured solution: {rel_error:.3e}"),
    ];
    if let Some(o) = oracle {
        summary.push(format!("relative difference vs dense direct solve: {o:.3e}"));
    }
    summary.push(format!("cond(V) estimate: {:.3e}", sol.cond_estimate));
    summary.push(format!("wall_time={elapsed:.2}s"));
    Ok(Output {
        csv,
        summary,
        exit_code: if sol.all_converged { EXIT_OK } else { EXIT_NUMERICAL },
        out: args.out.clone(),
    })
}

pub fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::LfaTable(a) => cmd_lfa_table(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Paradiag(a) => cmd_paradiag(a),
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(output) => {
            match &output.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &output.csv) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_USAGE;
                    }
                    for line in &output.summary {
                        println!("{line}");
                    }
                }
                None => {
                    print!("{}", output.csv);
                    for line in &output.summary {
                        eprintln!("{line}");
                    }
                }
            }
            output.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_parsing() {
        assert_eq!(parse_step("1/256"), Ok(256));
        assert_eq!(parse_step("0.015625"), Ok(64));
        assert_eq!(parse_step(" 1 / 8 "), Ok(8));
        assert_eq!(parse_step("2/16"), Ok(8));
        assert!(parse_step("0.3").is_err());
        assert!(parse_step("-1/4").is_err());
        assert!(parse_step("abc").is_err());
        assert!(parse_step("1/0").is_err());
    }

    #[test]
    fn number_format_has_enough_digits() {
        let s = fmt_num(1.0 / 3.0);
        let mantissa: String = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
        assert!(mantissa.len() >= 12, "{s}");
    }

    #[test]
    fn manifest_hash_ignores_timestamp() {
        let m = Manifest {
            command: "solve",
            params: vec![("h", "1/8".into())],
            out: None,
        };
        assert_eq!(m.hash(), m.hash());
        assert_eq!(m.hash().len(), 64);
    }
}
