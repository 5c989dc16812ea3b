//! Command line runner: batch simulations, refinement studies and the
//! randomized self-test battery.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 solver
//! degeneration, 4 linear-solver failure, 5 self-test suite failure.

// negated comparisons like `!(x > 0.0)` deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;
mod suites;

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;

use apcsf::analysis::{self, TauRule};
use apcsf::init::{interpolate, uniform_grid, InitialCurve};
use apcsf::semidiscrete::{self, FlowVariant};
use apcsf::{fulldiscrete, Error, TrajectoryRecord};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "apcsf", version, about = "Area-preserving curve shortening flow on polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one trajectory and write per-step diagnostics
    Evolve(EvolveArgs),
    /// Refinement study of the implicit scheme against halved-mesh references
    Converge(StudyArgs),
    /// Enclosed-area drift per refinement level
    AreaLoss(StudyArgs),
    /// Randomized self-test battery
    Check(CheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scheme {
    /// Vertex ODE integrated by fixed-step Runge-Kutta
    Semi,
    /// Linearly implicit stepping, one cyclic block solve per step
    Full,
}

#[derive(clap::Args)]
struct EvolveArgs {
    #[arg(long, value_enum)]
    scheme: Scheme,
    /// Initial curve: `ellipse:a,b`, `circle:r` or `file:PATH`
    #[arg(long)]
    curve: String,
    /// Number of grid intervals (vertices)
    #[arg(long)]
    n: usize,
    /// Time step: a decimal, or `auto` (full: tau = 0.5 (2 pi / n)^2 with
    /// t-end adjusted to a whole number of steps; semi: 0.1 (min edge)^2)
    #[arg(long, default_value = "auto")]
    tau: String,
    /// Final time
    #[arg(long)]
    t_end: f64,
    /// Record every k-th step (initial and final states always included)
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    /// Diagnostics CSV path
    #[arg(long, default_value = "diagnostics.csv")]
    out_csv: PathBuf,
    /// Directory for per-snapshot SVG frames
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Relative edge-collapse floor
    #[arg(long, default_value_t = 1e-14)]
    eps_edge: f64,
    /// Condition cap on pivot blocks of the implicit solve
    #[arg(long, default_value_t = 1e12)]
    cond_cap: f64,
    /// Drop the nonlocal area term (plain curve shortening; semi only)
    #[arg(long)]
    no_area_term: bool,
}

#[derive(clap::Args)]
struct StudyArgs {
    /// Initial curve: `ellipse:a,b`, `circle:r` or `file:PATH`
    #[arg(long)]
    curve: String,
    /// Doubling grid sizes, e.g. 16,32,64,128
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<usize>,
    /// Coarse-level time step: a decimal, or `auto` for the parabolic rule
    #[arg(long, default_value = "auto")]
    tau: String,
    /// Final time
    #[arg(long)]
    t_end: f64,
    /// Report CSV path
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Run a single suite (default: all)
    #[arg(long)]
    suite: Option<String>,
    /// Seed for the randomized suites
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::DegenerateEdge { .. } => 3,
            Error::SingularSystem { .. } => 4,
            Error::Io(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure { code: 1, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve(args) => cmd_evolve(args),
        Command::Converge(args) => cmd_converge(args),
        Command::AreaLoss(args) => cmd_area_loss(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_tau(spec: &str) -> Result<Option<f64>, Failure> {
    if spec == "auto" {
        return Ok(None);
    }
    let tau: f64 = spec
        .parse()
        .map_err(|e| Failure::config(format!("--tau must be `auto` or a number: {e}")))?;
    if !(tau > 0.0) {
        return Err(Failure::config(format!("--tau must be positive, got {tau}")));
    }
    Ok(Some(tau))
}

fn build_polygon(descriptor: &str, n: usize) -> Result<apcsf::PolygonCurve, Failure> {
    if n < 3 {
        return Err(Failure::config(format!("--n must be at least 3, got {n}")));
    }
    let curve = InitialCurve::from_descriptor(descriptor)
        .map_err(|e| Failure { code: 2, message: e.to_string() })?;
    let grid = uniform_grid(n).map_err(Failure::from)?;
    interpolate(&curve, &grid).map_err(|e| Failure { code: 2, message: e.to_string() })
}

fn cmd_evolve(args: EvolveArgs) -> Result<(), Failure> {
    if !(args.t_end > 0.0) {
        return Err(Failure::config(format!("--t-end must be positive, got {}", args.t_end)));
    }
    if args.record_every == 0 {
        return Err(Failure::config("--record-every must be at least 1"));
    }
    if args.no_area_term && args.scheme != Scheme::Semi {
        return Err(Failure::config("--no-area-term is only supported with --scheme semi"));
    }
    let poly = build_polygon(&args.curve, args.n)?;

    let traj: TrajectoryRecord = match args.scheme {
        Scheme::Full => {
            let tau = match parse_tau(&args.tau)? {
                Some(tau) => tau,
                None => {
                    let h = TAU / args.n as f64;
                    0.5 * h * h
                }
            };
            let steps = (args.t_end / tau).round().max(1.0);
            let t_run = steps * tau;
            if (t_run - args.t_end).abs() > 1e-12 * args.t_end.max(tau) {
                log::info!(
                    "adjusted t-end from {} to {t_run} ({steps} steps of tau={tau})",
                    args.t_end
                );
            }
            fulldiscrete::evolve_full_guarded(
                &poly,
                t_run,
                tau,
                args.record_every,
                args.eps_edge,
                args.cond_cap,
            )?
        }
        Scheme::Semi => {
            let dt = match parse_tau(&args.tau)? {
                Some(dt) => dt,
                None => semidiscrete::default_time_step(&poly),
            };
            let variant = if args.no_area_term {
                FlowVariant::PlainShortening
            } else {
                FlowVariant::AreaPreserving
            };
            semidiscrete::evolve_with(
                &poly,
                args.t_end,
                dt,
                args.record_every,
                variant,
                args.eps_edge,
            )?
        }
    };

    output::write_atomic(&args.out_csv, &output::diagnostics_csv(&traj))?;
    if let Some(dir) = &args.out_svg {
        output::write_svg_frames(dir, &traj)?;
        println!("wrote {} SVG frames to {}", traj.len(), dir.display());
    }
    let audit = analysis::audit_structure(&traj);
    let last = traj.diagnostics.last().unwrap();
    println!(
        "{} steps to t={}, recorded {} states to {}",
        traj.total_steps,
        traj.times.last().unwrap(),
        traj.len(),
        args.out_csv.display()
    );
    println!(
        "final perimeter {:.6}, final area {:.6}, area drift {:.3e}",
        last.perimeter, last.area, audit.area_drift
    );
    println!(
        "perimeter monotone: {}, min fan area {:.3e}, min edge {:.3e}",
        audit.perimeter_monotone, audit.min_fan_area, audit.min_edge
    );
    Ok(())
}

fn study_rule(spec: &str) -> Result<TauRule, Failure> {
    Ok(match parse_tau(spec)? {
        Some(tau) => TauRule::Fixed(tau),
        None => TauRule::Auto,
    })
}

fn cmd_converge(args: StudyArgs) -> Result<(), Failure> {
    let curve = InitialCurve::from_descriptor(&args.curve)
        .map_err(|e| Failure { code: 2, message: e.to_string() })?;
    let rule = study_rule(&args.tau)?;
    let report = analysis::run_convergence_study(&curve, &args.n_list, args.t_end, rule)?;

    println!(
        "{:>6} {:>12} {:>8} {:>12} {:>8} {:>12} {:>8}",
        "N", "E1", "order1", "E2", "order2", "E3", "order3"
    );
    for row in &report.rows {
        let ord = |o: Option<f64>| o.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        println!(
            "{:>6} {:>12.2e} {:>8} {:>12.2e} {:>8} {:>12.2e} {:>8}",
            row.n,
            row.e1,
            ord(row.order1),
            row.e2,
            ord(row.order2),
            row.e3,
            ord(row.order3)
        );
    }
    let path = args.report.unwrap_or_else(|| PathBuf::from("convergence.csv"));
    output::write_atomic(&path, &report.to_csv())?;
    println!("report written to {}", path.display());
    Ok(())
}

fn cmd_area_loss(args: StudyArgs) -> Result<(), Failure> {
    let curve = InitialCurve::from_descriptor(&args.curve)
        .map_err(|e| Failure { code: 2, message: e.to_string() })?;
    let rule = study_rule(&args.tau)?;
    let report = analysis::area_loss_study(&curve, &args.n_list, args.t_end, rule)?;

    let mut csv = String::from("N,area_drift\n");
    for (n, drift) in &report.rows {
        println!("N={n:>4}: |area(T) - area(0)| = {drift:.4e}");
        csv.push_str(&format!("{n},{drift:.4e}\n"));
    }
    match report.slope() {
        Some(slope) => println!("log-log drift slope vs h: {slope:.2}"),
        None => println!("log-log drift slope vs h: - (need at least two levels)"),
    }
    let path = args.report.unwrap_or_else(|| PathBuf::from("area_loss.csv"));
    output::write_atomic(&path, &csv)?;
    println!("report written to {}", path.display());
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let selected: Vec<&str> = match &args.suite {
        Some(name) => {
            if !suites::SUITE_NAMES.contains(&name.as_str()) {
                return Err(Failure::config(format!(
                    "unknown suite {name:?}; available: {}",
                    suites::SUITE_NAMES.join(", ")
                )));
            }
            vec![name.as_str()]
        }
        None => suites::SUITE_NAMES.to_vec(),
    };
    println!("seed {}", args.seed);
    let mut failures = 0;
    for name in selected {
        let result = suites::run_suite(name, args.seed).expect("suite names validated");
        println!(
            "suite {:>24}: {} ({})",
            result.name,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
        if !result.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(Failure { code: 5, message: format!("{failures} suite(s) failed") });
    }
    Ok(())
}
