//! Command-line front end: build state fixtures, run verification sweeps,
//! tabulate moments, and sample characteristic functions.
//!
//! Exit codes: 0 success (and all checks pass for `verify`), 1 verification
//! failure, 2 invalid configuration or IO problems, 3 truncation-sanity or
//! convergence failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use gaussfock::coords::ModeVector;
use gaussfock::fock::{build_state, FockSpec, StateKind};
use gaussfock::gaussian::GaussianParams;
use gaussfock::stateio::{load_state, save_state};
use gaussfock::verify::{
    charfn_csv, charfn_json, charfn_samples, kind_from_json, kind_json, moment_table, moments_csv,
    moments_json, run_verification, run_verification_on_state, SweepConfig,
};
use gaussfock::{Error, Result};

#[derive(Parser)]
#[command(
    name = "gaussfock",
    version,
    about = "Gaussian states on truncated Fock spaces: builders, cross-checks, moments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state and write it as state.bin + state.json.
    Build(BuildArgs),
    /// Run the verification sweep and emit a report.
    Verify(VerifyArgs),
    /// Tabulate field-operator moments along one direction z.
    Moments(MomentsArgs),
    /// Sample the characteristic function on a grid.
    Charfn(CharfnArgs),
}

#[derive(Args, Clone)]
struct StateArgs {
    /// State kind to build.
    #[arg(long, value_enum, default_value_t = KindArg::Vacuum)]
    kind: KindArg,
    /// Mode count n.
    #[arg(long, default_value_t = 1)]
    modes: usize,
    /// Per-mode cutoff d (levels 0..d-1).
    #[arg(long, default_value_t = 30)]
    cutoff: usize,
    /// Coherent amplitude, applied to every mode ("0.5", "0.3i", "0.1+0.2i").
    #[arg(long, value_parser = parse_complex)]
    alpha: Option<Complex64>,
    /// Thermal mean occupation, applied to every mode.
    #[arg(long)]
    nbar: Option<f64>,
    /// Squeezing amplitude r, applied to every mode.
    #[arg(long = "squeeze-r")]
    squeeze_r: Option<f64>,
    /// Squeezing phase phi, applied to every mode.
    #[arg(long = "squeeze-phi", default_value_t = 0.0)]
    squeeze_phi: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Vacuum,
    Coherent,
    Thermal,
    Squeezed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Output directory for state.bin and state.json.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Verify a stored state directory instead of building one.
    #[arg(long, conflicts_with_all = ["kind", "alpha", "nbar", "squeeze_r"])]
    state_dir: Option<PathBuf>,
    /// Random seed echoed into the report.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Multiplies every tolerance.
    #[arg(long = "tol-scale", default_value_t = 1.0)]
    tol_scale: f64,
    /// Enforce the literal covariance positivity reading on squeezed states.
    #[arg(long = "paper-strict", default_value_t = false)]
    paper_strict: bool,
    /// Grid points per real dimension for the characteristic-function sweep.
    #[arg(long, default_value_t = 5)]
    grid: usize,
    /// Random (z, u) pairs in the Weyl-relation sweep.
    #[arg(long, default_value_t = 200)]
    pairs: usize,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Direction z for the field operator, one value for all modes.
    #[arg(long, value_parser = parse_complex, default_value = "1")]
    z: Complex64,
    /// Largest moment order.
    #[arg(long = "max-order", default_value_t = 4)]
    max_order: usize,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CharfnArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Grid points per real dimension.
    #[arg(long, default_value_t = 5)]
    grid: usize,
    /// Cap on the number of grid samples.
    #[arg(long = "grid-cap", default_value_t = 200)]
    grid_cap: usize,
    /// Seed for grid subsampling.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Parses "a", "bi", "a+bi", "a-bi", "i", "-i".
fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let parse_real = |x: &str| -> std::result::Result<f64, String> {
        x.parse::<f64>()
            .map_err(|e| format!("bad float {x:?}: {e}"))
    };
    let parse_imag = |x: &str| -> std::result::Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            other => parse_real(other),
        }
    };
    if let Some(head) = t.strip_suffix(['i', 'j']) {
        // split off a trailing imaginary term if a sign separates two parts
        let bytes = head.as_bytes();
        for idx in (1..bytes.len()).rev() {
            if matches!(bytes[idx], b'+' | b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                let re = parse_real(&head[..idx])?;
                let im = parse_imag(&head[idx..])?;
                return Ok(Complex64::new(re, im));
            }
        }
        return Ok(Complex64::new(0.0, parse_imag(head)?));
    }
    Ok(Complex64::new(parse_real(&t)?, 0.0))
}

impl StateArgs {
    fn kind(&self) -> Result<StateKind> {
        match self.kind {
            KindArg::Vacuum => Ok(StateKind::Vacuum),
            KindArg::Coherent => {
                let alpha = self.alpha.ok_or_else(|| {
                    Error::InvalidParameter("--alpha is required for coherent states".into())
                })?;
                Ok(StateKind::Coherent {
                    alpha: ModeVector::new(vec![alpha; self.modes])?,
                })
            }
            KindArg::Thermal => {
                let nbar = self.nbar.ok_or_else(|| {
                    Error::InvalidParameter("--nbar is required for thermal states".into())
                })?;
                Ok(StateKind::Thermal {
                    nbar: vec![nbar; self.modes],
                })
            }
            KindArg::Squeezed => {
                let r = self.squeeze_r.ok_or_else(|| {
                    Error::InvalidParameter("--squeeze-r is required for squeezed states".into())
                })?;
                Ok(StateKind::Squeezed {
                    r: vec![r; self.modes],
                    phi: vec![self.squeeze_phi; self.modes],
                })
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_build(args: &BuildArgs) -> Result<ExitCode> {
    let kind = args.state.kind()?;
    let spec = FockSpec::new(args.state.modes, args.state.cutoff)?;
    let rho = build_state(spec, &kind)?;
    let params = GaussianParams::for_state(&kind, args.state.modes)?;
    save_state(
        &args.out,
        &rho,
        kind.name(),
        kind_json(&kind),
        Some(&params),
    )?;
    eprintln!(
        "wrote {} ({} modes, cutoff {}, leakage {:.3e})",
        args.out.display(),
        args.state.modes,
        args.state.cutoff,
        rho.leakage()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let report = if let Some(dir) = &args.state_dir {
        let (rho, meta) = load_state(dir)?;
        let analytic = meta
            .analytic
            .as_ref()
            .ok_or_else(|| {
                Error::BadStateFile("stored state carries no analytic parameters".into())
            })?
            .to_params()?;
        let kind = kind_from_json(&meta.parameters)?;
        let mut cfg = SweepConfig::new(meta.modes, meta.cutoff, kind);
        cfg.seed = args.seed;
        cfg.tol_scale = args.tol_scale;
        cfg.paper_strict = args.paper_strict;
        cfg.grid_points_per_dim = args.grid;
        cfg.ccr_pairs = args.pairs;
        run_verification_on_state(&cfg, &rho, &analytic)?
    } else {
        let mut cfg = SweepConfig::new(args.state.modes, args.state.cutoff, args.state.kind()?);
        cfg.seed = args.seed;
        cfg.tol_scale = args.tol_scale;
        cfg.paper_strict = args.paper_strict;
        cfg.grid_points_per_dim = args.grid;
        cfg.ccr_pairs = args.pairs;
        run_verification(&cfg)?
    };

    for r in &report.records {
        eprintln!(
            "{} {:<34} residual {:>12.3e}  tol {:>9.1e}  [{}]",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.residual,
            r.tolerance,
            r.paper_anchor
        );
    }
    eprintln!(
        "{}/{} checks passed in {} ms",
        report.summary.passed, report.summary.total, report.wall_time_ms
    );

    let content = match args.format {
        Format::Json => report.to_json_pretty()?,
        Format::Csv => report.to_csv(),
    };
    emit(&args.out, &content)?;
    Ok(if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_moments(args: &MomentsArgs) -> Result<ExitCode> {
    let kind = args.state.kind()?;
    let spec = FockSpec::new(args.state.modes, args.state.cutoff)?;
    let rho = build_state(spec, &kind)?;
    let params = GaussianParams::for_state(&kind, args.state.modes)?;
    let z = ModeVector::new(vec![args.z; args.state.modes])?;
    let rows = moment_table(&rho, &params, &z, args.max_order)?;
    let content = match args.format {
        Format::Csv => moments_csv(&rows),
        Format::Json => format!("{:#}\n", moments_json(&rows)),
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_charfn(args: &CharfnArgs) -> Result<ExitCode> {
    let kind = args.state.kind()?;
    let spec = FockSpec::new(args.state.modes, args.state.cutoff)?;
    let rho = build_state(spec, &kind)?;
    let params = GaussianParams::for_state(&kind, args.state.modes)?;
    let samples = charfn_samples(&rho, &params, args.grid, args.grid_cap, args.seed)?;
    let content = match args.format {
        Format::Csv => charfn_csv(&samples, args.state.modes),
        Format::Json => format!("{:#}\n", charfn_json(&samples)),
    };
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::TruncationSanity { .. }
        | Error::CutoffTooSmall { .. }
        | Error::NonConvergence { .. }
        | Error::StencilFailure { .. } => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("GAUSSFOCK_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("ignoring GAUSSFOCK_THREADS={raw:?}: expected a positive integer"),
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(args) => cmd_build(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Moments(args) => cmd_moments(args),
        Command::Charfn(args) => cmd_charfn(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
