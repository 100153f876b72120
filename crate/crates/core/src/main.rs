//! Command-line interface: analysis, parametrization and verification of
//! constant-nullity hypersurface constructions.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nullity_lab::gallery::{make_example, CATALOG};
use nullity_lab::immersion::spec_io::ImmersionSpec;
use nullity_lab::immersion::ParametricImmersion;
use nullity_lab::report::Report;
use nullity_lab::verify::{run_analyze, run_parametrize, run_suite, OracleMode, SUITES};

#[derive(Parser)]
#[command(
    name = "nullity-lab",
    about = "Construction and verification of complex hypersurfaces with constant relative nullity"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pointwise analysis of an immersion: holomorphy class, tangency,
    /// nullity and identity residuals.
    Analyze {
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Evaluate the parametrization built from an anti-holomorphic base over
    /// a base-times-fiber grid.
    Parametrize {
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Run a named verification suite.
    Verify {
        /// One of: identities, roundtrip, star, cone, projective, cylinder, all.
        suite: String,
        #[command(flatten)]
        args: CommonArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Oracle {
    Exact,
    FiniteDifference,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Ply,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to an immersion spec JSON file, or the name of a catalog fixture.
    #[arg(long)]
    spec: Option<String>,
    /// Grid resolution per axis.
    #[arg(long, default_value_t = 17)]
    grid: usize,
    /// Seed for all deterministic sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute rank tolerance.
    #[arg(long, default_value_t = 1e-10)]
    atol: f64,
    /// Relative rank tolerance.
    #[arg(long, default_value_t = 1e-8)]
    rtol: f64,
    /// Identity-residual tolerance for pass/fail decisions.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Derivative oracle used for cross-checks.
    #[arg(long, value_enum, default_value_t = Oracle::Both)]
    oracle: Oracle,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Analyze { args } => {
            let imm = match load_spec(&args) {
                Ok(i) => i,
                Err(code) => return code,
            };
            let (report, ok) = run_analyze(
                &imm,
                args.grid,
                args.seed,
                args.atol,
                args.rtol,
                args.tol,
                oracle_mode(args.oracle),
            );
            if let Err(code) = emit_report(&report, &args) {
                return code;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Cmd::Parametrize { args } => {
            let imm = match load_spec(&args) {
                Ok(i) => i,
                Err(code) => return code,
            };
            match run_parametrize(&imm, args.grid, args.seed, args.atol, args.rtol) {
                Ok((report, ok)) => {
                    if let Err(code) = emit_report(&report, &args) {
                        return code;
                    }
                    if ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAIL)
                    }
                }
                Err(e) => {
                    eprintln!("parametrize failed: {e}");
                    ExitCode::from(EXIT_FAIL)
                }
            }
        }
        Cmd::Verify { suite, args } => {
            if !SUITES.contains(&suite.as_str()) {
                eprintln!(
                    "unknown suite '{suite}'; expected one of: {}",
                    SUITES.join(", ")
                );
                return ExitCode::from(EXIT_INPUT);
            }
            match run_suite(&suite, args.seed) {
                Ok(report) => {
                    let json = report.to_json();
                    if let Err(code) = write_output(&json, &args.out) {
                        return code;
                    }
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        if let Some(first) = report.checks.iter().find(|c| !c.passed) {
                            eprintln!("FAIL {}: {}", first.name, first.detail);
                        }
                        ExitCode::from(EXIT_FAIL)
                    }
                }
                Err(e) => {
                    eprintln!("verify failed: {e}");
                    ExitCode::from(EXIT_INPUT)
                }
            }
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("NULLITY_LAB_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn oracle_mode(o: Oracle) -> OracleMode {
    match o {
        Oracle::Exact => OracleMode::Exact,
        Oracle::FiniteDifference => OracleMode::FiniteDifference,
        Oracle::Both => OracleMode::Both,
    }
}

fn load_spec(args: &CommonArgs) -> Result<ParametricImmersion<f64>, ExitCode> {
    let Some(spec) = &args.spec else {
        eprintln!("--spec is required (path to a spec JSON or a fixture name)");
        return Err(ExitCode::from(EXIT_INPUT));
    };
    if CATALOG.contains(&spec.as_str()) {
        return Ok(make_example::<f64>(spec).expect("catalog fixture"));
    }
    let text = match std::fs::read_to_string(spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read spec '{spec}': {e}");
            return Err(ExitCode::from(EXIT_INPUT));
        }
    };
    match serde_json::from_str::<ImmersionSpec>(&text) {
        Ok(parsed) => Ok(parsed.to_immersion()),
        Err(e) => {
            // serde_json reports line and column of the failure
            eprintln!("malformed spec '{spec}': {e}");
            Err(ExitCode::from(EXIT_INPUT))
        }
    }
}

fn emit_report(report: &Report, args: &CommonArgs) -> Result<(), ExitCode> {
    let text = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Ply => report.to_ply(),
    };
    write_output(&text, &args.out)
}

fn write_output(text: &str, out: &Option<PathBuf>) -> Result<(), ExitCode> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            eprintln!("cannot write output '{}': {e}", path.display());
            ExitCode::from(EXIT_INPUT)
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
