//! Command-line driver. Exit codes: 0 = all queries succeeded, 1 = diagnostics
//! or a failed query, 2 = fixture failure in the verify-paper audit.

use clap::{Parser, Subcommand, ValueEnum};
use pldyn_cli::report::{to_csv, to_json, Report};
use pldyn_cli::runner::{self, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pldyn",
    about = "Exact piecewise-linear interval dynamics: hit sets, certificates and classification",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Clone, Debug)]
struct CommonOpts {
    /// Default horizon for queries that do not set one.
    #[arg(long)]
    horizon: Option<usize>,
    /// Default grid depth for classification queries.
    #[arg(long)]
    depth: Option<u32>,
    /// Default family: infinite, cofinite, syndetic, thick or density.
    #[arg(long)]
    family: Option<String>,
    /// Threshold for the positive-upper-density horizon proxy (rational in (0,1)).
    #[arg(long = "density-threshold")]
    density_threshold: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a program, reporting positioned diagnostics.
    Check { file: PathBuf },
    /// Execute every query of a program.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run the bundled reference-example audit with its errata ledger.
    VerifyPaper {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compose two maps from a definitions file (outer ∘ inner).
    Compose {
        file: PathBuf,
        outer: String,
        inner: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Hit set of a sequence on a pair of named sets.
    Hitset {
        file: PathBuf,
        seq: String,
        u: String,
        v: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Classify a sequence: transitive, mixing or ergodic.
    Classify {
        file: PathBuf,
        kind: String,
        seq: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

fn read(file: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(file).map_err(|e| {
        eprintln!("cannot read {}: {e}", file.display());
        ExitCode::from(1)
    })
}

fn config_from(opts: &CommonOpts) -> Result<RunConfig, ExitCode> {
    let mut config = RunConfig::default();
    if let Some(h) = opts.horizon {
        config.horizon = h;
    }
    if let Some(d) = opts.depth {
        config.depth = d;
    }
    if let Some(f) = &opts.family {
        if !["infinite", "cofinite", "syndetic", "thick", "density"].contains(&f.as_str()) {
            eprintln!("unknown family '{f}' (use infinite, cofinite, syndetic, thick or density)");
            return Err(ExitCode::from(1));
        }
        config.family = f.clone();
    }
    if let Some(t) = &opts.density_threshold {
        match t.parse() {
            Ok(r) => config.density_threshold = r,
            Err(_) => {
                eprintln!("invalid density threshold '{t}'");
                return Err(ExitCode::from(1));
            }
        }
    }
    Ok(config)
}

fn parse_or_exit(source: &str) -> Result<pldyn_cli::SystemSpec, ExitCode> {
    match pldyn_cli::parse(source) {
        Ok(spec) => Ok(spec),
        Err(diags) => {
            for d in diags {
                eprintln!("{d}");
            }
            Err(ExitCode::from(1))
        }
    }
}

fn emit(reports: &[Report], format: Format) -> ExitCode {
    match format {
        Format::Json => println!("{}", to_json(reports)),
        Format::Csv => print!("{}", to_csv(reports)),
    }
    let fixture_failures: usize = reports
        .iter()
        .map(|r| match r {
            Report::VerifyPaper { failed, .. } => *failed,
            _ => 0,
        })
        .sum();
    if fixture_failures > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn run_with_extra_query(
    file: &PathBuf,
    extra_query: &str,
    opts: &CommonOpts,
) -> Result<ExitCode, ExitCode> {
    let mut source = read(file)?;
    source.push('\n');
    source.push_str(extra_query);
    source.push('\n');
    let spec = parse_or_exit(&source)?;
    let config = config_from(opts)?;
    // run only the synthesized query, not the file's own query list
    let lowered = runner::lower(&spec);
    let query = spec.queries.last().expect("synthesized query present");
    match runner::run_query(&lowered, query, &config) {
        Ok(report) => Ok(emit(&[report], opts.format)),
        Err(e) => {
            eprintln!("{e}");
            Err(ExitCode::from(1))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Check { file } => {
            let source = match read(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            match pldyn_cli::parse(&source) {
                Ok(spec) => {
                    println!(
                        "ok: {} maps, {} sequences, {} sets, {} queries",
                        spec.maps.len(),
                        spec.seqs.len(),
                        spec.sets.len(),
                        spec.queries.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(diags) => {
                    for d in diags {
                        eprintln!("{d}");
                    }
                    ExitCode::from(1)
                }
            }
        }
        Cmd::Run { file, opts } => {
            let source = match read(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let spec = match parse_or_exit(&source) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let config = match config_from(&opts) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match runner::run(&spec, &config) {
                Ok(reports) => emit(&reports, opts.format),
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(1)
                }
            }
        }
        Cmd::VerifyPaper { format } => {
            let report = runner::suite_report();
            if let Report::VerifyPaper { fixtures, passed, failed, .. } = &report {
                for f in fixtures {
                    eprintln!("{}: {} — {}", f.status.to_uppercase(), f.id, f.detail);
                }
                eprintln!("{passed} passed, {failed} failed");
            }
            emit(&[report], format)
        }
        Cmd::Compose { file, outer, inner, opts } => {
            let q = format!("query compose {outer} {inner}");
            match run_with_extra_query(&file, &q, &opts) {
                Ok(code) | Err(code) => code,
            }
        }
        Cmd::Hitset { file, seq, u, v, opts } => {
            let mut q = format!("query hitset {seq} {u} {v}");
            if let Some(h) = opts.horizon {
                q.push_str(&format!(" horizon={h}"));
            }
            if let Some(f) = &opts.family {
                q.push_str(&format!(" family={f}"));
            }
            match run_with_extra_query(&file, &q, &opts) {
                Ok(code) | Err(code) => code,
            }
        }
        Cmd::Classify { file, kind, seq, opts } => {
            if !["transitive", "mixing", "ergodic"].contains(&kind.as_str()) {
                eprintln!("unknown classification kind '{kind}' (use transitive, mixing or ergodic)");
                return ExitCode::from(1);
            }
            let mut q = format!("query classify {kind} {seq}");
            if let Some(h) = opts.horizon {
                q.push_str(&format!(" horizon={h}"));
            }
            if let Some(d) = opts.depth {
                q.push_str(&format!(" depth={d}"));
            }
            if let Some(f) = &opts.family {
                q.push_str(&format!(" family={f}"));
            }
            match run_with_extra_query(&file, &q, &opts) {
                Ok(code) | Err(code) => code,
            }
        }
    }
}
