//! Command-line driver: impedance sweeps, mesh convergence studies and
//! self-tests.
//!
//! Exit status: 0 on success, 1 for configuration or usage errors, 2 when a
//! frequency fails to solve or a self-test check fails.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use axibem::driver::{run_convergence, run_selftest, run_sweep, RunConfig};
use axibem::error::Error;
use axibem::geometry::Order;
use clap::{Parser, Subcommand};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERIC: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "axibem", version, about = "Eddy-current coil impedance by axisymmetric Galerkin BEM")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "AXIBEM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Impedance change at every frequency of the config, one CSV row each.
    Sweep {
        /// JSON run configuration.
        config: PathBuf,
        /// Element order, overriding the config.
        #[arg(long, value_parser = parse_order)]
        order: Option<Order>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Errors and observed orders over a list of mesh levels.
    Converge {
        config: PathBuf,
        /// Comma-separated element counts.
        #[arg(long, value_delimiter = ',', default_value = "40,80,160,320")]
        levels: Vec<usize>,
        /// Element count of the P2 reference; defaults to the largest level,
        /// which is then not reported as a level.
        #[arg(long)]
        reference: Option<usize>,
        #[arg(long, value_parser = parse_order)]
        order: Option<Order>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quadrature, kernel and coil checks against known values.
    Selftest,
}

fn parse_order(s: &str) -> Result<Order, String> {
    let n: u8 = s.parse().map_err(|_| format!("`{s}` is not 1 or 2"))?;
    Order::try_from(n)
}

/// Failure of one command together with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: String) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message,
    }
}

fn load(path: &Path, order: Option<Order>) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| config_failure(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::from_json(&text).map_err(|e| config_failure(format!("{}: {e}", path.display())))?;
    if let Some(o) = order {
        cfg.order = o;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let result = match out {
        Some(p) => File::create(p).and_then(|f| {
            let mut w = BufWriter::new(f);
            write(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w).and_then(|_| w.flush())
        }
    };
    result.map_err(|e| {
        let target = out.map_or("standard output".to_string(), |p| p.display().to_string());
        config_failure(format!("cannot write {target}: {e}"))
    })
}

fn sweep(config: &Path, order: Option<Order>, out: Option<&Path>) -> Result<(), Failure> {
    let cfg = load(config, order)?;
    let output = run_sweep(&cfg)?;
    emit(out, |w| output.write_csv(w))?;
    let mut failed = 0;
    for (f, row) in output.frequencies.iter().zip(&output.rows) {
        if let Err(e) = row {
            eprintln!("{f:.6e} Hz: {e}");
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Failure {
            code: EXIT_NUMERIC,
            message: format!("{failed} of {} frequencies failed", output.rows.len()),
        });
    }
    Ok(())
}

fn converge(
    config: &Path,
    levels: &[usize],
    reference: Option<usize>,
    order: Option<Order>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let cfg = load(config, order)?;
    let reference = match reference.or_else(|| levels.iter().copied().max()) {
        Some(r) => r,
        None => return Err(config_failure("levels: empty list".into())),
    };
    let studied: Vec<usize> = levels.iter().copied().filter(|&n| n != reference).collect();
    let report = run_convergence(&cfg, &studied, reference)?;
    emit(out, |w| report.write_csv(w))
}

fn selftest() -> Result<(), Failure> {
    let checks = run_selftest()?;
    let mut failed = 0;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<40} value {:+.17e} error {:.3e} tolerance {:.1e}",
            c.name, c.value, c.error, c.tolerance
        );
        if !c.pass {
            failed += 1;
        }
    }
    println!("{} checks, {failed} failed", checks.len());
    if failed > 0 {
        return Err(Failure {
            code: EXIT_NUMERIC,
            message: format!("{failed} self-test checks failed"),
        });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_failure("threads: must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| config_failure(format!("threads: {e}")))?;
    }
    match cli.command {
        Command::Sweep { config, order, out } => sweep(&config, order, out.as_deref()),
        Command::Converge {
            config,
            levels,
            reference,
            order,
            out,
        } => converge(&config, &levels, reference, order, out.as_deref()),
        Command::Selftest => selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
