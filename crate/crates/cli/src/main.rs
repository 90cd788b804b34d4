//! `copgrid` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or arguments, 2 I/O failure,
//! 3 verification failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use copgrid::grid::{empirical_checkerboard, DEFAULT_EXPONENT};
use copgrid::io::{self, format_number};
use copgrid::order::{dp_distance, lo_compare, schur_compare};
use copgrid::transforms::{
    increasing_rearrangement, markov_product, reflection, upper_product, upper_transform,
};
use copgrid::{measures, suite, CopulaError, CopulaGrid, ParametricCopula};

#[derive(Parser)]
#[command(name = "copgrid", version, about = "Checkerboard copula calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize a named copula family as a grid file
    Gen {
        /// gaussian:<rho>, efgm:<theta>, m, w, pi, shuffle:<perm>, tshuffle:<m>
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Empirical checkerboard from an x,y sample file
    Estimate {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXPONENT)]
        exponent: f64,
        /// Values are already pseudo-observations in (0, 1)
        #[arg(long)]
        pseudo: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw samples from a grid
    Sample {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply an operator to a grid
    Transform {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        out: PathBuf,
        /// Also write a PGM heatmap here, plus a CSV matrix next to it
        #[arg(long)]
        heatmap: Option<PathBuf>,
    },
    /// Upper or Markov product of two grids
    Product {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, value_enum)]
        kind: ProductKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate dependence measures
    Measure {
        #[arg(long)]
        grid: PathBuf,
        /// Comma-separated measure names
        #[arg(long)]
        which: String,
        #[arg(long)]
        json: bool,
    },
    /// Order verdict and derivative distances between two grids
    Compare {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, value_enum)]
        order: OrderArg,
        /// Comma-separated list of d1, d2
        #[arg(long, default_value = "")]
        metrics: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run the numerical verification suite
    Verify {
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    #[value(name = "T")]
    T,
    #[value(name = "T2")]
    T2,
    #[value(name = "S")]
    S,
    Rearrange,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProductKind {
    Upper,
    Markov,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Lo,
    Schur,
}

enum Failure {
    Invalid(String),
    Io(String),
    Verification,
}

impl From<CopulaError> for Failure {
    fn from(e: CopulaError) -> Self {
        match e {
            CopulaError::Io(err) => Failure::Io(err.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Rounds to the 12 significant digits used for all printed numbers.
fn round12(x: f64) -> f64 {
    format_number(x).parse().unwrap_or(x)
}

fn read_grid(path: &Path) -> Result<CopulaGrid, Failure> {
    io::read_grid(path).map_err(|e| match e {
        CopulaError::Io(err) => Failure::Io(format!("{}: {err}", path.display())),
        other => Failure::Invalid(format!("{}: {other}", path.display())),
    })
}

fn write(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe is reported as an IO failure, not a panic.
fn emit(text: &str) -> CmdResult {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn print_json(value: &Value) -> CmdResult {
    emit(&(serde_json::to_string_pretty(value).expect("json values serialize") + "\n"))
}

fn cmd_gen(family: &str, n: usize, out: &Path) -> CmdResult {
    let spec: ParametricCopula = family.parse()?;
    let grid = spec.materialize(n)?;
    write(out, &io::grid_to_csv(&grid))
}

fn cmd_estimate(samples: &Path, exponent: f64, pseudo: bool, out: &Path) -> CmdResult {
    let text = std::fs::read_to_string(samples)
        .map_err(|e| Failure::Io(format!("{}: {e}", samples.display())))?;
    let set = io::samples_from_csv(&text, pseudo)?;
    let grid = empirical_checkerboard(&set, exponent)?;
    write(out, &io::grid_to_csv(&grid))
}

fn cmd_sample(grid: &Path, count: usize, seed: u64, out: &Path) -> CmdResult {
    if count == 0 {
        return Err(Failure::Invalid("count must be positive".into()));
    }
    let g = read_grid(grid)?;
    write(out, &io::samples_to_csv(&g.sample(count, seed)))
}

fn cmd_transform(grid: &Path, op: Op, out: &Path, heatmap: Option<&Path>) -> CmdResult {
    let g = read_grid(grid)?;
    let field = g.derivative_field();
    let result = match op {
        Op::T => upper_transform(&field),
        // T o T is the increasing rearrangement; both paths sort the rows
        Op::T2 | Op::Rearrange => increasing_rearrangement(&field),
        Op::S => reflection(&field)?,
    };
    write(out, &io::grid_to_csv(&result))?;
    if let Some(path) = heatmap {
        write(path, &io::heatmap_pgm(&result))?;
        write(&path.with_extension("csv"), &io::heatmap_csv(&result))?;
    }
    Ok(())
}

fn cmd_product(left: &Path, right: &Path, kind: ProductKind, out: &Path) -> CmdResult {
    let (a, b) = (read_grid(left)?, read_grid(right)?);
    let (fa, fb) = (a.derivative_field(), b.derivative_field());
    let result = match kind {
        ProductKind::Upper => upper_product(&fa, &fb)?,
        ProductKind::Markov => markov_product(&fa, &fb)?,
    };
    write(out, &io::grid_to_csv(&result))
}

fn cmd_measure(grid: &Path, which: &str, as_json: bool) -> CmdResult {
    let names: Vec<&str> = which
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Failure::Invalid("no measure names given".into()));
    }
    let g = read_grid(grid)?;
    let mut reports = Vec::with_capacity(names.len());
    for name in names {
        let mut r = measures::evaluate(name, &g).map_err(|e| {
            Failure::Invalid(format!(
                "{e}; known measures: {}",
                measures::MEASURE_NAMES.join(", ")
            ))
        })?;
        r.value = round12(r.value);
        reports.push(r);
    }
    if as_json {
        print_json(&serde_json::to_value(&reports).expect("reports serialize"))?;
    } else {
        let mut text = String::new();
        for r in &reports {
            text += &format!(
                "{:<14} {:>16}  {}\n",
                r.name,
                format_number(r.value),
                r.method
            );
        }
        emit(&text)?;
    }
    Ok(())
}

fn cmd_compare(left: &Path, right: &Path, order: OrderArg, metrics: &str, tol: f64) -> CmdResult {
    let (a, b) = (read_grid(left)?, read_grid(right)?);
    let (fa, fb) = (a.derivative_field(), b.derivative_field());
    let verdict = match order {
        OrderArg::Lo => lo_compare(&a, &b, tol)?,
        OrderArg::Schur => schur_compare(&fa, &fb, tol)?,
    };
    let mut distances = serde_json::Map::new();
    for m in metrics.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let p = match m {
            "d1" => 1.0,
            "d2" => 2.0,
            other => {
                return Err(Failure::Invalid(format!(
                    "unknown metric '{other}' (use d1, d2)"
                )))
            }
        };
        distances.insert(m.to_string(), json!(round12(dp_distance(&fa, &fb, p)?)));
    }
    let witness = verdict
        .witness
        .map(|w| json!({ "index": [w.index.0, w.index.1], "magnitude": round12(w.magnitude) }));
    print_json(&json!({
        "order": match order { OrderArg::Lo => "lo", OrderArg::Schur => "schur" },
        "relation": verdict.relation,
        "witness": witness,
        "distances": distances,
    }))?;
    Ok(())
}

fn cmd_verify(n: usize, seed: u64, as_json: bool) -> CmdResult {
    let mut report = suite::run_suite(n, seed)?;
    for c in &mut report.checks {
        c.observed = round12(c.observed);
        c.bound = round12(c.bound);
    }
    if as_json {
        print_json(&serde_json::to_value(&report).expect("report serializes"))?;
    } else {
        let mut text = String::new();
        for c in &report.checks {
            let status = if c.status == copgrid::CheckStatus::Pass {
                "PASS"
            } else {
                "FAIL"
            };
            text += &format!(
                "{status}  {:<44} {:<42} {:>14} {:>14}\n",
                c.name,
                c.anchor,
                format_number(c.observed),
                format_number(c.bound)
            );
        }
        text += &format!(
            "{} checks, {} failed, n = {}, seed = {}, {} ms\n",
            report.checks.len(),
            report
                .checks
                .iter()
                .filter(|c| c.status != copgrid::CheckStatus::Pass)
                .count(),
            report.grid_n,
            report.seed,
            report.elapsed_ms
        );
        emit(&text)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Gen { family, n, out } => cmd_gen(&family, n, &out),
        Command::Estimate {
            samples,
            exponent,
            pseudo,
            out,
        } => cmd_estimate(&samples, exponent, pseudo, &out),
        Command::Sample {
            grid,
            count,
            seed,
            out,
        } => cmd_sample(&grid, count, seed, &out),
        Command::Transform {
            grid,
            op,
            out,
            heatmap,
        } => cmd_transform(&grid, op, &out, heatmap.as_deref()),
        Command::Product {
            left,
            right,
            kind,
            out,
        } => cmd_product(&left, &right, kind, &out),
        Command::Measure { grid, which, json } => cmd_measure(&grid, &which, json),
        Command::Compare {
            left,
            right,
            order,
            metrics,
            tol,
        } => cmd_compare(&left, &right, order, &metrics, tol),
        Command::Verify { n, seed, json } => cmd_verify(n, seed, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => ExitCode::from(3),
    }
}
