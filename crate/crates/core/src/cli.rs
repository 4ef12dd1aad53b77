//! Command-line front end. Exit codes: 0 pass, 1 check failure, 2 usage, 3 numerical abort.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::adn::run_adn;
use crate::flatbvp::verify::{harmonic_vector_suite, kernel_suite, solve_suite};
use crate::flatbvp::{BoundaryData, FlatError};
use crate::geometry::verify::{run_geometry, GeometryConfig};
use crate::geometry::GeoError;
use crate::report::{Check, Report};
use crate::symbols::{compute_artifacts, run_symbols_suite, write_golden, GoldenSource};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bartnik",
    version,
    about = "Verification suites and solves for the stationary Bartnik boundary problem"
)]
pub struct Cli {
    /// Directory for report JSON and CSV output.
    #[arg(long, global = true, default_value = "reports")]
    pub out: PathBuf,
    /// Seed for every random draw; recorded in the report.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Suppress per-check lines.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact symbol computations against golden files.
    #[command(subcommand)]
    Symbols(SymbolsCmd),
    /// Numeric ellipticity and complementing sweeps.
    #[command(subcommand)]
    Adn(AdnCmd),
    /// Identity battery on a stationary fixture.
    #[command(subcommand)]
    Geometry(GeometryCmd),
    /// Linearized problem at the flat exterior.
    #[command(subcommand)]
    Flatbvp(FlatCmd),
}

#[derive(Debug, Subcommand)]
pub enum SymbolsCmd {
    /// Run the symbolic suite and the sampled complementing checks.
    Verify {
        /// Read golden files from this directory instead of the embedded copies.
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        /// Write the complementing certificates to text files in the output directory.
        #[arg(long)]
        emit_certificates: bool,
        /// Samples in the numeric sweep.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Recompute the golden files and write them to a directory.
    RegenerateGolden {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum AdnCmd {
    Check {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeometryCmd {
    Verify {
        /// `minkowski`, `schwarzschild[:m]` or `kerr[:m,a]`.
        #[arg(long)]
        fixture: String,
        #[arg(long, default_value_t = 20)]
        probes: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum FlatCmd {
    /// Homogeneous problem at one or more truncations.
    Kernel {
        /// Truncation degree; repeat for a stability comparison.
        #[arg(long, required = true, num_args = 1..)]
        lmax: Vec<usize>,
    },
    /// Dirichlet and Neumann problems for harmonic vectors.
    HarmonicVectors {
        #[arg(long, default_value_t = 6)]
        lmax: usize,
    },
    /// Solve for boundary data read from a JSON file.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub lmax: usize,
    /// Truncation of the stability comparison solve.
    #[arg(long)]
    pub check_lmax: Option<usize>,
    /// Write radial profiles to profiles.csv.
    #[arg(long)]
    pub csv: bool,
}

/// Outcome of a command before it is written out.
struct Run {
    name: &'static str,
    config: Value,
    checks: Vec<Check>,
    results: Option<Value>,
    files: Vec<(String, String)>,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl From<FlatError> for Failure {
    fn from(e: FlatError) -> Self {
        match e {
            FlatError::InvalidData(_) | FlatError::Truncation(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        match e {
            GeoError::UnknownFixture(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn symbols_verify(seed: u64, golden_dir: &Option<PathBuf>, emit: bool, samples: usize) -> Run {
    let src = golden_dir.clone().map(GoldenSource::Dir).unwrap_or_default();
    let sym = run_symbols_suite(&src);
    let adn = run_adn(seed, samples);
    let mut files = Vec::new();
    if emit {
        if let Some(c) = &sym.certificate {
            files.push(("certificate.txt".into(), format!("{c}\n")));
        }
        if let Some(c) = &sym.homotopy_certificate {
            files.push(("homotopy_certificate.txt".into(), format!("{c}\n")));
        }
    }
    let mut checks = sym.checks;
    checks.extend(adn.checks);
    Run {
        name: "symbols",
        config: json!({
            "command": "symbols verify",
            "seed": seed,
            "samples": samples,
            "golden": golden_dir.as_ref().map_or("embedded".to_string(), |d| d.display().to_string()),
        }),
        checks,
        results: Some(to_value(&adn.summaries)),
        files,
    }
}

fn geometry_verify(seed: u64, fixture: &str, probes: usize) -> Result<Run, Failure> {
    let name = fixture.parse().map_err(Failure::from)?;
    let mut cfg = GeometryConfig::new(name, seed);
    cfg.probes = probes;
    let out = run_geometry(&cfg)?;
    Ok(Run {
        name: "geometry",
        config: json!({"command": "geometry verify", "run": to_value(&cfg)}),
        checks: out.checks.clone(),
        results: None,
        files: vec![("convergence.csv".into(), out.convergence_csv())],
    })
}

fn flat_solve(seed: u64, a: &SolveArgs) -> Result<Run, Failure> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| Failure::Usage(format!("{}: {e}", a.input.display())))?;
    let data = BoundaryData::from_json(&text)?;
    let check_lmax = a.check_lmax.unwrap_or(a.lmax + 2);
    let out = solve_suite(&data, a.lmax, check_lmax, seed)?;
    let mut files = vec![(
        "solution.json".into(),
        serde_json::to_string_pretty(&out.solution.to_json()).expect("serializable"),
    )];
    if a.csv {
        files.push(("profiles.csv".into(), out.profiles.clone()));
    }
    Ok(Run {
        name: "flatbvp_solve",
        config: json!({
            "command": "flatbvp solve",
            "seed": seed,
            "input": a.input.display().to_string(),
            "lmax": a.lmax,
            "check_lmax": check_lmax,
        }),
        checks: out.checks,
        results: Some(to_value(&out.report)),
        files,
    })
}

fn execute(cli: &Cli) -> Result<Run, Failure> {
    let seed = cli.seed;
    match &cli.command {
        Command::Symbols(SymbolsCmd::Verify {
            golden_dir,
            emit_certificates,
            samples,
        }) => Ok(symbols_verify(seed, golden_dir, *emit_certificates, *samples)),
        Command::Symbols(SymbolsCmd::RegenerateGolden { dir }) => {
            write_golden(dir, &compute_artifacts()).map_err(|e| Failure::Io(e.to_string()))?;
            Ok(Run {
                name: "golden",
                config: json!({"command": "symbols regenerate-golden", "dir": dir.display().to_string()}),
                checks: Vec::new(),
                results: None,
                files: Vec::new(),
            })
        }
        Command::Adn(AdnCmd::Check { samples }) => {
            let out = run_adn(seed, *samples);
            Ok(Run {
                name: "adn",
                config: json!({"command": "adn check", "seed": seed, "samples": samples}),
                checks: out.checks,
                results: Some(to_value(&out.summaries)),
                files: Vec::new(),
            })
        }
        Command::Geometry(GeometryCmd::Verify { fixture, probes }) => geometry_verify(seed, fixture, *probes),
        Command::Flatbvp(FlatCmd::Kernel { lmax }) => {
            if let Some(l) = lmax.iter().find(|l| **l < 2) {
                return Err(Failure::Usage(format!("lmax {l} is below 2")));
            }
            let out = kernel_suite(lmax, seed)?;
            Ok(Run {
                name: "flatbvp_kernel",
                config: json!({"command": "flatbvp kernel", "seed": seed, "lmax": lmax}),
                checks: out.checks,
                results: Some(to_value(&out.reports)),
                files: Vec::new(),
            })
        }
        Command::Flatbvp(FlatCmd::HarmonicVectors { lmax }) => Ok(Run {
            name: "flatbvp_harmonic_vectors",
            config: json!({"command": "flatbvp harmonic-vectors", "lmax": lmax}),
            checks: harmonic_vector_suite(*lmax)?,
            results: None,
            files: Vec::new(),
        }),
        Command::Flatbvp(FlatCmd::Solve(a)) => flat_solve(seed, a),
    }
}

fn write_outputs(dir: &Path, run: &Run, report: &Report) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}_report.json", run.name));
    std::fs::write(&path, report.to_json() + "\n")?;
    for (name, body) in &run.files {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(path)
}

fn check_line(c: &Check) -> String {
    let status = if c.passed() { "PASS" } else { "FAIL" };
    match (c.max_error, c.tolerance) {
        (Some(e), Some(t)) => format!("{status} {} [{:.3e} < {:.1e}]", c.name, e, t),
        _ => format!("{status} {}", c.name),
    }
}

/// Run the parsed command, print a summary and return the exit code.
pub fn run(cli: &Cli) -> i32 {
    let run = match execute(cli) {
        Ok(r) => r,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical abort: {m}");
            return EXIT_NUMERICAL;
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            return EXIT_CHECK_FAILED;
        }
    };
    let mut report = Report::new(run.config.clone(), run.checks.clone());
    if let Some(r) = &run.results {
        report = report.with_results(r.clone());
    }
    if !cli.quiet {
        for c in &report.checks {
            println!("{}", check_line(c));
        }
    }
    match write_outputs(&cli.out, &run, &report) {
        Ok(path) => println!("report: {}", path.display()),
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            return EXIT_CHECK_FAILED;
        }
    }
    match report.first_failure() {
        None => {
            println!("{} checks passed", report.checks.len());
            EXIT_PASS
        }
        Some(c) => {
            let failed = report.checks.iter().filter(|c| !c.passed()).count();
            eprintln!("{failed} of {} checks failed; first: {}", report.checks.len(), c.name);
            if let Some(d) = &c.detail {
                eprintln!("  {d}");
            }
            EXIT_CHECK_FAILED
        }
    }
}

/// Parse process arguments and run; clap usage errors exit with code 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_tree_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_fixture_is_a_usage_error() {
        let dir = std::env::temp_dir().join("bartnik-cli-unit");
        let code = main_with_args([
            "bartnik",
            "--out",
            dir.to_str().unwrap(),
            "geometry",
            "verify",
            "--fixture",
            "anti-de-sitter",
        ]);
        assert_eq!(code, EXIT_USAGE);
        let err = Cli::try_parse_from(["bartnik", "flatbvp", "nonsense"]).unwrap_err();
        assert!(err.use_stderr());
    }

    #[test]
    fn check_lines() {
        assert_eq!(check_line(&Check::exact("a", "b", true)), "PASS a");
        assert!(check_line(&Check::within("c", "d", 2.0, 1.0)).starts_with("FAIL c [2.000e0"));
    }
}
