//! `mercer-lab`: run, reproduce and search operator Jensen-Mercer inequalities.
//!
//! Exit codes: 0 clean, 1 usage or configuration error, 2 violations found.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use mercer_core::harness::search::{search_classic_nonconvex, search_th3_th4_order, SearchTarget};
use mercer_core::harness::{
    reproduce, run_quasi_suite, run_suite, Case, DimRange, InstanceShape, QuasiCheck, QuasiConfig, RunSummary,
    TrialConfig,
};
use mercer_core::linalg::MatrixJson;
use mercer_core::mercer::{evaluate_chain, ChainKind, EvalOptions, MercerInstance};
use mercer_core::posmap::MapSpec;
use mercer_core::quasi::incomparability_probe;
use mercer_core::{Error, HermitianOperator, MapFamily, ScalarFunction, SpectralBounds};

#[derive(Parser)]
#[command(
    name = "mercer-lab",
    version,
    about = "Numerical checks of operator Jensen-Mercer inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded property suite for one function and inequality chain.
    Verify(VerifyArgs),
    /// Recompute a worked example.
    Reproduce {
        /// example-2.2 or example-3.5
        case: Case,
        /// Replace the function of example-2.2 (e.g. pow:p=2).
        #[arg(long)]
        function: Option<ScalarFunction>,
    },
    /// Search for counterexamples.
    Search(SearchArgs),
    /// Run the quasi-arithmetic mean checks for a pair (phi, psi).
    Sweep(SweepArgs),
    /// Tabulate the difference of the two refined bounds for t^p as CSV.
    Probe {
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long = "M", default_value_t = 3.0)]
        big_m: f64,
        #[arg(long = "p", value_delimiter = ',', allow_negative_numbers = true, default_values_t = [-0.2, -1.0])]
        p: Vec<f64>,
        /// Points in t; defaults to 11 evenly spaced points on [m, M].
        #[arg(long = "t", value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Evaluate one chain on an instance read from a JSON file.
    Evaluate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "classic")]
        chain: ChainKind,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Args)]
struct ShapeArgs {
    /// Dimension of H, a number or a range such as 2-8.
    #[arg(long, default_value = "2-8")]
    dim: DimRange,
    /// Dimension of K; defaults to the dimension of H.
    #[arg(long)]
    dim_k: Option<DimRange>,
    /// Number of maps, a number or a range.
    #[arg(long, default_value = "1-4")]
    maps: DimRange,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    m: f64,
    #[arg(long = "M", default_value_t = 3.0, allow_negative_numbers = true)]
    big_m: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Include trace and pinching maps in each family.
    #[arg(long)]
    mixed: bool,
    /// Write one summary row per trial to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl ShapeArgs {
    fn shape(&self) -> Result<InstanceShape, Error> {
        Ok(InstanceShape {
            dim_k: self.dim_k,
            mixed: self.mixed,
            ..InstanceShape::new(self.seed, self.dim, self.maps, SpectralBounds::new(self.m, self.big_m)?)
        })
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "exp")]
    function: ScalarFunction,
    #[arg(long, default_value = "classic")]
    chain: ChainKind,
    #[command(flatten)]
    shape: ShapeArgs,
    /// Absolute Loewner tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Evaluate even if the function does not meet the chain's hypothesis.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    phi: ScalarFunction,
    #[arg(long)]
    psi: ScalarFunction,
    /// Comma-separated subset of order, th3-alpha, th3-beta, th4.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<QuasiCheck>,
    #[command(flatten)]
    shape: ShapeArgs,
}

#[derive(Args)]
struct SearchArgs {
    /// classic-nonconvex or th3-th4-order
    target: SearchTarget,
    #[arg(long, default_value_t = 100)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Candidate function for classic-nonconvex (repeatable).
    #[arg(long)]
    function: Vec<ScalarFunction>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
    #[arg(long = "M", allow_negative_numbers = true)]
    big_m: Option<f64>,
}

#[derive(Deserialize)]
struct InstanceFile {
    /// Function spec string such as `exp` or `pow:p=2`.
    function: String,
    m: f64,
    #[serde(rename = "M")]
    big_m: f64,
    maps: Vec<MapSpec>,
    operators: Vec<MatrixJson>,
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
enum SearchOutput<T> {
    Found {
        target: SearchTarget,
        witness: T,
    },
    Exhausted {
        target: SearchTarget,
        budget: usize,
        best_gap: f64,
    },
}

#[derive(Serialize)]
struct ProbeCsvRow {
    t: f64,
    p: f64,
    g: f64,
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("output serializes"));
}

fn write_rows(path: &Path, summary: &RunSummary) -> Result<(), Error> {
    let io = |e: csv::Error| Error::Parse(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for row in &summary.rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn finish_summary(summary: RunSummary, csv: Option<&Path>) -> Result<ExitCode, Error> {
    if let Some(path) = csv {
        write_rows(path, &summary)?;
    }
    eprintln!(
        "{} trials, {} checks, {} violations in {:.3}s",
        summary.trials,
        summary.checks,
        summary.violations.len(),
        summary.wall_time.as_secs_f64()
    );
    println!("{}", summary.to_json());
    Ok(if summary.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn search_output<T: Serialize>(target: SearchTarget, outcome: Result<T, Error>) -> Result<ExitCode, Error> {
    match outcome {
        Ok(witness) => print_json(&SearchOutput::Found { target, witness }),
        Err(Error::BudgetExhausted { budget, best_gap }) => print_json(&SearchOutput::<()>::Exhausted {
            target,
            budget,
            best_gap,
        }),
        Err(e) => return Err(e),
    }
    Ok(ExitCode::SUCCESS)
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Verify(a) => {
            let config = TrialConfig {
                tol: a.tol,
                force: a.force,
                ..TrialConfig::new(a.shape.shape()?, a.function, a.chain)
            };
            finish_summary(run_suite(&config, a.shape.trials)?, a.shape.csv.as_deref())
        }
        Command::Sweep(a) => {
            let config = QuasiConfig {
                shape: a.shape.shape()?,
                phi: a.phi,
                psi: a.psi,
                checks: a.checks,
            };
            finish_summary(run_quasi_suite(&config, a.shape.trials)?, a.shape.csv.as_deref())
        }
        Command::Reproduce { case, function } => {
            println!("{}", reproduce(case, function)?.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Search(a) => match a.target {
            SearchTarget::ClassicNonconvex => {
                let bounds = match (a.m, a.big_m) {
                    (None, None) => None,
                    (m, big_m) => Some(SpectralBounds::new(
                        m.ok_or_else(|| Error::InvalidParameter("--m needs --M".into()))?,
                        big_m.ok_or_else(|| Error::InvalidParameter("--M needs --m".into()))?,
                    )?),
                };
                let functions = (!a.function.is_empty()).then_some(a.function);
                search_output(a.target, search_classic_nonconvex(functions, bounds, a.budget, a.seed))
            }
            SearchTarget::Th3Th4Order => {
                let (m, big_m) = (a.m.unwrap_or(1.0), a.big_m.unwrap_or(3.0));
                search_output(a.target, search_th3_th4_order(m, big_m, a.budget, a.seed))
            }
        },
        Command::Probe { m, big_m, p, t } => {
            let t = if t.is_empty() {
                (0..=10).map(|i| m + (big_m - m) * i as f64 / 10.0).collect()
            } else {
                t
            };
            let table = incomparability_probe(m, big_m, &p, &t)?;
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for r in &table.rows {
                w.serialize(ProbeCsvRow { t: r.t, p: r.p, g: r.g })
                    .map_err(|e| Error::Parse(e.to_string()))?;
            }
            w.flush().map_err(|e| Error::Parse(e.to_string()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Evaluate {
            instance,
            chain,
            tol,
            force,
        } => {
            let text =
                fs::read_to_string(&instance).map_err(|e| Error::Parse(format!("{}: {e}", instance.display())))?;
            let file: InstanceFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            let operators = file
                .operators
                .iter()
                .map(HermitianOperator::try_from)
                .collect::<Result<Vec<_>, _>>()?;
            let dim = operators.first().map(HermitianOperator::dim);
            let family = MapFamily::from_specs(&file.maps, dim)?;
            let bounds = SpectralBounds::new(file.m, file.big_m)?;
            let inst = MercerInstance::new(file.function.parse()?, family, operators, bounds)?;
            let report = evaluate_chain(&inst, chain, &EvalOptions { force, tol })?;
            print_json(&report);
            Ok(if report.all_hold() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
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
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
