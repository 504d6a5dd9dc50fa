//! Seeded property runs over random instances.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::generate::{random_hermitian, random_unital_family, rng_from_seed, trial_seed};
use crate::error::{Error, Result};
use crate::funcat::{ScalarFunction, SpectralBounds};
use crate::linalg::HermitianOperator;
use crate::mercer::{evaluate_chain, ChainKind, EvalOptions, InequalityReport, MercerInstance};
use crate::posmap::MapFamily;
use crate::quasi::{compare_means_report, predicted_order, th3_report, th4_sandwich, QuasiArithmeticSpec, Th3Side};

/// Every `BOUNDARY_PERIOD`-th trial pins eigenvalues at `m` and `M`.
pub const BOUNDARY_PERIOD: u64 = 10;

/// Inclusive integer range, written `4` or `2-8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimRange {
    pub lo: usize,
    pub hi: usize,
}

impl DimRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::InvalidParameter(format!("bad range {lo}-{hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn fixed(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        rng.random_range(self.lo..=self.hi)
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}-{}", self.lo, self.hi)
        }
    }
}

impl FromStr for DimRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad range {s:?}")))
        };
        match s.split_once('-') {
            Some((a, b)) => Self::new(parse(a)?, parse(b)?),
            None => Self::fixed(parse(s)?),
        }
    }
}

/// How random instances are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InstanceShape {
    pub seed: u64,
    pub dim_h: DimRange,
    /// `None` draws `dim_k = dim_h`.
    pub dim_k: Option<DimRange>,
    pub n_maps: DimRange,
    pub bounds: SpectralBounds,
    pub mixed: bool,
}

impl InstanceShape {
    pub fn new(seed: u64, dim_h: DimRange, n_maps: DimRange, bounds: SpectralBounds) -> Self {
        Self {
            seed,
            dim_h,
            dim_k: None,
            n_maps,
            bounds,
            mixed: false,
        }
    }

    pub fn sample(&self, trial: u64) -> Result<SampledInstance> {
        let seed = trial_seed(self.seed, trial);
        let mut rng = rng_from_seed(seed);
        let dim_h = self.dim_h.sample(&mut rng);
        let dim_k = self.dim_k.map_or(dim_h, |r| r.sample(&mut rng));
        let n = self.n_maps.sample(&mut rng);
        let family = random_unital_family(n, dim_h, dim_k, &mut rng, self.mixed)?;
        let boundary = trial.is_multiple_of(BOUNDARY_PERIOD);
        let operators = (0..n)
            .map(|_| random_hermitian(dim_h, &self.bounds, &mut rng, boundary))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledInstance {
            trial,
            seed,
            family,
            operators,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SampledInstance {
    pub trial: u64,
    pub seed: u64,
    pub family: MapFamily,
    pub operators: Vec<HermitianOperator>,
}

#[derive(Clone, Debug)]
pub struct TrialConfig {
    pub shape: InstanceShape,
    pub function: ScalarFunction,
    pub chain: ChainKind,
    pub tol: Option<f64>,
    pub force: bool,
}

impl TrialConfig {
    pub fn new(shape: InstanceShape, function: ScalarFunction, chain: ChainKind) -> Self {
        Self {
            shape,
            function,
            chain,
            tol: None,
            force: false,
        }
    }

    fn options(&self) -> EvalOptions {
        EvalOptions {
            force: self.force,
            tol: self.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub trial: u64,
    pub seed: u64,
    pub check: String,
    pub pair: [String; 2],
    pub gap: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub seed: u64,
    pub dim_h: usize,
    pub dim_k: usize,
    pub n_maps: usize,
    pub checks: usize,
    pub min_gap: f64,
    pub violations: Vec<Violation>,
    pub skipped: Vec<String>,
}

impl TrialOutcome {
    fn new(inst: &SampledInstance) -> Self {
        Self {
            trial: inst.trial,
            seed: inst.seed,
            dim_h: inst.family.dim_in(),
            dim_k: inst.family.dim_out(),
            n_maps: inst.family.len(),
            checks: 0,
            min_gap: f64::INFINITY,
            violations: Vec::new(),
            skipped: Vec::new(),
        }
    }

    fn absorb(&mut self, report: &InequalityReport) {
        for v in &report.verdicts {
            self.checks += 1;
            self.min_gap = self.min_gap.min(v.gap());
            if !v.holds() {
                self.violations.push(Violation {
                    trial: self.trial,
                    seed: self.seed,
                    check: report.chain.clone(),
                    pair: v.pair.clone(),
                    gap: v.gap(),
                    tolerance: v.verdict.tolerance,
                });
            }
        }
    }
}

/// One CSV line per trial.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub label: String,
    pub dim_h: usize,
    pub dim_k: usize,
    pub n_maps: usize,
    pub checks: usize,
    pub min_gap: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub master_seed: u64,
    pub trials: u64,
    pub checks: usize,
    pub min_gap_overall: f64,
    pub violations: Vec<Violation>,
    pub skipped: usize,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunSummary {
    fn assemble(label: String, master_seed: u64, outcomes: Vec<TrialOutcome>, wall_time: Duration) -> Self {
        let rows = outcomes
            .iter()
            .map(|o| TrialRow {
                trial: o.trial,
                seed: o.seed,
                label: label.clone(),
                dim_h: o.dim_h,
                dim_k: o.dim_k,
                n_maps: o.n_maps,
                checks: o.checks,
                min_gap: o.min_gap,
                violations: o.violations.len(),
            })
            .collect();
        Self {
            trials: outcomes.len() as u64,
            checks: outcomes.iter().map(|o| o.checks).sum(),
            min_gap_overall: outcomes.iter().map(|o| o.min_gap).fold(f64::INFINITY, f64::min),
            skipped: outcomes.iter().map(|o| o.skipped.len()).sum(),
            violations: outcomes.into_iter().flat_map(|o| o.violations).collect(),
            label,
            master_seed,
            rows,
            wall_time,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

fn run_parallel<F>(n_trials: u64, trial: F) -> Result<(Vec<TrialOutcome>, Duration)>
where
    F: Fn(u64) -> Result<TrialOutcome> + Sync + Send,
{
    let start = Instant::now();
    // indexed collect keeps trial order regardless of scheduling
    let outcomes = (0..n_trials).into_par_iter().map(trial).collect::<Result<Vec<_>>>()?;
    Ok((outcomes, start.elapsed()))
}

fn mercer_label(config: &TrialConfig) -> String {
    format!(
        "{} {} dim={} maps={} [{}, {}]",
        config.chain.as_str(),
        config.function,
        config.shape.dim_h,
        config.shape.n_maps,
        config.shape.bounds.m(),
        config.shape.bounds.big_m()
    )
}

pub fn run_trial(config: &TrialConfig, trial: u64) -> Result<(TrialOutcome, InequalityReport)> {
    let inst = config.shape.sample(trial)?;
    let mut outcome = TrialOutcome::new(&inst);
    let mercer = MercerInstance::new(
        config.function.clone(),
        inst.family,
        inst.operators,
        config.shape.bounds,
    )?;
    let report = evaluate_chain(&mercer, config.chain, &config.options())?;
    outcome.absorb(&report);
    Ok((outcome, report))
}

pub fn run_suite(config: &TrialConfig, n_trials: u64) -> Result<RunSummary> {
    let (outcomes, wall) = run_parallel(n_trials, |i| run_trial(config, i).map(|(o, _)| o))?;
    Ok(RunSummary::assemble(
        mercer_label(config),
        config.shape.seed,
        outcomes,
        wall,
    ))
}

/// Re-executes the trial behind `v` and returns the recomputed gap.
pub fn replay_violation(config: &TrialConfig, v: &Violation) -> Result<f64> {
    let (_, report) = run_trial(config, v.trial)?;
    report
        .verdict(&v.pair[0], &v.pair[1])
        .map(|p| p.gap())
        .ok_or_else(|| Error::InvalidParameter(format!("pair {:?} not in replayed report", v.pair)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuasiCheck {
    Order,
    Th3Alpha,
    Th3Beta,
    Th4,
}

impl QuasiCheck {
    pub const ALL: [QuasiCheck; 4] = [
        QuasiCheck::Order,
        QuasiCheck::Th3Alpha,
        QuasiCheck::Th3Beta,
        QuasiCheck::Th4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuasiCheck::Order => "order",
            QuasiCheck::Th3Alpha => "th3-alpha",
            QuasiCheck::Th3Beta => "th3-beta",
            QuasiCheck::Th4 => "th4",
        }
    }
}

impl FromStr for QuasiCheck {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct QuasiConfig {
    pub shape: InstanceShape,
    pub phi: ScalarFunction,
    pub psi: ScalarFunction,
    /// Empty selects every check whose hypotheses hold for `(φ, ψ)`.
    pub checks: Vec<QuasiCheck>,
}

fn applicable(spec: &QuasiArithmeticSpec, check: QuasiCheck) -> Result<()> {
    use crate::funcat::OperatorMonotonicity::*;
    match check {
        QuasiCheck::Order => predicted_order(spec).map(|_| ()),
        QuasiCheck::Th3Alpha | QuasiCheck::Th3Beta if spec.psi_inverse_monotonicity() == Neither => Err(
            Error::HypothesisNotMet(format!("psi^-1 for psi={} is not operator monotone", spec.psi())),
        ),
        QuasiCheck::Th4 if !(spec.composite_log_convex() && spec.psi_inverse_monotonicity() == Increasing) => {
            Err(Error::HypothesisNotMet(format!(
                "th4 needs log-convex psi o phi^-1 and operator increasing psi^-1 (phi={}, psi={})",
                spec.phi(),
                spec.psi()
            )))
        }
        _ => Ok(()),
    }
}

/// Resolves the spec and the checks a run will execute.
pub fn resolve_quasi(config: &QuasiConfig) -> Result<(QuasiArithmeticSpec, Vec<QuasiCheck>)> {
    let spec = QuasiArithmeticSpec::new(config.phi.clone(), config.psi.clone(), config.shape.bounds)?;
    let checks = if config.checks.is_empty() {
        QuasiCheck::ALL
            .into_iter()
            .filter(|c| applicable(&spec, *c).is_ok())
            .collect()
    } else {
        for c in &config.checks {
            applicable(&spec, *c)?;
        }
        config.checks.clone()
    };
    if checks.is_empty() {
        return Err(Error::HypothesisNotMet(format!(
            "no quasi-mean check applies to phi={}, psi={}",
            config.phi, config.psi
        )));
    }
    Ok((spec, checks))
}

pub fn run_quasi_trial(
    spec: &QuasiArithmeticSpec,
    checks: &[QuasiCheck],
    shape: &InstanceShape,
    trial: u64,
) -> Result<(TrialOutcome, Vec<InequalityReport>)> {
    let inst = shape.sample(trial)?;
    let mut outcome = TrialOutcome::new(&inst);
    let mut reports = Vec::with_capacity(checks.len());
    for &check in checks {
        let (fam, ops) = (&inst.family, &inst.operators);
        let report = match check {
            QuasiCheck::Order => compare_means_report(spec, fam, ops),
            QuasiCheck::Th3Alpha => th3_report(spec, fam, ops, Th3Side::AlphaLowerRefined),
            QuasiCheck::Th3Beta => th3_report(spec, fam, ops, Th3Side::BetaReversed),
            QuasiCheck::Th4 => th4_sandwich(spec, fam, ops).map(|(_, r)| r),
        };
        match report {
            Ok(r) => {
                outcome.absorb(&r);
                reports.push(r);
            }
            // the shifted argument can leave the domain of psi^-1
            Err(e @ Error::InverseDomainError { .. }) => outcome.skipped.push(format!("{}: {e}", check.as_str())),
            Err(e) => return Err(e),
        }
    }
    Ok((outcome, reports))
}

pub fn run_quasi_suite(config: &QuasiConfig, n_trials: u64) -> Result<RunSummary> {
    let (spec, checks) = resolve_quasi(config)?;
    let (outcomes, wall) = run_parallel(n_trials, |i| {
        run_quasi_trial(&spec, &checks, &config.shape, i).map(|(o, _)| o)
    })?;
    let names: Vec<&str> = checks.iter().map(|c| c.as_str()).collect();
    let label = format!(
        "phi={} psi={} checks={} dim={} maps={} [{}, {}]",
        config.phi,
        config.psi,
        names.join(","),
        config.shape.dim_h,
        config.shape.n_maps,
        config.shape.bounds.m(),
        config.shape.bounds.big_m()
    );
    Ok(RunSummary::assemble(label, config.shape.seed, outcomes, wall))
}
