//! Operator Jensen–Mercer inequality and its refinements.
//!
//! For a unital family `Φ_i`, operators `A_i` with spectra in `[m, M]` and
//! `S = Σ Φ_i(A_i)`, this module evaluates as concrete operators:
//!
//! * `f((M+m)I − S)` and `(f(M)+f(m))I − Σ Φ_i(f(A_i))`;
//! * the affine middle term `L₀(S)` of the classical chain;
//! * the curvature correction `D = (M+m)S − Mm·I − ½(S² + Σ Φ_i(A_i²))` and
//!   the two-sided bounds `rhs − β·D ⪯ lhs ⪯ rhs − α·D` for `α ≤ f″ ≤ β`;
//! * the geometric middle term for log-convex `f`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::funcat::{
    convexity_on, curvature_bounds, is_log_convex_on, CurvatureBounds, ScalarFunction, SpectralBounds,
};
use crate::linalg::{
    apply_clamped, apply_scalar_function, default_tolerance, loewner_compare, spectrum_range, HermitianOperator,
    MatrixJson, OrderVerdict,
};
use crate::posmap::{family_sum, family_sum_with, unitality_defect, MapFamily};

/// Largest accepted `‖Σ Φ_i(I) − I‖₂` for an instance.
pub const UNITAL_TOL: f64 = 1e-9;

/// Hypotheses of the operator Mercer inequality: `f`, a unital family, and
/// operators with spectra in `[m, M]`.
#[derive(Clone, Debug)]
pub struct MercerInstance {
    f: ScalarFunction,
    family: MapFamily,
    operators: Vec<HermitianOperator>,
    bounds: SpectralBounds,
    sum: HermitianOperator,
}

/// Checks `σ(A) ⊆ [m, M]` up to the clamp tolerance.
pub(crate) fn check_spectrum(a: &HermitianOperator, bounds: &SpectralBounds) -> Result<()> {
    let (lo, hi) = spectrum_range(a)?;
    let tol = bounds.clamp_tol();
    for eigenvalue in [lo, hi] {
        if eigenvalue < bounds.m() - tol || eigenvalue > bounds.big_m() + tol {
            return Err(Error::SpectrumOutOfDomain {
                eigenvalue,
                m: bounds.m(),
                big_m: bounds.big_m(),
            });
        }
    }
    Ok(())
}

pub(crate) fn check_unital(family: &MapFamily) -> Result<()> {
    let defect = unitality_defect(family);
    if defect > UNITAL_TOL {
        return Err(Error::NotUnital { defect });
    }
    Ok(())
}

impl MercerInstance {
    pub fn new(
        f: ScalarFunction,
        family: MapFamily,
        operators: Vec<HermitianOperator>,
        bounds: SpectralBounds,
    ) -> Result<Self> {
        if operators.len() != family.len() {
            return Err(Error::ArityMismatch {
                expected: family.len(),
                found: operators.len(),
            });
        }
        for a in &operators {
            if a.dim() != family.dim_in() {
                return Err(Error::DimensionMismatch {
                    expected: family.dim_in(),
                    found: a.dim(),
                });
            }
            check_spectrum(a, &bounds)?;
        }
        check_unital(&family)?;
        let sum = family_sum(&family, &operators)?;
        Ok(Self {
            f,
            family,
            operators,
            bounds,
            sum,
        })
    }

    /// Same operators and maps, different function.
    pub fn with_function(&self, f: ScalarFunction) -> Self {
        Self { f, ..self.clone() }
    }

    pub fn function(&self) -> &ScalarFunction {
        &self.f
    }

    pub fn family(&self) -> &MapFamily {
        &self.family
    }

    pub fn operators(&self) -> &[HermitianOperator] {
        &self.operators
    }

    pub fn bounds(&self) -> &SpectralBounds {
        &self.bounds
    }

    /// `S = Σ Φ_i(A_i)`.
    pub fn sum(&self) -> &HermitianOperator {
        &self.sum
    }

    fn dim_out(&self) -> usize {
        self.family.dim_out()
    }

    fn endpoint_values(&self) -> Result<(f64, f64)> {
        Ok((self.f.try_eval(self.bounds.m())?, self.f.try_eval(self.bounds.big_m())?))
    }
}

fn check_in_interval(t: f64, bounds: &SpectralBounds) -> Result<f64> {
    let tol = bounds.clamp_tol();
    if t < bounds.m() - tol || t > bounds.big_m() + tol || t.is_nan() {
        return Err(Error::OutOfInterval {
            t,
            m: bounds.m(),
            big_m: bounds.big_m(),
        });
    }
    Ok(bounds.clamp(t))
}

/// `L(t) = (M−t)/(M−m)·f(m) + (t−m)/(M−m)·f(M)`.
pub fn chord(t: f64, f: &ScalarFunction, bounds: &SpectralBounds) -> Result<f64> {
    let t = check_in_interval(t, bounds)?;
    let (m, big_m) = (bounds.m(), bounds.big_m());
    let w = bounds.width();
    Ok((big_m - t) / w * f.try_eval(m)? + (t - m) / w * f.try_eval(big_m)?)
}

/// `L₀(t) = L(M+m−t) = f(M) + f(m) − L(t)`.
pub fn chord_reflected(t: f64, f: &ScalarFunction, bounds: &SpectralBounds) -> Result<f64> {
    let l = chord(t, f, bounds)?;
    Ok(f.try_eval(bounds.m())? + f.try_eval(bounds.big_m())? - l)
}

/// Both sides of the scalar Mercer inequality
/// `f(M + m − Σ w_i x_i) ≤ f(M) + f(m) − Σ w_i f(x_i)`.
pub fn scalar_mercer_check(
    f: &ScalarFunction,
    weights: &[f64],
    xs: &[f64],
    bounds: &SpectralBounds,
) -> Result<(f64, f64)> {
    if weights.len() != xs.len() || weights.is_empty() {
        return Err(Error::BadWeights(format!(
            "{} weights for {} points",
            weights.len(),
            xs.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::BadWeights(format!("negative or non-finite weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    let xs = xs
        .iter()
        .map(|&x| check_in_interval(x, bounds))
        .collect::<Result<Vec<_>>>()?;
    let mean: f64 = weights.iter().zip(&xs).map(|(w, x)| w * x).sum();
    let mean_f = weights
        .iter()
        .zip(&xs)
        .map(|(w, &x)| Ok(w * f.try_eval(x)?))
        .sum::<Result<f64>>()?;
    let (m, big_m) = (bounds.m(), bounds.big_m());
    let lhs = f.try_eval(bounds.clamp(big_m + m - mean))?;
    let rhs = f.try_eval(big_m)? + f.try_eval(m)? - mean_f;
    Ok((lhs, rhs))
}

/// `f((M+m)I − S)`.
pub fn mercer_lhs(inst: &MercerInstance) -> Result<HermitianOperator> {
    let b = inst.bounds;
    let reflected = (-&inst.sum).shifted(b.m() + b.big_m());
    apply_scalar_function(&inst.f, &reflected, &b)
}

/// `(f(M)+f(m))I − Σ Φ_i(f(A_i))`.
pub fn mercer_rhs_classic(inst: &MercerInstance) -> Result<HermitianOperator> {
    let (fm, f_big) = inst.endpoint_values()?;
    let mapped = family_sum_with(&inst.family, &inst.operators, |a| {
        apply_scalar_function(&inst.f, a, &inst.bounds)
    })?;
    Ok((-&mapped).shifted(fm + f_big))
}

/// `(f(M)+f(m))I + (S − M·I)/(M−m)·f(m) + (m·I − S)/(M−m)·f(M)`, i.e. `L₀(S)`.
pub fn chain_middle(inst: &MercerInstance) -> Result<HermitianOperator> {
    let (fm, f_big) = inst.endpoint_values()?;
    let b = inst.bounds;
    let w = b.width();
    let slope = (fm - f_big) / w;
    let offset = fm + f_big - b.big_m() * fm / w + b.m() * f_big / w;
    Ok((&inst.sum * slope).shifted(offset))
}

/// `D = (M+m)S − Mm·I − ½(S² + Σ Φ_i(A_i²))`.
pub fn diamond_plain(inst: &MercerInstance) -> Result<HermitianOperator> {
    let b = inst.bounds;
    let squares = family_sum_with(&inst.family, &inst.operators, |a| Ok(a.square()))?;
    Ok(diamond_from_parts(&inst.sum, &squares, b.m(), b.big_m()))
}

/// `(a+b)T − ab·I − ½(T² + Q)`, shared by the plain and φ-transformed terms.
pub(crate) fn diamond_from_parts(t: &HermitianOperator, q: &HermitianOperator, a: f64, b: f64) -> HermitianOperator {
    let curvature = (&t.square() + q) * 0.5;
    (&(t * (a + b)) - &curvature).shifted(-a * b)
}

/// `(rhs − β·D, rhs − α·D)`.
pub fn refined_bounds(inst: &MercerInstance, curv: &CurvatureBounds) -> Result<(HermitianOperator, HermitianOperator)> {
    let rhs = mercer_rhs_classic(inst)?;
    let d = diamond_plain(inst)?;
    Ok((&rhs - &(&d * curv.beta), &rhs - &(&d * curv.alpha)))
}

/// `f(m)^{(S−m)/(M−m)} · f(M)^{(M−S)/(M−m)}`, evaluated as one functional
/// calculus in `S` (both exponents are functions of `S` and commute).
pub fn log_convex_middle(inst: &MercerInstance) -> Result<HermitianOperator> {
    let (fm, f_big) = inst.endpoint_values()?;
    let b = inst.bounds;
    for (t, v) in [(b.m(), fm), (b.big_m(), f_big)] {
        if !(v > 0.0) {
            return Err(Error::NonpositiveFunction {
                function: inst.f.to_string(),
                t,
            });
        }
    }
    let w = b.width();
    let (ln_m, ln_big) = (fm.ln(), f_big.ln());
    apply_clamped(&inst.sum, &b, |s| {
        Ok(((s - b.m()) / w * ln_m + (b.big_m() - s) / w * ln_big).exp())
    })
}

/// Which inequality chain to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChainKind {
    /// `lhs ⪯ rhs`.
    Classic,
    /// `lhs ⪯ L₀(S) ⪯ rhs`.
    Chain,
    /// `rhs − β·D ⪯ lhs ⪯ rhs − α·D`.
    TwiceDiff,
    /// `lhs ⪯ geometric middle ⪯ rhs`.
    LogConvex,
}

impl ChainKind {
    pub const ALL: [ChainKind; 4] = [
        ChainKind::Classic,
        ChainKind::Chain,
        ChainKind::TwiceDiff,
        ChainKind::LogConvex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChainKind::Classic => "classic",
            ChainKind::Chain => "chain",
            ChainKind::TwiceDiff => "twice-diff",
            ChainKind::LogConvex => "log-convex",
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChainKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "classic" => Ok(ChainKind::Classic),
            "chain" => Ok(ChainKind::Chain),
            "twice-diff" => Ok(ChainKind::TwiceDiff),
            "log-convex" => Ok(ChainKind::LogConvex),
            other => Err(Error::Parse(format!("unknown chain {other:?}"))),
        }
    }
}

impl Serialize for ChainKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EvalOptions {
    /// Evaluate even when the chain's hypothesis fails (counterexample runs).
    pub force: bool,
    /// Absolute Loewner tolerance; default scales with the operands' norms.
    pub tol: Option<f64>,
}

fn serialize_operator<S: Serializer>(op: &HermitianOperator, s: S) -> std::result::Result<S::Ok, S::Error> {
    MatrixJson::from(op).serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct Side {
    pub label: String,
    #[serde(serialize_with = "serialize_operator")]
    pub operator: HermitianOperator,
}

/// Verdict for `left ⪯ right`.
#[derive(Clone, Debug, Serialize)]
pub struct PairVerdict {
    pub pair: [String; 2],
    #[serde(flatten)]
    pub verdict: OrderVerdict,
}

impl PairVerdict {
    /// `λ_min(right − left)`; below `−tolerance` is a violation.
    pub fn gap(&self) -> f64 {
        self.verdict.gap_min_eigenvalue
    }

    pub fn holds(&self) -> bool {
        self.verdict.relation.is_le()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    pub met: bool,
    pub detail: String,
}

/// Evaluated sides of one inequality chain with pairwise verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub chain: String,
    pub function: String,
    pub hypothesis: Hypothesis,
    pub sides: Vec<Side>,
    pub verdicts: Vec<PairVerdict>,
    pub scalars: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub fn new(chain: impl Into<String>, function: impl Into<String>, hypothesis: Hypothesis) -> Self {
        Self {
            chain: chain.into(),
            function: function.into(),
            hypothesis,
            sides: Vec::new(),
            verdicts: Vec::new(),
            scalars: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn add_side(&mut self, label: &str, operator: HermitianOperator) {
        self.sides.push(Side {
            label: label.to_string(),
            operator,
        });
    }

    pub fn side(&self, label: &str) -> Option<&HermitianOperator> {
        self.sides.iter().find(|s| s.label == label).map(|s| &s.operator)
    }

    /// Adds the verdict for `left ⪯ right`; both sides must already be present.
    pub fn compare(&mut self, left: &str, right: &str, tol: Option<f64>) -> Result<()> {
        let missing = |l: &str| Error::InvalidParameter(format!("report has no side {l:?}"));
        let a = self.side(left).ok_or_else(|| missing(left))?;
        let b = self.side(right).ok_or_else(|| missing(right))?;
        let tol = match tol {
            Some(t) => t,
            None => default_tolerance(a, b)?,
        };
        let verdict = loewner_compare(a, b, tol)?;
        self.verdicts.push(PairVerdict {
            pair: [left.to_string(), right.to_string()],
            verdict,
        });
        Ok(())
    }

    pub fn verdict(&self, left: &str, right: &str) -> Option<&PairVerdict> {
        self.verdicts.iter().find(|v| v.pair[0] == left && v.pair[1] == right)
    }

    /// Smallest `λ_min(right − left)` over all verdicts.
    pub fn min_gap(&self) -> f64 {
        self.verdicts.iter().map(PairVerdict::gap).fold(f64::INFINITY, f64::min)
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(PairVerdict::holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

fn convex_hypothesis(inst: &MercerInstance) -> Hypothesis {
    let flagged = inst.f.flags().convex_on_domain && inst.f.natural_domain().contains_bounds(&inst.bounds);
    let met = flagged || convexity_on(&inst.f, &inst.bounds).is_ok_and(|c| c.is_convex());
    Hypothesis {
        met,
        detail: format!(
            "{} {} convex on [{}, {}]",
            inst.f,
            if met { "is" } else { "is not" },
            inst.bounds.m(),
            inst.bounds.big_m()
        ),
    }
}

fn gate(h: Hypothesis, opts: &EvalOptions, report_notes: &mut Vec<String>) -> Result<Hypothesis> {
    if !h.met {
        if !opts.force {
            return Err(Error::HypothesisNotMet(h.detail));
        }
        report_notes.push("hypothesis forced: verdicts may legitimately fail".into());
    }
    Ok(h)
}

/// Evaluates one chain, every side as an operator, with verdicts in chain order.
pub fn evaluate_chain(inst: &MercerInstance, which: ChainKind, opts: &EvalOptions) -> Result<InequalityReport> {
    let mut notes = Vec::new();
    let hypothesis = match which {
        ChainKind::Classic | ChainKind::Chain => gate(convex_hypothesis(inst), opts, &mut notes)?,
        ChainKind::TwiceDiff => Hypothesis {
            met: true,
            detail: format!("{} is twice differentiable on the interval", inst.f),
        },
        ChainKind::LogConvex => {
            let met = is_log_convex_on(&inst.f, &inst.bounds)?;
            let detail = format!("{} {} log-convex", inst.f, if met { "is" } else { "is not" });
            gate(Hypothesis { met, detail }, opts, &mut notes)?
        }
    };
    let mut report = InequalityReport::new(which.as_str(), inst.f.to_string(), hypothesis);
    report.notes = notes;
    let (fm, f_big) = inst.endpoint_values()?;
    report.scalars.insert("f(m)".into(), fm);
    report.scalars.insert("f(M)".into(), f_big);

    let lhs = mercer_lhs(inst)?;
    let rhs = mercer_rhs_classic(inst)?;
    match which {
        ChainKind::Classic => {
            report.add_side("lhs", lhs);
            report.add_side("rhs_classic", rhs);
            report.compare("lhs", "rhs_classic", opts.tol)?;
        }
        ChainKind::Chain => {
            report.add_side("lhs", lhs);
            report.add_side("chain_middle", chain_middle(inst)?);
            report.add_side("rhs_classic", rhs);
            report.compare("lhs", "chain_middle", opts.tol)?;
            report.compare("chain_middle", "rhs_classic", opts.tol)?;
        }
        ChainKind::TwiceDiff => {
            let curv = curvature_bounds(&inst.f, &inst.bounds)?;
            let (lower, upper) = refined_bounds(inst, &curv)?;
            let d = diamond_plain(inst)?;
            report.scalars.insert("alpha".into(), curv.alpha);
            report.scalars.insert("beta".into(), curv.beta);
            report.add_side("refined_lower", lower);
            report.add_side("lhs", lhs);
            report.add_side("refined_upper", upper);
            report.add_side("rhs_classic", rhs);
            report.add_side("zero", HermitianOperator::zeros(d.dim()));
            report.add_side("diamond", d);
            report.compare("refined_lower", "lhs", opts.tol)?;
            report.compare("lhs", "refined_upper", opts.tol)?;
            report.compare("zero", "diamond", opts.tol)?;
            if curv.alpha >= 0.0 {
                report.compare("refined_upper", "rhs_classic", opts.tol)?;
            }
        }
        ChainKind::LogConvex => {
            report.add_side("lhs", lhs);
            report.add_side("log_convex_middle", log_convex_middle(inst)?);
            report.add_side("rhs_classic", rhs);
            report.compare("lhs", "log_convex_middle", opts.tol)?;
            report.compare("log_convex_middle", "rhs_classic", opts.tol)?;
        }
    }
    debug_assert_eq!(report.sides[0].operator.dim(), inst.dim_out());
    Ok(report)
}
