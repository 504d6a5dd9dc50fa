//! Quasi-arithmetic operator means of Mercer's type,
//! `M̃_φ(A, Φ) = φ⁻¹((φ(M)+φ(m))I − Σ Φ_i(φ(A_i)))`, their ordering and the
//! refined bounds obtained by running the Mercer refinements through
//! `ψ∘φ⁻¹` in φ-coordinates.
//!
//! "Operator monotone" for `ψ⁻¹` is read as operator increasing. When the
//! catalog marks `ψ⁻¹` operator decreasing, predicted directions are reversed
//! and the report says so.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcat::{
    convexity_on, curvature_bounds, example35_g, is_log_convex_on, Convexity, OperatorMonotonicity, ScalarFunction,
    SpectralBounds,
};
use crate::linalg::{
    apply_clamped, apply_on_natural_domain, apply_scalar_function, loewner_compare_default, HermitianOperator,
    OrderVerdict, Relation,
};
use crate::mercer::{check_spectrum, check_unital, diamond_from_parts, Hypothesis, InequalityReport};
use crate::posmap::{family_sum_with, MapFamily};

/// Points in the strict-monotonicity and inverse round-trip checks.
pub const MONOTONE_GRID: usize = 1_000;

const REVERSAL_NOTE: &str = "psi^-1 is operator decreasing: predicted direction reversed";

fn check_strictly_monotone(f: &ScalarFunction, bounds: &SpectralBounds) -> Result<ScalarFunction> {
    let values = bounds
        .grid(MONOTONE_GRID)
        .map(|t| f.try_eval(t))
        .collect::<Result<Vec<_>>>()?;
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidParameter(format!(
            "{f} is not strictly monotone on [{}, {}]",
            bounds.m(),
            bounds.big_m()
        )));
    }
    let inv = f
        .inverse()
        .ok_or_else(|| Error::InvalidParameter(format!("{f} has no catalog inverse")))?;
    for (t, v) in bounds.grid(MONOTONE_GRID).zip(&values) {
        let back = inv.try_eval(*v)?;
        if (back - t).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(Error::InvalidParameter(format!(
                "{inv} does not invert {f} at {t} (got {back})"
            )));
        }
    }
    Ok(inv)
}

fn image_interval(f: &ScalarFunction, bounds: &SpectralBounds) -> Result<SpectralBounds> {
    SpectralBounds::spanning(f.try_eval(bounds.m())?, f.try_eval(bounds.big_m())?)
}

fn as_inverse_error(e: Error) -> Error {
    match e {
        Error::FunctionDomainError { function, t } => Error::InverseDomainError { function, t },
        e => e,
    }
}

/// A pair `(φ, ψ)` with the properties of `ψ∘φ⁻¹` and `ψ⁻¹` resolved on `[m, M]`.
#[derive(Clone, Debug)]
pub struct QuasiArithmeticSpec {
    phi: ScalarFunction,
    psi: ScalarFunction,
    phi_inv: ScalarFunction,
    psi_inv: ScalarFunction,
    bounds: SpectralBounds,
    phi_interval: SpectralBounds,
    composite: ScalarFunction,
    convexity: Convexity,
    log_convex: bool,
    psi_inv_monotonicity: OperatorMonotonicity,
}

impl QuasiArithmeticSpec {
    pub fn new(phi: ScalarFunction, psi: ScalarFunction, bounds: SpectralBounds) -> Result<Self> {
        let phi_inv = check_strictly_monotone(&phi, &bounds)?;
        let psi_inv = check_strictly_monotone(&psi, &bounds)?;
        let phi_interval = image_interval(&phi, &bounds)?;
        let composite = ScalarFunction::compose_with_inverse(&psi, &phi)?;
        let convexity = convexity_on(&composite, &phi_interval)?;
        let log_convex = match is_log_convex_on(&composite, &phi_interval) {
            Ok(v) => v,
            Err(Error::NonpositiveFunction { .. }) => false,
            Err(e) => return Err(e),
        };
        let psi_inv_monotonicity = psi_inv.operator_monotonicity();
        Ok(Self {
            phi,
            psi,
            phi_inv,
            psi_inv,
            bounds,
            phi_interval,
            composite,
            convexity,
            log_convex,
            psi_inv_monotonicity,
        })
    }

    pub fn phi(&self) -> &ScalarFunction {
        &self.phi
    }
    pub fn psi(&self) -> &ScalarFunction {
        &self.psi
    }
    pub fn bounds(&self) -> &SpectralBounds {
        &self.bounds
    }
    /// `[min(φ(m), φ(M)), max(φ(m), φ(M))]`.
    pub fn phi_interval(&self) -> &SpectralBounds {
        &self.phi_interval
    }
    /// `ψ∘φ⁻¹`.
    pub fn composite(&self) -> &ScalarFunction {
        &self.composite
    }
    pub fn convexity(&self) -> Convexity {
        self.convexity
    }
    pub fn composite_log_convex(&self) -> bool {
        self.log_convex
    }
    pub fn psi_inverse_monotonicity(&self) -> OperatorMonotonicity {
        self.psi_inv_monotonicity
    }

    fn label(&self) -> String {
        format!("phi={} psi={}", self.phi, self.psi)
    }

    /// `(ψ(M)+ψ(m))I − Σ Φ_i(ψ(A_i))`, which is `ψ(M̃_ψ)`.
    fn psi_of_psi_mean(&self, family: &MapFamily, operators: &[HermitianOperator]) -> Result<HermitianOperator> {
        outer_argument(&self.psi, family, operators, &self.bounds)
    }
}

fn validate(family: &MapFamily, operators: &[HermitianOperator], bounds: &SpectralBounds) -> Result<()> {
    for a in operators {
        check_spectrum(a, bounds)?;
    }
    check_unital(family)
}

/// `Σ Φ_i(φ(A_i))`.
fn transformed_sum(
    phi: &ScalarFunction,
    family: &MapFamily,
    operators: &[HermitianOperator],
    bounds: &SpectralBounds,
) -> Result<HermitianOperator> {
    family_sum_with(family, operators, |a| apply_scalar_function(phi, a, bounds))
}

/// `(φ(M)+φ(m))I − Σ Φ_i(φ(A_i))`.
fn outer_argument(
    phi: &ScalarFunction,
    family: &MapFamily,
    operators: &[HermitianOperator],
    bounds: &SpectralBounds,
) -> Result<HermitianOperator> {
    let t = transformed_sum(phi, family, operators, bounds)?;
    Ok((-&t).shifted(phi.try_eval(bounds.m())? + phi.try_eval(bounds.big_m())?))
}

fn mean_with_inverse(
    phi: &ScalarFunction,
    phi_inv: &ScalarFunction,
    family: &MapFamily,
    operators: &[HermitianOperator],
    bounds: &SpectralBounds,
) -> Result<HermitianOperator> {
    let x = outer_argument(phi, family, operators, bounds)?;
    let phi_interval = image_interval(phi, bounds)?;
    apply_clamped(&x, &phi_interval, |u| phi_inv.try_eval(u).map_err(as_inverse_error))
}

/// `M̃_φ(A, Φ) = φ⁻¹((φ(M)+φ(m))I − Σ Φ_i(φ(A_i)))`.
pub fn mercer_quasi_mean(
    phi: &ScalarFunction,
    family: &MapFamily,
    operators: &[HermitianOperator],
    bounds: &SpectralBounds,
) -> Result<HermitianOperator> {
    validate(family, operators, bounds)?;
    let phi_inv = check_strictly_monotone(phi, bounds)?;
    mean_with_inverse(phi, &phi_inv, family, operators, bounds)
}

/// Outcome of comparing `M̃_φ` with `M̃_ψ`.
#[derive(Clone, Debug, Serialize)]
pub struct MeanComparison {
    /// Predicted relation of `M̃_φ` to `M̃_ψ`.
    pub predicted: Relation,
    pub case: String,
    pub verdict: OrderVerdict,
    pub holds: bool,
    #[serde(skip)]
    pub phi_mean: HermitianOperator,
    #[serde(skip)]
    pub psi_mean: HermitianOperator,
}

/// Predicted order of the two means from the convexity of `ψ∘φ⁻¹` and the
/// operator monotonicity of `ψ⁻¹`.
pub fn predicted_order(spec: &QuasiArithmeticSpec) -> Result<(Relation, &'static str)> {
    use Convexity::*;
    use OperatorMonotonicity::*;
    match (spec.convexity, spec.psi_inv_monotonicity) {
        (Affine, _) => Ok((Relation::Equal, "psi o phi^-1 affine: means coincide")),
        (Convex, Increasing) => Ok((Relation::LessEqual, "psi o phi^-1 convex, psi^-1 operator increasing")),
        (Concave, Decreasing) => Ok((Relation::LessEqual, "psi o phi^-1 concave, psi^-1 operator decreasing")),
        (Concave, Increasing) => Ok((
            Relation::GreaterEqual,
            "psi o phi^-1 concave, psi^-1 operator increasing",
        )),
        (Convex, Decreasing) => Ok((
            Relation::GreaterEqual,
            "psi o phi^-1 convex, psi^-1 operator decreasing",
        )),
        (c, mono) => Err(Error::HypothesisNotMet(format!(
            "{}: psi o phi^-1 is {c:?}, psi^-1 operator monotonicity {mono:?}",
            spec.label()
        ))),
    }
}

fn relation_holds(predicted: Relation, observed: Relation) -> bool {
    match predicted {
        Relation::Equal => observed == Relation::Equal,
        Relation::LessEqual => observed.is_le(),
        Relation::GreaterEqual => observed.is_ge(),
        Relation::Incomparable => true,
    }
}

pub fn compare_means(
    spec: &QuasiArithmeticSpec,
    family: &MapFamily,
    operators: &[HermitianOperator],
) -> Result<MeanComparison> {
    validate(family, operators, &spec.bounds)?;
    let (predicted, case) = predicted_order(spec)?;
    let phi_mean = mean_with_inverse(&spec.phi, &spec.phi_inv, family, operators, &spec.bounds)?;
    let psi_mean = mean_with_inverse(&spec.psi, &spec.psi_inv, family, operators, &spec.bounds)?;
    let verdict = loewner_compare_default(&phi_mean, &psi_mean)?;
    Ok(MeanComparison {
        predicted,
        case: case.to_string(),
        holds: relation_holds(predicted, verdict.relation),
        verdict,
        phi_mean,
        psi_mean,
    })
}

/// [`compare_means`] as a report whose verdicts read `left ⪯ right` in the
/// predicted direction (both directions when the means should coincide).
pub fn compare_means_report(
    spec: &QuasiArithmeticSpec,
    family: &MapFamily,
    operators: &[HermitianOperator],
) -> Result<InequalityReport> {
    let c = compare_means(spec, family, operators)?;
    let mut report = InequalityReport::new(
        "order",
        spec.label(),
        Hypothesis {
            met: true,
            detail: c.case.clone(),
        },
    );
    report.add_side("mean_phi", c.phi_mean);
    report.add_side("mean_psi", c.psi_mean);
    match c.predicted {
        Relation::LessEqual => report.compare("mean_phi", "mean_psi", None)?,
        Relation::GreaterEqual => report.compare("mean_psi", "mean_phi", None)?,
        _ => {
            report.compare("mean_phi", "mean_psi", None)?;
            report.compare("mean_psi", "mean_phi", None)?;
        }
    }
    Ok(report)
}

/// `◇ = (φ(M)+φ(m))T − φ(M)φ(m)I − ½(T² + Σ Φ_i(φ(A_i)²))`, `T = Σ Φ_i(φ(A_i))`.
pub fn diamond_phi(
    phi: &ScalarFunction,
    family: &MapFamily,
    operators: &[HermitianOperator],
    bounds: &SpectralBounds,
) -> Result<HermitianOperator> {
    validate(family, operators, bounds)?;
    let t = transformed_sum(phi, family, operators, bounds)?;
    let q = family_sum_with(family, operators, |a| {
        Ok(apply_scalar_function(phi, a, bounds)?.square())
    })?;
    Ok(diamond_from_parts(
        &t,
        &q,
        phi.try_eval(bounds.m())?,
        phi.try_eval(bounds.big_m())?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Th3Side {
    /// `M̃_φ ⪯ ψ⁻¹{ψ(M̃_ψ) − α◇}` with `α ≤ (ψ∘φ⁻¹)″`.
    AlphaLowerRefined,
    /// The reverse inequality with `β ≥ (ψ∘φ⁻¹)″`.
    BetaReversed,
}

#[derive(Clone, Debug)]
pub struct Th3Bound {
    pub bound: HermitianOperator,
    pub coefficient: f64,
    /// Predicted relation of `M̃_φ` to `bound`.
    pub predicted: Relation,
    pub reversed: bool,
}

/// `ψ⁻¹{ψ(M̃_ψ) − c·◇}` with `c = α` or `β` from the curvature of `ψ∘φ⁻¹`
/// on the φ-image of `[m, M]`.
pub fn th3_bound(
    spec: &QuasiArithmeticSpec,
    family: &MapFamily,
    operators: &[HermitianOperator],
    side: Th3Side,
) -> Result<Th3Bound> {
    let curv = curvature_bounds(&spec.composite, &spec.phi_interval)?;
    let coefficient = match side {
        Th3Side::AlphaLowerRefined => curv.alpha,
        Th3Side::BetaReversed => curv.beta,
    };
    th3_bound_with(spec, family, operators, side, coefficient)
}

/// [`th3_bound`] with an explicit curvature coefficient.
pub fn th3_bound_with(
    spec: &QuasiArithmeticSpec,
    family: &MapFamily,
    operators: &[HermitianOperator],
    side: Th3Side,
    coefficient: f64,
) -> Result<Th3Bound> {
    let base = match side {
        Th3Side::AlphaLowerRefined => Relation::LessEqual,
        Th3Side::BetaReversed => Relation::GreaterEqual,
    };
    let (predicted, reversed) = match spec.psi_inv_monotonicity {
        OperatorMonotonicity::Increasing => (base, false),
        OperatorMonotonicity::Decreasing => (base.reversed(), true),
        OperatorMonotonicity::Neither => {
            return Err(Error::HypothesisNotMet(format!(
                "{}: psi^-1 = {} is not operator monotone",
                spec.label(),
                spec.psi_inv
            )))
        }
    };
    let d = diamond_phi(&spec.phi, family, operators, &spec.bounds)?;
    let arg = &spec.psi_of_psi_mean(family, operators)? - &(&d * coefficient);
    let bound = apply_on_natural_domain(&spec.psi_inv, &arg).map_err(as_inverse_error)?;
    Ok(Th3Bound {
        bound,
        coefficient,
        predicted,
        reversed,
    })
}

/// Evaluates [`th3_bound`] against `M̃_φ`; the verdict pair is ordered so that
/// the predicted relation reads `left ⪯ right`.
pub fn th3_report(
    spec: &QuasiArithmeticSpec,
    family: &MapFamily,
    operators: &[HermitianOperator],
    side: Th3Side,
) -> Result<InequalityReport> {
    let th3 = th3_bound(spec, family, operators, side)?;
    let mean = mean_with_inverse(&spec.phi, &spec.phi_inv, family, operators, &spec.bounds)?;
    let label = match side {
        Th3Side::AlphaLowerRefined => "th3_alpha",
        Th3Side::BetaReversed => "th3_beta",
    };
    let mut report = InequalityReport::new(
        label,
        spec.label(),
        Hypothesis {
            met: true,
            detail: format!("curvature coefficient {}", th3.coefficient),
        },
    );
    report.scalars.insert("coefficient".into(), th3.coefficient);
    if th3.reversed {
        report.notes.push(REVERSAL_NOTE.into());
    }
    report.add_side("mean_phi", mean);
    report.add_side(label, th3.bound);
    if th3.predicted.is_le() {
        report.compare("mean_phi", label, None)?;
    } else {
        report.compare(label, "mean_phi", None)?;
    }
    Ok(report)
}

/// Geometric sandwich `M̃_φ ⪯ ψ⁻¹{ψ(m)^{x} ψ(M)^{1−x}} ⪯ M̃_ψ` with
/// `x = (T − φ(m))/(φ(M) − φ(m))`, for log-convex `ψ∘φ⁻¹` and operator
/// increasing `ψ⁻¹`.
pub fn th4_sandwich(
    spec: &QuasiArithmeticSpec,
    family: &MapFamily,
    operators: &[HermitianOperator],
) -> Result<(HermitianOperator, InequalityReport)> {
    if !spec.log_convex {
        return Err(Error::HypothesisNotMet(format!(
            "{}: psi o phi^-1 is not log-convex",
            spec.label()
        )));
    }
    if spec.psi_inv_monotonicity != OperatorMonotonicity::Increasing {
        return Err(Error::HypothesisNotMet(format!(
            "{}: psi^-1 = {} is not operator increasing",
            spec.label(),
            spec.psi_inv
        )));
    }
    validate(family, operators, &spec.bounds)?;
    let b = spec.bounds;
    let (psi_m, psi_big) = (spec.psi.try_eval(b.m())?, spec.psi.try_eval(b.big_m())?);
    for (t, v) in [(b.m(), psi_m), (b.big_m(), psi_big)] {
        if !(v > 0.0) {
            return Err(Error::NonpositiveFunction {
                function: spec.psi.to_string(),
                t,
            });
        }
    }
    let (phi_m, phi_big) = (spec.phi.try_eval(b.m())?, spec.phi.try_eval(b.big_m())?);
    let t = transformed_sum(&spec.phi, family, operators, &b)?;
    let w = phi_big - phi_m;
    let (ln_m, ln_big) = (psi_m.ln(), psi_big.ln());
    let geometric = apply_clamped(&t, &spec.phi_interval, |tau| {
        Ok(((tau - phi_m) / w * ln_m + (phi_big - tau) / w * ln_big).exp())
    })?;
    let middle = apply_on_natural_domain(&spec.psi_inv, &geometric).map_err(as_inverse_error)?;

    let mean_phi = mean_with_inverse(&spec.phi, &spec.phi_inv, family, operators, &b)?;
    let mean_psi = mean_with_inverse(&spec.psi, &spec.psi_inv, family, operators, &b)?;
    let mut report = InequalityReport::new(
        "th4",
        spec.label(),
        Hypothesis {
            met: true,
            detail: "psi o phi^-1 log-convex, psi^-1 operator increasing".into(),
        },
    );
    report.add_side("mean_phi", mean_phi);
    report.add_side("th4_middle", middle.clone());
    report.add_side("mean_psi", mean_psi);
    report.compare("mean_phi", "th4_middle", None)?;
    report.compare("th4_middle", "mean_psi", None)?;
    Ok((middle, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub t: f64,
    pub p: f64,
    pub g: f64,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeTable {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub rows: Vec<ProbeRow>,
}

impl ProbeTable {
    pub fn sign_at(&self, t: f64, p: f64) -> Option<i8> {
        self.rows.iter().find(|r| r.t == t && r.p == p).map(|r| r.sign)
    }

    /// Whether some exponents give opposite signs of `g` at `t`.
    pub fn sign_flip_at(&self, t: f64) -> bool {
        let signs: Vec<i8> = self.rows.iter().filter(|r| r.t == t).map(|r| r.sign).collect();
        signs.contains(&1) && signs.contains(&-1)
    }
}

/// Values below this magnitude are reported with sign 0.
pub const PROBE_ZERO: f64 = 1e-14;

/// Tabulates [`example35_g`] over `t_grid × p_values`.
pub fn incomparability_probe(m: f64, big_m: f64, p_values: &[f64], t_grid: &[f64]) -> Result<ProbeTable> {
    if !(m > 0.0 && m < big_m) {
        return Err(Error::InvalidInterval(format!("need 0 < m < M, got [{m}, {big_m}]")));
    }
    let mut rows = Vec::with_capacity(p_values.len() * t_grid.len());
    for &t in t_grid {
        for &p in p_values {
            let g = example35_g(t, m, big_m, p)?;
            let sign = if g.abs() <= PROBE_ZERO { 0 } else { g.signum() as i8 };
            rows.push(ProbeRow { t, p, g, sign });
        }
    }
    Ok(ProbeTable { m, big_m, rows })
}
