//! Catalog of scalar functions and the analytic metadata the inequalities
//! need: derivatives, curvature bounds `α ≤ f″ ≤ β`, convexity and
//! log-convexity, and operator-monotonicity flags.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{loewner_compare, CMatrix, HermitianOperator, OrderVerdict, C64};

/// Number of points in every uniform grid used for sampled checks.
pub const GRID_POINTS: usize = 10_001;

/// Lower tolerance on `(log f)″` accepted by [`is_log_convex_on`].
pub const LOG_CONVEX_TOL: f64 = 1e-10;

/// The closed interval `[m, M]` housing the spectra of the operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    m: f64,
    #[serde(rename = "M")]
    big_m: f64,
}

impl SpectralBounds {
    pub fn new(m: f64, big_m: f64) -> Result<Self> {
        if !(m.is_finite() && big_m.is_finite() && m < big_m) {
            return Err(Error::InvalidBounds { m, big_m });
        }
        Ok(Self { m, big_m })
    }

    /// Orders the endpoints, so a decreasing map's image can be used directly.
    pub fn spanning(a: f64, b: f64) -> Result<Self> {
        Self::new(a.min(b), a.max(b))
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn width(&self) -> f64 {
        self.big_m - self.m
    }

    /// `1e-9 · (1 + |m| + |M|)`.
    pub fn clamp_tol(&self) -> f64 {
        1e-9 * (1.0 + self.m.abs() + self.big_m.abs())
    }

    pub fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.m, self.big_m)
    }

    pub fn contains(&self, t: f64) -> bool {
        (self.m..=self.big_m).contains(&t)
    }

    /// `n ≥ 2` equispaced points including both endpoints.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let step = self.width() / (n - 1) as f64;
        (0..n).map(move |k| {
            if k == n - 1 {
                self.big_m
            } else {
                self.m + k as f64 * step
            }
        })
    }
}

/// A real interval with optionally open ends, possibly unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };
    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };
    pub const NONNEGATIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
        lo_closed: true,
        hi_closed: false,
    };

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    pub fn contains_bounds(&self, b: &SpectralBounds) -> bool {
        self.contains(b.m()) && self.contains(b.big_m())
    }

    /// Returns `t` or, if it is outside but within `tol` of a closed end, that end.
    pub fn snap(&self, t: f64, tol: f64) -> Option<f64> {
        if self.contains(t) {
            Some(t)
        } else if self.lo_closed && t < self.lo && self.lo - t <= tol {
            Some(self.lo)
        } else if self.hi_closed && t > self.hi && t - self.hi <= tol {
            Some(self.hi)
        } else {
            None
        }
    }
}

/// Analytic flags, each stated on the entry's natural domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FunctionFlags {
    pub convex_on_domain: bool,
    pub log_convex_on_domain: bool,
    pub operator_monotone: bool,
    pub operator_decreasing: bool,
}

/// Direction in which a function is operator monotone, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OperatorMonotonicity {
    Increasing,
    Decreasing,
    Neither,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Identity,
    Square,
    Power(f64),
    Exp,
    Log,
    Sin,
    XLogX,
    Reciprocal,
    Sqrt,
    Constant(f64),
    /// `outer ∘ inner⁻¹`; `inner_inv` is the catalog inverse of `inner`.
    Composite {
        outer: Box<ScalarFunction>,
        inner: Box<ScalarFunction>,
        inner_inv: Box<ScalarFunction>,
    },
}

/// A catalog entry `f` with evaluator, derivatives and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarFunction {
    kind: Kind,
}

impl ScalarFunction {
    fn of(kind: Kind) -> Self {
        Self { kind }
    }

    pub fn identity() -> Self {
        Self::of(Kind::Identity)
    }
    pub fn square() -> Self {
        Self::of(Kind::Square)
    }
    pub fn power(p: f64) -> Self {
        Self::of(Kind::Power(p))
    }
    pub fn exp() -> Self {
        Self::of(Kind::Exp)
    }
    pub fn log() -> Self {
        Self::of(Kind::Log)
    }
    pub fn sin() -> Self {
        Self::of(Kind::Sin)
    }
    pub fn xlogx() -> Self {
        Self::of(Kind::XLogX)
    }
    pub fn reciprocal() -> Self {
        Self::of(Kind::Reciprocal)
    }
    pub fn sqrt() -> Self {
        Self::of(Kind::Sqrt)
    }
    pub fn constant(c: f64) -> Self {
        Self::of(Kind::Constant(c))
    }

    /// `outer ∘ inner⁻¹`, with derivatives by the chain rule.
    pub fn compose_with_inverse(outer: &ScalarFunction, inner: &ScalarFunction) -> Result<Self> {
        let inner_inv = inner
            .inverse()
            .ok_or_else(|| Error::InvalidParameter(format!("{inner} has no catalog inverse")))?;
        Ok(Self::of(Kind::Composite {
            outer: Box::new(outer.clone()),
            inner: Box::new(inner.clone()),
            inner_inv: Box::new(inner_inv),
        }))
    }

    /// Every non-composite entry, with representative exponents for `pow`.
    pub fn catalog() -> Vec<ScalarFunction> {
        vec![
            Self::identity(),
            Self::square(),
            Self::power(-1.5),
            Self::power(-0.5),
            Self::power(0.5),
            Self::power(2.5),
            Self::power(3.0),
            Self::exp(),
            Self::log(),
            Self::sin(),
            Self::xlogx(),
            Self::reciprocal(),
            Self::sqrt(),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Identity => "id",
            Kind::Square => "square",
            Kind::Power(_) => "pow",
            Kind::Exp => "exp",
            Kind::Log => "log",
            Kind::Sin => "sin",
            Kind::XLogX => "xlogx",
            Kind::Reciprocal => "inv",
            Kind::Sqrt => "sqrt",
            Kind::Constant(_) => "const",
            Kind::Composite { .. } => "compose",
        }
    }

    pub fn parameters(&self) -> Vec<f64> {
        match self.kind {
            Kind::Power(p) => vec![p],
            Kind::Constant(c) => vec![c],
            _ => Vec::new(),
        }
    }

    pub fn natural_domain(&self) -> Interval {
        match &self.kind {
            Kind::Identity | Kind::Square | Kind::Exp | Kind::Sin | Kind::Constant(_) => Interval::REAL_LINE,
            Kind::Power(_) | Kind::Log | Kind::Reciprocal => Interval::POSITIVE,
            Kind::XLogX | Kind::Sqrt => Interval::NONNEGATIVE,
            Kind::Composite { inner_inv, .. } => inner_inv.natural_domain(),
        }
    }

    /// Raw evaluation; NaN or infinite outside the natural domain.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Identity => t,
            Kind::Square => t * t,
            Kind::Power(p) => t.powf(*p),
            Kind::Exp => t.exp(),
            Kind::Log => t.ln(),
            Kind::Sin => t.sin(),
            Kind::XLogX => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln()
                }
            }
            Kind::Reciprocal => 1.0 / t,
            Kind::Sqrt => t.sqrt(),
            Kind::Constant(c) => *c,
            Kind::Composite { outer, inner_inv, .. } => outer.eval(inner_inv.eval(t)),
        }
    }

    pub fn try_eval(&self, t: f64) -> Result<f64> {
        let v = self.natural_domain().contains(t).then(|| self.eval(t));
        match v {
            Some(v) if v.is_finite() => Ok(v),
            _ => Err(Error::FunctionDomainError {
                function: self.to_string(),
                t,
            }),
        }
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        let v = match &self.kind {
            Kind::Identity => 1.0,
            Kind::Square => 2.0 * t,
            Kind::Power(p) => p * t.powf(p - 1.0),
            Kind::Exp => t.exp(),
            Kind::Log => 1.0 / t,
            Kind::Sin => t.cos(),
            Kind::XLogX => t.ln() + 1.0,
            Kind::Reciprocal => -1.0 / (t * t),
            Kind::Sqrt => 0.5 / t.sqrt(),
            Kind::Constant(_) => 0.0,
            Kind::Composite {
                outer,
                inner,
                inner_inv,
            } => {
                let x = inner_inv.eval(t);
                outer.derivative(x)? / inner.derivative(x)?
            }
        };
        v.is_finite().then_some(v)
    }

    pub fn second_derivative(&self, t: f64) -> Option<f64> {
        let v = match &self.kind {
            Kind::Identity | Kind::Constant(_) => 0.0,
            Kind::Square => 2.0,
            Kind::Power(p) => p * (p - 1.0) * t.powf(p - 2.0),
            Kind::Exp => t.exp(),
            Kind::Log => -1.0 / (t * t),
            Kind::Sin => -t.sin(),
            Kind::XLogX => 1.0 / t,
            Kind::Reciprocal => 2.0 / (t * t * t),
            Kind::Sqrt => -0.25 * t.powf(-1.5),
            Kind::Composite {
                outer,
                inner,
                inner_inv,
            } => {
                // (ψ∘φ⁻¹)″ = (ψ″φ′ − ψ′φ″) / φ′³ at x = φ⁻¹(u)
                let x = inner_inv.eval(t);
                let d1 = inner.derivative(x)?;
                (outer.second_derivative(x)? * d1 - outer.derivative(x)? * inner.second_derivative(x)?) / (d1 * d1 * d1)
            }
        };
        v.is_finite().then_some(v)
    }

    pub fn flags(&self) -> FunctionFlags {
        let f = |convex, log_convex, monotone, decreasing| FunctionFlags {
            convex_on_domain: convex,
            log_convex_on_domain: log_convex,
            operator_monotone: monotone,
            operator_decreasing: decreasing,
        };
        match self.kind {
            Kind::Identity => f(true, false, true, false),
            Kind::Square => f(true, false, false, false),
            Kind::Power(p) => f(
                p >= 1.0 || p <= 0.0,
                p <= 0.0,
                (0.0..=1.0).contains(&p),
                (-1.0..=0.0).contains(&p),
            ),
            Kind::Exp => f(true, true, false, false),
            Kind::Log => f(false, false, true, false),
            Kind::Sin => f(false, false, false, false),
            Kind::XLogX => f(true, false, false, false),
            Kind::Reciprocal => f(true, true, false, true),
            Kind::Sqrt => f(false, false, true, false),
            Kind::Constant(c) => f(true, c > 0.0, true, true),
            Kind::Composite { .. } => FunctionFlags::default(),
        }
    }

    /// Operator monotonicity as recorded in the catalog. "Operator monotone"
    /// means operator increasing; a constant counts as increasing.
    pub fn operator_monotonicity(&self) -> OperatorMonotonicity {
        let flags = self.flags();
        if flags.operator_monotone {
            OperatorMonotonicity::Increasing
        } else if flags.operator_decreasing {
            OperatorMonotonicity::Decreasing
        } else {
            OperatorMonotonicity::Neither
        }
    }

    /// Catalog inverse on the branch used by the quasi-arithmetic means.
    pub fn inverse(&self) -> Option<ScalarFunction> {
        match self.kind {
            Kind::Identity => Some(Self::identity()),
            Kind::Square => Some(Self::sqrt()),
            Kind::Sqrt => Some(Self::square()),
            Kind::Power(p) if p != 0.0 => Some(Self::power(1.0 / p)),
            Kind::Exp => Some(Self::log()),
            Kind::Log => Some(Self::exp()),
            Kind::Reciprocal => Some(Self::reciprocal()),
            _ => None,
        }
    }

    /// Whether `f″` is known to be monotone on `[m, M]`, so its extremes sit
    /// at the endpoints.
    pub fn second_derivative_monotone_on(&self, bounds: &SpectralBounds) -> bool {
        match self.kind {
            // f‴ = −cos vanishes at π/2 + kπ
            Kind::Sin => {
                let k = ((bounds.m() - FRAC_PI_2) / std::f64::consts::PI).floor() + 1.0;
                let first_zero = FRAC_PI_2 + k * std::f64::consts::PI;
                first_zero >= bounds.big_m()
            }
            Kind::Composite { .. } => false,
            _ => true,
        }
    }
}

impl fmt::Display for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Power(p) => write!(f, "pow:p={p}"),
            Kind::Constant(c) => write!(f, "const:c={c}"),
            Kind::Composite { outer, inner, .. } => write!(f, "({outer})o({inner})^-1"),
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for ScalarFunction {
    type Err = Error;

    /// Parses `name[:key=value]`, e.g. `pow:p=-0.2`, `sin`, `const:c=2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((n, rest)) => (n, Some(rest)),
            None => (s, None),
        };
        let value = |key: &str| -> Result<f64> {
            let rest = param.ok_or_else(|| Error::Parse(format!("{name} needs {key}=<value>")))?;
            let raw = rest.strip_prefix(&format!("{key}=")).unwrap_or(rest);
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad value for {key}: {raw:?}")))
        };
        let f = match name.to_ascii_lowercase().as_str() {
            "id" | "identity" | "t" => Self::identity(),
            "square" | "sq" | "t2" => Self::square(),
            "pow" | "power" => Self::power(value("p")?),
            "exp" => Self::exp(),
            "log" | "ln" => Self::log(),
            "sin" => Self::sin(),
            "xlogx" | "tlogt" => Self::xlogx(),
            "inv" | "recip" | "reciprocal" => Self::reciprocal(),
            "sqrt" => Self::sqrt(),
            "const" | "constant" => Self::constant(value("c")?),
            other => return Err(Error::Parse(format!("unknown function {other:?}"))),
        };
        if param.is_some() && f.parameters().is_empty() {
            return Err(Error::Parse(format!("{name} takes no parameter")));
        }
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurvatureMethod {
    Analytic,
    Sampled,
}

/// `α ≤ f″ ≤ β` on a given interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureBounds {
    pub alpha: f64,
    pub beta: f64,
    pub method: CurvatureMethod,
}

fn check_domain(f: &ScalarFunction, bounds: &SpectralBounds) -> Result<()> {
    if f.natural_domain().contains_bounds(bounds) {
        Ok(())
    } else {
        Err(Error::DomainMismatch {
            function: f.to_string(),
            m: bounds.m(),
            big_m: bounds.big_m(),
        })
    }
}

fn second_derivative_at(f: &ScalarFunction, t: f64) -> Result<f64> {
    f.second_derivative(t).ok_or_else(|| Error::MissingSecondDerivative {
        function: f.to_string(),
        t,
    })
}

/// Curvature bounds on `[m, M]`: endpoint values when `f″` is monotone there,
/// otherwise the extremes of a 10,001-point grid widened by `1e-6·(1+|v|)`.
pub fn curvature_bounds(f: &ScalarFunction, bounds: &SpectralBounds) -> Result<CurvatureBounds> {
    check_domain(f, bounds)?;
    if f.second_derivative_monotone_on(bounds) {
        let a = second_derivative_at(f, bounds.m())?;
        let b = second_derivative_at(f, bounds.big_m())?;
        return Ok(CurvatureBounds {
            alpha: a.min(b),
            beta: a.max(b),
            method: CurvatureMethod::Analytic,
        });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in bounds.grid(GRID_POINTS) {
        let v = second_derivative_at(f, t)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(CurvatureBounds {
        alpha: lo - 1e-6 * (1.0 + lo.abs()),
        beta: hi + 1e-6 * (1.0 + hi.abs()),
        method: CurvatureMethod::Sampled,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convexity {
    Affine,
    Convex,
    Concave,
    Neither,
}

impl Convexity {
    pub fn is_convex(self) -> bool {
        matches!(self, Convexity::Affine | Convexity::Convex)
    }

    pub fn is_concave(self) -> bool {
        matches!(self, Convexity::Affine | Convexity::Concave)
    }
}

/// Classifies `f` on `[m, M]` from the sign of `f″` on the grid.
pub fn convexity_on(f: &ScalarFunction, bounds: &SpectralBounds) -> Result<Convexity> {
    check_domain(f, bounds)?;
    let values = bounds
        .grid(GRID_POINTS)
        .map(|t| second_derivative_at(f, t))
        .collect::<Result<Vec<_>>>()?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-10 * (1.0 + lo.abs().max(hi.abs()));
    Ok(match (lo >= -tol, hi <= tol) {
        (true, true) => Convexity::Affine,
        (true, false) => Convexity::Convex,
        (false, true) => Convexity::Concave,
        (false, false) => Convexity::Neither,
    })
}

fn check_positive(f: &ScalarFunction, bounds: &SpectralBounds) -> Result<()> {
    for t in bounds.grid(GRID_POINTS) {
        if !(f.eval(t) > 0.0) {
            return Err(Error::NonpositiveFunction {
                function: f.to_string(),
                t,
            });
        }
    }
    Ok(())
}

/// Minimum over the grid of `(log f)″ = f″/f − (f′/f)²`.
pub fn log_convexity_min(f: &ScalarFunction, bounds: &SpectralBounds) -> Result<f64> {
    check_domain(f, bounds)?;
    check_positive(f, bounds)?;
    let mut lo = f64::INFINITY;
    for t in bounds.grid(GRID_POINTS) {
        let v = f.eval(t);
        let d1 = f.derivative(t).ok_or_else(|| Error::MissingSecondDerivative {
            function: f.to_string(),
            t,
        })?;
        let d2 = second_derivative_at(f, t)?;
        lo = lo.min(d2 / v - (d1 / v).powi(2));
    }
    Ok(lo)
}

/// Whether `log f` is convex on `[m, M]`; the catalog flag short-circuits the
/// grid check.
pub fn is_log_convex_on(f: &ScalarFunction, bounds: &SpectralBounds) -> Result<bool> {
    check_domain(f, bounds)?;
    check_positive(f, bounds)?;
    if f.flags().log_convex_on_domain {
        return Ok(true);
    }
    Ok(log_convexity_min(f, bounds)? >= -LOG_CONVEX_TOL)
}

/// Divided-difference (Loewner) matrix `K_ij = (f(t_i) − f(t_j))/(t_i − t_j)`,
/// `K_ii = f′(t_i)`.
pub fn loewner_matrix(f: &ScalarFunction, points: &[f64]) -> Result<HermitianOperator> {
    for (i, &a) in points.iter().enumerate() {
        if points[..i].contains(&a) {
            return Err(Error::DuplicatePoints(a));
        }
        f.try_eval(a)?;
    }
    let slope = |t: f64| {
        f.derivative(t).unwrap_or_else(|| {
            let h = 1e-6 * (1.0 + t.abs());
            (f.eval(t + h) - f.eval(t - h)) / (2.0 * h)
        })
    };
    let n = points.len();
    let k = CMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (points[i], points[j]);
        let v = if i == j {
            slope(a)
        } else {
            (f.eval(a) - f.eval(b)) / (a - b)
        };
        C64::new(v, 0.0)
    });
    HermitianOperator::new(k)
}

/// PSD verdict of `0` against the Loewner matrix; a `LessEqual`/`Equal`
/// relation means the necessary condition for operator monotonicity holds.
pub fn loewner_matrix_diagnostic(f: &ScalarFunction, points: &[f64]) -> Result<OrderVerdict> {
    let k = loewner_matrix(f, points)?;
    let zero = HermitianOperator::zeros(k.dim());
    let tol = 1e-9 * (1.0 + k.spectral_norm()?);
    loewner_compare(&zero, &k, tol)
}

/// Difference between the curvature-refined chord bound for `t^p` and its
/// geometric (log-convex) bound on `[m, M]`, for `p < 0`.
pub fn example35_g(t: f64, m: f64, big_m: f64, p: f64) -> Result<f64> {
    if !(m > 0.0 && m < big_m && big_m.is_finite()) {
        return Err(Error::InvalidInterval(format!("need 0 < m < M, got [{m}, {big_m}]")));
    }
    if !(m..=big_m).contains(&t) {
        return Err(Error::InvalidInterval(format!("t = {t} outside [{m}, {big_m}]")));
    }
    if !(p < 0.0) {
        return Err(Error::InvalidParameter(format!("need p < 0, got {p}")));
    }
    let w = big_m - m;
    let (lo_w, hi_w) = ((big_m - t) / w, (t - m) / w);
    let chord = lo_w * m.powf(p) + hi_w * big_m.powf(p);
    // f″(t) = p(p−1)t^{p−2} decreases for p < 0, so its floor on [m, M] sits at M
    let alpha = p * (p - 1.0) * big_m.powf(p - 2.0);
    let bracket = (big_m + m) * t - big_m * m - t * t;
    let geometric = (m.powf(lo_w) * big_m.powf(hi_w)).powf(p);
    Ok(chord - 0.5 * alpha * bracket - geometric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Relation;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    #[test]
    fn parse_specs() {
        assert_eq!(
            "pow:p=-0.2".parse::<ScalarFunction>().unwrap(),
            ScalarFunction::power(-0.2)
        );
        assert_eq!("sin".parse::<ScalarFunction>().unwrap(), ScalarFunction::sin());
        assert_eq!(
            "const:c=2".parse::<ScalarFunction>().unwrap(),
            ScalarFunction::constant(2.0)
        );
        assert!("pow".parse::<ScalarFunction>().is_err());
        assert!("exp:p=1".parse::<ScalarFunction>().is_err());
        assert!("tan".parse::<ScalarFunction>().is_err());
        for f in ScalarFunction::catalog() {
            assert_eq!(f.to_string().parse::<ScalarFunction>().unwrap(), f);
        }
    }

    #[test]
    fn bounds_validation() {
        assert!(SpectralBounds::new(1.0, 1.0).is_err());
        assert!(SpectralBounds::new(2.0, 1.0).is_err());
        assert!(SpectralBounds::new(f64::NAN, 1.0).is_err());
        let b = SpectralBounds::spanning(3.0, 1.0).unwrap();
        assert_eq!((b.m(), b.big_m()), (1.0, 3.0));
        let g: Vec<f64> = b.grid(5).collect();
        assert_eq!(g, vec![1.0, 1.5, 2.0, 2.5, 3.0]);
    }

    #[test]
    fn curvature_of_sin_on_example_interval() {
        let b = SpectralBounds::new(FRAC_PI_4, FRAC_PI_2).unwrap();
        let c = curvature_bounds(&ScalarFunction::sin(), &b).unwrap();
        assert_eq!(c.method, CurvatureMethod::Analytic);
        assert!((c.alpha + 1.0).abs() < 1e-15);
        assert!((c.beta + SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn curvature_of_square_and_reciprocal() {
        let b = SpectralBounds::new(-5.0, 7.0).unwrap();
        let c = curvature_bounds(&ScalarFunction::square(), &b).unwrap();
        assert_eq!((c.alpha, c.beta), (2.0, 2.0));

        let b = SpectralBounds::new(1.0, 3.0).unwrap();
        let c = curvature_bounds(&ScalarFunction::reciprocal(), &b).unwrap();
        assert!((c.alpha - 2.0 / 27.0).abs() < 1e-15);
        assert!((c.beta - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sin_across_an_inflection_of_f2_is_sampled() {
        let b = SpectralBounds::new(1.0, 2.5).unwrap();
        let c = curvature_bounds(&ScalarFunction::sin(), &b).unwrap();
        assert_eq!(c.method, CurvatureMethod::Sampled);
        // f″ = −sin attains −1 at π/2 inside the interval
        assert!(c.alpha <= -1.0 && c.alpha > -1.0 - 1e-5);
        assert!(c.beta >= -(2.5f64).sin().min(1.0f64.sin()));
    }

    #[test]
    fn curvature_errors() {
        let b = SpectralBounds::new(-1.0, 1.0).unwrap();
        assert!(matches!(
            curvature_bounds(&ScalarFunction::log(), &b),
            Err(Error::DomainMismatch { .. })
        ));
        let b = SpectralBounds::new(0.0, 1.0).unwrap();
        assert!(matches!(
            curvature_bounds(&ScalarFunction::sqrt(), &b),
            Err(Error::MissingSecondDerivative { .. })
        ));
    }

    #[test]
    fn log_convexity_examples() {
        let b = SpectralBounds::new(1.0, 3.0).unwrap();
        assert!(is_log_convex_on(&ScalarFunction::power(-0.7), &b).unwrap());
        assert!(is_log_convex_on(&ScalarFunction::exp(), &b).unwrap());
        assert!(!is_log_convex_on(&ScalarFunction::identity(), &b).unwrap());
        // (log t)″ = −1/t², so the grid minimum is −1 at t = 1
        let lo = log_convexity_min(&ScalarFunction::identity(), &b).unwrap();
        assert!((lo + 1.0).abs() < 1e-12);

        let b = SpectralBounds::new(-1.0, 1.0).unwrap();
        assert!(matches!(
            is_log_convex_on(&ScalarFunction::identity(), &b),
            Err(Error::NonpositiveFunction { .. })
        ));
    }

    #[test]
    fn composite_second_derivative() {
        // (id ∘ log⁻¹)(u) = e^u
        let h = ScalarFunction::compose_with_inverse(&ScalarFunction::identity(), &ScalarFunction::log()).unwrap();
        for u in [0.0, 0.3, 1.1] {
            assert!((h.eval(u) - f64::exp(u)).abs() < 1e-14);
            assert!((h.second_derivative(u).unwrap() - f64::exp(u)).abs() < 1e-12);
        }
        // (id ∘ sqrt⁻¹)(u) = u²
        let h = ScalarFunction::compose_with_inverse(&ScalarFunction::identity(), &ScalarFunction::sqrt()).unwrap();
        assert!((h.second_derivative(1.3).unwrap() - 2.0).abs() < 1e-12);
        assert!(ScalarFunction::compose_with_inverse(&ScalarFunction::exp(), &ScalarFunction::sin()).is_err());
    }

    #[test]
    fn diagnostic_examples() {
        let v = loewner_matrix_diagnostic(&ScalarFunction::sqrt(), &[0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(v.relation.is_le());
        let v = loewner_matrix_diagnostic(&ScalarFunction::identity(), &[0.3, -2.0, 5.0]).unwrap();
        assert!(v.relation.is_le());
        let v = loewner_matrix_diagnostic(&ScalarFunction::power(3.0), &[0.1, 1.0, 2.0, 5.0]).unwrap();
        assert_eq!(v.relation, Relation::Incomparable);
        assert!(matches!(
            loewner_matrix_diagnostic(&ScalarFunction::sqrt(), &[1.0, 2.0, 1.0]),
            Err(Error::DuplicatePoints(_))
        ));
    }

    #[test]
    fn g_values_against_paper() {
        let g = example35_g(2.0, 1.0, 3.0, -0.2).unwrap();
        assert!((g + 0.0052909).abs() < 1e-6, "{g}");
        let g = example35_g(2.0, 1.0, 3.0, -1.0).unwrap();
        assert!((g - 0.0522794).abs() < 1e-6, "{g}");
        for p in [-0.2, -1.0, -3.5] {
            assert!(example35_g(1.0, 1.0, 3.0, p).unwrap().abs() < 1e-15);
            assert!(example35_g(3.0, 1.0, 3.0, p).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn g_rejects_bad_input() {
        assert!(matches!(
            example35_g(2.0, 0.0, 3.0, -1.0),
            Err(Error::InvalidInterval(_))
        ));
        assert!(matches!(
            example35_g(2.0, 3.0, 1.0, -1.0),
            Err(Error::InvalidInterval(_))
        ));
        assert!(matches!(
            example35_g(4.0, 1.0, 3.0, -1.0),
            Err(Error::InvalidInterval(_))
        ));
        assert!(matches!(
            example35_g(2.0, 1.0, 3.0, 0.5),
            Err(Error::InvalidParameter(_))
        ));
    }
}
