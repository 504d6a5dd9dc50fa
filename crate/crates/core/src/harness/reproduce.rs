//! Fixed worked examples with their published approximations.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcat::{curvature_bounds, example35_g, ScalarFunction, SpectralBounds};
use crate::linalg::HermitianOperator;
use crate::mercer::{diamond_plain, mercer_lhs, mercer_rhs_classic, refined_bounds, MercerInstance};
use crate::posmap::{MapFamily, PositiveLinearMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    #[serde(rename = "example-2.2")]
    SinHalfTrace,
    #[serde(rename = "example-3.5")]
    PowerIncomparability,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::SinHalfTrace => "example-2.2",
            Case::PowerIncomparability => "example-3.5",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "example-2.2" | "example-2-2" | "2.2" => Ok(Case::SinHalfTrace),
            "example-3.5" | "example-3-5" | "3.5" => Ok(Case::PowerIncomparability),
            other => Err(Error::Parse(format!("unknown case {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
    /// Published approximation, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reproduction {
    pub case: Case,
    pub function: String,
    pub values: Vec<NamedValue>,
}

impl Reproduction {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|v| v.name == name).map(|v| v.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reproduction serializes")
    }
}

fn named(name: &str, value: f64, reference: Option<f64>) -> NamedValue {
    NamedValue {
        name: name.into(),
        value,
        reference,
    }
}

/// `A = diag(π/4, π/2)`, `Φ = ½Tr` on `[π/4, π/2]`.
pub fn sin_half_trace_instance(f: ScalarFunction) -> Result<MercerInstance> {
    let a = HermitianOperator::from_real_diagonal(&[FRAC_PI_4, FRAC_PI_2]);
    let family = MapFamily::new(vec![PositiveLinearMap::weighted_trace(0.5, 2, 1)?])?;
    MercerInstance::new(f, family, vec![a], SpectralBounds::new(FRAC_PI_4, FRAC_PI_2)?)
}

pub fn reproduce(case: Case, function: Option<ScalarFunction>) -> Result<Reproduction> {
    match case {
        Case::SinHalfTrace => {
            let f = function.unwrap_or_else(ScalarFunction::sin);
            let published = f == ScalarFunction::sin();
            let reference = |v: f64| published.then_some(v);
            let inst = sin_half_trace_instance(f.clone())?;
            let curv = curvature_bounds(&f, inst.bounds())?;
            let (lower, upper) = refined_bounds(&inst, &curv)?;
            let scalar = |a: HermitianOperator| a.as_scalar().expect("one-dimensional output");
            Ok(Reproduction {
                case,
                function: f.to_string(),
                values: vec![
                    named("lhs", scalar(mercer_lhs(&inst)?), reference(0.9238)),
                    named("rhs_classic", scalar(mercer_rhs_classic(&inst)?), reference(0.8535)),
                    named("refined_upper", scalar(upper), reference(0.9306)),
                    named("refined_lower", scalar(lower), None),
                    named("diamond", scalar(diamond_plain(&inst)?), None),
                    named("alpha", curv.alpha, None),
                    named("beta", curv.beta, None),
                ],
            })
        }
        Case::PowerIncomparability => {
            if function.is_some() {
                return Err(Error::InvalidParameter(format!("{case} takes no function override")));
            }
            Ok(Reproduction {
                case,
                function: "pow".into(),
                values: vec![
                    named("g(2) p=-0.2", example35_g(2.0, 1.0, 3.0, -0.2)?, Some(-0.0052909)),
                    named("g(2) p=-1", example35_g(2.0, 1.0, 3.0, -1.0)?, Some(0.0522794)),
                ],
            })
        }
    }
}
