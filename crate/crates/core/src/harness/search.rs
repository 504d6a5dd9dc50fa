//! Counterexample searches.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use super::generate::rng_from_seed;
use super::reproduce::sin_half_trace_instance;
use super::suite::{DimRange, InstanceShape};
use crate::error::{Error, Result};
use crate::funcat::{convexity_on, example35_g, ScalarFunction, SpectralBounds};
use crate::linalg::{loewner_compare, loewner_compare_default, MatrixJson};
use crate::mercer::{mercer_lhs, mercer_rhs_classic, MercerInstance};
use crate::posmap::MapSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchTarget {
    ClassicNonconvex,
    Th3Th4Order,
}

impl SearchTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchTarget::ClassicNonconvex => "classic-nonconvex",
            SearchTarget::Th3Th4Order => "th3-th4-order",
        }
    }
}

impl fmt::Display for SearchTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "classic-nonconvex" => Ok(SearchTarget::ClassicNonconvex),
            "th3-th4-order" => Ok(SearchTarget::Th3Th4Order),
            other => Err(Error::Parse(format!("unknown search target {other:?}"))),
        }
    }
}

pub fn default_classic_bounds() -> SpectralBounds {
    SpectralBounds::new(FRAC_PI_4, FRAC_PI_2).expect("valid interval")
}

/// Catalog functions that are not convex on `bounds`, `sin` first.
pub fn nonconvex_candidates(bounds: &SpectralBounds) -> Vec<ScalarFunction> {
    let mut out = vec![ScalarFunction::sin()];
    for f in ScalarFunction::catalog() {
        if out.contains(&f) || !f.natural_domain().contains_bounds(bounds) {
            continue;
        }
        if matches!(convexity_on(&f, bounds), Ok(c) if !c.is_convex()) {
            out.push(f);
        }
    }
    out
}

/// An instance where `f((M+m)I − S) ⪯ (f(M)+f(m))I − ΣΦ_i(f(A_i))` fails.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicWitness {
    pub function: String,
    pub bounds: SpectralBounds,
    pub attempt: u64,
    pub seed: Option<u64>,
    /// `λ_min(rhs − lhs)`.
    pub gap: f64,
    pub tolerance: f64,
    pub maps: Vec<MapSpec>,
    pub operators: Vec<MatrixJson>,
}

fn classic_gap(inst: &MercerInstance) -> Result<(f64, f64)> {
    let v = loewner_compare_default(&mercer_lhs(inst)?, &mercer_rhs_classic(inst)?)?;
    Ok((v.gap_min_eigenvalue, v.tolerance))
}

fn witness(inst: &MercerInstance, attempt: u64, seed: Option<u64>, gap: f64, tolerance: f64) -> ClassicWitness {
    ClassicWitness {
        function: inst.function().to_string(),
        bounds: *inst.bounds(),
        attempt,
        seed,
        gap,
        tolerance,
        maps: inst.family().to_specs(),
        operators: inst.operators().iter().map(MatrixJson::from).collect(),
    }
}

/// Cycles through `functions` (default: [`nonconvex_candidates`]); attempt 0
/// for each function is the `½Tr`, `diag(m, M)` instance, later attempts are
/// random. Returns the worst violation seen.
pub fn search_classic_nonconvex(
    functions: Option<Vec<ScalarFunction>>,
    bounds: Option<SpectralBounds>,
    budget: u64,
    seed: u64,
) -> Result<ClassicWitness> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let bounds = bounds.unwrap_or_else(default_classic_bounds);
    let functions = functions.unwrap_or_else(|| nonconvex_candidates(&bounds));
    if functions.is_empty() {
        return Err(Error::InvalidParameter("no candidate functions".into()));
    }
    let shape = InstanceShape {
        mixed: true,
        ..InstanceShape::new(seed, DimRange::new(2, 4)?, DimRange::new(1, 3)?, bounds)
    };
    let canonical_family = sin_half_trace_instance(ScalarFunction::sin())?;
    let mut best: Option<ClassicWitness> = None;
    let mut best_gap = f64::INFINITY;
    for attempt in 0..budget {
        let k = functions.len() as u64;
        let f = functions[(attempt % k) as usize].clone();
        let (inst, trial_seed) = if attempt < k {
            let a = crate::linalg::HermitianOperator::from_real_diagonal(&[bounds.m(), bounds.big_m()]);
            let inst = MercerInstance::new(f, canonical_family.family().clone(), vec![a], bounds)?;
            (inst, None)
        } else {
            let s = shape.sample(attempt)?;
            let inst = MercerInstance::new(f, s.family, s.operators, bounds)?;
            (inst, Some(s.seed))
        };
        let (gap, tol) = classic_gap(&inst)?;
        best_gap = best_gap.min(gap);
        if gap < -tol && best.as_ref().is_none_or(|b| gap < b.gap) {
            best = Some(witness(&inst, attempt, trial_seed, gap, tol));
        }
    }
    best.ok_or(Error::BudgetExhausted {
        budget: budget as usize,
        best_gap,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GWitness {
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub t: f64,
    pub p: f64,
    pub g: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrderWitnesses {
    pub negative: GWitness,
    pub positive: GWitness,
    pub evaluations: u64,
}

/// Exponents tried before random search.
pub const GRID_EXPONENTS: [f64; 6] = [-0.2, -1.0, -0.5, -2.0, -3.0, -0.1];

/// Looks for `p, p' < 0` with opposite signs of the gap between the two
/// refined bounds for `t^p`. The grid on `(m, M)` starts at the midpoint;
/// afterwards `(t, p, m, M)` are drawn at random.
pub fn search_th3_th4_order(m: f64, big_m: f64, budget: u64, seed: u64) -> Result<OrderWitnesses> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    if !(m > 0.0 && m < big_m) {
        return Err(Error::InvalidInterval(format!("need 0 < m < M, got [{m}, {big_m}]")));
    }
    let mut neg: Option<GWitness> = None;
    let mut pos: Option<GWitness> = None;
    let mut best_gap = f64::INFINITY;
    let ts: Vec<f64> = [0.5, 0.25, 0.75, 0.125, 0.875]
        .iter()
        .map(|u| m + u * (big_m - m))
        .collect();
    let grid = ts
        .iter()
        .flat_map(|&t| GRID_EXPONENTS.iter().map(move |&p| (m, big_m, t, p)));
    let mut rng = rng_from_seed(seed);
    let random = std::iter::repeat_with(move || {
        let lo = rng.random_range(0.1..5.0);
        let hi = lo + rng.random_range(0.1..5.0);
        (lo, hi, rng.random_range(lo..hi), -rng.random_range(0.01..5.0))
    });
    for (i, (m, big_m, t, p)) in grid.chain(random).take(budget as usize).enumerate() {
        let g = example35_g(t, m, big_m, p)?;
        let w = GWitness { m, big_m, t, p, g };
        if g < 0.0 && neg.is_none() {
            neg = Some(w);
        } else if g > 0.0 && pos.is_none() {
            pos = Some(w);
        }
        best_gap = best_gap.min(g.abs());
        if let (Some(negative), Some(positive)) = (neg, pos) {
            return Ok(OrderWitnesses {
                negative,
                positive,
                evaluations: i as u64 + 1,
            });
        }
    }
    Err(Error::BudgetExhausted {
        budget: budget as usize,
        best_gap,
    })
}

/// Convenience for callers holding a tolerance: re-checks a witness.
pub fn recheck_classic(w: &ClassicWitness, f: &ScalarFunction) -> Result<f64> {
    let family = crate::posmap::MapFamily::from_specs(&w.maps, Some(w.operators[0].to_matrix()?.nrows()))?;
    let ops = w
        .operators
        .iter()
        .map(crate::linalg::HermitianOperator::try_from)
        .collect::<Result<Vec<_>>>()?;
    let inst = MercerInstance::new(f.clone(), family, ops, w.bounds)?;
    Ok(loewner_compare(&mercer_lhs(&inst)?, &mercer_rhs_classic(&inst)?, w.tolerance)?.gap_min_eigenvalue)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_witness_in_one_attempt() {
        let w = search_classic_nonconvex(Some(vec![ScalarFunction::sin()]), None, 1, 0).unwrap();
        assert_eq!(w.attempt, 0);
        assert!((w.gap + (0.9238795 - 0.8535534)).abs() < 1e-6);
        assert!((recheck_classic(&w, &ScalarFunction::sin()).unwrap() - w.gap).abs() < 1e-12);
    }

    #[test]
    fn default_candidates_start_with_sin() {
        let c = nonconvex_candidates(&default_classic_bounds());
        assert_eq!(c[0], ScalarFunction::sin());
        assert!(c.contains(&ScalarFunction::log()));
        assert!(!c.contains(&ScalarFunction::exp()));
    }

    #[test]
    fn convex_function_exhausts_budget() {
        let r = search_classic_nonconvex(Some(vec![ScalarFunction::exp()]), None, 20, 4);
        assert!(matches!(r, Err(Error::BudgetExhausted { budget: 20, .. })));
    }

    #[test]
    fn order_witnesses_on_grid() {
        let w = search_th3_th4_order(1.0, 3.0, 2, 0).unwrap();
        assert_eq!(w.evaluations, 2);
        assert_eq!((w.negative.t, w.negative.p), (2.0, -0.2));
        assert_eq!((w.positive.t, w.positive.p), (2.0, -1.0));
        assert!(matches!(
            search_th3_th4_order(1.0, 3.0, 1, 0),
            Err(Error::BudgetExhausted { .. })
        ));
    }
}
