mod common;

use common::*;
use mercer_core::funcat::curvature_bounds;
use mercer_core::harness::{run_quasi_suite, DimRange, InstanceShape, QuasiCheck, QuasiConfig};
use mercer_core::linalg::{apply_scalar_function, Relation};
use mercer_core::mercer::{diamond_plain, mercer_lhs, mercer_rhs_classic, refined_bounds, MercerInstance};
use mercer_core::posmap::PositiveLinearMap;
use mercer_core::quasi::{
    compare_means, diamond_phi, incomparability_probe, mercer_quasi_mean, th3_bound, th3_bound_with, th4_sandwich,
    QuasiArithmeticSpec, Th3Side,
};
use mercer_core::{HermitianOperator, MapFamily, ScalarFunction, SpectralBounds};

fn f(spec: &str) -> ScalarFunction {
    spec.parse().unwrap()
}

fn shape(seed: u64, b: SpectralBounds) -> InstanceShape {
    InstanceShape::new(seed, DimRange::new(2, 8).unwrap(), DimRange::new(1, 4).unwrap(), b)
}

fn run(phi: &str, psi: &str, checks: Vec<QuasiCheck>, trials: u64) -> mercer_core::harness::RunSummary {
    let config = QuasiConfig {
        shape: shape(17, bounds(1.0, 3.0)),
        phi: f(phi),
        psi: f(psi),
        checks,
    };
    let s = run_quasi_suite(&config, trials).unwrap();
    assert!(
        s.is_clean(),
        "phi={phi} psi={psi}: {:?}",
        &s.violations[..s.violations.len().min(3)]
    );
    s
}

#[test]
fn q1_mean_ordering() {
    for (phi, psi) in [("sqrt", "id"), ("log", "id"), ("square", "id"), ("id", "inv")] {
        let s = run(phi, psi, vec![QuasiCheck::Order], 500);
        assert_eq!(s.checks, 500);
    }
    let spec = QuasiArithmeticSpec::new(f("square"), f("id"), bounds(1.0, 3.0)).unwrap();
    let s = shape(1, bounds(1.0, 3.0)).sample(3).unwrap();
    assert_eq!(
        compare_means(&spec, &s.family, &s.operators).unwrap().predicted,
        Relation::GreaterEqual
    );
}

#[test]
fn q2_th3_bounds() {
    for (phi, psi) in [("sqrt", "id"), ("log", "id"), ("square", "id"), ("inv", "id")] {
        run(phi, psi, vec![QuasiCheck::Th3Alpha, QuasiCheck::Th3Beta], 300);
    }
    // operator decreasing psi^-1: direction reversed, beta side may leave the domain of 1/t
    let s = run("id", "inv", vec![QuasiCheck::Th3Alpha, QuasiCheck::Th3Beta], 300);
    assert!(s.checks >= 300);
}

#[test]
fn q3_th4_sandwich() {
    for (phi, psi) in [
        ("log", "id"),
        ("inv", "id"),
        ("pow:p=-0.5", "id"),
        ("log", "square"),
        ("log", "exp"),
    ] {
        let s = run(phi, psi, vec![QuasiCheck::Th4], 300);
        assert_eq!(s.checks, 600);
    }
}

#[test]
fn q4_identity_pair_collapses() {
    let b = bounds(0.5, 3.0);
    let id = f("id");
    for trial in 0..100 {
        let s = shape(23, b).sample(trial).unwrap();
        let mean = mercer_quasi_mean(&id, &s.family, &s.operators, &b).unwrap();
        let inst = MercerInstance::new(f("exp"), s.family.clone(), s.operators.clone(), b).unwrap();
        let reflected = (-inst.sum()).shifted(b.m() + b.big_m());
        assert!(op_diff(&mean, &reflected) < 1e-10);
        assert!(
            op_diff(
                &diamond_phi(&id, &s.family, &s.operators, &b).unwrap(),
                &diamond_plain(&inst).unwrap()
            ) < 1e-10
        );

        // phi = id: psi applied to both means gives the two sides of the Mercer inequality for psi
        for psi in ["exp", "square", "pow:p=3"] {
            let spec = QuasiArithmeticSpec::new(id.clone(), f(psi), b).unwrap();
            let inst = inst.with_function(f(psi));
            let c = compare_means(&spec, &s.family, &s.operators).unwrap();
            let psi_phi = apply_on(&f(psi), &c.phi_mean, &b);
            assert!(op_diff(&psi_phi, &mercer_lhs(&inst).unwrap()) < 1e-9);
            let psi_psi = apply_on(&f(psi), &c.psi_mean, &b);
            assert!(op_diff(&psi_psi, &mercer_rhs_classic(&inst).unwrap()) < 1e-9);

            let curv = curvature_bounds(&f(psi), &b).unwrap();
            let th3 = th3_bound_with(&spec, &s.family, &s.operators, Th3Side::AlphaLowerRefined, curv.alpha).unwrap();
            let (_, upper) = refined_bounds(&inst, &curv).unwrap();
            assert!(op_diff(&apply_on(&f(psi), &th3.bound, &b), &upper) < 1e-9);
        }
    }
}

fn apply_on(g: &ScalarFunction, a: &HermitianOperator, b: &SpectralBounds) -> HermitianOperator {
    apply_scalar_function(g, a, b).unwrap()
}

#[test]
fn q5_probe_sign_flip() {
    let t: Vec<f64> = (0..=20).map(|i| 1.0 + 0.1 * i as f64).collect();
    let table = incomparability_probe(1.0, 3.0, &[-0.2, -1.0], &t).unwrap();
    assert!(table.sign_flip_at(2.0));
    assert_eq!(table.sign_at(2.0, -0.2), Some(-1));
    assert_eq!(table.sign_at(2.0, -1.0), Some(1));
    assert!((table.rows.iter().find(|r| r.t == 2.0 && r.p == -0.2).unwrap().g + 0.0052909).abs() < 1e-6);
    assert!((table.rows.iter().find(|r| r.t == 2.0 && r.p == -1.0).unwrap().g - 0.0522794).abs() < 1e-6);
    for r in table.rows.iter().filter(|r| r.t == 1.0 || r.t == 3.0) {
        assert_eq!(r.sign, 0);
    }
}

fn half_trace() -> MapFamily {
    MapFamily::new(vec![PositiveLinearMap::weighted_trace(0.5, 2, 1).unwrap()]).unwrap()
}

#[test]
fn hand_derived_witnesses() {
    let b = bounds(1.0, 3.0);
    let a = vec![HermitianOperator::from_real_diagonal(&[1.0, 3.0])];
    let scalar = |x: &HermitianOperator| x.as_scalar().unwrap();
    let l3 = 3f64.ln();

    let spec = QuasiArithmeticSpec::new(f("log"), f("id"), b).unwrap();
    let c = compare_means(&spec, &half_trace(), &a).unwrap();
    assert!((scalar(&c.phi_mean) - 3f64.sqrt()).abs() < 1e-6 && (scalar(&c.psi_mean) - 2.0).abs() < 1e-6);
    assert!(c.holds);

    let sq = mercer_quasi_mean(&f("square"), &half_trace(), &a, &b).unwrap();
    assert!((scalar(&sq) - 5f64.sqrt()).abs() < 1e-12);

    let exact = th3_bound_with(&spec, &half_trace(), &a, Th3Side::AlphaLowerRefined, 1.0).unwrap();
    assert!((scalar(&exact.bound) - (2.0 - l3 * l3 / 8.0)).abs() < 1e-12);
    let sampled = th3_bound(&spec, &half_trace(), &a, Th3Side::AlphaLowerRefined).unwrap();
    assert!((scalar(&sampled.bound) - scalar(&exact.bound)).abs() < 1e-6);
    assert!(scalar(&sampled.bound) >= 3f64.sqrt());

    let (middle, report) = th4_sandwich(&spec, &half_trace(), &a).unwrap();
    assert!((scalar(&middle) - 3f64.sqrt()).abs() < 1e-12);
    assert!(report.all_hold());
}

#[test]
fn constant_spectrum_reduces_to_scalars() {
    let b = bounds(1.0, 3.0);
    let spec = QuasiArithmeticSpec::new(f("log"), f("id"), b).unwrap();
    for c in [1.0, 1.7, 2.5, 3.0] {
        let s = shape(2, b).sample(1).unwrap();
        let ops: Vec<_> = s
            .operators
            .iter()
            .map(|a| HermitianOperator::scalar(a.dim(), c))
            .collect();
        let (middle, report) = th4_sandwich(&spec, &s.family, &ops).unwrap();
        let k = s.family.dim_out();
        // T = log(c)·I, so every side is a multiple of I
        let x = c.ln() / 3f64.ln();
        let want = 3f64.powf(1.0 - x);
        assert!(op_diff(&middle, &HermitianOperator::scalar(k, want)) < 1e-10);
        assert!(op_diff(report.side("mean_phi").unwrap(), &HermitianOperator::scalar(k, 3.0 / c)) < 1e-10);
        assert!(op_diff(report.side("mean_psi").unwrap(), &HermitianOperator::scalar(k, 4.0 - c)) < 1e-10);
        assert!(report.all_hold());
    }
}
