mod common;

use common::*;
use mercer_core::linalg::{loewner_compare_default, spectrum_range, Relation};
use mercer_core::posmap::{family_sum, unitality_defect, MapSpec};
use mercer_core::MapFamily;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn positivity(seed in any::<u64>(), n in 1usize..4, h in 1usize..6, k in 1usize..6, mixed in any::<bool>()) {
        let fam = family(seed, n, h, k, mixed);
        let b = bounds(0.0, 2.0);
        for (i, map) in fam.maps().iter().enumerate() {
            let a = hermitian(seed.wrapping_add(i as u64), h, &b);
            let out = map.apply(&a).unwrap();
            prop_assert!(spectrum_range(&out).unwrap().0 >= -1e-12);
        }
    }

    #[test]
    fn unital_families_preserve_spectral_bounds(seed in any::<u64>(), n in 1usize..5, h in 1usize..6, k in 1usize..5) {
        let fam = family(seed, n, h, k, seed % 2 == 0);
        prop_assert!(unitality_defect(&fam) <= 1e-9);
        let b = bounds(-1.0, 2.0);
        let ops: Vec<_> = (0..n).map(|i| hermitian(seed ^ (i as u64 + 1), h, &b)).collect();
        let (lo, hi) = spectrum_range(&family_sum(&fam, &ops).unwrap()).unwrap();
        prop_assert!(lo >= -1.0 - 1e-9 && hi <= 2.0 + 1e-9);
    }

    #[test]
    fn linearity(seed in any::<u64>(), s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let fam = family(seed, 2, 4, 3, true);
        let b = bounds(-1.0, 1.0);
        let (a, c) = (hermitian(seed, 4, &b), hermitian(seed ^ 7, 4, &b));
        for map in fam.maps() {
            let combo = map.apply(&(&(&a * s) + &(&c * t))).unwrap();
            let split = &(&map.apply(&a).unwrap() * s) + &(&map.apply(&c).unwrap() * t);
            prop_assert!(op_diff(&combo, &split) < 1e-11);
        }
    }

    #[test]
    fn monotone_in_loewner_order(seed in any::<u64>(), gap in 0.0f64..1.0) {
        let fam = family(seed, 3, 4, 2, false);
        let b = bounds(0.0, 1.0);
        let a = hermitian(seed, 4, &b);
        for map in fam.maps() {
            let v = loewner_compare_default(&map.apply(&a).unwrap(), &map.apply(&a.shifted(gap)).unwrap()).unwrap();
            prop_assert!(v.relation.is_le());
        }
    }
}

#[test]
fn specs_round_trip_through_json() {
    for seed in 0..20 {
        let fam = family(seed, 3, 3, 3, true);
        let json = serde_json::to_string(&fam.to_specs()).unwrap();
        let back = MapFamily::from_json(&json, Some(3)).unwrap();
        let b = bounds(0.0, 1.0);
        let ops: Vec<_> = (0..3).map(|i| hermitian(seed * 3 + i, 3, &b)).collect();
        let d = op_diff(&family_sum(&fam, &ops).unwrap(), &family_sum(&back, &ops).unwrap());
        assert!(d < 1e-12);
        let _: Vec<MapSpec> = serde_json::from_str(&json).unwrap();
    }
}

#[test]
fn normalized_identity_image_is_identity() {
    let fam = family(42, 4, 5, 3, true);
    let unit = fam.unit_image().unwrap();
    let v = loewner_compare_default(&unit, &mercer_core::HermitianOperator::identity(3)).unwrap();
    assert_eq!(v.relation, Relation::Equal);
}
