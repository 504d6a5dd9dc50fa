#![allow(dead_code)]

use mercer_core::harness::generate::{random_hermitian, random_unital_family, rng_from_seed};
use mercer_core::linalg::{spectrum_range, CMatrix};
use mercer_core::{HermitianOperator, MapFamily, SpectralBounds};

pub fn bounds(m: f64, big_m: f64) -> SpectralBounds {
    SpectralBounds::new(m, big_m).unwrap()
}

pub fn hermitian(seed: u64, dim: usize, b: &SpectralBounds) -> HermitianOperator {
    random_hermitian(dim, b, &mut rng_from_seed(seed), seed.is_multiple_of(10)).unwrap()
}

/// Compression-only draws need `n·dim_h ≥ dim_k`; `dim_k` is capped to that.
pub fn family(seed: u64, n: usize, dim_h: usize, dim_k: usize, mixed: bool) -> MapFamily {
    let dim_k = if mixed { dim_k } else { dim_k.min(n * dim_h) };
    random_unital_family(n, dim_h, dim_k, &mut rng_from_seed(seed), mixed).unwrap()
}

pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn op_diff(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    (a - b).spectral_norm().unwrap()
}

pub fn lambda_min(a: &HermitianOperator) -> f64 {
    spectrum_range(a).unwrap().0
}
