//! Seeded instance generators.
//!
//! The stream is ChaCha8 seeded through `SeedableRng::seed_from_u64`; trial
//! `i` of a run with master seed `s` uses seed `s ^ i`.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::funcat::SpectralBounds;
use crate::linalg::{CMatrix, HermitianOperator, C64};
use crate::posmap::{MapFamily, PositiveLinearMap};

/// Redraws allowed when a family's normalizer is singular.
pub const MAX_FAMILY_ATTEMPTS: usize = 100;

pub type TrialRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn trial_seed(master: u64, index: u64) -> u64 {
    master ^ index
}

pub fn complex_gaussian(rows: usize, cols: usize, rng: &mut TrialRng) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(re * scale, im * scale)
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn random_unitary(dim: usize, rng: &mut TrialRng) -> CMatrix {
    let qr = complex_gaussian(dim, dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U diag(λ) U*` with `λ_j` uniform on `[m, M]`; `force_endpoints` pins
/// `λ_0 = m` and `λ_1 = M` (only `λ_0 = m` when `dim = 1`).
pub fn random_hermitian(
    dim: usize,
    bounds: &SpectralBounds,
    rng: &mut TrialRng,
    force_endpoints: bool,
) -> Result<HermitianOperator> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut eig: Vec<f64> = (0..dim)
        .map(|_| rng.random_range(bounds.m()..=bounds.big_m()))
        .collect();
    if force_endpoints {
        eig[0] = bounds.m();
        if dim > 1 {
            eig[1] = bounds.big_m();
        }
    }
    if dim == 1 {
        return Ok(HermitianOperator::from_real_diagonal(&eig));
    }
    let u = random_unitary(dim, rng);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        eig.iter().map(|&l| C64::new(l, 0.0)),
    ));
    Ok(HermitianOperator::hermitized(&u * d * u.adjoint()))
}

fn random_maps(
    n: usize,
    dim_h: usize,
    dim_k: usize,
    rng: &mut TrialRng,
    mixed: bool,
) -> Result<Vec<PositiveLinearMap>> {
    let mut maps = Vec::with_capacity(n);
    if mixed {
        maps.push(PositiveLinearMap::weighted_trace(
            rng.random_range(0.25..1.0),
            dim_h,
            dim_k,
        )?);
        if dim_h == dim_k && dim_h > 1 && n > 1 {
            let cut = rng.random_range(1..dim_h);
            maps.push(PositiveLinearMap::pinching(vec![
                (0..cut).collect(),
                (cut..dim_h).collect(),
            ])?);
        }
    }
    while maps.len() < n {
        maps.push(PositiveLinearMap::compression(complex_gaussian(dim_h, dim_k, rng))?);
    }
    Ok(maps)
}

/// `n` random positive maps `M_{dim_h} → M_{dim_k}` made unital by the
/// congruence normalization. With `mixed`, the first map is a weighted trace
/// and, for square families, the second a two-block pinching.
pub fn random_unital_family(
    n: usize,
    dim_h: usize,
    dim_k: usize,
    rng: &mut TrialRng,
    mixed: bool,
) -> Result<MapFamily> {
    if n == 0 || dim_h == 0 || dim_k == 0 {
        return Err(Error::InvalidParameter(
            "family size and dimensions must be positive".into(),
        ));
    }
    if !mixed && n * dim_h < dim_k {
        // Σ V_i* V_i has rank at most n·dim_h
        return Err(Error::InvalidParameter(format!(
            "{n} compressions from dimension {dim_h} cannot be unital on dimension {dim_k}"
        )));
    }
    let mut last = Error::SingularNormalizer { min_eigenvalue: 0.0 };
    for _ in 0..MAX_FAMILY_ATTEMPTS {
        match MapFamily::normalized(random_maps(n, dim_h, dim_k, rng, mixed)?) {
            Ok(fam) => return Ok(fam),
            Err(e @ Error::SingularNormalizer { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
