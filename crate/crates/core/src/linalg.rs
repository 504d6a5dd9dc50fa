//! Dense Hermitian matrix algebra.
//!
//! Everything above this module manipulates [`HermitianOperator`] values: the
//! eigendecomposition backs the functional calculus `f(A) = U diag(f(λ)) U*`
//! and the Loewner comparison `A ⪯ B ⇔ λ_min(B − A) ≥ −tol`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcat::{ScalarFunction, SpectralBounds};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Relative self-adjointness tolerance accepted on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 10_000;

fn max_abs(mat: &CMatrix) -> f64 {
    mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A dense complex self-adjoint matrix.
///
/// The stored matrix is exactly Hermitian: construction averages `A` with
/// `A*` after checking that the two agree up to representation noise.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let asymmetry = max_abs(&(&mat - mat.adjoint()));
        if !asymmetry.is_finite() || asymmetry > HERMITIAN_TOL * (1.0 + max_abs(&mat)) {
            return Err(Error::NonHermitianInput { asymmetry });
        }
        Ok(Self::hermitized(mat))
    }

    /// Symmetrizes a matrix known to be Hermitian up to rounding.
    pub(crate) fn hermitized(mat: CMatrix) -> Self {
        let adj = mat.adjoint();
        Self {
            mat: (mat + adj).scale(0.5),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            mat: CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    /// `c · I` of the given dimension.
    pub fn scalar(dim: usize, c: f64) -> Self {
        Self::identity(dim) * c
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// The single entry of a 1×1 operator.
    pub fn as_scalar(&self) -> Option<f64> {
        (self.dim() == 1).then(|| self.mat[(0, 0)].re)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.mat)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Operator 2-norm, `max |λ_i|`.
    pub fn spectral_norm(&self) -> Result<f64> {
        let (lo, hi) = spectrum_range(self)?;
        Ok(lo.abs().max(hi.abs()))
    }

    /// `A²`, re-symmetrized.
    pub fn square(&self) -> Self {
        Self::hermitized(&self.mat * &self.mat)
    }

    /// `A + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut mat = self.mat.clone();
        for i in 0..self.dim() {
            mat[(i, i)] += C64::new(c, 0.0);
        }
        Self { mat }
    }

    /// `X* A X` for a `dim × k` matrix `X`.
    pub fn congruence(&self, x: &CMatrix) -> Result<Self> {
        if x.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.nrows(),
            });
        }
        Ok(Self::hermitized(x.adjoint() * &self.mat * x))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self - other)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Add for HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        &self + &rhs
    }
}

impl Sub for HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        &self - &rhs
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        HermitianOperator {
            mat: self.mat.map(|z| z * rhs),
        }
    }
}

impl Mul<f64> for HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        &self * rhs
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self * -1.0
    }
}

/// Eigenvalues in ascending order with matching unitary eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// `U diag(values) U*`.
    pub fn recompose(&self, values: &[f64]) -> HermitianOperator {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        HermitianOperator::hermitized(scaled * u.adjoint())
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn eigenvector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j).iter().copied().collect()
    }
}

pub fn spectral_decompose(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = a.dim();
    if n == 1 {
        return Ok(SpectralDecomposition {
            eigenvalues: vec![a.mat[(0, 0)].re],
            eigenvectors: CMatrix::identity(1, 1),
        });
    }
    let eig = SymmetricEigen::try_new(a.mat.clone(), f64::EPSILON, EIGEN_MAX_ITER).ok_or(Error::EigenNoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Validates a raw matrix and decomposes it.
pub fn spectral_decompose_matrix(mat: CMatrix) -> Result<SpectralDecomposition> {
    spectral_decompose(&HermitianOperator::new(mat)?)
}

/// `(λ_min, λ_max)`.
pub fn spectrum_range(a: &HermitianOperator) -> Result<(f64, f64)> {
    let d = spectral_decompose(a)?;
    Ok((d.lambda_min(), d.lambda_max()))
}

/// Functional calculus restricted to `[m, M]`.
///
/// Eigenvalues within `clamp_tol` of the interval are clamped onto it; those
/// farther out are rejected.
pub fn apply_scalar_function(
    f: &ScalarFunction,
    a: &HermitianOperator,
    domain: &SpectralBounds,
) -> Result<HermitianOperator> {
    apply_clamped(a, domain, |t| f.try_eval(t))
}

/// Functional calculus with an arbitrary fallible evaluator on `[m, M]`.
pub fn apply_clamped<F>(a: &HermitianOperator, domain: &SpectralBounds, f: F) -> Result<HermitianOperator>
where
    F: Fn(f64) -> Result<f64>,
{
    let d = spectral_decompose(a)?;
    let tol = domain.clamp_tol();
    let values = d
        .eigenvalues
        .iter()
        .map(|&lam| {
            if lam < domain.m() - tol || lam > domain.big_m() + tol {
                return Err(Error::SpectrumOutOfDomain {
                    eigenvalue: lam,
                    m: domain.m(),
                    big_m: domain.big_m(),
                });
            }
            f(domain.clamp(lam))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(d.recompose(&values))
}

/// Functional calculus on the natural domain of `f` (used for inverses,
/// whose argument interval is not known in advance).
pub fn apply_on_natural_domain(f: &ScalarFunction, a: &HermitianOperator) -> Result<HermitianOperator> {
    let d = spectral_decompose(a)?;
    let dom = f.natural_domain();
    let values = d
        .eigenvalues
        .iter()
        .map(|&lam| {
            let tol = 1e-9 * (1.0 + lam.abs());
            let t = dom.snap(lam, tol).ok_or_else(|| Error::FunctionDomainError {
                function: f.to_string(),
                t: lam,
            })?;
            f.try_eval(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(d.recompose(&values))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Equal,
    LessEqual,
    GreaterEqual,
    Incomparable,
}

impl Relation {
    /// `A ⪯ B` holds (including equality).
    pub fn is_le(self) -> bool {
        matches!(self, Relation::Equal | Relation::LessEqual)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, Relation::Equal | Relation::GreaterEqual)
    }

    pub fn reversed(self) -> Self {
        match self {
            Relation::LessEqual => Relation::GreaterEqual,
            Relation::GreaterEqual => Relation::LessEqual,
            r => r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&[C64]> for ComplexVector {
    fn from(v: &[C64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }
}

/// Loewner-order verdict for a pair `(A, B)`.
///
/// `gap_min_eigenvalue` is always `λ_min(B − A)` and `witness_vector` is a
/// unit eigenvector attaining it; `reverse_gap` is `λ_min(A − B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub gap_min_eigenvalue: f64,
    pub reverse_gap: f64,
    pub tolerance: f64,
    pub witness_vector: ComplexVector,
}

/// `1e-9 · (1 + max(‖A‖₂, ‖B‖₂))`.
pub fn default_tolerance(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    Ok(1e-9 * (1.0 + a.spectral_norm()?.max(b.spectral_norm()?)))
}

pub fn loewner_compare(a: &HermitianOperator, b: &HermitianOperator, tol_abs: f64) -> Result<OrderVerdict> {
    let diff = b.checked_sub(a)?;
    let d = spectral_decompose(&diff)?;
    let gap = d.lambda_min();
    let reverse_gap = -d.lambda_max();
    let le = gap >= -tol_abs;
    let ge = reverse_gap >= -tol_abs;
    // Both gaps within tolerance already bound ‖B − A‖₂ by tol, below the tol·dim cap.
    let relation = match (le, ge) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::LessEqual,
        (false, true) => Relation::GreaterEqual,
        (false, false) => Relation::Incomparable,
    };
    Ok(OrderVerdict {
        relation,
        gap_min_eigenvalue: gap,
        reverse_gap,
        tolerance: tol_abs,
        witness_vector: ComplexVector::from(d.eigenvector(0).as_slice()),
    })
}

/// [`loewner_compare`] at [`default_tolerance`].
pub fn loewner_compare_default(a: &HermitianOperator, b: &HermitianOperator) -> Result<OrderVerdict> {
    let tol = default_tolerance(a, b)?;
    loewner_compare(a, b, tol)
}

/// Matrix exchange format: `{"dim": n, "re": [[...]], "im": [[...]]}`, row-major.
///
/// Rectangular matrices (compression isometries) omit or ignore `dim`; a
/// missing `im` reads as zeros.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(mat: &CMatrix) -> Self {
        let rows = |part: fn(&C64) -> f64| {
            (0..mat.nrows())
                .map(|i| (0..mat.ncols()).map(|j| part(&mat[(i, j)])).collect())
                .collect()
        };
        Self {
            dim: (mat.nrows() == mat.ncols()).then_some(mat.nrows()),
            re: rows(|z| z.re),
            im: Some(rows(|z| z.im)),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Parse("empty matrix".into()));
        }
        if let Some(dim) = self.dim {
            if dim != rows || dim != cols {
                return Err(Error::Parse(format!("dim {dim} does not match {rows}x{cols} entries")));
            }
        }
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == rows && m.iter().all(|r| r.len() == cols);
        if !shape_ok(&self.re) || self.im.as_ref().is_some_and(|im| !shape_ok(im)) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            C64::new(self.re[i][j], im)
        }))
    }
}

impl From<&HermitianOperator> for MatrixJson {
    fn from(a: &HermitianOperator) -> Self {
        Self::from_matrix(a.matrix())
    }
}

impl TryFrom<&MatrixJson> for HermitianOperator {
    type Error = Error;
    fn try_from(m: &MatrixJson) -> Result<Self> {
        HermitianOperator::new(m.to_matrix()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn decompose_diagonal() {
        let d = spectral_decompose(&HermitianOperator::from_real_diagonal(&[2.0, 1.0])).unwrap();
        assert!(close(d.eigenvalues[0], 1.0, 1e-14) && close(d.eigenvalues[1], 2.0, 1e-14));
        // U is a permutation (up to phases)
        for z in d.eigenvectors.iter() {
            assert!(close(z.norm(), 0.0, 1e-12) || close(z.norm(), 1.0, 1e-12));
        }
    }

    #[test]
    fn decompose_identity_and_swap() {
        let d = spectral_decompose(&HermitianOperator::identity(3)).unwrap();
        assert!(d.eigenvalues.iter().all(|&l| close(l, 1.0, 1e-14)));

        let swap = HermitianOperator::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let d = spectral_decompose(&swap).unwrap();
        assert!(close(d.eigenvalues[0], -1.0, 1e-14) && close(d.eigenvalues[1], 1.0, 1e-14));
        let back = d.recompose(&d.eigenvalues);
        assert!((back.matrix() - swap.matrix()).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.5);
        assert!(matches!(
            spectral_decompose_matrix(m),
            Err(Error::NonHermitianInput { .. })
        ));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(
            HermitianOperator::new(rect),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tiny_asymmetry_is_accepted_and_removed() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = C64::new(0.25, 1e-14);
        m[(1, 0)] = C64::new(0.25, 0.0);
        let a = HermitianOperator::new(m).unwrap();
        assert_eq!(a.matrix()[(0, 1)], a.matrix()[(1, 0)].conj());
    }

    #[test]
    fn apply_functions_on_example_operator() {
        let a = HermitianOperator::from_real_diagonal(&[FRAC_PI_4, FRAC_PI_2]);
        let bounds = SpectralBounds::new(FRAC_PI_4, FRAC_PI_2).unwrap();

        let id = apply_scalar_function(&ScalarFunction::identity(), &a, &bounds).unwrap();
        assert!((id.matrix() - a.matrix()).norm() < 1e-14);

        let sq = apply_scalar_function(&ScalarFunction::square(), &a, &bounds).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        let expected = HermitianOperator::from_real_diagonal(&[pi2 / 16.0, pi2 / 4.0]);
        assert!((sq.matrix() - expected.matrix()).norm() < 1e-13);

        let s = apply_scalar_function(&ScalarFunction::sin(), &a, &bounds).unwrap();
        assert!(close(s.matrix()[(0, 0)].re, std::f64::consts::FRAC_1_SQRT_2, 1e-15));
        assert!(close(s.matrix()[(1, 1)].re, 1.0, 1e-14));
    }

    #[test]
    fn spectrum_out_of_domain() {
        let a = HermitianOperator::from_real_diagonal(&[1.0, 2.5]);
        let bounds = SpectralBounds::new(1.0, 2.0).unwrap();
        let err = apply_scalar_function(&ScalarFunction::exp(), &a, &bounds).unwrap_err();
        assert!(matches!(err, Error::SpectrumOutOfDomain { .. }));

        // inside the clamp band is fine and gets clamped
        let a = HermitianOperator::from_real_diagonal(&[1.0 - 1e-12, 2.0]);
        let r = apply_scalar_function(&ScalarFunction::identity(), &a, &bounds).unwrap();
        assert_eq!(r.matrix()[(0, 0)].re, 1.0);
    }

    #[test]
    fn function_domain_error_surfaces() {
        let a = HermitianOperator::from_real_diagonal(&[-1.0, 1.0]);
        let bounds = SpectralBounds::new(-1.0, 1.0).unwrap();
        let err = apply_scalar_function(&ScalarFunction::log(), &a, &bounds).unwrap_err();
        assert!(matches!(err, Error::FunctionDomainError { .. }));
    }

    #[test]
    fn compare_examples() {
        let a = HermitianOperator::from_real_diagonal(&[1.0, 2.0]);
        assert_eq!(loewner_compare(&a, &a, 1e-9).unwrap().relation, Relation::Equal);

        let b = HermitianOperator::from_real_diagonal(&[2.0, 3.0]);
        let v = loewner_compare(&a, &b, 1e-9).unwrap();
        assert_eq!(v.relation, Relation::LessEqual);
        assert!(close(v.gap_min_eigenvalue, 1.0, 1e-14));

        let c = HermitianOperator::from_real_diagonal(&[1.0, 3.0]);
        let d = HermitianOperator::from_real_diagonal(&[2.0, 2.0]);
        let v = loewner_compare(&c, &d, 1e-9).unwrap();
        assert_eq!(v.relation, Relation::Incomparable);
        assert!(close(v.gap_min_eigenvalue, -1.0, 1e-14));
        // witness is e₂, where d − c = diag(1, −1) attains −1
        assert!(close(v.witness_vector.re[1].abs(), 1.0, 1e-12));

        let three = HermitianOperator::identity(3);
        assert!(matches!(
            loewner_compare(&a, &three, 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectrum_range_examples() {
        let a = HermitianOperator::from_real_diagonal(&[FRAC_PI_4, FRAC_PI_2]);
        let (lo, hi) = spectrum_range(&a).unwrap();
        assert!(close(lo, FRAC_PI_4, 1e-15) && close(hi, FRAC_PI_2, 1e-15));
        assert_eq!(spectrum_range(&HermitianOperator::identity(4)).unwrap(), (1.0, 1.0));
        let swap = HermitianOperator::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (lo, hi) = spectrum_range(&swap).unwrap();
        assert!(close(lo, -1.0, 1e-14) && close(hi, 1.0, 1e-14));
    }

    #[test]
    fn matrix_json_round_trip() {
        let json = r#"{"dim":2,"re":[[1.0,0.5],[0.5,2.0]],"im":[[0.0,-0.25],[0.25,0.0]]}"#;
        let m: MatrixJson = serde_json::from_str(json).unwrap();
        let a = HermitianOperator::try_from(&m).unwrap();
        assert_eq!(a.matrix()[(0, 1)], C64::new(0.5, -0.25));
        assert_eq!(MatrixJson::from(&a), m);

        let bad: MatrixJson = serde_json::from_str(r#"{"dim":3,"re":[[1.0]]}"#).unwrap();
        assert!(HermitianOperator::try_from(&bad).is_err());
    }
}
