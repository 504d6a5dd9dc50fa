//! Positive linear maps `Φ : B(H) → B(K)` and unital families of them.
//!
//! Maps are built from structurally positive pieces (compressions, weighted
//! traces, pinchings, congruences and nonnegative combinations), so positivity
//! never has to be checked at runtime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_decompose, CMatrix, HermitianOperator, MatrixJson, C64};

/// Eigenvalue floor below which `Σ Φ_i(I)` is treated as singular.
pub const SINGULAR_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    /// `A ↦ V* A V` with `V` of shape `dim_in × dim_out`.
    Compression { v: CMatrix },
    /// `A ↦ w · Tr(A) · I_K`.
    WeightedTrace { w: f64 },
    /// `A ↦ Σ_b P_b A P_b` over a partition of the basis indices.
    Pinching { blocks: Vec<Vec<usize>> },
    /// `A ↦ C* Φ(A) C`.
    Congruence { inner: Box<PositiveLinearMap>, c: CMatrix },
    /// `A ↦ Σ_j c_j Φ_j(A)` with `c_j ≥ 0`.
    ScaledSum { terms: Vec<(f64, PositiveLinearMap)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositiveLinearMap {
    kind: MapKind,
    dim_in: usize,
    dim_out: usize,
}

fn nonneg(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} must be a nonnegative real, got {x}"
        )))
    }
}

impl PositiveLinearMap {
    pub fn compression(v: CMatrix) -> Result<Self> {
        if v.nrows() == 0 || v.ncols() == 0 {
            return Err(Error::InvalidParameter("compression matrix is empty".into()));
        }
        let (dim_in, dim_out) = (v.nrows(), v.ncols());
        Ok(Self {
            kind: MapKind::Compression { v },
            dim_in,
            dim_out,
        })
    }

    /// Compression by the first `dim_out` standard basis vectors scaled by `s`.
    pub fn corner(dim_in: usize, dim_out: usize, s: f64) -> Result<Self> {
        Self::compression(CMatrix::from_fn(dim_in, dim_out, |i, j| {
            C64::new(if i == j { s } else { 0.0 }, 0.0)
        }))
    }

    pub fn weighted_trace(w: f64, dim_in: usize, dim_out: usize) -> Result<Self> {
        nonneg(w, "trace weight")?;
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidParameter("trace map dimensions must be positive".into()));
        }
        Ok(Self {
            kind: MapKind::WeightedTrace { w },
            dim_in,
            dim_out,
        })
    }

    pub fn pinching(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let dim: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; dim];
        for &i in blocks.iter().flatten() {
            if i >= dim || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter(format!(
                    "pinching blocks must partition 0..{dim}; bad index {i}"
                )));
            }
        }
        if dim == 0 || blocks.iter().any(Vec::is_empty) {
            return Err(Error::InvalidParameter("pinching blocks must be nonempty".into()));
        }
        Ok(Self {
            kind: MapKind::Pinching { blocks },
            dim_in: dim,
            dim_out: dim,
        })
    }

    pub fn congruence(inner: PositiveLinearMap, c: CMatrix) -> Result<Self> {
        if c.nrows() != inner.dim_out {
            return Err(Error::DimensionMismatch {
                expected: inner.dim_out,
                found: c.nrows(),
            });
        }
        let (dim_in, dim_out) = (inner.dim_in, c.ncols());
        Ok(Self {
            kind: MapKind::Congruence {
                inner: Box::new(inner),
                c,
            },
            dim_in,
            dim_out,
        })
    }

    pub fn scaled_sum(terms: Vec<(f64, PositiveLinearMap)>) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("scaled sum needs at least one term".into()))?;
        let (dim_in, dim_out) = (first.dim_in, first.dim_out);
        for (c, map) in &terms {
            nonneg(*c, "sum coefficient")?;
            if map.dim_in != dim_in || map.dim_out != dim_out {
                return Err(Error::DimensionMismatch {
                    expected: dim_in,
                    found: map.dim_in,
                });
            }
        }
        Ok(Self {
            kind: MapKind::ScaledSum { terms },
            dim_in,
            dim_out,
        })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn apply(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        if a.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: a.dim(),
            });
        }
        Ok(match &self.kind {
            MapKind::Compression { v } => a.congruence(v)?,
            MapKind::WeightedTrace { w } => HermitianOperator::scalar(self.dim_out, w * a.trace()),
            MapKind::Pinching { blocks } => {
                let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
                for block in blocks {
                    for &i in block {
                        for &j in block {
                            out[(i, j)] = a.matrix()[(i, j)];
                        }
                    }
                }
                HermitianOperator::hermitized(out)
            }
            MapKind::Congruence { inner, c } => inner.apply(a)?.congruence(c)?,
            MapKind::ScaledSum { terms } => {
                let mut acc = HermitianOperator::zeros(self.dim_out);
                for (coef, map) in terms {
                    acc = acc + map.apply(a)? * *coef;
                }
                acc
            }
        })
    }

    /// Exchange-format description of this map.
    pub fn to_spec(&self) -> MapSpec {
        match &self.kind {
            MapKind::Compression { v } => MapSpec::Compression {
                v: MatrixJson::from_matrix(v),
            },
            MapKind::WeightedTrace { w } => MapSpec::Trace {
                w: *w,
                dim_in: Some(self.dim_in),
                dim_out: Some(self.dim_out),
            },
            MapKind::Pinching { blocks } => MapSpec::Pinching { blocks: blocks.clone() },
            MapKind::Congruence { inner, c } => MapSpec::Congruence {
                inner: Box::new(inner.to_spec()),
                c: MatrixJson::from_matrix(c),
            },
            MapKind::ScaledSum { terms } => MapSpec::Sum {
                terms: terms
                    .iter()
                    .map(|(coef, map)| SumTerm {
                        coef: *coef,
                        map: map.to_spec(),
                    })
                    .collect(),
            },
        }
    }
}

/// Map exchange format, tagged by `kind`.
///
/// `trace` maps take their input dimension from the surrounding family when
/// `dim_in` is omitted; `dim_out` defaults to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MapSpec {
    Compression {
        #[serde(rename = "V")]
        v: MatrixJson,
    },
    Trace {
        w: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim_in: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim_out: Option<usize>,
    },
    Pinching {
        blocks: Vec<Vec<usize>>,
    },
    Congruence {
        inner: Box<MapSpec>,
        #[serde(rename = "C")]
        c: MatrixJson,
    },
    Sum {
        terms: Vec<SumTerm>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumTerm {
    pub coef: f64,
    pub map: MapSpec,
}

impl MapSpec {
    pub fn build(&self, dim_in: Option<usize>) -> Result<PositiveLinearMap> {
        match self {
            MapSpec::Compression { v } => PositiveLinearMap::compression(v.to_matrix()?),
            MapSpec::Trace {
                w,
                dim_in: own_in,
                dim_out,
            } => {
                let n = own_in
                    .or(dim_in)
                    .ok_or_else(|| Error::Parse("trace map needs dim_in".into()))?;
                PositiveLinearMap::weighted_trace(*w, n, dim_out.unwrap_or(1))
            }
            MapSpec::Pinching { blocks } => PositiveLinearMap::pinching(blocks.clone()),
            MapSpec::Congruence { inner, c } => PositiveLinearMap::congruence(inner.build(dim_in)?, c.to_matrix()?),
            MapSpec::Sum { terms } => PositiveLinearMap::scaled_sum(
                terms
                    .iter()
                    .map(|t| Ok((t.coef, t.map.build(dim_in)?)))
                    .collect::<Result<_>>()?,
            ),
        }
    }
}

/// Maps `Φ_1..Φ_n` sharing input and output dimensions.
///
/// Unitality `Σ Φ_i(I) = I` is measured by [`unitality_defect`] and enforced
/// by consumers that need it.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFamily {
    maps: Vec<PositiveLinearMap>,
}

impl MapFamily {
    pub fn new(maps: Vec<PositiveLinearMap>) -> Result<Self> {
        let first = maps
            .first()
            .ok_or_else(|| Error::InvalidParameter("map family must be nonempty".into()))?;
        for map in &maps {
            if map.dim_in != first.dim_in || map.dim_out != first.dim_out {
                return Err(Error::DimensionMismatch {
                    expected: first.dim_in,
                    found: map.dim_in,
                });
            }
        }
        Ok(Self { maps })
    }

    /// Rescales positive maps by the congruence `X ↦ S^{-1/2} X S^{-1/2}`,
    /// `S = Σ Φ_i(I)`, which makes the family exactly unital.
    pub fn normalized(maps: Vec<PositiveLinearMap>) -> Result<Self> {
        let raw = Self::new(maps)?;
        let s = raw.unit_image()?;
        let d = spectral_decompose(&s)?;
        if d.lambda_min() <= SINGULAR_FLOOR {
            return Err(Error::SingularNormalizer {
                min_eigenvalue: d.lambda_min(),
            });
        }
        let inv_sqrt: Vec<f64> = d.eigenvalues.iter().map(|l| l.sqrt().recip()).collect();
        let normalizer = d.recompose(&inv_sqrt).into_matrix();
        let maps = raw
            .maps
            .into_iter()
            .map(|map| match map.kind {
                MapKind::Compression { v } => PositiveLinearMap::compression(v * &normalizer),
                _ => PositiveLinearMap::congruence(map, normalizer.clone()),
            })
            .collect::<Result<_>>()?;
        Self::new(maps)
    }

    pub fn from_json(json: &str, dim_in: Option<usize>) -> Result<Self> {
        let specs: Vec<MapSpec> = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_specs(&specs, dim_in)
    }

    pub fn from_specs(specs: &[MapSpec], dim_in: Option<usize>) -> Result<Self> {
        Self::new(specs.iter().map(|s| s.build(dim_in)).collect::<Result<_>>()?)
    }

    pub fn to_specs(&self) -> Vec<MapSpec> {
        self.maps.iter().map(PositiveLinearMap::to_spec).collect()
    }

    pub fn maps(&self) -> &[PositiveLinearMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dim_in(&self) -> usize {
        self.maps[0].dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.maps[0].dim_out
    }

    /// `Σ Φ_i(I_H)`.
    pub fn unit_image(&self) -> Result<HermitianOperator> {
        let id = HermitianOperator::identity(self.dim_in());
        family_sum_with(self, &vec![id; self.len()], |a| Ok(a.clone()))
    }
}

pub fn apply_map(map: &PositiveLinearMap, a: &HermitianOperator) -> Result<HermitianOperator> {
    map.apply(a)
}

/// `Σ Φ_i(A_i)`.
pub fn family_sum(family: &MapFamily, operators: &[HermitianOperator]) -> Result<HermitianOperator> {
    family_sum_with(family, operators, |a| Ok(a.clone()))
}

/// `Σ Φ_i(g(A_i))` for an operator transform `g`.
pub fn family_sum_with<G>(family: &MapFamily, operators: &[HermitianOperator], g: G) -> Result<HermitianOperator>
where
    G: Fn(&HermitianOperator) -> Result<HermitianOperator>,
{
    if operators.len() != family.len() {
        return Err(Error::ArityMismatch {
            expected: family.len(),
            found: operators.len(),
        });
    }
    let mut acc = HermitianOperator::zeros(family.dim_out());
    for (map, a) in family.maps.iter().zip(operators) {
        acc = acc + map.apply(&g(a)?)?;
    }
    Ok(acc)
}

/// `‖Σ Φ_i(I_H) − I_K‖₂`.
pub fn unitality_defect(family: &MapFamily) -> f64 {
    match family.unit_image() {
        Ok(s) => (&s - &HermitianOperator::identity(family.dim_out()))
            .spectral_norm()
            .unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn half_trace() -> PositiveLinearMap {
        PositiveLinearMap::weighted_trace(0.5, 2, 1).unwrap()
    }

    #[test]
    fn half_trace_on_example_operator() {
        let a = HermitianOperator::from_real_diagonal(&[FRAC_PI_4, FRAC_PI_2]);
        let out = apply_map(&half_trace(), &a).unwrap();
        assert!((out.as_scalar().unwrap() - 3.0 * PI / 8.0).abs() < 1e-15);
        let fam = MapFamily::new(vec![half_trace()]).unwrap();
        let s = family_sum(&fam, std::slice::from_ref(&a)).unwrap();
        assert!((s.as_scalar().unwrap() - 1.1781).abs() < 1e-4);
        assert!(unitality_defect(&fam) < 1e-15);
    }

    #[test]
    fn compressions() {
        let a = HermitianOperator::from_real_rows(&[vec![1.0, 0.3], vec![0.3, 3.0]]).unwrap();
        let id = PositiveLinearMap::corner(2, 2, 1.0).unwrap();
        assert_eq!(apply_map(&id, &a).unwrap(), a);

        let e1 = PositiveLinearMap::corner(2, 1, 1.0).unwrap();
        let diag = HermitianOperator::from_real_diagonal(&[1.0, 3.0]);
        assert_eq!(apply_map(&e1, &diag).unwrap().as_scalar(), Some(1.0));

        let wrong = HermitianOperator::identity(3);
        assert!(matches!(apply_map(&e1, &wrong), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn family_sum_of_projections() {
        let p1 = PositiveLinearMap::compression(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ])))
        .unwrap();
        let p2 = PositiveLinearMap::compression(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ])))
        .unwrap();
        let fam = MapFamily::new(vec![p1, p2]).unwrap();
        let a1 = HermitianOperator::from_real_diagonal(&[1.0, 2.0]);
        let a2 = HermitianOperator::from_real_diagonal(&[3.0, 4.0]);
        let s = family_sum(&fam, &[a1.clone(), a2]).unwrap();
        assert_eq!(s, HermitianOperator::from_real_diagonal(&[1.0, 4.0]));
        assert!(matches!(family_sum(&fam, &[a1]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn equal_weights_average_equal_operators() {
        let k = 3;
        let w = (1.0 / k as f64).sqrt();
        let maps = (0..k).map(|_| PositiveLinearMap::corner(2, 2, w).unwrap()).collect();
        let fam = MapFamily::new(maps).unwrap();
        let a = HermitianOperator::from_real_rows(&[vec![2.0, -1.0], vec![-1.0, 5.0]]).unwrap();
        let s = family_sum(&fam, &vec![a.clone(); 3]).unwrap();
        assert!((s.matrix() - a.matrix()).norm() < 1e-14);
        assert!(unitality_defect(&fam) < 1e-15);
    }

    #[test]
    fn half_compression_defect() {
        let fam = MapFamily::new(vec![PositiveLinearMap::corner(2, 2, 0.5).unwrap()]).unwrap();
        assert!((unitality_defect(&fam) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pinching_keeps_blocks() {
        let a = HermitianOperator::from_real_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 5.0], vec![3.0, 5.0, 6.0]])
            .unwrap();
        let p = PositiveLinearMap::pinching(vec![vec![0, 2], vec![1]]).unwrap();
        let out = p.apply(&a).unwrap();
        let expected =
            HermitianOperator::from_real_rows(&[vec![1.0, 0.0, 3.0], vec![0.0, 4.0, 0.0], vec![3.0, 0.0, 6.0]])
                .unwrap();
        assert_eq!(out, expected);
        assert!(PositiveLinearMap::pinching(vec![vec![0, 0]]).is_err());
        assert!(PositiveLinearMap::pinching(vec![vec![0, 3]]).is_err());
    }

    #[test]
    fn normalization_and_singular_normalizer() {
        let maps = vec![
            PositiveLinearMap::corner(3, 2, 2.0).unwrap(),
            PositiveLinearMap::weighted_trace(0.7, 3, 2).unwrap(),
        ];
        let fam = MapFamily::normalized(maps).unwrap();
        assert!(unitality_defect(&fam) < 1e-12);

        let zero = PositiveLinearMap::weighted_trace(0.0, 2, 2).unwrap();
        assert!(matches!(
            MapFamily::normalized(vec![zero]),
            Err(Error::SingularNormalizer { .. })
        ));
    }

    #[test]
    fn json_family() {
        let json = r#"[
            {"kind":"compression","V":{"re":[[0.6],[0.0]]}},
            {"kind":"trace","w":0.32},
            {"kind":"sum","terms":[{"coef":0.0,"map":{"kind":"trace","w":1.0}}]}
        ]"#;
        let fam = MapFamily::from_json(json, Some(2)).unwrap();
        assert_eq!((fam.len(), fam.dim_in(), fam.dim_out()), (3, 2, 1));
        // 0.36 + 0.32·2 = 1
        assert!(unitality_defect(&fam) < 1e-15);
        let again = MapFamily::from_specs(&fam.to_specs(), None).unwrap();
        assert_eq!(again, fam);

        let bad = r#"[{"kind":"trace","w":-1.0}]"#;
        assert!(MapFamily::from_json(bad, Some(2)).is_err());
        let bad = r#"[{"kind":"compression","V":{"re":[[1.0]]}},{"kind":"pinching","blocks":[[0],[1]]}]"#;
        assert!(MapFamily::from_json(bad, None).is_err());
    }
}
