//! Finite-dimensional weighted sequence spaces.
//!
//! A [`WeightedSpace`] is a list of monomial labels (`z^k` on the disc,
//! `z1^m z2^n` on the bidisc) with a strictly positive diagonal weight per
//! label. Vectors are coefficient vectors in that monomial basis and the
//! inner product is `<x, y> = sum_i w_i x_i conj(y_i)`.
//!
//! Dirichlet and bidisc spaces are degree truncations of infinite spaces;
//! custom spaces (e.g. plain `C^d`) are exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwoIsoError};

pub type C64 = Complex64;

/// Residual norm below which Gram-Schmidt treats a vector as dependent.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    multi_index: Vec<u32>,
}

impl BasisLabel {
    pub fn new(multi_index: Vec<u32>) -> Self {
        Self { multi_index }
    }

    pub fn multi_index(&self) -> &[u32] {
        &self.multi_index
    }

    pub fn total_degree(&self) -> u32 {
        self.multi_index.iter().sum()
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.multi_index.as_slice() {
            [k] => write!(f, "z^{k}"),
            [m, n] => write!(f, "z1^{m} z2^{n}"),
            idx => write!(f, "{idx:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Dirichlet,
    Bidisc,
    Custom,
}

#[derive(Debug, PartialEq)]
struct SpaceData {
    kind: SpaceKind,
    max_degree: u32,
    labels: Vec<BasisLabel>,
    weights: Vec<f64>,
}

/// Immutable after construction; clones share the same label and weight data.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "SpaceDoc", try_from = "SpaceDoc")]
pub struct WeightedSpace(Arc<SpaceData>);

impl PartialEq for WeightedSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl WeightedSpace {
    /// Dirichlet space truncated to `z^0 .. z^max_degree`, weight of `z^k` is `k + 1`.
    ///
    /// The constant monomial carries weight 1 so that `||1|| = 1`.
    pub fn dirichlet(max_degree: u32) -> Self {
        let labels = (0..=max_degree).map(|k| BasisLabel::new(vec![k])).collect();
        let weights = (0..=max_degree).map(|k| f64::from(k) + 1.0).collect();
        Self(Arc::new(SpaceData {
            kind: SpaceKind::Dirichlet,
            max_degree,
            labels,
            weights,
        }))
    }

    /// Hardy space of the bidisc truncated to total degree `max_total_degree`.
    ///
    /// Labels are graded by total degree, then by the `z1` exponent descending.
    pub fn bidisc(max_total_degree: u32) -> Self {
        let mut labels = Vec::new();
        for t in 0..=max_total_degree {
            for m in (0..=t).rev() {
                labels.push(BasisLabel::new(vec![m, t - m]));
            }
        }
        let weights = vec![1.0; labels.len()];
        Self(Arc::new(SpaceData {
            kind: SpaceKind::Bidisc,
            max_degree: max_total_degree,
            labels,
            weights,
        }))
    }

    /// `C^d` with unit weights.
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::custom(
            (0..dim as u32).map(|k| BasisLabel::new(vec![k])).collect(),
            vec![1.0; dim],
        )
    }

    /// An exact (non-truncated) space with caller-chosen labels and weights.
    pub fn custom(labels: Vec<BasisLabel>, weights: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(TwoIsoError::InvalidSpace(
                "dimension must be at least 1".into(),
            ));
        }
        if labels.len() != weights.len() {
            return Err(TwoIsoError::InvalidSpace(format!(
                "{} labels but {} weights",
                labels.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(TwoIsoError::InvalidSpace(format!(
                "weight {w} is not strictly positive"
            )));
        }
        let arity = labels[0].multi_index().len();
        if labels.iter().any(|l| l.multi_index().len() != arity) {
            return Err(TwoIsoError::InvalidSpace(
                "labels have mixed multi-index lengths".into(),
            ));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(TwoIsoError::InvalidSpace("duplicate basis labels".into()));
        }
        let max_degree = labels
            .iter()
            .map(BasisLabel::total_degree)
            .max()
            .unwrap_or(0);
        Ok(Self(Arc::new(SpaceData {
            kind: SpaceKind::Custom,
            max_degree,
            labels,
            weights,
        })))
    }

    pub fn kind(&self) -> SpaceKind {
        self.0.kind
    }

    pub fn dim(&self) -> usize {
        self.0.labels.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.0.max_degree
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.0.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.0.weights
    }

    /// Whether this space is a degree truncation of an infinite-dimensional one.
    pub fn is_truncation(&self) -> bool {
        self.0.kind != SpaceKind::Custom
    }

    pub fn index_of(&self, multi_index: &[u32]) -> Option<usize> {
        self.0
            .labels
            .iter()
            .position(|l| l.multi_index() == multi_index)
    }

    pub fn zero(&self) -> Vector {
        Vector(DVector::zeros(self.dim()))
    }

    /// The (unnormalized) basis monomial with the given multi-index.
    pub fn monomial(&self, multi_index: &[u32]) -> Result<Vector> {
        let i = self.index_of(multi_index).ok_or_else(|| {
            TwoIsoError::InvalidParameter(format!("monomial {multi_index:?} not in space"))
        })?;
        Ok(self.basis_vector(i))
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = self.zero();
        v.0[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn check(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(TwoIsoError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Weighted inner product, conjugate-linear in `y`.
    pub fn inner(&self, x: &Vector, y: &Vector) -> Result<C64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.inner_unchecked(x, y))
    }

    pub(crate) fn inner_unchecked(&self, x: &Vector, y: &Vector) -> C64 {
        self.0
            .weights
            .iter()
            .zip(x.0.iter().zip(y.0.iter()))
            .map(|(w, (a, b))| a * b.conj() * *w)
            .sum()
    }

    pub(crate) fn norm_sqr_unchecked(&self, x: &Vector) -> f64 {
        self.0
            .weights
            .iter()
            .zip(x.0.iter())
            .map(|(w, a)| w * a.norm_sqr())
            .sum()
    }

    pub fn norm_sqr(&self, x: &Vector) -> Result<f64> {
        self.check(x)?;
        Ok(self.norm_sqr_unchecked(x))
    }

    pub fn norm(&self, x: &Vector) -> Result<f64> {
        self.norm_sqr(x).map(f64::sqrt)
    }

    /// Highest total degree carrying a nonzero coefficient, `None` for the zero vector.
    pub fn degree_of(&self, x: &Vector) -> Option<u32> {
        x.0.iter()
            .zip(self.labels())
            .filter(|(c, _)| **c != C64::new(0.0, 0.0))
            .map(|(_, l)| l.total_degree())
            .max()
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn low_degree_of(&self, x: &Vector) -> Option<u32> {
        x.0.iter()
            .zip(self.labels())
            .filter(|(c, _)| **c != C64::new(0.0, 0.0))
            .map(|(_, l)| l.total_degree())
            .min()
    }

    pub fn to_doc(&self) -> SpaceDoc {
        SpaceDoc::from(self.clone())
    }
}

/// JSON form: `{"kind", "max_degree", "weights", "labels"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub kind: SpaceKind,
    #[serde(default)]
    pub max_degree: Option<u32>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub labels: Option<Vec<Vec<u32>>>,
}

impl From<WeightedSpace> for SpaceDoc {
    fn from(space: WeightedSpace) -> Self {
        SpaceDoc {
            kind: space.kind(),
            max_degree: Some(space.max_degree()),
            weights: Some(space.weights().to_vec()),
            labels: Some(
                space
                    .labels()
                    .iter()
                    .map(|l| l.multi_index().to_vec())
                    .collect(),
            ),
        }
    }
}

impl TryFrom<SpaceDoc> for WeightedSpace {
    type Error = TwoIsoError;

    fn try_from(doc: SpaceDoc) -> Result<Self> {
        let need_degree = || {
            doc.max_degree
                .ok_or_else(|| TwoIsoError::InvalidSpace("missing max_degree".into()))
        };
        let space = match doc.kind {
            SpaceKind::Dirichlet => WeightedSpace::dirichlet(need_degree()?),
            SpaceKind::Bidisc => WeightedSpace::bidisc(need_degree()?),
            SpaceKind::Custom => {
                let weights = doc.weights.clone().ok_or_else(|| {
                    TwoIsoError::InvalidSpace("custom space needs weights".into())
                })?;
                let labels = match &doc.labels {
                    Some(l) => l.iter().cloned().map(BasisLabel::new).collect(),
                    None => (0..weights.len() as u32)
                        .map(|k| BasisLabel::new(vec![k]))
                        .collect(),
                };
                return WeightedSpace::custom(labels, weights);
            }
        };
        if let Some(w) = &doc.weights {
            if w.as_slice() != space.weights() {
                return Err(TwoIsoError::InvalidSpace(
                    "weights disagree with the named space".into(),
                ));
            }
        }
        if let Some(l) = &doc.labels {
            let same = l.len() == space.dim()
                && l.iter()
                    .zip(space.labels())
                    .all(|(a, b)| a.as_slice() == b.multi_index());
            if !same {
                return Err(TwoIsoError::InvalidSpace(
                    "labels disagree with the named space".into(),
                ));
            }
        }
        Ok(space)
    }
}

/// Complex coefficient vector in a space's monomial basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<[f64; 2]>", from = "Vec<[f64; 2]>")]
pub struct Vector(pub(crate) DVector<C64>);

impl Vector {
    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        Vector(DVector::from_vec(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Vector(DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().map(|r| C64::new(*r, 0.0)),
        ))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn scale(&self, c: C64) -> Vector {
        Vector(&self.0 * c)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl From<DVector<C64>> for Vector {
    fn from(v: DVector<C64>) -> Self {
        Vector(v)
    }
}

impl From<Vec<[f64; 2]>> for Vector {
    fn from(pairs: Vec<[f64; 2]>) -> Self {
        Vector::from_coeffs(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl From<Vector> for Vec<[f64; 2]> {
    fn from(v: Vector) -> Self {
        v.0.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(&self.0 + &rhs.0)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(&self.0 - &rhs.0)
    }
}

impl Mul<&Vector> for C64 {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(-&self.0)
    }
}

/// A subspace given by generators, with an orthonormal basis in the weighted
/// inner product computed by modified Gram-Schmidt.
#[derive(Clone, Debug)]
pub struct Subspace {
    space: WeightedSpace,
    generators: Vec<Vector>,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn span(space: &WeightedSpace, generators: Vec<Vector>) -> Result<Self> {
        for g in &generators {
            space.check(g)?;
        }
        let basis = orthonormalize(space, &[], &generators);
        Ok(Self {
            space: space.clone(),
            generators,
            basis,
        })
    }

    pub fn whole(space: &WeightedSpace) -> Self {
        let generators: Vec<Vector> = (0..space.dim()).map(|i| space.basis_vector(i)).collect();
        let basis = generators
            .iter()
            .zip(space.weights())
            .map(|(e, w)| e.scale(C64::new(1.0 / w.sqrt(), 0.0)))
            .collect();
        Self {
            space: space.clone(),
            generators,
            basis,
        }
    }

    pub fn zero(space: &WeightedSpace) -> Self {
        Self {
            space: space.clone(),
            generators: Vec::new(),
            basis: Vec::new(),
        }
    }

    /// Coordinate subspace spanned by the basis monomials at `indices`.
    pub fn coordinate(space: &WeightedSpace, indices: impl IntoIterator<Item = usize>) -> Self {
        let (generators, basis) = indices
            .into_iter()
            .map(|i| {
                let e = space.basis_vector(i);
                let b = e.scale(C64::new(1.0 / space.weights()[i].sqrt(), 0.0));
                (e, b)
            })
            .unzip();
        Self {
            space: space.clone(),
            generators,
            basis,
        }
    }

    pub fn space(&self) -> &WeightedSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn orthonormal_basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Orthogonal projection `sum_j <x, e_j> e_j`.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.space.check(x)?;
        let mut out = DVector::zeros(x.len());
        for e in &self.basis {
            out += &e.0 * self.space.inner_unchecked(x, e);
        }
        Ok(Vector(out))
    }

    /// Distance from `x` to this subspace.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        let p = self.project(x)?;
        self.space.norm(&(x - &p))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    /// Vectors of `within` (the whole space when `None`) orthogonal to `self`.
    pub fn orthogonal_complement(&self, within: Option<&Subspace>) -> Result<Subspace> {
        let whole;
        let ambient = match within {
            Some(w) => {
                if w.space != self.space {
                    return Err(TwoIsoError::SpaceMismatch);
                }
                w
            }
            None => {
                whole = Subspace::whole(&self.space);
                &whole
            }
        };
        let basis = orthonormalize(&self.space, &self.basis, &ambient.basis);
        Ok(Subspace {
            space: self.space.clone(),
            generators: ambient.basis.clone(),
            basis,
        })
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. `fixed` must be
/// orthonormal; the returned vectors are orthonormal and orthogonal to it.
fn orthonormalize(space: &WeightedSpace, fixed: &[Vector], candidates: &[Vector]) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for g in candidates {
        let mut r = g.0.clone();
        for _ in 0..2 {
            for e in fixed.iter().chain(out.iter()) {
                let c = space.inner_unchecked(&Vector(r.clone()), e);
                r -= &e.0 * c;
            }
        }
        let r = Vector(r);
        let n = space.norm_sqr_unchecked(&r).sqrt();
        if n > RANK_TOL {
            out.push(r.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dirichlet_weights_start_at_one() {
        assert_eq!(WeightedSpace::dirichlet(3).weights(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(WeightedSpace::dirichlet(0).weights(), &[1.0]);
        assert_eq!(WeightedSpace::dirichlet(5).dim(), 6);
    }

    #[test]
    fn bidisc_enumeration() {
        assert_eq!(WeightedSpace::bidisc(2).dim(), 6);
        assert_eq!(WeightedSpace::bidisc(0).weights(), &[1.0]);
        let labels: Vec<Vec<u32>> = WeightedSpace::bidisc(1)
            .labels()
            .iter()
            .map(|l| l.multi_index().to_vec())
            .collect();
        assert_eq!(labels, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        let s = WeightedSpace::bidisc(2);
        assert_eq!(s.index_of(&[2, 0]), Some(3));
        assert_eq!(s.index_of(&[0, 2]), Some(5));
    }

    #[test]
    fn custom_space_validation() {
        assert!(WeightedSpace::custom(vec![], vec![]).is_err());
        let l = |k| BasisLabel::new(vec![k]);
        assert!(WeightedSpace::custom(vec![l(0), l(1)], vec![1.0, 0.0]).is_err());
        assert!(WeightedSpace::custom(vec![l(0), l(0)], vec![1.0, 1.0]).is_err());
        assert!(
            WeightedSpace::custom(vec![l(0), BasisLabel::new(vec![0, 1])], vec![1.0, 1.0]).is_err()
        );
        assert!(!WeightedSpace::euclidean(3).unwrap().is_truncation());
    }

    #[test]
    fn dirichlet_inner_products() {
        let s = WeightedSpace::dirichlet(3);
        let one = s.monomial(&[0]).unwrap();
        let z = s.monomial(&[1]).unwrap();
        assert_eq!(s.inner(&z, &z).unwrap(), c(2.0, 0.0));
        assert_eq!(s.inner(&one, &one).unwrap(), c(1.0, 0.0));
        assert_eq!(s.inner(&z, &one).unwrap(), c(0.0, 0.0));
        assert!(s.inner(&z, &WeightedSpace::dirichlet(2).zero()).is_err());
    }

    #[test]
    fn inner_is_conjugate_linear_in_second_slot() {
        let s = WeightedSpace::dirichlet(1);
        let x = Vector::from_coeffs(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let y = Vector::from_coeffs(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        // 1 * 1 * conj(i) + 2 * i * conj(1) = -i + 2i = i
        assert_eq!(s.inner(&x, &y).unwrap(), c(0.0, 1.0));
        let a = c(0.5, -2.0);
        let lhs = s.inner(&x, &y.scale(a)).unwrap();
        assert!((lhs - a.conj() * s.inner(&x, &y).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let s = WeightedSpace::bidisc(2);
        let z1 = s.monomial(&[1, 0]).unwrap();
        let line = Subspace::span(&s, vec![z1.clone()]).unwrap();
        let ker = line.orthogonal_complement(None).unwrap();
        assert_eq!(ker.dim(), 5);
        let p = ker.project(&(-&z1)).unwrap();
        assert!(p.max_abs() < 1e-15);
        // x in sub is fixed, x orthogonal to sub goes to 0
        let z2 = s.monomial(&[0, 1]).unwrap();
        assert!((&ker.project(&z2).unwrap() - &z2).max_abs() < 1e-15);
        assert!(line.project(&z2).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn complement_examples() {
        let c2 = WeightedSpace::euclidean(2).unwrap();
        let e2 = c2.basis_vector(1);
        let comp = Subspace::span(&c2, vec![e2])
            .unwrap()
            .orthogonal_complement(None)
            .unwrap();
        assert_eq!(comp.dim(), 1);
        let b = &comp.orthonormal_basis()[0];
        assert!((b.coeffs()[0].norm() - 1.0).abs() < 1e-15 && b.coeffs()[1].norm() < 1e-15);

        let s = WeightedSpace::bidisc(2);
        let sub = Subspace::span(
            &s,
            vec![s.monomial(&[0, 0]).unwrap(), s.monomial(&[1, 0]).unwrap()],
        )
        .unwrap();
        assert_eq!(sub.orthogonal_complement(None).unwrap().dim(), 4);

        let all = Subspace::whole(&s);
        assert!(all.orthogonal_complement(None).unwrap().is_zero());
    }

    #[test]
    fn complement_within_ambient_subspace() {
        let s = WeightedSpace::dirichlet(4);
        let low = Subspace::coordinate(&s, 0..3);
        let x = Vector::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        let sub = Subspace::span(&s, vec![x]).unwrap();
        let comp = sub.orthogonal_complement(Some(&low)).unwrap();
        assert_eq!(comp.dim(), 2);
        for b in comp.orthonormal_basis() {
            assert!(low.contains(b, 1e-12).unwrap());
        }
    }

    #[test]
    fn gram_schmidt_drops_dependent_generators() {
        let s = WeightedSpace::dirichlet(3);
        let a = Vector::from_real(&[1.0, 2.0, 0.0, 0.0]);
        let b = a.scale(c(0.0, 3.0));
        let sub = Subspace::span(&s, vec![a, b, s.zero()]).unwrap();
        assert_eq!(sub.dim(), 1);
    }

    #[test]
    fn space_json_roundtrip_and_validation() {
        let s = WeightedSpace::bidisc(2);
        let text = serde_json::to_string(&s).unwrap();
        let back: WeightedSpace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let short: WeightedSpace =
            serde_json::from_str(r#"{"kind":"dirichlet","max_degree":3}"#).unwrap();
        assert_eq!(short.weights(), &[1.0, 2.0, 3.0, 4.0]);
        let bad = serde_json::from_str::<WeightedSpace>(
            r#"{"kind":"dirichlet","max_degree":1,"weights":[0.0, 2.0]}"#,
        );
        assert!(bad.is_err());
        let custom: WeightedSpace =
            serde_json::from_str(r#"{"kind":"custom","weights":[1.0, 3.0]}"#).unwrap();
        assert_eq!(custom.dim(), 2);
        assert!(!custom.is_truncation());
    }

    type Coeffs = Vec<(f64, f64)>;

    fn arb_space_and_vectors() -> impl Strategy<Value = (Vec<f64>, Coeffs, Coeffs)> {
        (1usize..9).prop_flat_map(|d| {
            (
                prop::collection::vec(0.1f64..10.0, d),
                prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), d),
                prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), d),
            )
        })
    }

    fn build(w: &[f64], v: &[(f64, f64)]) -> (WeightedSpace, Vector) {
        let labels = (0..w.len() as u32)
            .map(|k| BasisLabel::new(vec![k]))
            .collect();
        let s = WeightedSpace::custom(labels, w.to_vec()).unwrap();
        (
            s,
            Vector::from_coeffs(v.iter().map(|(a, b)| c(*a, *b)).collect()),
        )
    }

    proptest! {
        #[test]
        fn conjugate_symmetry_and_positivity((w, x, y) in arb_space_and_vectors()) {
            let (s, x) = build(&w, &x);
            let y = Vector::from_coeffs(y.iter().map(|(a, b)| c(*a, *b)).collect());
            let xy = s.inner(&x, &y).unwrap();
            let yx = s.inner(&y, &x).unwrap();
            prop_assert!((xy - yx.conj()).norm() <= 1e-12);
            let xx = s.inner(&x, &x).unwrap();
            prop_assert!(xx.im.abs() <= 1e-12);
            if x.max_abs() > 0.0 {
                prop_assert!(xx.re > 0.0);
            }
        }

        #[test]
        fn pythagoras_and_idempotence((w, x, g) in arb_space_and_vectors(), k in 0usize..4) {
            let (s, x) = build(&w, &x);
            // k generators derived from g by cyclic shifts
            let gens: Vec<Vector> = (0..k.min(s.dim()))
                .map(|r| {
                    let mut gv = g.clone();
                    gv.rotate_left(r);
                    Vector::from_coeffs(gv.iter().map(|(a, b)| c(*a, *b * (r as f64 + 1.0))).collect())
                })
                .collect();
            let sub = Subspace::span(&s, gens).unwrap();
            for (i, e) in sub.orthonormal_basis().iter().enumerate() {
                prop_assert!((s.norm(e).unwrap() - 1.0).abs() <= 1e-12);
                for f in &sub.orthonormal_basis()[i + 1..] {
                    prop_assert!(s.inner(e, f).unwrap().norm() <= 1e-12);
                }
            }
            let p = sub.project(&x).unwrap();
            let r = &x - &p;
            let lhs = s.norm_sqr(&x).unwrap();
            let rhs = s.norm_sqr(&p).unwrap() + s.norm_sqr(&r).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs));
            let pp = sub.project(&p).unwrap();
            prop_assert!((&pp - &p).max_abs() <= 1e-12 * (1.0 + p.max_abs()));
            let comp = sub.orthogonal_complement(None).unwrap();
            prop_assert_eq!(sub.dim() + comp.dim(), s.dim());
        }
    }
}
