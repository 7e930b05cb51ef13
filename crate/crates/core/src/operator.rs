//! Dense operators on a [`WeightedSpace`].
//!
//! Matrices are in coefficient coordinates: column `j` holds the image of the
//! `j`-th basis monomial. Adjoints are taken with respect to the weighted inner
//! product, `A* = W^-1 A^H W`.
//!
//! On truncated spaces every operator carries a [`DegreeGrowth`] bound. Vectors
//! of total degree `<= max_degree - 2 * growth` form the safe subspace, where
//! `Tx` and `T^2 x` computed in the truncation agree with the untruncated
//! operator. The 2-isometry defect is only trusted there, and it is evaluated
//! through the norm form `||x||^2 - 2||Tx||^2 + ||T^2 x||^2` plus polarization,
//! never through the truncated adjoint.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwoIsoError};
use crate::space::{Subspace, Vector, WeightedSpace, C64};

/// Relative tolerance for deciding whether a vector lives on the safe labels.
const SAFE_COEFF_TOL: f64 = 1e-12;

/// Upper bound on how far an operator raises total degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "GrowthDoc", try_from = "GrowthDoc")]
pub enum DegreeGrowth {
    Bounded(u32),
    Unbounded,
}

impl DegreeGrowth {
    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (Self::Bounded(a), Self::Bounded(b)) => Self::Bounded(a.max(b)),
            _ => Self::Unbounded,
        }
    }

    pub fn plus(self, other: Self) -> Self {
        match (self, other) {
            (Self::Bounded(a), Self::Bounded(b)) => Self::Bounded(a + b),
            _ => Self::Unbounded,
        }
    }

    /// Whether `self` is at least as large as `other`.
    pub fn covers(self, other: Self) -> bool {
        match (self, other) {
            (Self::Unbounded, _) => true,
            (Self::Bounded(_), Self::Unbounded) => false,
            (Self::Bounded(a), Self::Bounded(b)) => a >= b,
        }
    }
}

impl fmt::Display for DegreeGrowth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bounded(g) => write!(f, "{g}"),
            Self::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum GrowthDoc {
    Bounded(u32),
    Named(String),
}

impl From<DegreeGrowth> for GrowthDoc {
    fn from(g: DegreeGrowth) -> Self {
        match g {
            DegreeGrowth::Bounded(n) => GrowthDoc::Bounded(n),
            DegreeGrowth::Unbounded => GrowthDoc::Named("unbounded".into()),
        }
    }
}

impl TryFrom<GrowthDoc> for DegreeGrowth {
    type Error = String;
    fn try_from(doc: GrowthDoc) -> std::result::Result<Self, String> {
        match doc {
            GrowthDoc::Bounded(n) => Ok(DegreeGrowth::Bounded(n)),
            GrowthDoc::Named(s) if s == "unbounded" => Ok(DegreeGrowth::Unbounded),
            GrowthDoc::Named(s) => Err(format!("invalid degree_growth {s:?}")),
        }
    }
}

/// Value of the quadratic defect form at one vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DefectValue {
    pub value: f64,
    /// False when the vector leaves the safe subspace, i.e. truncation may
    /// have altered `T^2 x`.
    pub truncation_safe: bool,
}

/// The defect form `<Delta_2(T) f_b, f_a>` on an orthonormal basis `f` of a
/// subspace, reconstructed by polarization.
#[derive(Clone, Debug)]
pub struct DefectReport {
    pub defect_matrix: DMatrix<C64>,
    pub max_residual: f64,
    pub safe_dim: usize,
}

impl DefectReport {
    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.defect_matrix;
        (m - m.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct Operator {
    matrix: DMatrix<C64>,
    space: WeightedSpace,
    degree_growth: DegreeGrowth,
}

impl Operator {
    /// Wraps a matrix, taking the degree growth from a column scan.
    pub fn from_matrix(space: &WeightedSpace, matrix: DMatrix<C64>) -> Result<Self> {
        check_square(space, &matrix)?;
        let degree_growth = DegreeGrowth::Bounded(scan_growth(space, &matrix));
        Ok(Self {
            matrix,
            space: space.clone(),
            degree_growth,
        })
    }

    /// Builds the matrix from a list of rows.
    pub fn from_rows(space: &WeightedSpace, rows: &[Vec<C64>]) -> Result<Self> {
        let n = space.dim();
        if rows.len() != n {
            return Err(TwoIsoError::DimensionMismatch {
                expected: n,
                actual: rows.len(),
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(TwoIsoError::DimensionMismatch {
                expected: n,
                actual: r.len(),
            });
        }
        Self::from_matrix(space, DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Wraps a matrix with a declared growth bound, which must cover the scan.
    pub fn with_growth(
        space: &WeightedSpace,
        matrix: DMatrix<C64>,
        degree_growth: DegreeGrowth,
    ) -> Result<Self> {
        check_square(space, &matrix)?;
        let scanned = DegreeGrowth::Bounded(scan_growth(space, &matrix));
        if !degree_growth.covers(scanned) {
            return Err(TwoIsoError::InvalidParameter(format!(
                "declared degree_growth {degree_growth} is below the scanned value {scanned}"
            )));
        }
        Ok(Self {
            matrix,
            space: space.clone(),
            degree_growth,
        })
    }

    pub fn identity(space: &WeightedSpace) -> Self {
        Self {
            matrix: DMatrix::identity(space.dim(), space.dim()),
            space: space.clone(),
            degree_growth: DegreeGrowth::Bounded(0),
        }
    }

    pub fn zero(space: &WeightedSpace) -> Self {
        Self {
            matrix: DMatrix::zeros(space.dim(), space.dim()),
            space: space.clone(),
            degree_growth: DegreeGrowth::Bounded(0),
        }
    }

    /// `u ⊗ v`, the map `x -> <x, v> u`.
    pub fn rank_one(space: &WeightedSpace, u: &Vector, v: &Vector) -> Result<Self> {
        space.check(u)?;
        space.check(v)?;
        let (Some(u_deg), Some(v_low)) = (space.degree_of(u), space.low_degree_of(v)) else {
            let which = if space.degree_of(u).is_none() {
                "u"
            } else {
                "v"
            };
            return Err(TwoIsoError::NotRankOne(which));
        };
        let w = space.weights();
        let matrix = DMatrix::from_fn(space.dim(), space.dim(), |i, j| {
            u.coeffs()[i] * v.coeffs()[j].conj() * w[j]
        });
        Ok(Self {
            matrix,
            space: space.clone(),
            degree_growth: DegreeGrowth::Bounded(u_deg.saturating_sub(v_low)),
        })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn space(&self) -> &WeightedSpace {
        &self.space
    }

    pub fn degree_growth(&self) -> DegreeGrowth {
        self.degree_growth
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Growth read off the nonzero pattern of the matrix.
    pub fn scanned_degree_growth(&self) -> u32 {
        scan_growth(&self.space, &self.matrix)
    }

    /// Replaces the growth bound with the scanned value.
    pub fn rescan_growth(mut self) -> Self {
        self.degree_growth = DegreeGrowth::Bounded(self.scanned_degree_growth());
        self
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        self.space.check(x)?;
        Ok(Vector::from(&self.matrix * x.as_dvector()))
    }

    /// Weighted adjoint `W^-1 A^H W`.
    pub fn adjoint(&self) -> Self {
        let w = self.space.weights();
        let matrix = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.matrix[(j, i)].conj() * (w[j] / w[i])
        });
        Self {
            matrix,
            space: self.space.clone(),
            degree_growth: DegreeGrowth::Unbounded,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            space: self.space.clone(),
            degree_growth: self.degree_growth.plus(other.degree_growth),
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            space: self.space.clone(),
            degree_growth: self.degree_growth.max(other.degree_growth),
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            matrix: &self.matrix * c,
            space: self.space.clone(),
            degree_growth: self.degree_growth,
        }
    }

    /// `self + u ⊗ v`.
    pub fn perturb(&self, u: &Vector, v: &Vector) -> Result<Self> {
        self.add(&Self::rank_one(&self.space, u, v)?)
    }

    /// `I - 2 T*T + T*^2 T^2` from the truncated matrices. Exact on
    /// non-truncated spaces only.
    pub fn delta2(&self) -> Self {
        let t = &self.matrix;
        let ts = self.adjoint().matrix;
        let tst = &ts * t;
        let ts2t2 = &ts * &tst * t;
        let n = self.dim();
        Self {
            matrix: DMatrix::identity(n, n) - tst * C64::new(2.0, 0.0) + ts2t2,
            space: self.space.clone(),
            degree_growth: DegreeGrowth::Unbounded,
        }
    }

    /// Largest total degree `d` such that every label of degree `<= d` is safe.
    /// `None` means the space is exact and every vector is safe.
    pub fn safe_cutoff(&self) -> Result<Option<u32>> {
        if !self.space.is_truncation() {
            return Ok(None);
        }
        let DegreeGrowth::Bounded(g) = self.degree_growth else {
            return Err(TwoIsoError::UnboundedGrowth);
        };
        let max_degree = self.space.max_degree();
        max_degree
            .checked_sub(2 * g)
            .map(Some)
            .ok_or(TwoIsoError::TruncationTooSmall {
                max_degree,
                growth: g,
            })
    }

    pub fn safe_subspace(&self) -> Result<Subspace> {
        Ok(match self.safe_cutoff()? {
            None => Subspace::whole(&self.space),
            Some(cut) => Subspace::coordinate(
                &self.space,
                self.space
                    .labels()
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| l.total_degree() <= cut)
                    .map(|(i, _)| i),
            ),
        })
    }

    /// Whether `x` is supported on safe labels.
    pub fn is_safe(&self, x: &Vector) -> bool {
        match self.safe_cutoff() {
            Ok(None) => true,
            Ok(Some(cut)) => {
                let scale = 1.0 + x.max_abs();
                x.coeffs()
                    .iter()
                    .zip(self.space.labels())
                    .all(|(c, l)| l.total_degree() <= cut || c.norm() <= SAFE_COEFF_TOL * scale)
            }
            Err(_) => false,
        }
    }

    /// `||x||^2 - 2 ||Tx||^2 + ||T^2 x||^2` in the weighted norm.
    pub fn defect_quadratic(&self, x: &Vector) -> Result<DefectValue> {
        self.space.check(x)?;
        let tx = &self.matrix * x.as_dvector();
        let ttx = &self.matrix * &tx;
        Ok(DefectValue {
            value: self.quad(x.as_dvector(), &tx, &ttx),
            truncation_safe: self.is_safe(x),
        })
    }

    fn quad(
        &self,
        x: &nalgebra::DVector<C64>,
        tx: &nalgebra::DVector<C64>,
        ttx: &nalgebra::DVector<C64>,
    ) -> f64 {
        let w = self.space.weights();
        let mut acc = 0.0;
        for i in 0..w.len() {
            acc += w[i] * (x[i].norm_sqr() - 2.0 * tx[i].norm_sqr() + ttx[i].norm_sqr());
        }
        acc
    }

    /// `<Delta_2(T) x, y>` recovered from the quadratic form by the four-term
    /// complex polarization identity.
    pub fn polarized_form(&self, x: &Vector, y: &Vector) -> Result<C64> {
        self.space.check(x)?;
        self.space.check(y)?;
        let images = |v: &Vector| {
            let tv = &self.matrix * v.as_dvector();
            let ttv = &self.matrix * &tv;
            (v.as_dvector().clone(), tv, ttv)
        };
        Ok(self.polarize(&images(x), &images(y)))
    }

    fn polarize(&self, x: &Images, y: &Images) -> C64 {
        let phases = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ];
        let mut acc = C64::new(0.0, 0.0);
        for p in phases {
            let q = self.quad(&(&x.0 + &y.0 * p), &(&x.1 + &y.1 * p), &(&x.2 + &y.2 * p));
            acc += p * q;
        }
        acc * 0.25
    }

    /// Defect form on an orthonormal basis of `sub`, which must lie inside the
    /// safe subspace.
    pub fn defect_form_by_polarization(&self, sub: &Subspace) -> Result<DefectReport> {
        if sub.space() != &self.space {
            return Err(TwoIsoError::SpaceMismatch);
        }
        let safe = self.safe_subspace()?;
        if sub.orthonormal_basis().iter().any(|f| !self.is_safe(f)) {
            return Err(TwoIsoError::NotTruncationSafe { what: "subspace" });
        }
        let images: Vec<Images> = sub
            .orthonormal_basis()
            .iter()
            .map(|f| {
                let tf = &self.matrix * f.as_dvector();
                let ttf = &self.matrix * &tf;
                (f.as_dvector().clone(), tf, ttf)
            })
            .collect();
        let m = images.len();
        let mut defect_matrix = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                defect_matrix[(a, b)] = self.polarize(&images[b], &images[a]);
            }
        }
        let max_residual = defect_matrix.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(DefectReport {
            defect_matrix,
            max_residual,
            safe_dim: safe.dim(),
        })
    }

    /// Weighted operator norm: largest singular value of `W^1/2 A W^-1/2`.
    pub fn operator_norm(&self) -> f64 {
        let w = self.space.weights();
        let conj = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.matrix[(i, j)] * (w[i].sqrt() / w[j].sqrt())
        });
        conj.singular_values().iter().cloned().fold(0.0, f64::max)
    }

    fn same_space(&self, other: &Operator) -> Result<()> {
        if self.space != other.space {
            return Err(TwoIsoError::SpaceMismatch);
        }
        Ok(())
    }

    pub fn to_doc(&self) -> OperatorDoc {
        OperatorDoc {
            space: self.space.clone(),
            matrix: MatrixDoc::Flat(
                (0..self.dim())
                    .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
                    .map(|(i, j)| {
                        let c = self.matrix[(i, j)];
                        [c.re, c.im]
                    })
                    .collect(),
            ),
            degree_growth: Some(self.degree_growth),
        }
    }

    pub fn from_doc(doc: OperatorDoc) -> Result<Self> {
        let n = doc.space.dim();
        let entries: Vec<[f64; 2]> = match doc.matrix {
            MatrixDoc::Flat(e) => e,
            MatrixDoc::Rows(rows) => {
                if rows.iter().any(|r| r.len() != n) {
                    return Err(TwoIsoError::InvalidParameter(format!(
                        "every matrix row must have {n} entries"
                    )));
                }
                rows.into_iter().flatten().collect()
            }
        };
        if entries.len() != n * n {
            return Err(TwoIsoError::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        let matrix =
            DMatrix::from_row_iterator(n, n, entries.into_iter().map(|[re, im]| C64::new(re, im)));
        match doc.degree_growth {
            Some(g) => Self::with_growth(&doc.space, matrix, g),
            None => Self::from_matrix(&doc.space, matrix),
        }
    }
}

type Images = (
    nalgebra::DVector<C64>,
    nalgebra::DVector<C64>,
    nalgebra::DVector<C64>,
);

/// JSON form: `{"space", "matrix": [[re, im], ...] row-major, "degree_growth"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub space: WeightedSpace,
    pub matrix: MatrixDoc,
    #[serde(default)]
    pub degree_growth: Option<DegreeGrowth>,
}

/// Row-major entries, either flat or as nested rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixDoc {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

fn check_square(space: &WeightedSpace, m: &DMatrix<C64>) -> Result<()> {
    if m.nrows() != space.dim() || m.ncols() != space.dim() {
        return Err(TwoIsoError::DimensionMismatch {
            expected: space.dim(),
            actual: if m.nrows() != space.dim() {
                m.nrows()
            } else {
                m.ncols()
            },
        });
    }
    Ok(())
}

fn scan_growth(space: &WeightedSpace, m: &DMatrix<C64>) -> u32 {
    let deg: Vec<u32> = space.labels().iter().map(|l| l.total_degree()).collect();
    let mut growth = 0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != C64::new(0.0, 0.0) && deg[i] > deg[j] {
                growth = growth.max(deg[i] - deg[j]);
            }
        }
    }
    growth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn shift(space: &WeightedSpace) -> Operator {
        let n = space.dim();
        let m = DMatrix::from_fn(
            n,
            n,
            |i, j| if i == j + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) },
        );
        Operator::from_matrix(space, m).unwrap()
    }

    fn swap() -> Operator {
        let s = WeightedSpace::euclidean(2).unwrap();
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        Operator::from_matrix(&s, m).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = WeightedSpace::dirichlet(3);
        let z = s.monomial(&[1]).unwrap();
        assert_eq!(shift(&s).apply(&z).unwrap(), s.monomial(&[2]).unwrap());
        let x = Vector::from_coeffs(vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0), c(0.5, 0.5)]);
        assert_eq!(Operator::identity(&s).apply(&x).unwrap(), x);
        assert_eq!(Operator::zero(&s).apply(&x).unwrap(), s.zero());
        assert!(shift(&s).apply(&Vector::from_real(&[1.0])).is_err());
    }

    #[test]
    fn adjoint_of_dirichlet_shift_by_brute_force() {
        let s = WeightedSpace::dirichlet(4);
        let t = shift(&s);
        let ts = t.adjoint();
        let z = s.monomial(&[1]).unwrap();
        // brute force: coefficient k of T*z solves <e_k, T*z> = <T e_k, z>
        for k in 0..s.dim() {
            let e = s.basis_vector(k);
            let lhs = s.inner(&t.apply(&e).unwrap(), &z).unwrap();
            let coeff = lhs / s.weights()[k];
            assert!((ts.apply(&z).unwrap().coeffs()[k].conj() - coeff).norm() < 1e-15);
        }
        let expected = s.monomial(&[0]).unwrap().scale(c(2.0, 0.0));
        assert!((&ts.apply(&z).unwrap() - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn adjoint_of_bidisc_shift_kills_z2() {
        let s = WeightedSpace::bidisc(3);
        let n = s.dim();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (s.labels()[i].multi_index(), s.labels()[j].multi_index());
            if a[0] == b[0] + 1 && a[1] == b[1] {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let t = Operator::from_matrix(&s, m).unwrap();
        let z2 = s.monomial(&[0, 1]).unwrap();
        for k in 0..n {
            assert_eq!(
                s.inner(&t.apply(&s.basis_vector(k)).unwrap(), &z2).unwrap(),
                c(0.0, 0.0)
            );
        }
        assert!(t.adjoint().apply(&z2).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn adjoint_of_real_symmetric_is_itself() {
        let t = swap();
        assert_eq!(t.adjoint().matrix(), t.matrix());
    }

    #[test]
    fn rank_one_examples() {
        let s = WeightedSpace::euclidean(2).unwrap();
        let (e1, e2) = (s.basis_vector(0), s.basis_vector(1));
        let k = Operator::rank_one(&s, &e1, &e2).unwrap();
        assert_eq!(k.apply(&e2).unwrap(), e1);
        assert_eq!(k.apply(&e1).unwrap(), s.zero());
        assert!(matches!(
            Operator::rank_one(&s, &s.zero(), &e2),
            Err(TwoIsoError::NotRankOne("u"))
        ));
        assert!(matches!(
            Operator::rank_one(&s, &e1, &s.zero()),
            Err(TwoIsoError::NotRankOne("v"))
        ));

        let b = WeightedSpace::bidisc(3);
        let u = &b.monomial(&[0, 1]).unwrap() - &b.monomial(&[2, 0]).unwrap();
        let z1 = b.monomial(&[1, 0]).unwrap();
        let k = Operator::rank_one(&b, &u, &z1).unwrap();
        assert_eq!(k.apply(&z1).unwrap(), u);
        assert_eq!(k.degree_growth(), DegreeGrowth::Bounded(1));
        assert_eq!(k.matrix().rank(1e-12), 1);
    }

    #[test]
    fn delta2_examples() {
        let t = swap();
        assert!(t.delta2().matrix().iter().all(|c| c.norm() < 1e-15));

        let s = t.space().clone();
        let (e1, e2) = (s.basis_vector(0), s.basis_vector(1));
        let vt = t.perturb(&e1.scale(c(-2.0, 0.0)), &e2).unwrap();
        assert!(vt.delta2().matrix().iter().all(|c| c.norm() < 1e-15));

        let one = WeightedSpace::euclidean(1).unwrap();
        let two = Operator::identity(&one).scale(c(2.0, 0.0));
        assert_eq!(two.delta2().matrix()[(0, 0)], c(9.0, 0.0));
    }

    #[test]
    fn safe_subspace_rules() {
        let s = WeightedSpace::dirichlet(1);
        assert!(matches!(
            shift(&s).safe_subspace(),
            Err(TwoIsoError::TruncationTooSmall { .. })
        ));
        let s = WeightedSpace::dirichlet(5);
        assert_eq!(Operator::identity(&s).safe_subspace().unwrap().dim(), 6);
        assert_eq!(shift(&s).safe_subspace().unwrap().dim(), 4);
        assert!(matches!(
            shift(&s).adjoint().safe_subspace(),
            Err(TwoIsoError::UnboundedGrowth)
        ));
        // exact spaces ignore growth
        let e = WeightedSpace::euclidean(3).unwrap();
        let m = DMatrix::from_element(3, 3, c(1.0, 0.0));
        assert_eq!(
            Operator::from_matrix(&e, m)
                .unwrap()
                .adjoint()
                .safe_subspace()
                .unwrap()
                .dim(),
            3
        );
    }

    #[test]
    fn safe_vectors_see_untruncated_images() {
        // T = M_z + p ⊗ 1 with deg p = 3 on degrees <= 10 versus <= 14
        let p = [0.0, 0.3, -0.2, 0.7];
        let build = |n: u32| {
            let s = WeightedSpace::dirichlet(n);
            let mut u = vec![0.0; s.dim()];
            u[..4].copy_from_slice(&p);
            shift(&s)
                .perturb(&Vector::from_real(&u), &s.monomial(&[0]).unwrap())
                .unwrap()
        };
        let (small, big) = (build(10), build(14));
        assert_eq!(small.degree_growth(), DegreeGrowth::Bounded(3));
        let safe = small.safe_subspace().unwrap();
        assert_eq!(safe.dim(), 5);
        for k in 0..safe.dim() {
            let xs = small.space().basis_vector(k);
            let xb = big.space().basis_vector(k);
            let ts = small.apply(&small.apply(&xs).unwrap()).unwrap();
            let tb = big.apply(&big.apply(&xb).unwrap()).unwrap();
            assert_eq!(&tb.coeffs()[..11], ts.coeffs());
            assert!(tb.coeffs()[11..].iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn defect_quadratic_flags_truncation() {
        let s = WeightedSpace::dirichlet(3);
        let t = shift(&s);
        let z = s.monomial(&[1]).unwrap();
        let d = t.defect_quadratic(&z).unwrap();
        // weights 2, 3, 4: 2 - 2*3 + 4
        assert_eq!(d.value, 0.0);
        assert!(d.truncation_safe);
        let top = s.monomial(&[3]).unwrap();
        assert!(!t.defect_quadratic(&top).unwrap().truncation_safe);
    }

    #[test]
    fn polarization_on_shift_and_swap() {
        let s = WeightedSpace::dirichlet(8);
        let t = shift(&s);
        let rep = t
            .defect_form_by_polarization(&t.safe_subspace().unwrap())
            .unwrap();
        assert!(rep.max_residual <= 1e-12);
        assert_eq!(rep.safe_dim, 7);
        assert!(matches!(
            t.defect_form_by_polarization(&Subspace::whole(&s)),
            Err(TwoIsoError::NotTruncationSafe { .. })
        ));

        let sw = swap();
        let sp = sw.space().clone();
        let vt = sw
            .perturb(&sp.basis_vector(0).scale(c(-2.0, 0.0)), &sp.basis_vector(1))
            .unwrap();
        let rep = vt
            .defect_form_by_polarization(&Subspace::whole(&sp))
            .unwrap();
        assert!(rep.max_residual < 1e-15);
    }

    #[test]
    fn polarized_matrix_matches_delta2_on_exact_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..6 {
            let s = sampling::random_weighted_space(&mut rng, d);
            let t = Operator::from_matrix(&s, sampling::random_matrix(&mut rng, d)).unwrap();
            let whole = Subspace::whole(&s);
            let rep = t.defect_form_by_polarization(&whole).unwrap();
            let delta = t.delta2();
            for (a, fa) in whole.orthonormal_basis().iter().enumerate() {
                for (b, fb) in whole.orthonormal_basis().iter().enumerate() {
                    let direct = s.inner(&delta.apply(fb).unwrap(), fa).unwrap();
                    let scale = 1.0 + direct.norm();
                    assert!((rep.defect_matrix[(a, b)] - direct).norm() < 1e-10 * scale);
                }
            }
            assert!(rep.hermitian_defect() < 1e-10 * (1.0 + rep.max_residual));
        }
    }

    #[test]
    fn weighted_operator_norm() {
        let s = WeightedSpace::dirichlet(6);
        // ||M_z z^k||^2 / ||z^k||^2 = (k+2)/(k+1), largest at k = 0
        let n = shift(&s).operator_norm();
        assert!((n - 2f64.sqrt()).abs() < 1e-12);
        assert!((swap().operator_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_json_roundtrip() {
        let s = WeightedSpace::dirichlet(3);
        let t = shift(&s);
        let text = serde_json::to_string(&t.to_doc()).unwrap();
        let back = Operator::from_doc(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.matrix(), t.matrix());
        assert_eq!(back.degree_growth(), DegreeGrowth::Bounded(1));

        let rows = r#"{"space":{"kind":"custom","weights":[1,1]},
                       "matrix":[[[0,0],[1,0]],[[1,0],[0,0]]],"degree_growth":"unbounded"}"#;
        let op = Operator::from_doc(serde_json::from_str(rows).unwrap()).unwrap();
        assert_eq!(op.matrix(), swap().matrix());
        assert_eq!(op.degree_growth(), DegreeGrowth::Unbounded);

        let under = r#"{"space":{"kind":"dirichlet","max_degree":1},
                        "matrix":[[0,0],[0,0],[1,0],[0,0]],"degree_growth":0}"#;
        assert!(Operator::from_doc(serde_json::from_str(under).unwrap()).is_err());
    }

    #[test]
    fn growth_arithmetic() {
        use DegreeGrowth::*;
        assert_eq!(Bounded(1).max(Bounded(3)), Bounded(3));
        assert_eq!(Bounded(1).plus(Bounded(3)), Bounded(4));
        assert_eq!(Bounded(1).plus(Unbounded), Unbounded);
        let s = WeightedSpace::dirichlet(6);
        let t = shift(&s);
        assert_eq!(t.compose(&t).unwrap().degree_growth(), Bounded(2));
        assert_eq!(t.compose(&t).unwrap().scanned_degree_growth(), 2);
        assert_eq!(t.adjoint().rescan_growth().degree_growth(), Bounded(0));
    }
}
