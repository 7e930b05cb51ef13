//! Shift operators on truncated Dirichlet and bidisc Hardy spaces, and the
//! rank-one perturbations studied on them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analysis::PerturbationProblem;
use crate::error::{Result, TwoIsoError};
use crate::operator::{DegreeGrowth, Operator};
use crate::space::{Vector, WeightedSpace, C64};

pub const DIRICHLET_DEFAULT_N: u32 = 12;
pub const BIDISC_DEFAULT_N: u32 = 6;

/// Coefficients `a_1 .. a_k` of `p(z) = sum a_i z^i`; the constant term is 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<[f64; 2]>", from = "Vec<[f64; 2]>")]
pub struct PolyCoeffs {
    a: Vec<C64>,
}

impl PolyCoeffs {
    pub fn new(a: Vec<C64>) -> Self {
        Self { a }
    }

    /// `alpha z^n`, `n >= 1`.
    pub fn monomial(alpha: C64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(TwoIsoError::InvalidParameter(
                "p has no constant term; use monomial_perturbation for n = 0".into(),
            ));
        }
        let mut a = vec![C64::new(0.0, 0.0); n];
        a[n - 1] = alpha;
        Ok(Self { a })
    }

    /// `a_i` for `i >= 1`, zero past the stored length.
    pub fn coeff(&self, i: usize) -> C64 {
        if i == 0 {
            return C64::new(0.0, 0.0);
        }
        self.a.get(i - 1).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.a
    }

    /// Index of the highest nonzero coefficient, 0 for `p = 0`.
    pub fn degree(&self) -> usize {
        self.a
            .iter()
            .rposition(|c| *c != C64::new(0.0, 0.0))
            .map_or(0, |i| i + 1)
    }

    pub fn to_vector(&self, space: &WeightedSpace) -> Result<Vector> {
        let d = self.degree();
        if d >= space.dim() {
            return Err(TwoIsoError::InvalidParameter(format!(
                "deg p = {d} does not fit in a space of dimension {}",
                space.dim()
            )));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); space.dim()];
        coeffs[1..=d].copy_from_slice(&self.a[..d]);
        Ok(Vector::from_coeffs(coeffs))
    }
}

impl From<Vec<[f64; 2]>> for PolyCoeffs {
    fn from(pairs: Vec<[f64; 2]>) -> Self {
        Self::new(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl From<PolyCoeffs> for Vec<[f64; 2]> {
    fn from(p: PolyCoeffs) -> Self {
        p.a.iter().map(|c| [c.re, c.im]).collect()
    }
}

fn shift_matrix(space: &WeightedSpace, step: &[u32]) -> DMatrix<C64> {
    let n = space.dim();
    let mut m = DMatrix::zeros(n, n);
    for (j, label) in space.labels().iter().enumerate() {
        let target: Vec<u32> = label
            .multi_index()
            .iter()
            .zip(step)
            .map(|(a, b)| a + b)
            .collect();
        if let Some(i) = space.index_of(&target) {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
    }
    m
}

/// `M_z` on Dirichlet degrees `<= n`; the top monomial maps to 0.
pub fn dirichlet_shift(n: u32) -> Result<Operator> {
    if n < 2 {
        return Err(TwoIsoError::InvalidParameter(format!(
            "dirichlet shift needs N >= 2, got {n}"
        )));
    }
    let space = WeightedSpace::dirichlet(n);
    let m = shift_matrix(&space, &[1]);
    Operator::with_growth(&space, m, DegreeGrowth::Bounded(1))
}

/// `M_z + p ⊗ 1`, with `1` the unit-norm constant function.
pub fn perturbed_dirichlet(n: u32, p: &PolyCoeffs) -> Result<Operator> {
    let shift = dirichlet_shift(n)?;
    if p.degree() == 0 {
        return Ok(shift);
    }
    if p.degree() > n as usize - 1 {
        return Err(TwoIsoError::InvalidParameter(format!(
            "deg p = {} exceeds N - 1 = {}",
            p.degree(),
            n - 1
        )));
    }
    let space = shift.space().clone();
    shift.perturb(&p.to_vector(&space)?, &space.monomial(&[0])?)
}

/// `M_z + alpha z^n ⊗ 1`, including the constant case `n = 0`.
pub fn monomial_perturbation(n_trunc: u32, alpha: C64, n: u32) -> Result<Operator> {
    let shift = dirichlet_shift(n_trunc)?;
    let space = shift.space().clone();
    let u = space.monomial(&[n])?.scale(alpha);
    shift.perturb(&u, &space.monomial(&[0])?)
}

/// `sum i |a_i|^2 + 2 Re(a_1)`; zero is the stated criterion for
/// `M_z + p ⊗ 1` to be a 2-isometry.
///
/// The criterion is `<Delta_2 1, 1> = 0` only. For `y ⊥ 1` one has
/// `<Delta_2 1, y> = -sum_{k>=2} k a_k conj(y_{k-1})`, so a vanishing residual
/// characterizes 2-isometries only when `a_k = 0` for all `k >= 2`.
pub fn pper_condition_residual(p: &PolyCoeffs) -> f64 {
    let weighted: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| (i + 1) as f64 * a.norm_sqr())
        .sum();
    weighted + 2.0 * p.coeff(1).re
}

/// `T = M_z`, `u = p`, `v = 1` on Dirichlet degrees `<= n`.
pub fn dirichlet_problem(n: u32, p: &PolyCoeffs) -> Result<PerturbationProblem> {
    let shift = dirichlet_shift(n)?;
    let space = shift.space().clone();
    if p.degree() > n as usize - 1 {
        return Err(TwoIsoError::InvalidParameter(format!(
            "deg p exceeds N - 1 = {}",
            n - 1
        )));
    }
    let u = p.to_vector(&space)?;
    let v = space.monomial(&[0])?;
    PerturbationProblem::new(shift, u, v)
}

/// `T = M_z`, `u = alpha z^n`, `v = 1`.
pub fn monomial_problem(n_trunc: u32, alpha: C64, n: u32) -> Result<PerturbationProblem> {
    let shift = dirichlet_shift(n_trunc)?;
    let space = shift.space().clone();
    let u = space.monomial(&[n])?.scale(alpha);
    let v = space.monomial(&[0])?;
    PerturbationProblem::new(shift, u, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Z1,
    Z2,
}

/// `M_{z1}` or `M_{z2}` on bidisc total degree `<= n`.
pub fn bidisc_shift(n: u32, axis: Axis) -> Result<Operator> {
    if n < 2 {
        return Err(TwoIsoError::InvalidParameter(format!(
            "bidisc shift needs N >= 2, got {n}"
        )));
    }
    let space = WeightedSpace::bidisc(n);
    let step = match axis {
        Axis::Z1 => [1, 0],
        Axis::Z2 => [0, 1],
    };
    Operator::with_growth(
        &space,
        shift_matrix(&space, &step),
        DegreeGrowth::Bounded(1),
    )
}

/// `u = -z1^2 + z2` and `v = z1` on bidisc total degree `<= n`.
pub fn bidisc_example_vectors(space: &WeightedSpace) -> Result<(Vector, Vector)> {
    let u = &space.monomial(&[0, 1])? - &space.monomial(&[2, 0])?;
    Ok((u, space.monomial(&[1, 0])?))
}

/// `M_{z1} + (-z1^2 + z2) ⊗ z1`.
pub fn bidisc_example_operator(n: u32) -> Result<Operator> {
    if n < 4 {
        return Err(TwoIsoError::InvalidParameter(format!(
            "the bidisc example needs N >= 4, got {n}"
        )));
    }
    let shift = bidisc_shift(n, Axis::Z1)?;
    let (u, v) = bidisc_example_vectors(shift.space())?;
    shift.perturb(&u, &v)
}

pub fn bidisc_example_problem(n: u32) -> Result<PerturbationProblem> {
    if n < 4 {
        return Err(TwoIsoError::InvalidParameter(format!(
            "the bidisc example needs N >= 4, got {n}"
        )));
    }
    let shift = bidisc_shift(n, Axis::Z1)?;
    let (u, v) = bidisc_example_vectors(shift.space())?;
    PerturbationProblem::new(shift, u, v)
}
