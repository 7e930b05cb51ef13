//! Deciding whether `T + u ⊗ v` is again a 2-isometry.
//!
//! For a 2-isometry `T`, unit `v`, `K = u ⊗ v` and
//! `S = {x in ker K : Tx in ker K} = span{v, T*v}^⊥`, the perturbation
//! `T~ = T + K` is a 2-isometry iff `Delta_2(T~) v = 0` and either
//!
//! * (i) `S = ker K` (equivalently `T*v` is parallel to `v`), or
//! * (ii)(a) `Delta_2(T~)` leaves `S` invariant and
//!   (ii)(b) `||u||^2 = -2 (gamma + Re <u, Tv>)` with
//!   `gamma = Re(<T* P T* u, x> / <T* v, x>)`, `P` the projection onto `v^⊥`
//!   and `x` spanning the line `S^⊥ ∩ ker K`.
//!
//! [`theorem_verdict`] evaluates these conditions and, independently, the
//! polarized defect of `T~` on its safe subspace, and reports both verdicts.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TwoIsoError};
use crate::operator::{DefectReport, Operator};
use crate::space::{Subspace, Vector, WeightedSpace, C64};

pub const DEFAULT_TOL_RANK: f64 = 1e-9;
pub const DEFAULT_TOL_DEFECT: f64 = 1e-8;

/// How far `||v||` may sit from 1 before the pair is rescaled.
const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `ker K` is invariant under `T`.
    I,
    /// `S^⊥ ∩ ker K` is a line; the gamma and invariance conditions apply.
    II,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::I => "(i)",
            Branch::II => "(ii)",
        }
    }
}

/// Rescales so that `v` has unit norm: `(‖v‖ u, v / ‖v‖)`. The rank-one
/// operator is unchanged since `u ⊗ (a v) = (conj(a) u) ⊗ v`.
pub fn normalize_pair(space: &WeightedSpace, u: &Vector, v: &Vector) -> Result<(Vector, Vector)> {
    let nu = space.norm(u)?;
    let nv = space.norm(v)?;
    if nu == 0.0 {
        return Err(TwoIsoError::NotRankOne("u"));
    }
    if nv == 0.0 {
        return Err(TwoIsoError::NotRankOne("v"));
    }
    if (nv - 1.0).abs() <= UNIT_TOL {
        return Ok((u.clone(), v.clone()));
    }
    Ok((u.scale(C64::new(nv, 0.0)), v.scale(C64::new(1.0 / nv, 0.0))))
}

/// A base operator `T` with a rank-one perturbation `u ⊗ v`, `‖v‖ = 1`.
#[derive(Clone, Debug)]
pub struct PerturbationProblem {
    base: Operator,
    u: Vector,
    v: Vector,
    tol_rank: f64,
    tol_defect: f64,
    v_rescaled_from: Option<f64>,
    base_defect: f64,
}

#[derive(Clone, Debug)]
pub struct ProblemBuilder {
    base: Operator,
    u: Vector,
    v: Vector,
    tol_rank: f64,
    tol_defect: f64,
    allow_non_2iso_base: bool,
}

impl ProblemBuilder {
    pub fn tol_rank(mut self, tol: f64) -> Self {
        self.tol_rank = tol;
        self
    }

    pub fn tol_defect(mut self, tol: f64) -> Self {
        self.tol_defect = tol;
        self
    }

    /// Skip the hard check that the base operator is a 2-isometry.
    pub fn allow_non_2iso_base(mut self, allow: bool) -> Self {
        self.allow_non_2iso_base = allow;
        self
    }

    pub fn build(self) -> Result<PerturbationProblem> {
        for (name, tol) in [("tol_rank", self.tol_rank), ("tol_defect", self.tol_defect)] {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(TwoIsoError::InvalidParameter(format!(
                    "{name} must be positive"
                )));
            }
        }
        let space = self.base.space().clone();
        let (u, v) = normalize_pair(&space, &self.u, &self.v)?;
        let nv = space.norm(&self.v)?;
        let v_rescaled_from = ((nv - 1.0).abs() > UNIT_TOL).then_some(nv);

        let base_defect = self
            .base
            .defect_form_by_polarization(&self.base.safe_subspace()?)?
            .max_residual;
        if base_defect > self.tol_defect && !self.allow_non_2iso_base {
            return Err(TwoIsoError::BaseNotTwoIsometry {
                residual: base_defect,
                tol: self.tol_defect,
            });
        }
        Ok(PerturbationProblem {
            base: self.base,
            u,
            v,
            tol_rank: self.tol_rank,
            tol_defect: self.tol_defect,
            v_rescaled_from,
            base_defect,
        })
    }
}

impl PerturbationProblem {
    pub fn builder(base: Operator, u: Vector, v: Vector) -> ProblemBuilder {
        ProblemBuilder {
            base,
            u,
            v,
            tol_rank: DEFAULT_TOL_RANK,
            tol_defect: DEFAULT_TOL_DEFECT,
            allow_non_2iso_base: false,
        }
    }

    /// Default tolerances, base operator validated.
    pub fn new(base: Operator, u: Vector, v: Vector) -> Result<Self> {
        Self::builder(base, u, v).build()
    }

    pub fn base(&self) -> &Operator {
        &self.base
    }

    pub fn space(&self) -> &WeightedSpace {
        self.base.space()
    }

    pub fn u(&self) -> &Vector {
        &self.u
    }

    pub fn v(&self) -> &Vector {
        &self.v
    }

    pub fn tol_rank(&self) -> f64 {
        self.tol_rank
    }

    pub fn tol_defect(&self) -> f64 {
        self.tol_defect
    }

    /// Original `‖v‖` when the pair had to be normalized.
    pub fn v_rescaled_from(&self) -> Option<f64> {
        self.v_rescaled_from
    }

    /// Polarized defect of the base operator on its safe subspace.
    pub fn base_defect(&self) -> f64 {
        self.base_defect
    }

    /// `T~ = T + u ⊗ v`.
    pub fn perturbed(&self) -> Result<Operator> {
        self.base.perturb(&self.u, &self.v)
    }

    /// `ker K = v^⊥`.
    pub fn ker_k(&self) -> Result<Subspace> {
        Subspace::span(self.space(), vec![self.v.clone()])?.orthogonal_complement(None)
    }

    /// Orthogonal projection onto `v^⊥`.
    fn project_ker_k(&self, x: &Vector) -> Vector {
        let s = self.space();
        x - &self.v.scale(s.inner_unchecked(x, &self.v))
    }
}

/// `S = span{v, T*v}^⊥`.
pub fn compute_s(t: &Operator, v: &Vector) -> Result<Subspace> {
    let tsv = t.adjoint().apply(v)?;
    Subspace::span(t.space(), vec![v.clone(), tsv])?.orthogonal_complement(None)
}

/// `T*v - <T*v, v> v` for unit `v`, or `None` when its norm is at most
/// `tol_rank` (then `T*v` is parallel to `v` and `S = ker K`).
pub fn canonical_x(t: &Operator, v: &Vector, tol_rank: f64) -> Result<Option<Vector>> {
    let s = t.space();
    let tsv = t.adjoint().apply(v)?;
    let x = &tsv - &v.scale(s.inner(&tsv, v)? / s.norm_sqr(v)?);
    Ok((s.norm(&x)? > tol_rank).then_some(x))
}

/// Largest `|<Ts, v>|` over an orthonormal basis `s` of `ker K`; zero exactly
/// when `ker K` is invariant under `T`. Independent of [`canonical_x`].
pub fn invariance_defect(t: &Operator, v: &Vector) -> Result<f64> {
    let ker = Subspace::span(t.space(), vec![v.clone()])?.orthogonal_complement(None)?;
    let mut worst: f64 = 0.0;
    for s in ker.orthonormal_basis() {
        worst = worst.max(t.space().inner(&t.apply(s)?, v)?.norm());
    }
    Ok(worst)
}

pub fn branch(problem: &PerturbationProblem) -> Result<Branch> {
    Ok(
        match canonical_x(problem.base(), problem.v(), problem.tol_rank())? {
            None => Branch::I,
            Some(_) => Branch::II,
        },
    )
}

/// `Re(<T* P T* u, x> / <T* v, x>)`. With `x = None` the normalized canonical
/// vector is used.
pub fn gamma(problem: &PerturbationProblem, x: Option<&Vector>) -> Result<f64> {
    let t = problem.base();
    let s = problem.space();
    let ts = t.adjoint();
    let x = match x {
        Some(x) => {
            s.check(x)?;
            x.clone()
        }
        None => {
            let x = canonical_x(t, problem.v(), problem.tol_rank())?
                .ok_or(TwoIsoError::NotBranchTwo("gamma"))?;
            x.scale(C64::new(1.0 / s.norm(&x)?, 0.0))
        }
    };
    let num_vec = ts.apply(&problem.project_ker_k(&ts.apply(problem.u())?))?;
    let num = s.inner(&num_vec, &x)?;
    let den = s.inner(&ts.apply(problem.v())?, &x)?;
    if den.norm() <= problem.tol_rank() {
        return Err(TwoIsoError::DegenerateDenominator(den.norm()));
    }
    Ok((num / den).re)
}

/// `|‖u‖^2 + 2 (gamma + Re <u, Tv>)|`.
pub fn condition_iib_residual(problem: &PerturbationProblem, gamma: f64) -> Result<f64> {
    let s = problem.space();
    let u = problem.u();
    let tv = problem.base().apply(problem.v())?;
    Ok((s.norm_sqr(u)? + 2.0 * (gamma + s.inner(u, &tv)?.re)).abs())
}

/// Invariance residuals for condition (ii)(a), evaluated on the safe subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IiaResidual {
    /// Max of the two checks below.
    pub residual: f64,
    /// `max ‖P_{S^⊥} Delta_2 s‖` over an orthonormal basis of `S ∩ safe`.
    pub on_s: f64,
    /// `‖(I - x x*) Delta_2 x‖` for unit `x` spanning `S^⊥ ∩ ker K`, when that
    /// line is present and safe.
    pub on_line: Option<f64>,
    /// `dim(S ∩ safe)`.
    pub evaluated_dim: usize,
    /// Whether `S^⊥` lies in the safe subspace, which makes `on_s` exact.
    pub complement_safe: bool,
}

/// Condition (ii)(a): `Delta_2(T~)(S) ⊆ S`, with the equivalent check on
/// `S^⊥ ∩ ker K` when `x` spans that line.
pub fn condition_iia_residual(
    ttilde: &Operator,
    s: &Subspace,
    x: Option<&Vector>,
) -> Result<IiaResidual> {
    let safe = ttilde.safe_subspace()?;
    let report = ttilde.defect_form_by_polarization(&safe)?;
    iia_from_report(ttilde, &safe, &report, s, x)
}

/// `P_safe Delta_2 y` from the polarized matrix on the safe basis.
fn apply_defect(
    space: &WeightedSpace,
    safe: &Subspace,
    report: &DefectReport,
    y: &Vector,
) -> Vector {
    let basis = safe.orthonormal_basis();
    let coords: Vec<C64> = basis.iter().map(|f| space.inner_unchecked(y, f)).collect();
    let mut out = space.zero();
    for (a, fa) in basis.iter().enumerate() {
        let c: C64 = (0..basis.len())
            .map(|b| report.defect_matrix[(a, b)] * coords[b])
            .sum();
        out = &out + &fa.scale(c);
    }
    out
}

fn iia_from_report(
    ttilde: &Operator,
    safe: &Subspace,
    report: &DefectReport,
    s: &Subspace,
    x: Option<&Vector>,
) -> Result<IiaResidual> {
    let space = ttilde.space();
    let s_perp = s.orthogonal_complement(None)?;
    let complement_safe = s_perp.orthonormal_basis().iter().all(|f| ttilde.is_safe(f));
    let projected: Vec<Vector> = s_perp
        .orthonormal_basis()
        .iter()
        .map(|g| safe.project(g))
        .collect::<Result<_>>()?;
    let s_safe = Subspace::span(space, projected)?.orthogonal_complement(Some(safe))?;

    let mut on_s: f64 = 0.0;
    for e in s_safe.orthonormal_basis() {
        let r = apply_defect(space, safe, report, e);
        on_s = on_s.max(s_safe.distance(&r)?);
    }

    let on_line = match x {
        Some(x) if ttilde.is_safe(x) => {
            let xhat = x.scale(C64::new(1.0 / space.norm(x)?, 0.0));
            let r = apply_defect(space, safe, report, &xhat);
            let along = xhat.scale(space.inner(&r, &xhat)?);
            Some(space.norm(&(&r - &along))?)
        }
        _ => None,
    };

    Ok(IiaResidual {
        residual: on_line.map_or(on_s, |l| on_s.max(l)),
        on_s,
        on_line,
        evaluated_dim: s_safe.dim(),
        complement_safe,
    })
}

/// `‖Delta_2(T~) v‖` from polarized columns against the safe orthonormal basis.
pub fn kernel_condition_residual(ttilde: &Operator, v: &Vector) -> Result<f64> {
    if !ttilde.is_safe(v) {
        return Err(TwoIsoError::NotTruncationSafe { what: "v" });
    }
    let safe = ttilde.safe_subspace()?;
    let mut acc = 0.0;
    for f in safe.orthonormal_basis() {
        acc += ttilde.polarized_form(v, f)?.norm_sqr();
    }
    Ok(acc.sqrt())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremReport {
    pub branch: Branch,
    pub branch_label: String,
    pub kernel_residual: f64,
    pub gamma: Option<f64>,
    pub cond_iia_residual: Option<f64>,
    pub cond_iia_evaluated_dim: Option<usize>,
    pub cond_iib_residual: Option<f64>,
    /// Max polarized residual of `Delta_2(T~)` on the safe subspace.
    pub oracle_defect: f64,
    pub verdict_theorem: bool,
    pub verdict_oracle: bool,
    pub tol_rank: f64,
    pub tol_defect: f64,
    pub space: WeightedSpace,
    pub safe_dim: usize,
    pub s_dim: usize,
    /// Original `‖v‖` when the pair was rescaled to a unit `v`.
    pub v_rescaled_from: Option<f64>,
    pub base_defect: f64,
}

impl TheoremReport {
    /// Verdict implied by the stored branch and residuals alone.
    pub fn recompute_verdict(&self) -> bool {
        let ok = |r: Option<f64>| r.is_some_and(|r| r <= self.tol_defect);
        self.kernel_residual <= self.tol_defect
            && match self.branch {
                Branch::I => true,
                Branch::II => ok(self.cond_iia_residual) && ok(self.cond_iib_residual),
            }
    }

    pub fn verdicts_agree(&self) -> bool {
        self.verdict_theorem == self.verdict_oracle
    }
}

pub fn theorem_verdict(problem: &PerturbationProblem) -> Result<TheoremReport> {
    let ttilde = problem.perturbed()?;
    let safe = ttilde.safe_subspace()?;
    let oracle = ttilde.defect_form_by_polarization(&safe)?;
    let kernel_residual = kernel_condition_residual(&ttilde, problem.v())?;
    let s = compute_s(problem.base(), problem.v())?;
    let x = canonical_x(problem.base(), problem.v(), problem.tol_rank())?;

    let (branch, gamma, iia, iib) = match &x {
        None => (Branch::I, None, None, None),
        Some(x) => {
            let g = gamma(problem, None)?;
            let iia = iia_from_report(&ttilde, &safe, &oracle, &s, Some(x))?;
            let iib = condition_iib_residual(problem, g)?;
            (Branch::II, Some(g), Some(iia), Some(iib))
        }
    };

    let tol = problem.tol_defect();
    let mut report = TheoremReport {
        branch,
        branch_label: branch.label().to_string(),
        kernel_residual,
        gamma,
        cond_iia_residual: iia.as_ref().map(|r| r.residual),
        cond_iia_evaluated_dim: iia.as_ref().map(|r| r.evaluated_dim),
        cond_iib_residual: iib,
        oracle_defect: oracle.max_residual,
        verdict_theorem: false,
        verdict_oracle: oracle.max_residual <= tol,
        tol_rank: problem.tol_rank(),
        tol_defect: tol,
        space: problem.space().clone(),
        safe_dim: safe.dim(),
        s_dim: s.dim(),
        v_rescaled_from: problem.v_rescaled_from(),
        base_defect: problem.base_defect(),
    };
    report.verdict_theorem = report.recompute_verdict();
    Ok(report)
}
