//! Named reproductions of the function-space and `C^2` examples, each checked
//! against its known outcome.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    canonical_x, compute_s, theorem_verdict, Branch, PerturbationProblem, TheoremReport,
    DEFAULT_TOL_DEFECT, DEFAULT_TOL_RANK,
};
use crate::error::{Result, TwoIsoError};
use crate::function_spaces::{
    bidisc_example_operator, bidisc_example_vectors, bidisc_shift, dirichlet_problem,
    monomial_problem, pper_condition_residual, Axis, PolyCoeffs, BIDISC_DEFAULT_N,
    DIRICHLET_DEFAULT_N,
};
use crate::operator::Operator;
use crate::space::{Subspace, WeightedSpace, C64};

pub const EXAMPLES: [&str; 4] = ["c2-example", "dirichlet-pper", "dirichlet-n0", "bidisc"];

/// Tight tolerance for the exactly representable examples.
const EXACT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReproduceOptions {
    pub tol_defect: f64,
    pub tol_rank: f64,
    /// Truncation degree; per-example default when `None`.
    pub n: Option<u32>,
    /// Coefficient for the constant perturbation `M_z + alpha ⊗ 1`.
    pub alpha: C64,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            tol_defect: DEFAULT_TOL_DEFECT,
            tol_rank: DEFAULT_TOL_RANK,
            n: None,
            alpha: C64::new(1.0, 0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedReport {
    pub label: String,
    pub report: TheoremReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Reproduction {
    pub name: String,
    pub checks: Vec<Check>,
    pub reports: Vec<NamedReport>,
    pub notes: Vec<String>,
    pub passed: bool,
}

struct Builder {
    name: String,
    checks: Vec<Check>,
    reports: Vec<NamedReport>,
    notes: Vec<String>,
}

impl Builder {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            checks: Vec::new(),
            reports: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(
        &mut self,
        name: impl Into<String>,
        expected: impl Into<String>,
        observed: impl Into<String>,
        pass: bool,
    ) {
        self.checks.push(Check {
            name: name.into(),
            expected: expected.into(),
            observed: observed.into(),
            pass,
        });
    }

    fn at_most(&mut self, name: &str, value: f64, tol: f64) {
        self.check(
            name,
            format!("<= {tol:.0e}"),
            format!("{value:.3e}"),
            value <= tol,
        );
    }

    fn close(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.check(
            name,
            format!("{:.12} (±{tol:.0e})", target + 0.0),
            format!("{value:.12}"),
            (value - target).abs() <= tol,
        );
    }

    fn verdicts(&mut self, label: &str, r: &TheoremReport, expected: bool) {
        self.check(
            format!("{label}: verdict_theorem"),
            expected.to_string(),
            r.verdict_theorem.to_string(),
            r.verdict_theorem == expected,
        );
        self.check(
            format!("{label}: verdict_oracle"),
            expected.to_string(),
            r.verdict_oracle.to_string(),
            r.verdict_oracle == expected,
        );
    }

    fn report(&mut self, label: &str, report: TheoremReport) {
        self.reports.push(NamedReport {
            label: label.to_string(),
            report,
        });
    }

    fn finish(self) -> Reproduction {
        let passed = self.checks.iter().all(|c| c.pass);
        Reproduction {
            name: self.name,
            checks: self.checks,
            reports: self.reports,
            notes: self.notes,
            passed,
        }
    }
}

pub fn reproduce(name: &str, opts: &ReproduceOptions) -> Result<Reproduction> {
    match name {
        "c2-example" => c2_example(opts),
        "dirichlet-pper" => dirichlet_pper(opts),
        "dirichlet-n0" => dirichlet_n0(opts),
        "bidisc" => bidisc(opts),
        other => Err(TwoIsoError::UnknownExample(other.to_string())),
    }
}

fn problem(
    opts: &ReproduceOptions,
    base: Operator,
    u: crate::space::Vector,
    v: crate::space::Vector,
) -> Result<PerturbationProblem> {
    PerturbationProblem::builder(base, u, v)
        .tol_defect(opts.tol_defect)
        .tol_rank(opts.tol_rank)
        .build()
}

/// `V = [[0, 1], [1, 0]]` perturbed by `-2 e1 ⊗ e2`.
pub fn c2_example_problem(opts: &ReproduceOptions) -> Result<PerturbationProblem> {
    let space = WeightedSpace::euclidean(2)?;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let v_mat = Operator::from_matrix(
        &space,
        DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
    )?;
    let u = space.basis_vector(0).scale(C64::new(-2.0, 0.0));
    problem(opts, v_mat, u, space.basis_vector(1))
}

fn c2_example(opts: &ReproduceOptions) -> Result<Reproduction> {
    let mut b = Builder::new("c2-example");
    let p = c2_example_problem(opts)?;
    let vt = p.perturbed()?;
    let delta = vt
        .delta2()
        .matrix()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    b.at_most("max |Delta_2(V~)| over the full matrix", delta, EXACT_TOL);
    let r = theorem_verdict(&p)?;
    b.check(
        "branch",
        "(ii)",
        r.branch_label.clone(),
        r.branch == Branch::II,
    );
    b.check("S", "{0}", format!("dim {}", r.s_dim), r.s_dim == 0);
    b.close("gamma", r.gamma.unwrap_or(f64::NAN), 0.0, 1e-10);
    b.at_most("kernel residual |Delta_2(V~) e2|", r.kernel_residual, 1e-10);
    b.at_most(
        "condition (ii)(a) residual",
        r.cond_iia_residual.unwrap_or(f64::INFINITY),
        1e-10,
    );
    b.at_most(
        "condition (ii)(b) residual",
        r.cond_iib_residual.unwrap_or(f64::INFINITY),
        1e-10,
    );
    b.verdicts("V - 2 e1 ⊗ e2", &r, true);
    b.report("V - 2 e1 ⊗ e2", r);
    Ok(b.finish())
}

/// Degree-two admissible polynomial with `a_2 = 0.1`.
pub fn pper_counterexample() -> PolyCoeffs {
    let a2: f64 = 0.1;
    let a1 = (1.0 - 2.0 * a2 * a2).sqrt() - 1.0;
    PolyCoeffs::new(vec![C64::new(a1, 0.0), C64::new(a2, 0.0)])
}

fn dirichlet_pper(opts: &ReproduceOptions) -> Result<Reproduction> {
    let n = opts.n.unwrap_or(DIRICHLET_DEFAULT_N);
    let mut b = Builder::new("dirichlet-pper");
    let c = C64::new;
    let on_circle = C64::from_polar(1.0, std::f64::consts::FRAC_PI_3) - 1.0;
    let cases = [
        ("p = -2z", PolyCoeffs::new(vec![c(-2.0, 0.0)])),
        ("p = (e^{i pi/3} - 1) z", PolyCoeffs::new(vec![on_circle])),
        ("p = i z", PolyCoeffs::new(vec![c(0.0, 1.0)])),
        ("p = z^2", PolyCoeffs::new(vec![c(0.0, 0.0), c(1.0, 0.0)])),
        (
            "p = 0.5 z + 0.5 z^2",
            PolyCoeffs::new(vec![c(0.5, 0.0), c(0.5, 0.0)]),
        ),
        ("p = (sqrt(0.98) - 1) z + 0.1 z^2", pper_counterexample()),
    ];
    for (label, p) in cases {
        let residual = pper_condition_residual(&p);
        let claimed = residual.abs() <= opts.tol_defect;
        let prob = dirichlet_problem(n, &p)?;
        let prob =
            PerturbationProblem::builder(prob.base().clone(), prob.u().clone(), prob.v().clone())
                .tol_defect(opts.tol_defect)
                .tol_rank(opts.tol_rank)
                .build()?;
        let t = prob.perturbed()?;
        let q1 = t.defect_quadratic(prob.v())?.value;
        b.close(
            &format!("{label}: defect on 1 = -2Re(a1) - sum i|a_i|^2"),
            q1,
            -residual,
            1e-10,
        );
        let r = theorem_verdict(&prob)?;
        b.check(
            format!("{label}: branch"),
            "(i)",
            r.branch_label.clone(),
            r.branch == Branch::I,
        );
        b.verdicts(
            &format!("{label} (criterion residual {residual:.3e})"),
            &r,
            claimed,
        );
        if claimed && !r.verdict_oracle {
            let one = prob.v();
            let z = t.space().monomial(&[1])?;
            let off = t.polarized_form(one, &z)?;
            b.notes.push(format!(
                "{label}: the criterion holds (<Delta_2 1, 1> = {q1:.1e}) but \
                 <Delta_2 1, z> = {:.6} {:+.6}i = -2 a_2, so Delta_2 1 != 0 and the \
                 operator is not a 2-isometry. The criterion only controls <Delta_2 1, 1>; \
                 it characterizes 2-isometries when p = a_1 z.",
                off.re, off.im
            ));
        }
        b.report(label, r);
    }
    Ok(b.finish())
}

fn dirichlet_n0(opts: &ReproduceOptions) -> Result<Reproduction> {
    let n = opts.n.unwrap_or(DIRICHLET_DEFAULT_N);
    let mut b = Builder::new("dirichlet-n0");
    let mut alphas = vec![opts.alpha];
    for a in [C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.5, -0.5)] {
        if a != opts.alpha {
            alphas.push(a);
        }
    }
    for alpha in alphas {
        if alpha.norm() == 0.0 {
            return Err(TwoIsoError::InvalidParameter(
                "alpha must be nonzero".into(),
            ));
        }
        let label = format!("alpha = {}{:+}i", alpha.re, alpha.im);
        let prob = monomial_problem(n, alpha, 0)?;
        let prob =
            PerturbationProblem::builder(prob.base().clone(), prob.u().clone(), prob.v().clone())
                .tol_defect(opts.tol_defect)
                .tol_rank(opts.tol_rank)
                .build()?;
        let t = prob.perturbed()?;
        let q1 = t.defect_quadratic(prob.v())?.value;
        let fourth = alpha.norm_sqr().powi(2);
        b.close(
            &format!("{label}: defect on 1 = |alpha|^4"),
            q1,
            fourth,
            1e-10,
        );
        let r = theorem_verdict(&prob)?;
        b.verdicts(&label, &r, false);
        b.report(&label, r);
    }
    b.notes.push(
        "The defect of M_z + alpha ⊗ 1 on the constant 1 expands to \
         1 - 2(2 + |alpha|^2) + (3 + 2|alpha|^2 + |alpha|^4) = |alpha|^4. \
         A value of |alpha|^2 is sometimes quoted for this; both are nonzero for alpha != 0, \
         so the conclusion (never a 2-isometry) stands."
            .to_string(),
    );
    Ok(b.finish())
}

fn bidisc(opts: &ReproduceOptions) -> Result<Reproduction> {
    let n = opts.n.unwrap_or(BIDISC_DEFAULT_N);
    let mut b = Builder::new("bidisc");
    let mt = bidisc_example_operator(n)?;
    let s = mt.space().clone();
    let z1 = s.monomial(&[1, 0])?;
    let z2 = s.monomial(&[0, 1])?;
    let z1z2 = s.monomial(&[1, 1])?;
    let img = mt.apply(&z1)?;
    b.at_most("|M~ z1 - z2|", s.norm(&(&img - &z2))?, EXACT_TOL);
    b.at_most(
        "|M~^2 z1 - z1 z2|",
        s.norm(&(&mt.apply(&img)? - &z1z2))?,
        EXACT_TOL,
    );

    let shift = bidisc_shift(n, Axis::Z1)?;
    let (u, v) = bidisc_example_vectors(&s)?;
    let p = problem(opts, shift.clone(), u.clone(), v.clone())?;

    let s_sub = compute_s(&shift, &v)?;
    let span = Subspace::span(&s, vec![s.monomial(&[0, 0])?, z1.clone()])?;
    let s_expected = span.orthogonal_complement(None)?;
    let same = s_sub.dim() == s_expected.dim()
        && s_sub
            .orthonormal_basis()
            .iter()
            .all(|e| s_expected.contains(e, 1e-12).unwrap_or(false));
    b.check(
        "S",
        "{1, z1}^⊥",
        format!("dim {} of {}", s_sub.dim(), s.dim()),
        same,
    );

    let x = canonical_x(&shift, &v, opts.tol_rank)?;
    let x_is_one = x
        .as_ref()
        .map(|x| {
            let line = Subspace::span(&s, vec![s.monomial(&[0, 0]).unwrap()]).unwrap();
            line.contains(x, 1e-12).unwrap_or(false)
        })
        .unwrap_or(false);
    b.check(
        "S^⊥ ∩ ker K",
        "span{1}",
        if x_is_one { "span{1}" } else { "other" },
        x_is_one,
    );

    b.close("||u||^2", s.norm_sqr(&u)?, 2.0, EXACT_TOL);
    let re = s.inner(&u, &shift.apply(&v)?)?.re;
    b.close("Re <u, M_z1 z1>", re, -1.0, EXACT_TOL);

    let r = theorem_verdict(&p)?;
    b.check(
        "branch",
        "(ii)",
        r.branch_label.clone(),
        r.branch == Branch::II,
    );
    b.close("gamma", r.gamma.unwrap_or(f64::NAN), 0.0, EXACT_TOL);
    b.at_most(
        "kernel residual |Delta_2(M~) z1|",
        r.kernel_residual,
        EXACT_TOL,
    );
    b.at_most(
        "condition (ii)(a) residual",
        r.cond_iia_residual.unwrap_or(f64::INFINITY),
        EXACT_TOL,
    );
    b.at_most(
        "condition (ii)(b) residual",
        r.cond_iib_residual.unwrap_or(f64::INFINITY),
        EXACT_TOL,
    );

    let low = Subspace::coordinate(
        &s,
        s.labels()
            .iter()
            .enumerate()
            .filter(|(_, l)| l.total_degree() <= 2)
            .map(|(i, _)| i),
    );
    let low_defect = mt.defect_form_by_polarization(&low)?.max_residual;
    b.at_most("polarized defect on total degree <= 2", low_defect, 1e-10);
    b.verdicts("M_z1 + (-z1^2 + z2) ⊗ z1", &r, true);
    b.report("M_z1 + (-z1^2 + z2) ⊗ z1", r);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproductions_run() {
        let opts = ReproduceOptions::default();
        assert!(reproduce("c2-example", &opts).unwrap().passed);
        assert!(reproduce("bidisc", &opts).unwrap().passed);
        assert!(reproduce("dirichlet-n0", &opts).unwrap().passed);
        assert!(matches!(
            reproduce("nope", &opts),
            Err(TwoIsoError::UnknownExample(_))
        ));
    }

    #[test]
    fn pper_reproduction_flags_the_degree_two_case() {
        let rep = reproduce("dirichlet-pper", &ReproduceOptions::default()).unwrap();
        let failing: Vec<&Check> = rep.checks.iter().filter(|c| !c.pass).collect();
        assert!(!rep.passed);
        assert!(!failing.is_empty());
        assert!(failing.iter().all(|c| c.name.contains("0.1 z^2")));
        assert_eq!(rep.notes.len(), 1);
    }

    #[test]
    fn n0_defect_is_one_for_alpha_one() {
        let rep = reproduce("dirichlet-n0", &ReproduceOptions::default()).unwrap();
        let first = &rep.checks[0];
        assert!(first.pass);
        assert!(first.observed.starts_with("1.000000000000"));
    }
}
