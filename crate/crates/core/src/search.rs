//! Parameter scans for 2-isometric rank-one perturbations.

use serde::{Deserialize, Serialize};

use crate::analysis::{theorem_verdict, Branch, PerturbationProblem};
use crate::error::{Result, TwoIsoError};
use crate::function_spaces::monomial_perturbation;
use crate::operator::Operator;
use crate::sampling;
use crate::space::{Subspace, WeightedSpace, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Grid points closer to the origin than this are skipped (no perturbation).
const ZERO_TOL: f64 = 1e-12;

pub const SEARCH_DEFAULT_N: u32 = 6;

/// Inclusive rectangular grid over the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn square(min: f64, max: f64, step: f64) -> Self {
        Self {
            re_min: min,
            re_max: max,
            im_min: min,
            im_max: max,
            step,
        }
    }

    fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
        if step.is_nan() || step <= 0.0 || max.is_nan() || min.is_nan() || max < min {
            return Vec::new();
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| min + i as f64 * step).collect()
    }

    /// Row-major grid points, real part outermost.
    pub fn points(&self) -> Vec<C64> {
        let im = Self::axis(self.im_min, self.im_max, self.step);
        Self::axis(self.re_min, self.re_max, self.step)
            .into_iter()
            .flat_map(|re| im.iter().map(move |im| C64::new(re, *im)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub alpha: [f64; 2],
    /// Max polarized defect of `M_z + alpha z^n ⊗ 1` on its safe subspace.
    pub oracle_defect: f64,
    /// `||1||^2 - 2||T~ 1||^2 + ||T~^2 1||^2`.
    pub defect_on_one: f64,
    /// `| |alpha + 1| - 1 |`, distance to the circle `|alpha + 1| = 1`.
    pub circle_distance: f64,
}

/// Evaluates `M_z + alpha z^n ⊗ 1` on Dirichlet degrees `<= n_trunc` at every
/// nonzero grid point.
pub fn scan_dirichlet_alpha(n: u32, grid: &GridSpec, n_trunc: u32) -> Result<Vec<AlphaPoint>> {
    if n + 1 > n_trunc {
        return Err(TwoIsoError::InvalidParameter(format!(
            "z^{n} does not fit below the truncation degree {n_trunc}"
        )));
    }
    let mut out = Vec::new();
    for alpha in grid.points() {
        if alpha.norm() <= ZERO_TOL {
            continue;
        }
        let t = monomial_perturbation(n_trunc, alpha, n)?;
        let safe = t.safe_subspace()?;
        let oracle = t.defect_form_by_polarization(&safe)?.max_residual;
        let one = t.space().monomial(&[0])?;
        out.push(AlphaPoint {
            alpha: [alpha.re, alpha.im],
            oracle_defect: oracle,
            defect_on_one: t.defect_quadratic(&one)?.value,
            circle_distance: ((alpha + 1.0).norm() - 1.0).abs(),
        });
    }
    Ok(out)
}

/// Grid points where `M_z + alpha z^n ⊗ 1` is a 2-isometry at truncation scale.
pub fn search_dirichlet_alpha(
    n: u32,
    grid: &GridSpec,
    n_trunc: u32,
    tol: f64,
) -> Result<Vec<AlphaPoint>> {
    Ok(scan_dirichlet_alpha(n, grid, n_trunc)?
        .into_iter()
        .filter(|p| p.oracle_defect <= tol)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankOneHit {
    pub trial: usize,
    pub v: Vec<[f64; 2]>,
    /// Coefficient `c` in `u = c T v`.
    pub c: [f64; 2],
    pub oracle_defect: f64,
    pub branch: Branch,
    pub verdict_theorem: bool,
}

/// Random unitary `T` on `C^dim` and random unit `v` per trial; scans
/// `u = c T v` over the grid. `T + u ⊗ v = T (I + c v ⊗ v)`, so hits sit on
/// `|c + 1| = 1`.
pub fn search_rank_one(
    dim: usize,
    trials: usize,
    grid: &GridSpec,
    seed: u64,
    tol: f64,
) -> Result<Vec<RankOneHit>> {
    if dim == 0 {
        return Err(TwoIsoError::InvalidParameter(
            "dimension must be positive".into(),
        ));
    }
    let space = WeightedSpace::euclidean(dim)?;
    let whole = Subspace::whole(&space);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = Vec::new();
    for trial in 0..trials {
        let t = Operator::from_matrix(&space, sampling::random_unitary(&mut rng, dim))?;
        let v = sampling::random_vector(&mut rng, dim);
        let v = v.scale(C64::new(1.0 / space.norm(&v)?, 0.0));
        let tv = t.apply(&v)?;
        for c in grid.points() {
            if c.norm() <= ZERO_TOL {
                continue;
            }
            let u = tv.scale(c);
            let oracle = t
                .perturb(&u, &v)?
                .defect_form_by_polarization(&whole)?
                .max_residual;
            if oracle > tol {
                continue;
            }
            let problem = PerturbationProblem::builder(t.clone(), u, v.clone())
                .tol_defect(tol)
                .build()?;
            let report = theorem_verdict(&problem)?;
            hits.push(RankOneHit {
                trial,
                v: v.clone().into(),
                c: [c.re, c.im],
                oracle_defect: oracle,
                branch: report.branch,
                verdict_theorem: report.verdict_theorem,
            });
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        assert_eq!(GridSpec::square(0.0, 1.0, 0.5).points().len(), 9);
        assert!(GridSpec::square(1.0, 0.0, 0.5).points().is_empty());
        assert!(GridSpec::square(0.0, 1.0, 0.0).points().is_empty());
        assert_eq!(GridSpec::square(-3.0, 1.0, 0.05).points().len(), 81 * 81);
    }

    #[test]
    fn alpha_hits_lie_on_circle() {
        let hits = search_dirichlet_alpha(1, &GridSpec::square(-3.0, 1.0, 0.25), 6, 1e-8).unwrap();
        // 16 = a^2 + b^2 in quarter units: (-2, 0), (-1, ±1); the origin is skipped
        assert_eq!(hits.len(), 3);
        assert!(hits.iter().all(|h| h.circle_distance < 1e-12));
        assert!(
            search_dirichlet_alpha(0, &GridSpec::square(-3.0, 1.0, 0.25), 6, 1e-8)
                .unwrap()
                .is_empty()
        );
        assert!(scan_dirichlet_alpha(6, &GridSpec::square(0.0, 1.0, 1.0), 6).is_err());
    }

    #[test]
    fn rank_one_search_is_reproducible() {
        let grid = GridSpec::square(-3.0, 1.0, 0.25);
        let a = search_rank_one(2, 3, &grid, 42, 1e-8).unwrap();
        let b = search_rank_one(2, 3, &grid, 42, 1e-8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 9);
        for h in &a {
            let c = C64::new(h.c[0], h.c[1]);
            assert!(((c + 1.0).norm() - 1.0).abs() < 1e-12);
            assert!(h.verdict_theorem);
        }
        assert!(
            search_rank_one(2, 3, &GridSpec::square(1.0, 0.0, 0.25), 42, 1e-8)
                .unwrap()
                .is_empty()
        );
    }
}
