//! JSON input documents for the command line and bindings.

use serde::{Deserialize, Serialize};

use crate::analysis::PerturbationProblem;
use crate::error::Result;
use crate::function_spaces::{dirichlet_problem, PolyCoeffs, DIRICHLET_DEFAULT_N};
use crate::operator::{Operator, OperatorDoc};
use crate::space::Vector;

/// Either an explicit `(T, u, v)` triple or a Dirichlet polynomial perturbation
/// `M_z + p ⊗ 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnalyzeInput {
    Explicit {
        operator: OperatorDoc,
        u: Vector,
        v: Vector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected_two_isometry: Option<bool>,
    },
    DirichletPoly {
        dirichlet_poly: PolyCoeffs,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_degree: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expected_two_isometry: Option<bool>,
    },
}

impl AnalyzeInput {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn expected(&self) -> Option<bool> {
        match self {
            Self::Explicit {
                expected_two_isometry,
                ..
            }
            | Self::DirichletPoly {
                expected_two_isometry,
                ..
            } => *expected_two_isometry,
        }
    }

    /// `(T, u, v)` before normalization. `max_degree_override` wins over the
    /// document's own truncation for polynomial inputs.
    pub fn parts(&self, max_degree_override: Option<u32>) -> Result<(Operator, Vector, Vector)> {
        match self {
            Self::Explicit { operator, u, v, .. } => {
                let t = Operator::from_doc(operator.clone())?;
                t.space().check(u)?;
                t.space().check(v)?;
                Ok((t, u.clone(), v.clone()))
            }
            Self::DirichletPoly {
                dirichlet_poly,
                max_degree,
                ..
            } => {
                let n = max_degree_override
                    .or(*max_degree)
                    .unwrap_or(DIRICHLET_DEFAULT_N);
                let p = dirichlet_problem(n, dirichlet_poly)?;
                Ok((p.base().clone(), p.u().clone(), p.v().clone()))
            }
        }
    }

    pub fn problem(
        &self,
        max_degree_override: Option<u32>,
        tol_rank: f64,
        tol_defect: f64,
        allow_non_2iso_base: bool,
    ) -> Result<PerturbationProblem> {
        let (t, u, v) = self.parts(max_degree_override)?;
        PerturbationProblem::builder(t, u, v)
            .tol_rank(tol_rank)
            .tol_defect(tol_defect)
            .allow_non_2iso_base(allow_non_2iso_base)
            .build()
    }
}

/// Operator and test vector for a single defect evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DefectInput {
    pub operator: OperatorDoc,
    pub x: Vector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectOutput {
    pub value: f64,
    pub truncation_safe: bool,
}

impl DefectInput {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn evaluate(&self) -> Result<DefectOutput> {
        let t = Operator::from_doc(self.operator.clone())?;
        let d = t.defect_quadratic(&self.x)?;
        Ok(DefectOutput {
            value: d.value,
            truncation_safe: d.truncation_safe,
        })
    }
}
