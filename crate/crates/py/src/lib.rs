use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use twoiso::function_spaces::{self as fs, PolyCoeffs};
use twoiso::reproduce::ReproduceOptions;
use twoiso::{BasisLabel, TwoIsoError, Vector, DEFAULT_TOL_DEFECT, DEFAULT_TOL_RANK};

fn err(e: TwoIsoError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(x: Vec<Complex64>) -> Vector {
    Vector::from_coeffs(x)
}

/// Finite weighted coefficient space.
#[pyclass(name = "WeightedSpace", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpace(twoiso::WeightedSpace);

#[pymethods]
impl PySpace {
    /// Dirichlet space on degrees 0..=max_degree, weights k + 1.
    #[staticmethod]
    fn dirichlet(max_degree: u32) -> Self {
        Self(twoiso::WeightedSpace::dirichlet(max_degree))
    }

    /// Hardy space of the bidisc on total degree <= max_degree.
    #[staticmethod]
    fn bidisc(max_degree: u32) -> Self {
        Self(twoiso::WeightedSpace::bidisc(max_degree))
    }

    #[staticmethod]
    fn euclidean(dim: usize) -> PyResult<Self> {
        twoiso::WeightedSpace::euclidean(dim).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (weights, labels=None))]
    fn custom(weights: Vec<f64>, labels: Option<Vec<Vec<u32>>>) -> PyResult<Self> {
        let labels = labels
            .unwrap_or_else(|| (0..weights.len() as u32).map(|k| vec![k]).collect())
            .into_iter()
            .map(BasisLabel::new)
            .collect();
        twoiso::WeightedSpace::custom(labels, weights)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn max_degree(&self) -> u32 {
        self.0.max_degree()
    }

    #[getter]
    fn kind(&self) -> String {
        format!("{:?}", self.0.kind()).to_lowercase()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights().to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<Vec<u32>> {
        self.0
            .labels()
            .iter()
            .map(|l| l.multi_index().to_vec())
            .collect()
    }

    fn monomial(&self, multi_index: Vec<u32>) -> PyResult<Vec<Complex64>> {
        self.0
            .monomial(&multi_index)
            .map(|v| v.coeffs().to_vec())
            .map_err(err)
    }

    fn inner(&self, x: Vec<Complex64>, y: Vec<Complex64>) -> PyResult<Complex64> {
        self.0.inner(&vector(x), &vector(y)).map_err(err)
    }

    fn norm(&self, x: Vec<Complex64>) -> PyResult<f64> {
        self.0.norm(&vector(x)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("WeightedSpace(kind={}, dim={})", self.kind(), self.0.dim())
    }
}

/// Matrix operator on a weighted space.
#[pyclass(name = "Operator", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyOperator(twoiso::Operator);

#[pymethods]
impl PyOperator {
    /// `matrix` is a list of rows.
    #[new]
    fn new(space: &PySpace, matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        twoiso::Operator::from_rows(&space.0, &matrix)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn identity(space: &PySpace) -> Self {
        Self(twoiso::Operator::identity(&space.0))
    }

    #[staticmethod]
    fn rank_one(space: &PySpace, u: Vec<Complex64>, v: Vec<Complex64>) -> PyResult<Self> {
        twoiso::Operator::rank_one(&space.0, &vector(u), &vector(v))
            .map(Self)
            .map_err(err)
    }

    /// Reads the JSON document used by the command line.
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let doc = serde_json::from_str(s).map_err(|e| err(e.into()))?;
        twoiso::Operator::from_doc(doc).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0.to_doc()).map_err(|e| err(e.into()))
    }

    #[getter]
    fn space(&self) -> PySpace {
        PySpace(self.0.space().clone())
    }

    /// Rows of the matrix.
    #[getter]
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.matrix();
        (0..m.nrows())
            .map(|i| m.row(i).iter().copied().collect())
            .collect()
    }

    /// Degree bound as an int, or None when unbounded.
    #[getter]
    fn degree_growth(&self) -> Option<u32> {
        match self.0.degree_growth() {
            twoiso::DegreeGrowth::Bounded(g) => Some(g),
            twoiso::DegreeGrowth::Unbounded => None,
        }
    }

    fn apply(&self, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.0
            .apply(&vector(x))
            .map(|v| v.coeffs().to_vec())
            .map_err(err)
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn compose(&self, other: &PyOperator) -> PyResult<Self> {
        self.0.compose(&other.0).map(Self).map_err(err)
    }

    fn perturb(&self, u: Vec<Complex64>, v: Vec<Complex64>) -> PyResult<Self> {
        self.0
            .perturb(&vector(u), &vector(v))
            .map(Self)
            .map_err(err)
    }

    fn delta2(&self) -> Self {
        Self(self.0.delta2())
    }

    /// `(value, truncation_safe)` for `||x||^2 - 2||Tx||^2 + ||T^2 x||^2`.
    fn defect_quadratic(&self, x: Vec<Complex64>) -> PyResult<(f64, bool)> {
        let d = self.0.defect_quadratic(&vector(x)).map_err(err)?;
        Ok((d.value, d.truncation_safe))
    }

    /// Max polarized defect on the truncation-safe subspace.
    fn oracle_defect(&self) -> PyResult<f64> {
        let safe = self.0.safe_subspace().map_err(err)?;
        Ok(self
            .0
            .defect_form_by_polarization(&safe)
            .map_err(err)?
            .max_residual)
    }

    fn __repr__(&self) -> String {
        format!(
            "Operator(dim={}, degree_growth={})",
            self.0.dim(),
            self.0.degree_growth()
        )
    }
}

#[pyclass(name = "TheoremReport", frozen, get_all)]
struct PyReport {
    branch: String,
    kernel_residual: f64,
    gamma: Option<f64>,
    cond_iia_residual: Option<f64>,
    cond_iib_residual: Option<f64>,
    oracle_defect: f64,
    verdict_theorem: bool,
    verdict_oracle: bool,
    safe_dim: usize,
    s_dim: usize,
    json: String,
}

#[pymethods]
impl PyReport {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "TheoremReport(branch={}, verdict_theorem={}, verdict_oracle={})",
            self.branch, self.verdict_theorem, self.verdict_oracle
        )
    }
}

/// Structural verdict for `T + u ⊗ v` next to the direct defect check.
#[pyfunction]
#[pyo3(signature = (base, u, v, tol_rank=DEFAULT_TOL_RANK, tol_defect=DEFAULT_TOL_DEFECT, allow_non_2iso_base=false))]
fn theorem_verdict(
    base: &PyOperator,
    u: Vec<Complex64>,
    v: Vec<Complex64>,
    tol_rank: f64,
    tol_defect: f64,
    allow_non_2iso_base: bool,
) -> PyResult<PyReport> {
    let problem = twoiso::PerturbationProblem::builder(base.0.clone(), vector(u), vector(v))
        .tol_rank(tol_rank)
        .tol_defect(tol_defect)
        .allow_non_2iso_base(allow_non_2iso_base)
        .build()
        .map_err(err)?;
    let r = twoiso::theorem_verdict(&problem).map_err(err)?;
    Ok(PyReport {
        branch: r.branch_label.clone(),
        kernel_residual: r.kernel_residual,
        gamma: r.gamma,
        cond_iia_residual: r.cond_iia_residual,
        cond_iib_residual: r.cond_iib_residual,
        oracle_defect: r.oracle_defect,
        verdict_theorem: r.verdict_theorem,
        verdict_oracle: r.verdict_oracle,
        safe_dim: r.safe_dim,
        s_dim: r.s_dim,
        json: serde_json::to_string(&r).map_err(|e| err(e.into()))?,
    })
}

#[pyfunction]
fn dirichlet_shift(max_degree: u32) -> PyResult<PyOperator> {
    fs::dirichlet_shift(max_degree).map(PyOperator).map_err(err)
}

/// `M_z + p ⊗ 1` with `p = sum a_i z^i`, `coeffs = [a_1, a_2, ...]`.
#[pyfunction]
fn perturbed_dirichlet(max_degree: u32, coeffs: Vec<Complex64>) -> PyResult<PyOperator> {
    fs::perturbed_dirichlet(max_degree, &PolyCoeffs::new(coeffs))
        .map(PyOperator)
        .map_err(err)
}

/// `sum i|a_i|^2 + 2 Re a_1`.
#[pyfunction]
fn pper_condition_residual(coeffs: Vec<Complex64>) -> f64 {
    fs::pper_condition_residual(&PolyCoeffs::new(coeffs))
}

#[pyfunction]
fn bidisc_shift(max_degree: u32, axis: usize) -> PyResult<PyOperator> {
    let axis = match axis {
        1 => fs::Axis::Z1,
        2 => fs::Axis::Z2,
        _ => return Err(PyValueError::new_err("axis must be 1 or 2")),
    };
    fs::bidisc_shift(max_degree, axis)
        .map(PyOperator)
        .map_err(err)
}

#[pyfunction]
fn bidisc_example_operator(max_degree: u32) -> PyResult<PyOperator> {
    fs::bidisc_example_operator(max_degree)
        .map(PyOperator)
        .map_err(err)
}

/// `(passed, json)` for a built-in example.
#[pyfunction]
#[pyo3(signature = (name, max_degree=None))]
fn reproduce(name: &str, max_degree: Option<u32>) -> PyResult<(bool, String)> {
    let opts = ReproduceOptions {
        n: max_degree,
        ..ReproduceOptions::default()
    };
    let rep = twoiso::reproduce(name, &opts).map_err(err)?;
    let json = serde_json::to_string(&rep).map_err(|e| err(e.into()))?;
    Ok((rep.passed, json))
}

#[pymodule]
#[pyo3(name = "twoiso")]
fn twoiso_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(theorem_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_shift, m)?)?;
    m.add_function(wrap_pyfunction!(perturbed_dirichlet, m)?)?;
    m.add_function(wrap_pyfunction!(pper_condition_residual, m)?)?;
    m.add_function(wrap_pyfunction!(bidisc_shift, m)?)?;
    m.add_function(wrap_pyfunction!(bidisc_example_operator, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    m.add("EXAMPLES", twoiso::EXAMPLES.to_vec())?;
    Ok(())
}
