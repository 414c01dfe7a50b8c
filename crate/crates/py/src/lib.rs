use apolar::apolarity::{expected_perp_dim as expected_dim, perp_space, FormSystem};
use apolar::betti::{generic_betti_mod, points_betti};
use apolar::cohomology::{count_on_curve as count_on, count_trace, quadruple_to_symprod};
use apolar::constructions::{
    base_locus_polyhedra, diagonalize_quadric_pencil, grove_case1_rank, london_count as count_hexahedra, random_octuple,
    BaseLocusCase, DiagonalizationJson,
};
use apolar::json::{read_system, write_system};
use apolar::points::PointSet;
use apolar::random::{random_general_system, rng};
use apolar::{Field, PrimeField, Rationals};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(apolar_py, ApolarError, PyException);

fn err(e: apolar::Error) -> PyErr {
    ApolarError::new_err(e.to_string())
}

/// Parses JSON text into a Python object.
fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A system of forms of degree `d` in `n + 1` variables with rational coefficients.
#[pyclass(name = "FormSystem", module = "apolar_py")]
struct PyFormSystem {
    inner: FormSystem<Rationals>,
}

#[pymethods]
impl PyFormSystem {
    /// A general random system, reproducible from `seed`.
    #[staticmethod]
    fn random(n: usize, d: u32, r: usize, seed: u64) -> PyResult<Self> {
        Ok(PyFormSystem { inner: random_general_system(&mut rng(seed), n, d, r).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyFormSystem { inner: read_system(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        write_system(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn d(&self) -> u32 {
        self.inner.d()
    }

    #[getter]
    fn r(&self) -> usize {
        self.inner.r()
    }

    fn perp_dim(&self, i: u32) -> usize {
        perp_space(&self.inner, i).dim()
    }

    fn __repr__(&self) -> String {
        format!("FormSystem(n={}, d={}, r={})", self.inner.n(), self.inner.d(), self.inner.r())
    }
}

#[pyfunction]
fn expected_perp_dim(n: i64, d: i64, r: i64, i: i64) -> PyResult<usize> {
    expected_dim(n, d, r, i).map_err(err)
}

/// Degree of the locus of polyhedra with vertices on an elliptic curve.
#[pyfunction]
#[pyo3(signature = (m, big_d, q))]
fn count_on_curve(m: usize, big_d: usize, q: usize) -> PyResult<i64> {
    count_on(m, big_d, q).map_err(err)
}

/// Parameters and Chern-class trace for a quadruple on an elliptic normal
/// curve, of degree `n + 1` unless given.
#[pyfunction]
#[pyo3(signature = (n, d, r, s, curve_degree = None))]
fn count_quadruple<'py>(
    py: Python<'py>,
    n: usize,
    d: u32,
    r: usize,
    s: usize,
    curve_degree: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let params = quadruple_to_symprod(n, d, r, s, curve_degree.unwrap_or(n + 1)).map_err(err)?;
    let trace = count_trace(params.m, params.big_d, params.q).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("params", to_py(py, &serde_json::to_value(&params).expect("serializable"))?)?;
    out.set_item("trace", to_py(py, &serde_json::to_value(&trace).expect("serializable"))?)?;
    out.set_item("count", trace.count)?;
    Ok(out)
}

/// Polyhedra in the base locus of the perp space; `system` must have shape
/// `(2,3,8)` or `(3,2,7)`.
#[pyfunction]
fn base_locus<'py>(py: Python<'py>, system: &PyFormSystem) -> PyResult<Bound<'py, PyAny>> {
    let case = match (system.inner.n(), system.inner.d(), system.inner.r()) {
        (2, 3, 8) => BaseLocusCase::Plane,
        (3, 2, 7) => BaseLocusCase::Space,
        shape => return Err(ApolarError::new_err(format!("no base-locus construction for shape {shape:?}"))),
    };
    let rep = base_locus_polyhedra(&system.inner, case).map_err(err)?;
    to_py(py, &rep.to_json())
}

/// Exact counts for a net of plane cubics modulo `prime`.
#[pyfunction]
#[pyo3(signature = (system, prime = 32003, seed = 0))]
fn london_count<'py>(py: Python<'py>, system: &PyFormSystem, prime: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let c = count_hexahedra(&system.inner, prime, seed).map_err(err)?;
    to_py(py, &serde_json::to_value(&c).expect("serializable"))
}

/// Simultaneous diagonalization of a pencil of quadrics.
#[pyfunction]
#[pyo3(signature = (system, seed = 1))]
fn diagonalize<'py>(py: Python<'py>, system: &PyFormSystem, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let b = system.inner.basis();
    if system.inner.d() != 2 || b.len() != 2 {
        return Err(ApolarError::new_err("expected a pencil of quadrics"));
    }
    let d = diagonalize_quadric_pencil(&b[0], &b[1], seed).map_err(err)?;
    to_py(py, &serde_json::to_value(DiagonalizationJson::from(&d)).expect("serializable"))
}

#[pyfunction]
fn grove_rank(seed: u64) -> PyResult<usize> {
    Ok(grove_case1_rank(&random_octuple(seed)).map_err(err)?.rank)
}

/// Betti diagram of integer points of `P^n` reduced modulo `prime`.
#[pyfunction]
#[pyo3(signature = (n, points, prime = 32003))]
fn betti_diagram(n: usize, points: Vec<Vec<i64>>, prime: u64) -> PyResult<String> {
    let fp = PrimeField::new(prime).map_err(err)?;
    let pts = points.iter().map(|p| p.iter().map(|&x| fp.from_i64(x)).collect()).collect();
    let z = PointSet::new(&fp, n, pts).map_err(err)?;
    Ok(points_betti(&z).map_err(err)?.diagram())
}

/// Betti diagram of `s` general points of `P^n`.
#[pyfunction]
#[pyo3(signature = (n, s, seed = 0, prime = 32003))]
fn generic_betti(n: usize, s: usize, seed: u64, prime: u64) -> PyResult<String> {
    Ok(generic_betti_mod(n, s, seed, prime).map_err(err)?.diagram())
}

#[pymodule]
fn apolar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", apolar::VERSION)?;
    m.add("ApolarError", m.py().get_type::<ApolarError>())?;
    m.add_class::<PyFormSystem>()?;
    m.add_function(wrap_pyfunction!(expected_perp_dim, m)?)?;
    m.add_function(wrap_pyfunction!(count_on_curve, m)?)?;
    m.add_function(wrap_pyfunction!(count_quadruple, m)?)?;
    m.add_function(wrap_pyfunction!(base_locus, m)?)?;
    m.add_function(wrap_pyfunction!(london_count, m)?)?;
    m.add_function(wrap_pyfunction!(diagonalize, m)?)?;
    m.add_function(wrap_pyfunction!(grove_rank, m)?)?;
    m.add_function(wrap_pyfunction!(betti_diagram, m)?)?;
    m.add_function(wrap_pyfunction!(generic_betti, m)?)?;
    Ok(())
}
