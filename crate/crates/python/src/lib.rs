//! Python bindings. Structured results come back as plain dicts with the
//! same layout as the CLI's JSON output.

use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use ctslab::bounds;
use ctslab::cts::{self, Discriminant, DEFAULT_ENUM_CAP};
use ctslab::field::{all_points, Point};
use ctslab::kakeya::{self, PointSet};
use ctslab::nullsatz::{self, DEFAULT_MATRIX_CAP};
use ctslab::secante::{self, CaseClass, SecanteInput};
use ctslab::variety::{self, ConstructibleSet, DEFAULT_POINT_CAP};
use ctslab::{DegreeProfile, Evaluable, MultiPoly, PrimeField, Rng};

fn err(e: ctslab::Error) -> PyErr {
    if e.is_resource_cap() {
        PyMemoryError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Serialize through JSON into a Python object.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// Accept a JSON string or any JSON-serializable Python object.
fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = match obj.extract::<String>() {
        Ok(s) => s,
        Err(_) => obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?,
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn points(v: Vec<Vec<u64>>) -> Vec<Point> {
    v.into_iter().map(Point).collect()
}

fn field(p: u64) -> PyResult<PrimeField> {
    PrimeField::new(p).map_err(err)
}

/// Polynomial over F_p. Terms are `(coefficient, exponents)` pairs.
#[pyclass(name = "Poly", frozen, from_py_object)]
#[derive(Clone)]
struct PyPoly(MultiPoly);

#[pymethods]
impl PyPoly {
    #[new]
    fn new(p: u64, n: usize, terms: Vec<(i64, Vec<u32>)>) -> PyResult<Self> {
        let k = field(p)?;
        let terms = terms.into_iter().map(|(c, e)| (ctslab::Monomial::new(e), k.from_i64(c)));
        MultiPoly::from_terms(k, n, terms).map(PyPoly).map_err(err)
    }

    #[staticmethod]
    fn from_json(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        from_py(obj).map(PyPoly)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("polynomials serialize")
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.field().modulus()
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.0.nvars()
    }

    /// Total degree, or None for the zero polynomial.
    fn degree(&self) -> Option<u32> {
        self.0.degree()
    }

    fn coefficient(&self, mu: Vec<u32>) -> PyResult<u64> {
        self.0.coefficient(&mu).map_err(err)
    }

    fn __call__(&self, x: Vec<u64>) -> PyResult<u64> {
        self.0.evaluate(&x).map_err(err)
    }

    fn __add__(&self, other: &PyPoly) -> PyPoly {
        PyPoly(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &PyPoly) -> PyPoly {
        PyPoly(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &PyPoly) -> PyPoly {
        PyPoly(&self.0 * &other.0)
    }

    fn __eq__(&self, other: &PyPoly) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Poly({})", self.0)
    }
}

/// Polynomial family with Σ = {0}.
#[pyclass(name = "Family", frozen)]
struct PyFamily(cts::PolyFamily);

#[pymethods]
impl PyFamily {
    /// All polynomial systems of degrees `degrees` in n variables.
    #[staticmethod]
    fn dense(p: u64, n: usize, degrees: Vec<u32>) -> PyResult<Self> {
        let profile = DegreeProfile::new(n, degrees).map_err(err)?;
        Ok(PyFamily(cts::PolyFamily::dense(field(p)?, profile)))
    }

    /// Linear span of single-polynomial basis elements.
    #[staticmethod]
    fn linear(basis: Vec<PyPoly>) -> PyResult<Self> {
        let first = basis
            .first()
            .ok_or_else(|| PyValueError::new_err("empty basis"))?;
        let (k, n) = (first.0.field(), first.0.nvars());
        let basis = basis.into_iter().map(|b| vec![b.0]).collect();
        cts::PolyFamily::linear(k, n, basis).map(PyFamily).map_err(err)
    }

    #[staticmethod]
    fn from_json(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        from_py(obj).map(PyFamily)
    }

    #[getter]
    fn dim(&self) -> Option<u64> {
        self.0.dim()
    }

    #[getter]
    fn deg_lci(&self) -> Option<u64> {
        self.0.deg_lci()
    }

    #[pyo3(signature = (points, cap=DEFAULT_ENUM_CAP))]
    fn is_cts<'py>(&self, py: Python<'py>, points: Vec<Vec<u64>>, cap: u64) -> PyResult<Bound<'py, PyAny>> {
        let v = cts::is_cts(&self.0, &Discriminant::ZeroOnly, &self::points(points), cap).map_err(err)?;
        to_py(py, &v)
    }

    /// Smallest CTS inside `pool` (all of F_p^n when omitted).
    #[pyo3(signature = (pool=None, cap=DEFAULT_ENUM_CAP))]
    fn covering_number<'py>(
        &self,
        py: Python<'py>,
        pool: Option<Vec<Vec<u64>>>,
        cap: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let pool = match pool {
            Some(v) => points(v),
            None => all_points(self.0.field(), self.0.nvars()).collect(),
        };
        let r = cts::covering_number(&self.0, &Discriminant::ZeroOnly, None, &pool, cap).map_err(err)?;
        to_py(py, &r)
    }

    #[pyo3(signature = (grid_size, length, trials, seed=0, cap=DEFAULT_ENUM_CAP))]
    fn density<'py>(
        &self,
        py: Python<'py>,
        grid_size: u64,
        length: u64,
        trials: u64,
        seed: u64,
        cap: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let values: Vec<u64> = (1..=grid_size).collect();
        let r = cts::density_experiment(&self.0, &Discriminant::ZeroOnly, &values, length, trials, seed, cap)
            .map_err(err)?;
        to_py(py, &r)
    }
}

/// Grid algebra over a product of finite grids in F_p^n.
#[pyclass(name = "GridAlgebra", frozen)]
struct PyGridAlgebra(nullsatz::GridAlgebra);

#[pymethods]
impl PyGridAlgebra {
    #[new]
    fn new(p: u64, grids: Vec<Vec<u64>>) -> PyResult<Self> {
        nullsatz::GridAlgebra::new(field(p)?, grids)
            .map(PyGridAlgebra)
            .map_err(err)
    }

    #[getter]
    fn size(&self) -> u64 {
        self.0.size()
    }

    fn pairing(&self, theta: Vec<u32>, mu: Vec<u32>) -> PyResult<u64> {
        self.0.pairing(&theta, &mu).map_err(err)
    }

    /// Coefficient of X^theta read off grid values of `f`.
    fn extract_coefficient(&self, f: &PyPoly, theta: Vec<u32>, degree: u32) -> PyResult<u64> {
        let f: Evaluable = f.0.clone().into();
        self.0.extract_coefficient(&f, &theta, degree).map_err(err)
    }

    fn find_witness(&self, f: &PyPoly) -> PyResult<Option<Vec<u64>>> {
        let f: Evaluable = f.0.clone().into();
        Ok(self.0.find_witness(&f).map_err(err)?.map(|x| x.0))
    }

    fn normal_form(&self, g: &PyPoly) -> PyResult<PyPoly> {
        self.0.normal_form(&g.0).map(PyPoly).map_err(err)
    }

    #[pyo3(signature = (h, cap=DEFAULT_MATRIX_CAP))]
    fn trace_check<'py>(&self, py: Python<'py>, h: &PyPoly, cap: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.homothety_trace_check(&h.0, cap).map_err(err)?)
    }

    fn delta_pattern<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.delta_pattern().map_err(err)?)
    }
}

#[pyfunction]
fn is_prime(n: u64) -> bool {
    ctslab::field::is_prime(n)
}

/// Sample length L and grid radius R as a dict.
#[pyfunction]
fn cts_params<'py>(py: Python<'py>, dim: u64, deg: u64, d: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cts::cts_params(dim, deg, d).map_err(err)?)
}

/// Decide a Suite Sécante input given as JSON (string or dict).
#[pyfunction]
#[pyo3(signature = (input, seed=0))]
fn decide_secante<'py>(py: Python<'py>, input: &Bound<'py, PyAny>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let input: SecanteInput = from_py(input)?;
    to_py(py, &secante::decide_secante(&input, &mut Rng::new(seed)).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (p=10007, n=3, m=2, trials=100, seed=0))]
fn secante_harness(py: Python<'_>, p: u64, n: usize, m: usize, trials: u64, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let k = field(p)?;
    let mut rng = Rng::new(seed);
    let cases = CaseClass::ALL
        .iter()
        .map(|&c| secante::build_case(k, n, m, c, &mut rng))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    to_py(py, &secante::truth_harness(&cases, trials, seed).map_err(err)?)
}

/// Points of the union of all lines through `center`.
#[pyfunction]
#[pyo3(signature = (q, n, center=None))]
fn build_star(q: u64, n: usize, center: Option<Vec<u64>>) -> PyResult<Vec<Vec<u64>>> {
    let c = Point(center.unwrap_or_else(|| vec![0; n]));
    let e = kakeya::build_star(field(q)?, n, &c).map_err(err)?;
    Ok(e.points.into_iter().map(|x| x.0).collect())
}

fn point_set(q: u64, n: usize, pts: Vec<Vec<u64>>) -> PyResult<PointSet> {
    PointSet::new(field(q)?, n, points(pts)).map_err(err)
}

#[pyfunction]
fn is_kakeya(py: Python<'_>, q: u64, n: usize, points: Vec<Vec<u64>>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &kakeya::is_kakeya(&point_set(q, n, points)?))
}

#[pyfunction]
fn kakeya_cts_check(py: Python<'_>, q: u64, n: usize, points: Vec<Vec<u64>>, d: u32) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &kakeya::kakeya_cts_check(&point_set(q, n, points)?, d).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (q, n, d, k, trials=100, seed=0))]
fn cts_not_kakeya(py: Python<'_>, q: u64, n: usize, d: u32, k: u64, trials: u64, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &kakeya::cts_not_kakeya_experiment(field(q)?, n, d, k, trials, seed).map_err(err)?)
}

#[pyfunction]
fn croix_de_berny(py: Python<'_>, p: u64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &variety::croix_de_berny(p).map_err(err)?)
}

/// Point count of a constructible set given as JSON.
#[pyfunction]
#[pyo3(signature = (set, cap=DEFAULT_POINT_CAP))]
fn count_points<'py>(py: Python<'py>, set: &Bound<'py, PyAny>, cap: u64) -> PyResult<Bound<'py, PyAny>> {
    let set: ConstructibleSet = from_py(set)?;
    to_py(py, &variety::count_points(&set, cap).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (f, cap=DEFAULT_POINT_CAP))]
fn ore_check<'py>(py: Python<'py>, f: &PyPoly, cap: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &variety::ore_check(&f.0, cap).map_err(err)?)
}

/// Lower bound on the density of CTS among random lists.
#[pyfunction]
#[pyo3(signature = (dim, deg, length, m=1))]
fn density_bound(dim: u64, deg: u64, length: u64, m: u64) -> f64 {
    bounds::density_failure(dim, deg, m, length).complement()
}

#[pyfunction]
fn sz_bound(py: Python<'_>, deg: u64, card: u64, codim: u64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &bounds::sz_bound(deg, card, codim).map_err(err)?)
}

#[pymodule]
fn ctslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoly>()?;
    m.add_class::<PyFamily>()?;
    m.add_class::<PyGridAlgebra>()?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(cts_params, m)?)?;
    m.add_function(wrap_pyfunction!(decide_secante, m)?)?;
    m.add_function(wrap_pyfunction!(secante_harness, m)?)?;
    m.add_function(wrap_pyfunction!(build_star, m)?)?;
    m.add_function(wrap_pyfunction!(is_kakeya, m)?)?;
    m.add_function(wrap_pyfunction!(kakeya_cts_check, m)?)?;
    m.add_function(wrap_pyfunction!(cts_not_kakeya, m)?)?;
    m.add_function(wrap_pyfunction!(croix_de_berny, m)?)?;
    m.add_function(wrap_pyfunction!(count_points, m)?)?;
    m.add_function(wrap_pyfunction!(ore_check, m)?)?;
    m.add_function(wrap_pyfunction!(density_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sz_bound, m)?)?;
    Ok(())
}
