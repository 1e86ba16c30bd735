//! Python bindings for `derangements`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use derangements as core;
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pyderangements, PermutationError, PyValueError);
create_exception!(pyderangements, BijectionError, PyValueError);
create_exception!(pyderangements, BoundExceeded, PyValueError);

fn perm_err(e: core::PermError) -> PyErr {
    PermutationError::new_err(e.to_string())
}

fn bij_err(e: core::BijectionError) -> PyErr {
    BijectionError::new_err(e.to_string())
}

fn bound_err(e: core::EnumerateError) -> PyErr {
    BoundExceeded::new_err(e.to_string())
}

fn parse_class(name: &str) -> PyResult<core::PermClass> {
    name.parse().map_err(perm_err)
}

fn parse_mode(mode: &str) -> PyResult<core::FormatMode> {
    match mode {
        "canonical" => Ok(core::FormatMode::Canonical),
        "fixed-point-first" | "fixed_point_first" => Ok(core::FormatMode::FixedPointFirst),
        other => Err(PyValueError::new_err(format!(
            "unknown format mode {other:?}"
        ))),
    }
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

/// A permutation of {1..n} in one-line form: `image[i - 1] == π(i)`.
#[pyclass(
    name = "Permutation",
    module = "pyderangements",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyPermutation {
    inner: core::Permutation,
}

#[pymethods]
impl PyPermutation {
    #[new]
    fn new(image: Vec<u32>) -> PyResult<Self> {
        core::Permutation::new(image)
            .map(|inner| PyPermutation { inner })
            .map_err(perm_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn image(&self) -> Vec<u32> {
        self.inner.image().to_vec()
    }

    fn fixed_points(&self) -> Vec<u32> {
        self.inner.fixed_points().into_iter().collect()
    }

    /// Names of every class the permutation belongs to.
    fn classify(&self) -> Vec<&'static str> {
        self.inner
            .classify()
            .into_iter()
            .map(|c| c.name())
            .collect()
    }

    fn to_cycle_form(&self) -> PyCycleForm {
        PyCycleForm {
            inner: self.inner.to_cycle_form(),
        }
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        hash_of(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Permutation({:?})", self.inner.image())
    }
}

/// A cycle decomposition; `str()` gives canonical notation.
#[pyclass(
    name = "CycleForm",
    module = "pyderangements",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
struct PyCycleForm {
    inner: core::CycleForm,
}

#[pymethods]
impl PyCycleForm {
    /// Parses e.g. "(1,3,4)(2)"; the result is canonical.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::parse_cycles(text)
            .map(|inner| PyCycleForm { inner })
            .map_err(perm_err)
    }

    /// Any valid decomposition of {1..n}; order is kept as given.
    #[staticmethod]
    fn from_cycles(n: usize, cycles: Vec<Vec<u32>>) -> PyResult<Self> {
        core::CycleForm::from_cycles(n, cycles)
            .map(|inner| PyCycleForm { inner })
            .map_err(perm_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn cycles(&self) -> Vec<Vec<u32>> {
        self.inner.cycles().to_vec()
    }

    fn is_canonical(&self) -> bool {
        self.inner.is_canonical()
    }

    fn canonicalize(&self) -> Self {
        PyCycleForm {
            inner: self.inner.clone().canonicalize(),
        }
    }

    fn fixed_points(&self) -> Vec<u32> {
        self.inner.fixed_points()
    }

    /// `mode` is "canonical" or "fixed-point-first".
    #[pyo3(signature = (mode = "canonical"))]
    fn format(&self, mode: &str) -> PyResult<String> {
        self.inner.format(parse_mode(mode)?).map_err(perm_err)
    }

    fn to_permutation(&self) -> PyPermutation {
        PyPermutation {
            inner: self.inner.to_permutation(),
        }
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        hash_of(&self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("CycleForm({:?})", self.inner.to_string())
    }
}

#[pyfunction]
fn parse_cycles(text: &str) -> PyResult<PyCycleForm> {
    PyCycleForm::parse(text)
}

#[pyfunction]
fn prefix_k(c: &PyCycleForm) -> usize {
    core::prefix_k(&c.inner.clone().canonicalize())
}

/// Returns `(case, k, a1)`; `case` is "i", "ii" or "excluded" (k and a1 are
/// None for excluded inputs).
#[pyfunction]
fn classify_case(c: &PyCycleForm) -> PyResult<(&'static str, Option<usize>, Option<u32>)> {
    let case = core::classify_case(&c.inner).map_err(bij_err)?;
    Ok((case.tag(), case.k(), case.a1()))
}

#[pyfunction]
fn psi(c: &PyCycleForm) -> PyResult<PyCycleForm> {
    core::psi(&c.inner)
        .map(|inner| PyCycleForm { inner })
        .map_err(bij_err)
}

#[pyfunction]
fn psi_inverse(c: &PyCycleForm) -> PyResult<PyCycleForm> {
    core::psi_inverse(&c.inner)
        .map(|inner| PyCycleForm { inner })
        .map_err(bij_err)
}

/// Members of a class ("s", "d", "f", "dstar", "fstar") in lexicographic order.
#[pyfunction]
fn iter_class(n: usize, class: &str) -> PyResult<Vec<PyPermutation>> {
    let class = parse_class(class)?;
    Ok(core::iter_class(n, class)
        .map(|inner| PyPermutation { inner })
        .collect())
}

#[pyfunction]
fn count_d_rec1(n_max: usize) -> Vec<BigUint> {
    core::count_d_rec1(n_max)
}

#[pyfunction]
fn count_d_rec2(n_max: usize) -> Vec<BigUint> {
    core::count_d_rec2(n_max)
}

#[pyfunction]
#[pyo3(signature = (n, class, bound = core::DEFAULT_BOUND))]
fn count_class_bruteforce(n: usize, class: &str, bound: usize) -> PyResult<u64> {
    core::count_class_bruteforce(n, parse_class(class)?, bound).map_err(bound_err)
}

/// Exhaustive check for one `n`, returned as a dict.
#[pyfunction]
#[pyo3(signature = (n, shard_count = 1, bound = core::DEFAULT_BOUND))]
fn verify_n<'py>(
    py: Python<'py>,
    n: usize,
    shard_count: usize,
    bound: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let report = py
        .detach(|| core::verify_n_with_bound(n, shard_count, bound))
        .map_err(bound_err)?;
    let counts = report.cardinalities.brute.unwrap_or_default();
    let d = PyDict::new(py);
    d.set_item("n", report.n)?;
    d.set_item("bijective", report.bijective)?;
    d.set_item("inverse_ok", report.inverse_ok)?;
    d.set_item("excluded_count_d", report.excluded_count_d)?;
    d.set_item("excluded_count_f", report.excluded_count_f)?;
    d.set_item("image_size", report.image_size)?;
    d.set_item("invariant_violations", report.invariant_violations)?;
    d.set_item("d_n", counts.d)?;
    d.set_item("f_n", counts.f)?;
    d.set_item("dstar_n", counts.dstar)?;
    d.set_item("fstar_n", counts.fstar)?;
    d.set_item("failure_count", report.failure_count)?;
    let failures: Vec<(String, String, String, String)> = report
        .failures
        .iter()
        .map(|f| {
            (
                format!("{:?}", f.phase).to_lowercase(),
                f.input.clone(),
                f.expected.clone(),
                f.actual.clone(),
            )
        })
        .collect();
    d.set_item("failures", failures)?;
    Ok(d)
}

type RowTuple = (String, String, String, Option<usize>, Option<u32>);

/// Worked example rows as `(input, output, case, k, a1)`; "-" marks a
/// missing side.
#[pyfunction]
fn golden_tables() -> Vec<RowTuple> {
    core::golden_tables()
        .into_iter()
        .map(|r| (r.input, r.output, r.case, r.k, r.a1))
        .collect()
}

#[pymodule]
pub fn pyderangements(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPermutation>()?;
    m.add_class::<PyCycleForm>()?;
    m.add("PermutationError", m.py().get_type::<PermutationError>())?;
    m.add("BijectionError", m.py().get_type::<BijectionError>())?;
    m.add("BoundExceeded", m.py().get_type::<BoundExceeded>())?;
    m.add("DEFAULT_BOUND", core::DEFAULT_BOUND)?;
    m.add_function(wrap_pyfunction!(parse_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(prefix_k, m)?)?;
    m.add_function(wrap_pyfunction!(classify_case, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(psi_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(iter_class, m)?)?;
    m.add_function(wrap_pyfunction!(count_d_rec1, m)?)?;
    m.add_function(wrap_pyfunction!(count_d_rec2, m)?)?;
    m.add_function(wrap_pyfunction!(count_class_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(verify_n, m)?)?;
    m.add_function(wrap_pyfunction!(golden_tables, m)?)?;
    Ok(())
}
