//! Python bindings: the series type, the parser, the decision pipeline and
//! the instance generators.

use closed_sym3::Complex;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use closed_sym3::criteria::{DEFAULT_ORDER, DEFAULT_TOLERANCE};
use closed_sym3::{fixtures, generate, report, Error, InputSpec, Point, Series2, Sym3Diff};

create_exception!(pysym3, Sym3Error, PyException);
create_exception!(pysym3, ParseError, Sym3Error);
create_exception!(pysym3, DegenerateError, Sym3Error);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } => ParseError::new_err(e.to_string()),
        Error::Degenerate { .. } | Error::ZeroCubic => DegenerateError::new_err(e.to_string()),
        _ => Sym3Error::new_err(e.to_string()),
    }
}

fn to_dict<'py>(py: Python<'py>, json: &str) -> PyResult<Bound<'py, PyDict>> {
    py.import("json")?
        .call_method1("loads", (json,))?
        .cast_into::<PyDict>()
        .map_err(Into::into)
}

/// Truncated power series in z, w with complex coefficients.
#[pyclass(name = "Series", module = "pysym3", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySeries {
    inner: Series2,
}

impl From<Series2> for PySeries {
    fn from(inner: Series2) -> Self {
        PySeries { inner }
    }
}

#[pymethods]
impl PySeries {
    #[new]
    #[pyo3(signature = (text, order = DEFAULT_ORDER))]
    fn new(text: &str, order: usize) -> PyResult<Self> {
        closed_sym3::parse_expression(text, order)
            .map(Into::into)
            .map_err(to_py)
    }

    #[getter]
    fn max_order(&self) -> usize {
        self.inner.max_order()
    }

    #[getter]
    fn valid_order(&self) -> usize {
        self.inner.valid_order()
    }

    /// Coefficient of z^i w^j.
    fn coeff(&self, i: usize, j: usize) -> Complex {
        self.inner.coeff(i, j)
    }

    /// Nonzero terms as `(i, j, coefficient)`.
    fn terms(&self) -> Vec<(usize, usize, Complex)> {
        self.inner.terms().filter(|t| t.2 != Complex::new(0.0, 0.0)).collect()
    }

    fn eval(&self, z: Complex, w: Complex) -> Complex {
        self.inner.eval(Point::new(z, w))
    }

    fn dz(&self) -> Self {
        self.inner.dz().into()
    }

    fn dw(&self) -> Self {
        self.inner.dw().into()
    }

    fn invert(&self) -> PyResult<Self> {
        self.inner.invert().map(Into::into).map_err(to_py)
    }

    fn log(&self) -> PyResult<Self> {
        self.inner.log_unit().map(Into::into).map_err(to_py)
    }

    fn exp(&self) -> Self {
        self.inner.exp_series().into()
    }

    fn cbrt(&self) -> PyResult<Self> {
        self.inner.cube_root_unit().map(Into::into).map_err(to_py)
    }

    fn to_expression(&self) -> String {
        self.inner.to_expression()
    }

    fn __add__(&self, other: &Self) -> Self {
        (&self.inner + &other.inner).into()
    }

    fn __sub__(&self, other: &Self) -> Self {
        (&self.inner - &other.inner).into()
    }

    fn __mul__(&self, other: &Self) -> Self {
        (&self.inner * &other.inner).into()
    }

    fn __truediv__(&self, other: &Self) -> PyResult<Self> {
        self.inner.div(&other.inner).map(Into::into).map_err(to_py)
    }

    fn __neg__(&self) -> Self {
        (-&self.inner).into()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Series({:?}, order={})",
            self.inner.to_expression(),
            self.inner.max_order()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (text, order = DEFAULT_ORDER))]
fn parse_expression(text: &str, order: usize) -> PyResult<PySeries> {
    PySeries::new(text, order)
}

/// Verdict for `(a dz + b dw) dz dw` as a dict.
#[pyfunction]
#[pyo3(signature = (a, b, order = DEFAULT_ORDER, tol = DEFAULT_TOLERANCE))]
fn is_closed<'py>(py: Python<'py>, a: &PySeries, b: &PySeries, order: usize, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let eta = Sym3Diff::from_adapted(&a.inner, &b.inner);
    let verdict = closed_sym3::is_closed(&eta, order, tol).map_err(to_py)?;
    to_dict(py, &serde_json::to_string(&verdict).expect("verdict serializes"))
}

/// Verdict for `c0 dz³ + c1 dz²dw + c2 dz dw² + c3 dw³` as a dict.
#[pyfunction]
#[pyo3(signature = (c0, c1, c2, c3, order = DEFAULT_ORDER, tol = DEFAULT_TOLERANCE))]
#[allow(clippy::too_many_arguments)]
fn is_closed_cubic<'py>(
    py: Python<'py>,
    c0: &PySeries,
    c1: &PySeries,
    c2: &PySeries,
    c3: &PySeries,
    order: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let eta = Sym3Diff::new(c0.inner.clone(), c1.inner.clone(), c2.inner.clone(), c3.inner.clone());
    let verdict = closed_sym3::is_closed(&eta, order, tol).map_err(to_py)?;
    to_dict(py, &serde_json::to_string(&verdict).expect("verdict serializes"))
}

/// Runs a command on a TOML input file's contents; returns `(report, exit_code)`.
#[pyfunction]
#[pyo3(signature = (spec_toml, command = "check", degree_bound = 4, perturb = None))]
fn run<'py>(
    py: Python<'py>,
    spec_toml: &str,
    command: &str,
    degree_bound: usize,
    perturb: Option<f64>,
) -> PyResult<(Bound<'py, PyDict>, i32)> {
    let command = match command {
        "check" => report::Command::Check,
        "web" => report::Command::Web,
        "oracle" => report::Command::Oracle,
        "cross-validate" => report::Command::CrossValidate,
        "generate" => report::Command::Generate { degree_bound, perturb },
        other => return Err(PyValueError::new_err(format!("unknown command {other:?}"))),
    };
    let report = match InputSpec::from_toml(spec_toml) {
        Ok(spec) => closed_sym3::run(&spec, command),
        Err(e) => report::Report::failure(command, None, &e),
    };
    Ok((to_dict(py, &report.to_json())?, report.exit_code()))
}

/// A random closed pair `(a, b)`.
#[pyfunction]
#[pyo3(signature = (seed, order = DEFAULT_ORDER, degree_bound = 4))]
fn gen_closed(seed: u64, order: usize, degree_bound: usize) -> PyResult<(PySeries, PySeries)> {
    let (a, b) = generate::gen_closed(seed, order, degree_bound).map_err(to_py)?;
    Ok((a.into(), b.into()))
}

/// `(a, b)` with one monomial of the given magnitude added to a or b.
#[pyfunction]
fn gen_perturbed(seed: u64, a: &PySeries, b: &PySeries, magnitude: f64) -> (PySeries, PySeries) {
    let (a, b) = generate::gen_perturbed(seed, (&a.inner, &b.inner), magnitude);
    (a.into(), b.into())
}

/// Named reference instances: "closed", "obstructed" or "flat".
#[pyfunction]
#[pyo3(signature = (name, order = DEFAULT_ORDER))]
fn fixture(name: &str, order: usize) -> PyResult<(PySeries, PySeries)> {
    let (a, b) = match name {
        "closed" => fixtures::fixture_c(order),
        "obstructed" => fixtures::fixture_w(order),
        "flat" => fixtures::fixture_k(order),
        other => return Err(PyValueError::new_err(format!("unknown fixture {other:?}"))),
    };
    Ok((a.into(), b.into()))
}

#[pymodule]
fn pysym3(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", report::VERSION)?;
    m.add("Sym3Error", py.get_type::<Sym3Error>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("DegenerateError", py.get_type::<DegenerateError>())?;
    m.add_class::<PySeries>()?;
    m.add_function(wrap_pyfunction!(parse_expression, m)?)?;
    m.add_function(wrap_pyfunction!(is_closed, m)?)?;
    m.add_function(wrap_pyfunction!(is_closed_cubic, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(gen_closed, m)?)?;
    m.add_function(wrap_pyfunction!(gen_perturbed, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    Ok(())
}
