//! Python bindings: exact and asymptotic evaluation, edge solving and the
//! validation harness.

use std::sync::Arc;

use num_complex::Complex64;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sieved_pollaczek::asymptotics::{self, AsymptoticOptions, ClassifierSettings, SzegoMode};
use sieved_pollaczek::auxfun::BoundaryPoint;
use sieved_pollaczek::equilibrium::{self, solve_mrs};
use sieved_pollaczek::harness::{self, GridSpec, OutputFormat, Quantity, SweepOptions, VerifyReport};
use sieved_pollaczek::{airy, oracle, Error, FamilyParams, ScaledComplex};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn options(r: f64, szego: &str) -> PyResult<AsymptoticOptions> {
    let szego = match szego {
        "exact" => SzegoMode::Exact,
        "approx" => SzegoMode::Approx,
        other => return Err(PyValueError::new_err(format!("unknown szego mode {other:?}"))),
    };
    let classifier = ClassifierSettings::with_r(r);
    classifier.validate().map_err(err)?;
    Ok(AsymptoticOptions { classifier, szego })
}

fn to_complex(v: &ScaledComplex) -> PyResult<Complex64> {
    if v.in_f64_range() {
        Ok(v.to_c64())
    } else {
        Err(PyOverflowError::new_err(format!("value exp({:.6e}) is outside the double range; use the log form", v.ln_abs())))
    }
}

/// A value kept as `mantissa * 2**exponent`, wide enough for any degree.
#[pyclass(frozen, skip_from_py_object, name = "Value", module = "sieved_pollaczek")]
#[derive(Clone, Copy)]
struct PyValue(ScaledComplex);

#[pymethods]
impl PyValue {
    #[getter]
    fn mantissa(&self) -> Complex64 {
        self.0.mant
    }

    #[getter]
    fn exponent(&self) -> i64 {
        self.0.exp2
    }

    /// `ln|v|` and `arg v`.
    fn log(&self) -> (f64, f64) {
        (self.0.ln_abs(), self.0.arg())
    }

    /// The value as a Python complex; raises OverflowError when out of range.
    #[pyo3(name = "to_complex")]
    fn complex_value(&self) -> PyResult<Complex64> {
        to_complex(&self.0)
    }

    fn rel_diff(&self, other: &PyValue) -> f64 {
        self.0.rel_diff(&other.0)
    }

    fn __complex__(&self) -> PyResult<Complex64> {
        to_complex(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Value({} * 2**{})", self.0.mant, self.0.exp2)
    }
}

/// The family at one parameter value, evaluated by the exact recurrence.
#[pyclass(frozen, name = "Family", module = "sieved_pollaczek")]
struct PyFamily {
    params: FamilyParams,
}

#[pymethods]
impl PyFamily {
    #[new]
    #[pyo3(signature = (b, precision_bits = FamilyParams::DEFAULT_PRECISION))]
    fn new(b: f64, precision_bits: u32) -> PyResult<Self> {
        Ok(PyFamily { params: FamilyParams::with_precision(b, precision_bits).map_err(err)? })
    }

    #[getter]
    fn b(&self) -> f64 {
        self.params.b
    }

    #[getter]
    fn precision_bits(&self) -> u32 {
        self.params.precision_bits
    }

    /// `p_n(z)` by recurrence, raising precision until stable.
    fn eval(&self, py: Python<'_>, n: usize, z: Complex64) -> PyResult<PyValue> {
        let p = self.params;
        py.detach(|| oracle::eval_pn(&p, n, z)).map(|v| PyValue(v.value)).map_err(err)
    }

    /// `p_0(z) .. p_n(z)` at the initial precision.
    fn sequence(&self, py: Python<'_>, n: usize, z: Complex64) -> PyResult<Vec<PyValue>> {
        let p = self.params;
        let seq = py.detach(|| oracle::eval_recurrence(&p, n, z)).map_err(err)?;
        Ok(seq.values.into_iter().map(PyValue).collect())
    }

    /// Real zeros of `p_n` in `[lo, hi]`.
    #[pyo3(signature = (n, lo, hi, grid_points = 4000, tol = 1e-13))]
    fn real_zeros(&self, py: Python<'_>, n: usize, lo: f64, hi: f64, grid_points: usize, tol: f64) -> PyResult<Vec<f64>> {
        let p = self.params;
        py.detach(|| oracle::real_zeros_in(&p, n, (lo, hi), grid_points, tol)).map_err(err)
    }

    /// Residual of the reflection identity `p_n(-z) = (-1)^n p_n(z)`.
    fn symmetry_residual(&self, n: usize, z: Complex64) -> f64 {
        oracle::check_symmetry(&self.params, n, z)
    }

    fn __repr__(&self) -> String {
        format!("Family(b={}, precision_bits={})", self.params.b, self.params.precision_bits)
    }
}

/// Equilibrium data at one degree and the asymptotic formulas built on it.
#[pyclass(frozen, name = "Equilibrium", module = "sieved_pollaczek")]
struct PyEquilibrium {
    eq: Arc<equilibrium::Equilibrium>,
}

fn point(z: Complex64) -> BoundaryPoint {
    BoundaryPoint::snapped(z)
}

#[pymethods]
impl PyEquilibrium {
    #[new]
    fn new(py: Python<'_>, b: f64, n: usize) -> PyResult<Self> {
        let params = FamilyParams::new(b).map_err(err)?;
        let eq = py.detach(|| equilibrium::Equilibrium::new(params, n)).map_err(err)?;
        Ok(PyEquilibrium { eq })
    }

    #[getter]
    fn b(&self) -> f64 {
        self.eq.b()
    }

    #[getter]
    fn n(&self) -> usize {
        self.eq.n()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.eq.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.eq.beta()
    }

    /// The Lagrange multiplier of the phase condition.
    #[getter]
    fn l(&self) -> f64 {
        self.eq.mrs.l
    }

    /// Equilibrium density at real x.
    fn density(&self, x: f64) -> PyResult<f64> {
        self.eq.psi(x).map_err(err)
    }

    /// Logarithmic potential g(z); real z on the support takes the upper side.
    fn g(&self, z: Complex64) -> PyResult<Complex64> {
        self.eq.g(&point(z)).map_err(err)
    }

    /// Region label of z.
    #[pyo3(signature = (z, r = 0.5))]
    fn region(&self, z: Complex64, r: f64) -> PyResult<String> {
        let o = options(r, "exact")?;
        Ok(asymptotics::classify_region(&self.eq, z, &o.classifier).tag.to_string())
    }

    /// Asymptotic value of p_n(z) from the formula of its region, or of the
    /// named region when `region` is given.
    #[pyo3(signature = (z, region = None, r = 0.5, szego = "exact"))]
    fn asymptotic(&self, py: Python<'_>, z: Complex64, region: Option<&str>, r: f64, szego: &str) -> PyResult<(PyValue, String)> {
        let o = options(r, szego)?;
        let tag = region.map(|s| s.parse::<asymptotics::RegionTag>()).transpose().map_err(err)?;
        let eq = self.eq.clone();
        let v = py
            .detach(|| match tag {
                Some(t) => asymptotics::eval_region(&eq, t, z, &o),
                None => asymptotics::eval_auto(&eq, z, &o),
            })
            .map_err(err)?;
        Ok((PyValue(v.value), v.region.tag.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Equilibrium(b={}, n={}, alpha={}, beta={})", self.eq.b(), self.eq.n(), self.eq.alpha(), self.eq.beta())
    }
}

/// Soft edges, multiplier and equation residuals as a dict.
#[pyfunction]
fn mrs<'py>(py: Python<'py>, b: f64, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let params = FamilyParams::new(b).map_err(err)?;
    let m = py.detach(|| solve_mrs(&params, n)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("alpha", m.alpha)?;
    d.set_item("beta", m.beta)?;
    d.set_item("l", m.l)?;
    d.set_item("residuals", (m.residuals[0], m.residuals[1]))?;
    d.set_item("iterations", m.iterations)?;
    Ok(d)
}

/// `Ai(s)` and `Ai'(s)` for complex s.
#[pyfunction]
fn airy_ai(s: Complex64) -> PyResult<(Complex64, Complex64)> {
    let (a, d) = airy::airy_ai(s).map_err(err)?;
    Ok((to_complex(&a)?, to_complex(&d)?))
}

/// Oracle-versus-asymptotic sweep rendered as csv or jsonl text.
#[pyfunction]
#[pyo3(signature = (b, n_list, grid, format = "csv", r = 0.5))]
fn sweep(py: Python<'_>, b: f64, n_list: Vec<usize>, grid: &str, format: &str, r: f64) -> PyResult<String> {
    let params = FamilyParams::new(b).map_err(err)?;
    let grid = GridSpec::parse(grid).map_err(err)?;
    let format: OutputFormat = format.parse().map_err(err)?;
    let opts = SweepOptions { asymptotic: options(r, "exact")?, timing: false };
    let buf = py
        .detach(|| -> sieved_pollaczek::Result<Vec<u8>> {
            let records = harness::sweep(&params, &n_list, &grid, &opts)?;
            let mut buf = Vec::new();
            harness::emit(&records, format, &mut buf)?;
            Ok(buf)
        })
        .map_err(err)?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Fitted decay order of a named error quantity.
#[pyfunction]
fn convergence<'py>(py: Python<'py>, quantity: &str, b: f64, n_list: Vec<usize>) -> PyResult<Bound<'py, PyDict>> {
    let q: Quantity = quantity.parse().map_err(err)?;
    let params = FamilyParams::new(b).map_err(err)?;
    let rep = py.detach(|| harness::convergence(q, &params, &n_list, &AsymptoticOptions::default())).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("quantity", rep.quantity)?;
    d.set_item("n_list", rep.n_list)?;
    d.set_item("errors", rep.errors)?;
    d.set_item("fitted_order", rep.fitted_order)?;
    d.set_item("claimed_order", rep.claimed_order)?;
    d.set_item("exact", rep.exact)?;
    d.set_item("passed", rep.passed)?;
    Ok(d)
}

/// One structural check; returns (passed, worst, tolerance, details).
#[pyfunction]
#[pyo3(signature = (check, b = 1.0, n = None, max_degree = 8))]
fn verify(py: Python<'_>, check: &str, b: f64, n: Option<usize>, max_degree: usize) -> PyResult<(bool, f64, f64, Vec<String>)> {
    let params = FamilyParams::new(b).map_err(err)?;
    let run = || -> sieved_pollaczek::Result<VerifyReport> {
        match check {
            "orthogonality" => harness::verify_orthogonality(&params, max_degree),
            "jumps" => harness::verify_jumps(&params, n.unwrap_or(100)),
            "phase" => harness::verify_phase(&params, n.unwrap_or(100)),
            "airy" => harness::verify_airy(),
            "overlaps" => harness::verify_overlaps(&params, n.unwrap_or(400), &AsymptoticOptions::default()),
            other => Err(Error::Parse(format!("unknown check {other:?}"))),
        }
    };
    let r = py.detach(run).map_err(err)?;
    Ok((r.passed, r.worst, r.tolerance, r.details))
}

#[pymodule]
#[pyo3(name = "sieved_pollaczek")]
fn sieved_pollaczek_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyValue>()?;
    m.add_class::<PyFamily>()?;
    m.add_class::<PyEquilibrium>()?;
    m.add_function(wrap_pyfunction!(mrs, m)?)?;
    m.add_function(wrap_pyfunction!(airy_ai, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("MAX_SWEEP_DEGREE", harness::MAX_SWEEP_DEGREE)?;
    Ok(())
}
