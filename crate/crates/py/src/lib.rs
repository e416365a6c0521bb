use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use conetorsion::basemanifold::BaseManifold;
use conetorsion::besselzero::{self, ZeroKind, ZeroRequest};
use conetorsion::exactpoly;
use conetorsion::modelops::{self, ModelOperator};
use conetorsion::torsion::{self, ConeOverS1Config, TorsionOptions};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "BaseManifold", frozen)]
struct PyBase {
    inner: BaseManifold,
}

#[pymethods]
impl PyBase {
    /// Circle of length 2 pi / c.
    #[staticmethod]
    fn circle(c: f64) -> PyResult<Self> {
        Ok(Self { inner: BaseManifold::circle(c).map_err(value_err)? })
    }

    /// Flat 2-torus; `lattice` is [[a1x, a1y], [a2x, a2y]], square of side 2 pi by default.
    #[staticmethod]
    #[pyo3(signature = (c, lattice=None))]
    fn torus2(c: f64, lattice: Option<[[f64; 2]; 2]>) -> PyResult<Self> {
        let b = match lattice {
            Some(l) => BaseManifold::torus2(c, l),
            None => BaseManifold::square_torus2(c),
        };
        Ok(Self { inner: b.map_err(value_err)? })
    }

    /// Base described by a spectrum JSON file.
    #[staticmethod]
    fn custom(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: BaseManifold::custom(&path).map_err(value_err)? })
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn betti(&self) -> Vec<u64> {
        self.inner.betti.clone()
    }

    #[getter]
    fn scale(&self) -> f64 {
        self.inner.scale
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    fn __repr__(&self) -> String {
        format!("BaseManifold(id={:?}, dim={}, scale={})", self.inner.id, self.inner.n, self.inner.scale)
    }
}

#[pyclass(name = "TorsionResult", frozen, get_all)]
struct PyTorsion {
    log_torsion: f64,
    harmonic_term: f64,
    /// degree -> (zeta_k'(0), weight)
    per_degree: BTreeMap<usize, (f64, f64)>,
    parity: String,
    error_estimate: f64,
}

#[pymethods]
impl PyTorsion {
    fn __repr__(&self) -> String {
        format!("TorsionResult(log_torsion={}, error_estimate={:e})", self.log_torsion, self.error_estimate)
    }
}

/// log T of the cone over `base`.
#[pyfunction]
#[pyo3(signature = (base, tol=1e-8))]
fn log_torsion(base: &PyBase, tol: f64) -> PyResult<PyTorsion> {
    let t = torsion::log_torsion_with(&base.inner, TorsionOptions { tol, ..Default::default() })
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(PyTorsion {
        log_torsion: t.log_torsion,
        harmonic_term: t.harmonic_term,
        per_degree: t.per_degree.iter().map(|(k, d)| (*k, (d.zeta_k_prime0, d.weight))).collect(),
        parity: format!("{:?}", t.parity).to_lowercase(),
        error_estimate: t.error_estimate,
    })
}

/// Closed-form log T of the three-dimensional cone over a 2-dimensional base.
#[pyfunction]
#[pyo3(signature = (base, tol=1e-8))]
fn corollary_3d(base: &PyBase, tol: f64) -> PyResult<f64> {
    torsion::corollary_3d(&base.inner, tol).map_err(value_err)
}

/// log T of the cone over a circle of length 2 pi R / nu.
#[pyfunction]
fn theorem_main(radius: f64, nu: f64) -> PyResult<f64> {
    Ok(torsion::theorem_main(ConeOverS1Config::new(radius, nu).map_err(value_err)?))
}

#[pyfunction]
fn harmonic_contribution(base: &PyBase) -> f64 {
    modelops::harmonic_contribution(&base.inner)
}

#[pyclass(name = "ModelOperator", frozen)]
struct PyModel {
    inner: ModelOperator,
}

#[pymethods]
impl PyModel {
    /// L_nu(alpha); alpha = inf gives the Dirichlet condition.
    #[new]
    #[pyo3(signature = (nu, alpha=f64::INFINITY))]
    fn new(nu: f64, alpha: f64) -> PyResult<Self> {
        Ok(Self { inner: ModelOperator::new(nu, alpha).map_err(value_err)? })
    }

    fn spectrum(&self, count: usize) -> PyResult<Vec<f64>> {
        self.inner.spectrum(count).map_err(value_err)
    }

    fn det_closed(&self) -> PyResult<f64> {
        Ok(self.inner.det_closed().map_err(value_err)?.log_det)
    }

    /// (log det, error estimate) from the zeros.
    #[pyo3(signature = (tol=1e-8))]
    fn det_numeric(&self, tol: f64) -> PyResult<(f64, f64)> {
        let d = self.inner.det_numeric(tol).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        Ok((d.log_det, d.error_estimate.unwrap_or(0.0)))
    }
}

/// First `count` positive zeros; kind is "j", "jprime" or "mixed" (needs alpha).
#[pyfunction]
#[pyo3(signature = (nu, kind, count, alpha=None))]
fn bessel_zeros(nu: f64, kind: &str, count: usize, alpha: Option<f64>) -> PyResult<Vec<f64>> {
    let k = match (kind, alpha) {
        ("j", None) => ZeroKind::Dirichlet,
        ("jprime", None) => ZeroKind::Neumann,
        ("mixed", Some(a)) => ZeroKind::Mixed(a),
        _ => return Err(PyValueError::new_err("kind must be j, jprime, or mixed with alpha")),
    };
    Ok(besselzero::zeros(ZeroRequest::new(nu, k, count)).map_err(value_err)?.zeros)
}

/// Coefficients z_{r,b} of M_r as lists of fractions in alpha (ascending powers).
#[pyfunction]
fn olver_z(order: usize) -> PyResult<Vec<Vec<String>>> {
    let z = exactpoly::olver_table().coeffs_z(order).map_err(value_err)?;
    Ok(z.iter().map(|p| p.coeffs().iter().map(|c| c.to_string()).collect()).collect())
}

#[pymodule]
#[pyo3(name = "conetorsion")]
fn conetorsion_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBase>()?;
    m.add_class::<PyTorsion>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(log_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(corollary_3d, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_main, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_contribution, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(olver_z, m)?)?;
    Ok(())
}
