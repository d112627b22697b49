//! Python bindings for the specdecay core: damping parameters, spectra,
//! mode propagators, linear and semilinear evolution, decay-rate fits, and
//! the theoretical rate tables.
//!
//! Build with `cargo build -p specdecay-py --release`; the resulting
//! `libspecdecay_py.so` imports as the module `specdecay_py` once renamed
//! (see python/smoke_test.py for a loader that does this).

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use specdecay::analysis::{
    fit_exponential_rate as fit_exp_impl, fit_polynomial_rate as fit_poly_impl,
    spectral_abscissa as abscissa_impl, theoretical_rates_multi,
};
use specdecay::evolution::{
    solve_linear, solve_semilinear_picard, CoefficientVector, InitialData, NonlinearitySpec,
    SolutionTrace, TimeGrid,
};
use specdecay::propagator::{
    char_roots as char_roots_impl, eval_dtk_e0 as dtk_e0_impl, eval_dtk_e1 as dtk_e1_impl,
    eval_e0 as e0_impl, eval_e1 as e1_impl, mode_decay_rate as mode_rate_impl,
    smoothing_envelope_constant as envelope_impl, DEFAULT_DEGENERACY_TOL,
};
use specdecay::realization::{torus_realization, GridRealization};
use specdecay::spectrum::{
    classify_regime, partition_modes, spectral_gap, DampingParams, SharedSpectrum, Spectrum,
    DEFAULT_PARTITION_TOL,
};
use std::sync::Arc;

fn to_py_err(e: specdecay::Error) -> PyErr {
    use specdecay::Error as E;
    match &e {
        E::Io { .. } => PyIOError::new_err(e.to_string()),
        E::NonContraction { .. } | E::IterationLimit { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Damping exponent pair (theta, sigma) with 0 <= theta, 0 < sigma,
/// theta <= sigma.
#[pyclass(name = "DampingParams", frozen)]
struct PyParams {
    inner: DampingParams,
}

#[pymethods]
impl PyParams {
    #[new]
    fn new(theta: f64, sigma: f64) -> PyResult<Self> {
        let inner = DampingParams::new(theta, sigma).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }

    /// Damping regime name: "Undamped", "Effective", "Critical", or
    /// "NonEffective".
    fn regime(&self) -> String {
        classify_regime(&self.inner).to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "DampingParams(theta={}, sigma={})",
            self.inner.theta(),
            self.inner.sigma()
        )
    }
}

/// Nonnegative discrete spectrum: sorted distinct eigenvalues with
/// multiplicities. Coefficient data lives on slots (eigenvalues counted
/// with multiplicity); len() is the slot count.
#[pyclass(name = "Spectrum", frozen)]
struct PySpectrum {
    inner: SharedSpectrum,
}

#[pymethods]
impl PySpectrum {
    /// Spectrum from an explicit eigenvalue list (repeats become
    /// multiplicities).
    #[staticmethod]
    fn from_list(values: Vec<f64>) -> PyResult<Self> {
        let s = Spectrum::from_list(&values).map_err(to_py_err)?;
        Ok(Self { inner: Arc::new(s) })
    }

    /// Laplacian eigenvalues k^2 on the circle, frequencies up to n.
    #[staticmethod]
    fn torus_1d(n: u32) -> Self {
        Self {
            inner: Arc::new(Spectrum::torus_1d(n)),
        }
    }

    /// Harmonic-oscillator ladder 2k + 1 for k < n.
    #[staticmethod]
    fn harmonic(n: u32) -> Self {
        Self {
            inner: Arc::new(Spectrum::harmonic(n)),
        }
    }

    /// Landau levels (2k + 1) * field with constant multiplicity.
    #[staticmethod]
    fn landau(field: f64, n: u32, multiplicity: u32) -> PyResult<Self> {
        let s = Spectrum::landau(field, n, multiplicity).map_err(to_py_err)?;
        Ok(Self { inner: Arc::new(s) })
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    #[getter]
    fn multiplicities(&self) -> Vec<u32> {
        self.inner.multiplicities().to_vec()
    }

    /// Smallest positive eigenvalue, or None for the zero spectrum.
    fn min_positive(&self) -> Option<f64> {
        self.inner.min_positive()
    }

    /// (smallest positive eigenvalue, minimum gap between distinct
    /// eigenvalues; inf when fewer than two).
    fn gap(&self) -> (Option<f64>, f64) {
        spectral_gap(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.total_multiplicity()
    }

    fn __repr__(&self) -> String {
        format!(
            "Spectrum({} distinct eigenvalues, {} slots)",
            self.inner.eigenvalues().len(),
            self.inner.total_multiplicity()
        )
    }
}

/// Fourier realization of the circle spectrum on m uniform grid points:
/// transforms between grid values and spectral coefficients.
#[pyclass(name = "TorusRealization", frozen)]
struct PyTorusRealization {
    inner: GridRealization,
}

#[pymethods]
impl PyTorusRealization {
    #[new]
    fn new(n: u32, m: usize) -> PyResult<Self> {
        let inner = torus_realization(n, m).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    fn spectrum(&self) -> PySpectrum {
        PySpectrum {
            inner: self.inner.spectrum().clone(),
        }
    }

    #[getter]
    fn points(&self) -> Vec<f64> {
        self.inner.points().to_vec()
    }

    /// Spectral coefficients of grid values (length m).
    fn forward(&self, values: Vec<f64>) -> PyResult<Vec<f64>> {
        let c = self.inner.forward_transform(&values).map_err(to_py_err)?;
        Ok(c.values().to_vec())
    }

    /// Grid values of spectral coefficients (length = slot count).
    fn inverse(&self, coeffs: Vec<f64>) -> PyResult<Vec<f64>> {
        let c = CoefficientVector::new(self.inner.spectrum().clone(), coeffs).map_err(to_py_err)?;
        self.inner.inverse_transform(&c).map_err(to_py_err)
    }

    /// Quadrature L2 norm of grid values; equals the coefficient norm of
    /// forward(values) for resolved data.
    fn quadrature_norm(&self, values: Vec<f64>) -> f64 {
        self.inner.quadrature_norm(&values)
    }

    fn __repr__(&self) -> String {
        format!(
            "TorusRealization(n={}, m={})",
            self.inner.n_max(),
            self.inner.points().len()
        )
    }
}

fn make_data(spectrum: &PySpectrum, u0: Vec<f64>, u1: Vec<f64>) -> PyResult<InitialData> {
    let u0 = CoefficientVector::new(spectrum.inner.clone(), u0).map_err(to_py_err)?;
    let u1 = CoefficientVector::new(spectrum.inner.clone(), u1).map_err(to_py_err)?;
    InitialData::new(u0, u1).map_err(to_py_err)
}

/// Trace as a dict of columns named exactly like the CLI trace CSV:
/// t, norm_h, norm_sobolev_{beta}..., norm_dt_{k}...
fn trace_dict<'py>(py: Python<'py>, trace: &SolutionTrace) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", trace.grid.points().to_vec())?;
    d.set_item("norm_h", trace.norm_h.clone())?;
    for (b, col) in &trace.sobolev {
        d.set_item(format!("norm_sobolev_{b}"), col.clone())?;
    }
    for (k, col) in &trace.dt_norms {
        d.set_item(format!("norm_dt_{k}"), col.clone())?;
    }
    Ok(d)
}

/// Characteristic roots of one mode: branch label, real parts, imaginary
/// part, and the raw discriminant.
#[pyfunction]
fn char_roots<'py>(py: Python<'py>, lam: f64, params: &PyParams) -> PyResult<Bound<'py, PyDict>> {
    let r = char_roots_impl(lam, &params.inner, DEFAULT_DEGENERACY_TOL);
    let d = PyDict::new(py);
    d.set_item("branch", r.branch.to_string())?;
    d.set_item("re_plus", r.re_plus)?;
    d.set_item("re_minus", r.re_minus)?;
    d.set_item("im", r.im)?;
    d.set_item("discriminant", r.discriminant)?;
    Ok(d)
}

/// Asymptotic exponential decay rate of one mode.
#[pyfunction]
fn mode_decay_rate(lam: f64, params: &PyParams) -> f64 {
    mode_rate_impl(lam, &params.inner)
}

/// Displacement propagator E0 (E0(0) = 1, E0'(0) = 0).
#[pyfunction]
fn eval_e0(lam: f64, params: &PyParams, t: f64) -> f64 {
    e0_impl(lam, &params.inner, t)
}

/// Velocity propagator E1 (E1(0) = 0, E1'(0) = 1).
#[pyfunction]
fn eval_e1(lam: f64, params: &PyParams, t: f64) -> f64 {
    e1_impl(lam, &params.inner, t)
}

/// k-th time derivative of E0, k >= 1.
#[pyfunction]
fn eval_dtk_e0(lam: f64, params: &PyParams, t: f64, k: u32) -> PyResult<f64> {
    dtk_e0_impl(lam, &params.inner, t, k).map_err(to_py_err)
}

/// k-th time derivative of E1, k >= 1.
#[pyfunction]
fn eval_dtk_e1(lam: f64, params: &PyParams, t: f64, k: u32) -> PyResult<f64> {
    dtk_e1_impl(lam, &params.inner, t, k).map_err(to_py_err)
}

/// Sharp constant C = (2 beta / (e theta))^(beta / theta) in the smoothing
/// envelope sup_lambda lambda^beta exp(-lambda^theta t / 2) = C t^(-beta/theta).
#[pyfunction]
fn smoothing_envelope_constant(beta: f64, theta: f64) -> PyResult<f64> {
    envelope_impl(beta, theta).map_err(to_py_err)
}

/// Slowest exponential decay rate over the spectrum.
#[pyfunction]
fn spectral_abscissa(spectrum: &PySpectrum, params: &PyParams) -> f64 {
    abscissa_impl(&spectrum.inner, &params.inner)
}

/// Discriminant-region partition of a spectrum: regime name, one region
/// label per distinct eigenvalue, and counts by region (distinct and
/// multiplicity-weighted).
#[pyfunction]
fn partition<'py>(
    py: Python<'py>,
    spectrum: &PySpectrum,
    params: &PyParams,
) -> PyResult<Bound<'py, PyDict>> {
    let part =
        partition_modes(&spectrum.inner, &params.inner, DEFAULT_PARTITION_TOL).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("regime", part.regime.to_string())?;
    d.set_item(
        "labels",
        part.labels.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    )?;
    d.set_item("eigen_counts", part.eigen_counts().to_vec())?;
    d.set_item("slot_counts", part.slot_counts(&spectrum.inner).to_vec())?;
    Ok(d)
}

/// Solve the linear homogeneous problem from coefficient data (u0, u1) on
/// the given time points. Returns the norm-trace dict; betas adds
/// norm_sobolev columns, ks adds norm_dt columns.
#[pyfunction]
#[pyo3(signature = (params, spectrum, u0, u1, times, betas=vec![], ks=vec![]))]
fn simulate<'py>(
    py: Python<'py>,
    params: &PyParams,
    spectrum: &PySpectrum,
    u0: Vec<f64>,
    u1: Vec<f64>,
    times: Vec<f64>,
    betas: Vec<f64>,
    ks: Vec<u32>,
) -> PyResult<Bound<'py, PyDict>> {
    let data = make_data(spectrum, u0, u1)?;
    let grid = TimeGrid::from_points(times).map_err(to_py_err)?;
    let trace = solve_linear(&params.inner, &data, &grid, &betas, &ks).map_err(to_py_err)?;
    trace_dict(py, &trace)
}

/// Solve the semilinear problem with a power forcing mu |u|^{p-1} u by
/// Picard iteration. With a realization the power acts pointwise on the
/// grid; otherwise it acts on each coefficient (surrogate model). Returns
/// (trace dict, report dict); raises RuntimeError when the iteration is
/// not a contraction for this data.
#[pyfunction]
#[pyo3(signature = (
    params, spectrum, u0, u1, times, p, mu,
    realization=None, tol=1e-10, max_iter=64, betas=vec![], ks=vec![]
))]
#[allow(clippy::too_many_arguments)]
fn solve_semilinear<'py>(
    py: Python<'py>,
    params: &PyParams,
    spectrum: &PySpectrum,
    u0: Vec<f64>,
    u1: Vec<f64>,
    times: Vec<f64>,
    p: f64,
    mu: f64,
    realization: Option<&PyTorusRealization>,
    tol: f64,
    max_iter: usize,
    betas: Vec<f64>,
    ks: Vec<u32>,
) -> PyResult<(Bound<'py, PyDict>, Bound<'py, PyDict>)> {
    let data = make_data(spectrum, u0, u1)?;
    let grid = TimeGrid::from_points(times).map_err(to_py_err)?;
    let nl = match realization {
        Some(_) => NonlinearitySpec::PointwisePower { p, mu },
        None => NonlinearitySpec::ModewisePower { p, mu },
    };
    let (trace, report) = solve_semilinear_picard(
        &params.inner,
        &data,
        &nl,
        &grid,
        realization.map(|r| &r.inner),
        tol,
        max_iter,
        &betas,
        &ks,
    )
    .map_err(to_py_err)?;
    let rep = PyDict::new(py);
    rep.set_item("iterations", report.iterations)?;
    rep.set_item("diffs", report.diffs.clone())?;
    rep.set_item("contraction_factor", report.contraction_factor)?;
    Ok((trace_dict(py, &trace)?, rep))
}

fn fit_dict<'py>(py: Python<'py>, fit: &specdecay::analysis::DecayFit) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("model", fit.model.to_string())?;
    d.set_item("rate", fit.rate)?;
    d.set_item("amplitude", fit.amplitude)?;
    d.set_item("rsquared", fit.rsquared)?;
    d.set_item("window", fit.window)?;
    Ok(d)
}

fn make_series(times: Vec<f64>, values: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    if times.len() != values.len() {
        return Err(PyValueError::new_err(format!(
            "times has {} entries but values has {}",
            times.len(),
            values.len()
        )));
    }
    Ok(times.into_iter().zip(values).collect())
}

/// Fit values ~ A exp(-rate t) on the window (least squares on ln values).
#[pyfunction]
fn fit_exponential_rate<'py>(
    py: Python<'py>,
    times: Vec<f64>,
    values: Vec<f64>,
    window: (f64, f64),
) -> PyResult<Bound<'py, PyDict>> {
    let series = make_series(times, values)?;
    let fit = fit_exp_impl(&series, window).map_err(to_py_err)?;
    fit_dict(py, &fit)
}

/// Fit values ~ A t^{-rate} on a window inside (0, 1] (least squares on
/// ln values vs ln t).
#[pyfunction]
fn fit_polynomial_rate<'py>(
    py: Python<'py>,
    times: Vec<f64>,
    values: Vec<f64>,
    window: (f64, f64),
) -> PyResult<Bound<'py, PyDict>> {
    let series = make_series(times, values)?;
    let fit = fit_poly_impl(&series, window).map_err(to_py_err)?;
    fit_dict(py, &fit)
}

/// Theoretical decay-rate table for the given damping parameters: one row
/// per (quantity, data channel) with the small-time singular exponent and
/// the large-time shape.
#[pyfunction]
#[pyo3(signature = (params, betas=vec![], ks=vec![]))]
fn theoretical_rates<'py>(
    py: Python<'py>,
    params: &PyParams,
    betas: Vec<f64>,
    ks: Vec<u32>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let rows = theoretical_rates_multi(&params.inner, &betas, &ks).map_err(to_py_err)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("regime", r.regime.to_string())?;
            d.set_item("quantity", r.quantity.column_name())?;
            d.set_item("channel", r.channel.to_string())?;
            d.set_item("small_time_exponent", r.small_time_exponent)?;
            d.set_item("large_time", r.large_time.to_string())?;
            d.set_item("data_sobolev_order", r.data_sobolev_order)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn specdecay_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyParams>()?;
    m.add_class::<PySpectrum>()?;
    m.add_class::<PyTorusRealization>()?;
    m.add_function(wrap_pyfunction!(char_roots, m)?)?;
    m.add_function(wrap_pyfunction!(mode_decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(eval_e0, m)?)?;
    m.add_function(wrap_pyfunction!(eval_e1, m)?)?;
    m.add_function(wrap_pyfunction!(eval_dtk_e0, m)?)?;
    m.add_function(wrap_pyfunction!(eval_dtk_e1, m)?)?;
    m.add_function(wrap_pyfunction!(smoothing_envelope_constant, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_abscissa, m)?)?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_semilinear, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponential_rate, m)?)?;
    m.add_function(wrap_pyfunction!(fit_polynomial_rate, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_rates, m)?)?;
    Ok(())
}
