//! Named verification scenarios with pass/fail reports.
//!
//! Every scenario is deterministic given its parameters and seed. Residuals
//! are worst cases over all probes and indices. Numerical failures inside a
//! check (a probe leaving a domain, a degenerate metric) turn that check red
//! instead of aborting the scenario; only invalid parameters are errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::connections::{ChristoffelField, Curve};
use crate::error::{GeometryError, Result};
use crate::fields::{sample_box, sample_cube, DifferentiationConfig, Point, ScalarField};
use crate::frames::{pfaffian, skewness_defect, FormMatrix, OneFormMatrix, TwoFormMatrix};
use crate::metrics::{DiagonalMetric, MetricField};
use crate::quadrature::{euler_integral, gauss_bonnet_torus, PeriodicGrid};
use crate::residual::Residual;

/// Per-check thresholds. Checks whose name starts with `min_` are lower
/// bounds (pass when the residual exceeds the tolerance); all others pass
/// when the residual is at most the tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub pullback: f64,
    pub structural: f64,
    pub compatibility: f64,
    pub christoffel_identity: f64,
    pub endpoint: f64,
    pub flat_curvature: f64,
    pub holonomy: f64,
    pub spectral_gap: f64,
    pub local_frame: f64,
    pub bracket: f64,
    pub torsion: f64,
    pub curvature_form: f64,
    pub euler_relative: f64,
    pub obstruction: f64,
    pub conjugation: f64,
    pub gauss_bonnet: f64,
    pub gauss_bonnet_conformal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pullback: 1e-12,
            structural: 0.0,
            compatibility: 1e-6,
            christoffel_identity: 1e-7,
            endpoint: 1e-9,
            flat_curvature: 1e-8,
            holonomy: 1e-6,
            spectral_gap: 1e-6,
            local_frame: 1e-10,
            bracket: 1e-6,
            torsion: 1e-12,
            curvature_form: 1e-12,
            euler_relative: 1e-9,
            obstruction: 0.0,
            conjugation: 1e-10,
            gauss_bonnet: 1e-5,
            gauss_bonnet_conformal: 1e-6,
        }
    }
}

impl Tolerances {
    /// Every tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |v: f64| v * factor;
        Self {
            pullback: s(self.pullback),
            structural: s(self.structural),
            compatibility: s(self.compatibility),
            christoffel_identity: s(self.christoffel_identity),
            endpoint: s(self.endpoint),
            flat_curvature: s(self.flat_curvature),
            holonomy: s(self.holonomy),
            spectral_gap: s(self.spectral_gap),
            local_frame: s(self.local_frame),
            bracket: s(self.bracket),
            torsion: s(self.torsion),
            curvature_form: s(self.curvature_form),
            euler_relative: s(self.euler_relative),
            obstruction: s(self.obstruction),
            conjugation: s(self.conjugation),
            gauss_bonnet: s(self.gauss_bonnet),
            gauss_bonnet_conformal: s(self.gauss_bonnet_conformal),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub overall: bool,
    pub runtime_ms: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<BTreeMap<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Failure>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn finite_or_max(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

struct ReportBuilder {
    scenario: String,
    parameters: BTreeMap<String, Value>,
    seed: Option<u64>,
    checks: Vec<Check>,
    observables: Vec<BTreeMap<String, Value>>,
    first_failure: Option<Failure>,
    started: Instant,
}

impl ReportBuilder {
    fn new(scenario: &str, seed: Option<u64>) -> Self {
        Self {
            scenario: scenario.to_string(),
            parameters: BTreeMap::new(),
            seed,
            checks: Vec::new(),
            observables: Vec::new(),
            first_failure: None,
            started: Instant::now(),
        }
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters are plain data"),
        );
    }

    fn record(&mut self, name: String, residual: f64, tolerance: f64, passed: bool, failure: Failure) {
        if !passed && self.first_failure.is_none() {
            self.first_failure = Some(failure);
        }
        self.checks.push(Check {
            name,
            residual: finite_or_max(residual),
            tolerance,
            passed,
        });
    }

    /// Upper-bound check: passes when the worst residual is `<= tolerance`.
    fn at_most(&mut self, name: impl Into<String>, outcome: Result<Residual>, tolerance: f64) {
        let name = name.into();
        match outcome {
            Ok(r) => {
                let passed = r.value <= tolerance;
                let failure = Failure {
                    check: name.clone(),
                    point: r.worst.as_ref().map(|p| p.coords().to_vec()),
                    error: None,
                };
                self.record(name, r.value, tolerance, passed, failure);
            }
            Err(e) => self.errored(name, tolerance, e),
        }
    }

    /// Lower-bound check: passes when the value is `> threshold`.
    fn at_least(&mut self, name: impl Into<String>, outcome: Result<Residual>, threshold: f64) {
        let name = name.into();
        match outcome {
            Ok(r) => {
                let passed = r.value > threshold;
                let failure = Failure {
                    check: name.clone(),
                    point: r.worst.as_ref().map(|p| p.coords().to_vec()),
                    error: None,
                };
                self.record(name, r.value, threshold, passed, failure);
            }
            Err(e) => self.errored(name, threshold, e),
        }
    }

    fn errored(&mut self, name: String, tolerance: f64, e: GeometryError) {
        let point = match &e {
            GeometryError::OutOfDomain { point, .. }
            | GeometryError::NonFinite { point, .. }
            | GeometryError::Degenerate { point, .. } => Some(point.clone()),
            _ => None,
        };
        let failure = Failure {
            check: name.clone(),
            point,
            error: Some(e.to_string()),
        };
        self.record(name, f64::INFINITY, tolerance, false, failure);
    }

    fn observe(&mut self, entry: BTreeMap<String, Value>) {
        self.observables.push(entry);
    }

    fn finish(self) -> VerificationReport {
        let overall = self.checks.iter().all(|c| c.passed);
        VerificationReport {
            scenario: self.scenario,
            parameters: self.parameters,
            seed: self.seed,
            checks: self.checks,
            overall,
            runtime_ms: self.started.elapsed().as_secs_f64() * 1e3,
            observables: self.observables,
            first_failure: self.first_failure,
        }
    }
}

macro_rules! observable {
    ($($key:expr => $val:expr),* $(,)?) => {{
        let mut m = BTreeMap::new();
        $( m.insert($key.to_string(), serde_json::json!($val)); )*
        m
    }};
}

fn tag(key: &str, v: f64) -> String {
    format!("[{key}={v}]")
}

/// Max over a set of fallible residuals.
fn worst_of(parts: impl IntoIterator<Item = Result<Residual>>) -> Result<Residual> {
    let mut acc = Residual::zero();
    for r in parts {
        acc.merge(r?);
    }
    Ok(acc)
}

pub const DEFAULT_T_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn validate_t_grid(ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(GeometryError::InvalidArgument("t grid is empty".into()));
    }
    if let Some(t) = ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(GeometryError::InvalidArgument(format!(
            "deformation parameter t = {t} lies outside [0, 1]"
        )));
    }
    Ok(())
}

fn validate_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(GeometryError::InvalidArgument("dimension must be at least 1".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Hopf

#[derive(Clone, Debug, PartialEq)]
pub struct HopfParams {
    pub dim: usize,
    pub probes: usize,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    /// Uniform dilation factor of the deck transformation.
    pub dilation: f64,
    /// Extra stretch applied to the first axis only; nonzero values break
    /// invariance and serve as a negative control.
    pub first_axis_perturbation: f64,
}

impl Default for HopfParams {
    fn default() -> Self {
        Self {
            dim: 2,
            probes: 100,
            seed: 0,
            t_grid: DEFAULT_T_GRID.to_vec(),
            dilation: 2.0,
            first_axis_perturbation: 0.0,
        }
    }
}

pub fn verify_hopf(params: &HopfParams, tol: &Tolerances) -> Result<VerificationReport> {
    validate_dim(params.dim)?;
    validate_t_grid(&params.t_grid)?;
    let mut report = ReportBuilder::new("hopf", Some(params.seed));
    report.param("dim", params.dim);
    report.param("probes", params.probes);
    report.param("t", &params.t_grid);
    report.param("dilation", params.dilation);
    report.param("first_axis_perturbation", params.first_axis_perturbation);

    let n = params.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let probes = sample_box(&mut rng, n, params.probes, 2.0, 0.1);
    let g = DiagonalMetric::hopf(n);

    let mut scale = vec![params.dilation; n];
    scale[0] += params.first_axis_perturbation;
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(scale));
    report.at_most("pullback_invariance", g.pullback_residual(&a, &probes), tol.pullback);

    let off_diagonal = probes.iter().try_fold(Residual::zero(), |mut acc, p| {
        let m = g.matrix(p)?;
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |j| *j != i).map(move |j| (i, j)))
            .fold(0.0_f64, |w, (i, j)| w.max(m[(i, j)].abs()));
        acc.observe(off, p);
        Ok(acc)
    });
    report.at_most("diagonal_structure", off_diagonal, tol.structural);

    let levi_civita = ChristoffelField::levi_civita_diagonal(&g, 1.0)?;
    for &t in &params.t_grid {
        let outcome = (|| {
            let nabla_t = ChristoffelField::deform_from_flat(&levi_civita, t)?;
            nabla_t.metric_compatibility_residual(&g.power_family(t)?, &probes)
        })();
        report.at_most(format!("compatibility{}", tag("t", t)), outcome, tol.compatibility);
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Torus family ∇^k

#[derive(Clone, Debug, PartialEq)]
pub struct TorusFlatParams {
    pub k_values: Vec<f64>,
    pub dim: usize,
    pub probes: usize,
    pub seed: u64,
    pub steps: usize,
}

impl Default for TorusFlatParams {
    fn default() -> Self {
        Self {
            k_values: vec![-1.0, 0.0, 0.5, 3.0],
            dim: 2,
            probes: 50,
            seed: 0,
            steps: 1000,
        }
    }
}

/// Holonomy spectrum of `∇^k` around the first circle, computed in closed form.
pub fn expected_torus_spectrum(k: f64, dim: usize) -> Vec<f64> {
    let mut s = vec![1.0; dim];
    s[0] = (-2.0 * PI * k).exp();
    s.sort_by(f64::total_cmp);
    s
}

pub fn verify_torus_flat(params: &TorusFlatParams, tol: &Tolerances) -> Result<VerificationReport> {
    validate_dim(params.dim)?;
    if params.k_values.is_empty() {
        return Err(GeometryError::InvalidArgument("no k values given".into()));
    }
    if params.steps == 0 {
        return Err(GeometryError::InvalidArgument("steps must be at least 1".into()));
    }
    let mut report = ReportBuilder::new("torus-flat", Some(params.seed));
    report.param("k", &params.k_values);
    report.param("dim", params.dim);
    report.param("probes", params.probes);
    report.param("steps", params.steps);

    let n = params.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let probes = sample_cube(&mut rng, n, params.probes, 0.0, 2.0 * PI);
    let lp = Curve::coordinate_loop(&Point::origin(n), 0);

    let mut spectra = Vec::new();
    for &k in &params.k_values {
        let gamma = ChristoffelField::torus_affine(k, n);
        let curvature = probes.iter().try_fold(Residual::zero(), |mut acc, p| {
            acc.observe(gamma.curvature_tensor(p)?.norm(), p);
            Ok(acc)
        });
        report.at_most(format!("curvature_norm{}", tag("k", k)), curvature, tol.flat_curvature);

        let expected = expected_torus_spectrum(k, n);
        let spectrum = gamma.holonomy_eigenvalues(&lp, params.steps);
        let deviation = spectrum.as_ref().map_err(Clone::clone).map(|s| {
            let mut r = Residual::zero();
            let worst = s
                .iter()
                .zip(&expected)
                .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
                .fold(0.0, f64::max);
            r.observe(worst, &Point::origin(n));
            r
        });
        report.at_most(format!("holonomy_spectrum{}", tag("k", k)), deviation, tol.holonomy);
        if let Ok(s) = spectrum {
            report.observe(observable! {
                "k" => k,
                "holonomy_moduli" => s.clone(),
                "expected_moduli" => expected,
            });
            spectra.push(s);
        }
    }

    if params.k_values.len() > 1 && spectra.len() == params.k_values.len() {
        let mut gap = f64::INFINITY;
        for a in 0..spectra.len() {
            for b in a + 1..spectra.len() {
                let d = spectra[a]
                    .iter()
                    .zip(&spectra[b])
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                gap = gap.min(d);
            }
        }
        let mut r = Residual::zero();
        r.observe(gap, &Point::origin(n));
        report.at_least("min_spectral_gap", Ok(r), tol.spectral_gap);
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Local frame on the torus

#[derive(Clone, Debug, PartialEq)]
pub struct LocalFrameParams {
    pub epsilon: f64,
    pub dim: usize,
    pub probes: usize,
    pub seed: u64,
}

impl Default for LocalFrameParams {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            dim: 2,
            probes: 100,
            seed: 0,
        }
    }
}

/// The standard torus metric in log coordinates `x̃_i = log θ_i`, as
/// `Jᵀ J` with `J = ∂θ/∂x̃`; evaluated at the chart point with angles `theta`.
pub fn log_chart_metric(theta: &[f64]) -> Result<DMatrix<f64>> {
    let n = theta.len();
    let chart: Vec<ScalarField> = (0..n)
        .map(|i| {
            ScalarField::with_partials(
                n,
                "exp",
                move |x| x[i].exp(),
                move |j, x| if j == i { x[i].exp() } else { 0.0 },
            )
        })
        .collect();
    if let Some(t) = theta.iter().find(|t| **t <= 0.0) {
        return Err(GeometryError::OutOfDomain {
            what: format!("log chart (θ = {t})"),
            point: theta.to_vec(),
        });
    }
    let p = Point::new(theta.iter().map(|t| t.ln()).collect())?;
    let mut jac = DMatrix::zeros(n, n);
    for a in 0..n {
        for i in 0..n {
            jac[(a, i)] = chart[a].partial(i, &p)?;
        }
    }
    Ok(jac.transpose() * jac)
}

/// `[F_i, F_j]` for the frame `F_i = θ_i^{-1} ∂_{θ_i}`, by central differences.
fn frame_bracket_residual(n: usize, probes: &[Point]) -> Result<Residual> {
    // component m of F_i, i.e. δ_im / θ_i
    let component = |i: usize, m: usize| {
        ScalarField::from_fn(n, "frame", move |x| if i == m { 1.0 / x[i] } else { 0.0 })
    };
    let mut res = Residual::zero();
    for p in probes {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for m in 0..n {
                    let mut v = 0.0;
                    for a in 0..n {
                        v += component(i, a).eval(p)? * component(j, m).partial(a, p)?
                            - component(j, a).eval(p)? * component(i, m).partial(a, p)?;
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        res.observe(worst, p);
    }
    Ok(res)
}

pub fn verify_local_frame(params: &LocalFrameParams, tol: &Tolerances) -> Result<VerificationReport> {
    validate_dim(params.dim)?;
    if !(params.epsilon > 0.0 && params.epsilon < PI) {
        return Err(GeometryError::InvalidArgument(format!(
            "epsilon must lie in (0, π), got {}",
            params.epsilon
        )));
    }
    let mut report = ReportBuilder::new("local-frame", Some(params.seed));
    report.param("epsilon", params.epsilon);
    report.param("dim", params.dim);
    report.param("probes", params.probes);

    let n = params.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let lo = params.epsilon;
    let hi = 2.0 * PI - params.epsilon;
    let probes = sample_cube(&mut rng, n, params.probes, lo, hi);

    let mut off = Residual::zero();
    let mut diag = Residual::zero();
    let outcome: Result<()> = probes.iter().try_for_each(|p| {
        let m = log_chart_metric(p.coords())?;
        let mut worst_off: f64 = 0.0;
        let mut worst_diag: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    let expect = p.coords()[i].powi(2);
                    worst_diag = worst_diag.max((m[(i, i)] - expect).abs() / expect);
                } else {
                    worst_off = worst_off.max(m[(i, j)].abs());
                }
            }
        }
        off.observe(worst_off, p);
        diag.observe(worst_diag, p);
        Ok(())
    });
    match outcome {
        Ok(()) => {
            report.at_most("offdiagonal", Ok(off), tol.local_frame);
            report.at_most("diagonal_entries", Ok(diag), tol.local_frame);
        }
        Err(e) => {
            report.at_most("offdiagonal", Err(e.clone()), tol.local_frame);
            report.at_most("diagonal_entries", Err(e), tol.local_frame);
        }
    }
    report.at_most("frame_bracket", frame_bracket_residual(n, &probes), tol.bracket);

    let reference: Vec<f64> = (0..n).map(|i| 2.0 + i as f64).collect();
    if let Ok(m) = log_chart_metric(&reference) {
        report.observe(observable! {
            "theta" => reference,
            "metric_diagonal" => (0..n).map(|i| m[(i, i)]).collect::<Vec<_>>(),
        });
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Deformation of the flat connection

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Params {
    pub seed: u64,
    pub metrics: usize,
    pub t_grid: Vec<f64>,
    pub probes: usize,
    pub dim: usize,
    /// Replace `g_i^t` by `t·g_i` (negative control).
    pub wrong_family: bool,
}

impl Default for Theorem1Params {
    fn default() -> Self {
        Self {
            seed: 0,
            metrics: 5,
            t_grid: DEFAULT_T_GRID.to_vec(),
            probes: 100,
            dim: 2,
            wrong_family: false,
        }
    }
}

pub fn verify_theorem1(params: &Theorem1Params, tol: &Tolerances) -> Result<VerificationReport> {
    validate_dim(params.dim)?;
    validate_t_grid(&params.t_grid)?;
    if params.metrics == 0 {
        return Err(GeometryError::InvalidArgument("need at least one metric".into()));
    }
    let mut report = ReportBuilder::new("theorem1", Some(params.seed));
    report.param("metrics", params.metrics);
    report.param("t", &params.t_grid);
    report.param("probes", params.probes);
    report.param("dim", params.dim);
    report.param("wrong_family", params.wrong_family);

    let n = params.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let metrics: Vec<DiagonalMetric> = (0..params.metrics)
        .map(|_| DiagonalMetric::random_periodic(&mut rng, n))
        .collect();
    let probes = sample_cube(&mut rng, n, params.probes, 0.0, 2.0 * PI);
    let config = DifferentiationConfig::default();
    let levi_civita: Vec<ChristoffelField> = metrics
        .iter()
        .map(|g| ChristoffelField::levi_civita_general(Arc::new(g.clone()), config))
        .collect();

    let family = |g: &DiagonalMetric, t: f64| -> Result<DiagonalMetric> {
        if params.wrong_family {
            Ok(g.scaled(t))
        } else {
            g.power_family(t)
        }
    };

    for &t in &params.t_grid {
        let identity = worst_of(metrics.iter().zip(&levi_civita).map(|(g, d)| {
            let nabla_t = ChristoffelField::deform_from_flat(d, t)?;
            let gt = ChristoffelField::levi_civita_general(Arc::new(family(g, t)?), config);
            nabla_t.difference(&gt, &probes)
        }));
        report.at_most(format!("christoffel_identity{}", tag("t", t)), identity, tol.christoffel_identity);

        let compat = worst_of(metrics.iter().zip(&levi_civita).map(|(g, d)| {
            let nabla_t = ChristoffelField::deform_from_flat(d, t)?;
            nabla_t.metric_compatibility_residual(&family(g, t)?, &probes)
        }));
        report.at_most(format!("compatibility{}", tag("t", t)), compat, tol.compatibility);
    }

    let t0 = worst_of(levi_civita.iter().map(|d| {
        ChristoffelField::deform_from_flat(d, 0.0)?.max_abs(&probes)
    }));
    report.at_most("endpoint_t0", t0, tol.endpoint);
    let t1 = worst_of(metrics.iter().zip(&levi_civita).map(|(g, d)| {
        let closed_form = ChristoffelField::levi_civita_diagonal(g, 1.0)?;
        ChristoffelField::deform_from_flat(d, 1.0)?.difference(&closed_form, &probes)
    }));
    report.at_most("endpoint_t1", t1, tol.endpoint);
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Quasi-metric torus family

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiMetricParams {
    pub k_values: Vec<f64>,
    pub grid: usize,
    pub probes: usize,
    pub frames: usize,
    pub seed: u64,
}

impl Default for QuasiMetricParams {
    fn default() -> Self {
        Self {
            k_values: vec![0.5, 1.0, 2.0, 3.0],
            grid: 64,
            probes: 100,
            frames: 20,
            seed: 0,
        }
    }
}

/// A random special-orthogonal matrix: QR of a uniform matrix, with column
/// signs fixed so the result has determinant +1.
pub fn random_special_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let mut q = m.qr().q();
    if q.determinant() < 0.0 {
        let flipped = -q.column(0);
        q.set_column(0, &flipped);
    }
    q
}

/// `k² θ¹∧θ² · [[0, −1], [1, 0]]`.
pub fn expected_torus_curvature(k: f64) -> TwoFormMatrix {
    let k2 = k * k;
    TwoFormMatrix::from_fn(2, 2, |i, j, _| {
        ScalarField::constant(match (i, j) {
            (0, 1) => -k2,
            (1, 0) => k2,
            _ => 0.0,
        })
    })
    .expect("fixed shape")
}

pub fn verify_quasi_metric(params: &QuasiMetricParams, tol: &Tolerances) -> Result<VerificationReport> {
    if params.k_values.is_empty() {
        return Err(GeometryError::InvalidArgument("no k values given".into()));
    }
    let grid = PeriodicGrid::new(params.grid)?;
    let mut report = ReportBuilder::new("quasi-metric", Some(params.seed));
    report.param("k", &params.k_values);
    report.param("grid", params.grid);
    report.param("probes", params.probes);
    report.param("frames", params.frames);

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let probes = sample_cube(&mut rng, 2, params.probes, 0.0, 2.0 * PI);
    let rotations: Vec<DMatrix<f64>> = (0..params.frames)
        .map(|_| random_special_orthogonal(&mut rng, 2))
        .collect();

    for &k in &params.k_values {
        let kt = |name: &str| format!("{name}{}", tag("k", k));
        let omega = OneFormMatrix::torus_connection_form(k);

        let torsion = omega
            .torsion_forms()
            .and_then(|ts| worst_of(ts.iter().map(|t| t.max_abs(&probes))));
        report.at_most(kt("torsion"), torsion, tol.torsion);

        let curvature = omega.curvature_form();
        let matches = curvature
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|c| c.max_difference(&expected_torus_curvature(k), &probes));
        report.at_most(kt("curvature_form"), matches, tol.curvature_form);

        let skew = curvature
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|c| skewness_defect(c, &probes));
        report.at_most(kt("curvature_skew_defect"), skew, tol.structural);

        let expected = -k * k * 4.0 * PI * PI;
        match euler_integral(&omega, &grid) {
            Ok(integral) => {
                let mut r = Residual::zero();
                r.observe(
                    (integral.value - expected).abs() / expected.abs().max(1.0),
                    &Point::origin(2),
                );
                report.at_most(kt("euler_integral"), Ok(r), tol.euler_relative);
                report.observe(observable! {
                    "k" => k,
                    "euler_integral" => integral.value,
                    "expected" => expected,
                    "estimated_error" => integral.estimated_error,
                });
            }
            Err(e) => report.at_most(kt("euler_integral"), Err(e), tol.euler_relative),
        }

        if k != 0.0 {
            report.at_least(
                kt("min_connection_skew_defect"),
                skewness_defect(&omega, &probes),
                tol.obstruction,
            );
        }

        let conjugation = curvature.and_then(|c| {
            let mut res = Residual::zero();
            for a in &rotations {
                let rotated = c.conjugate(a)?;
                for p in &probes {
                    let before = pfaffian(&c.components_at(p)?[0])?;
                    let after = pfaffian(&rotated.components_at(p)?[0])?;
                    res.observe(after - before, p);
                }
            }
            Ok(res)
        });
        report.at_most(kt("pfaffian_conjugation"), conjugation, tol.conjugation);
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Gauss–Bonnet on the torus

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorusMetricFamily {
    Flat,
    ConformalBump,
    /// Curves only the parametrization; intrinsically flat.
    Stretched,
    /// `exp(a_i sin θ_1 + b_i cos θ_2)` with fixed coefficients; genuinely curved.
    Anisotropic,
}

impl TorusMetricFamily {
    pub const ALL: [TorusMetricFamily; 4] =
        [Self::Flat, Self::ConformalBump, Self::Stretched, Self::Anisotropic];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Flat => "flat",
            Self::ConformalBump => "conformal-bump",
            Self::Stretched => "stretched",
            Self::Anisotropic => "anisotropic",
        }
    }

    pub fn metric(&self) -> DiagonalMetric {
        match self {
            Self::Flat => DiagonalMetric::euclidean(2),
            Self::ConformalBump => DiagonalMetric::torus_conformal_bump(0.3),
            Self::Stretched => DiagonalMetric::torus_stretched(0.5),
            Self::Anisotropic => DiagonalMetric::periodic_exponential(&[0.6, -0.4], &[0.3, 0.7])
                .expect("lengths agree"),
        }
    }

    fn tolerance(&self, tol: &Tolerances) -> f64 {
        match self {
            Self::ConformalBump => tol.gauss_bonnet_conformal,
            _ => tol.gauss_bonnet,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussBonnetParams {
    pub families: Vec<TorusMetricFamily>,
    pub grid: usize,
}

impl Default for GaussBonnetParams {
    fn default() -> Self {
        Self {
            families: TorusMetricFamily::ALL.to_vec(),
            grid: 128,
        }
    }
}

pub fn verify_gauss_bonnet(params: &GaussBonnetParams, tol: &Tolerances) -> Result<VerificationReport> {
    let grid = PeriodicGrid::new(params.grid)?;
    let mut report = ReportBuilder::new("gauss-bonnet", None);
    report.param(
        "families",
        params.families.iter().map(|f| f.name()).collect::<Vec<_>>(),
    );
    report.param("grid", params.grid);

    for family in &params.families {
        let name = format!("total_curvature[{}]", family.name());
        match gauss_bonnet_torus(&family.metric(), &grid) {
            Ok(r) => {
                let mut res = Residual::zero();
                res.observe(r.value, &Point::origin(2));
                report.at_most(name, Ok(res), family.tolerance(tol));
                report.observe(observable! {
                    "family" => family.name(),
                    "total_curvature" => r.value,
                    "estimated_error" => r.estimated_error,
                });
            }
            Err(e) => report.at_most(name, Err(e), family.tolerance(tol)),
        }
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Dispatch

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    GaussBonnet,
    Hopf,
    LocalFrame,
    QuasiMetric,
    Theorem1,
    TorusFlat,
}

impl Scenario {
    /// All scenarios, ordered by name.
    pub const ALL: [Scenario; 6] = [
        Self::GaussBonnet,
        Self::Hopf,
        Self::LocalFrame,
        Self::QuasiMetric,
        Self::Theorem1,
        Self::TorusFlat,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::GaussBonnet => "gauss-bonnet",
            Self::Hopf => "hopf",
            Self::LocalFrame => "local-frame",
            Self::QuasiMetric => "quasi-metric",
            Self::Theorem1 => "theorem1",
            Self::TorusFlat => "torus-flat",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| GeometryError::InvalidArgument(format!("unknown scenario '{s}'")))
    }
}

/// Overrides shared by all scenarios; `None` keeps a scenario's default.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub k: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub dim: Option<usize>,
    pub grid: Option<usize>,
    pub seed: u64,
    pub tol_scale: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            k: None,
            t: None,
            dim: None,
            grid: None,
            seed: 0,
            tol_scale: 1.0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(GeometryError::InvalidArgument(format!(
                "tol-scale must be positive, got {}",
                self.tol_scale
            )));
        }
        if let Some(t) = &self.t {
            validate_t_grid(t)?;
        }
        if let Some(k) = &self.k {
            if k.is_empty() || k.iter().any(|v| !v.is_finite()) {
                return Err(GeometryError::InvalidArgument("k values must be finite".into()));
            }
        }
        if let Some(d) = self.dim {
            validate_dim(d)?;
        }
        if let Some(n) = self.grid {
            PeriodicGrid::new(n)?;
        }
        Ok(())
    }
}

pub fn run_scenario(scenario: Scenario, config: &ScenarioConfig) -> Result<VerificationReport> {
    config.validate()?;
    let tol = Tolerances::default().scaled(config.tol_scale);
    let seed = config.seed;
    match scenario {
        Scenario::Hopf => {
            let d = HopfParams::default();
            verify_hopf(
                &HopfParams {
                    dim: config.dim.unwrap_or(d.dim),
                    seed,
                    t_grid: config.t.clone().unwrap_or(d.t_grid),
                    ..d
                },
                &tol,
            )
        }
        Scenario::TorusFlat => {
            let d = TorusFlatParams::default();
            verify_torus_flat(
                &TorusFlatParams {
                    k_values: config.k.clone().unwrap_or(d.k_values),
                    dim: config.dim.unwrap_or(d.dim),
                    seed,
                    ..d
                },
                &tol,
            )
        }
        Scenario::LocalFrame => {
            let d = LocalFrameParams::default();
            verify_local_frame(
                &LocalFrameParams {
                    dim: config.dim.unwrap_or(d.dim),
                    seed,
                    ..d
                },
                &tol,
            )
        }
        Scenario::Theorem1 => {
            let d = Theorem1Params::default();
            verify_theorem1(
                &Theorem1Params {
                    t_grid: config.t.clone().unwrap_or(d.t_grid),
                    dim: config.dim.unwrap_or(d.dim),
                    seed,
                    ..d
                },
                &tol,
            )
        }
        Scenario::QuasiMetric => {
            let d = QuasiMetricParams::default();
            verify_quasi_metric(
                &QuasiMetricParams {
                    k_values: config.k.clone().unwrap_or(d.k_values),
                    grid: config.grid.unwrap_or(d.grid),
                    seed,
                    ..d
                },
                &tol,
            )
        }
        Scenario::GaussBonnet => {
            let d = GaussBonnetParams::default();
            verify_gauss_bonnet(
                &GaussBonnetParams {
                    grid: config.grid.unwrap_or(d.grid),
                    ..d
                },
                &tol,
            )
        }
    }
}

/// Runs every scenario concurrently; reports come back ordered by name.
pub fn run_all(config: &ScenarioConfig) -> Result<Vec<VerificationReport>> {
    config.validate()?;
    let results: Vec<Result<VerificationReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = Scenario::ALL
            .iter()
            .map(|&sc| s.spawn(move || run_scenario(sc, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}
