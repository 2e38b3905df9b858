//! Coordinate-expressed connections.
//!
//! A connection is carried only through its Christoffel field `Γ^k_{ij}` in
//! an affine chart, where the flat affine connection has `Γ = 0`. The
//! deformation `∇^t = (1 - t)∇ + tD` therefore reduces to scaling the
//! Levi-Civita symbols of `D` by `t`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{GeometryError, Result};
use crate::fields::{DifferentiationConfig, Point, DEFAULT_FD_STEP};
use crate::metrics::{DiagonalMetric, MetricField};
use crate::residual::Residual;

/// `Γ^k_{ij}` at a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    /// `Γ^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(k, i, j)]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let at = self.idx(k, i, j);
        self.data[at] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `max |Γ^k_{ij} - Γ^k_{ji}|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in i + 1..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    /// `w^k = Γ^k_{ij} u^i v^j`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    if u[i] == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        s += self.get(k, i, j) * u[i] * v[j];
                    }
                }
                s
            })
            .collect()
    }

    fn axpby(&self, a: f64, other: &Christoffel, b: f64) -> Christoffel {
        Christoffel {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }
}

type GammaFn = dyn Fn(&Point) -> Result<Christoffel> + Send + Sync;

/// A Christoffel field on a chart.
#[derive(Clone)]
pub struct ChristoffelField {
    dim: usize,
    label: Arc<str>,
    gamma: Arc<GammaFn>,
    fd_step: f64,
}

impl fmt::Debug for ChristoffelField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChristoffelField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .finish()
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(GeometryError::InvalidArgument(format!(
            "deformation parameter t = {t} lies outside [0, 1]"
        )))
    }
}

impl ChristoffelField {
    pub fn new<F>(dim: usize, label: &str, gamma: F) -> Self
    where
        F: Fn(&Point) -> Result<Christoffel> + Send + Sync + 'static,
    {
        Self {
            dim,
            label: Arc::from(label),
            gamma: Arc::new(gamma),
            fd_step: DEFAULT_FD_STEP,
        }
    }

    /// Step used when differencing the field (curvature).
    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    /// The flat affine connection in affine coordinates.
    pub fn zero(dim: usize) -> Self {
        Self::new(dim, "flat", move |_| Ok(Christoffel::zeros(dim)))
    }

    /// `∇^k_{E_i} E_i = k E_i`, `∇^k_{E_i} E_j = 0` for `i ≠ j`.
    pub fn torus_affine(k: f64, dim: usize) -> Self {
        let mut gamma = Christoffel::zeros(dim);
        for i in 0..dim {
            gamma.set(i, i, i, k);
        }
        Self::new(dim, "torus_affine", move |_| Ok(gamma.clone()))
    }

    /// Closed-form Levi-Civita symbols of `g^t = Σ g_i^t dx_i²` for a diagonal `g`:
    /// `Γ^i_{ij} = Γ^i_{ji} = (t/2) ∂_j g_i / g_i`,
    /// `Γ^k_{ii} = -(t/2) (g_i / g_k)^t ∂_k g_i / g_i` for `k ≠ i`, all others zero.
    pub fn levi_civita_diagonal(g: &DiagonalMetric, t: f64) -> Result<Self> {
        check_t(t)?;
        let g = g.clone();
        let n = g.dim();
        Ok(Self::new(n, "levi_civita_diagonal", move |p| {
            if p.dim() != n {
                return Err(GeometryError::DimensionMismatch { expected: n, actual: p.dim() });
            }
            let mut gamma = Christoffel::zeros(n);
            if t == 0.0 {
                return Ok(gamma);
            }
            let values = g.eval(p)?.diagonal;
            let half_t = 0.5 * t;
            for (i, &gi) in values.iter().enumerate() {
                for j in 0..n {
                    let log_deriv = g.entry(i).partial(j, p)? / gi;
                    gamma.set(i, i, j, half_t * log_deriv);
                    gamma.set(i, j, i, half_t * log_deriv);
                    if j != i {
                        let ratio = (gi / values[j]).powf(t);
                        gamma.set(j, i, i, -half_t * ratio * log_deriv);
                    }
                }
            }
            Ok(gamma)
        }))
    }

    /// `Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} - ∂_l g_{ij})` for a
    /// general symmetric metric field.
    pub fn levi_civita_general(g: Arc<dyn MetricField>, config: DifferentiationConfig) -> Self {
        let n = g.dim();
        Self::new(n, "levi_civita_general", move |p| {
            let m = g.matrix(p)?;
            let inv = m.clone().try_inverse().ok_or_else(|| GeometryError::Degenerate {
                point: p.coords().to_vec(),
                detail: "metric matrix is not invertible".into(),
            })?;
            let dg = (0..n)
                .map(|k| g.matrix_partial(k, p))
                .collect::<Result<Vec<DMatrix<f64>>>>()?;
            let mut gamma = Christoffel::zeros(n);
            for k in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            let lowered = dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)];
                            s += inv[(k, l)] * lowered;
                        }
                        gamma.set(k, i, j, 0.5 * s);
                        gamma.set(k, j, i, 0.5 * s);
                    }
                }
            }
            Ok(gamma)
        })
        .with_fd_step(config.fd_step)
    }

    /// `Γ(∇^t) = (1 - t) Γ(flat) + t Γ(D)`.
    pub fn deform(flat: &ChristoffelField, levi_civita: &ChristoffelField, t: f64) -> Result<Self> {
        check_t(t)?;
        if flat.dim != levi_civita.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: flat.dim,
                actual: levi_civita.dim,
            });
        }
        let (a, b) = (flat.clone(), levi_civita.clone());
        Ok(Self::new(flat.dim, "deformed", move |p| {
            Ok(a.eval(p)?.axpby(1.0 - t, &b.eval(p)?, t))
        })
        .with_fd_step(levi_civita.fd_step))
    }

    /// Deformation of the affine chart's flat connection (Γ = 0) into `D`.
    pub fn deform_from_flat(levi_civita: &ChristoffelField, t: f64) -> Result<Self> {
        Self::deform(&Self::zero(levi_civita.dim), levi_civita, t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, p: &Point) -> Result<Christoffel> {
        if p.dim() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                actual: p.dim(),
            });
        }
        let gamma = (self.gamma)(p)?;
        if gamma.data.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite {
                what: self.label.to_string(),
                point: p.coords().to_vec(),
            });
        }
        Ok(gamma)
    }

    /// Worst `|Γ^k_{ij} - Γ^k_{ji}|` over `probes`.
    pub fn symmetry_defect(&self, probes: &[Point]) -> Result<Residual> {
        let mut res = Residual::zero();
        for p in probes {
            res.observe(self.eval(p)?.symmetry_defect(), p);
        }
        Ok(res)
    }

    /// Worst entrywise difference from `other` over `probes`.
    pub fn difference(&self, other: &ChristoffelField, probes: &[Point]) -> Result<Residual> {
        let mut res = Residual::zero();
        for p in probes {
            res.observe(self.eval(p)?.max_abs_diff(&other.eval(p)?), p);
        }
        Ok(res)
    }

    /// Worst `|Γ^k_{ij}|` over `probes`.
    pub fn max_abs(&self, probes: &[Point]) -> Result<Residual> {
        let mut res = Residual::zero();
        for p in probes {
            res.observe(self.eval(p)?.max_abs(), p);
        }
        Ok(res)
    }

    /// `max |∂_k g_ij − Γ^l_{ki} g_lj − Γ^l_{kj} g_il|`, i.e. the size of `∇g`.
    pub fn metric_compatibility_residual(
        &self,
        g: &dyn MetricField,
        probes: &[Point],
    ) -> Result<Residual> {
        let n = self.dim;
        if g.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, actual: g.dim() });
        }
        let mut res = Residual::zero();
        for p in probes {
            let gamma = self.eval(p)?;
            let m = g.matrix(p)?;
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let dg = g.matrix_partial(k, p)?;
                for i in 0..n {
                    for j in 0..n {
                        let mut r = dg[(i, j)];
                        for l in 0..n {
                            r -= gamma.get(l, k, i) * m[(l, j)] + gamma.get(l, k, j) * m[(i, l)];
                        }
                        worst = worst.max(r.abs());
                    }
                }
            }
            res.observe(worst, p);
        }
        Ok(res)
    }

    /// `R^l_{ijk} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} − Γ^l_{jm} Γ^m_{ik}`,
    /// with `∂` taken by central differences of the field.
    pub fn curvature_tensor(&self, p: &Point) -> Result<CurvatureTensor> {
        let n = self.dim;
        let h = self.fd_step;
        let gamma = self.eval(p)?;
        let dgamma = (0..n)
            .map(|i| {
                let plus = self.eval(&p.shifted(i, h))?;
                let minus = self.eval(&p.shifted(i, -h))?;
                Ok(plus.axpby(1.0 / (2.0 * h), &minus, -1.0 / (2.0 * h)))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut r = CurvatureTensor::zeros(p.clone(), n);
        for l in 0..n {
            for i in 0..n {
                for j in i + 1..n {
                    for k in 0..n {
                        let mut v = dgamma[i].get(l, j, k) - dgamma[j].get(l, i, k);
                        for m in 0..n {
                            v += gamma.get(l, i, m) * gamma.get(m, j, k)
                                - gamma.get(l, j, m) * gamma.get(m, i, k);
                        }
                        r.set(l, i, j, k, v);
                        r.set(l, j, i, k, -v);
                    }
                }
            }
        }
        Ok(r)
    }

    /// Solves `v' = −Γ(c(s))(c'(s), v)` on `[0, 1]` with classical RK4.
    pub fn parallel_transport(&self, curve: &Curve, v0: &[f64], steps: usize) -> Result<Vec<f64>> {
        let n = self.dim;
        if steps == 0 {
            return Err(GeometryError::InvalidArgument("steps must be at least 1".into()));
        }
        if v0.len() != n || curve.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                actual: if v0.len() != n { v0.len() } else { curve.dim() },
            });
        }
        let rhs = |s: f64, v: &[f64]| -> Result<Vec<f64>> {
            let gamma = self.eval(&curve.point(s)?)?;
            let w = gamma.contract(&curve.velocity(s), v);
            Ok(w.into_iter().map(|x| -x).collect())
        };
        let h = 1.0 / steps as f64;
        let mut v = v0.to_vec();
        for step in 0..steps {
            let s = step as f64 * h;
            let k1 = rhs(s, &v)?;
            let k2 = rhs(s + 0.5 * h, &axpy(&v, 0.5 * h, &k1))?;
            let k3 = rhs(s + 0.5 * h, &axpy(&v, 0.5 * h, &k2))?;
            let k4 = rhs(s + h, &axpy(&v, h, &k3))?;
            for a in 0..n {
                v[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(GeometryError::Integration { step });
            }
        }
        Ok(v)
    }

    /// Holonomy around a loop; column `j` is the transport of `e_j`.
    pub fn holonomy_matrix(&self, lp: &Curve, steps: usize) -> Result<DMatrix<f64>> {
        lp.check_closed()?;
        let n = self.dim;
        let mut h = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let v = self.parallel_transport(lp, &e, steps)?;
            for i in 0..n {
                h[(i, j)] = v[i];
            }
        }
        Ok(h)
    }

    /// Moduli of the holonomy eigenvalues, ascending.
    pub fn holonomy_eigenvalues(&self, lp: &Curve, steps: usize) -> Result<Vec<f64>> {
        let h = self.holonomy_matrix(lp, steps)?;
        let mut moduli: Vec<f64> = h.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        Ok(moduli)
    }
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(x, y)| x + a * y).collect()
}

/// `R^l_{ijk}` at a point, with `R(E_i, E_j)E_k = R^l_{ijk} E_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    pub point: Point,
    dim: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    fn zeros(point: Point, dim: usize) -> Self {
        Self {
            point,
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    #[inline]
    fn idx(&self, l: usize, i: usize, j: usize, k: usize) -> usize {
        ((l * self.dim + i) * self.dim + j) * self.dim + k
    }

    fn set(&mut self, l: usize, i: usize, j: usize, k: usize, v: f64) {
        let at = self.idx(l, i, j, k);
        self.data[at] = v;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(l, i, j, k)]
    }

    /// Max-norm of all components.
    pub fn norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |R^l_{ijk} + R^l_{jik}|`; zero by construction.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        worst = worst.max((self.get(l, i, j, k) + self.get(l, j, i, k)).abs());
                    }
                }
            }
        }
        worst
    }

    /// `max |R^l_{ijk} + R^l_{jki} + R^l_{kij}|`.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let s = self.get(l, i, j, k) + self.get(l, j, k, i) + self.get(l, k, i, j);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

type MapFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

/// A parametrized curve `s ∈ [0, 1] ↦ c(s)` with its exact velocity.
#[derive(Clone)]
pub struct Curve {
    dim: usize,
    map: Arc<MapFn>,
    velocity: Arc<MapFn>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve").field("dim", &self.dim).finish()
    }
}

impl Curve {
    pub fn new<M, V>(dim: usize, map: M, velocity: V) -> Self
    where
        M: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        V: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            map: Arc::new(map),
            velocity: Arc::new(velocity),
        }
    }

    /// `c(s) = base + 2πs e_axis`: one turn around the `axis` circle of the torus.
    pub fn coordinate_loop(base: &Point, axis: usize) -> Self {
        let b = base.coords().to_vec();
        let n = b.len();
        Self::new(
            n,
            move |s| {
                let mut c = b.clone();
                c[axis] += 2.0 * PI * s;
                c
            },
            move |_| {
                let mut v = vec![0.0; n];
                v[axis] = 2.0 * PI;
                v
            },
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, s: f64) -> Result<Point> {
        Point::new((self.map)(s))
    }

    pub fn velocity(&self, s: f64) -> Vec<f64> {
        (self.velocity)(s)
    }

    /// A loop closes when `c(1) − c(0)` is a lattice vector of `2πZ^n`
    /// (the torus identification; zero for loops in a plain chart).
    pub fn check_closed(&self) -> Result<()> {
        let start = (self.map)(0.0);
        let end = (self.map)(1.0);
        let closed = start.iter().zip(&end).all(|(a, b)| {
            let turns = (b - a) / (2.0 * PI);
            (turns - turns.round()).abs() < 1e-9
        });
        if closed {
            Ok(())
        } else {
            Err(GeometryError::InvalidArgument("curve is not a closed loop".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{sample_cube, ScalarField};
    use crate::metrics::MatrixMetric;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    fn probes(dim: usize, n: usize) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        sample_cube(&mut rng, dim, n, -2.0, 2.0)
    }

    #[test]
    fn euclidean_and_t0_give_zero_symbols() {
        let ps = probes(3, 20);
        let e = ChristoffelField::levi_civita_diagonal(&DiagonalMetric::euclidean(3), 0.7).unwrap();
        assert_eq!(e.max_abs(&ps).unwrap().value, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = DiagonalMetric::random_periodic(&mut rng, 3);
        let z = ChristoffelField::levi_civita_diagonal(&g, 0.0).unwrap();
        assert_eq!(z.max_abs(&ps).unwrap().value, 0.0);
    }

    #[test]
    fn hopf_symbols_by_hand() {
        let g = DiagonalMetric::hopf(2);
        let gamma = ChristoffelField::levi_civita_diagonal(&g, 1.0)
            .unwrap()
            .eval(&pt(&[1.0, 0.0]))
            .unwrap();
        assert!((gamma.get(0, 0, 0) + 1.0).abs() < 1e-15);
        assert!((gamma.get(1, 1, 0) + 1.0).abs() < 1e-15);
        assert!((gamma.get(1, 0, 1) + 1.0).abs() < 1e-15);
        assert!((gamma.get(0, 1, 1) - 1.0).abs() < 1e-15);
        assert_eq!(gamma.get(0, 0, 1), 0.0);
        assert_eq!(gamma.get(1, 0, 0), 0.0);
        assert_eq!(gamma.get(1, 1, 1), 0.0);
    }

    #[test]
    fn t_outside_unit_interval_rejected() {
        let g = DiagonalMetric::hopf(2);
        assert!(ChristoffelField::levi_civita_diagonal(&g, 1.2).is_err());
        let d = ChristoffelField::levi_civita_diagonal(&g, 1.0).unwrap();
        assert!(ChristoffelField::deform_from_flat(&d, -0.5).is_err());
    }

    #[test]
    fn general_formula_agrees_with_diagonal_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = DiagonalMetric::random_periodic(&mut rng, 3);
        let ps = probes(3, 50);
        let diag = ChristoffelField::levi_civita_diagonal(&g, 1.0).unwrap();
        let general =
            ChristoffelField::levi_civita_general(Arc::new(g), DifferentiationConfig::default());
        assert!(diag.difference(&general, &ps).unwrap().value <= 1e-12);
    }

    #[test]
    fn conformal_linear_exponent_symbols() {
        let u = ScalarField::coordinate(2, 0);
        let g = MatrixMetric::from_diagonal(&DiagonalMetric::conformal(2, &u));
        let gamma = ChristoffelField::levi_civita_general(Arc::new(g), DifferentiationConfig::default())
            .eval(&pt(&[0.4, -0.3]))
            .unwrap();
        let expect = [(0, 0, 0, 1.0), (0, 1, 1, -1.0), (1, 0, 1, 1.0), (1, 1, 0, 1.0)];
        for (k, i, j, v) in expect {
            assert!((gamma.get(k, i, j) - v).abs() < 1e-14);
        }
        assert_eq!(gamma.get(1, 0, 0), 0.0);
        assert_eq!(gamma.get(0, 0, 1), 0.0);
    }

    #[test]
    fn deform_is_linear_in_t() {
        let g = DiagonalMetric::hopf(2);
        let d = ChristoffelField::levi_civita_diagonal(&g, 1.0).unwrap();
        let ps: Vec<Point> = probes(2, 30).into_iter().filter(|p| p.norm() > 0.1).collect();
        let zero = ChristoffelField::deform_from_flat(&d, 0.0).unwrap();
        assert_eq!(zero.max_abs(&ps).unwrap().value, 0.0);
        let one = ChristoffelField::deform_from_flat(&d, 1.0).unwrap();
        assert_eq!(one.difference(&d, &ps).unwrap().value, 0.0);
        let half = ChristoffelField::deform_from_flat(&d, 0.5).unwrap();
        for p in &ps {
            let (h, full) = (half.eval(p).unwrap(), d.eval(p).unwrap());
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(h.get(k, i, j), 0.5 * full.get(k, i, j));
                    }
                }
            }
        }
    }

    #[test]
    fn torus_affine_symbols() {
        let p = pt(&[0.1, 0.2]);
        assert_eq!(ChristoffelField::torus_affine(0.0, 2).eval(&p).unwrap().max_abs(), 0.0);
        let g = ChristoffelField::torus_affine(2.0, 2).eval(&p).unwrap();
        assert_eq!(g.get(0, 0, 0), 2.0);
        assert_eq!(g.get(1, 1, 1), 2.0);
        assert_eq!(g.get(0, 0, 1), 0.0);
        assert_eq!(g.get(1, 0, 0), 0.0);
        assert_eq!(g.get(0, 1, 1), 0.0);
    }

    #[test]
    fn compatibility_residual_examples() {
        let g = DiagonalMetric::hopf(3);
        let ps: Vec<Point> = probes(3, 50).into_iter().filter(|p| p.norm() > 0.1).collect();
        let lc = ChristoffelField::levi_civita_diagonal(&g, 1.0).unwrap();
        assert!(lc.metric_compatibility_residual(&g, &ps).unwrap().value <= 1e-6);
        for t in [0.25, 0.5, 0.75] {
            let nabla_t = ChristoffelField::deform_from_flat(&lc, t).unwrap();
            let gt = g.power_family(t).unwrap();
            assert!(nabla_t.metric_compatibility_residual(&gt, &ps).unwrap().value <= 1e-6);
        }
        let flat = ChristoffelField::zero(3);
        assert!(flat.metric_compatibility_residual(&g, &ps).unwrap().value >= 0.1);
    }

    #[test]
    fn torus_family_is_flat() {
        let ps = probes(2, 20);
        for k in [-1.0, 0.5, 3.0] {
            let gamma = ChristoffelField::torus_affine(k, 2);
            for p in &ps {
                assert!(gamma.curvature_tensor(p).unwrap().norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn hyperbolic_half_plane_has_curvature_minus_one() {
        // g = y^{-2}(dx^2 + dy^2) has K = -1, so R^1_{122} = K g_22 = -1/y^2.
        let inv_sq = ScalarField::coordinate(2, 1)
            .with_domain(|x| x[1] > 0.0)
            .powf(-2.0);
        let g = DiagonalMetric::new(vec![inv_sq.clone(), inv_sq]).unwrap();
        let gamma = ChristoffelField::levi_civita_diagonal(&g, 1.0).unwrap();
        let p = pt(&[0.3, 1.7]);
        let r = gamma.curvature_tensor(&p).unwrap();
        assert!((r.get(0, 0, 1, 1) + 1.0 / (1.7 * 1.7)).abs() < 1e-8);
        assert_eq!(r.antisymmetry_defect(), 0.0);
        assert!(r.bianchi_defect() < 1e-6);
    }

    #[test]
    fn flat_transport_is_identity() {
        let c = Curve::new(2, |s| vec![s.sin(), s * s], |s| vec![s.cos(), 2.0 * s]);
        let v = ChristoffelField::zero(2).parallel_transport(&c, &[0.3, -2.0], 17).unwrap();
        assert_eq!(v, vec![0.3, -2.0]);
    }

    #[test]
    fn torus_transport_closed_form() {
        let k = 0.3;
        let lp = Curve::coordinate_loop(&Point::origin(2), 0);
        let gamma = ChristoffelField::torus_affine(k, 2);
        let v = gamma.parallel_transport(&lp, &[1.0, 0.0], 1000).unwrap();
        let expect = (-2.0 * PI * k).exp();
        assert!((v[0] - expect).abs() / expect < 1e-8);
        assert_eq!(v[1], 0.0);
        let w = gamma.parallel_transport(&lp, &[0.0, 1.0], 1000).unwrap();
        assert_eq!(w, vec![0.0, 1.0]);
    }

    #[test]
    fn holonomy_spectra() {
        let lp = Curve::coordinate_loop(&Point::origin(2), 0);
        let flat = ChristoffelField::torus_affine(0.0, 2).holonomy_eigenvalues(&lp, 1000).unwrap();
        assert_eq!(flat, vec![1.0, 1.0]);
        let s = ChristoffelField::torus_affine(0.3, 2).holonomy_eigenvalues(&lp, 1000).unwrap();
        assert!((s[0] - (-0.6 * PI).exp()).abs() < 1e-6);
        assert!((s[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn open_curve_has_no_holonomy() {
        let c = Curve::new(2, |s| vec![s, 0.0], |_| vec![1.0, 0.0]);
        assert!(ChristoffelField::zero(2).holonomy_matrix(&c, 10).is_err());
    }

    #[test]
    fn zero_steps_rejected() {
        let lp = Curve::coordinate_loop(&Point::origin(2), 0);
        assert!(ChristoffelField::zero(2).parallel_transport(&lp, &[1.0, 0.0], 0).is_err());
    }
}
