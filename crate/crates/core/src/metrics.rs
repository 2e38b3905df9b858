//! Diagonal Riemannian metrics in affine coordinates.
//!
//! The metrics here are always diagonal in the chart they are defined on.
//! Dense symmetric metrics only show up as the output of a pullback or when
//! a caller builds one explicitly through [`MatrixMetric`].

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::fields::{Point, ScalarField, DEFAULT_FD_STEP};
use crate::residual::Residual;

/// Anything that yields a symmetric matrix `g_ij(p)` and its partials.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;

    fn matrix(&self, p: &Point) -> Result<DMatrix<f64>>;

    /// `∂_k g_ij` at `p`. Central differences unless overridden.
    fn matrix_partial(&self, k: usize, p: &Point) -> Result<DMatrix<f64>> {
        if k >= p.dim() {
            return Err(GeometryError::IndexOutOfRange { index: k, dim: p.dim() });
        }
        let h = DEFAULT_FD_STEP;
        let plus = self.matrix(&p.shifted(k, h))?;
        let minus = self.matrix(&p.shifted(k, -h))?;
        Ok((plus - minus) / (2.0 * h))
    }
}

/// Diagonal entries of a metric at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix {
    pub point: Point,
    pub diagonal: Vec<f64>,
}

impl MetricMatrix {
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal))
    }
}

/// `g = Σ g_i(x) dx_i ⊗ dx_i` with every `g_i > 0`.
#[derive(Clone, Debug)]
pub struct DiagonalMetric {
    entries: Vec<ScalarField>,
}

impl DiagonalMetric {
    pub fn new(entries: Vec<ScalarField>) -> Result<Self> {
        if entries.is_empty() {
            return Err(GeometryError::InvalidArgument(
                "a metric needs at least one entry".into(),
            ));
        }
        let n = entries.len();
        if let Some(d) = entries.iter().filter_map(|e| e.dim()).find(|d| *d != n) {
            return Err(GeometryError::DimensionMismatch { expected: n, actual: d });
        }
        Ok(Self { entries })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self {
            entries: vec![ScalarField::constant(1.0); dim.max(1)],
        }
    }

    /// `g = |x|^{-2} Σ dx_i²` on `R^dim \ {0}`.
    pub fn hopf(dim: usize) -> Self {
        let inv = ScalarField::sum_of_squares(dim)
            .with_domain(|x| x.iter().any(|v| *v != 0.0))
            .reciprocal();
        Self {
            entries: vec![inv; dim],
        }
    }

    /// `g = e^{2u} Σ dx_i²`.
    pub fn conformal(dim: usize, u: &ScalarField) -> Self {
        let factor = u.scale(2.0).exp();
        Self {
            entries: vec![factor; dim],
        }
    }

    /// `g_i = exp(a_i sin x_1 + b_i cos x_n)`: smooth, positive, and
    /// `2π`-periodic in every coordinate.
    pub fn periodic_exponential(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: a.len(),
                actual: b.len(),
            });
        }
        let n = a.len();
        let entries = a
            .iter()
            .zip(b)
            .map(|(&ai, &bi)| {
                let exponent = ScalarField::with_partials(
                    n,
                    "a sin x1 + b cos xn",
                    move |x| ai * x[0].sin() + bi * x[n - 1].cos(),
                    move |k, x| {
                        let mut d = 0.0;
                        if k == 0 {
                            d += ai * x[0].cos();
                        }
                        if k == n - 1 {
                            d -= bi * x[n - 1].sin();
                        }
                        d
                    },
                );
                exponent.exp()
            })
            .collect();
        Self::new(entries)
    }

    /// A member of the periodic exponential family with `a_i, b_i ~ U[-1, 1]`.
    pub fn random_periodic<R: Rng>(rng: &mut R, dim: usize) -> Self {
        let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        Self::periodic_exponential(&a, &b).expect("lengths agree")
    }

    /// Conformal metric on the torus with `u = amplitude · sin θ_1 cos θ_2`.
    pub fn torus_conformal_bump(amplitude: f64) -> Self {
        let u = ScalarField::with_partials(
            2,
            "bump",
            move |x| amplitude * x[0].sin() * x[1].cos(),
            move |k, x| {
                if k == 0 {
                    amplitude * x[0].cos() * x[1].cos()
                } else {
                    -amplitude * x[0].sin() * x[1].sin()
                }
            },
        );
        Self::conformal(2, &u)
    }

    /// `diag(1 + c sin²θ_1, 1)` on the torus.
    pub fn torus_stretched(c: f64) -> Self {
        let first = ScalarField::with_partials(
            2,
            "1 + c sin^2",
            move |x| 1.0 + c * x[0].sin().powi(2),
            move |k, x| if k == 0 { 2.0 * c * x[0].sin() * x[0].cos() } else { 0.0 },
        );
        Self {
            entries: vec![first, ScalarField::constant(1.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[ScalarField] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &ScalarField {
        &self.entries[i]
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                actual: p.dim(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, p: &Point) -> Result<MetricMatrix> {
        self.check_point(p)?;
        let diagonal = self
            .entries
            .iter()
            .map(|g| g.eval(p))
            .collect::<Result<Vec<_>>>()?;
        if let Some((i, v)) = diagonal.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(GeometryError::Degenerate {
                point: p.coords().to_vec(),
                detail: format!("entry {i} is {v}"),
            });
        }
        Ok(MetricMatrix {
            point: p.clone(),
            diagonal,
        })
    }

    /// Probes positivity of every entry.
    pub fn check_positive(&self, probes: &[Point]) -> Result<()> {
        for p in probes {
            self.eval(p)?;
        }
        Ok(())
    }

    /// The family `g^t = Σ g_i^t dx_i²`, `t ∈ [0, 1]`.
    pub fn power_family(&self, t: f64) -> Result<DiagonalMetric> {
        if !(0.0..=1.0).contains(&t) {
            return Err(GeometryError::InvalidArgument(format!(
                "deformation parameter t = {t} lies outside [0, 1]"
            )));
        }
        Ok(Self {
            entries: self.entries.iter().map(|g| g.powf(t)).collect(),
        })
    }

    /// Entries multiplied by `c`; used for negative controls.
    pub fn scaled(&self, c: f64) -> DiagonalMetric {
        Self {
            entries: self.entries.iter().map(|g| g.scale(c)).collect(),
        }
    }

    /// The bilinear-form field `p ↦ Aᵀ g(A p) A`.
    pub fn pullback_linear(&self, a: &DMatrix<f64>) -> Result<PullbackMetric> {
        let n = self.dim();
        if a.nrows() != n || a.ncols() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                actual: a.nrows().max(a.ncols()),
            });
        }
        if a.iter().any(|v| !v.is_finite()) || a.clone().try_inverse().is_none() {
            return Err(GeometryError::SingularMatrix);
        }
        Ok(PullbackMetric {
            base: self.clone(),
            map: a.clone(),
        })
    }

    /// `max_p ‖Aᵀ g(Ap) A − g(p)‖_max` over `probes`.
    pub fn pullback_residual(&self, a: &DMatrix<f64>, probes: &[Point]) -> Result<Residual> {
        let pulled = self.pullback_linear(a)?;
        let mut res = Residual::zero();
        for p in probes {
            let diff = pulled.matrix(p)? - self.eval(p)?.to_matrix();
            res.observe(diff.amax(), p);
        }
        Ok(res)
    }
}

impl MetricField for DiagonalMetric {
    fn dim(&self) -> usize {
        self.entries.len()
    }

    fn matrix(&self, p: &Point) -> Result<DMatrix<f64>> {
        Ok(self.eval(p)?.to_matrix())
    }

    fn matrix_partial(&self, k: usize, p: &Point) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let d = self
            .entries
            .iter()
            .map(|g| g.partial(k, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
    }
}

/// `Aᵀ g(A p) A` for a fixed invertible `A`.
#[derive(Clone, Debug)]
pub struct PullbackMetric {
    base: DiagonalMetric,
    map: DMatrix<f64>,
}

impl MetricField for PullbackMetric {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn matrix(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.base.check_point(p)?;
        let x = nalgebra::DVector::from_column_slice(p.coords());
        let image = Point::new((&self.map * x).iter().copied().collect())?;
        let g = self.base.eval(&image)?.to_matrix();
        Ok(self.map.transpose() * g * &self.map)
    }
}

/// A dense symmetric metric built from scalar fields.
#[derive(Clone, Debug)]
pub struct MatrixMetric {
    dim: usize,
    entries: Vec<ScalarField>,
}

impl MatrixMetric {
    /// `upper` lists `g_ij` for `i <= j` in row-major order.
    pub fn symmetric(dim: usize, upper: Vec<ScalarField>) -> Result<Self> {
        if upper.len() != dim * (dim + 1) / 2 {
            return Err(GeometryError::Shape(format!(
                "expected {} upper-triangular entries, got {}",
                dim * (dim + 1) / 2,
                upper.len()
            )));
        }
        let mut entries = vec![ScalarField::constant(0.0); dim * dim];
        let mut it = upper.into_iter();
        for i in 0..dim {
            for j in i..dim {
                let f = it.next().expect("length checked");
                entries[i * dim + j] = f.clone();
                entries[j * dim + i] = f;
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_diagonal(g: &DiagonalMetric) -> Self {
        let n = g.dim();
        let mut entries = vec![ScalarField::constant(0.0); n * n];
        for i in 0..n {
            entries[i * n + i] = g.entry(i).clone();
        }
        Self { dim: n, entries }
    }

    fn collect<F>(&self, p: &Point, f: F) -> Result<DMatrix<f64>>
    where
        F: Fn(&ScalarField) -> Result<f64>,
    {
        if p.dim() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                actual: p.dim(),
            });
        }
        let vals = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &vals))
    }
}

impl MetricField for MatrixMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn matrix(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.collect(p, |g| g.eval(p))
    }

    fn matrix_partial(&self, k: usize, p: &Point) -> Result<DMatrix<f64>> {
        self.collect(p, |g| g.partial(k, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::sample_box;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn eval_metric_examples() {
        let e = DiagonalMetric::euclidean(3).eval(&pt(&[4.0, -1.0, 2.0])).unwrap();
        assert_eq!(e.diagonal, vec![1.0; 3]);

        let h = DiagonalMetric::hopf(4).eval(&pt(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(h.diagonal, vec![1.0; 4]);

        let h = DiagonalMetric::hopf(3).eval(&pt(&[1.0, 2.0, 2.0])).unwrap();
        for d in h.diagonal {
            assert!((d - 1.0 / 9.0).abs() < 1e-16);
        }
    }

    #[test]
    fn hopf_is_undefined_at_origin() {
        assert!(DiagonalMetric::hopf(2).eval(&Point::origin(2)).is_err());
    }

    #[test]
    fn non_positive_entry_is_degenerate() {
        let g = DiagonalMetric::new(vec![
            ScalarField::coordinate(2, 0),
            ScalarField::constant(1.0),
        ])
        .unwrap();
        assert!(matches!(
            g.eval(&pt(&[-1.0, 0.0])),
            Err(GeometryError::Degenerate { .. })
        ));
    }

    #[test]
    fn power_family_examples() {
        let g = DiagonalMetric::hopf(3);
        let p = pt(&[1.0, 2.0, 2.0]);
        let g0 = g.power_family(0.0).unwrap();
        assert!(g0.entries().iter().all(|e| e.as_constant() == Some(1.0)));
        assert_eq!(g.power_family(1.0).unwrap().eval(&p).unwrap(), g.eval(&p).unwrap());
        let half = g.power_family(0.5).unwrap().eval(&p).unwrap();
        for d in half.diagonal {
            assert!((d - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(g.power_family(1.5).is_err());
        assert!(g.power_family(-0.1).is_err());
    }

    #[test]
    fn pullback_examples() {
        let e = DiagonalMetric::euclidean(2);
        let id = DMatrix::<f64>::identity(2, 2);
        let m = e.pullback_linear(&id).unwrap().matrix(&pt(&[3.0, 1.0])).unwrap();
        assert_eq!(m, id);

        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 1.0]));
        let m = e.pullback_linear(&a).unwrap().matrix(&pt(&[0.2, 7.0])).unwrap();
        assert_eq!(m, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 1.0])));

        let h = DiagonalMetric::hopf(2);
        let two = id.clone() * 2.0;
        let p = pt(&[1.0, 1.0]);
        let pulled = h.pullback_linear(&two).unwrap().matrix(&p).unwrap();
        assert!((pulled - h.matrix(&p).unwrap()).amax() < 1e-15);
    }

    #[test]
    fn singular_pullback_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(
            DiagonalMetric::euclidean(2).pullback_linear(&a).unwrap_err(),
            GeometryError::SingularMatrix
        );
    }

    #[test]
    fn pullback_residual_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let probes = sample_box(&mut rng, 2, 100, 2.0, 0.1);
        let id = DMatrix::<f64>::identity(2, 2);
        let h = DiagonalMetric::hopf(2);
        assert!(h.pullback_residual(&(id.clone() * 2.0), &probes).unwrap().value <= 1e-12);
        assert_eq!(h.pullback_residual(&id, &probes).unwrap().value, 0.0);
        let e = DiagonalMetric::euclidean(2);
        assert_eq!(e.pullback_residual(&(id * 2.0), &probes).unwrap().value, 3.0);
    }

    #[test]
    fn diagonal_partials_are_exact() {
        let g = DiagonalMetric::torus_conformal_bump(0.3);
        let p = pt(&[0.7, 1.9]);
        let exact = g.matrix_partial(0, &p).unwrap();
        let fd = {
            let plus = g.matrix(&p.shifted(0, 1e-5)).unwrap();
            let minus = g.matrix(&p.shifted(0, -1e-5)).unwrap();
            (plus - minus) / 2e-5
        };
        assert!((exact - fd).amax() < 1e-8);
    }

    #[test]
    fn matrix_metric_from_upper() {
        let g = MatrixMetric::symmetric(
            2,
            vec![
                ScalarField::constant(2.0),
                ScalarField::coordinate(2, 0),
                ScalarField::constant(3.0),
            ],
        )
        .unwrap();
        let m = g.matrix(&pt(&[0.5, 0.0])).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 3.0]));
        assert!(MatrixMetric::symmetric(2, vec![ScalarField::constant(1.0)]).is_err());
    }

    #[test]
    fn periodic_family_is_periodic_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = DiagonalMetric::random_periodic(&mut rng, 2);
        let p = pt(&[0.3, 1.1]);
        let q = pt(&[0.3 + 2.0 * std::f64::consts::PI, 1.1 - 2.0 * std::f64::consts::PI]);
        let (a, b) = (g.eval(&p).unwrap(), g.eval(&q).unwrap());
        for (x, y) in a.diagonal.iter().zip(&b.diagonal) {
            assert!(*x > 0.0 && (x - y).abs() < 1e-12);
        }
    }
}
