//! Chart points, scalar fields and their partial derivatives.
//!
//! A [`ScalarField`] is an immutable, cheaply clonable function on a single
//! chart. Fields built from closed-form expressions carry exact partials;
//! everything else falls back to central differences. Combinators propagate
//! exact partials through sums, products, reciprocals and real powers, so a
//! composite built from exact leaves is itself exact.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{GeometryError, Result};

/// Default step for central differences.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Relative tolerance used by [`ScalarField::partials_discrepancy`] callers.
pub const PARTIALS_CONSISTENCY_TOL: f64 = 1e-6;

/// A point in chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GeometryError::InvalidArgument(
                "a point needs at least one coordinate".into(),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite {
                what: "point".into(),
                point: coords,
            });
        }
        Ok(Self { coords })
    }

    /// Origin of `R^dim`.
    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `self + h * e_i`.
    pub fn shifted(&self, i: usize, h: f64) -> Point {
        let mut coords = self.coords.clone();
        coords[i] += h;
        Point { coords }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifferentiationConfig {
    pub fd_step: f64,
    pub richardson: bool,
}

impl DifferentiationConfig {
    pub fn new(fd_step: f64, richardson: bool) -> Result<Self> {
        if !(fd_step > 0.0 && fd_step <= 1e-2) {
            return Err(GeometryError::InvalidArgument(format!(
                "fd_step must lie in (0, 1e-2], got {fd_step}"
            )));
        }
        Ok(Self {
            fd_step,
            richardson,
        })
    }
}

impl Default for DifferentiationConfig {
    fn default() -> Self {
        Self {
            fd_step: DEFAULT_FD_STEP,
            richardson: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    ExactSupplied,
    CentralDifference,
}

type ValueFn = dyn Fn(&[f64]) -> Result<f64> + Send + Sync;
type PartialFn = dyn Fn(usize, &[f64]) -> Result<f64> + Send + Sync;
type DomainFn = dyn Fn(&[f64]) -> bool + Send + Sync;

#[derive(Clone)]
enum Kind {
    Constant(f64),
    General {
        value: Arc<ValueFn>,
        partial: Option<Arc<PartialFn>>,
        domain: Option<Arc<DomainFn>>,
    },
}

/// A real-valued field on a chart.
#[derive(Clone)]
pub struct ScalarField {
    label: Arc<str>,
    dim: Option<usize>,
    kind: Kind,
    config: DifferentiationConfig,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("mode", &self.derivative_mode())
            .finish()
    }
}

impl ScalarField {
    /// A constant field, valid in every dimension.
    pub fn constant(c: f64) -> Self {
        Self {
            label: Arc::from("constant"),
            dim: None,
            kind: Kind::Constant(c),
            config: DifferentiationConfig::default(),
        }
    }

    /// A field whose partials are obtained by central differences.
    pub fn from_fn<F>(dim: usize, label: &str, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: Arc::from(label),
            dim: Some(dim),
            kind: Kind::General {
                value: Arc::new(move |x| Ok(f(x))),
                partial: None,
                domain: None,
            },
            config: DifferentiationConfig::default(),
        }
    }

    /// A field whose evaluation may fail; partials by central differences.
    pub fn try_from_fn<F>(dim: usize, label: &str, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            label: Arc::from(label),
            dim: Some(dim),
            kind: Kind::General {
                value: Arc::new(f),
                partial: None,
                domain: None,
            },
            config: DifferentiationConfig::default(),
        }
    }

    /// A field with analytic partials `df(i, x) = ∂_i f(x)`.
    pub fn with_partials<F, D>(dim: usize, label: &str, f: F, df: D) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        D: Fn(usize, &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: Arc::from(label),
            dim: Some(dim),
            kind: Kind::General {
                value: Arc::new(move |x| Ok(f(x))),
                partial: Some(Arc::new(move |i, x| Ok(df(i, x)))),
                domain: None,
            },
            config: DifferentiationConfig::default(),
        }
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        Self::with_partials(
            dim,
            "coordinate",
            move |x| x[i],
            move |j, _| if j == i { 1.0 } else { 0.0 },
        )
    }

    /// `Σ x_i²`, with exact partials.
    pub fn sum_of_squares(dim: usize) -> Self {
        Self::with_partials(
            dim,
            "sum_of_squares",
            |x| x.iter().map(|v| v * v).sum(),
            |i, x| 2.0 * x[i],
        )
    }

    /// Restricts the field to points satisfying `pred`; evaluation elsewhere fails.
    pub fn with_domain<P>(mut self, pred: P) -> Self
    where
        P: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        if let Kind::General { domain, .. } = &mut self.kind {
            let pred: Arc<DomainFn> = match domain.take() {
                Some(prev) => Arc::new(move |x| prev(x) && pred(x)),
                None => Arc::new(pred),
            };
            *domain = Some(pred);
        }
        self
    }

    pub fn with_config(mut self, config: DifferentiationConfig) -> Self {
        self.config = config;
        self
    }

    /// Drops any analytic partials, forcing central differences.
    pub fn without_exact_partials(mut self) -> Self {
        if let Kind::General { partial, .. } = &mut self.kind {
            *partial = None;
        }
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn config(&self) -> DifferentiationConfig {
        self.config
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.kind {
            Kind::Constant(c) => Some(c),
            Kind::General { .. } => None,
        }
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        match &self.kind {
            Kind::Constant(_) => DerivativeMode::ExactSupplied,
            Kind::General { partial: Some(_), .. } => DerivativeMode::ExactSupplied,
            Kind::General { partial: None, .. } => DerivativeMode::CentralDifference,
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim {
            Some(d) if d != n => Err(GeometryError::DimensionMismatch {
                expected: d,
                actual: n,
            }),
            _ => Ok(()),
        }
    }

    fn in_domain(&self, x: &[f64]) -> Result<()> {
        if let Kind::General {
            domain: Some(pred), ..
        } = &self.kind
        {
            if !pred(x) {
                return Err(GeometryError::OutOfDomain {
                    what: self.label.to_string(),
                    point: x.to_vec(),
                });
            }
        }
        Ok(())
    }

    fn finite(&self, v: f64, x: &[f64]) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeometryError::NonFinite {
                what: self.label.to_string(),
                point: x.to_vec(),
            })
        }
    }

    pub(crate) fn value_at(&self, x: &[f64]) -> Result<f64> {
        match &self.kind {
            Kind::Constant(c) => Ok(*c),
            Kind::General { value, .. } => {
                self.check_dim(x.len())?;
                self.in_domain(x)?;
                let v = value(x)?;
                self.finite(v, x)
            }
        }
    }

    fn central_difference(&self, i: usize, x: &[f64], h: f64) -> Result<f64> {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        Ok((self.value_at(&xp)? - self.value_at(&xm)?) / (2.0 * h))
    }

    /// Central-difference partial, ignoring any analytic partials.
    pub(crate) fn fd_partial_at(&self, i: usize, x: &[f64]) -> Result<f64> {
        let h = self.config.fd_step;
        let d = if self.config.richardson {
            let coarse = self.central_difference(i, x, h)?;
            let fine = self.central_difference(i, x, 0.5 * h)?;
            (4.0 * fine - coarse) / 3.0
        } else {
            self.central_difference(i, x, h)?
        };
        self.finite(d, x)
    }

    pub(crate) fn partial_at(&self, i: usize, x: &[f64]) -> Result<f64> {
        if i >= x.len() {
            return Err(GeometryError::IndexOutOfRange {
                index: i,
                dim: x.len(),
            });
        }
        match &self.kind {
            Kind::Constant(_) => Ok(0.0),
            Kind::General {
                partial: Some(df), ..
            } => {
                self.check_dim(x.len())?;
                self.in_domain(x)?;
                let d = df(i, x)?;
                self.finite(d, x)
            }
            Kind::General { partial: None, .. } => {
                self.check_dim(x.len())?;
                self.in_domain(x)?;
                self.fd_partial_at(i, x)
            }
        }
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        self.value_at(p.coords())
    }

    /// `∂_i` at `p`: analytic when supplied, central difference otherwise.
    pub fn partial(&self, i: usize, p: &Point) -> Result<f64> {
        self.partial_at(i, p.coords())
    }

    /// `∂_i ∂_j` at `p`, by differencing the first partial `∂_j` along `e_i`.
    pub fn second_partial(&self, i: usize, j: usize, p: &Point) -> Result<f64> {
        self.partial_field(j).partial(i, p)
    }

    /// Largest relative gap between the supplied partials and central
    /// differences over `probes`. Zero for central-difference fields.
    pub fn partials_discrepancy(&self, probes: &[Point]) -> Result<f64> {
        if self.derivative_mode() == DerivativeMode::CentralDifference {
            return Ok(0.0);
        }
        let mut worst: f64 = 0.0;
        for p in probes {
            for i in 0..p.dim() {
                let exact = self.partial(i, p)?;
                let fd = self.fd_partial_at(i, p.coords())?;
                worst = worst.max((exact - fd).abs() / exact.abs().max(1.0));
            }
        }
        Ok(worst)
    }

    fn exact_partial(&self) -> Option<Arc<PartialFn>> {
        match &self.kind {
            Kind::Constant(_) => Some(Arc::new(|_, _| Ok(0.0))),
            Kind::General { partial, .. } => partial.as_ref().map(|_| {
                let me = self.clone();
                Arc::new(move |i: usize, x: &[f64]| me.partial_at(i, x)) as Arc<PartialFn>
            }),
        }
    }

    fn composite(
        label: &str,
        dim: Option<usize>,
        config: DifferentiationConfig,
        value: Arc<ValueFn>,
        partial: Option<Arc<PartialFn>>,
    ) -> Self {
        Self {
            label: Arc::from(label),
            dim,
            kind: Kind::General {
                value,
                partial,
                domain: None,
            },
            config,
        }
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => return ScalarField::constant(a + b),
            (Some(a), None) if a == 0.0 => return other.clone(),
            (None, Some(b)) if b == 0.0 => return self.clone(),
            _ => {}
        }
        let (a, b) = (self.clone(), other.clone());
        let value: Arc<ValueFn> = Arc::new(move |x| Ok(a.value_at(x)? + b.value_at(x)?));
        let partial = match (self.exact_partial(), other.exact_partial()) {
            (Some(da), Some(db)) => {
                Some(Arc::new(move |i: usize, x: &[f64]| Ok(da(i, x)? + db(i, x)?)) as Arc<PartialFn>)
            }
            _ => None,
        };
        Self::composite("sum", self.dim.or(other.dim), self.config, value, partial)
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.add(&other.scale(-1.0))
    }

    /// Pointwise product. A constant zero factor annihilates the other operand.
    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => return ScalarField::constant(a * b),
            (Some(a), None) => return other.scale(a),
            (None, Some(b)) => return self.scale(b),
            _ => {}
        }
        let (a, b) = (self.clone(), other.clone());
        let value: Arc<ValueFn> = Arc::new(move |x| Ok(a.value_at(x)? * b.value_at(x)?));
        let partial = match (self.exact_partial(), other.exact_partial()) {
            (Some(da), Some(db)) => {
                let (a, b) = (self.clone(), other.clone());
                Some(Arc::new(move |i: usize, x: &[f64]| {
                    Ok(da(i, x)? * b.value_at(x)? + a.value_at(x)? * db(i, x)?)
                }) as Arc<PartialFn>)
            }
            _ => None,
        };
        Self::composite("product", self.dim.or(other.dim), self.config, value, partial)
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        if c == 0.0 {
            return ScalarField::constant(0.0);
        }
        if c == 1.0 {
            return self.clone();
        }
        if let Some(a) = self.as_constant() {
            return ScalarField::constant(c * a);
        }
        let a = self.clone();
        let value: Arc<ValueFn> = Arc::new(move |x| Ok(c * a.value_at(x)?));
        let partial = self.exact_partial().map(|da| {
            Arc::new(move |i: usize, x: &[f64]| Ok(c * da(i, x)?)) as Arc<PartialFn>
        });
        Self::composite("scaled", self.dim, self.config, value, partial)
    }

    /// `1/f`; requires `f > 0`.
    pub fn reciprocal(&self) -> ScalarField {
        if let Some(c) = self.as_constant() {
            if c > 0.0 {
                return ScalarField::constant(1.0 / c);
            }
        }
        let a = self.clone();
        let positive = move |x: &[f64]| -> Result<f64> {
            let v = a.value_at(x)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(GeometryError::OutOfDomain {
                    what: "reciprocal of a non-positive value".into(),
                    point: x.to_vec(),
                })
            }
        };
        let positive = Arc::new(positive);
        let pv = positive.clone();
        let value: Arc<ValueFn> = Arc::new(move |x| Ok(1.0 / pv(x)?));
        let partial = self.exact_partial().map(|da| {
            Arc::new(move |i: usize, x: &[f64]| {
                let v = positive(x)?;
                Ok(-da(i, x)? / (v * v))
            }) as Arc<PartialFn>
        });
        Self::composite("reciprocal", self.dim, self.config, value, partial)
    }

    /// `f^t`. Non-integer `t` requires `f > 0`.
    pub fn powf(&self, t: f64) -> ScalarField {
        if t == 0.0 {
            return ScalarField::constant(1.0);
        }
        if t == 1.0 {
            return self.clone();
        }
        if let Some(Ok(c)) = self.as_constant().map(|c| real_power(c, t, &[])) {
            return ScalarField::constant(c);
        }
        let a = self.clone();
        let value: Arc<ValueFn> = Arc::new(move |x| real_power(a.value_at(x)?, t, x));
        let partial = self.exact_partial().map(|da| {
            let a = self.clone();
            Arc::new(move |i: usize, x: &[f64]| {
                let v = a.value_at(x)?;
                Ok(t * real_power(v, t - 1.0, x)? * da(i, x)?)
            }) as Arc<PartialFn>
        });
        Self::composite("power", self.dim, self.config, value, partial)
    }

    pub fn sqrt(&self) -> ScalarField {
        self.powf(0.5)
    }

    pub fn exp(&self) -> ScalarField {
        if let Some(c) = self.as_constant() {
            return ScalarField::constant(c.exp());
        }
        let a = self.clone();
        let value: Arc<ValueFn> = Arc::new(move |x| Ok(a.value_at(x)?.exp()));
        let partial = self.exact_partial().map(|da| {
            let a = self.clone();
            Arc::new(move |i: usize, x: &[f64]| Ok(a.value_at(x)?.exp() * da(i, x)?))
                as Arc<PartialFn>
        });
        Self::composite("exp", self.dim, self.config, value, partial)
    }

    /// The field `∂_i f`. Its own partials are central differences of `∂_i f`.
    pub fn partial_field(&self, i: usize) -> ScalarField {
        if self.as_constant().is_some() {
            return ScalarField::constant(0.0);
        }
        let a = self.clone();
        let value: Arc<ValueFn> = Arc::new(move |x| a.partial_at(i, x));
        Self::composite("partial", self.dim, self.config, value, None)
    }
}

fn real_power(v: f64, t: f64, x: &[f64]) -> Result<f64> {
    if t.fract() == 0.0 && t.abs() < i32::MAX as f64 {
        Ok(v.powi(t as i32))
    } else if v > 0.0 {
        Ok(v.powf(t))
    } else {
        Err(GeometryError::OutOfDomain {
            what: format!("non-integer power {t} of a non-positive value"),
            point: x.to_vec(),
        })
    }
}

/// Uniform probes in `[-half_width, half_width]^dim`, rejecting points with
/// norm below `min_norm`.
pub fn sample_box<R: Rng>(
    rng: &mut R,
    dim: usize,
    count: usize,
    half_width: f64,
    min_norm: f64,
) -> Vec<Point> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<f64> = (0..dim)
            .map(|_| rng.gen_range(-half_width..=half_width))
            .collect();
        let p = Point { coords };
        if p.norm() >= min_norm {
            out.push(p);
        }
    }
    out
}

/// Uniform probes in the box `[lo, hi]^dim`.
pub fn sample_cube<R: Rng>(rng: &mut R, dim: usize, count: usize, lo: f64, hi: f64) -> Vec<Point> {
    (0..count)
        .map(|_| Point {
            coords: (0..dim).map(|_| rng.gen_range(lo..hi)).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn point_rejects_non_finite_and_empty() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn eval_examples() {
        let f = ScalarField::sum_of_squares(3);
        assert_eq!(f.eval(&pt(&[1.0, 0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(f.eval(&pt(&[1.0, 2.0, 2.0])).unwrap(), 9.0);
        assert_eq!(ScalarField::constant(3.0).eval(&pt(&[7.0, -1.0])).unwrap(), 3.0);
    }

    #[test]
    fn eval_outside_domain_is_an_error() {
        let f = ScalarField::sum_of_squares(2)
            .reciprocal()
            .with_domain(|x| x.iter().any(|v| *v != 0.0));
        assert!(matches!(
            f.eval(&Point::origin(2)),
            Err(GeometryError::OutOfDomain { .. })
        ));
        // the reciprocal guard also catches it on its own
        let g = ScalarField::sum_of_squares(2).reciprocal();
        assert!(g.eval(&Point::origin(2)).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let f = ScalarField::sum_of_squares(3);
        assert!(matches!(
            f.eval(&pt(&[1.0, 2.0])),
            Err(GeometryError::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn partial_examples() {
        let f = ScalarField::sum_of_squares(2);
        assert_eq!(f.partial(0, &pt(&[1.0, 2.0])).unwrap(), 2.0);
        let fd = f.clone().without_exact_partials();
        assert!((fd.partial(0, &pt(&[1.0, 2.0])).unwrap() - 2.0).abs() < 1e-8);

        assert_eq!(ScalarField::constant(5.0).partial(1, &pt(&[0.3, 0.4])).unwrap(), 0.0);

        let xy = ScalarField::from_fn(2, "xy", |x| x[0] * x[1]);
        assert!((xy.partial(1, &pt(&[3.0, 5.0])).unwrap() - 3.0).abs() < 1e-8);
    }

    #[test]
    fn partial_index_out_of_range() {
        let f = ScalarField::sum_of_squares(2);
        assert!(matches!(
            f.partial(2, &pt(&[1.0, 2.0])),
            Err(GeometryError::IndexOutOfRange { index: 2, dim: 2 })
        ));
    }

    #[test]
    fn non_finite_values_are_errors() {
        let f = ScalarField::from_fn(1, "log", |x| x[0].ln());
        assert!(matches!(
            f.eval(&pt(&[-1.0])),
            Err(GeometryError::NonFinite { .. })
        ));
    }

    #[test]
    fn power_examples() {
        let f = ScalarField::sum_of_squares(2);
        let p = pt(&[0.0, 2.0]);
        assert_eq!(f.powf(0.0).as_constant(), Some(1.0));
        assert_eq!(f.powf(1.0).eval(&p).unwrap(), f.eval(&p).unwrap());
        assert_eq!(f.powf(0.5).eval(&p).unwrap(), 2.0);
    }

    #[test]
    fn non_integer_power_of_negative_value_fails() {
        let f = ScalarField::coordinate(1, 0);
        assert!(f.powf(0.5).eval(&pt(&[-4.0])).is_err());
        assert_eq!(f.powf(2.0).eval(&pt(&[-4.0])).unwrap(), 16.0);
        assert!(f.reciprocal().eval(&pt(&[-4.0])).is_err());
    }

    #[test]
    fn chain_rule_matches_central_difference() {
        let f = ScalarField::sum_of_squares(2).add(&ScalarField::constant(1.0));
        let g = f.powf(0.37);
        let p = pt(&[0.4, -1.3]);
        for i in 0..2 {
            let exact = g.partial(i, &p).unwrap();
            let expected = 0.37 * f.eval(&p).unwrap().powf(-0.63) * f.partial(i, &p).unwrap();
            assert!((exact - expected).abs() < 1e-14);
        }
        assert!(g.partials_discrepancy(&[p]).unwrap() < PARTIALS_CONSISTENCY_TOL);
    }

    #[test]
    fn discrepancy_flags_wrong_partials() {
        let bad = ScalarField::with_partials(1, "bad", |x| x[0] * x[0], |_, x| 3.0 * x[0]);
        assert!(bad.partials_discrepancy(&[pt(&[1.0])]).unwrap() > 0.3);
    }

    #[test]
    fn combinators_keep_exact_mode() {
        let x = ScalarField::coordinate(2, 0);
        let y = ScalarField::coordinate(2, 1);
        let h = x.mul(&y).add(&x.exp()).reciprocal().powf(1.5);
        assert_eq!(h.derivative_mode(), DerivativeMode::ExactSupplied);
        let mixed = h.mul(&ScalarField::from_fn(2, "fd", |x| x[0]));
        assert_eq!(mixed.derivative_mode(), DerivativeMode::CentralDifference);
    }

    #[test]
    fn constant_folding() {
        let z = ScalarField::constant(0.0);
        let f = ScalarField::coordinate(2, 0);
        assert_eq!(z.mul(&f).as_constant(), Some(0.0));
        assert_eq!(ScalarField::constant(2.0).add(&ScalarField::constant(3.0)).as_constant(), Some(5.0));
        assert!(f.partial_field(1).eval(&pt(&[1.0, 1.0])).unwrap() == 0.0);
    }

    #[test]
    fn second_partials_by_differencing() {
        let f = ScalarField::with_partials(
            2,
            "sin x cos y",
            |x| x[0].sin() * x[1].cos(),
            |i, x| {
                if i == 0 {
                    x[0].cos() * x[1].cos()
                } else {
                    -x[0].sin() * x[1].sin()
                }
            },
        );
        let p = pt(&[0.3, 0.8]);
        let dxy = f.second_partial(0, 1, &p).unwrap();
        assert!((dxy - (-(0.3f64).cos() * (0.8f64).sin())).abs() < 1e-9);
    }

    #[test]
    fn richardson_improves_accuracy() {
        let f = ScalarField::from_fn(1, "exp", |x| (3.0 * x[0]).exp())
            .with_config(DifferentiationConfig::new(1e-2, false).unwrap());
        let r = f.clone().with_config(DifferentiationConfig::new(1e-2, true).unwrap());
        let p = pt(&[0.5]);
        let exact = 3.0 * 1.5f64.exp();
        let e_plain = (f.partial(0, &p).unwrap() - exact).abs();
        let e_rich = (r.partial(0, &p).unwrap() - exact).abs();
        assert!(e_rich < e_plain * 1e-2);
    }

    #[test]
    fn config_validation() {
        assert!(DifferentiationConfig::new(0.0, false).is_err());
        assert!(DifferentiationConfig::new(0.1, false).is_err());
        assert!(DifferentiationConfig::new(1e-2, true).is_ok());
    }

    #[test]
    fn evaluation_is_bit_identical() {
        let f = ScalarField::sum_of_squares(3).add(&ScalarField::constant(0.5)).powf(-0.7).exp();
        let p = pt(&[0.1, -0.2, 1.7]);
        let a = f.eval(&p).unwrap();
        let b = f.eval(&p).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn sampler_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = sample_box(&mut rng, 3, 200, 2.0, 0.1);
        assert_eq!(pts.len(), 200);
        assert!(pts.iter().all(|p| p.norm() >= 0.1 && p.coords().iter().all(|c| c.abs() <= 2.0)));
    }
}
