//! Matrix-valued differential forms in a closed coframe.
//!
//! Every form is expanded in the coordinate coframe `θ^a = dx^a`, which is
//! closed (`dθ^a = 0`) by construction; there is no way to build a form
//! over a non-closed coframe. Two-form coefficients live on ordered pairs
//! `a < b` only, and every product is normalized on the spot, so equality
//! tests never have to worry about `θ^a∧θ^b = −θ^b∧θ^a`.

use nalgebra::DMatrix;

use crate::error::{GeometryError, Result};
use crate::fields::{Point, ScalarField};
use crate::metrics::DiagonalMetric;
use crate::residual::Residual;

/// Relative tolerance on `|M + Mᵀ|` accepted by [`pfaffian`].
pub const PFAFFIAN_SKEW_TOL: f64 = 1e-10;

/// Ordered pairs `(a, b)`, `a < b`, in lexicographic order.
pub fn ordered_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect()
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Square matrices of forms: anything whose `(i, j)` entry is a list of
/// coefficient fields over a fixed basis of forms.
pub trait FormMatrix {
    fn rank(&self) -> usize;
    fn basis_len(&self) -> usize;
    fn coefficient(&self, i: usize, j: usize, slot: usize) -> &ScalarField;

    /// The coefficient matrices `(M_slot)_ij` at `p`, one per basis form.
    fn components_at(&self, p: &Point) -> Result<Vec<DMatrix<f64>>> {
        let r = self.rank();
        (0..self.basis_len())
            .map(|s| {
                let mut m = DMatrix::zeros(r, r);
                for i in 0..r {
                    for j in 0..r {
                        m[(i, j)] = self.coefficient(i, j, s).eval(p)?;
                    }
                }
                Ok(m)
            })
            .collect()
    }
}

/// `max |(M + Mᵀ)` coefficients`|` over `probes`.
pub fn skewness_defect<M: FormMatrix + ?Sized>(m: &M, probes: &[Point]) -> Result<Residual> {
    let mut res = Residual::zero();
    for p in probes {
        let worst = m
            .components_at(p)?
            .iter()
            .map(|c| (c + c.transpose()).amax())
            .fold(0.0, f64::max);
        res.observe(worst, p);
    }
    Ok(res)
}

/// `ω^i_j = Σ_a c^i_{j,a} θ^a`.
#[derive(Clone, Debug)]
pub struct OneFormMatrix {
    rank: usize,
    base: usize,
    coeff: Vec<ScalarField>,
}

impl OneFormMatrix {
    pub fn from_fn<F>(rank: usize, base: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> ScalarField,
    {
        if rank == 0 || base == 0 {
            return Err(GeometryError::Shape("rank and base dimension must be positive".into()));
        }
        let mut coeff = Vec::with_capacity(rank * rank * base);
        for i in 0..rank {
            for j in 0..rank {
                for a in 0..base {
                    coeff.push(f(i, j, a));
                }
            }
        }
        Ok(Self { rank, base, coeff })
    }

    pub fn zeros(rank: usize, base: usize) -> Result<Self> {
        Self::from_fn(rank, base, |_, _, _| ScalarField::constant(0.0))
    }

    /// Constant coefficients `c[i][j][a]`.
    pub fn constant(c: &[Vec<Vec<f64>>]) -> Result<Self> {
        let rank = c.len();
        let base = c.first().and_then(|row| row.first()).map_or(0, Vec::len);
        if c.iter().any(|row| row.len() != rank || row.iter().any(|e| e.len() != base)) {
            return Err(GeometryError::Shape("ragged coefficient array".into()));
        }
        Self::from_fn(rank, base, |i, j, a| ScalarField::constant(c[i][j][a]))
    }

    /// `ω = [[kθ², kθ¹], [kθ¹, 0]]` on the torus.
    pub fn torus_connection_form(k: f64) -> Self {
        Self::constant(&[
            vec![vec![0.0, k], vec![k, 0.0]],
            vec![vec![k, 0.0], vec![0.0, 0.0]],
        ])
        .expect("fixed shape")
    }

    /// Levi-Civita connection form of a diagonal metric `E dx² + G dy²` in
    /// its orthonormal coframe `(√E dx, √G dy)`:
    /// `ω^1_2 = −ω^2_1 = (∂_y√E/√G) dx − (∂_x√G/√E) dy`.
    pub fn levi_civita_orthonormal(g: &DiagonalMetric) -> Result<Self> {
        if g.dim() != 2 {
            return Err(GeometryError::DimensionMismatch { expected: 2, actual: g.dim() });
        }
        let root_e = g.entry(0).sqrt();
        let root_g = g.entry(1).sqrt();
        let a = root_e.partial_field(1).mul(&root_g.reciprocal());
        let b = root_g.partial_field(0).mul(&root_e.reciprocal()).scale(-1.0);
        let zero = ScalarField::constant(0.0);
        Self::from_fn(2, 2, |i, j, s| match (i, j) {
            (0, 1) => [a.clone(), b.clone()][s].clone(),
            (1, 0) => [a.scale(-1.0), b.scale(-1.0)][s].clone(),
            _ => zero.clone(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base(&self) -> usize {
        self.base
    }

    /// Coefficient of `θ^a` in `ω^i_j`.
    pub fn get(&self, i: usize, j: usize, a: usize) -> &ScalarField {
        &self.coeff[(i * self.rank + j) * self.base + a]
    }

    /// `(ω∧η)^i_j = Σ_m ω^i_m ∧ η^m_j`.
    pub fn wedge(&self, other: &OneFormMatrix) -> Result<TwoFormMatrix> {
        if self.rank != other.rank || self.base != other.base {
            return Err(GeometryError::Shape(format!(
                "cannot wedge {0}x{0} over {1} with {2}x{2} over {3}",
                self.rank, self.base, other.rank, other.base
            )));
        }
        let (r, n) = (self.rank, self.base);
        let pairs = ordered_pairs(n);
        TwoFormMatrix::from_fn(r, n, |i, j, s| {
            let (a, b) = pairs[s];
            let mut acc = ScalarField::constant(0.0);
            for m in 0..r {
                // θ^a∧θ^b − θ^b∧θ^a contributions
                let ab = self.get(i, m, a).mul(other.get(m, j, b));
                let ba = self.get(i, m, b).mul(other.get(m, j, a));
                acc = acc.add(&ab).sub(&ba);
            }
            acc
        })
    }

    /// `d(c θ^a) = Σ_b ∂_b c θ^b∧θ^a` in the closed coframe.
    pub fn exterior_derivative(&self) -> TwoFormMatrix {
        let (r, n) = (self.rank, self.base);
        let pairs = ordered_pairs(n);
        TwoFormMatrix::from_fn(r, n, |i, j, s| {
            let (a, b) = pairs[s];
            // coefficient of θ^a∧θ^b: ∂_a c_b − ∂_b c_a
            self.get(i, j, b)
                .partial_field(a)
                .sub(&self.get(i, j, a).partial_field(b))
        })
        .expect("shape inherited")
    }

    /// `Ω = dω + ω∧ω`.
    pub fn curvature_form(&self) -> Result<TwoFormMatrix> {
        self.exterior_derivative().add(&self.wedge(self)?)
    }

    /// `T^i = dθ^i + ω^i_j∧θ^j` with the bundle frame identified with the coframe.
    pub fn torsion_forms(&self) -> Result<Vec<TwoForm>> {
        let (r, n) = (self.rank, self.base);
        if r != n {
            return Err(GeometryError::Shape(format!(
                "torsion needs rank = base dimension, got {r} and {n}"
            )));
        }
        let pairs = ordered_pairs(n);
        Ok((0..r)
            .map(|i| {
                let coeff = pairs
                    .iter()
                    .map(|&(a, b)| {
                        // ω^i_b∧θ^b contributes c^i_{b,a} θ^a∧θ^b; ω^i_a∧θ^a contributes −c^i_{a,b}
                        self.get(i, b, a).sub(self.get(i, a, b))
                    })
                    .collect();
                TwoForm { base: n, coeff }
            })
            .collect())
    }
}

impl FormMatrix for OneFormMatrix {
    fn rank(&self) -> usize {
        self.rank
    }

    fn basis_len(&self) -> usize {
        self.base
    }

    fn coefficient(&self, i: usize, j: usize, slot: usize) -> &ScalarField {
        self.get(i, j, slot)
    }
}

/// A scalar 2-form `Σ_{a<b} c_{ab} θ^a∧θ^b`.
#[derive(Clone, Debug)]
pub struct TwoForm {
    base: usize,
    coeff: Vec<ScalarField>,
}

impl TwoForm {
    pub fn base(&self) -> usize {
        self.base
    }

    /// Coefficient of `θ^a∧θ^b`, `a < b`.
    pub fn get(&self, a: usize, b: usize) -> &ScalarField {
        &self.coeff[pair_index(self.base, a, b)]
    }

    /// Worst coefficient magnitude over `probes`.
    pub fn max_abs(&self, probes: &[Point]) -> Result<Residual> {
        let mut res = Residual::zero();
        for p in probes {
            let mut worst: f64 = 0.0;
            for c in &self.coeff {
                worst = worst.max(c.eval(p)?.abs());
            }
            res.observe(worst, p);
        }
        Ok(res)
    }
}

/// `Ω^i_j = Σ_{a<b} c^i_{j,ab} θ^a∧θ^b`.
#[derive(Clone, Debug)]
pub struct TwoFormMatrix {
    rank: usize,
    base: usize,
    coeff: Vec<ScalarField>,
}

impl TwoFormMatrix {
    pub fn from_fn<F>(rank: usize, base: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> ScalarField,
    {
        if rank == 0 || base < 2 {
            return Err(GeometryError::Shape(
                "two-forms need rank >= 1 and base dimension >= 2".into(),
            ));
        }
        let slots = base * (base - 1) / 2;
        let mut coeff = Vec::with_capacity(rank * rank * slots);
        for i in 0..rank {
            for j in 0..rank {
                for s in 0..slots {
                    coeff.push(f(i, j, s));
                }
            }
        }
        Ok(Self { rank, base, coeff })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base(&self) -> usize {
        self.base
    }

    fn slots(&self) -> usize {
        self.base * (self.base - 1) / 2
    }

    /// Coefficient of `θ^a∧θ^b` (`a < b`) in `Ω^i_j`.
    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> &ScalarField {
        &self.coeff[(i * self.rank + j) * self.slots() + pair_index(self.base, a, b)]
    }

    fn slot(&self, i: usize, j: usize, s: usize) -> &ScalarField {
        &self.coeff[(i * self.rank + j) * self.slots() + s]
    }

    pub fn add(&self, other: &TwoFormMatrix) -> Result<TwoFormMatrix> {
        if self.rank != other.rank || self.base != other.base {
            return Err(GeometryError::Shape("two-form matrices differ in shape".into()));
        }
        Self::from_fn(self.rank, self.base, |i, j, s| self.slot(i, j, s).add(other.slot(i, j, s)))
    }

    /// Worst coefficient difference from `other` over `probes`.
    pub fn max_difference(&self, other: &TwoFormMatrix, probes: &[Point]) -> Result<Residual> {
        if self.rank != other.rank || self.base != other.base {
            return Err(GeometryError::Shape("two-form matrices differ in shape".into()));
        }
        let mut res = Residual::zero();
        for p in probes {
            let worst = self
                .components_at(p)?
                .iter()
                .zip(other.components_at(p)?)
                .map(|(a, b)| (a - b).amax())
                .fold(0.0, f64::max);
            res.observe(worst, p);
        }
        Ok(res)
    }

    /// `A^{-1} Ω A` for a constant invertible `A`.
    pub fn conjugate(&self, a: &DMatrix<f64>) -> Result<TwoFormMatrix> {
        let r = self.rank;
        if a.nrows() != r || a.ncols() != r {
            return Err(GeometryError::DimensionMismatch { expected: r, actual: a.nrows() });
        }
        let inv = a.clone().try_inverse().ok_or(GeometryError::SingularMatrix)?;
        Self::from_fn(r, self.base, |i, j, s| {
            let mut acc = ScalarField::constant(0.0);
            for p in 0..r {
                for q in 0..r {
                    acc = acc.add(&self.slot(p, q, s).scale(inv[(i, p)] * a[(q, j)]));
                }
            }
            acc
        })
    }

    /// `Pf(Ω)` for a rank-2 matrix over a surface; its only coefficient is
    /// `Ω^1_2`. Evaluating the result fails wherever `Ω` is not skew.
    pub fn pfaffian_form(&self) -> Result<TopForm2D> {
        if self.rank != 2 || self.base != 2 {
            return Err(GeometryError::Shape(format!(
                "pfaffian form needs rank 2 over a surface, got rank {} over dimension {}",
                self.rank, self.base
            )));
        }
        let omega = self.clone();
        let coeff = ScalarField::try_from_fn(2, "pfaffian", move |x| {
            let p = Point::new(x.to_vec())?;
            let m = &omega.components_at(&p)?[0];
            pfaffian(m)
        });
        Ok(TopForm2D::new(coeff))
    }
}

impl FormMatrix for TwoFormMatrix {
    fn rank(&self) -> usize {
        self.rank
    }

    fn basis_len(&self) -> usize {
        self.slots()
    }

    fn coefficient(&self, i: usize, j: usize, slot: usize) -> &ScalarField {
        self.slot(i, j, slot)
    }
}

/// `c θ^1∧θ^2` on a surface.
#[derive(Clone, Debug)]
pub struct TopForm2D {
    coeff: ScalarField,
}

impl TopForm2D {
    pub fn new(coeff: ScalarField) -> Self {
        Self { coeff }
    }

    pub fn coefficient(&self) -> &ScalarField {
        &self.coeff
    }

    pub fn eval(&self, p: &Point) -> Result<f64> {
        self.coeff.eval(p)
    }
}

/// Pfaffian of an even skew-symmetric matrix by expansion along the first row,
/// `Pf(M) = Σ_{j>1} (−1)^j m_{1j} Pf(M_{1̂ĵ})`, normalized so that
/// `Pf([[0, a], [−a, 0]]) = a`.
pub fn pfaffian(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(GeometryError::Shape(format!("{}x{} matrix is not square", n, m.ncols())));
    }
    if n % 2 == 1 {
        return Err(GeometryError::Shape(format!("pfaffian of odd size {n}")));
    }
    let defect = (m + m.transpose()).amax();
    if defect > PFAFFIAN_SKEW_TOL * m.amax().max(1.0) {
        return Err(GeometryError::NotSkew { defect });
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(pfaffian_rec(m, &idx))
}

fn pfaffian_rec(m: &DMatrix<f64>, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    let first = idx[0];
    let mut total = 0.0;
    let mut rest = Vec::with_capacity(idx.len() - 2);
    for q in 1..idx.len() {
        let entry = m[(first, idx[q])];
        if entry == 0.0 {
            continue;
        }
        rest.clear();
        rest.extend(idx[1..].iter().enumerate().filter(|(pos, _)| pos + 1 != q).map(|(_, &v)| v));
        let sign = if q % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * entry * pfaffian_rec(m, &rest);
    }
    total
}
