//! Pointwise multilinear algebra on one `n`-dimensional tangent space.
//!
//! Tensors are covariant `(0,k)` arrays stored densely in row-major order over
//! all `n^k` index tuples. Endomorphisms are `(1,1)` matrices acting on the
//! coordinate basis `e_0..e_{n-1}`: `H e_c = sum_m H[m][c] e_m`.
//!
//! Everything here is independent of any chart; a metric enters only as an
//! explicit symmetric `(0,2)` argument.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::linalg;

/// Relative tolerance used when a constructor checks a declared symmetry.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("component count {found} does not match dim^rank = {expected}")]
    ComponentCount { expected: usize, found: usize },
    #[error("tensor is not symmetric (violation {0:.3e})")]
    NotSymmetric(f64),
    #[error("tensor violates generalized curvature symmetries (violation {0:.3e})")]
    NotCurvature(f64),
    #[error("operation needs rank >= {min}, found {found}")]
    RankTooSmall { min: usize, found: usize },
    #[error("metric is singular")]
    SingularMetric,
    #[error("dimension must be positive")]
    ZeroDimension,
}

/// Declared symmetry class of a [`DenseTensor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    None,
    /// Symmetric `(0,2)` tensor.
    Sym2,
    /// `(0,4)` tensor with `D_abcd = -D_bacd = -D_abdc = D_cdab`.
    Curv4,
}

/// Dense covariant tensor of rank `k` over an `n`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dim: usize,
    rank: usize,
    data: Vec<f64>,
    symmetry: Symmetry,
}

impl DenseTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self {
            dim,
            rank,
            data: vec![0.0; dim.pow(rank as u32)],
            symmetry: match rank {
                2 => Symmetry::Sym2,
                4 => Symmetry::Curv4,
                _ => Symmetry::None,
            },
        }
    }

    pub fn scalar(value: f64) -> Self {
        Self { dim: 1, rank: 0, data: vec![value], symmetry: Symmetry::None }
    }

    /// Untagged tensor from raw row-major components.
    pub fn from_vec(dim: usize, rank: usize, data: Vec<f64>) -> Result<Self, TensorError> {
        if dim == 0 {
            return Err(TensorError::ZeroDimension);
        }
        let expected = dim.pow(rank as u32);
        if data.len() != expected {
            return Err(TensorError::ComponentCount { expected, found: data.len() });
        }
        Ok(Self { dim, rank, data, symmetry: Symmetry::None })
    }

    /// Untagged tensor whose component at each index tuple is `f(index)`.
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let len = dim.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut data = Vec::with_capacity(len);
        for flat in 0..len {
            decode(flat, dim, &mut idx);
            data.push(f(&idx));
        }
        Self { dim, rank, data, symmetry: Symmetry::None }
    }

    /// Symmetric `(0,2)` tensor from an `n x n` row-major array.
    ///
    /// The input is checked for symmetry (relative [`SYMMETRY_TOL`]) and then
    /// symmetrized exactly.
    pub fn sym2(dim: usize, data: Vec<f64>) -> Result<Self, TensorError> {
        Self::from_vec(dim, 2, data)?.into_sym2()
    }

    pub fn sym2_from_fn(dim: usize, f: impl FnMut(&[usize]) -> f64) -> Result<Self, TensorError> {
        Self::from_fn(dim, 2, f).into_sym2()
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut t = Self::zeros(n, 2);
        for (i, v) in values.iter().enumerate() {
            t.data[i * n + i] = *v;
        }
        t
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    /// Symmetric tensor `u ⊗ u`.
    pub fn outer_square(u: &[f64]) -> Self {
        let n = u.len();
        let mut t = Self::zeros(n, 2);
        for i in 0..n {
            for j in 0..n {
                t.data[i * n + j] = u[i] * u[j];
            }
        }
        t
    }

    pub fn into_sym2(mut self) -> Result<Self, TensorError> {
        if self.rank != 2 {
            return Err(TensorError::RankMismatch { expected: 2, found: self.rank });
        }
        let n = self.dim;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (self.data[i * n + j], self.data[j * n + i]);
                worst = worst.max((a - b).abs());
                let m = 0.5 * (a + b);
                self.data[i * n + j] = m;
                self.data[j * n + i] = m;
            }
        }
        if worst > SYMMETRY_TOL * scale {
            return Err(TensorError::NotSymmetric(worst / scale));
        }
        self.symmetry = Symmetry::Sym2;
        Ok(self)
    }

    /// Tag a rank-4 tensor as a generalized curvature tensor after checking
    /// the algebraic curvature identities at relative [`SYMMETRY_TOL`].
    pub fn into_curv4(mut self) -> Result<Self, TensorError> {
        if self.rank != 4 {
            return Err(TensorError::RankMismatch { expected: 4, found: self.rank });
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let v = generalized_curvature_violation(&self)?;
        if v > SYMMETRY_TOL * scale {
            return Err(TensorError::NotCurvature(v / scale));
        }
        self.symmetry = Symmetry::Curv4;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    /// Component of a rank-2 tensor.
    #[inline]
    pub fn at2(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn at4(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.data[((i * n + j) * n + k) * n + l]
    }

    /// Overwrite a component; clears the symmetry tag.
    pub fn set(&mut self, idx: &[usize], value: f64) {
        let o = self.offset(idx);
        self.data[o] = value;
        self.symmetry = Symmetry::None;
    }

    /// Euclidean norm of the raw coordinate components.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Componentwise Euclidean inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::DimensionMismatch(self.dim, other.dim));
        }
        if self.rank != other.rank {
            return Err(TensorError::RankMismatch { expected: self.rank, found: other.rank });
        }
        Ok(())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            rank: self.rank,
            data: self.data.iter().map(|x| x * s).collect(),
            symmetry: self.symmetry,
        }
    }

    /// `self + s * other`. Panics on shape mismatch.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (other.dim, other.rank), "tensor shape mismatch");
        Self {
            dim: self.dim,
            rank: self.rank,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
            symmetry: if self.symmetry == other.symmetry { self.symmetry } else { Symmetry::None },
        }
    }

    /// `max |self - other|` over components.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Swap the last two slots; used to check antisymmetry of appended pairs.
    pub fn swap_last_pair(&self) -> Self {
        assert!(self.rank >= 2);
        let n = self.dim;
        let mut out = self.clone();
        let blocks = self.data.len() / (n * n);
        for blk in 0..blocks {
            for a in 0..n {
                for b in 0..n {
                    out.data[blk * n * n + a * n + b] = self.data[blk * n * n + b * n + a];
                }
            }
        }
        out.symmetry = Symmetry::None;
        out
    }

    /// Row-major `n x n` matrix of a rank-2 tensor.
    pub(crate) fn matrix(&self) -> nalgebra::DMatrix<f64> {
        assert_eq!(self.rank, 2);
        nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub(crate) fn from_matrix_sym(m: &nalgebra::DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut t = Self::zeros(n, 2);
        for i in 0..n {
            for j in 0..n {
                t.data[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
        t
    }
}

impl fmt::Display for DenseTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseTensor(n={}, k={}, {:?})", self.dim, self.rank, self.symmetry)
    }
}

impl Add for &DenseTensor {
    type Output = DenseTensor;
    fn add(self, rhs: Self) -> DenseTensor {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &DenseTensor {
    type Output = DenseTensor;
    fn sub(self, rhs: Self) -> DenseTensor {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<&DenseTensor> for f64 {
    type Output = DenseTensor;
    fn mul(self, rhs: &DenseTensor) -> DenseTensor {
        rhs.scale(self)
    }
}

impl Neg for &DenseTensor {
    type Output = DenseTensor;
    fn neg(self) -> DenseTensor {
        self.scale(-1.0)
    }
}

fn decode(mut flat: usize, dim: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

/// A `(1,1)` tensor: `matrix[m * n + c]` is the `e_m` component of `H e_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism {
    dim: usize,
    matrix: Vec<f64>,
}

impl Endomorphism {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, matrix: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |m, c| if m == c { 1.0 } else { 0.0 })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut matrix = Vec::with_capacity(dim * dim);
        for m in 0..dim {
            for c in 0..dim {
                matrix.push(f(m, c));
            }
        }
        Self { dim, matrix }
    }

    pub fn from_vec(dim: usize, matrix: Vec<f64>) -> Result<Self, TensorError> {
        if matrix.len() != dim * dim {
            return Err(TensorError::ComponentCount { expected: dim * dim, found: matrix.len() });
        }
        Ok(Self { dim, matrix })
    }

    /// `mu_X`: the rank-one map `Z -> mu(Z) X`.
    pub fn rank_one(x: &Vector, mu: &OneForm) -> Result<Self, TensorError> {
        if x.0.len() != mu.0.len() {
            return Err(TensorError::DimensionMismatch(x.0.len(), mu.0.len()));
        }
        Ok(Self::from_fn(x.0.len(), |m, c| x.0[m] * mu.0[c]))
    }

    /// `X ∧_A Y`: `Z -> A(Y,Z) X - A(X,Z) Y`, for coordinate vectors `X = e_a`, `Y = e_b`.
    pub fn wedge_basis(a_tensor: &DenseTensor, a: usize, b: usize) -> Self {
        let n = a_tensor.dim();
        Self::from_fn(n, |m, c| {
            let mut v = 0.0;
            if m == a {
                v += a_tensor.at2(b, c);
            }
            if m == b {
                v -= a_tensor.at2(a, c);
            }
            v
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, m: usize, c: usize) -> f64 {
        self.matrix[m * self.dim + c]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|m| (0..self.dim).map(|c| self.at(m, c) * v[c]).sum()).collect()
    }
}

/// Components of a covector in the dual coordinate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm(pub Vec<f64>);

/// Components of a tangent vector in the coordinate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(pub Vec<f64>);

fn require_same_dim(a: usize, b: usize) -> Result<(), TensorError> {
    if a != b {
        Err(TensorError::DimensionMismatch(a, b))
    } else {
        Ok(())
    }
}

fn require_rank(t: &DenseTensor, rank: usize) -> Result<(), TensorError> {
    if t.rank != rank {
        Err(TensorError::RankMismatch { expected: rank, found: t.rank })
    } else {
        Ok(())
    }
}

/// Kulkarni–Nomizu product of two symmetric `(0,2)` tensors:
///
/// `(A∧E)(x1,x2,y1,y2) = A(x1,y2)E(x2,y1) + A(x2,y1)E(x1,y2) - A(x1,y1)E(x2,y2) - A(x2,y2)E(x1,y1)`.
pub fn kn_product(a: &DenseTensor, e: &DenseTensor) -> Result<DenseTensor, TensorError> {
    require_rank(a, 2)?;
    require_rank(e, 2)?;
    require_same_dim(a.dim, e.dim)?;
    if a.symmetry != Symmetry::Sym2 {
        a.clone().into_sym2()?;
    }
    if e.symmetry != Symmetry::Sym2 {
        e.clone().into_sym2()?;
    }
    let mut out = kn_raw(a, e);
    out.symmetry = Symmetry::Curv4;
    Ok(out)
}

/// The product formula applied literally to any pair of rank-2 tensors.
fn kn_raw(a: &DenseTensor, e: &DenseTensor) -> DenseTensor {
    let n = a.dim;
    let mut out = DenseTensor::zeros(n, 4);
    let mut o = 0;
    for x1 in 0..n {
        for x2 in 0..n {
            for y1 in 0..n {
                for y2 in 0..n {
                    out.data[o] = a.at2(x1, y2) * e.at2(x2, y1) + a.at2(x2, y1) * e.at2(x1, y2)
                        - a.at2(x1, y1) * e.at2(x2, y2)
                        - a.at2(x2, y2) * e.at2(x1, y1);
                    o += 1;
                }
            }
        }
    }
    out.symmetry = Symmetry::None;
    out
}

/// Generalized Kulkarni–Nomizu product of a `(0,2)` tensor with a `(0,k)`
/// tensor, `k >= 2`; the result has rank `k + 2` and `T`'s trailing slots
/// `Y3..Yk` pass through unchanged.
pub fn kn_product_general(a: &DenseTensor, t: &DenseTensor) -> Result<DenseTensor, TensorError> {
    require_rank(a, 2)?;
    require_same_dim(a.dim, t.dim)?;
    if t.rank < 2 {
        return Err(TensorError::RankTooSmall { min: 2, found: t.rank });
    }
    let n = a.dim;
    let k = t.rank;
    let tail = n.pow(k as u32 - 2);
    let mut out = DenseTensor::zeros(n, k + 2);
    out.symmetry = Symmetry::None;
    let tt = |i: usize, j: usize, rest: usize| t.data[(i * n + j) * tail + rest];
    let mut o = 0;
    for x1 in 0..n {
        for x2 in 0..n {
            for y1 in 0..n {
                for y2 in 0..n {
                    for rest in 0..tail {
                        out.data[o] = a.at2(x1, y2) * tt(x2, y1, rest) + a.at2(x2, y1) * tt(x1, y2, rest)
                            - a.at2(x1, y1) * tt(x2, y2, rest)
                            - a.at2(x2, y2) * tt(x1, y1, rest);
                        o += 1;
                    }
                }
            }
        }
    }
    if k == 2 && a.symmetry == Symmetry::Sym2 && t.symmetry == Symmetry::Sym2 {
        out.symmetry = Symmetry::Curv4;
    }
    Ok(out)
}

/// Derivation action of an endomorphism:
/// `(H T)(X1..Xk) = -sum_i T(X1,..,H Xi,..,Xk)`. Zero on scalars.
pub fn endo_action(h: &Endomorphism, t: &DenseTensor) -> Result<DenseTensor, TensorError> {
    if t.rank == 0 {
        return Ok(DenseTensor::scalar(0.0));
    }
    require_same_dim(h.dim, t.dim)?;
    let mut out = DenseTensor::zeros(t.dim, t.rank);
    out.symmetry = Symmetry::None;
    accumulate_action(h, t, &mut out.data, 1, 0);
    if t.symmetry == Symmetry::Sym2 {
        out.symmetry = Symmetry::Sym2;
    }
    Ok(out)
}

/// Adds `(H T)` into `out` at positions `flat * stride + offset`, where `flat`
/// enumerates `T`'s index tuples. Lets callers interleave a family of actions
/// as trailing slots.
fn accumulate_action(h: &Endomorphism, t: &DenseTensor, out: &mut [f64], stride: usize, offset: usize) {
    let n = t.dim;
    let k = t.rank;
    let len = t.data.len();
    let strides: Vec<usize> = (0..k).map(|s| n.pow((k - 1 - s) as u32)).collect();
    for flat in 0..len {
        let mut acc = 0.0;
        for &st in &strides {
            let c = (flat / st) % n;
            let base = flat - c * st;
            for m in 0..n {
                let hm = h.matrix[m * n + c];
                if hm != 0.0 {
                    acc += hm * t.data[base + m * st];
                }
            }
        }
        out[flat * stride + offset] -= acc;
    }
}

/// Acts with a family of endomorphisms `H(a,b)` (indexed by coordinate pairs)
/// on `T` and stores the pair as the last two slots.
fn pair_family_action(family: impl Fn(usize, usize) -> Endomorphism, t: &DenseTensor) -> DenseTensor {
    let n = t.dim;
    let mut out = DenseTensor::zeros(n, t.rank + 2);
    out.symmetry = Symmetry::None;
    if t.rank == 0 {
        return out;
    }
    for a in 0..n {
        for b in 0..n {
            let h = family(a, b);
            accumulate_action(&h, t, &mut out.data, n * n, a * n + b);
        }
    }
    out
}

/// The endomorphism `D(e_a, e_b)` of a `(0,4)` tensor: raise the last slot with `g^{-1}`.
pub fn curvature_endomorphism(d: &DenseTensor, g_inv: &DenseTensor, a: usize, b: usize) -> Endomorphism {
    let n = d.dim;
    Endomorphism::from_fn(n, |m, c| (0..n).map(|s| d.at4(a, b, c, s) * g_inv.at2(s, m)).sum())
}

/// `(D·T)(X1..Xk; X, Y) = (D(X,Y)·T)(X1..Xk)` with the pair `(X,Y)` stored
/// as the last two slots.
pub fn curvature_action(d: &DenseTensor, g: &DenseTensor, t: &DenseTensor) -> Result<DenseTensor, TensorError> {
    let g_inv = inverse_metric(g)?;
    curvature_action_raised(d, &g_inv, t)
}

/// [`curvature_action`] with a precomputed inverse metric.
pub fn curvature_action_raised(
    d: &DenseTensor,
    g_inv: &DenseTensor,
    t: &DenseTensor,
) -> Result<DenseTensor, TensorError> {
    require_rank(d, 4)?;
    require_same_dim(d.dim, g_inv.dim)?;
    require_same_dim(d.dim, t.dim)?;
    if d.symmetry != Symmetry::Curv4 {
        let scale = d.max_abs().max(f64::MIN_POSITIVE);
        let v = generalized_curvature_violation(d)?;
        if v > 1e-9 * scale {
            return Err(TensorError::NotCurvature(v / scale));
        }
    }
    let n = d.dim;
    let ends: Vec<Endomorphism> = (0..n * n).map(|p| curvature_endomorphism(d, g_inv, p / n, p % n)).collect();
    Ok(pair_family_action(|a, b| ends[a * n + b].clone(), t))
}

/// Tachibana-type tensor `Q(A,T)(X1..Xk; X,Y) = ((X ∧_A Y)·T)(X1..Xk)`.
pub fn q_product(a: &DenseTensor, t: &DenseTensor) -> Result<DenseTensor, TensorError> {
    require_rank(a, 2)?;
    require_same_dim(a.dim, t.dim)?;
    Ok(pair_family_action(|x, y| Endomorphism::wedge_basis(a, x, y), t))
}

/// `(mu_X · T)(X1..Xk) = -sum_i mu(Xi) T(X1,..,X,..,Xk)`.
pub fn mu_action(mu: &OneForm, x: &Vector, t: &DenseTensor) -> Result<DenseTensor, TensorError> {
    if t.rank == 0 {
        return Ok(DenseTensor::scalar(0.0));
    }
    require_same_dim(mu.0.len(), t.dim)?;
    require_same_dim(x.0.len(), t.dim)?;
    endo_action(&Endomorphism::rank_one(x, mu)?, t)
}

/// Inverse of a symmetric non-degenerate metric, as a symmetric rank-2 tensor.
pub fn inverse_metric(g: &DenseTensor) -> Result<DenseTensor, TensorError> {
    require_rank(g, 2)?;
    let inv = linalg::invert(&g.matrix()).ok_or(TensorError::SingularMetric)?;
    Ok(DenseTensor::from_matrix_sym(&inv))
}

/// `A^k(X,Y) = A(𝒜^{k-1} X, Y)` with `g(𝒜X,Y) = A(X,Y)`.
pub fn ricci_power(a: &DenseTensor, g: &DenseTensor, k: u32) -> Result<DenseTensor, TensorError> {
    let g_inv = inverse_metric(g)?;
    ricci_power_raised(a, &g_inv, k)
}

pub fn ricci_power_raised(a: &DenseTensor, g_inv: &DenseTensor, k: u32) -> Result<DenseTensor, TensorError> {
    require_rank(a, 2)?;
    require_same_dim(a.dim, g_inv.dim)?;
    if k == 0 {
        return Err(TensorError::RankTooSmall { min: 1, found: 0 });
    }
    let am = a.matrix();
    let op = g_inv.matrix() * &am;
    let mut acc = am;
    for _ in 1..k {
        acc = &acc * &op;
    }
    Ok(DenseTensor::from_matrix_sym(&acc))
}

/// `sum_ij (g^{-1})^{ij} A_ij`.
pub fn trace_wrt_g(a: &DenseTensor, g: &DenseTensor) -> Result<f64, TensorError> {
    let g_inv = inverse_metric(g)?;
    trace_raised(a, &g_inv)
}

pub fn trace_raised(a: &DenseTensor, g_inv: &DenseTensor) -> Result<f64, TensorError> {
    require_rank(a, 2)?;
    require_same_dim(a.dim, g_inv.dim)?;
    Ok(a.dot(g_inv))
}

/// Ricci-type contraction of a `(0,4)` tensor: `S_jk = g^{il} D_ijkl`
/// (first slot against last).
pub fn contract_first_last(d: &DenseTensor, g_inv: &DenseTensor) -> Result<DenseTensor, TensorError> {
    require_rank(d, 4)?;
    require_same_dim(d.dim, g_inv.dim)?;
    let n = d.dim;
    let mut out = DenseTensor::zeros(n, 2);
    for j in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for l in 0..n {
                    s += g_inv.at2(i, l) * d.at4(i, j, k, l);
                }
            }
            out.data[j * n + k] = s;
        }
    }
    match out.clone().into_sym2() {
        Ok(sym) => Ok(sym),
        Err(_) => {
            out.symmetry = Symmetry::None;
            Ok(out)
        }
    }
}

/// Largest absolute violation of the generalized-curvature identities:
/// first Bianchi, antisymmetry in the first pair, pair interchange.
pub fn generalized_curvature_violation(d: &DenseTensor) -> Result<f64, TensorError> {
    require_rank(d, 4)?;
    let n = d.dim;
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    let v = d.at4(a, b, c, e);
                    let bianchi = v + d.at4(b, c, a, e) + d.at4(c, a, b, e);
                    let anti = v + d.at4(b, a, c, e);
                    let pair = v - d.at4(c, e, a, b);
                    worst = worst.max(bianchi.abs()).max(anti.abs()).max(pair.abs());
                }
            }
        }
    }
    Ok(worst)
}

/// True iff `D` satisfies the generalized-curvature axioms with max-norm
/// violation below `tol`.
pub fn check_generalized_curvature(d: &DenseTensor, tol: f64) -> bool {
    generalized_curvature_violation(d).map(|v| v < tol).unwrap_or(false)
}
