//! Dense complex matrix kernel.
//!
//! Operators are stored row-major as `Complex64` entries. Everything here is a
//! pure function of its inputs; the Hermitian eigensolver is a cyclic complex
//! Jacobi iteration, which is robust for the small and moderately sized
//! matrices that density-matrix work produces.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Maximum deviation from Hermiticity accepted by the eigensolver.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalues at or below this value are treated as kernel directions.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Relative off-diagonal Frobenius mass at which Jacobi sweeps stop.
pub const JACOBI_TOL: f64 = 1e-14;

const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Ordered subsystem dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactorLayout(Vec<usize>);

impl FactorLayout {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::LayoutMismatch {
                dim: factors.iter().product(),
                factors,
            });
        }
        Ok(Self(factors))
    }

    /// Layout with a single factor of the given dimension.
    pub fn single(dim: usize) -> Self {
        Self(vec![dim.max(1)])
    }

    pub fn qubits(n: usize) -> Self {
        Self(vec![2; n.max(1)])
    }

    pub fn two_qubits() -> Self {
        Self(vec![2, 2])
    }

    pub fn factors(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.iter().product()
    }

    pub fn check(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::LayoutMismatch {
                factors: self.0.clone(),
                dim,
            })
        }
    }

    /// Layout of the factors listed in `keep` (in layout order).
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let keep = self.normalize_keep(keep)?;
        Ok(Self(keep.iter().map(|&k| self.0[k]).collect()))
    }

    pub fn is_two_qubit(&self) -> bool {
        self.0 == [2, 2]
    }

    fn normalize_keep(&self, keep: &[usize]) -> Result<Vec<usize>> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&k| k >= self.0.len()) {
            return Err(Error::LayoutMismatch {
                factors: self.0.clone(),
                dim: self.dim(),
            });
        }
        Ok(keep)
    }

    /// Row-major strides (last factor fastest).
    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.0[k + 1];
        }
        strides
    }
}

/// Square complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds an operator from row-major entries; fails unless `data` is square.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimMismatch {
                left: dim * dim,
                right: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| re(x)));
        }
        Ok(Self { dim, data })
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        m
    }

    /// `|psi><psi|` for an (unnormalized) vector.
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    /// `|u><v|`.
    pub fn outer2(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimMismatch {
                left: u.len(),
                right: v.len(),
            });
        }
        Ok(Self::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.mul_unchecked(self))
    }

    /// `{self, other}`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? + &other.mul_unchecked(self))
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a - a^dagger|` over entries.
    pub fn hermiticity_violation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation() <= tol
    }

    /// `(a + a^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `a^dagger a`.
    pub fn gram(&self) -> Self {
        self.adjoint().mul_unchecked(self)
    }

    /// `self * x * self^dagger`.
    pub fn sandwich(&self, x: &Self) -> Result<Self> {
        self.same_dim(x)?;
        Ok(self.mul_unchecked(x).mul_unchecked(&self.adjoint()))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Largest entrywise difference; infinite for mismatched dimensions.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

// Elementwise arithmetic panics on dimension mismatch, like slice indexing.
impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&Operator> for Operator {
    fn sub_assign(&mut self, rhs: &Operator) {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_re(-1.0)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

/// Kronecker product; the first argument indexes the slower factor.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = Operator::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let x = a[(i, j)];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of operators, left to right.
pub fn kron_all(ops: &[&Operator]) -> Operator {
    ops.iter()
        .fold(Operator::identity(1), |acc, op| kron(&acc, op))
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Spectral decomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Operator,
}

impl HermitianEigen {
    /// `sum_i f(lambda_i) v_i v_i^dagger` over every eigenvalue.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Operator {
        self.map_where(|_| true, f)
    }

    /// `sum_i f(lambda_i) v_i v_i^dagger` over eigenvalues above `cutoff`.
    pub fn map_on_support(&self, cutoff: f64, f: impl Fn(f64) -> f64) -> Operator {
        self.map_where(|l| l > cutoff, f)
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> Operator {
        self.map_where(keep, |_| 1.0)
    }

    pub fn reconstruct(&self) -> Operator {
        self.map(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    fn map_where(&self, keep: impl Fn(f64) -> bool, f: impl Fn(f64) -> f64) -> Operator {
        let n = self.vectors.dim();
        let mut out = Operator::zeros(n);
        for (k, &l) in self.values.iter().enumerate() {
            if !keep(l) {
                continue;
            }
            let w = f(l);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                if vi.re == 0.0 && vi.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian operator by cyclic complex Jacobi sweeps.
///
/// Stops once the off-diagonal Frobenius mass drops to `JACOBI_TOL * ||a||_F`.
pub fn hermitian_eig(a: &Operator) -> Result<HermitianEigen> {
    let violation = a.hermiticity_violation();
    if violation > HERMITICITY_TOL * a.max_abs().max(1.0) {
        return Err(Error::NonHermitian { violation });
    }
    let n = a.dim;
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = re(m[(i, i)].re);
    }
    let mut v = Operator::identity(n);
    let scale = m.frobenius_norm();
    let threshold = JACOBI_TOL * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= threshold || scale == 0.0 {
            break;
        }
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(format!(
                "Jacobi sweeps exhausted with off-diagonal mass {off:e}"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Operator::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(m: &Operator) -> f64 {
    let n = m.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation zeroing `m[p][q]`; accumulates into `v`.
fn rotate(m: &mut Operator, v: &mut Operator, p: usize, q: usize) {
    let beta = m[(p, q)];
    let b = beta.norm();
    if b == 0.0 {
        return;
    }
    let alpha = m[(p, p)].re;
    let delta = m[(q, q)].re;
    // Below this the rotation would not change the diagonal in floating point.
    if b < f64::EPSILON * 1e-3 * (alpha.abs() + delta.abs()) {
        m[(p, q)] = re(0.0);
        m[(q, p)] = re(0.0);
        return;
    }
    let phase = beta / b;
    let tau = (delta - alpha) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    // V restricted to (p, q): [[c, s], [-s conj(e), c conj(e)]]
    let vpp = re(cs);
    let vpq = re(sn);
    let vqp = -phase.conj() * sn;
    let vqq = phase.conj() * cs;

    let n = m.dim;
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * vpp + akq * vqp;
        m[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        m[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    m[(p, q)] = re(0.0);
    m[(q, p)] = re(0.0);
    m[(p, p)] = re(alpha - t * b);
    m[(q, q)] = re(delta + t * b);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

/// Applies `f` to the eigenvalues above `SUPPORT_CUTOFF`; kernel directions map to 0.
pub fn matrix_fn_on_support(a: &Operator, f: impl Fn(f64) -> f64) -> Result<Operator> {
    Ok(hermitian_eig(a)?.map_on_support(SUPPORT_CUTOFF, f))
}

/// Traces out every factor not listed in `keep`.
pub fn partial_trace(a: &Operator, layout: &FactorLayout, keep: &[usize]) -> Result<Operator> {
    layout.check(a.dim)?;
    let keep = layout.normalize_keep(keep)?;
    let traced: Vec<usize> = (0..layout.len()).filter(|k| !keep.contains(k)).collect();
    let strides = layout.strides();
    let dims = layout.factors();

    let offsets = |factors: &[usize]| -> Vec<usize> {
        let total: usize = factors.iter().map(|&f| dims[f]).product();
        (0..total)
            .map(|mut idx| {
                let mut off = 0;
                for &f in factors.iter().rev() {
                    off += (idx % dims[f]) * strides[f];
                    idx /= dims[f];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&keep);
    let traced_off = offsets(&traced);

    let dk = kept_off.len();
    let n = a.dim;
    let mut out = Operator::zeros(dk);
    for (i, &oi) in kept_off.iter().enumerate() {
        for (j, &oj) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += a.data[(oi + t) * n + oj + t];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the indices of one tensor factor.
pub fn partial_transpose(a: &Operator, layout: &FactorLayout, factor: usize) -> Result<Operator> {
    layout.check(a.dim)?;
    if factor >= layout.len() {
        return Err(Error::LayoutMismatch {
            factors: layout.factors().to_vec(),
            dim: a.dim,
        });
    }
    let stride = layout.strides()[factor];
    let d = layout.factors()[factor];
    let n = a.dim;
    let mut out = Operator::zeros(n);
    for i in 0..n {
        let di = (i / stride) % d;
        for j in 0..n {
            let dj = (j / stride) % d;
            let i2 = i - di * stride + dj * stride;
            let j2 = j - dj * stride + di * stride;
            out[(i2, j2)] = a[(i, j)];
        }
    }
    Ok(out)
}

/// Sum of absolute eigenvalues of a Hermitian operator.
pub fn trace_norm(a: &Operator) -> Result<f64> {
    Ok(hermitian_eig(a)?.values.iter().map(|l| l.abs()).sum())
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &Operator) -> Operator {
    let n = a.dim;
    let norm = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_re(0.5f64.powi(squarings as i32));
    let mut result = Operator::identity(n);
    let mut term = Operator::identity(n);
    for k in 1..=30 {
        term = term.mul_unchecked(&scaled).scale_re(1.0 / k as f64);
        result += &term;
        if term.max_abs() <= f64::EPSILON * 1e-3 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.mul_unchecked(&result);
    }
    result
}

/// Normalizes a state vector in place, returning its former norm.
pub fn normalize(v: &mut [C64]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

/// Standard single-qubit operators in the computational basis `{|0>, |1>}`.
pub mod pauli {
    use super::{c, re, Operator};

    pub fn x() -> Operator {
        Operator::from_vec(2, vec![re(0.0), re(1.0), re(1.0), re(0.0)]).unwrap()
    }

    pub fn y() -> Operator {
        Operator::from_vec(2, vec![re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0)]).unwrap()
    }

    /// `diag(1, -1)`: `|0>` has eigenvalue +1.
    pub fn z() -> Operator {
        Operator::diag(&[1.0, -1.0])
    }

    /// Lowering operator `|0><1|`; `|0>` is the ground state.
    pub fn lower() -> Operator {
        Operator::from_vec(2, vec![re(0.0), re(1.0), re(0.0), re(0.0)]).unwrap()
    }

    /// Raising operator `|1><0|`.
    pub fn raise() -> Operator {
        Operator::from_vec(2, vec![re(0.0), re(0.0), re(1.0), re(0.0)]).unwrap()
    }

    pub fn id() -> Operator {
        Operator::identity(2)
    }
}
