//! Dense complex matrices and the handful of matrix functions the rest of the
//! crate consumes: Hermitian eigensystems (cyclic Jacobi), PSD square roots,
//! trace norms, fidelity, Kronecker products, partial traces and entropies.
//!
//! Kronecker convention: in `tensor(a, b)` the index of `a` is the slow
//! (major) index, i.e. `(a ⊗ b)[(i*db + k, j*db + l)] = a[(i, j)] * b[(k, l)]`.
//! Partial traces use the same ordering: the first factor is the most
//! significant digit of the composite index.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity tolerance accepted by [`hermitian_eigensystem`].
pub const HERMITIAN_INPUT_TOL: f64 = 1e-8;
/// Tolerances defining a valid [`DensityMatrix`].
pub const STATE_HERMITIAN_TOL: f64 = 1e-10;
pub const STATE_TRACE_TOL: f64 = 1e-10;
pub const STATE_PSD_TOL: f64 = 1e-10;
/// Eigenvalues below `-PSD_REJECT_TOL` are not rounding noise.
pub const PSD_REJECT_TOL: f64 = 1e-8;
/// Eigenvalues below this are skipped in entropy sums.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::BadShape { dim, got: data.len() });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Outer product `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "add dimension mismatch");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "sub dimension mismatch");
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "comparison dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `A - A^H`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(A + A^H) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `U A U^H`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    /// `V f(Λ) V^H`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, &w) in fv.iter().enumerate() {
                if w != 0.0 {
                    acc += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                }
            }
            acc
        })
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Eigensystem of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<Spectrum> {
    let asymmetry = h.hermitian_asymmetry();
    if asymmetry > HERMITIAN_INPUT_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(jacobi(h.hermitian_part()))
}

fn off_diagonal_norm_sq(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

fn jacobi(mut a: ComplexMatrix) -> Spectrum {
    let n = a.dim();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = (f64::EPSILON * scale).powi(2) * 1e-2;

    if n > 1 && scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm_sq(&a) <= target {
                break;
            }
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotated |= rotate(&mut a, &mut v, p, q);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]));
    let values = order.iter().map(|&k| diag[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Spectrum { values, vectors }
}

/// One Jacobi rotation annihilating `a[p][q]`.
///
/// With `a[p][q] = r e^{iφ}` the unitary acting on the (p, q) plane is
/// `J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]`, and `a <- J^H a J`, `v <- v J`.
/// Returns whether a rotation was applied.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) -> bool {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return false;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return false;
    }
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_c = phase.conj(); // e^{-iφ}
    let n = a.dim();

    // a <- a J (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ph_c * s;
        a[(k, q)] = akp * s + akq * ph_c * c;
    }
    // a <- J^H a (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ph_c * s;
        v[(k, q)] = vkp * s + vkq * ph_c * c;
    }
    true
}

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let asymmetry = m.hermitian_asymmetry();
        if asymmetry > STATE_HERMITIAN_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        let trace = m.trace().re;
        if (trace - 1.0).abs() > STATE_TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        let spec = hermitian_eigensystem(&m)?;
        let min = *spec.values.last().expect("nonempty spectrum");
        if min < -STATE_PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self(m))
    }

    /// Wraps a matrix that is a state by construction (unitary conjugation,
    /// partial trace or tensor product of states).
    pub(crate) fn assume_valid(m: ComplexMatrix) -> Self {
        debug_assert!(m.hermitian_asymmetry() <= 1e-8);
        debug_assert!((m.trace().re - 1.0).abs() <= 1e-8);
        Self(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// `|v><v|` for a normalized vector.
    pub fn pure(v: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(v))
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diag(probs))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(tensor(&self.0, &other.0))
    }

    pub fn purity(&self) -> f64 {
        self.0.matmul(&self.0).trace().re
    }

    pub fn spectrum(&self) -> Spectrum {
        jacobi(self.0.hermitian_part())
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Positive square root of a positive semidefinite matrix.
///
/// Negative eigenvalues down to `-PSD_REJECT_TOL` are treated as rounding
/// noise and clamped to zero.
pub fn psd_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = hermitian_eigensystem(rho)?;
    let min = *spec.values.last().expect("nonempty spectrum");
    if min < -PSD_REJECT_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(spec.apply(|x| x.max(0.0).sqrt()))
}

/// Sum of singular values. Hermitian input uses the eigenvalue path.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    let scale = a.frobenius_norm().max(1.0);
    if a.hermitian_asymmetry() <= 1e-14 * scale {
        jacobi(a.hermitian_part()).values.iter().map(|x| x.abs()).sum()
    } else {
        singular_values(a).iter().sum()
    }
}

/// Singular values via the eigenvalues of `A^H A`, sorted descending.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let gram = a.adjoint().matmul(a);
    jacobi(gram.hermitian_part())
        .values
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect()
}

/// `B(ρ, σ) = ‖√ρ √σ‖₁ = Tr √(√ρ σ √ρ)`, clamped to [0, 1].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let root = psd_sqrt(rho.matrix())?;
    let inner = root.matmul(sigma.matrix()).matmul(&root);
    let f: f64 = jacobi(inner.hermitian_part())
        .values
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `(1/2)‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    Ok(0.5 * trace_norm(&rho.matrix().sub(sigma.matrix())))
}

/// Kronecker product, first argument major.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let n = da * db;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a nonempty sequence, left to right.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut it = factors.into_iter();
    let first = it.next().expect("tensor_all needs at least one factor").clone();
    it.fold(first, |acc, m| tensor(&acc, m))
}

/// Traces out every factor whose `keep` flag is false.
pub fn partial_trace_matrix(m: &ComplexMatrix, factor_dims: &[usize], keep: &[bool]) -> Result<ComplexMatrix> {
    let total: usize = factor_dims.iter().product();
    if factor_dims.is_empty() || total != m.dim() || factor_dims.contains(&0) {
        return Err(Error::Factorization {
            factors: factor_dims.to_vec(),
            dim: m.dim(),
        });
    }
    if keep.len() != factor_dims.len() {
        return Err(Error::DimensionMismatch {
            expected: factor_dims.len(),
            got: keep.len(),
        });
    }
    if !keep.iter().any(|&k| k) {
        return Err(crate::error::invalid("keep", "at least one factor must be kept"));
    }

    // strides of each factor in the composite index
    let nf = factor_dims.len();
    let mut strides = vec![1usize; nf];
    for f in (0..nf - 1).rev() {
        strides[f] = strides[f + 1] * factor_dims[f + 1];
    }
    let kept: Vec<usize> = (0..nf).filter(|&f| keep[f]).collect();
    let traced: Vec<usize> = (0..nf).filter(|&f| !keep[f]).collect();
    let kept_dim: usize = kept.iter().map(|&f| factor_dims[f]).product();
    let traced_dim: usize = traced.iter().map(|&f| factor_dims[f]).product();

    let offsets = |factors: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &f in factors.iter().rev() {
                    let d = factor_dims[f];
                    off += (idx % d) * strides[f];
                    idx /= d;
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept, kept_dim);
    let traced_off = offsets(&traced, traced_dim);

    let mut out = ComplexMatrix::zeros(kept_dim);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &rb) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += m[(ra + t, rb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Reduced state on the factors flagged in `keep`.
pub fn partial_trace(rho: &DensityMatrix, factor_dims: &[usize], keep: &[bool]) -> Result<DensityMatrix> {
    partial_trace_matrix(rho.matrix(), factor_dims, keep).map(DensityMatrix::assume_valid)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.spectrum()
        .values
        .iter()
        .filter(|&&x| x > ENTROPY_CUTOFF)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let a = ComplexMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        a.add(&a.adjoint()).scale_real(0.5)
    }

    pub(crate) fn random_state(n: usize, rng: &mut impl Rng) -> DensityMatrix {
        let a = ComplexMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let g = a.matmul(&a.adjoint());
        let tr = g.trace().re;
        DensityMatrix::new(g.scale_real(1.0 / tr)).unwrap()
    }

    #[test]
    fn diagonal_eigensystem() {
        let s = hermitian_eigensystem(&ComplexMatrix::from_diag(&[1.0, 3.0])).unwrap();
        assert_eq!(s.values, vec![3.0, 1.0]);
        assert!((s.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((s.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let s = hermitian_eigensystem(&sx).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-15);
        assert!((s.values[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3, 6, 16] {
            let h = random_hermitian(n, &mut rng);
            let s = hermitian_eigensystem(&h).unwrap();
            assert!(s.reconstruct().max_abs_diff(&h) < 1e-10);
            let gram = s.vectors.adjoint().matmul(&s.vectors);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
            assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        match hermitian_eigensystem(&m) {
            Err(Error::NotHermitian { asymmetry }) => assert!((asymmetry - 1.0).abs() < 1e-15),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn sqrt_examples() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let r = psd_sqrt(mixed.matrix()).unwrap();
        let expect = ComplexMatrix::identity(2).scale_real(1.0 / 2f64.sqrt());
        assert!(r.max_abs_diff(&expect) < 1e-15);

        let proj = ComplexMatrix::from_diag(&[1.0, 0.0]);
        assert!(psd_sqrt(&proj).unwrap().max_abs_diff(&proj) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let rho = random_state(2, &mut rng);
            let r = psd_sqrt(rho.matrix()).unwrap();
            assert!(r.matmul(&r).max_abs_diff(rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = ComplexMatrix::from_diag(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&m), Err(Error::NotPositive { .. })));
        let tiny = ComplexMatrix::from_diag(&[1.0, -1e-11]);
        let r = psd_sqrt(&tiny).unwrap();
        assert_eq!(r[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&ComplexMatrix::identity(2)) - 2.0).abs() < 1e-15);
        assert!((trace_norm(&ComplexMatrix::from_diag(&[1.0, -1.0])) - 2.0).abs() < 1e-15);
        let jordan = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!((trace_norm(&jordan) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let up = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let down = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((fidelity(&up, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&up, &down).unwrap() < 1e-12);
        assert!((fidelity(&up, &mixed).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(
            fidelity(&up, &DensityMatrix::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tensor_convention_and_identities() {
        assert_eq!(
            tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)),
            ComplexMatrix::identity(4)
        );
        // first argument is the major index
        let a = ComplexMatrix::from_diag(&[1.0, 0.0]);
        let b = ComplexMatrix::from_diag(&[0.0, 1.0]);
        let ab = tensor(&a, &b);
        assert_eq!(ab[(1, 1)], c(1.0, 0.0));
        assert_eq!(ab[(2, 2)], c(0.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m: Vec<ComplexMatrix> = (0..4)
                .map(|_| ComplexMatrix::from_fn(2, |_, _| c(rng.gen(), rng.gen())))
                .collect();
            let t = tensor(&m[0], &m[1]);
            assert!((t.trace() - m[0].trace() * m[1].trace()).norm() < 1e-12);
            let lhs = tensor(&m[0], &m[1]).matmul(&tensor(&m[2], &m[3]));
            let rhs = tensor(&m[0].matmul(&m[2]), &m[1].matmul(&m[3]));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ra = random_state(2, &mut rng);
        let rb = random_state(3, &mut rng);
        let joint = ra.tensor(&rb);
        let a = partial_trace(&joint, &[2, 3], &[true, false]).unwrap();
        let b = partial_trace(&joint, &[2, 3], &[false, true]).unwrap();
        assert!(a.matrix().max_abs_diff(ra.matrix()) < 1e-12);
        assert!(b.matrix().max_abs_diff(rb.matrix()) < 1e-12);

        let s = 0.5f64.sqrt();
        let bell = DensityMatrix::pure(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        for keep in [[true, false], [false, true]] {
            let r = partial_trace(&bell, &[2, 2], &keep).unwrap();
            assert!(r.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);
        }

        let rho = random_state(12, &mut rng);
        let r = partial_trace(&rho, &[2, 3, 2], &[false, true, true]).unwrap();
        assert!((r.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            partial_trace(&rho, &[2, 3], &[true, false]),
            Err(Error::Factorization { .. })
        ));
        assert!(partial_trace(&rho, &[2, 2], &[false, false]).is_err());
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-15);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)) - 1.0).abs() < 1e-15);
        let q = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        // h(1/4) = 2 - (3/4) log2 3
        let h = 2.0 - 0.75 * 3f64.log2();
        assert!((von_neumann_entropy(&q) - h).abs() < 1e-12);
        assert!((h - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::from_diag(&[0.5, 0.6])),
            Err(Error::BadTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::from_diag(&[1.5, -0.5])),
            Err(Error::NotPositive { .. })
        ));
        let m = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.1, 0.1)], vec![c(0.1, 0.1), c(0.5, 0.0)]]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));
    }
}
