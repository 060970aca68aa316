//! Dense complex linear algebra for the small operators of the model.
//!
//! Everything here is row-major and allocation-light; the largest matrix the
//! crate ever builds is `2(M+1)` square with `M` a few hundred at most. No
//! eigensolver lives here: spectral claims are checked through residuals.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type CScalar = Complex64;

pub const ZERO: CScalar = Complex64::new(0.0, 0.0);
pub const ONE: CScalar = Complex64::new(1.0, 0.0);
pub const I: CScalar = Complex64::new(0.0, 1.0);

/// Relative determinant size below which a 2x2 matrix is treated as singular.
const RANK_TOL: f64 = 1e-10;

/// Principal square root with the cut on the negative real axis.
///
/// Points exactly on the cut (including a negative zero imaginary part) take
/// the limit from above, so `principal_sqrt(-4) = 2i` regardless of the sign
/// of the zero.
pub fn principal_sqrt(z: CScalar) -> CScalar {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CScalar>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[CScalar]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<CScalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "from_row_major",
                lhs: (rows, cols),
                rhs: (data.len(), 1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Convenience constructor for the 2x2 matrices of the fermionic sector.
    pub fn from_2x2(m: [[CScalar; 2]; 2]) -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[CScalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[CScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn trace(&self) -> CScalar {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn scale(&self, s: CScalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: &'static str,
        f: impl Fn(CScalar, CScalar) -> CScalar,
    ) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        mat_mul(self, other)?.sub(&mat_mul(other, self)?)
    }

    /// `{a, b} = ab + ba`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        mat_mul(self, other)?.add(&mat_mul(other, self)?)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = CScalar;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &CScalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CScalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector(Vec<CScalar>);

impl CVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![ZERO; dim])
    }

    /// Canonical basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[CScalar] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<CScalar> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: CScalar) -> Self {
        Self(self.0.iter().map(|&x| x * s).collect())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: CScalar, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                op: "axpy",
                lhs: (self.dim(), 1),
                rhs: (other.dim(), 1),
            });
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(&a, &b)| a + s * b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-ONE, other)
    }
}

impl From<Vec<CScalar>> for CVector {
    fn from(v: Vec<CScalar>) -> Self {
        Self(v)
    }
}

impl Index<usize> for CVector {
    type Output = CScalar;

    #[inline]
    fn index(&self, i: usize) -> &CScalar {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut CScalar {
        &mut self.0[i]
    }
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "mat_mul",
            lhs: a.shape(),
            rhs: b.shape(),
        });
    }
    let mut out = CMatrix::zeros(a.rows, b.cols);
    // i-k-j order keeps the inner loop on contiguous rows of `b` and `out`.
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == ZERO {
                continue;
            }
            let brow = b.row(k);
            let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for (o, &bkj) in orow.iter_mut().zip(brow) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

pub fn mat_vec(a: &CMatrix, v: &CVector) -> Result<CVector> {
    if a.cols != v.dim() {
        return Err(Error::DimensionMismatch {
            op: "mat_vec",
            lhs: a.shape(),
            rhs: (v.dim(), 1),
        });
    }
    let out = (0..a.rows)
        .map(|i| a.row(i).iter().zip(&v.0).map(|(&x, &y)| x * y).sum())
        .collect();
    Ok(CVector(out))
}

/// Kronecker product, `a`-index major: entry `(i*p + k, j*q + l) = a[i,j] b[k,l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = b.shape();
    let mut out = CMatrix::zeros(a.rows * p, a.cols * q);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors, `u`-index major.
pub fn kron_vec(u: &CVector, v: &CVector) -> CVector {
    let mut out = Vec::with_capacity(u.dim() * v.dim());
    for &x in &u.0 {
        out.extend(v.0.iter().map(|&y| x * y));
    }
    CVector(out)
}

/// Unit vector spanning the kernel of a rank-one 2x2 matrix.
///
/// The result has Euclidean norm 1 and its first nonzero entry is real and
/// positive.
pub fn nullspace_2x2(m: &CMatrix) -> Result<CVector> {
    if m.shape() != (2, 2) {
        return Err(Error::NotTwoByTwo(m.rows, m.cols));
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return Err(Error::NullspaceNotUnique);
    }
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det.norm() > RANK_TOL * scale * scale {
        return Err(Error::NoNullspace);
    }
    // The kernel is orthogonal (bilinearly) to the dominant row (a, b): v = (b, -a).
    let r0 = m[(0, 0)].norm_sqr() + m[(0, 1)].norm_sqr();
    let r1 = m[(1, 0)].norm_sqr() + m[(1, 1)].norm_sqr();
    let (a, b) = if r0 >= r1 {
        (m[(0, 0)], m[(0, 1)])
    } else {
        (m[(1, 0)], m[(1, 1)])
    };
    let mut v = CVector(vec![b, -a]);
    let norm = v.norm();
    v = v.scale(Complex64::new(1.0 / norm, 0.0));

    let lead = if v[0].norm() > f64::EPSILON { v[0] } else { v[1] };
    let phase = lead.conj() / lead.norm();
    Ok(v.scale(phase))
}

/// Physics-convention inner product: antilinear in `u`, linear in `v`.
pub fn inner(u: &CVector, v: &CVector) -> Result<CScalar> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            op: "inner",
            lhs: (u.dim(), 1),
            rhs: (v.dim(), 1),
        });
    }
    Ok(u.0.iter().zip(&v.0).map(|(x, &y)| x.conj() * y).sum())
}
