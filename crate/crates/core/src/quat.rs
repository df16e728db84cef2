//! Quaternion scalars and matrices.
//!
//! A [`QuaternionMatrix`] stores its four real component planes side by side
//! (`Q = Q0 + Q1 i + Q2 j + Q3 k`). Products are formed plane-wise with real
//! matrix multiplies, and the Cayley–Dickson split `Q = Qp + Qq j` with
//! `Qp = Q0 + Q1 i`, `Qq = Q2 + Q3 i` gives the `2M x 2N` complex adjoint
//!
//! ```text
//! [  Qp        Qq      ]
//! [ -conj(Qq)  conj(Qp) ]
//! ```
//!
//! which is a ring homomorphism: `adj(A B) = adj(A) adj(B)`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use faer::Mat;
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{dims, Error, Result};
use crate::scalar::{lit, Real};

/// `w + x i + y j + z k`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    #[inline]
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn one() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    #[inline]
    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    #[inline]
    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn pure(x: T, y: T, z: T) -> Self {
        Self::new(T::zero(), x, y, z)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Modulus `|q|`.
    #[inline]
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    #[inline]
    pub fn is_pure(self) -> bool {
        self.w == T::zero()
    }

    /// Cayley–Dickson halves `(w + x i, y + z i)`.
    #[inline]
    pub fn to_complex_pair(self) -> (Complex<T>, Complex<T>) {
        (Complex::new(self.w, self.x), Complex::new(self.y, self.z))
    }

    #[inline]
    pub fn from_complex_pair(p: Complex<T>, q: Complex<T>) -> Self {
        Self::new(p.re, p.im, q.re, q.im)
    }
}

/// Hamilton product `p q`.
#[inline]
pub fn qmul<T: Real>(p: Quaternion<T>, q: Quaternion<T>) -> Quaternion<T> {
    Quaternion {
        w: p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        x: p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        y: p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        z: p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        qmul(self, rhs)
    }
}

impl<T: Real> Add for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.w + rhs.w,
            self.x + rhs.x,
            self.y + rhs.y,
            self.z + rhs.z,
        )
    }
}

impl<T: Real> Sub for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.w - rhs.w,
            self.x - rhs.x,
            self.y - rhs.y,
            self.z - rhs.z,
        )
    }
}

impl<T: Real> Neg for Quaternion<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> AddAssign for Quaternion<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Real> SubAssign for Quaternion<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Real> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i + {}j + {}k)", self.w, self.x, self.y, self.z)
    }
}

/// `M x N` quaternion matrix held as four real planes `[Q0, Q1, Q2, Q3]`.
#[derive(Clone, PartialEq)]
pub struct QuaternionMatrix<T> {
    planes: [Mat<T>; 4],
}

/// `Q = Qp + Qq j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyDicksonPair<T> {
    pub p: Mat<Complex<T>>,
    pub q: Mat<Complex<T>>,
}

/// The `2M x 2N` complex representation of an `M x N` quaternion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexAdjoint<T> {
    pub data: Mat<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for QuaternionMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, c) = (self.planes[0].nrows(), self.planes[0].ncols());
        writeln!(f, "QuaternionMatrix {r}x{c} [")?;
        for i in 0..r.min(8) {
            for j in 0..c.min(8) {
                let [a, b, cc, d] = &self.planes;
                write!(
                    f,
                    " ({:?}, {:?}, {:?}, {:?})",
                    a[(i, j)],
                    b[(i, j)],
                    cc[(i, j)],
                    d[(i, j)]
                )?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> QuaternionMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            planes: std::array::from_fn(|_| Mat::zeros(rows, cols)),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.planes[0][(i, i)] = T::one();
        }
        m
    }

    pub fn from_planes(planes: [Mat<T>; 4]) -> Result<Self> {
        let (r, c) = (planes[0].nrows(), planes[0].ncols());
        for p in &planes[1..] {
            if p.nrows() != r || p.ncols() != c {
                return Err(Error::DimensionMismatch {
                    expected: dims(r, c),
                    found: dims(p.nrows(), p.ncols()),
                });
            }
        }
        Ok(Self { planes })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Quaternion<T>,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Real diagonal matrix (`rows x cols`) with `diag` on the main diagonal.
    pub fn from_real_diagonal(rows: usize, cols: usize, diag: &[T]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.planes[0][(i, i)] = d;
        }
        m
    }

    /// I.i.d. standard normal entries on all four planes, drawn column-major.
    pub fn random_normal<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| {
            let mut draw = || lit::<T>(rng.sample::<f64, _>(StandardNormal));
            Quaternion::new(draw(), draw(), draw(), draw())
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.planes[0].nrows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.planes[0].ncols()
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    #[inline]
    pub fn plane(&self, k: usize) -> &Mat<T> {
        &self.planes[k]
    }

    #[inline]
    pub fn plane_mut(&mut self, k: usize) -> &mut Mat<T> {
        &mut self.planes[k]
    }

    pub fn planes(&self) -> &[Mat<T>; 4] {
        &self.planes
    }

    pub fn into_planes(self) -> [Mat<T>; 4] {
        self.planes
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Quaternion<T> {
        Quaternion::new(
            self.planes[0][(i, j)],
            self.planes[1][(i, j)],
            self.planes[2][(i, j)],
            self.planes[3][(i, j)],
        )
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, q: Quaternion<T>) {
        self.planes[0][(i, j)] = q.w;
        self.planes[1][(i, j)] = q.x;
        self.planes[2][(i, j)] = q.y;
        self.planes[3][(i, j)] = q.z;
    }

    /// True iff the real plane is identically zero.
    pub fn is_pure(&self) -> bool {
        let p = &self.planes[0];
        (0..p.ncols()).all(|j| (0..p.nrows()).all(|i| p[(i, j)] == T::zero()))
    }

    pub fn map(&self, mut f: impl FnMut(Quaternion<T>) -> Quaternion<T>) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| f(self.get(i, j)))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            planes: std::array::from_fn(|k| {
                let p = &self.planes[k];
                Mat::from_fn(p.nrows(), p.ncols(), |i, j| p[(i, j)] * s)
            }),
        }
    }

    /// Left-multiply every entry by the quaternion scalar `q`.
    pub fn left_scale(&self, q: Quaternion<T>) -> Self {
        self.map(|e| q * e)
    }

    /// Right-multiply every entry by the quaternion scalar `q`.
    pub fn right_scale(&self, q: Quaternion<T>) -> Self {
        self.map(|e| e * q)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: dims(self.rows(), self.cols()),
                found: dims(other.rows(), other.cols()),
            });
        }
        Ok(())
    }

    fn zip_planes(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Self {
            planes: std::array::from_fn(|k| {
                let (a, b) = (&self.planes[k], &other.planes[k]);
                Mat::from_fn(a.nrows(), a.ncols(), |i, j| f(a[(i, j)], b[(i, j)]))
            }),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_planes(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_planes(other, |a, b| a - b))
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        self.zip_planes(other, |a, b| a + s * b)
    }

    pub fn conj_transpose(&self) -> Self {
        Self {
            planes: std::array::from_fn(|k| {
                let t = self.planes[k].transpose().to_owned();
                if k == 0 {
                    t
                } else {
                    Mat::from_fn(t.nrows(), t.ncols(), |i, j| -t[(i, j)])
                }
            }),
        }
    }

    /// Quaternion matrix product `self * rhs`, factor order preserved.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols()),
                found: format!("{} rows", rhs.rows()),
            });
        }
        let a = &self.planes;
        let b = &rhs.planes;
        let p = |i: usize, j: usize| a[i].as_ref() * b[j].as_ref();
        let c0 = p(0, 0) - p(1, 1) - p(2, 2) - p(3, 3);
        let c1 = p(0, 1) + p(1, 0) + p(2, 3) - p(3, 2);
        let c2 = p(0, 2) - p(1, 3) + p(2, 0) + p(3, 1);
        let c3 = p(0, 3) + p(1, 2) - p(2, 1) + p(3, 0);
        Ok(Self {
            planes: [c0, c1, c2, c3],
        })
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        let mut acc = T::zero();
        for p in &self.planes {
            for j in 0..p.ncols() {
                for i in 0..p.nrows() {
                    let v = p[(i, j)];
                    acc += v * v;
                }
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> T {
        self.frobenius_norm_sqr().sqrt()
    }

    /// `Re tr(self^H other)`, the real inner product on `H^{M x N}`.
    pub fn real_inner(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        let mut acc = T::zero();
        for k in 0..4 {
            let (a, b) = (&self.planes[k], &other.planes[k]);
            for j in 0..a.ncols() {
                for i in 0..a.nrows() {
                    acc += a[(i, j)] * b[(i, j)];
                }
            }
        }
        Ok(acc)
    }

    /// Quaternion-valued trace of a square matrix.
    pub fn trace(&self) -> Quaternion<T> {
        let mut t = Quaternion::zero();
        for i in 0..self.rows().min(self.cols()) {
            t += self.get(i, i);
        }
        t
    }

    /// Sum of entry moduli (the entrywise l1 norm).
    pub fn l1_norm(&self) -> T {
        let mut acc = T::zero();
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                acc += self.get(i, j).norm();
            }
        }
        acc
    }

    pub fn cayley_dickson(&self) -> CayleyDicksonPair<T> {
        let [q0, q1, q2, q3] = &self.planes;
        let (r, c) = self.shape();
        CayleyDicksonPair {
            p: Mat::from_fn(r, c, |i, j| Complex::new(q0[(i, j)], q1[(i, j)])),
            q: Mat::from_fn(r, c, |i, j| Complex::new(q2[(i, j)], q3[(i, j)])),
        }
    }

    pub fn from_cayley_dickson(pair: &CayleyDicksonPair<T>) -> Result<Self> {
        let (r, c) = (pair.p.nrows(), pair.p.ncols());
        if pair.q.nrows() != r || pair.q.ncols() != c {
            return Err(Error::DimensionMismatch {
                expected: dims(r, c),
                found: dims(pair.q.nrows(), pair.q.ncols()),
            });
        }
        Ok(Self {
            planes: [
                Mat::from_fn(r, c, |i, j| pair.p[(i, j)].re),
                Mat::from_fn(r, c, |i, j| pair.p[(i, j)].im),
                Mat::from_fn(r, c, |i, j| pair.q[(i, j)].re),
                Mat::from_fn(r, c, |i, j| pair.q[(i, j)].im),
            ],
        })
    }

    pub fn to_adjoint(&self) -> ComplexAdjoint<T> {
        let (m, n) = self.shape();
        let cd = self.cayley_dickson();
        let data = Mat::from_fn(2 * m, 2 * n, |i, j| match (i < m, j < n) {
            (true, true) => cd.p[(i, j)],
            (true, false) => cd.q[(i, j - n)],
            (false, true) => -cd.q[(i - m, j)].conj(),
            (false, false) => cd.p[(i - m, j - n)].conj(),
        });
        ComplexAdjoint { data }
    }

    /// Inverse of [`to_adjoint`](Self::to_adjoint). The two redundant copies
    /// of each block are averaged after checking they agree to `1e-12`
    /// (relative to the largest entry).
    pub fn from_adjoint(adj: &ComplexAdjoint<T>) -> Result<Self> {
        let a = &adj.data;
        let (rr, cc) = (a.nrows(), a.ncols());
        if rr % 2 != 0 || cc % 2 != 0 {
            return Err(Error::OddAdjoint { rows: rr, cols: cc });
        }
        let (m, n) = (rr / 2, cc / 2);
        let mut scale = T::zero();
        for j in 0..cc {
            for i in 0..rr {
                let v = a[(i, j)];
                scale = scale.max(v.re.abs()).max(v.im.abs());
            }
        }
        let tol = lit::<T>(1e-12) * scale.max(T::one());
        let half = lit::<T>(0.5);
        let mut dev = T::zero();
        let mut out = Self::zeros(m, n);
        for j in 0..n {
            for i in 0..m {
                let p_top = a[(i, j)];
                let p_bot = a[(i + m, j + n)].conj();
                let q_top = a[(i, j + n)];
                let q_bot = -a[(i + m, j)].conj();
                dev = dev.max((p_top - p_bot).norm()).max((q_top - q_bot).norm());
                let p = (p_top + p_bot) * half;
                let q = (q_top + q_bot) * half;
                out.set(i, j, Quaternion::from_complex_pair(p, q));
            }
        }
        if dev > tol {
            return Err(Error::AdjointStructure {
                deviation: dev.as_f64(),
            });
        }
        // (a + a) / 2 == a exactly, so structured input round-trips bit-for-bit
        Ok(out)
    }

    /// Column `j` as an `M`-vector of quaternions.
    pub fn column(&self, j: usize) -> Vec<Quaternion<T>> {
        (0..self.rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<Quaternion<T>>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    /// Keep only the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        Self {
            planes: std::array::from_fn(|p| self.planes[p].as_ref().subcols(0, k).to_owned()),
        }
    }
}

impl<T: Real> Add for &QuaternionMatrix<T> {
    type Output = QuaternionMatrix<T>;
    fn add(self, rhs: Self) -> QuaternionMatrix<T> {
        self.try_add(rhs)
            .expect("quaternion matrix add: shape mismatch")
    }
}

impl<T: Real> Sub for &QuaternionMatrix<T> {
    type Output = QuaternionMatrix<T>;
    fn sub(self, rhs: Self) -> QuaternionMatrix<T> {
        self.try_sub(rhs)
            .expect("quaternion matrix sub: shape mismatch")
    }
}

impl<T: Real> Neg for &QuaternionMatrix<T> {
    type Output = QuaternionMatrix<T>;
    fn neg(self) -> QuaternionMatrix<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for &QuaternionMatrix<T> {
    type Output = QuaternionMatrix<T>;
    fn mul(self, rhs: Self) -> QuaternionMatrix<T> {
        self.matmul(rhs)
            .expect("quaternion matrix product: inner dimension mismatch")
    }
}

/// Free-function form of [`QuaternionMatrix::matmul`].
pub fn qmat_mul<T: Real>(
    a: &QuaternionMatrix<T>,
    b: &QuaternionMatrix<T>,
) -> Result<QuaternionMatrix<T>> {
    a.matmul(b)
}

pub fn conj_transpose<T: Real>(a: &QuaternionMatrix<T>) -> QuaternionMatrix<T> {
    a.conj_transpose()
}

pub fn frobenius_norm<T: Real>(a: &QuaternionMatrix<T>) -> T {
    a.frobenius_norm()
}

pub fn real_inner<T: Real>(a: &QuaternionMatrix<T>, b: &QuaternionMatrix<T>) -> Result<T> {
    a.real_inner(b)
}

pub fn to_adjoint<T: Real>(a: &QuaternionMatrix<T>) -> ComplexAdjoint<T> {
    a.to_adjoint()
}

pub fn from_adjoint<T: Real>(adj: &ComplexAdjoint<T>) -> Result<QuaternionMatrix<T>> {
    QuaternionMatrix::from_adjoint(adj)
}

/// Frobenius norm of a dense complex matrix.
pub fn complex_frobenius<T: Real>(m: &Mat<Complex<T>>) -> T {
    let mut acc = T::zero();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr<T> {
    rows: usize,
    cols: usize,
    /// Column-major component planes.
    planes: [Vec<T>; 4],
}

impl<T: Real> Serialize for QuaternionMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (r, c) = self.shape();
        let planes = std::array::from_fn(|k| {
            let p = &self.planes[k];
            let mut v = Vec::with_capacity(r * c);
            for j in 0..c {
                for i in 0..r {
                    v.push(p[(i, j)]);
                }
            }
            v
        });
        MatrixRepr {
            rows: r,
            cols: c,
            planes,
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for QuaternionMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::<T>::deserialize(deserializer)?;
        let (r, c) = (repr.rows, repr.cols);
        if repr.planes.iter().any(|p| p.len() != r * c) {
            return Err(serde::de::Error::custom(
                "plane length does not match rows*cols",
            ));
        }
        Ok(Self {
            planes: std::array::from_fn(|k| Mat::from_fn(r, c, |i, j| repr.planes[k][j * r + i])),
        })
    }
}
