//! Left-handed quaternion discrete cosine transform.
//!
//! `QDCT_L(F) = u * DCT(Fp) + u * DCT(Fq) j`: split `F` into its
//! Cayley–Dickson halves, apply an orthonormal 2-D DCT-II to each complex
//! half, reassemble and left-multiply every coefficient by the pure unit
//! axis `u`. The inverse left-multiplies by `u^-1 = conj(u)` first and then
//! undoes the complex DCTs. Both directions are unitary for the Frobenius
//! norm.

use faer::Mat;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{dims, Error, Result};
use crate::quat::{CayleyDicksonPair, Quaternion, QuaternionMatrix};
use crate::scalar::{lit, Real};

/// Pure unit quaternion `u` (so `u^2 = -1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quaternion<T>", into = "Quaternion<T>", bound = "")]
pub struct TransformAxis<T: Real> {
    u: Quaternion<T>,
}

impl<T: Real> TransformAxis<T> {
    /// Accepts any nonzero pure quaternion and normalizes it.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let q = Quaternion::pure(x, y, z);
        let n = q.norm();
        if !n.is_finite() || n <= T::zero() {
            return Err(Error::InvalidAxis);
        }
        Ok(Self {
            u: q.scale(T::one() / n),
        })
    }

    /// The gray axis `(i + j + k) / sqrt(3)`.
    pub fn gray() -> Self {
        let c = T::one() / lit::<T>(3.0).sqrt();
        Self {
            u: Quaternion::pure(c, c, c),
        }
    }

    #[inline]
    pub fn quaternion(&self) -> Quaternion<T> {
        self.u
    }

    #[inline]
    pub fn inverse(&self) -> Quaternion<T> {
        self.u.conj()
    }
}

impl<T: Real> Default for TransformAxis<T> {
    fn default() -> Self {
        Self::gray()
    }
}

impl<T: Real> TryFrom<Quaternion<T>> for TransformAxis<T> {
    type Error = Error;

    fn try_from(q: Quaternion<T>) -> Result<Self> {
        if q.w != T::zero() || num_traits::Float::abs(q.norm() - T::one()) > lit::<T>(1e-9) {
            return Err(Error::InvalidAxis);
        }
        Ok(Self { u: q })
    }
}

impl<T: Real> From<TransformAxis<T>> for Quaternion<T> {
    fn from(a: TransformAxis<T>) -> Self {
        a.u
    }
}

/// Orthonormal DCT-II matrix `C[p, m] = alpha(p) cos(pi (2m + 1) p / 2n)`.
pub fn dct_matrix<T: Real>(n: usize) -> Mat<T> {
    let nf = n as f64;
    Mat::from_fn(n, n, |p, m| {
        let alpha = if p == 0 {
            (1.0 / nf).sqrt()
        } else {
            (2.0 / nf).sqrt()
        };
        let angle = std::f64::consts::PI * (2 * m + 1) as f64 * p as f64 / (2.0 * nf);
        lit::<T>(alpha * angle.cos())
    })
}

/// Kernels for a fixed `M x N` size and axis.
#[derive(Debug, Clone)]
pub struct TransformPlan<T: Real> {
    rows: usize,
    cols: usize,
    axis: TransformAxis<T>,
    row_kernel: Mat<T>,
    col_kernel: Mat<T>,
}

impl<T: Real> TransformPlan<T> {
    pub fn new(rows: usize, cols: usize, axis: TransformAxis<T>) -> Self {
        Self {
            rows,
            cols,
            axis,
            row_kernel: dct_matrix(rows),
            col_kernel: dct_matrix(cols),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn axis(&self) -> TransformAxis<T> {
        self.axis
    }

    fn check(&self, m: usize, n: usize) -> Result<()> {
        if (m, n) != (self.rows, self.cols) {
            return Err(Error::DimensionMismatch {
                expected: dims(self.rows, self.cols),
                found: dims(m, n),
            });
        }
        Ok(())
    }

    fn real_forward(&self, x: &Mat<T>) -> Mat<T> {
        let t = self.row_kernel.as_ref() * x.as_ref();
        t.as_ref() * self.col_kernel.transpose()
    }

    fn real_inverse(&self, y: &Mat<T>) -> Mat<T> {
        let t = self.row_kernel.transpose() * y.as_ref();
        t.as_ref() * self.col_kernel.as_ref()
    }

    fn complex_apply(
        &self,
        x: &Mat<Complex<T>>,
        f: impl Fn(&Mat<T>) -> Mat<T>,
    ) -> Result<Mat<Complex<T>>> {
        self.check(x.nrows(), x.ncols())?;
        let (m, n) = (x.nrows(), x.ncols());
        let re = f(&Mat::from_fn(m, n, |i, j| x[(i, j)].re));
        let im = f(&Mat::from_fn(m, n, |i, j| x[(i, j)].im));
        Ok(Mat::from_fn(m, n, |i, j| {
            Complex::new(re[(i, j)], im[(i, j)])
        }))
    }

    /// Orthonormal 2-D DCT-II of a complex array (real and imaginary parts
    /// transformed independently).
    pub fn complex_dct2(&self, x: &Mat<Complex<T>>) -> Result<Mat<Complex<T>>> {
        self.complex_apply(x, |p| self.real_forward(p))
    }

    pub fn complex_idct2(&self, y: &Mat<Complex<T>>) -> Result<Mat<Complex<T>>> {
        self.complex_apply(y, |p| self.real_inverse(p))
    }

    /// Forward transform `QDCT_L`.
    pub fn forward(&self, f: &QuaternionMatrix<T>) -> Result<QuaternionMatrix<T>> {
        self.check(f.rows(), f.cols())?;
        let cd = f.cayley_dickson();
        let spectral = CayleyDicksonPair {
            p: self.complex_dct2(&cd.p)?,
            q: self.complex_dct2(&cd.q)?,
        };
        let assembled = QuaternionMatrix::from_cayley_dickson(&spectral)?;
        Ok(assembled.left_scale(self.axis.quaternion()))
    }

    /// Inverse transform `IQDCT_L`.
    pub fn inverse(&self, g: &QuaternionMatrix<T>) -> Result<QuaternionMatrix<T>> {
        self.check(g.rows(), g.cols())?;
        let unrotated = g.left_scale(self.axis.inverse());
        let cd = unrotated.cayley_dickson();
        let spatial = CayleyDicksonPair {
            p: self.complex_idct2(&cd.p)?,
            q: self.complex_idct2(&cd.q)?,
        };
        QuaternionMatrix::from_cayley_dickson(&spatial)
    }
}

pub fn complex_dct2<T: Real>(x: &Mat<Complex<T>>) -> Mat<Complex<T>> {
    TransformPlan::new(x.nrows(), x.ncols(), TransformAxis::gray())
        .complex_dct2(x)
        .expect("plan built for this shape")
}

pub fn complex_idct2<T: Real>(y: &Mat<Complex<T>>) -> Mat<Complex<T>> {
    TransformPlan::new(y.nrows(), y.ncols(), TransformAxis::gray())
        .complex_idct2(y)
        .expect("plan built for this shape")
}

pub fn qdct_l<T: Real>(
    f: &QuaternionMatrix<T>,
    plan: &TransformPlan<T>,
) -> Result<QuaternionMatrix<T>> {
    plan.forward(f)
}

pub fn iqdct_l<T: Real>(
    g: &QuaternionMatrix<T>,
    plan: &TransformPlan<T>,
) -> Result<QuaternionMatrix<T>> {
    plan.inverse(g)
}

/// Fraction of squared energy held by the top-left `frac x frac` block of
/// coefficients.
pub fn low_frequency_energy<T: Real>(coeffs: &QuaternionMatrix<T>, frac: f64) -> f64 {
    let (m, n) = coeffs.shape();
    let (bm, bn) = (
        ((m as f64) * frac).ceil() as usize,
        ((n as f64) * frac).ceil() as usize,
    );
    let total = coeffs.frobenius_norm_sqr().as_f64();
    if total == 0.0 {
        return 0.0;
    }
    let mut block = 0.0;
    for j in 0..bn.min(n) {
        for i in 0..bm.min(m) {
            block += coeffs.get(i, j).norm_sqr().as_f64();
        }
    }
    block / total
}
