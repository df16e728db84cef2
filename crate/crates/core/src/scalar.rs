//! Scalar abstraction shared by every numeric module.
//!
//! All algorithms are written against [`Real`], which is implemented for
//! `f32` and `f64`. The solver and tests use `f64` (see the aliases in the
//! crate root); `f32` is available for callers that trade accuracy for
//! memory.

use std::fmt::{Debug, Display};

use faer::{Mat, MatRef};
use num_complex::Complex;
use num_traits::{Float, FloatConst};

use crate::error::{Error, Result};

/// Full complex SVD `A = U diag(s) V^H` with `s` sorted non-increasing.
#[derive(Debug, Clone)]
pub struct ComplexSvd<T> {
    pub u: Mat<Complex<T>>,
    pub s: Vec<T>,
    pub v: Mat<Complex<T>>,
}

pub trait Real:
    serde::Serialize
    + serde::de::DeserializeOwned
    + Float
    + FloatConst
    + faer::traits::RealField
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Full SVD of a dense complex matrix.
    fn complex_svd(a: MatRef<'_, Complex<Self>>) -> Result<ComplexSvd<Self>>;

    /// Singular values only, sorted non-increasing.
    fn complex_singular_values(a: MatRef<'_, Complex<Self>>) -> Result<Vec<Self>>;

    /// Lossless widening used by reporting code.
    fn as_f64(self) -> f64;

    fn of(v: f64) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn complex_svd(a: MatRef<'_, Complex<Self>>) -> Result<ComplexSvd<Self>> {
                let svd = a.svd().map_err(|e| Error::Svd(format!("{e:?}")))?;
                let s: Vec<$t> = svd.S().column_vector().iter().map(|c| c.re).collect();
                if s.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Svd("non-finite singular value".into()));
                }
                Ok(ComplexSvd {
                    u: svd.U().to_owned(),
                    s,
                    v: svd.V().to_owned(),
                })
            }

            fn complex_singular_values(a: MatRef<'_, Complex<Self>>) -> Result<Vec<Self>> {
                let s = a
                    .singular_values()
                    .map_err(|e| Error::Svd(format!("{e:?}")))?;
                if s.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Svd("non-finite singular value".into()));
                }
                Ok(s)
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn of(v: f64) -> Self {
                v as $t
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

#[inline]
pub(crate) fn lit<T: Real>(v: f64) -> T {
    T::of(v)
}
