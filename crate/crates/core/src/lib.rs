pub mod cli;
pub mod error;
pub mod imaging;
pub mod mask;
pub mod qdct;
pub mod qsvd;
pub mod quat;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use quat::{CayleyDicksonPair, ComplexAdjoint, Quaternion, QuaternionMatrix};
pub use scalar::Real;

pub type Quat = Quaternion<f64>;
pub type QMat = QuaternionMatrix<f64>;
pub type QuatF32 = Quaternion<f32>;
pub type QMatF32 = QuaternionMatrix<f32>;
