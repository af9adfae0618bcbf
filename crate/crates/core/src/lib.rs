//! Motion words over matrix alphabets, compression-based complexity
//! estimates, and the classifiers and geometry built on top of them.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root pin the common `f64` instantiations.

pub mod bits;
pub mod complexity;
pub mod error;
pub mod filters;
pub mod g2;
pub mod harmonics;
pub mod io;
pub mod linalg;
pub mod octonion;
pub mod quantize;
pub mod robot;
pub mod scalar;
pub mod seed;
pub mod spline;
pub mod word;

pub use bits::BitString;
pub use complexity::{ComplexityEstimate, EstimatorId};
pub use error::{Error, Result};
pub use filters::{FilterConfig, FilterVerdict, VerdictKind};
pub use g2::{G2Element, G2Kind};
pub use harmonics::{HarmonicSpec, SurfaceMesh};
pub use linalg::Matrix;
pub use octonion::Octonion;
pub use quantize::{NoiseModel, NoiseSpec, Polyline, Quantizer};
pub use robot::{OracleOutcome, OracleResult, RobotState, TinyProgram};
pub use scalar::Real;
pub use spline::{BSplineCurve, TubeReport};
pub use word::{Alphabet, SelfDelimitedCode, Token, TokenId, Word};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Alphabet64 = Alphabet<f64>;
pub type Alphabet32 = Alphabet<f32>;
pub type Polyline64 = Polyline<f64>;
pub type Polyline32 = Polyline<f32>;
pub type Quantizer64 = Quantizer<f64>;
pub type RobotState64 = RobotState<f64>;
pub type Octonion64 = Octonion<f64>;
pub type G2Element64 = G2Element<f64>;
pub type BSplineCurve64 = BSplineCurve<f64>;
