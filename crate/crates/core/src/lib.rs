//! Mean eigenvector self-overlaps of real (GinOE) and complex (GinUE)
//! Ginibre matrices: special functions, closed forms and limits, overlap
//! distributions, a Monte Carlo engine, estimators and a record store.
//!
//! The analytic modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the precision to `f64`.

pub mod distributions;
pub mod io;
pub mod linalg;
pub mod mc;
pub mod scalar;
pub mod specfun;
pub mod stats;
pub mod theory;

pub use scalar::{Real, Scalar};
pub use theory::{EnsembleKind, Regime};

pub type Point = theory::ComplexPoint<f64>;
pub type Coordinates = theory::RegimeCoordinates<f64>;
pub type Overlap = distributions::OverlapVariable<f64>;
pub type Jpdf = distributions::LimitingJpdf<f64>;
pub type Quad = specfun::QuadOptions<f64>;
