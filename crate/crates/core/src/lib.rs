//! Universal, nonadaptive recovery of anisotropic periodic Sobolev functions
//! from i.i.d. point samples.
//!
//! The pipeline truncates to a hyperbolic cross, assembles the normalized
//! subsampled Fourier system and decodes with the square-root LASSO. Around it
//! sit the approximation-theory tools needed to check the predicted behaviour:
//! sublevel-set counting, best s-term errors, Stechkin bounds and ellipsoid
//! width sandwiches.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

// `!(x > 0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod indexsets;
pub mod operator;
pub mod recovery;
pub mod rng;
pub mod scalar;
pub mod sensing;
pub mod seqtools;
pub mod sobolev;
pub mod srlasso;
pub mod widths;

pub use error::{Error, Result};
pub use indexsets::{
    count_mixed, count_sum, hyperbolic_cross, hyperbolic_cross_capped, mixed_weight, sum_weight,
    IndexSet, MultiIndex,
};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type AnisotropyMixed = indexsets::AnisotropyMixed<f64>;
pub type AnisotropySum = indexsets::AnisotropySum<f64>;
pub type SmoothnessClass = sobolev::SmoothnessClass<f64>;
pub type PeriodicFunction = sobolev::PeriodicFunction<f64>;
pub type SampleSet = sensing::SampleSet<f64>;
pub type MeasurementOperator = sensing::MeasurementOperator<f64>;
pub type SolverResult = srlasso::SolverResult<f64>;
pub type WeightSpectrum = widths::WeightSpectrum<f64>;
