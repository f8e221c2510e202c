//! One-dimensional Dunkl harmonic analysis at desk scale: weighted and
//! angular quadrature, the Dunkl kernel and transform, lambda-translation
//! and convolution, the lambda-Poisson semigroup and its conjugate, the
//! lambda-Hilbert transform by three routes, and Hardy-space atoms.

pub mod angular;
pub mod atoms;
pub mod dd;
pub mod error;
pub mod hilbert;
pub mod line;
pub mod operator;
pub mod params;
pub mod poisson;
pub mod profile;
pub mod quadrature;
pub mod sampled;
pub mod special;
pub mod transform;
pub mod translation;

pub use error::{DunklError, Result};
pub use params::DunklParameter;
pub use quadrature::{lp_norm, lp_norm_complex, GaussRule, JacobiRule, WeightedGrid};
pub use sampled::SampledFunction;
pub use transform::Spectrum;
pub use special::{
    bessel_j_normalized, dunkl_kernel, dunkl_kernel_laplace, dunkl_kernel_real, KernelEvaluation,
    KernelMethod,
};
