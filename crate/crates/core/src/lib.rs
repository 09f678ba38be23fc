//! Non-linear binary subdivision schemes built on local ℓ1 regression.
//!
//! Every new control point is produced by fitting a low-degree polynomial to a
//! window of `2n` or `2n + 1` neighbouring control values with iteratively
//! reweighted least squares (IRLS) and evaluating the fit at fixed abscissae.
//! Because the weights follow the residuals, isolated outliers lose their
//! influence and the schemes behave like robust smoothers.
//!
//! * [`local_fit`]: the IRLS engine (univariate and bivariate stencils).
//! * [`refine1d`]: curve subdivision drivers, boundary policies and masks.
//! * [`refine2d`]: non-tensor-product surface subdivision over grid meshes.
//! * [`analysis`]: basic limit functions, support width, overshoot, errors.
//! * [`datagen`]: test functions, the torus surface and seeded noise.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the type
//! aliases at the crate root fix the common `f64` instantiations.

pub mod analysis;
pub mod datagen;
mod error;
pub mod exec;
pub mod local_fit;
pub mod refine1d;
pub mod refine2d;
mod scalar;

pub use error::{Error, Result};
pub use exec::Execution;
pub use local_fit::{
    Beta, Beta2D, FitConfig, FitResult, FitWarning, MomentVector, NormalSystem, Parity, Stencil,
    Stencil2D, WeightVector, WlsSolution,
};
pub use analysis::LimitSamples;
pub use refine1d::{
    BoundaryPolicy, ControlPolygon, FitStats, Mask, Refinement, SchemeSpec, Topology, Weighting,
};
pub use refine2d::{GridMesh, Refinement2D, SchemeSpec2D};
pub use scalar::Scalar;

pub type FitConfig64 = FitConfig<f64>;
pub type FitConfig32 = FitConfig<f32>;
pub type Beta64 = Beta<f64>;
pub type Beta2D64 = Beta2D<f64>;
pub type FitResult64 = FitResult<f64, Beta<f64>>;
pub type FitResult2D64 = FitResult<f64, Beta2D<f64>>;
pub type SchemeSpec64 = SchemeSpec<f64>;
pub type SchemeSpec32 = SchemeSpec<f32>;
pub type SchemeSpec2D64 = SchemeSpec2D<f64>;
pub type ControlPolygon64 = ControlPolygon<f64>;
pub type ControlPolygon32 = ControlPolygon<f32>;
pub type GridMesh64 = GridMesh<f64>;
pub type Mask64 = Mask<f64>;
pub type LimitSamples64 = LimitSamples<f64>;
