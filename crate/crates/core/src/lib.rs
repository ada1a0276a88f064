//! Multiband spectrum sensing toolkit.
//!
//! The numeric core is generic over the scalar type (`f32` or `f64`, see
//! [`Real`]); the aliases below fix it to `f64`, which is what the experiment
//! harness and CLI use.

pub mod compressive;
pub mod detectors;
pub mod error;
pub mod fft;
pub mod harness;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod wavelet;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = model::FrequencyGrid<f64>;
pub type Plan = model::SubchannelPlan<f64>;
pub type Psd = model::WidebandPsd<f64>;
pub type Noise = model::NoiseSpec<f64>;
