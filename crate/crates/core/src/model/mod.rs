//! Spectrum model: frequency grids, subchannel plans, synthetic PSDs and
//! baseband samples.

pub mod grid;
pub mod io;
pub mod noise;
pub mod periodogram;
pub mod plan;
pub mod psd;
pub mod shaping;
pub mod timeseries;

pub use grid::FrequencyGrid;
pub use noise::{add_noise, NoiseSpec};
pub use periodogram::estimate_psd;
pub use plan::SubchannelPlan;
pub use psd::{build_ideal_psd, WidebandPsd};
pub use shaping::{apply_raised_cosine, EdgeShape};
pub use timeseries::{synthesize_time_series, TimeSeriesSpec};
