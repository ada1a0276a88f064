//! Wavelet edge detection on the wideband PSD: dilated smoothing kernels,
//! frequency-domain CWT and its derivative, multiscale product/sum
//! combiners, modulus-maxima extraction with η rejection, segment
//! classification and the edge RMSE.

pub mod convolve;
pub mod edges;
pub mod kernel;
pub mod multiscale;

pub use convolve::{cwt, cwt_derivative, Convolver, MultiscaleResponse};
pub use edges::{
    edge_rmse, edges_to_plan, extract_edges, wmm_edges, EdgeEstimate, EdgeThreshold,
};
pub use kernel::{kernel_samples, KernelFamily, SmoothingKernel};
pub use multiscale::{
    channel_energies, wmp, wmp_normalized, wms, ChannelPartition, Combiner, MultiscaleConfig,
};
