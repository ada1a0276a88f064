//! Sub-Nyquist sensing: sparsity bases, random measurement matrices,
//! coherence, orthogonal matching pursuit and a measure-recover-detect
//! pipeline over the channelized spectrum vector.

pub mod basis;
pub mod measurement;
pub mod omp;
pub mod pipeline;

pub use basis::{make_basis, BasisKind, SparsityBasis};
pub use measurement::{coherence, make_measurement_matrix, measure, MeasurementKind, MeasurementMatrix};
pub use omp::{reconstruct_omp, RecoveryResult, StopRule};
pub use pipeline::{
    cs_sense_pipeline, read_diagnostics_csv, spectrum_vector, write_diagnostics_csv, CsDiagnostics, CsSenseConfig,
    CsSenseOutcome, DiagnosticsRow,
};
