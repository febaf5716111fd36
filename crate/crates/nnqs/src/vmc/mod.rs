//! Variational Monte Carlo: energy estimation, stochastic reconfiguration,
//! Adam and the training loop.

pub mod adam;
mod engine;
mod estimator;
pub mod sr;

pub use adam::AdamState;
pub use engine::{
    ChainMode, Checkpoint, Estimator, FinalEnergy, OptimizerConfig, OptimizerMode, TraceRecord, Vmc, VmcConfig,
    VmcTrace, DEFAULT_TABLE_LIMIT,
};
pub use estimator::{enumerate_samples, estimate_energy, local_energy, LocalEnergySample, SectorAmplitudes, IMAGINARY_RESIDUE_TOLERANCE};
pub use sr::{build_sr, natural_gradient, SrState};
