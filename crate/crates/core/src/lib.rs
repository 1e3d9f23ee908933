//! Photon-number statistics, a closed-form model, and a seeded Monte Carlo
//! oracle for heralded single-photon sources whose trigger detector watches
//! several delay-multiplexed modes.
//!
//! The crate is organised bottom-up:
//!
//! * [`stats`]: Bose-Einstein and Poisson photon-number laws and the response
//!   of a single non-photon-number-resolving detector.
//! * [`model`]: certifications, event probabilities and aggregate
//!   single-photon probabilities of an `N_D`-delay system.
//! * [`sim`]: the Monte Carlo counterpart of every closed-form quantity,
//!   plus the switched-array architecture.
//! * [`sweep`]: parameter sweeps for figure data, CSV/JSON tables and SVG plots.
//! * [`cli`]: the `herald` command-line front end.

pub mod cli;
pub mod error;
pub mod model;
pub mod sim;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{
    loss_budget, optimal_mean, source_comparison, switched_array_emission, ArrayEmission,
    CertificationReport, DelayCertification, LossBudget, LossModel, MultiplexConfig,
    SourceComparison, TriggerEvent,
};
pub use sim::{
    run_delay_multiplexed, run_switched_array, sample_mode_count, ArrayCounts, ArrayRun,
    DelayCounts, DelayRun, SimulationEstimate, SimulationMode, SimulationSpec, TrialOutcome,
};
pub use stats::{
    detector_fire_prob, MeanPhotonNumber, PhotonNumberDistribution, QuantumEfficiency,
    StatisticsKind,
};
pub use sweep::{Quantity, SweepRow, SweepSpec, SweepTarget};
