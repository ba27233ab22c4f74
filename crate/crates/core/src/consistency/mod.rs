//! Experiment drivers for the large-data behaviour of the posterior: the
//! potential decomposition, a uniform law of large numbers, identification
//! of the scalar field, ill-posedness demos, injectivity of the paired
//! solution map and posterior contraction.

mod decomposition;
mod illposed;
mod injectivity;
mod record;
mod setup;
mod sweep;

pub use decomposition::{
    decomposition_residual, fit_decay_exponent, ulln_check, DecompositionTable, UllnTable,
};
pub use illposed::{illposedness_demo, IllposedCase, IllposednessReport};
pub use injectivity::{injectivity_probe, InjectivityReport};
pub use record::{
    compare_summaries, rerun, run_experiment, Artifacts, Experiment, ExperimentRecord, RecordConfig,
    SeedSet, Timestamp,
};
pub use setup::{custom_field, ic_pair_preset, median, LabConfig};
pub use sweep::{
    contraction_experiment, contraction_from_sweep, identification_experiment,
    identification_from_sweep, largest_inclusion_delta, posterior_sweep, ContractionSummary,
    IdentificationSummary, Sweep, XDeltaProbe,
};
