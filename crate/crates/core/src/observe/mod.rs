//! Observation designs, the interleaved forward map and synthetic data.

mod data;
mod design;
mod forward;
mod spanning;

pub use data::{synthesize_data, Observation, ObservationSet};
pub use design::{sample_design, DesignPoint, ObservationDesign};
pub use forward::{ForwardModel, Pairing};
pub use spanning::{check_spanning, SpanningCheck, SpanningReport};
