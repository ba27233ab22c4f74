//! Priors supported on a V-ball, the data potential, a preconditioned
//! Crank–Nicolson sampler and a tensor-grid quadrature oracle.

mod pcn;
mod potential;
mod prior;
mod quadrature;
mod space;
mod stats;

pub use pcn::{pcn_chain, ChainConfig, ChainResult, ChainState, TraceRow};
pub use potential::{FlatPotential, FnPotential, Potential, PotentialFn};
pub use prior::{sample_prior, PriorKind, PriorSampler, PriorSpec};
pub use quadrature::{
    quadrature_posterior, BallMass, QuadratureGrid, QuadraturePosterior, QuadratureReport,
    MAX_QUADRATURE_DIM, MIN_GRID_PER_DIM,
};
pub use space::{Coordinate, ParameterSpace, Part, Term};
pub use stats::{batch_means_se, mean};
