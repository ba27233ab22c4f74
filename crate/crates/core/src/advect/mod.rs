//! Pseudo-spectral integration of the advection–diffusion equation on the
//! unit torus, with energy diagnostics and the paired solution map.

mod config;
mod fft;
mod solver;
mod trajectory;

pub use config::{default_grid_n, ProductEvaluation, Scheme, SolverConfig};
pub use solver::{paired_solve, solve, AdvectionSolver, IcPair, PairedTrajectory};
pub use trajectory::{
    paired_distance_l2, space_time_distance_sq, EnergyRecord, ScalarTrajectory, Snapshot,
    TrajectoryManifest,
};
