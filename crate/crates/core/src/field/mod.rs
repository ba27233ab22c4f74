//! Truncated Fourier representations of periodic fields on the unit torus.

mod io;
mod lattice;
mod norms;
mod scalar;
mod velocity;

pub use io::FieldKind;
pub use lattice::{ModeLattice, Wavevector};
pub use norms::{distance_h, SobolevIndices, SobolevNorm};
pub use scalar::FourierScalarField;
pub use velocity::FourierVelocityField;

