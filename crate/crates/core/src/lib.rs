//! Critical Z-invariant Ising model on isoradial graphs, studied through
//! dimers on the Fisher graph.
//!
//! The crate builds isoradial patches and their diamond graphs, decorates
//! them into Fisher graphs with a Kasteleyn orientation, evaluates the local
//! contour-integral formula for the inverse Kasteleyn matrix by residues,
//! turns inverse entries into cylinder probabilities through Pfaffians, and
//! handles the periodic case (characteristic polynomials, free energies,
//! Fourier inverse).

pub mod error;
pub mod fisher;
pub mod geometry;
pub mod gibbs;
pub mod inverse;
pub mod model;
pub mod scalar;
pub mod special;
pub mod spectral;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use inverse::{InverseEntry, LocalInverse};
pub use model::CriticalModel;
pub use num_complex::Complex64;
pub use scalar::Real;
pub use weights::{CriticalWeights, CriticalWeights32, CriticalWeights64, EdgeKind};
