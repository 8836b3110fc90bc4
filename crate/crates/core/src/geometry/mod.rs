//! Isoradial graphs, their diamond graphs, train-tracks, minimal paths and
//! the discrete exponential.

mod builders;
mod diamond;
mod graph;
mod json;

pub use builders::{Lattice, LatticePatch, RhombicGrid};
pub use diamond::{exp_along, DiamondGraph, DiamondPath, DiamondVertex, Rhombus, Role, TrainTrack};
pub use graph::{Edge, Face, HalfEdge, IsoradialGraph, PeriodicInfo, Stub, Vertex, DEFAULT_EPSILON};
pub use json::{GraphDocument, PeriodicDocument};

use num_complex::Complex64;

/// Unit complex number e^{iφ}.
pub fn unit(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// Argument reduced to [0, 2π).
pub fn angle_0_2pi(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

/// Reduce an angle to [0, 2π).
pub fn wrap_2pi(a: f64) -> f64 {
    let t = a.rem_euclid(2.0 * std::f64::consts::PI);
    if t >= 2.0 * std::f64::consts::PI {
        0.0
    } else {
        t
    }
}
