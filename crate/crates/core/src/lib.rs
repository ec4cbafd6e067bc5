//! Axially symmetric critical discs of the Euler-Helfrich energy.
//!
//! A disc is generated by a profile curve leaving the symmetry axis at height `z_o`.
//! [`ode::integrate`] follows that curve, [`shooting::shoot`] adjusts `z_o` and the
//! arc length `L` until one of the boundary regimes holds, and the remaining modules
//! evaluate energies, stability tests and auxiliary identities on the result.

pub mod annulus;
pub mod cli;
pub mod conformal;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod io;
pub mod ode;
pub mod params;
pub mod run;
pub mod select;
pub mod shooting;
pub mod stability;

pub use error::{Error, Result};
pub use geometry::{axis_limit_curvature, curvatures, CurvatureSample, ProfileState};
pub use params::{EnergyParams, SignBranch};
