//! Integration of the axisymmetric disc profile equations.

pub mod dopri;
mod profile;

pub use profile::{
    integrate, rhs, series_start, survey, Crossing, EventKind, IntegratorConfig, ProfileSample, StopEvent,
    StopSpec, Survey, Trajectory,
};
pub(crate) use profile::integrate_to;
