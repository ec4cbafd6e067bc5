//! The modified conformal Gauss map into five-dimensional Minkowski space.

use serde::{Deserialize, Serialize};

use crate::geometry::ProfileState;
use crate::ode::Trajectory;
use crate::params::EnergyParams;
use crate::shooting::DiscSolution;

/// A vector of `R^{4,1}`, the last component timelike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiPoint(pub [f64; 5]);

impl MinkowskiPoint {
    pub fn inner(&self, other: &Self) -> f64 {
        let (x, y) = (&self.0, &other.0);
        x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3] - x[4] * y[4]
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    fn sub(&self, other: &Self) -> Self {
        MinkowskiPoint(std::array::from_fn(|i| self.0[i] - other.0[i]))
    }

    fn scale(&self, t: f64) -> Self {
        MinkowskiPoint(self.0.map(|v| v * t))
    }
}

/// `l = (0, 0, 0, 1, 1)`, the null vector pairing to `-1` with every lifted point.
pub const NULL_DIRECTION: MinkowskiPoint = MinkowskiPoint([0.0, 0.0, 0.0, 1.0, 1.0]);

/// Light-cone lift `(X, (|X|^2 - 1)/2, (|X|^2 + 1)/2)` of a point of space.
pub fn light_cone_lift(x: [f64; 3]) -> MinkowskiPoint {
    let n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    MinkowskiPoint([x[0], x[1], x[2], 0.5 * (n2 - 1.0), 0.5 * (n2 + 1.0)])
}

/// `(H + c_o) lift(X) + (nu, q, q)` at the surface point over `state` rotated by `theta`.
pub fn modified_gauss_map_at(state: &ProfileState, h: f64, theta: f64, params: &EnergyParams) -> MinkowskiPoint {
    let (st, ct) = theta.sin_cos();
    let (sin, cos) = state.phi.sin_cos();
    let x = [state.r * ct, state.r * st, state.z];
    let nu = [-sin * ct, -sin * st, cos];
    let q = x[0] * nu[0] + x[1] * nu[1] + x[2] * nu[2];
    let lift = light_cone_lift(x);
    let hc = h + params.c_o;
    MinkowskiPoint(std::array::from_fn(|i| hc * lift.0[i] + [nu[0], nu[1], nu[2], q, q][i]))
}

/// The map on the meridian plane `theta = 0`.
pub fn modified_gauss_map(state: &ProfileState, h: f64, params: &EnergyParams) -> MinkowskiPoint {
    modified_gauss_map_at(state, h, 0.0, params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormIdentityReport {
    /// max over samples of `| |dY|^2 - 2 (H^2 - K + c_o^2) |`
    pub max_residual: f64,
    /// arc lengths where `H^2 - K = c_o^2` to within `1e-8`
    pub degenerate: Vec<f64>,
}

pub fn gauss_map_norm_identity(sol: &DiscSolution) -> NormIdentityReport {
    norm_identity_of(&sol.trajectory, 1e-4)
}

/// Compares the finite-difference norm of `dY` with `2 (H^2 - K + c_o^2)` at every
/// sample at least `step` away from both ends.
pub fn norm_identity_of(traj: &Trajectory, step: f64) -> NormIdentityReport {
    let p = traj.params;
    let (lo, hi) = (traj.start_sigma() + step, traj.length() - step);
    let y = |s: f64, theta: f64| {
        let x = traj.at(s);
        modified_gauss_map_at(&x.state, x.h, theta, &p)
    };
    let mut report = NormIdentityReport { max_residual: 0.0, degenerate: Vec::new() };
    for s in traj.samples.iter().filter(|s| s.state.sigma >= lo && s.state.sigma <= hi) {
        let x = s.state.sigma;
        let d_sigma = y(x + step, 0.0).sub(&y(x - step, 0.0)).scale(0.5 / step);
        let d_theta = y(x, step).sub(&y(x, -step)).scale(0.5 / step);
        let norm = d_sigma.norm_sq() + d_theta.norm_sq() / (s.state.r * s.state.r);
        let k = s.dphi * s.state.phi.sin() / s.state.r;
        let expected = 2.0 * (s.h * s.h - k + p.c_o * p.c_o);
        report.max_residual = report.max_residual.max((norm - expected).abs());
        if (s.h * s.h - k - p.c_o * p.c_o).abs() < 1e-8 {
            report.degenerate.push(x);
        }
    }
    report
}
