//! Axisymmetric Helfrich patches with a nonzero flux constant.
//!
//! With `zeta = phi'` as an extra unknown the flux first integral becomes a
//! first-order system in `(r, z, phi, zeta)`. Its solutions are annular pieces of
//! surfaces satisfying the Euler-Lagrange equation that cannot close up into discs
//! unless the flux vanishes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::dopri::{self, Dense, Finish, Flow};
use crate::ode::IntegratorConfig;
use crate::params::EnergyParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusState {
    pub sigma: f64,
    pub r: f64,
    pub z: f64,
    pub phi: f64,
    /// `phi'`
    pub zeta: f64,
}

impl AnnulusState {
    fn vector(&self) -> [f64; 4] {
        [self.r, self.z, self.phi, self.zeta]
    }

    fn from_vector(sigma: f64, y: &[f64; 4]) -> Self {
        AnnulusState { sigma, r: y[0], z: y[1], phi: y[2], zeta: y[3] }
    }

    pub fn mean_curvature(&self) -> f64 {
        0.5 * (self.zeta + self.phi.sin() / self.r)
    }

    pub fn gauss_curvature(&self) -> f64 {
        self.zeta * self.phi.sin() / self.r
    }
}

fn derivatives(y: &[f64; 4], a_bar: f64, c: f64) -> [f64; 4] {
    let [r, _, phi, zeta] = *y;
    let (sin, cos) = phi.sin_cos();
    let h = 0.5 * (zeta + sin / r);
    let hc = h + c;
    let dzeta = 2.0 * hc * (hc - zeta) * sin / cos + 2.0 * (h - zeta) * cos / r - 2.0 * a_bar / (r * cos);
    [cos, sin, zeta, dzeta]
}

/// `(r', z', phi', zeta')` of the flux-`a_bar` system.
pub fn annulus_rhs(state: &AnnulusState, a_bar: f64, params: &EnergyParams) -> Result<[f64; 4]> {
    if !(state.r > 0.0) {
        return Err(Error::Domain(format!("annulus system needs r > 0, got {}", state.r)));
    }
    if state.phi.cos() == 0.0 {
        return Err(Error::Domain("annulus system is singular where cos(phi) = 0".into()));
    }
    Ok(derivatives(&state.vector(), a_bar, params.c()))
}

/// `dH/dsigma` along the system, which the flux integral fixes algebraically.
fn mean_curvature_derivative(y: &[f64; 4], a_bar: f64, c: f64) -> f64 {
    let [r, _, phi, zeta] = *y;
    let h = 0.5 * (zeta + phi.sin() / r);
    let d = derivatives(y, a_bar, c);
    0.5 * d[3] + phi.cos() * (zeta - h) / r
}

/// Why an annulus integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnulusEvent {
    /// `|cos(phi)|` fell to the floor; the system is singular at vertical tangents
    TangentVertical,
    /// `r` fell to the axis floor
    AxisReached,
    SigmaMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusStop {
    pub sigma_max: f64,
    pub cos_floor: f64,
    pub r_floor: f64,
}

impl Default for AnnulusStop {
    fn default() -> Self {
        AnnulusStop { sigma_max: 5.0, cos_floor: 1e-3, r_floor: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSample {
    pub state: AnnulusState,
    pub h: f64,
    pub k: f64,
    /// flux integral evaluated from the state
    pub a_bar: f64,
}

#[derive(Debug, Clone)]
pub struct AnnulusTrajectory {
    pub params: EnergyParams,
    pub a_bar: f64,
    pub samples: Vec<AnnulusSample>,
    pub event: AnnulusEvent,
    segments: Vec<Dense<4>>,
}

impl AnnulusTrajectory {
    pub fn start_sigma(&self) -> f64 {
        self.samples[0].state.sigma
    }

    pub fn end_sigma(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.state.sigma)
    }

    /// State at arc length `sigma` from the dense output.
    pub fn at(&self, sigma: f64) -> AnnulusState {
        let i = self.segments.partition_point(|d| d.t1 < sigma).min(self.segments.len() - 1);
        AnnulusState::from_vector(sigma, &self.segments[i].eval(sigma))
    }

    fn sample(&self, state: AnnulusState) -> AnnulusSample {
        sample_of(state, self.a_bar, self.params.c())
    }
}

/// `r [(H + c) d(cos phi)/dsigma - cos(phi) H' + (H + c)^2 sin(phi)]`.
pub fn flux_of(state: &AnnulusState, h_prime: f64, params: &EnergyParams) -> f64 {
    flux(state, h_prime, params.c())
}

fn flux(state: &AnnulusState, h_prime: f64, c: f64) -> f64 {
    let (sin, cos) = state.phi.sin_cos();
    let hc = state.mean_curvature() + c;
    state.r * (hc * (-sin * state.zeta) - cos * h_prime + hc * hc * sin)
}

fn sample_of(state: AnnulusState, a_bar: f64, c: f64) -> AnnulusSample {
    let y = state.vector();
    let hp = mean_curvature_derivative(&y, a_bar, c);
    AnnulusSample { state, h: state.mean_curvature(), k: state.gauss_curvature(), a_bar: flux(&state, hp, c) }
}

/// Integrates the flux-`a_bar` system from `init` until a vertical tangent, the
/// axis, or `stop.sigma_max`.
pub fn integrate_annulus(
    init: &AnnulusState,
    a_bar: f64,
    params: &EnergyParams,
    config: &IntegratorConfig,
    stop: &AnnulusStop,
) -> Result<AnnulusTrajectory> {
    params.validate()?;
    config.validate()?;
    if !(init.r > stop.r_floor) {
        return Err(Error::Domain(format!("initial radius {} must exceed {}", init.r, stop.r_floor)));
    }
    if !(init.phi.cos().abs() > stop.cos_floor) {
        return Err(Error::Domain(format!("initial tangent too close to vertical, cos(phi) = {:.3e}", init.phi.cos())));
    }
    if ![init.sigma, init.z, init.phi, init.zeta, a_bar].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("non-finite initial data".into()));
    }
    let c = params.c();
    let tol = config.tolerances();
    let guard = |y: &[f64; 4]| (y[2].cos().abs() - stop.cos_floor).min(y[0] - stop.r_floor);
    let rhs = |_t: f64, y: &[f64; 4]| {
        if !(y[0] > 0.0) || y[2].cos() == 0.0 {
            return None;
        }
        let d = derivatives(y, a_bar, c);
        d.iter().all(|v| v.is_finite()).then_some(d)
    };
    let mut segments: Vec<Dense<4>> = Vec::new();
    let mut event = AnnulusEvent::SigmaMax;
    let t_end = init.sigma + stop.sigma_max;
    let (finish, _, t, _) = dopri::solve(rhs, init.sigma, init.vector(), t_end, 1e-3, &tol, |d| {
        let mut d = *d;
        if guard(&d.y1) <= 0.0 {
            let (mut lo, mut hi) = (d.t0, d.t1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if guard(&d.eval(mid)) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                    break;
                }
            }
            event = if d.eval(hi)[0] <= stop.r_floor { AnnulusEvent::AxisReached } else { AnnulusEvent::TangentVertical };
            d.y1 = d.eval(lo);
            d.f1 = d.deriv(lo);
            d.t1 = lo;
            segments.push(d);
            return Flow::Stop;
        }
        segments.push(d);
        Flow::Continue
    });
    if let Finish::Failed(sigma) = finish {
        return Err(Error::BlowUp { sigma });
    }
    if segments.is_empty() {
        return Err(Error::BlowUp { sigma: t });
    }
    let mut traj = AnnulusTrajectory { params: *params, a_bar, samples: Vec::new(), event, segments };
    let (s0, s1) = (init.sigma, traj.segments.last().map_or(init.sigma, |d| d.t1));
    let n = config.dense_samples;
    traj.samples = (0..n)
        .map(|i| {
            let s = if i + 1 == n { s1 } else { s0 + (s1 - s0) * i as f64 / (n - 1) as f64 };
            traj.sample(traj.at(s))
        })
        .collect();
    Ok(traj)
}

/// Largest deviation of the evaluated flux from the prescribed one.
pub fn flux_drift(traj: &AnnulusTrajectory) -> f64 {
    traj.samples.iter().map(|s| (s.a_bar - traj.a_bar).abs()).fold(0.0, f64::max)
}

/// Largest `|(H + c_o) z + cos(phi)|` along the trajectory.
pub fn noncmc_violation(traj: &AnnulusTrajectory) -> f64 {
    let c = traj.params.c();
    traj.samples.iter().map(|s| ((s.h + c) * s.state.z + s.state.phi.cos()).abs()).fold(0.0, f64::max)
}

/// Largest residual of `Delta H + 2 (H + c)(H (H - c) - K) = 0` over the interior
/// samples. The Laplacian is `H'' + (cos(phi)/r) H'`, with `H'` evaluated along the
/// system and `H''` its fourth order central difference of step `delta`. `margin` is
/// the fraction of arc length skipped at both ends.
pub fn el1_residual(traj: &AnnulusTrajectory, delta: f64, margin: f64) -> f64 {
    let c = traj.params.c();
    let (s0, s1) = (traj.start_sigma(), traj.end_sigma());
    let (lo, hi) = (s0 + margin * (s1 - s0), s1 - margin * (s1 - s0));
    let dh = |s: f64| mean_curvature_derivative(&traj.at(s).vector(), traj.a_bar, c);
    traj.samples
        .iter()
        .filter(|s| s.state.sigma - 2.0 * delta >= lo && s.state.sigma + 2.0 * delta <= hi)
        .map(|s| {
            let x = s.state.sigma;
            let near = dh(x + delta) - dh(x - delta);
            let far = dh(x + 2.0 * delta) - dh(x - 2.0 * delta);
            let d2 = (8.0 * near - far) / (12.0 * delta);
            let lap = d2 + s.state.phi.cos() / s.state.r * dh(x);
            (lap + 2.0 * (s.h + c) * (s.h * (s.h - c) - s.k)).abs()
        })
        .fold(0.0, f64::max)
}

/// Arc lengths of samples where `|H^2 - K - c_o^2| < tol`, where the modified
/// conformal Gauss map degenerates.
pub fn discoid_samples(traj: &AnnulusTrajectory, tol: f64) -> Vec<f64> {
    let c = traj.params.c_o;
    traj.samples.iter().filter(|s| (s.h * s.h - s.k - c * c).abs() < tol).map(|s| s.state.sigma).collect()
}
