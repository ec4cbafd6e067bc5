use serde::{Deserialize, Serialize};

use super::dopri::{self, Dense, Finish, Flow, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{axis_limit_curvature, curvatures, CurvatureSample, ProfileState};
use crate::params::{EnergyParams, SignBranch};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// arc length at which the series start is placed
    pub eps_axis: f64,
    pub max_sigma: f64,
    pub dense_samples: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-12, eps_axis: 1e-6, max_sigma: 50.0, dense_samples: 1000 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok_tol = |t: f64| t > 0.0 && t <= 1e-3;
        if !ok_tol(self.rel_tol) || !ok_tol(self.abs_tol) {
            return Err(Error::Domain("tolerances must lie in (0, 1e-3]".into()));
        }
        if !(self.eps_axis > 0.0 && self.eps_axis <= 1e-4) {
            return Err(Error::Domain("eps_axis must lie in (0, 1e-4]".into()));
        }
        if !(self.max_sigma > self.eps_axis) || !self.max_sigma.is_finite() {
            return Err(Error::Domain("max_sigma must exceed eps_axis".into()));
        }
        if self.dense_samples < 2 {
            return Err(Error::Domain("dense_samples must be at least 2".into()));
        }
        Ok(())
    }

    pub(crate) fn tolerances(&self) -> Tolerances {
        Tolerances { rtol: self.rel_tol, atol: self.abs_tol, h_max: 0.05, h_min: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    ZCrossesZero,
    /// `cos(phi) = 0`: any vertical tangent, whatever the branch of the angle
    PhiReachesHalfPi,
    RReachesTarget(f64),
    /// `a r cos(phi) - b z sin(phi) = 0`
    MixedBoundary,
    /// `(a + b) sin(phi) + 2 a c_o r = 0`
    SecondBoundary,
    SigmaMax,
    BlowUp,
    /// the profile came back to the symmetry axis
    AxisReturn,
}

impl EventKind {
    fn value(&self, s: &ProfileSample, p: &EnergyParams) -> f64 {
        let st = &s.state;
        match *self {
            EventKind::ZCrossesZero => st.z,
            EventKind::PhiReachesHalfPi => st.phi.cos(),
            EventKind::RReachesTarget(r) => st.r - r,
            EventKind::MixedBoundary => p.a * st.r * st.phi.cos() - p.b * st.z * st.phi.sin(),
            EventKind::SecondBoundary => (p.a + p.b) * st.phi.sin() + 2.0 * p.a * p.c_o * st.r,
            _ => 1.0,
        }
    }

    fn is_terminal_only(&self) -> bool {
        matches!(self, EventKind::SigmaMax | EventKind::BlowUp | EventKind::AxisReturn)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopEvent {
    pub kind: EventKind,
    pub sigma_stop: f64,
}

/// Which events end an integration: the run stops at the `occurrence`-th
/// (1-based) crossing of any of `events`.
#[derive(Debug, Clone, PartialEq)]
pub struct StopSpec {
    pub events: Vec<EventKind>,
    pub occurrence: usize,
}

impl StopSpec {
    pub fn first(kind: EventKind) -> Self {
        StopSpec { events: vec![kind], occurrence: 1 }
    }

    pub fn nth(kind: EventKind, occurrence: usize) -> Self {
        StopSpec { events: vec![kind], occurrence }
    }

    /// Run to `max_sigma`, no monitored events.
    pub fn sigma_max() -> Self {
        StopSpec { events: vec![EventKind::SigmaMax], occurrence: 1 }
    }
}

/// A profile point together with the derivative data the boundary conditions need.
/// Always expressed on the canonical sign branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub state: ProfileState,
    pub dphi: f64,
    pub h: f64,
    /// dH/dsigma
    pub dh: f64,
}

impl ProfileSample {
    pub fn curvature(&self, params: &EnergyParams) -> CurvatureSample {
        let p = params.canonical();
        curvatures(&self.state, self.dphi, &p).unwrap_or(CurvatureSample {
            h: self.h,
            k: self.dphi * self.dphi,
            kappa_g: f64::NAN,
            kappa_n: self.dphi,
            nu3: self.state.phi.cos(),
            s: 0.0,
            h_alt: -self.state.phi.cos() / self.state.z - p.c_o,
        })
    }

    /// `(H + c_o) z + cos(phi)`, zero on every disc profile.
    pub fn noncmc_residual(&self, params: &EnergyParams) -> f64 {
        (self.h + params.c()) * self.state.z + self.state.phi.cos()
    }

    /// The flux first integral evaluated at this parallel.
    pub fn flux(&self, params: &EnergyParams) -> f64 {
        let st = &self.state;
        let (sin, cos) = st.phi.sin_cos();
        let hc = self.h + params.c();
        st.r * (hc * (-sin * self.dphi) - cos * self.dh + hc * hc * sin)
    }

    /// Image under the reflection `z -> -z` (switches sign branch).
    pub fn mirrored(&self) -> Self {
        ProfileSample {
            state: ProfileState { sigma: self.state.sigma, r: self.state.r, z: -self.state.z, phi: -self.state.phi },
            dphi: -self.dphi,
            h: -self.h,
            dh: -self.dh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub kind: EventKind,
    pub sigma: f64,
    pub sample: ProfileSample,
}

/// Piece of dense output: early steps integrate the reduced angle equation,
/// later steps the regular fourth order form that can cross `z = 0`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Segment {
    Reduced(Dense<3>),
    Full(Dense<5>),
}

impl Segment {
    pub(crate) fn t0(&self) -> f64 {
        match self {
            Segment::Reduced(d) => d.t0,
            Segment::Full(d) => d.t0,
        }
    }

    pub(crate) fn t1(&self) -> f64 {
        match self {
            Segment::Reduced(d) => d.t1,
            Segment::Full(d) => d.t1,
        }
    }

    pub(crate) fn eval(&self, sigma: f64, c: f64) -> ProfileSample {
        match self {
            Segment::Reduced(d) => reduced_sample(sigma, &d.eval(sigma), c),
            Segment::Full(d) => full_sample(sigma, &d.eval(sigma)),
        }
    }
}

/// Result of integrating one profile.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: EnergyParams,
    /// axis height on the requested sign branch
    pub z_o: f64,
    pub config: IntegratorConfig,
    /// evenly spaced in arc length, canonical branch
    pub samples: Vec<ProfileSample>,
    pub event: StopEvent,
    /// all crossings of monitored events, in order
    pub crossings: Vec<Crossing>,
    pub(crate) segments: Vec<Segment>,
    pub(crate) terminal: ProfileSample,
}

impl Trajectory {
    pub fn length(&self) -> f64 {
        self.event.sigma_stop
    }

    /// Exact state at the stopping point (canonical branch).
    pub fn terminal(&self) -> ProfileSample {
        self.terminal
    }

    pub fn start_sigma(&self) -> f64 {
        self.segments.first().map(|s| s.t0()).unwrap_or(self.config.eps_axis)
    }

    /// Dense-output evaluation at any arc length inside the integrated range (canonical branch).
    pub fn at(&self, sigma: f64) -> ProfileSample {
        if sigma >= self.terminal.state.sigma {
            return self.terminal;
        }
        let i = self.segments.partition_point(|s| s.t1() < sigma).min(self.segments.len() - 1);
        self.segments[i].eval(sigma, self.params.c())
    }

    /// Samples in the orientation of the requested sign branch.
    pub fn oriented_samples(&self) -> Vec<ProfileSample> {
        match self.params.sign_branch {
            SignBranch::Minus => self.samples.clone(),
            SignBranch::Plus => self.samples.iter().map(|s| s.mirrored()).collect(),
        }
    }

    pub(crate) fn segments(&self) -> &[Segment] {
        &self.segments
    }
}

/// Cheap result of a scan: every crossing of the monitored events and how the run ended.
#[derive(Debug, Clone)]
pub struct Survey {
    pub crossings: Vec<Crossing>,
    pub end: StopEvent,
}

/// Right-hand side of the first order system on the requested branch.
pub fn rhs(state: &ProfileState, params: &EnergyParams) -> Result<(f64, f64, f64)> {
    if !(state.r > 0.0) {
        return Err(Error::Domain(format!("rhs needs r > 0, got {}", state.r)));
    }
    if state.z == 0.0 {
        return Err(Error::Domain("rhs is singular at z = 0".into()));
    }
    let (sin, cos) = state.phi.sin_cos();
    let dphi = -2.0 * cos / state.z - sin / state.r - 2.0 * params.sign_branch.sign() * params.c_o;
    Ok((cos, sin, dphi))
}

/// Taylor start a distance `eps_axis` away from the axis.
pub fn series_start(z_o: f64, config: &IntegratorConfig, params: &EnergyParams) -> Result<ProfileState> {
    let phi1 = axis_limit_curvature(z_o, params)?;
    let e = config.eps_axis;
    Ok(ProfileState { sigma: e, r: e, z: z_o + 0.5 * phi1 * e * e, phi: phi1 * e })
}

fn reduced_rhs(y: &[f64; 3], c: f64) -> Option<[f64; 3]> {
    let [r, z, phi] = *y;
    if !(r > 0.0) || z == 0.0 {
        return None;
    }
    let (sin, cos) = phi.sin_cos();
    Some([cos, sin, -2.0 * cos / z - sin / r - 2.0 * c])
}

/// Regular form of the fourth order equation in `(r, z, phi, H, H')`.
pub(crate) fn full_rhs(y: &[f64; 5], c: f64) -> Option<[f64; 5]> {
    let [r, _z, phi, h, p] = *y;
    if !(r > 0.0) {
        return None;
    }
    let (sin, cos) = phi.sin_cos();
    let kn = sin / r;
    let dphi = 2.0 * h - kn;
    let k = dphi * kn;
    Some([cos, sin, dphi, p, -cos / r * p - 2.0 * (h + c) * (h * (h - c) - k)])
}

fn reduced_sample(sigma: f64, y: &[f64; 3], c: f64) -> ProfileSample {
    let [r, z, phi] = *y;
    let (sin, cos) = phi.sin_cos();
    let dphi = -2.0 * cos / z - sin / r - 2.0 * c;
    ProfileSample {
        state: ProfileState { sigma, r, z, phi },
        dphi,
        h: -cos / z - c,
        dh: sin * (dphi * z + cos) / (z * z),
    }
}

fn full_sample(sigma: f64, y: &[f64; 5]) -> ProfileSample {
    let [r, z, phi, h, p] = *y;
    ProfileSample { state: ProfileState { sigma, r, z, phi }, dphi: 2.0 * h - phi.sin() / r, h, dh: p }
}

struct RawRun {
    segments: Vec<Segment>,
    crossings: Vec<Crossing>,
    terminal: ProfileSample,
    end: StopEvent,
}

/// Shared stepping loop for both phases.
struct Tracker<'a> {
    params: &'a EnergyParams,
    monitors: &'a [EventKind],
    stop_after: usize,
    keep_dense: bool,
    r_floor: f64,
    blow: f64,
    prev: ProfileSample,
    segments: Vec<Segment>,
    crossings: Vec<Crossing>,
    end: Option<(EventKind, ProfileSample)>,
}

impl Tracker<'_> {
    fn values(&self, s: &ProfileSample) -> Vec<f64> {
        self.monitors.iter().map(|m| m.value(s, self.params)).collect()
    }

    /// Handle one accepted step; `exact` re-integrates from the step start to any
    /// interior point with a single Runge-Kutta step.
    fn accept<const N: usize>(
        &mut self,
        dense: &Dense<N>,
        seg: &dyn Fn(Dense<N>) -> Segment,
        sample_of: &dyn Fn(f64, &[f64; N]) -> ProfileSample,
        exact: &mut dyn FnMut(f64) -> Option<([f64; N], [f64; N])>,
    ) -> Flow {
        let next = sample_of(dense.t1, &dense.y1);
        let g0 = self.values(&self.prev);
        let g1 = self.values(&next);
        let mut hits: Vec<(f64, usize, [f64; N], [f64; N])> = Vec::new();
        for (i, m) in self.monitors.iter().enumerate() {
            if m.is_terminal_only() {
                continue;
            }
            let (a, b) = (g0[i], g1[i]);
            if a == 0.0 || !(a * b <= 0.0) {
                continue;
            }
            let g = |y: &[f64; N], t: f64| m.value(&sample_of(t, y), self.params);
            // bracket on the interpolant, then polish on exact states
            let (mut lo, mut hi, mut glo) = (dense.t0, dense.t1, a);
            for _ in 0..200 {
                if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let gm = g(&dense.eval(mid), mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (gm > 0.0) == (glo > 0.0) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            let mut t = 0.5 * (lo + hi);
            let Some(mut ex) = exact(t) else { continue };
            let mut gt = g(&ex.0, t);
            for _ in 0..4 {
                let dt = (t - dense.t0).max(1e-12) * 1e-7;
                let tp = t + dt;
                let Some(exp) = exact(tp) else { break };
                let slope = (g(&exp.0, tp) - gt) / dt;
                if slope == 0.0 || !slope.is_finite() {
                    break;
                }
                let tn = (t - gt / slope).clamp(dense.t0, dense.t1);
                let Some(exn) = exact(tn) else { break };
                let gn = g(&exn.0, tn);
                if gn.abs() >= gt.abs() {
                    break;
                }
                t = tn;
                ex = exn;
                gt = gn;
                if gt == 0.0 {
                    break;
                }
            }
            hits.push((t, i, ex.0, ex.1));
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for (t, i, y, f) in hits {
            let s = sample_of(t, &y);
            self.crossings.push(Crossing { kind: self.monitors[i], sigma: t, sample: s });
            if self.crossings.len() >= self.stop_after {
                if self.keep_dense && t > dense.t0 {
                    let cut = Dense { t0: dense.t0, t1: t, y0: dense.y0, y1: y, f0: dense.f0, f1: f };
                    self.segments.push(seg(cut));
                }
                self.end = Some((self.monitors[i], s));
                return Flow::Stop;
            }
        }
        if self.keep_dense {
            self.segments.push(seg(*dense));
        }
        self.prev = next;
        let st = &next.state;
        if st.r < self.r_floor && st.phi.cos() < 0.0 {
            self.end = Some((EventKind::AxisReturn, next));
            return Flow::Stop;
        }
        if !(next.dphi.abs() < self.blow && next.h.abs() < self.blow) {
            self.end = Some((EventKind::BlowUp, next));
            return Flow::Stop;
        }
        Flow::Continue
    }
}

/// Canonical-branch run from the axis.
fn run(
    z0: f64,
    params: &EnergyParams,
    config: &IntegratorConfig,
    monitors: &[EventKind],
    stop_after: usize,
    sigma_end: f64,
    keep_dense: bool,
) -> Result<RawRun> {
    config.validate()?;
    let p = params.canonical();
    let c = p.c();
    let start = series_start(z0, config, &p)?;
    let phi1 = axis_limit_curvature(z0, &p)?;
    let tol = config.tolerances();
    let mut tracker = Tracker {
        params: &p,
        monitors,
        stop_after: stop_after.max(1),
        keep_dense,
        r_floor: 1e3 * config.eps_axis,
        blow: 1.0 / config.abs_tol,
        prev: reduced_sample(start.sigma, &[start.r, start.z, start.phi], c),
        segments: Vec::new(),
        crossings: Vec::new(),
        end: None,
    };

    // reduced phase, kept short so that z stays well away from zero
    let handoff = (0.1 * z0.abs().min(1.0 / phi1.abs()).min(1.0)).max(10.0 * config.eps_axis).min(sigma_end);
    let y0 = [start.r, start.z, start.phi];
    let h_init = (0.01 * handoff).max(config.eps_axis);
    let (fin, h_last, t, y) = {
        let mut exact_rhs = |_t: f64, y: &[f64; 3]| reduced_rhs(y, c);
        dopri::solve(
            |_t, y: &[f64; 3]| reduced_rhs(y, c),
            start.sigma,
            y0,
            handoff,
            h_init,
            &tol,
            |d| {
                let mut exact = |tt: f64| {
                    let f0 = d.f0;
                    dopri::step(&mut exact_rhs, d.t0, &d.y0, &f0, tt - d.t0)
                        .and_then(|(y, _, _)| reduced_rhs(&y, c).map(|f| (y, f)))
                };
                tracker.accept(d, &Segment::Reduced, &|t, y| reduced_sample(t, y, c), &mut exact)
            },
        )
    };
    let finish = |tracker: Tracker, kind: EventKind, s: ProfileSample| RawRun {
        segments: tracker.segments,
        crossings: tracker.crossings,
        terminal: s,
        end: StopEvent { kind, sigma_stop: s.state.sigma },
    };
    match fin {
        Finish::Stopped => {
            let (k, s) = tracker.end.take().expect("stop reason");
            return Ok(finish(tracker, k, s));
        }
        Finish::Failed(_) => {
            let s = tracker.prev;
            return Ok(finish(tracker, EventKind::BlowUp, s));
        }
        Finish::Reached => {}
    }
    if t >= sigma_end {
        let s = reduced_sample(t, &y, c);
        return Ok(finish(tracker, EventKind::SigmaMax, s));
    }

    let hand = reduced_sample(t, &y, c);
    let y5 = [y[0], y[1], y[2], hand.h, hand.dh];
    let (fin, _h, t, y) = {
        let mut exact_rhs = |_t: f64, y: &[f64; 5]| full_rhs(y, c);
        dopri::solve(
            |_t, y: &[f64; 5]| full_rhs(y, c),
            t,
            y5,
            sigma_end,
            h_last,
            &tol,
            |d| {
                let mut exact = |tt: f64| {
                    let f0 = d.f0;
                    dopri::step(&mut exact_rhs, d.t0, &d.y0, &f0, tt - d.t0)
                        .and_then(|(y, _, _)| full_rhs(&y, c).map(|f| (y, f)))
                };
                tracker.accept(d, &Segment::Full, &full_sample, &mut exact)
            },
        )
    };
    match fin {
        Finish::Stopped => {
            let (k, s) = tracker.end.take().expect("stop reason");
            Ok(finish(tracker, k, s))
        }
        Finish::Failed(_) => {
            let s = tracker.prev;
            Ok(finish(tracker, EventKind::BlowUp, s))
        }
        Finish::Reached => Ok(finish(tracker, EventKind::SigmaMax, full_sample(t, &y))),
    }
}

fn canonical_z0(z_o: f64, params: &EnergyParams) -> f64 {
    z_o * params.sign_branch.sign()
}

/// Record every crossing of `monitors` (at most `max_events`) up to `config.max_sigma`.
pub fn survey(
    z_o: f64,
    params: &EnergyParams,
    config: &IntegratorConfig,
    monitors: &[EventKind],
    max_events: usize,
) -> Result<Survey> {
    let raw = run(canonical_z0(z_o, params), params, config, monitors, max_events, config.max_sigma, false)?;
    Ok(Survey { crossings: raw.crossings, end: raw.end })
}

/// Integrate from the axis until `stop` fires, with dense output resampled to
/// `config.dense_samples` points.
pub fn integrate(z_o: f64, params: &EnergyParams, config: &IntegratorConfig, stop: &StopSpec) -> Result<Trajectory> {
    if stop.events.is_empty() {
        return Err(Error::Domain("stop specification names no event".into()));
    }
    let run_to_max = stop.events.iter().all(|e| *e == EventKind::SigmaMax);
    let monitors: Vec<EventKind> = stop.events.iter().copied().filter(|e| !e.is_terminal_only()).collect();
    let raw = run(
        canonical_z0(z_o, params),
        params,
        config,
        &monitors,
        if run_to_max { usize::MAX } else { stop.occurrence },
        config.max_sigma,
        true,
    )?;
    match raw.end.kind {
        EventKind::SigmaMax if !run_to_max => return Err(Error::NoEvent { max_sigma: config.max_sigma }),
        EventKind::BlowUp | EventKind::AxisReturn => return Err(Error::BlowUp { sigma: raw.end.sigma_stop }),
        _ => {}
    }
    Ok(assemble(z_o, params, config, raw))
}

/// Integrate to a fixed arc length `sigma_end`, recording crossings of `monitors`.
pub(crate) fn integrate_to(
    z_o: f64,
    params: &EnergyParams,
    config: &IntegratorConfig,
    sigma_end: f64,
) -> Result<Trajectory> {
    let raw = run(canonical_z0(z_o, params), params, config, &[], usize::MAX, sigma_end, true)?;
    match raw.end.kind {
        EventKind::BlowUp | EventKind::AxisReturn => Err(Error::BlowUp { sigma: raw.end.sigma_stop }),
        _ => Ok(assemble(z_o, params, config, raw)),
    }
}

fn assemble(z_o: f64, params: &EnergyParams, config: &IntegratorConfig, raw: RawRun) -> Trajectory {
    let mut traj = Trajectory {
        params: *params,
        z_o,
        config: *config,
        samples: Vec::new(),
        event: raw.end,
        crossings: raw.crossings,
        segments: raw.segments,
        terminal: raw.terminal,
    };
    let s0 = traj.start_sigma();
    let s1 = traj.terminal.state.sigma;
    let n = config.dense_samples;
    traj.samples = (0..n)
        .map(|i| if i + 1 == n { traj.terminal } else { traj.at(s0 + (s1 - s0) * i as f64 / (n - 1) as f64) })
        .collect();
    traj
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c_o: f64) -> EnergyParams {
        EnergyParams::new(1.0, c_o, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn taylor_start_near_axis() {
        let cfg = IntegratorConfig::default();
        let s = series_start(1.0, &cfg, &params(0.0)).unwrap();
        assert_eq!((s.r, s.phi), (1e-6, -1e-6));
        assert!((s.z - (1.0 - 5e-13)).abs() < 1e-16);
        let s = series_start(1.0, &cfg, &params(2.0)).unwrap();
        assert!((s.phi + 3e-6).abs() < 1e-18);
        assert!(series_start(0.0, &cfg, &params(2.0)).is_err());
    }

    #[test]
    fn sphere_of_radius_z_o() {
        let cfg = IntegratorConfig::default();
        for z_o in [0.5, 2.0, 7.0] {
            let t = integrate(z_o, &params(0.0), &cfg, &StopSpec::first(EventKind::PhiReachesHalfPi)).unwrap();
            assert!((t.length() - z_o * std::f64::consts::FRAC_PI_2).abs() < 1e-8 * z_o);
            for s in &t.samples {
                let u = s.state.sigma / z_o;
                let err = (s.state.r - z_o * u.sin()).abs().max((s.state.z - z_o * u.cos()).abs()).max((s.state.phi + u).abs());
                assert!(err < 1e-8 * z_o.max(1.0), "z_o {z_o}, sigma {}: {err:e}", s.state.sigma);
            }
        }
    }

    #[test]
    fn plus_branch_is_the_mirror_image() {
        let cfg = IntegratorConfig { dense_samples: 200, ..Default::default() };
        let stop = StopSpec { events: vec![EventKind::SigmaMax], occurrence: 1 };
        let cfg = IntegratorConfig { max_sigma: 1.5, ..cfg };
        let minus = integrate(-1.3, &params(2.0), &cfg, &stop).unwrap();
        let plus = integrate(1.3, &params(2.0).with_branch(SignBranch::Plus), &cfg, &stop).unwrap();
        for (m, p) in minus.samples.iter().zip(plus.oriented_samples()) {
            let q = m.mirrored();
            assert!((q.state.z - p.state.z).abs() < 1e-14 && (q.state.phi - p.state.phi).abs() < 1e-14);
            assert!((q.h - p.h).abs() < 1e-12);
        }
    }

    #[test]
    fn disc_profiles_keep_the_first_integrals() {
        let p = EnergyParams::new(1.0, 2.0, 0.5, 1.0, 4.0).unwrap();
        let cfg = IntegratorConfig::default();
        for z_o in [-1.166771, -0.4, 0.8] {
            let t = integrate(z_o, &p, &cfg, &StopSpec::nth(EventKind::MixedBoundary, 2)).unwrap();
            for s in &t.samples {
                assert!(s.noncmc_residual(&p).abs() < 1e-7);
                assert!(s.flux(&p).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let p = params(1.0);
        let cfg = IntegratorConfig { rel_tol: 0.1, ..Default::default() };
        assert!(integrate(1.0, &p, &cfg, &StopSpec::sigma_max()).is_err());
        let cfg = IntegratorConfig { max_sigma: 0.5, ..Default::default() };
        assert!(matches!(integrate(1.0, &p, &cfg, &StopSpec::first(EventKind::ZCrossesZero)), Err(Error::NoEvent { .. })));
    }
}
