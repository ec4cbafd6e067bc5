//! Shooting on the axis height `z_o` (and arc length `L`) for the four boundary regimes.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CurvatureSample;
use crate::ode::{integrate, integrate_to, survey, EventKind, IntegratorConfig, ProfileSample, StopEvent, StopSpec, Trajectory};
use crate::params::EnergyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// b = 0, geodesic boundary circle
    B0Geodesic,
    /// geodesic boundary circle lying on z = 0
    GeodesicAtZ0,
    /// boundary radius sqrt(alpha/beta)
    BalancedRadius,
    /// non-geodesic boundary, `a r cos(phi) = b z sin(phi)`
    MixedCondition,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::B0Geodesic => "b0_geodesic",
            CaseTag::GeodesicAtZ0 => "geodesic_at_z0",
            CaseTag::BalancedRadius => "balanced_radius",
            CaseTag::MixedCondition => "mixed_condition",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match key.as_str() {
            "b0geodesic" => Some(CaseTag::B0Geodesic),
            "geodesicatz0" => Some(CaseTag::GeodesicAtZ0),
            "balancedradius" => Some(CaseTag::BalancedRadius),
            "mixedcondition" => Some(CaseTag::MixedCondition),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCase {
    pub tag: CaseTag,
    pub target_radius: Option<f64>,
}

impl BoundaryCase {
    /// Checks the case against the parameters and fills in the target radius.
    pub fn new(tag: CaseTag, params: &EnergyParams) -> Result<Self> {
        match tag {
            CaseTag::B0Geodesic if params.b != 0.0 => {
                return Err(Error::WrongCase("b0_geodesic requires b = 0".into()))
            }
            CaseTag::GeodesicAtZ0 | CaseTag::MixedCondition | CaseTag::BalancedRadius if params.b == 0.0 => {
                return Err(Error::WrongCase(format!("{} requires b != 0", tag.name())))
            }
            _ => {}
        }
        let target_radius = (tag == CaseTag::BalancedRadius).then(|| params.balanced_radius());
        Ok(BoundaryCase { tag, target_radius })
    }

    /// Event whose zeros satisfy the first boundary residual.
    pub fn event(&self) -> EventKind {
        match self.tag {
            CaseTag::B0Geodesic => EventKind::PhiReachesHalfPi,
            CaseTag::GeodesicAtZ0 => EventKind::ZCrossesZero,
            CaseTag::BalancedRadius => EventKind::RReachesTarget(self.target_radius.unwrap_or(f64::NAN)),
            CaseTag::MixedCondition => EventKind::MixedBoundary,
        }
    }
}

/// Natural boundary conditions and derived quantities at a parallel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResiduals {
    pub el2: f64,
    pub el3: f64,
    pub el4: f64,
    /// `phi' - sin(phi)/r - 2 c_o`
    pub d1: f64,
}

pub fn boundary_residuals(s: &ProfileSample, params: &EnergyParams) -> BoundaryResiduals {
    let p = params.canonical();
    let st = &s.state;
    let (sin, cos) = st.phi.sin_cos();
    let kn = sin / st.r;
    let kg = -cos / st.r;
    let k = s.dphi * kn;
    let hc = s.h + p.c_o;
    let tension = p.alpha / (st.r * st.r) - p.beta;
    BoundaryResiduals {
        el2: p.a * hc + p.b * kn,
        el3: tension * kn - p.a * s.dh,
        el4: tension * kg + p.a * hc * hc + p.b * k,
        d1: s.dphi - kn - 2.0 * p.c_o,
    }
}

fn pair(tag: CaseTag, s: &ProfileSample, p: &EnergyParams) -> (f64, f64) {
    let st = &s.state;
    let (sin, cos) = st.phi.sin_cos();
    let geo_r2 = (p.a + p.b) * sin + 2.0 * p.a * p.c_o * st.r;
    match tag {
        CaseTag::B0Geodesic => (cos, boundary_residuals(s, p).el3),
        CaseTag::GeodesicAtZ0 => (cos, geo_r2),
        CaseTag::BalancedRadius => (st.r - p.balanced_radius(), geo_r2),
        CaseTag::MixedCondition => {
            let r = st.r;
            let bc = 2.0 * (p.alpha / (r * r) - p.beta) * st.z / (p.a * r) + sin / r + 2.0 * p.c_o;
            (p.a * r * cos - p.b * st.z * sin, s.dphi - bc)
        }
    }
}

/// `(R1, R2)` for b = 0: vertical tangent and the normal-derivative condition.
pub fn residuals_b0(traj: &Trajectory, params: &EnergyParams) -> Result<(f64, f64)> {
    if params.b != 0.0 {
        return Err(Error::WrongCase("b0 residuals need b = 0".into()));
    }
    Ok(pair(CaseTag::B0Geodesic, &traj.terminal(), params))
}

/// `(R1, R2)` for a geodesic boundary on `z = 0`.
pub fn residuals_geodesic_z0(traj: &Trajectory, params: &EnergyParams) -> Result<(f64, f64)> {
    if params.b == 0.0 || params.a + params.b == 0.0 {
        return Err(Error::WrongCase("geodesic_at_z0 residuals need b != 0 and a + b != 0".into()));
    }
    if traj.event.kind != EventKind::ZCrossesZero {
        return Err(Error::NoZeroCrossing);
    }
    Ok(pair(CaseTag::GeodesicAtZ0, &traj.terminal(), params))
}

/// Largest `c_o^2` for which a balanced-radius boundary can exist.
pub fn balanced_admissibility_bound(params: &EnergyParams) -> f64 {
    let p = params;
    (p.a + p.b).powi(2) * p.beta / (4.0 * p.a * p.a * p.alpha)
}

/// `(R1, R2)` for a boundary of radius `sqrt(alpha/beta)`.
pub fn residuals_balanced(traj: &Trajectory, params: &EnergyParams) -> Result<(f64, f64)> {
    if params.b == 0.0 {
        return Err(Error::WrongCase("balanced_radius residuals need b != 0".into()));
    }
    check_admissible(params)?;
    Ok(pair(CaseTag::BalancedRadius, &traj.terminal(), params))
}

fn check_admissible(params: &EnergyParams) -> Result<()> {
    let bound = balanced_admissibility_bound(params);
    let c0_sq = params.c_o * params.c_o;
    if c0_sq >= bound {
        return Err(Error::Inadmissible { c0_sq, bound });
    }
    Ok(())
}

/// `(R1, R2)` for the mixed (non-geodesic, non-balanced) boundary.
pub fn residuals_mixed(traj: &Trajectory, params: &EnergyParams) -> Result<(f64, f64)> {
    if params.b == 0.0 {
        return Err(Error::WrongCase("mixed_condition residuals need b != 0".into()));
    }
    Ok(pair(CaseTag::MixedCondition, &traj.terminal(), params))
}

/// Set of axis heights to scan, each interval log-spaced and of one sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoBracket {
    pub intervals: Vec<(f64, f64)>,
    pub points: usize,
}

impl ZoBracket {
    /// `±[1e-3, 1e3]` in units of `1/max(|c_o|, sqrt(beta/alpha), 1)`.
    pub fn default_for(params: &EnergyParams) -> Self {
        let scale = 1.0 / params.c_o.abs().max((params.beta / params.alpha).sqrt()).max(1.0);
        ZoBracket { intervals: vec![(-1e3 * scale, -1e-3 * scale), (1e-3 * scale, 1e3 * scale)], points: 160 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Domain("bracket needs at least 2 points".into()));
        }
        for &(lo, hi) in &self.intervals {
            if !(lo < hi) || lo * hi <= 0.0 || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Domain(format!("bracket interval [{lo}, {hi}] must not contain 0")));
            }
        }
        if self.intervals.is_empty() {
            return Err(Error::Domain("bracket is empty".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<Vec<f64>> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                let sign = lo.signum();
                let (a, b) = (lo.abs().ln(), hi.abs().ln());
                let mut v: Vec<f64> = (0..self.points)
                    .map(|i| sign * (a + (b - a) * i as f64 / (self.points - 1) as f64).exp())
                    .collect();
                v.sort_by(f64::total_cmp);
                v
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    pub integrator: IntegratorConfig,
    /// relative tolerance of the coarse grid scan
    pub scan_rel_tol: f64,
    /// convergence threshold on the boundary residuals
    pub tol: f64,
    /// how many event crossings per trajectory are considered as boundary candidates
    pub max_events: usize,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig { integrator: IntegratorConfig::default(), scan_rel_tol: 1e-8, tol: 1e-8, max_events: 4 }
    }
}

/// A converged critical disc.
#[derive(Debug, Clone)]
pub struct DiscSolution {
    pub params: EnergyParams,
    /// regime the boundary belongs to; differs from `solved_as` when a
    /// mixed-condition root lands on the balanced radius or on a geodesic
    pub case: BoundaryCase,
    /// regime whose residuals were driven to zero
    pub solved_as: CaseTag,
    pub z_o: f64,
    pub length: f64,
    /// which crossing of the case event (0-based) ends the profile
    pub event_index: usize,
    pub trajectory: Trajectory,
    /// the two shooting residuals
    pub residuals: BTreeMap<String, f64>,
    /// other boundary conditions, which hold automatically only in some regimes
    pub diagnostics: BoundaryResiduals,
    pub boundary: CurvatureSample,
}

impl DiscSolution {
    pub fn radius(&self) -> f64 {
        self.trajectory.terminal().state.r
    }

    /// Largest violation among the natural boundary conditions.
    pub fn criticality_defect(&self) -> f64 {
        let d = &self.diagnostics;
        match self.case.tag {
            CaseTag::B0Geodesic | CaseTag::MixedCondition => d.el2.abs().max(d.el3.abs()).max(d.el4.abs()),
            CaseTag::GeodesicAtZ0 => d.el3.abs().max(d.el4.abs()),
            CaseTag::BalancedRadius => d.el2.abs().max(d.el3.abs()).max(d.el4.abs()),
        }
    }
}

fn event_values(
    case: &BoundaryCase,
    params: &EnergyParams,
    z: f64,
    cfg: &IntegratorConfig,
    max_events: usize,
) -> Vec<f64> {
    match survey(z, params, cfg, &[case.event()], max_events) {
        Ok(s) => s.crossings.iter().map(|c| pair(case.tag, &c.sample, params).1).collect(),
        Err(_) => Vec::new(),
    }
}

fn residual_at(case: &BoundaryCase, params: &EnergyParams, z: f64, k: usize, cfg: &IntegratorConfig) -> Option<f64> {
    event_values(case, params, z, cfg, k + 1).get(k).copied()
}

/// Root of the k-th event residual in `[lo, hi]` by Illinois regula falsi.
fn refine(
    case: &BoundaryCase,
    params: &EnergyParams,
    k: usize,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    mut fhi: f64,
    cfg: &IntegratorConfig,
    tol: f64,
) -> Option<f64> {
    let mut side = 0i32;
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for it in 0..200 {
        if best.1.abs() < 1e-3 * tol || (hi - lo).abs() <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
        let mut z = (lo * fhi - hi * flo) / (fhi - flo);
        if it % 4 == 3 || !(z > lo.min(hi) && z < lo.max(hi)) {
            z = 0.5 * (lo + hi);
        }
        let fz = residual_at(case, params, z, k, cfg)?;
        if fz.abs() < best.1.abs() {
            best = (z, fz);
        }
        if fz == 0.0 {
            break;
        }
        if (fz > 0.0) == (fhi > 0.0) {
            hi = z;
            fhi = fz;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        } else {
            lo = z;
            flo = fz;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        }
    }
    (best.1.abs() < tol).then_some(best.0)
}

fn two_residuals(
    case: &BoundaryCase,
    params: &EnergyParams,
    z: f64,
    l: f64,
    cfg: &IntegratorConfig,
) -> Option<[f64; 2]> {
    let t = integrate_to(z, params, cfg, l).ok()?;
    if (t.terminal().state.sigma - l).abs() > 1e-12 * l {
        return None;
    }
    let (a, b) = pair(case.tag, &t.terminal(), params);
    Some([a, b])
}

/// Damped Newton on `(z_o, L)` with a central-difference Jacobian.
fn newton_polish(
    case: &BoundaryCase,
    params: &EnergyParams,
    mut z: f64,
    mut l: f64,
    cfg: &IntegratorConfig,
    tol: f64,
) -> Result<(f64, f64)> {
    let norm = |r: &[f64; 2]| r[0].abs().max(r[1].abs());
    let mut r = two_residuals(case, params, z, l, cfg).ok_or(Error::BlowUp { sigma: l })?;
    for it in 0..100 {
        if norm(&r) < tol {
            return Ok((z, l));
        }
        let hz = 1e-6 * z.abs().max(1e-3);
        let hl = 1e-6 * l;
        let col = |dz: f64, dl: f64| -> Option<[f64; 2]> {
            let p = two_residuals(case, params, z + dz, l + dl, cfg)?;
            let m = two_residuals(case, params, z - dz, l - dl, cfg)?;
            let h = 2.0 * (dz + dl);
            Some([(p[0] - m[0]) / h, (p[1] - m[1]) / h])
        };
        let jz = col(hz, 0.0).ok_or(Error::Diverged { iterations: it })?;
        let jl = col(0.0, hl).ok_or(Error::Diverged { iterations: it })?;
        let det = jz[0] * jl[1] - jl[0] * jz[1];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Diverged { iterations: it });
        }
        let dz = -(r[0] * jl[1] - jl[0] * r[1]) / det;
        let dl = -(jz[0] * r[1] - r[0] * jz[1]) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let (zn, ln) = (z + lambda * dz, l + lambda * dl);
            if ln > 0.0 && zn * z > 0.0 {
                if let Some(rn) = two_residuals(case, params, zn, ln, cfg) {
                    if norm(&rn) < norm(&r) {
                        z = zn;
                        l = ln;
                        r = rn;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return if norm(&r) < tol { Ok((z, l)) } else { Err(Error::Diverged { iterations: it }) };
        }
    }
    if norm(&r) < tol {
        Ok((z, l))
    } else {
        Err(Error::Diverged { iterations: 100 })
    }
}

fn package(
    case: &BoundaryCase,
    params: &EnergyParams,
    z: f64,
    k: usize,
    cfg: &ShootConfig,
) -> Result<DiscSolution> {
    let icfg = &cfg.integrator;
    let mut traj = integrate(z, params, icfg, &StopSpec::nth(case.event(), k + 1))?;
    let (mut z, mut l) = (z, traj.length());
    let (r1, r2) = pair(case.tag, &traj.terminal(), params);
    if r1.abs().max(r2.abs()) >= cfg.tol {
        (z, l) = newton_polish(case, params, z, l, icfg, cfg.tol)?;
        let crossings = traj.crossings.clone();
        traj = integrate_to(z, params, icfg, l)?;
        traj.crossings = crossings;
        traj.event = StopEvent { kind: case.event(), sigma_stop: l };
    }
    let end = traj.terminal();
    let (r1, r2) = pair(case.tag, &end, params);
    let mut residuals = BTreeMap::new();
    residuals.insert("R1".to_string(), r1);
    residuals.insert("R2".to_string(), r2);
    Ok(DiscSolution {
        params: *params,
        case: *case,
        solved_as: case.tag,
        z_o: z,
        length: l,
        event_index: k,
        trajectory: traj,
        residuals,
        diagnostics: boundary_residuals(&end, params),
        boundary: end.curvature(params),
    })
}

/// Whether the sampled profile curve is free of self-intersections.
pub fn is_embedded(traj: &Trajectory) -> bool {
    let pts: Vec<(f64, f64)> = traj.samples.iter().map(|s| (s.state.r, s.state.z)).collect();
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let n = pts.len();
    for i in 0..n.saturating_sub(1) {
        let (p1, p2) = (pts[i], pts[i + 1]);
        for j in i + 2..n - 1 {
            let (q1, q2) = (pts[j], pts[j + 1]);
            let d1 = cross(q1, q2, p1);
            let d2 = cross(q1, q2, p2);
            let d3 = cross(p1, p2, q1);
            let d4 = cross(p1, p2, q2);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return false;
            }
        }
    }
    true
}

/// Rejects degenerate roots and relabels mixed-condition roots that belong to
/// another regime.
fn classify(mut sol: DiscSolution, tol: f64) -> Option<DiscSolution> {
    let end = sol.trajectory.terminal();
    if !(end.state.r > 0.0) {
        return None;
    }
    let p = sol.params;
    let keep = match sol.case.tag {
        CaseTag::B0Geodesic => sol.diagnostics.el2.abs() < 1e3 * tol,
        CaseTag::GeodesicAtZ0 => end.state.phi.cos().abs() < 1e-6,
        CaseTag::BalancedRadius => true,
        CaseTag::MixedCondition => {
            if (end.state.r - p.balanced_radius()).abs() <= 1e-4 {
                sol.case = BoundaryCase { tag: CaseTag::BalancedRadius, target_radius: Some(p.balanced_radius()) };
            } else if sol.boundary.kappa_g.abs() <= 1e-4 {
                // both mixed residuals vanish at any vertical tangent on z = 0, so
                // such a root only counts if it meets the geodesic pair as well
                let (_, geo_r2) = pair(CaseTag::GeodesicAtZ0, &end, &p);
                if end.state.z.abs() > 1e-4 || geo_r2.abs() > 1e3 * tol {
                    return None;
                }
                sol.case = BoundaryCase { tag: CaseTag::GeodesicAtZ0, target_radius: None };
            }
            true
        }
    };
    keep.then_some(sol)
}

/// All critical discs of the given regime whose axis height lies in `bracket`,
/// sorted by `z_o`.
pub fn shoot(
    case: &BoundaryCase,
    params: &EnergyParams,
    bracket: &ZoBracket,
    cfg: &ShootConfig,
) -> Result<Vec<DiscSolution>> {
    params.validate()?;
    bracket.validate()?;
    let case = BoundaryCase::new(case.tag, params)?;
    if case.tag == CaseTag::GeodesicAtZ0 && params.a + params.b == 0.0 {
        return Err(Error::WrongCase("no geodesic_at_z0 discs exist for a + b = 0".into()));
    }
    if case.tag == CaseTag::BalancedRadius {
        check_admissible(params)?;
    }
    let scan_cfg = IntegratorConfig { rel_tol: cfg.scan_rel_tol, abs_tol: cfg.scan_rel_tol, ..cfg.integrator };

    let mut candidates: Vec<(f64, f64, f64, f64, usize)> = Vec::new();
    for grid in bracket.grid() {
        let values: Vec<Vec<f64>> =
            grid.par_iter().map(|&z| event_values(&case, params, z, &scan_cfg, cfg.max_events)).collect();
        for i in 0..grid.len() - 1 {
            for k in 0..values[i].len().min(values[i + 1].len()) {
                let (a, b) = (values[i][k], values[i + 1][k]);
                if a * b < 0.0 || (b == 0.0 && a != 0.0) {
                    candidates.push((grid[i], grid[i + 1], a, b, k));
                }
            }
        }
    }
    log::debug!("{} candidate brackets for {}", candidates.len(), case.tag.name());

    let mut roots: Vec<DiscSolution> = candidates
        .par_iter()
        .filter_map(|&(lo, hi, _, _, k)| {
            let icfg = &cfg.integrator;
            let flo = residual_at(&case, params, lo, k, icfg)?;
            let fhi = residual_at(&case, params, hi, k, icfg)?;
            if flo * fhi > 0.0 {
                return None;
            }
            let z = refine(&case, params, k, lo, hi, flo, fhi, icfg, cfg.tol)?;
            match package(&case, params, z, k, cfg) {
                Ok(sol) => classify(sol, cfg.tol),
                Err(e) => {
                    log::debug!("candidate z_o = {z} rejected: {e}");
                    None
                }
            }
        })
        .collect();
    roots.sort_by(|a, b| a.z_o.total_cmp(&b.z_o).then(a.event_index.cmp(&b.event_index)));
    roots.dedup_by(|a, b| a.event_index == b.event_index && (a.z_o - b.z_o).abs() <= 1e-9 * b.z_o.abs());
    if roots.is_empty() {
        return Err(Error::NoRoot);
    }
    Ok(roots)
}

/// Closed-form constant mean curvature candidate (flat disc or spherical cap).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmcSolution {
    pub kind: CmcKind,
    pub radius: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmcKind {
    FlatDisc,
    SmallCap,
    BigCap,
}

/// Flat disc for `c_o = 0`, otherwise the small and big caps of the sphere of
/// radius `1/|c_o|` cut at radius `sqrt(alpha/beta)`, when such a cut exists.
pub fn classify_cmc(params: &EnergyParams) -> Vec<CmcSolution> {
    let p = params;
    let rho = p.balanced_radius();
    let boundary = 4.0 * std::f64::consts::PI * (p.alpha * p.beta).sqrt();
    if p.c_o == 0.0 {
        return vec![CmcSolution { kind: CmcKind::FlatDisc, radius: rho, energy: boundary }];
    }
    let ratio = p.c_o * p.c_o * p.alpha / p.beta;
    if ratio > 1.0 {
        return Vec::new();
    }
    let two_pi_b = 2.0 * std::f64::consts::PI * p.b;
    let root = (1.0 - ratio).sqrt();
    vec![
        CmcSolution { kind: CmcKind::SmallCap, radius: rho, energy: two_pi_b * (1.0 - root) + boundary },
        CmcSolution { kind: CmcKind::BigCap, radius: rho, energy: two_pi_b * (1.0 + root) + boundary },
    ]
}
