//! Sufficient conditions for instability and non-minimality of critical discs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::energy_upto;
use crate::error::{Error, Result};
use crate::ode::{integrate_to, ProfileSample, Trajectory};
use crate::params::EnergyParams;
use crate::shooting::{CaseTag, DiscSolution};

/// Which of the instability criteria applies to a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityCase {
    /// b = 0, geodesic boundary
    I,
    /// b < 0, geodesic boundary
    II,
    /// b > 0, geodesic boundary
    III,
    /// boundary radius sqrt(alpha/beta)
    IV,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Unstable,
    Inconclusive,
    NotMinimizing,
    Candidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub case_applied: StabilityCase,
    pub f_ddot: Option<f64>,
    pub verdict: Verdict,
    pub notes: String,
}

const MARGIN: f64 = 1e-10;
const GEODESIC_TOL: f64 = 1e-6;
const RADIUS_TOL: f64 = 1e-4;

struct Boundary {
    r: f64,
    hc: f64,
    dh: f64,
    k: f64,
    kappa_g: f64,
}

fn boundary(s: &ProfileSample, p: &EnergyParams) -> Boundary {
    let st = &s.state;
    let (sin, cos) = st.phi.sin_cos();
    let kn = sin / st.r;
    Boundary {
        r: st.r,
        hc: s.h + p.c_o,
        dh: s.dh,
        k: s.dphi * kn,
        kappa_g: -cos / st.r,
    }
}

/// `dK/dsigma` expressed through `H'`: `2 (H - S) H' - 4 kappa_g (H^2 - K)`.
pub fn gauss_curvature_derivative(s: &ProfileSample) -> f64 {
    let st = &s.state;
    let kn = st.phi.sin() / st.r;
    let k = s.dphi * kn;
    let skew = 0.5 * (s.dphi - kn);
    let kappa_g = -st.phi.cos() / st.r;
    2.0 * (s.h - skew) * s.dh - 4.0 * kappa_g * (s.h * s.h - k)
}

/// Second derivative at zero of the energy of the profile truncated at `L - eps`.
pub fn f_ddot_general(sol: &DiscSolution) -> f64 {
    f_ddot_of(&sol.trajectory)
}

pub fn f_ddot_of(traj: &Trajectory) -> f64 {
    let p = traj.params;
    let end = traj.terminal();
    let b = boundary(&end, &p);
    let t = p.alpha / (b.r * b.r);
    2.0 * PI
        * b.r
        * (2.0 * p.a * b.hc * b.dh
            + p.b * gauss_curvature_derivative(&end)
            + (t - p.beta) * b.k
            + (3.0 * t - p.beta) * b.kappa_g * b.kappa_g)
}

/// First derivative at zero of the truncated energy; vanishes on critical discs.
pub fn f_dot(sol: &DiscSolution) -> f64 {
    let p = sol.params;
    let b = boundary(&sol.trajectory.terminal(), &p);
    let cos = sol.trajectory.terminal().state.phi.cos();
    2.0 * PI * b.r * (p.a * b.hc * b.hc + p.b * b.k) - 2.0 * PI * (p.alpha / (b.r * b.r) - p.beta) * cos
}

/// Central second difference of the truncated energy, `(E[L-eps] - 2E[L] + E[L+eps]) / eps^2`.
/// The profile is re-integrated past `L` for the last term.
pub fn f_ddot_finite_difference(sol: &DiscSolution, eps: f64) -> Result<f64> {
    let traj = &sol.trajectory;
    let l = sol.length;
    if !(eps > 0.0 && eps < l) {
        return Err(Error::Domain(format!("finite difference step {eps} outside (0, {l})")));
    }
    let longer = integrate_to(sol.z_o, &sol.params, &traj.config, l + eps)?;
    let e_minus = energy_upto(traj, l - eps);
    let e_mid = energy_upto(traj, l);
    let e_plus = energy_upto(&longer, l + eps);
    Ok((e_minus - 2.0 * e_mid + e_plus) / (eps * eps))
}

fn is_geodesic(sol: &DiscSolution) -> bool {
    matches!(sol.case.tag, CaseTag::B0Geodesic | CaseTag::GeodesicAtZ0)
        || sol.trajectory.terminal().state.phi.cos().abs() < GEODESIC_TOL
}

/// `|r'(L)|` forced on a balanced-radius boundary by the second boundary condition.
pub fn balanced_slope(params: &EnergyParams) -> f64 {
    let p = params;
    (1.0 - 4.0 * p.a * p.a * p.c_o * p.c_o * p.alpha / ((p.a + p.b).powi(2) * p.beta)).max(0.0).sqrt()
}

/// Applies the instability criterion matching the boundary of `sol`.
pub fn instability_check(sol: &DiscSolution) -> StabilityVerdict {
    let p = sol.params;
    let b = boundary(&sol.trajectory.terminal(), &p);
    let f_ddot = Some(f_ddot_general(sol));
    let big_r = p.balanced_radius();
    let tension = p.alpha / (b.r * b.r) - p.beta;
    let (case_applied, unstable, notes) = if is_geodesic(sol) {
        if p.b == 0.0 {
            let q = tension * b.k;
            (StabilityCase::I, q < -MARGIN, format!("(alpha/r^2 - beta) K = {q:.6e}"))
        } else if p.b < 0.0 {
            (StabilityCase::II, b.r - big_r > MARGIN, format!("r = {:.6}, sqrt(alpha/beta) = {big_r:.6}", b.r))
        } else {
            (StabilityCase::III, big_r - b.r > MARGIN, format!("r = {:.6}, sqrt(alpha/beta) = {big_r:.6}", b.r))
        }
    } else if sol.case.tag == CaseTag::BalancedRadius {
        let (a, bb, c, be) = (p.a, p.b, p.c_o, p.beta);
        let threshold = be.powi(3) * (a + bb).powi(2) / (4.0 * c * c * (bb * bb * (a + bb).powi(2) * c * c + a * a * be * be));
        let sign = bb * b.kappa_g;
        (
            StabilityCase::IV,
            p.alpha - threshold > MARGIN && sign > MARGIN,
            format!("alpha threshold {threshold:.6e}, b kappa_g = {sign:.6e}, |r'| = {:.6}", balanced_slope(&p)),
        )
    } else {
        (StabilityCase::None, false, "no criterion applies to this boundary".to_string())
    };
    StabilityVerdict {
        case_applied,
        f_ddot,
        verdict: if unstable { Verdict::Unstable } else { Verdict::Inconclusive },
        notes,
    }
}

/// Flags discs that cannot minimize the energy among axially symmetric surfaces.
pub fn nonminimizing_check(sol: &DiscSolution) -> StabilityVerdict {
    let p = sol.params;
    let r = sol.radius();
    let big_r = p.balanced_radius();
    let balanced = (r - big_r).abs() <= RADIUS_TOL;
    let by_radius = balanced && -3.0 * p.a <= p.b && p.b <= p.a;
    let by_geodesic = p.b == 0.0 && is_geodesic(sol) && r > big_r;
    let notes = if by_radius {
        format!("boundary radius sqrt(alpha/beta) with b = {} in [-3a, a]", p.b)
    } else if by_geodesic {
        format!("b = 0 and geodesic boundary of radius {r:.6} > {big_r:.6}")
    } else {
        String::new()
    };
    StabilityVerdict {
        case_applied: StabilityCase::None,
        f_ddot: None,
        verdict: if by_radius || by_geodesic { Verdict::NotMinimizing } else { Verdict::Candidate },
        notes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// d(mu^2)/dsigma at the boundary, mu the profile curvature
    pub d_mu2: f64,
    pub stable_candidate: bool,
}

pub fn curvature_monotonicity(sol: &DiscSolution) -> Result<MonotonicityReport> {
    curvature_monotonicity_of(&sol.trajectory)
}

/// One-sided second-order difference of `phi'^2` at the end of a profile whose
/// terminal tangent is vertical.
pub fn curvature_monotonicity_of(traj: &Trajectory) -> Result<MonotonicityReport> {
    let end = traj.terminal();
    if end.state.phi.cos().abs() >= GEODESIC_TOL {
        return Err(Error::NotApplicable(format!("tangent not vertical, cos(phi) = {:.3e}", end.state.phi.cos())));
    }
    let l = end.state.sigma;
    let h = 1e-4 * l;
    let mu2 = |s: f64| traj.at(s).dphi.powi(2);
    let d_mu2 = (3.0 * mu2(l) - 4.0 * mu2(l - h) + mu2(l - 2.0 * h)) / (2.0 * h);
    Ok(MonotonicityReport { d_mu2, stable_candidate: d_mu2 >= -1e-6 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{integrate, EventKind, IntegratorConfig, StopSpec};
    use crate::shooting::{shoot, BoundaryCase, ShootConfig, ZoBracket};

    fn solve(tag: CaseTag, p: EnergyParams, r: f64) -> DiscSolution {
        let case = BoundaryCase::new(tag, &p).unwrap();
        let roots = shoot(&case, &p, &ZoBracket::default_for(&p), &ShootConfig::default()).unwrap();
        roots.into_iter().min_by(|x, y| (x.radius() - r).abs().total_cmp(&(y.radius() - r).abs())).unwrap()
    }

    #[test]
    fn gauss_derivative_matches_differences() {
        let p = EnergyParams::new(1.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        let cfg = IntegratorConfig::default();
        let traj = integrate(-1.149318, &p, &cfg, &StopSpec::first(EventKind::PhiReachesHalfPi)).unwrap();
        for frac in [0.3, 0.5, 0.8] {
            let s0 = frac * traj.length();
            let h = 1e-5;
            let k = |s: f64| {
                let x = traj.at(s);
                x.dphi * x.state.phi.sin() / x.state.r
            };
            let fd = (k(s0 + h) - k(s0 - h)) / (2.0 * h);
            let exact = gauss_curvature_derivative(&traj.at(s0));
            assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()), "{fd} vs {exact}");
        }
    }

    #[test]
    fn sphere_has_constant_curvature() {
        let p = EnergyParams::new(1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        let traj = integrate(1.0, &p, &IntegratorConfig::default(), &StopSpec::first(EventKind::PhiReachesHalfPi)).unwrap();
        let rep = curvature_monotonicity_of(&traj).unwrap();
        assert!(rep.d_mu2.abs() < 1e-6);
        assert!(rep.stable_candidate);
    }

    #[test]
    fn b0_geodesic_reduces_to_gauss_term() {
        let p = EnergyParams::new(1.0, 2.0, 0.0, 1.0, 1.0).unwrap();
        let sol = solve(CaseTag::B0Geodesic, p, 0.70);
        let end = sol.trajectory.terminal();
        let b = boundary(&end, &p);
        let reduced = 2.0 * PI * (p.alpha / (b.r * b.r) - p.beta) * b.k * b.r;
        let full = f_ddot_general(&sol);
        assert!((full - reduced).abs() < 1e-6 * (1.0 + reduced.abs()), "{full} vs {reduced}");
        let v = instability_check(&sol);
        assert_eq!(v.case_applied, StabilityCase::I);
    }

    #[test]
    fn geodesic_rows_are_unstable() {
        let p = EnergyParams::new(1.0, 2.0, 0.25, 1.0, 10.0).unwrap();
        let v = instability_check(&solve(CaseTag::GeodesicAtZ0, p, 0.3125));
        assert_eq!((v.case_applied, v.verdict), (StabilityCase::III, Verdict::Unstable));
        let p = EnergyParams::new(1.0, 2.0, -0.05, 1.0, 18.0).unwrap();
        let v = instability_check(&solve(CaseTag::GeodesicAtZ0, p, 0.2375));
        assert_eq!((v.case_applied, v.verdict), (StabilityCase::II, Verdict::Unstable));
    }

    #[test]
    fn nonminimality_window() {
        let p = EnergyParams::new(1.0, 2.0, 0.05, 1.0, 18.0).unwrap();
        let sol = solve(CaseTag::BalancedRadius, p, p.balanced_radius());
        assert_eq!(nonminimizing_check(&sol).verdict, Verdict::NotMinimizing);
        let p = EnergyParams::new(1.0, 2.0, -5.0, 1.0, 20.0).unwrap();
        let sol = solve(CaseTag::BalancedRadius, p, p.balanced_radius());
        assert_eq!(nonminimizing_check(&sol).verdict, Verdict::Candidate);
    }

    #[test]
    fn balanced_slope_matches_profile() {
        let p = EnergyParams::new(1.0, 2.0, 0.05, 1.0, 18.0).unwrap();
        let sol = solve(CaseTag::BalancedRadius, p, p.balanced_radius());
        let cos = sol.trajectory.terminal().state.phi.cos().abs();
        assert!((balanced_slope(&p) - cos).abs() < 1e-6);
    }
}
