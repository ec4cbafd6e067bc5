use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::EnergyParams;

/// One point of the generating curve `(r(sigma), z(sigma))` with tangent angle `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub sigma: f64,
    pub r: f64,
    pub z: f64,
    pub phi: f64,
}

/// Pointwise curvature data of the surface of revolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub h: f64,
    pub k: f64,
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub nu3: f64,
    /// half the meridian minus parallel principal curvature
    pub s: f64,
    /// `-cos(phi)/z -/+ c_o`, the mean curvature predicted by the reduced equation
    pub h_alt: f64,
}

pub fn curvatures(state: &ProfileState, phi_prime: f64, params: &EnergyParams) -> Result<CurvatureSample> {
    if !(state.r > 0.0) {
        return Err(Error::Domain(format!("curvatures need r > 0, got r = {}", state.r)));
    }
    let (sin, cos) = state.phi.sin_cos();
    let kappa_n = sin / state.r;
    Ok(CurvatureSample {
        h: 0.5 * (phi_prime + kappa_n),
        k: phi_prime * kappa_n,
        kappa_g: -cos / state.r,
        kappa_n,
        nu3: cos,
        s: 0.5 * (phi_prime - kappa_n),
        h_alt: -cos / state.z - params.sign_branch.sign() * params.c_o,
    })
}

/// `phi'(0)`, which is also `H(0)`, for a profile leaving the axis at height `z_o`.
pub fn axis_limit_curvature(z_o: f64, params: &EnergyParams) -> Result<f64> {
    if z_o == 0.0 || !z_o.is_finite() {
        return Err(Error::Domain(format!("axis height must be nonzero and finite, got {z_o}")));
    }
    Ok(-1.0 / z_o - params.sign_branch.sign() * params.c_o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SignBranch;
    use std::f64::consts::FRAC_PI_4;

    fn p(c_o: f64) -> EnergyParams {
        EnergyParams::new(1.0, c_o, 0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn unit_sphere_point() {
        let s = ProfileState { sigma: FRAC_PI_4, r: FRAC_PI_4.sin(), z: FRAC_PI_4.cos(), phi: -FRAC_PI_4 };
        let c = curvatures(&s, -1.0, &p(0.0)).unwrap();
        assert!((c.h + 1.0).abs() < 1e-15);
        assert!((c.k - 1.0).abs() < 1e-15);
        assert!((c.h_alt - c.h).abs() < 1e-15);
    }

    #[test]
    fn vertical_tangent_is_geodesic() {
        let s = ProfileState { sigma: 1.0, r: 0.7, z: -0.3, phi: std::f64::consts::FRAC_PI_2 };
        let c = curvatures(&s, 2.0, &p(1.0)).unwrap();
        assert!(c.kappa_g.abs() < 1e-15);
        assert!(c.nu3.abs() < 1e-15);
    }

    #[test]
    fn zero_radius_is_rejected() {
        let s = ProfileState { sigma: 0.0, r: 0.0, z: 1.0, phi: 0.0 };
        assert!(curvatures(&s, 1.0, &p(0.0)).is_err());
    }

    #[test]
    fn axis_limit() {
        assert_eq!(axis_limit_curvature(1.0, &p(0.0)).unwrap(), -1.0);
        assert_eq!(axis_limit_curvature(1.0, &p(2.0)).unwrap(), -3.0);
        let plus = p(0.0).with_branch(SignBranch::Plus);
        assert_eq!(axis_limit_curvature(-1.0, &plus).unwrap(), 1.0);
        assert!(axis_limit_curvature(0.0, &p(1.0)).is_err());
    }
}
