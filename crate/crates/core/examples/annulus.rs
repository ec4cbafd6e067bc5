//! Integrate an annulus profile with nonzero flux and watch the first integral.
//!
//! `cargo run --release --example annulus`

use helfrich::annulus::{el1_residual, flux_drift, integrate_annulus, noncmc_violation, AnnulusState, AnnulusStop};
use helfrich::ode::IntegratorConfig;
use helfrich::EnergyParams;

fn main() -> helfrich::Result<()> {
    let p = EnergyParams::new(1.0, 0.5, 0.0, 1.0, 1.0)?;
    let init = AnnulusState { sigma: 0.3, r: 0.3f64.sin(), z: 0.3f64.cos(), phi: -0.3, zeta: -1.0 };
    let cfg = IntegratorConfig { dense_samples: 400, ..Default::default() };

    for a_bar in [0.0, 0.1, 0.5] {
        let t = integrate_annulus(&init, a_bar, &p, &cfg, &AnnulusStop::default())?;
        println!(
            "A = {a_bar:<4} stop {:?} at sigma {:.4}: flux drift {:.1e}, EL1 {:.1e}, non-CMC defect {:.3}",
            t.event,
            t.end_sigma(),
            flux_drift(&t),
            el1_residual(&t, 1e-4, 0.05),
            noncmc_violation(&t),
        );
    }
    Ok(())
}
