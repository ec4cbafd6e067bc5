//! Modified conformal Gauss map of a disc: null checks and the norm identity.
//!
//! `cargo run --release --example conformal`

use helfrich::conformal::{gauss_map_norm_identity, light_cone_lift, modified_gauss_map, NULL_DIRECTION};
use helfrich::shooting::{shoot, BoundaryCase, CaseTag, ShootConfig, ZoBracket};
use helfrich::EnergyParams;

fn main() -> helfrich::Result<()> {
    let p = EnergyParams::new(1.0, 1.5, 0.0, 1.0, 1.0)?;
    let case = BoundaryCase::new(CaseTag::B0Geodesic, &p)?;
    let roots = shoot(&case, &p, &ZoBracket::default_for(&p), &ShootConfig::default())?;
    let sol = &roots[0];

    let report = gauss_map_norm_identity(sol);
    println!("disc z_o = {:.6}: max ||dY|^2 - 2(H^2 - K + c_o^2)| = {:.2e}", sol.z_o, report.max_residual);
    if !report.degenerate.is_empty() {
        println!("  dY degenerates near sigma = {:?}", report.degenerate);
    }

    for s in sol.trajectory.samples.iter().step_by(sol.trajectory.samples.len() / 5 + 1) {
        let st = s.state;
        let x = light_cone_lift([st.r, 0.0, st.z]);
        let y = modified_gauss_map(&st, s.h, &p);
        println!(
            "  sigma {:.4}: <X,X> {:>9.1e}  <Y,Y> {:.6}  <Y,n> {:>9.5}  H + c_o {:>9.5}",
            st.sigma,
            x.norm_sq(),
            y.norm_sq(),
            y.inner(&NULL_DIRECTION),
            s.h + p.c_o,
        );
    }
    Ok(())
}
