//! Break the energy of a disc into its pieces and compare with the lower bound.
//!
//! `cargo run --release --example energy_budget`

use helfrich::energy::{energy, lower_bound};
use helfrich::shooting::{shoot, BoundaryCase, CaseTag, ShootConfig, ZoBracket};
use helfrich::EnergyParams;

fn main() -> helfrich::Result<()> {
    let p = EnergyParams::new(1.0, 1.0, 0.0, 1.0, 4.0)?;
    let case = BoundaryCase::new(CaseTag::B0Geodesic, &p)?;
    let roots = shoot(&case, &p, &ZoBracket::default_for(&p), &ShootConfig::default())?;
    let bound = lower_bound(&p);
    println!("E_D = {:.6}", bound.e_d);

    for sol in roots.iter().take(3) {
        let e = energy(sol)?;
        println!("z_o = {:.6}, r = {:.6}", sol.z_o, sol.radius());
        println!("  bending   {:>12.6}", e.surface_bending);
        println!("  gauss     {:>12.6} (closed form {:.6})", e.surface_gauss, e.surface_gauss_closed);
        println!("  boundary  {:>12.6}", e.boundary_energy);
        println!("  total     {:>12.6}  >= E_D: {}", e.total, e.total >= bound.e_d - 1e-9);
        println!("  rescaling residual {:.2e}, flux {:.2e}", e.rescaling_residual, e.flux_max);
    }
    Ok(())
}
