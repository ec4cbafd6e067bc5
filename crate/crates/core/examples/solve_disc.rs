//! Shoot for the critical discs of one mixed-condition parameter set and list them.
//!
//! `cargo run --release --example solve_disc`

use helfrich::io::config::RunConfig;
use helfrich::run::solve;
use helfrich::shooting::CaseTag;
use helfrich::EnergyParams;

fn main() -> helfrich::Result<()> {
    let params = EnergyParams::new(1.0, 2.0, 1.0, 1.0, 1.0)?;
    let cfg = RunConfig::new("mixed c_o=2", params, CaseTag::MixedCondition);
    let out = solve(&cfg)?;

    println!("{} roots", out.roots.len());
    for (sol, rk) in out.roots.iter().zip(&out.ranked) {
        let e = rk.energy.as_ref().map_or(f64::NAN, |e| e.total);
        println!(
            "  z_o {:>9.5}  L {:>8.5}  r {:.5}  E {:>9.4}  embedded {:<5}  solved as {}",
            sol.z_o,
            sol.length,
            sol.radius(),
            e,
            rk.embedded,
            sol.solved_as.name()
        );
    }
    if let Some(s) = out.selected_root() {
        println!("principal root: z_o = {:.6}, boundary radius {:.6}", s.z_o, s.radius());
    }
    Ok(())
}
