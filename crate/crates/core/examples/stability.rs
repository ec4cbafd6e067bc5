//! Second variation along the one-parameter family of truncated discs.
//!
//! Prints the closed form of f'' next to a central difference, then the
//! instability and non-minimizing verdicts.
//!
//! `cargo run --release --example stability`

use helfrich::shooting::{shoot, BoundaryCase, CaseTag, ShootConfig, ZoBracket};
use helfrich::stability::{f_ddot_finite_difference, f_ddot_general, f_dot, instability_check, nonminimizing_check};
use helfrich::EnergyParams;

fn main() -> helfrich::Result<()> {
    let p = EnergyParams::new(1.0, 1.0, -0.5, 1.0, 1.0)?;
    for tag in [CaseTag::GeodesicAtZ0, CaseTag::MixedCondition] {
        let case = BoundaryCase::new(tag, &p)?;
        let roots = match shoot(&case, &p, &ZoBracket::default_for(&p), &ShootConfig::default()) {
            Ok(r) => r,
            Err(e) => {
                println!("{}: {e}", tag.name());
                continue;
            }
        };
        println!("{}", tag.name());
        for sol in &roots {
            let fd = f_ddot_finite_difference(sol, 1e-3 * sol.length)?;
            println!(
                "  z_o {:>9.5}  f' {:>9.2e}  f'' {:>11.5}  fd {:>11.5}  {:?} / {:?}",
                sol.z_o,
                f_dot(sol),
                f_ddot_general(sol),
                fd,
                instability_check(sol).verdict,
                nonminimizing_check(sol).verdict,
            );
        }
    }
    Ok(())
}
