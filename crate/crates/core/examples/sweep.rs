//! Follow the principal mixed-condition disc as the spontaneous curvature grows.
//!
//! `cargo run --release --example sweep`

use helfrich::io::config::RunConfig;
use helfrich::run::solve_all;
use helfrich::select::SelectRule;
use helfrich::shooting::CaseTag;
use helfrich::EnergyParams;

fn main() -> helfrich::Result<()> {
    let grid = [0.5, 1.0, 2.0, 3.0, 5.0];
    let cfgs = grid
        .iter()
        .map(|&c| {
            let p = EnergyParams::new(1.0, c, -0.5, 1.0, 1.0)?;
            let mut cfg = RunConfig::new(&format!("c_o {c}"), p, CaseTag::MixedCondition);
            cfg.select = SelectRule::Principal;
            Ok(cfg)
        })
        .collect::<helfrich::Result<Vec<_>>>()?;

    println!("{:>5} {:>10} {:>10} {:>10}", "c_o", "z_o", "radius", "energy");
    for (c, res) in grid.iter().zip(solve_all(&cfgs)) {
        match res.as_ref().ok().and_then(|o| o.selected_root().zip(o.selected_ranked())) {
            Some((s, rk)) => {
                let e = rk.energy.as_ref().map_or(f64::NAN, |e| e.total);
                println!("{c:>5} {:>10.5} {:>10.5} {e:>10.4}", s.z_o, s.radius());
            }
            None => println!("{c:>5} no disc"),
        }
    }
    Ok(())
}
