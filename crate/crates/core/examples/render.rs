//! Write the profile CSV and an SVG silhouette of one disc to a temporary directory.
//!
//! `cargo run --release --example render [out_dir]`

use std::path::PathBuf;

use helfrich::io::csv::{profile_csv, read_profile};
use helfrich::io::svg::render_silhouette;
use helfrich::shooting::{shoot, BoundaryCase, CaseTag, ShootConfig, ZoBracket};
use helfrich::EnergyParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let p = EnergyParams::new(1.0, 2.0, 0.0, 1.0, 1.0)?;
    let case = BoundaryCase::new(CaseTag::B0Geodesic, &p)?;
    let roots = shoot(&case, &p, &ZoBracket::default_for(&p), &ShootConfig::default())?;
    let sol = roots.last().expect("shoot returns at least one root");

    let csv = profile_csv(&sol.trajectory);
    let svg = render_silhouette(&read_profile(&csv)?)?;
    std::fs::write(dir.join("disc.csv"), &csv)?;
    std::fs::write(dir.join("disc.svg"), &svg)?;
    println!("wrote {} and disc.svg ({} samples, z_o = {:.5})", dir.join("disc.csv").display(), csv.lines().count() - 1, sol.z_o);
    Ok(())
}
