//! Profile tables: one header line, one row per sample, 17-digit floats.

use std::fmt::Write as _;

use crate::annulus::{AnnulusEvent, AnnulusTrajectory};
use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::ode::Trajectory;

pub const PROFILE_HEADER: &str = "sigma,r,z,phi,H,K,kappa_g,kappa_n";
pub const ANNULUS_HEADER: &str = "sigma,r,z,phi,H,K,kappa_g,kappa_n,zeta,A_bar_evaluated";

fn push_row(out: &mut String, row: &[f64]) {
    let cells: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
    let _ = writeln!(out, "{}", cells.join(","));
}

/// Samples of the profile on its requested sign branch, in header order.
pub fn profile_rows(traj: &Trajectory) -> Vec<[f64; 8]> {
    traj.oriented_samples()
        .iter()
        .map(|s| {
            let st = &s.state;
            let (sin, cos) = st.phi.sin_cos();
            let kn = sin / st.r;
            [st.sigma, st.r, st.z, st.phi, s.h, s.dphi * kn, -cos / st.r, kn]
        })
        .collect()
}

pub fn profile_csv(traj: &Trajectory) -> String {
    let mut out = format!("{PROFILE_HEADER}\n");
    for row in profile_rows(traj) {
        push_row(&mut out, &row);
    }
    out
}

fn event_name(e: AnnulusEvent) -> &'static str {
    match e {
        AnnulusEvent::TangentVertical => "tangent_vertical",
        AnnulusEvent::AxisReached => "axis_reached",
        AnnulusEvent::SigmaMax => "sigma_max",
    }
}

/// Annulus samples with `zeta` and the evaluated flux; a trailing comment line
/// records why the integration stopped.
pub fn annulus_csv(traj: &AnnulusTrajectory) -> String {
    let mut out = format!("{ANNULUS_HEADER}\n");
    for s in &traj.samples {
        let st = &s.state;
        let (sin, cos) = st.phi.sin_cos();
        push_row(&mut out, &[st.sigma, st.r, st.z, st.phi, s.h, s.k, -cos / st.r, sin / st.r, st.zeta, s.a_bar]);
    }
    let _ = writeln!(out, "# stopped: {} at sigma = {}", event_name(traj.event), fmt17(traj.end_sigma()));
    out
}

/// Reads a profile table written by [`profile_csv`] or [`annulus_csv`] and
/// returns `(r, z)` pairs.
pub fn read_profile(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let Some((hline, header)) = lines.next() else {
        return Err(Error::Config { line: 1, column: 1, message: "empty profile table".into() });
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        cols.iter().position(|c| *c == name).ok_or_else(|| Error::Config {
            line: hline + 1,
            column: 1,
            message: format!("header lacks column '{name}'"),
        })
    };
    let (ir, iz) = (find("r")?, find("z")?);
    let mut pts = Vec::new();
    for (i, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(Error::Config {
                line: i + 1,
                column: 1,
                message: format!("expected {} fields, found {}", cols.len(), cells.len()),
            });
        }
        let mut column = 1;
        let mut vals = Vec::with_capacity(cells.len());
        for cell in &cells {
            let v = cell.trim().parse::<f64>().map_err(|_| Error::Config {
                line: i + 1,
                column,
                message: format!("'{}' is not a number", cell.trim()),
            })?;
            vals.push(v);
            column += cell.len() + 1;
        }
        pts.push((vals[ir], vals[iz]));
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_back_points_and_locates_errors() {
        let text = format!("{PROFILE_HEADER}\n0,1,2,0,0,0,0,0\n# note\n1,3,4,0,0,0,0,0\n");
        assert_eq!(read_profile(&text).unwrap(), vec![(1.0, 2.0), (3.0, 4.0)]);
        let bad = format!("{PROFILE_HEADER}\n0,1,2,0,0,0,0,0\n1,3,oops,0,0,0,0,0\n");
        assert_eq!(
            read_profile(&bad).unwrap_err(),
            Error::Config { line: 3, column: 5, message: "'oops' is not a number".into() }
        );
        assert!(read_profile("").is_err());
    }
}
