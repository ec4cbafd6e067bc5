//! Silhouettes of surfaces of revolution.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 20.0;

/// SVG of the profile `(r, z)` and its mirror `(-r, z)`, scaled to a fixed
/// 400 x 400 view box with `z` pointing up.
pub fn render_silhouette(points: &[(f64, f64)]) -> Result<String> {
    if points.len() < 2 {
        return Err(Error::Domain("a silhouette needs at least two points".into()));
    }
    if points.iter().any(|(r, z)| !r.is_finite() || !z.is_finite()) {
        return Err(Error::Domain("non-finite profile point".into()));
    }
    let r_max = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
    let (z_min, z_max) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let span = (2.0 * r_max).max(z_max - z_min).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let z_mid = 0.5 * (z_min + z_max);
    let map = |r: f64, z: f64| (SIZE / 2.0 + scale * r, SIZE / 2.0 - scale * (z - z_mid));
    let polyline = |sign: f64| {
        points
            .iter()
            .map(|&(r, z)| {
                let (x, y) = map(sign * r, z);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#);
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (ax, _) = map(0.0, 0.0);
    let _ = writeln!(out, r##"<line x1="{ax:.3}" y1="0" x2="{ax:.3}" y2="{SIZE}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##);
    for sign in [1.0, -1.0] {
        let _ = writeln!(out, r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="2" points="{}"/>"##, polyline(sign));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_symmetric_and_deterministic() {
        let pts: Vec<(f64, f64)> = (0..=50).map(|i| {
            let s = std::f64::consts::PI * i as f64 / 50.0;
            (s.sin(), s.cos())
        }).collect();
        let a = render_silhouette(&pts).unwrap();
        assert_eq!(a, render_silhouette(&pts).unwrap());
        assert!(a.contains("200.000,20.000"));
        assert!(a.contains("380.000,200.000") && a.contains("20.000,200.000"));
    }
}
