//! Flat `key = value` run configurations with `#` comment lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::annulus::{AnnulusState, AnnulusStop};
use crate::error::{Error, Result};
use crate::io::fmt17;
use crate::ode::IntegratorConfig;
use crate::params::{EnergyParams, SignBranch};
use crate::select::{Reference, SelectRule};
use crate::shooting::{BoundaryCase, CaseTag, ShootConfig, ZoBracket};

struct Entry {
    line: usize,
    column: usize,
    value: String,
}

/// Parsed key/value pairs, each remembered with its position for error messages.
struct Entries {
    map: BTreeMap<String, Entry>,
}

fn config_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Config { line, column, message: message.into() }
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some(eq) = raw.find('=') else {
                return Err(config_error(line, 1, "expected key = value"));
            };
            let key = raw[..eq].trim();
            if key.is_empty() {
                return Err(config_error(line, 1, "missing key"));
            }
            let after = &raw[eq + 1..];
            let value = after.trim();
            let column = eq + 2 + (after.len() - after.trim_start().len());
            let entry = Entry { line, column, value: value.to_string() };
            if map.insert(key.to_string(), entry).is_some() {
                return Err(config_error(line, 1, format!("duplicate key '{key}'")));
            }
        }
        Ok(Entries { map })
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.map.remove(key)
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| config_error(e.line, e.column, format!("'{key}' is not a finite number: '{}'", e.value))),
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn required(&mut self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| config_error(0, 0, format!("missing required key '{key}'")))
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some(e) => e
                .value
                .parse::<usize>()
                .map_err(|_| config_error(e.line, e.column, format!("'{key}' is not a non-negative integer: '{}'", e.value))),
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        self.take(key).map(|e| e.value)
    }

    fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((key, e)) => Err(config_error(e.line, 1, format!("unknown key '{key}'"))),
        }
    }
}

fn parse_branch(e: Option<Entry>) -> Result<SignBranch> {
    match e {
        None => Ok(SignBranch::Minus),
        Some(e) => match e.value.as_str() {
            "minus" => Ok(SignBranch::Minus),
            "plus" => Ok(SignBranch::Plus),
            v => Err(config_error(e.line, e.column, format!("branch must be 'minus' or 'plus', got '{v}'"))),
        },
    }
}

fn branch_name(b: SignBranch) -> &'static str {
    match b {
        SignBranch::Minus => "minus",
        SignBranch::Plus => "plus",
    }
}

fn parse_params(en: &mut Entries) -> Result<EnergyParams> {
    let a = en.required("a")?;
    let c_o = en.required("c_o")?;
    let b = en.f64_or("b", 0.0)?;
    let alpha = en.required("alpha")?;
    let beta = en.required("beta")?;
    let branch = parse_branch(en.take("branch"))?;
    let p = EnergyParams { a, c_o, b, alpha, beta, sign_branch: branch };
    p.validate().map_err(|e| config_error(0, 0, e.to_string()))?;
    Ok(p)
}

fn write_params(out: &mut String, p: &EnergyParams) {
    for (k, v) in [("a", p.a), ("c_o", p.c_o), ("b", p.b), ("alpha", p.alpha), ("beta", p.beta)] {
        let _ = writeln!(out, "{k} = {}", fmt17(v));
    }
    let _ = writeln!(out, "branch = {}", branch_name(p.sign_branch));
}

fn parse_integrator(en: &mut Entries) -> Result<IntegratorConfig> {
    let d = IntegratorConfig::default();
    let cfg = IntegratorConfig {
        rel_tol: en.f64_or("rel_tol", d.rel_tol)?,
        abs_tol: en.f64_or("abs_tol", d.abs_tol)?,
        eps_axis: en.f64_or("eps_axis", d.eps_axis)?,
        max_sigma: en.f64_or("max_sigma", d.max_sigma)?,
        dense_samples: en.usize_or("dense_samples", d.dense_samples)?,
    };
    cfg.validate().map_err(|e| config_error(0, 0, e.to_string()))?;
    Ok(cfg)
}

fn write_integrator(out: &mut String, c: &IntegratorConfig) {
    for (k, v) in [("rel_tol", c.rel_tol), ("abs_tol", c.abs_tol), ("eps_axis", c.eps_axis), ("max_sigma", c.max_sigma)] {
        let _ = writeln!(out, "{k} = {}", fmt17(v));
    }
    let _ = writeln!(out, "dense_samples = {}", c.dense_samples);
}

/// Parses `lo:hi` intervals separated by commas, e.g. `-100:-0.01, 0.01:100`.
pub fn parse_intervals(s: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    s.split(',')
        .map(|part| {
            let (lo, hi) = part.split_once(':').ok_or_else(|| format!("interval '{}' is not lo:hi", part.trim()))?;
            let lo = lo.trim().parse::<f64>().map_err(|_| format!("bad interval bound '{}'", lo.trim()))?;
            let hi = hi.trim().parse::<f64>().map_err(|_| format!("bad interval bound '{}'", hi.trim()))?;
            Ok((lo, hi))
        })
        .collect()
}

pub fn format_intervals(iv: &[(f64, f64)]) -> String {
    iv.iter().map(|(lo, hi)| format!("{}:{}", fmt17(*lo), fmt17(*hi))).collect::<Vec<_>>().join(", ")
}

/// Where a run writes its results, relative to the output directory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    pub profile_csv: Option<String>,
    pub record_json: Option<String>,
}

/// Everything needed to reproduce one shooting run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub label: String,
    pub params: EnergyParams,
    pub case: CaseTag,
    /// `None` means the parameter-scaled default bracket
    pub bracket_intervals: Option<Vec<(f64, f64)>>,
    pub bracket_points: usize,
    pub shoot: ShootConfig,
    pub select: SelectRule,
    pub reference: Option<Reference>,
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn new(label: &str, params: EnergyParams, case: CaseTag) -> Self {
        RunConfig {
            label: label.to_string(),
            params,
            case,
            bracket_intervals: None,
            bracket_points: ZoBracket::default_for(&params).points,
            shoot: ShootConfig::default(),
            select: SelectRule::Principal,
            reference: None,
            outputs: Outputs::default(),
        }
    }

    pub fn boundary_case(&self) -> Result<BoundaryCase> {
        BoundaryCase::new(self.case, &self.params)
    }

    pub fn bracket(&self) -> ZoBracket {
        match &self.bracket_intervals {
            Some(iv) => ZoBracket { intervals: iv.clone(), points: self.bracket_points },
            None => ZoBracket { points: self.bracket_points, ..ZoBracket::default_for(&self.params) },
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut en = Entries::parse(text)?;
        let label = en.string("label").unwrap_or_default();
        let case_entry = en.take("case").ok_or_else(|| config_error(0, 0, "missing required key 'case'"))?;
        let case = CaseTag::parse(&case_entry.value).ok_or_else(|| {
            config_error(case_entry.line, case_entry.column, format!("unknown case '{}'", case_entry.value))
        })?;
        let params = parse_params(&mut en)?;
        BoundaryCase::new(case, &params).map_err(|e| config_error(case_entry.line, case_entry.column, e.to_string()))?;
        let bracket_intervals = match en.take("bracket") {
            None => None,
            Some(e) => Some(parse_intervals(&e.value).map_err(|m| config_error(e.line, e.column, m))?),
        };
        let bracket_points = en.usize_or("bracket_points", ZoBracket::default_for(&params).points)?;
        let integrator = parse_integrator(&mut en)?;
        let d = ShootConfig::default();
        let shoot = ShootConfig {
            integrator,
            scan_rel_tol: en.f64_or("scan_rel_tol", d.scan_rel_tol)?,
            tol: en.f64_or("tol", d.tol)?,
            max_events: en.usize_or("max_events", d.max_events)?,
        };
        let select = match en.take("select") {
            None => SelectRule::Principal,
            Some(e) => SelectRule::parse(&e.value)
                .ok_or_else(|| config_error(e.line, e.column, format!("unknown selection rule '{}'", e.value)))?,
        };
        let reference = match (en.f64("reference_radius")?, en.f64("reference_energy")?) {
            (Some(radius), Some(energy)) => Some(Reference { radius, energy }),
            (None, None) => None,
            _ => return Err(config_error(0, 0, "reference_radius and reference_energy go together")),
        };
        if select == SelectRule::Nearest && reference.is_none() {
            return Err(config_error(0, 0, "select = nearest needs reference_radius and reference_energy"));
        }
        let outputs = Outputs { profile_csv: en.string("profile_csv"), record_json: en.string("record_json") };
        en.finish()?;
        let cfg = RunConfig { label, params, case, bracket_intervals, bracket_points, shoot, select, reference, outputs };
        cfg.bracket().validate().map_err(|e| config_error(0, 0, e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical text form; `parse(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            let _ = writeln!(out, "label = {}", self.label);
        }
        let _ = writeln!(out, "case = {}", self.case.name());
        write_params(&mut out, &self.params);
        if let Some(iv) = &self.bracket_intervals {
            let _ = writeln!(out, "bracket = {}", format_intervals(iv));
        }
        let _ = writeln!(out, "bracket_points = {}", self.bracket_points);
        write_integrator(&mut out, &self.shoot.integrator);
        let _ = writeln!(out, "scan_rel_tol = {}", fmt17(self.shoot.scan_rel_tol));
        let _ = writeln!(out, "tol = {}", fmt17(self.shoot.tol));
        let _ = writeln!(out, "max_events = {}", self.shoot.max_events);
        let _ = writeln!(out, "select = {}", self.select.name());
        if let Some(r) = &self.reference {
            let _ = writeln!(out, "reference_radius = {}", fmt17(r.radius));
            let _ = writeln!(out, "reference_energy = {}", fmt17(r.energy));
        }
        if let Some(p) = &self.outputs.profile_csv {
            let _ = writeln!(out, "profile_csv = {p}");
        }
        if let Some(p) = &self.outputs.record_json {
            let _ = writeln!(out, "record_json = {p}");
        }
        out
    }
}

/// Initial data and stopping rules for an annulus integration.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusConfig {
    pub label: String,
    pub params: EnergyParams,
    pub init: AnnulusState,
    pub a_bar: f64,
    pub stop: AnnulusStop,
    pub integrator: IntegratorConfig,
    pub profile_csv: Option<String>,
}

impl AnnulusConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut en = Entries::parse(text)?;
        let label = en.string("label").unwrap_or_default();
        let params = parse_params(&mut en)?;
        let init = AnnulusState {
            sigma: en.f64_or("sigma0", 0.0)?,
            r: en.required("r0")?,
            z: en.required("z0")?,
            phi: en.required("phi0")?,
            zeta: en.required("zeta0")?,
        };
        let a_bar = en.required("a_bar")?;
        let d = AnnulusStop::default();
        let stop = AnnulusStop {
            sigma_max: en.f64_or("sigma_max", d.sigma_max)?,
            cos_floor: en.f64_or("cos_floor", d.cos_floor)?,
            r_floor: en.f64_or("r_floor", d.r_floor)?,
        };
        let integrator = parse_integrator(&mut en)?;
        let profile_csv = en.string("profile_csv");
        en.finish()?;
        Ok(AnnulusConfig { label, params, init, a_bar, stop, integrator, profile_csv })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            let _ = writeln!(out, "label = {}", self.label);
        }
        write_params(&mut out, &self.params);
        let i = &self.init;
        for (k, v) in [
            ("sigma0", i.sigma),
            ("r0", i.r),
            ("z0", i.z),
            ("phi0", i.phi),
            ("zeta0", i.zeta),
            ("a_bar", self.a_bar),
            ("sigma_max", self.stop.sigma_max),
            ("cos_floor", self.stop.cos_floor),
            ("r_floor", self.stop.r_floor),
        ] {
            let _ = writeln!(out, "{k} = {}", fmt17(v));
        }
        write_integrator(&mut out, &self.integrator);
        if let Some(p) = &self.profile_csv {
            let _ = writeln!(out, "profile_csv = {p}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# b = 0 disc\nlabel = small cap\ncase = b0_geodesic\na = 1\nc_o = 1.1\nalpha = 1\nbeta = 1\n";

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.label, "small cap");
        assert_eq!(c.case, CaseTag::B0Geodesic);
        assert_eq!(c.params.c_o, 1.1);
        assert_eq!(c.params.b, 0.0);
        assert_eq!(c.select, SelectRule::Principal);
    }

    #[test]
    fn round_trips() {
        let mut c = RunConfig::parse(SAMPLE).unwrap();
        c.bracket_intervals = Some(vec![(-3.0, -0.1), (0.2, 1.0 / 3.0)]);
        c.reference = Some(Reference { radius: 0.96, energy: 12.6 });
        c.select = SelectRule::Nearest;
        c.outputs.profile_csv = Some("p.csv".into());
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn reports_position_of_bad_number() {
        let err = RunConfig::parse("case = b0_geodesic\na = 1\nc_o =  x1.1\nalpha = 1\nbeta = 1\n").unwrap_err();
        assert_eq!(err, Error::Config { line: 3, column: 8, message: "'c_o' is not a finite number: 'x1.1'".into() });
    }

    #[test]
    fn rejects_case_mismatch() {
        let err = RunConfig::parse("case = geodesic_at_z0\na = 1\nc_o = 2\nb = 0\nalpha = 1\nbeta = 1\n").unwrap_err();
        match err {
            Error::Config { line, message, .. } => {
                assert_eq!(line, 1);
                assert!(message.contains("requires b != 0"), "{message}");
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(RunConfig::parse(&format!("{SAMPLE}colour = red\n")), Err(Error::Config { line: 8, .. })));
        assert!(matches!(RunConfig::parse(&format!("{SAMPLE}a = 2\n")), Err(Error::Config { line: 8, .. })));
    }

    #[test]
    fn annulus_round_trip() {
        let text = "a = 1\nc_o = 0\nalpha = 1\nbeta = 1\nr0 = 1\nz0 = 1\nphi0 = 0\nzeta0 = 0\na_bar = 0.1\n";
        let c = AnnulusConfig::parse(text).unwrap();
        assert_eq!(AnnulusConfig::parse(&c.to_text()).unwrap(), c);
    }
}
