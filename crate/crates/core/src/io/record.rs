//! JSON result records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::energy::EnergyReport;
use crate::geometry::CurvatureSample;
use crate::io::config::RunConfig;
use crate::params::EnergyParams;
use crate::run::Outcome;
use crate::select::{Ranked, Reference};
use crate::shooting::{BoundaryResiduals, CaseTag, CmcSolution, DiscSolution};
use crate::stability::{f_dot, instability_check, nonminimizing_check, StabilityVerdict};

pub const SOLVER_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSummary {
    pub z_o: f64,
    pub length: f64,
    pub radius: f64,
    pub case: CaseTag,
    pub solved_as: CaseTag,
    pub event_index: usize,
    pub embedded: bool,
    pub residuals: BTreeMap<String, f64>,
    pub diagnostics: BoundaryResiduals,
    pub boundary: CurvatureSample,
    /// max of `|(H + c_o) z + cos(phi)|` over the samples
    pub noncmc_max: f64,
    pub f_dot: f64,
    pub energy: Option<EnergyReport>,
    pub instability: StabilityVerdict,
    pub minimality: StabilityVerdict,
}

pub fn summarize(sol: &DiscSolution, ranked: &Ranked) -> RootSummary {
    let p = sol.params;
    RootSummary {
        z_o: sol.z_o,
        length: sol.length,
        radius: sol.radius(),
        case: sol.case.tag,
        solved_as: sol.solved_as,
        event_index: sol.event_index,
        embedded: ranked.embedded,
        residuals: sol.residuals.clone(),
        diagnostics: sol.diagnostics,
        boundary: sol.boundary,
        noncmc_max: sol.trajectory.samples.iter().map(|s| s.noncmc_residual(&p).abs()).fold(0.0, f64::max),
        f_dot: f_dot(sol),
        energy: ranked.energy.clone(),
        instability: instability_check(sol),
        minimality: nonminimizing_check(sol),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub label: String,
    /// SHA-256 of the canonical config text
    pub config_hash: String,
    pub solver_version: String,
    /// seconds since the Unix epoch
    pub timestamp: u64,
    pub params: EnergyParams,
    pub case: CaseTag,
    pub roots: Vec<RootSummary>,
    pub selected: Option<usize>,
    pub cmc: Vec<CmcSolution>,
    pub reference: Option<Reference>,
    /// whether the selected root lies within tolerance of the reference
    pub reference_match: Option<bool>,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(cfg.to_text().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `SOURCE_DATE_EPOCH` when set, so that records can be made byte-reproducible,
/// otherwise the current time.
pub fn timestamp_now() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()).unwrap_or_else(|| {
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
    })
}

pub fn build_record(cfg: &RunConfig, outcome: &Outcome, timestamp: u64) -> ResultRecord {
    let roots: Vec<RootSummary> = outcome.roots.iter().zip(&outcome.ranked).map(|(s, r)| summarize(s, r)).collect();
    let reference_match = match (&cfg.reference, outcome.selected) {
        (Some(re), Some(i)) => Some(roots[i].energy.as_ref().is_some_and(|e| re.matches(roots[i].radius, e.total))),
        (Some(_), None) => Some(false),
        _ => None,
    };
    ResultRecord {
        label: cfg.label.clone(),
        config_hash: config_hash(cfg),
        solver_version: SOLVER_VERSION.to_string(),
        timestamp,
        params: cfg.params,
        case: cfg.case,
        roots,
        selected: outcome.selected,
        cmc: outcome.cmc.clone(),
        reference: cfg.reference,
        reference_match,
    }
}
