//! One complete solve: shooting, energies, root selection, stability tests.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::config::RunConfig;
use crate::select::{rank, select, Ranked};
use crate::shooting::{classify_cmc, shoot, CmcSolution, DiscSolution};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub roots: Vec<DiscSolution>,
    pub ranked: Vec<Ranked>,
    /// index into `roots`
    pub selected: Option<usize>,
    pub cmc: Vec<CmcSolution>,
}

impl Outcome {
    pub fn selected_root(&self) -> Option<&DiscSolution> {
        self.selected.map(|i| &self.roots[i])
    }

    pub fn selected_ranked(&self) -> Option<&Ranked> {
        self.selected.map(|i| &self.ranked[i])
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty() && self.cmc.is_empty()
    }
}

/// Runs the configured shooting problem. A bracket without roots is not an
/// error here; the outcome is then empty apart from closed-form candidates.
pub fn solve(cfg: &RunConfig) -> Result<Outcome> {
    let case = cfg.boundary_case()?;
    let roots = match shoot(&case, &cfg.params, &cfg.bracket(), &cfg.shoot) {
        Ok(r) => r,
        Err(Error::NoRoot) => Vec::new(),
        Err(e) => return Err(e),
    };
    let ranked = rank(&roots);
    let selected = select(&roots, &ranked, cfg.select, cfg.reference.as_ref());
    Ok(Outcome { roots, ranked, selected, cmc: classify_cmc(&cfg.params) })
}

/// Solves several configurations on the current rayon pool; results keep the
/// input order.
pub fn solve_all(cfgs: &[RunConfig]) -> Vec<Result<Outcome>> {
    cfgs.par_iter().map(solve).collect()
}
