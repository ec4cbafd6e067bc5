//! Picking one disc out of the roots a shooting run returns.

use serde::{Deserialize, Serialize};

use crate::energy::{energy, EnergyReport};
use crate::shooting::{is_embedded, DiscSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectRule {
    /// lowest energy among embedded roots ending at the first crossing of the
    /// boundary event, falling back to all embedded roots
    Principal,
    /// lowest energy among embedded roots
    LowestEnergy,
    /// closest to a reference radius and energy
    Nearest,
}

impl SelectRule {
    pub fn name(self) -> &'static str {
        match self {
            SelectRule::Principal => "principal",
            SelectRule::LowestEnergy => "lowest_energy",
            SelectRule::Nearest => "nearest",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "principal" => Some(SelectRule::Principal),
            "lowest_energy" => Some(SelectRule::LowestEnergy),
            "nearest" => Some(SelectRule::Nearest),
            _ => None,
        }
    }
}

/// Reference boundary radius and energy, with the tolerances a match must meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub radius: f64,
    pub energy: f64,
}

impl Reference {
    pub fn radius_tol(&self) -> f64 {
        0.015
    }

    pub fn energy_tol(&self) -> f64 {
        (0.005 * self.energy.abs()).max(0.15)
    }

    /// Distance in units of the tolerances; a match has `distance <= 1`.
    pub fn distance(&self, radius: f64, energy: f64) -> f64 {
        ((radius - self.radius).abs() / self.radius_tol()).max((energy - self.energy).abs() / self.energy_tol())
    }

    pub fn matches(&self, radius: f64, energy: f64) -> bool {
        self.distance(radius, energy) <= 1.0
    }
}

/// A root together with the quantities selection looks at.
#[derive(Debug, Clone)]
pub struct Ranked {
    pub index: usize,
    pub embedded: bool,
    pub energy: Option<EnergyReport>,
}

pub fn rank(roots: &[DiscSolution]) -> Vec<Ranked> {
    roots
        .iter()
        .enumerate()
        .map(|(index, s)| Ranked { index, embedded: is_embedded(&s.trajectory), energy: energy(s).ok() })
        .collect()
}

/// Index of the selected root, or `None` when no root has a usable energy.
pub fn select(roots: &[DiscSolution], ranked: &[Ranked], rule: SelectRule, reference: Option<&Reference>) -> Option<usize> {
    let total = |r: &Ranked| r.energy.as_ref().map(|e| e.total);
    let lowest = |filter: &dyn Fn(&Ranked) -> bool| {
        ranked
            .iter()
            .filter(|r| filter(r) && total(r).is_some())
            .min_by(|x, y| total(x).unwrap().total_cmp(&total(y).unwrap()))
            .map(|r| r.index)
    };
    match (rule, reference) {
        (SelectRule::Nearest, Some(re)) => ranked
            .iter()
            .filter(|r| total(r).is_some())
            .min_by(|x, y| {
                let d = |r: &Ranked| re.distance(roots[r.index].radius(), total(r).unwrap());
                d(x).total_cmp(&d(y)).then(y.embedded.cmp(&x.embedded))
            })
            .map(|r| r.index),
        (SelectRule::Principal, _) => lowest(&|r| r.embedded && roots[r.index].event_index == 0)
            .or_else(|| lowest(&|r| r.embedded))
            .or_else(|| lowest(&|_| true)),
        _ => lowest(&|r| r.embedded).or_else(|| lowest(&|_| true)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_follow_the_larger_bound() {
        let r = Reference { radius: 0.5, energy: 10.0 };
        assert_eq!(r.energy_tol(), 0.15);
        let r = Reference { radius: 0.5, energy: 72.5 };
        assert!((r.energy_tol() - 0.3625).abs() < 1e-12);
        assert!(r.matches(0.51, 72.8));
        assert!(!r.matches(0.52, 72.5));
    }

    #[test]
    fn rule_names_round_trip() {
        for r in [SelectRule::Principal, SelectRule::LowestEnergy, SelectRule::Nearest] {
            assert_eq!(SelectRule::parse(r.name()), Some(r));
        }
    }
}
