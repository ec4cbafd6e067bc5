use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which sign the spontaneous curvature carries in the angle equation.
///
/// `Minus` is canonical: the angle equation reads `phi' = -2 cos(phi)/z - sin(phi)/r - 2 c_o`
/// and the unit normal has vertical component `cos(phi)`. `Plus` is its mirror image under
/// `z -> -z`; everything is computed on the canonical branch and reflected on output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SignBranch {
    #[default]
    Minus,
    Plus,
}

impl SignBranch {
    /// +1 for the canonical branch, -1 for the mirrored one.
    pub fn sign(self) -> f64 {
        match self {
            SignBranch::Minus => 1.0,
            SignBranch::Plus => -1.0,
        }
    }
}

/// Coefficients of the Euler-Helfrich energy
/// `a ∫(H + c_o)^2 + b ∫K + ∮(alpha kappa^2 + beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub a: f64,
    pub c_o: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub sign_branch: SignBranch,
}

impl EnergyParams {
    pub fn new(a: f64, c_o: f64, b: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = EnergyParams { a, c_o, b, alpha, beta, sign_branch: SignBranch::Minus };
        p.validate()?;
        Ok(p)
    }

    pub fn with_branch(mut self, branch: SignBranch) -> Self {
        self.sign_branch = branch;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.a, self.c_o, self.b, self.alpha, self.beta];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("energy coefficients must be finite".into()));
        }
        if self.a <= 0.0 {
            return Err(Error::Domain(format!("a must be positive, got {}", self.a)));
        }
        if self.alpha <= 0.0 {
            return Err(Error::Domain(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.beta <= 0.0 {
            return Err(Error::Domain(format!("beta must be positive, got {}", self.beta)));
        }
        Ok(())
    }

    /// `2 sqrt(alpha beta) - |b|`; the energy is bounded below iff this is non-negative.
    pub fn e_underline(&self) -> f64 {
        2.0 * (self.alpha * self.beta).sqrt() - self.b.abs()
    }

    pub fn energy_bounded_below(&self) -> bool {
        self.e_underline() >= 0.0
    }

    /// Radius at which the boundary term `alpha/r + beta r` is stationary.
    pub fn balanced_radius(&self) -> f64 {
        (self.alpha / self.beta).sqrt()
    }

    /// Parameters seen after scaling the surface by `t`.
    pub fn rescaled(&self, t: f64) -> Self {
        EnergyParams {
            c_o: self.c_o / t,
            alpha: self.alpha * t,
            beta: self.beta / t,
            ..*self
        }
    }

    /// Spontaneous curvature as it enters the canonical-branch equations.
    pub(crate) fn c(&self) -> f64 {
        self.c_o
    }

    /// Canonical-branch copy.
    pub(crate) fn canonical(&self) -> Self {
        self.with_branch(SignBranch::Minus)
    }
}
