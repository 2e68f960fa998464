use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Which decay/regularity hypothesis the potential satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Regularity {
    /// `|V'(r)| <= C (r+1)^{-beta}` with `beta > 1`.
    Lipschitz { beta: f64 },
    /// `V` in `C^alpha_4` with `0 < alpha < 1`, handled through mollification.
    Holder { alpha: f64 },
}

impl Regularity {
    /// Decay exponent entering `B_1` and the upper bound on `s`.
    pub fn beta(&self) -> f64 {
        match *self {
            Regularity::Lipschitz { beta } => beta,
            Regularity::Holder { .. } => 4.0,
        }
    }

    pub fn is_holder(&self) -> bool {
        matches!(self, Regularity::Holder { .. })
    }

    /// Open interval of admissible `s`.
    pub fn s_range(&self) -> (f64, f64) {
        match *self {
            Regularity::Lipschitz { beta } => (0.5, 0.25 * (beta + 1.0).min(3.0)),
            Regularity::Holder { .. } => (0.5, 0.75),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Regularity::Lipschitz { beta } if !(beta > 1.0) || !beta.is_finite() => {
                config_err(format!("Lipschitz decay exponent beta = {beta} must exceed 1"))
            }
            Regularity::Holder { alpha } if !(alpha > 0.0 && alpha < 1.0) => config_err(format!(
                "Hölder exponent alpha = {alpha} must lie in (0, 1)"
            )),
            _ => Ok(()),
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::InvalidConfig(msg.into()))
}

/// The full parameter pack tying weight, phase and energy together.
///
/// Derived quantities (`a0 = tau0^ell`, `a = a0 h^{-m}`, `tau`, `theta`) are computed on
/// demand so that a serialized config is the single source of truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlemanConfig {
    pub regularity: Regularity,
    pub k: f64,
    pub k0: f64,
    pub s: f64,
    pub tau0: f64,
    pub ell: f64,
    pub m: f64,
    pub energy: f64,
    pub h: f64,
    pub d: usize,
}

impl CarlemanConfig {
    pub fn validate(&self) -> Result<()> {
        self.regularity.validate()?;
        let beta = self.regularity.beta();
        let (s_lo, s_hi) = self.regularity.s_range();
        if !(self.s > s_lo) {
            return config_err(format!("s below lower bound 1/2 (s = {})", self.s));
        }
        if !(self.s < s_hi) {
            return config_err(format!("s above upper bound {s_hi} (s = {})", self.s));
        }
        match self.regularity {
            Regularity::Lipschitz { beta } => {
                let k = 0.25 * (beta - 1.0).min(1.0);
                if (self.k - k).abs() > 1e-15 {
                    return config_err(format!(
                        "Lipschitz case needs k = min(1, beta - 1)/4 = {k}, got {}",
                        self.k
                    ));
                }
                if self.k0 != 0.0 {
                    return config_err("Lipschitz case needs k0 = 0");
                }
                if self.m != 0.0 {
                    return config_err("Lipschitz case needs m = 0");
                }
            }
            Regularity::Holder { .. } => {
                let pair = (self.k, self.k0);
                if pair != (1.0, 0.5) && pair != (0.5, 0.0) {
                    return config_err(format!(
                        "Hölder case needs (k, k0) in {{(1, 1/2), (1/2, 0)}}, got ({}, {})",
                        self.k, self.k0
                    ));
                }
                if self.m != 2.0 {
                    return config_err("Hölder case needs m = 2");
                }
            }
        }
        if !(self.tau0 > 0.0) || !self.tau0.is_finite() {
            return config_err(format!("tau0 = {} must be positive", self.tau0));
        }
        if !(self.k * self.ell > 2.0) {
            return config_err(format!(
                "k * ell = {} must exceed 2",
                self.k * self.ell
            ));
        }
        let gap = beta - 2.0 * self.k - 2.0 * self.s;
        if !(gap * self.ell > 2.0) {
            return config_err(format!(
                "(beta - 2k - 2s) * ell = {} must exceed 2",
                gap * self.ell
            ));
        }
        if !(self.energy > 0.0) || !self.energy.is_finite() {
            return config_err(format!("energy E = {} must be positive", self.energy));
        }
        if !(self.h > 0.0 && self.h <= 1.0) {
            return config_err(format!("h = {} must lie in (0, 1]", self.h));
        }
        if self.d < 2 {
            return config_err(format!("dimension d = {} must be at least 2", self.d));
        }
        let a = self.a();
        if !a.is_finite() || !self.tau().is_finite() {
            return config_err(format!("a = {a} overflows; reduce tau0 or ell"));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        self.regularity.beta()
    }

    pub fn a0(&self) -> f64 {
        self.tau0.powf(self.ell)
    }

    /// Location of the kink of the weight and the end of the phase support.
    pub fn a(&self) -> f64 {
        self.a0() * self.h.powf(-self.m)
    }

    /// Mollification width `h^{2/(alpha+3)}` in the Hölder case.
    pub fn theta(&self) -> Option<f64> {
        match self.regularity {
            Regularity::Holder { alpha } => Some(self.h.powf(2.0 / (alpha + 3.0))),
            Regularity::Lipschitz { .. } => None,
        }
    }

    /// Phase amplitude: `tau0` (Lipschitz) or `tau0 theta^{2 alpha/3} h^{-1/3}` (Hölder).
    pub fn tau(&self) -> f64 {
        match self.regularity {
            Regularity::Lipschitz { .. } => self.tau0,
            Regularity::Holder { alpha } => {
                let theta = self.h.powf(2.0 / (alpha + 3.0));
                self.tau0 * theta.powf(2.0 * alpha / 3.0) * self.h.powf(-1.0 / 3.0)
            }
        }
    }

    pub fn with_tau0(&self, tau0: f64) -> Self {
        Self { tau0, ..*self }
    }

    pub fn with_h(&self, h: f64) -> Self {
        Self { h, ..*self }
    }

    pub fn with_weights(&self, k: f64, k0: f64) -> Self {
        Self { k, k0, ..*self }
    }
}

/// Default `ell = 1.1 max(2/k, 2/(beta - 2k - 2s))`, the smallest round margin above
/// both lower bounds.
pub fn default_ell(k: f64, beta: f64, s: f64) -> f64 {
    1.1 * (2.0 / k).max(2.0 / (beta - 2.0 * k - 2.0 * s))
}

/// Partially specified config; unset fields take the defaults of the regularity case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub regularity: Regularity,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub k0: Option<f64>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub ell: Option<f64>,
    #[serde(default = "default_tau0")]
    pub tau0: f64,
    #[serde(default = "default_energy")]
    pub energy: f64,
    pub h: f64,
    #[serde(default = "default_dim")]
    pub d: usize,
}

fn default_tau0() -> f64 {
    4.0
}

fn default_energy() -> f64 {
    1.0
}

fn default_dim() -> usize {
    3
}

impl ConfigSpec {
    pub fn new(regularity: Regularity, h: f64) -> Self {
        Self {
            regularity,
            k: None,
            k0: None,
            s: None,
            ell: None,
            tau0: default_tau0(),
            energy: default_energy(),
            h,
            d: default_dim(),
        }
    }

    /// Fills defaults and validates.
    ///
    /// Defaults: Lipschitz `k = min(1, beta-1)/4, k0 = 0`; Hölder `(k, k0) = (1, 1/2)`;
    /// `s = min(0.55, midpoint of its interval)`; `ell` from [`default_ell`].
    pub fn resolve(&self) -> Result<CarlemanConfig> {
        self.regularity.validate()?;
        let beta = self.regularity.beta();
        let (k_def, k0_def, m) = match self.regularity {
            Regularity::Lipschitz { beta } => (0.25 * (beta - 1.0).min(1.0), 0.0, 0.0),
            Regularity::Holder { .. } => (1.0, 0.5, 2.0),
        };
        let k = self.k.unwrap_or(k_def);
        let k0 = self.k0.unwrap_or(k0_def);
        let (s_lo, s_hi) = self.regularity.s_range();
        let s = self.s.unwrap_or_else(|| 0.55f64.min(0.5 * (s_lo + s_hi)));
        let ell = self.ell.unwrap_or_else(|| default_ell(k, beta, s));
        let config = CarlemanConfig {
            regularity: self.regularity,
            k,
            k0,
            s,
            tau0: self.tau0,
            ell,
            m,
            energy: self.energy,
            h: self.h,
            d: self.d,
        };
        config.validate()?;
        Ok(config)
    }
}
