use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Regularity class of the potential, which fixes the growth shape of the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RegularityClass {
    /// Lipschitz: `g <= C h^{-1}`.
    Lipschitz,
    /// Hölder of order `alpha`: `g <= C h^{-4/(alpha+3)} log(1/h) + C`.
    Holder { alpha: f64 },
    /// Bounded potentials: `g <= C h^{-4/3} log(1/h)`.
    LInfinity,
}

impl RegularityClass {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RegularityClass::Holder { alpha } if !(alpha > 0.0 && alpha <= 1.0) => {
                invalid(format!("Hölder exponent alpha = {alpha} must lie in (0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Power of `1/h` (or of `lambda`) in the bound.
    pub fn exponent(&self) -> f64 {
        match *self {
            RegularityClass::Lipschitz => 1.0,
            RegularityClass::Holder { alpha } => 4.0 / (alpha + 3.0),
            RegularityClass::LInfinity => 4.0 / 3.0,
        }
    }

    pub fn has_log(&self) -> bool {
        !matches!(self, RegularityClass::Lipschitz)
    }

    /// Shape function of the bound in `h`, without constants.
    pub fn shape(&self, h: f64) -> f64 {
        let power = h.powf(-self.exponent());
        if self.has_log() {
            power * (1.0 / h).ln()
        } else {
            power
        }
    }

    /// Orders classes by asymptotic growth as `h -> 0` (smaller grows slower).
    pub fn growth_key(&self) -> (f64, bool) {
        (self.exponent(), self.has_log())
    }
}

impl fmt::Display for RegularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RegularityClass::Lipschitz => write!(f, "lipschitz"),
            RegularityClass::Holder { alpha } => write!(f, "holder({alpha})"),
            RegularityClass::LInfinity => write!(f, "l_infinity"),
        }
    }
}
