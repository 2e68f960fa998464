use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::adaptive;

const MOMENT_TOL: f64 = 1e-15;

/// The normalized bump `rho(s) = exp(-1/(s(1-s))) / Z` on `(0, 1)` with its moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierKernel {
    /// Exponent used for the Hölder moments.
    pub alpha: f64,
    norm: f64,
    /// `∫ rho`, equal to one up to quadrature error.
    pub moment0: f64,
    /// `∫ s rho(s) ds`.
    pub moment1: f64,
    /// `∫ s^alpha rho(s) ds`.
    pub moment_alpha: f64,
    /// `∫ s^alpha |rho'(s)| ds`.
    pub moment_alpha_deriv: f64,
    /// `∫ rho'`, zero up to quadrature error.
    pub deriv_integral: f64,
}

fn raw_bump(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (-1.0 / (s * (1.0 - s))).exp()
    }
}

fn raw_bump_deriv(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let q = s * (1.0 - s);
        raw_bump(s) * (1.0 - 2.0 * s) / (q * q)
    }
}

impl MollifierKernel {
    pub fn bump(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return invalid(format!("kernel moment exponent {alpha} outside (0, 1]"));
        }
        let norm = adaptive(&raw_bump, 0.0, 1.0, MOMENT_TOL);
        let rho = |s: f64| raw_bump(s) / norm;
        let rho_d = |s: f64| raw_bump_deriv(s) / norm;
        let moment0 = adaptive(&rho, 0.0, 1.0, MOMENT_TOL);
        let moment1 = adaptive(&|s: f64| s * rho(s), 0.0, 1.0, MOMENT_TOL);
        let moment_alpha = adaptive(&|s: f64| s.powf(alpha) * rho(s), 0.0, 1.0, MOMENT_TOL);
        // split at the sign change of rho' for an accurate |rho'| integral
        let abs_d = |s: f64| s.powf(alpha) * rho_d(s).abs();
        let moment_alpha_deriv =
            adaptive(&abs_d, 0.0, 0.5, MOMENT_TOL) + adaptive(&abs_d, 0.5, 1.0, MOMENT_TOL);
        let deriv_integral =
            adaptive(&rho_d, 0.0, 0.5, MOMENT_TOL) + adaptive(&rho_d, 0.5, 1.0, MOMENT_TOL);
        let kernel = Self {
            alpha,
            norm,
            moment0,
            moment1,
            moment_alpha,
            moment_alpha_deriv,
            deriv_integral,
        };
        if (moment0 - 1.0).abs() > 1e-10 || deriv_integral.abs() > 1e-10 {
            return Err(crate::LabError::Accuracy {
                what: "mollifier moments".into(),
                residual: (moment0 - 1.0).abs().max(deriv_integral.abs()),
            });
        }
        Ok(kernel)
    }

    pub fn rho(&self, s: f64) -> f64 {
        raw_bump(s) / self.norm
    }

    pub fn rho_deriv(&self, s: f64) -> f64 {
        raw_bump_deriv(s) / self.norm
    }
}
