use serde::{Deserialize, Serialize};

use crate::carleman::{CarlemanConfig, Certificate, PhaseFunction};
use crate::error::{invalid, Result};

/// Composed bound at one `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub h: f64,
    pub a: f64,
    pub tau: f64,
    pub max_phi: f64,
    /// `max phi / h + log(C0 a^2 / h)`.
    pub log_m: f64,
    /// `log 4 + 2 log_m`.
    pub g_bound: f64,
}

/// Upper bounds on `g_s` built from a passing certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedBound {
    pub certificate: Certificate,
    pub c0: f64,
    pub points: Vec<BoundPoint>,
}

impl CertifiedBound {
    pub fn at(&self, h: f64) -> Option<&BoundPoint> {
        self.points.iter().find(|p| p.h == h)
    }
}

/// `g_bound(h) = log 4 + 2 (max phi/h + log(C0 a^2/h))` with `a`, `tau`, `max phi`
/// recomputed at each `h` from the certified `tau0`, `ell` and `m`.
pub fn bound_point(config: &CarlemanConfig, c0: f64, h: f64) -> Result<BoundPoint> {
    let config = config.with_h(h);
    let phase = PhaseFunction::new(&config)?;
    let a = config.a();
    let log_m = phase.max_phi() / h + (c0 * a * a / h).ln();
    Ok(BoundPoint {
        h,
        a,
        tau: config.tau(),
        max_phi: phase.max_phi(),
        log_m,
        g_bound: 4f64.ln() + 2.0 * log_m,
    })
}

pub fn bound_from_certificate(certificate: &Certificate, h_values: &[f64]) -> Result<CertifiedBound> {
    if !certificate.passed {
        return invalid("bound composition needs a passing certificate");
    }
    let points = h_values
        .iter()
        .map(|&h| {
            if !(h > 0.0 && h <= 1.0) {
                return invalid(format!("h = {h} must lie in (0, 1]"));
            }
            bound_point(&certificate.config, certificate.c_used, h)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CertifiedBound {
        certificate: certificate.clone(),
        c0: certificate.c_used,
        points,
    })
}
