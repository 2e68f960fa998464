use serde::Serialize;

use super::config::{CarlemanConfig, Regularity};
use super::phase::PhaseFunction;
use super::weight::WeightFunction;
use crate::error::{check_finite, LabError, Result};
use crate::potential::{MollifierKernel, PotentialModel, RadialFn};

/// The potential data the audit functions need: the envelope `p` and the constants
/// standing in for the implied constants of the mollifier bounds.
#[derive(Clone)]
pub struct PotentialBounds {
    envelope: RadialFn,
    /// Multiplies `(r+1)^{-beta}`; at least 1 so that `V = 0` keeps the unit-constant form.
    pub lead_const: f64,
    pub moment_alpha: f64,
    pub moment_alpha_deriv: f64,
}

impl std::fmt::Debug for PotentialBounds {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialBounds")
            .field("lead_const", &self.lead_const)
            .field("moment_alpha", &self.moment_alpha)
            .field("moment_alpha_deriv", &self.moment_alpha_deriv)
            .finish()
    }
}

impl PotentialBounds {
    /// Unit constants and the given envelope (the literal audit functions).
    pub fn from_envelope(envelope: RadialFn) -> Self {
        Self {
            envelope,
            lead_const: 1.0,
            moment_alpha: 1.0,
            moment_alpha_deriv: 1.0,
        }
    }

    /// Envelope and Hölder constant of `model`; the kernel moments enter in the Hölder case.
    pub fn from_model(model: &PotentialModel, kernel: Option<&MollifierKernel>) -> Self {
        let (moment_alpha, moment_alpha_deriv) = kernel
            .map(|k| (k.moment_alpha, k.moment_alpha_deriv))
            .unwrap_or((1.0, 1.0));
        Self {
            envelope: model.envelope().as_fn(),
            lead_const: model.holder_const().max(1.0),
            moment_alpha,
            moment_alpha_deriv,
        }
    }

    pub fn p(&self, r: f64) -> f64 {
        (self.envelope)(r)
    }
}

/// Audit quantities at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditValues {
    pub r: f64,
    /// `A = (mu phi'^2)'`.
    pub a_term: f64,
    pub b1: f64,
    pub b2: f64,
    /// `A - C B + (E/2) mu'`.
    pub lhs29: f64,
    /// `A - h^2 r^{-3} mu - C B + (2E/3) mu'`.
    pub lhs221: f64,
    /// Sums of absolute values of the terms of `lhs29` and `lhs221`.
    pub scale29: f64,
    pub scale221: f64,
}

/// Evaluates `A`, `B_1`, `B_2` and the left-hand sides at `r` (`r > 0`, `r != a`).
pub fn audit_at(
    r: f64,
    config: &CarlemanConfig,
    weight: &WeightFunction,
    phase: &PhaseFunction,
    bounds: &PotentialBounds,
    c: f64,
) -> Result<AuditValues> {
    if !(r > 0.0) {
        return Err(LabError::InvalidInput(format!("audit radius r = {r} must be positive")));
    }
    let mu = weight.eval(r);
    let dmu = weight.eval_deriv(r)?;
    let dphi = phase.eval_deriv(r);
    let ddphi = phase.eval_deriv2(r)?;
    if !(dmu > 0.0) {
        return Err(LabError::Internal(format!("mu'({r}) = {dmu} is not positive")));
    }
    let h = config.h;
    let e = config.energy;
    let x = r + 1.0;
    let decay = x.powf(-config.beta());
    let p = bounds.p(r);

    let a_term = dmu * dphi * dphi + 2.0 * mu * dphi * ddphi;
    let denom = dphi * mu / h + dmu;
    let (b1, b2) = match config.regularity {
        Regularity::Lipschitz { .. } => {
            let b1 = bounds.lead_const * decay * mu + p * dmu;
            let b2 = (mu * ddphi).powi(2) / denom;
            (b1, b2)
        }
        Regularity::Holder { alpha } => {
            let theta = config.theta().expect("Hölder config has theta");
            let kd = bounds.lead_const * bounds.moment_alpha_deriv;
            let k0 = bounds.lead_const * bounds.moment_alpha;
            let b1 = kd * theta.powf(alpha - 1.0) * decay * mu + (p + k0 * decay) * dmu;
            let q = k0 * theta.powf(alpha) * decay / h + ddphi.abs();
            let b2 = (mu * q).powi(2) / denom;
            (b1, b2)
        }
    };
    let b = b1 + b2;
    let centrifugal = h * h * mu / (r * r * r);
    let lhs29 = a_term - c * b + 0.5 * e * dmu;
    let lhs221 = a_term - centrifugal - c * b + 2.0 * e / 3.0 * dmu;
    let scale29 = a_term.abs() + c * b + 0.5 * e * dmu;
    let scale221 = a_term.abs() + centrifugal + c * b + 2.0 * e / 3.0 * dmu;
    for (v, what) in [
        (a_term, "A"),
        (b1, "B1"),
        (b2, "B2"),
        (lhs29, "lhs29"),
        (lhs221, "lhs221"),
    ] {
        check_finite(r, v, what)?;
    }
    Ok(AuditValues {
        r,
        a_term,
        b1,
        b2,
        lhs29,
        lhs221,
        scale29,
        scale221,
    })
}
