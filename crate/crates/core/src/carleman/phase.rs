use serde::Serialize;

use super::config::CarlemanConfig;
use crate::error::{LabError, Result};

/// The phase `phi` with `phi' = tau((r+1)^{-k} - (a+1)^{-k})` on `[0, a]` and `0` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseFunction {
    k: f64,
    tau: f64,
    a: f64,
    max_phi: f64,
}

impl PhaseFunction {
    pub fn new(config: &CarlemanConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self::from_parts(config.k, config.tau(), config.a()))
    }

    pub fn from_parts(k: f64, tau: f64, a: f64) -> Self {
        let mut p = Self {
            k,
            tau,
            a,
            max_phi: 0.0,
        };
        p.max_phi = p.antiderivative(a);
        p
    }

    /// `tau [ ((r+1)^{1-k} - 1)/(1-k) - r (a+1)^{-k} ]`, or the logarithmic form at `k = 1`.
    fn antiderivative(&self, r: f64) -> f64 {
        let l = r.ln_1p();
        let head = if self.k == 1.0 {
            l
        } else {
            ((1.0 - self.k) * l).exp_m1() / (1.0 - self.k)
        };
        self.tau * (head - r * (-self.k * self.a.ln_1p()).exp())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.a {
            self.max_phi
        } else {
            self.antiderivative(r)
        }
    }

    pub fn eval_deriv(&self, r: f64) -> f64 {
        if r >= self.a {
            return 0.0;
        }
        // tau (a+1)^{-k} ((r+1)^{-k}/(a+1)^{-k} - 1), exact near r = a
        let la = self.a.ln_1p();
        self.tau * (-self.k * la).exp() * (self.k * (la - r.ln_1p())).exp_m1()
    }

    /// `phi''(r)` for `r != a`.
    pub fn eval_deriv2(&self, r: f64) -> Result<f64> {
        if r == self.a {
            return Err(LabError::SingularPoint(r));
        }
        if r > self.a {
            return Ok(0.0);
        }
        Ok(-self.k * self.tau * (r + 1.0).powf(-self.k - 1.0))
    }

    /// `max phi = phi(a)`.
    pub fn max_phi(&self) -> f64 {
        self.max_phi
    }

    /// `tau a^{1-k}/(1-k)` for `k < 1`, `tau log(a+1)` for `k = 1`.
    pub fn max_phi_bound(&self) -> f64 {
        if self.k == 1.0 {
            self.tau * self.a.ln_1p()
        } else {
            self.tau * self.a.powf(1.0 - self.k) / (1.0 - self.k)
        }
    }
}
