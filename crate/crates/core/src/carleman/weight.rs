use serde::Serialize;

use super::config::CarlemanConfig;
use crate::error::{LabError, Result};

/// The weight `mu`: `(r+1)^{2k} - (r+1)^{2k0}` up to `a`, then continued by
/// `(a+1)^{1-2s} - (r+1)^{1-2s}` so that `mu' = (2s-1)(r+1)^{-2s}` beyond `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightFunction {
    k: f64,
    k0: f64,
    s: f64,
    a: f64,
    /// `mu(a)`, shared by both branches.
    mu_a: f64,
}

impl WeightFunction {
    pub fn new(config: &CarlemanConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self::from_parts(config.k, config.k0, config.s, config.a()))
    }

    /// Builds the weight without the config checks; used for hand-picked examples.
    pub fn from_parts(k: f64, k0: f64, s: f64, a: f64) -> Self {
        let mut w = Self {
            k,
            k0,
            s,
            a,
            mu_a: 0.0,
        };
        w.mu_a = w.inner(a);
        w
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `(r+1)^{2k0} expm1((2k - 2k0) log(1+r))`, accurate near `r = 0`.
    fn inner(&self, r: f64) -> f64 {
        let nu = 2.0 * (self.k - self.k0);
        let l = r.ln_1p();
        (2.0 * self.k0 * l).exp() * (nu * l).exp_m1()
    }

    fn outer(&self, r: f64) -> f64 {
        // (a+1)^{1-2s} - (r+1)^{1-2s} without cancellation for r close to a
        let e = 1.0 - 2.0 * self.s;
        let la = self.a.ln_1p();
        self.mu_a - (e * la).exp() * (e * (r.ln_1p() - la)).exp_m1()
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.a {
            self.inner(r)
        } else {
            self.outer(r)
        }
    }

    /// Evaluates the branch valid below (`upper = false`) or above `a` at any `r`.
    pub fn eval_branch(&self, r: f64, upper: bool) -> f64 {
        if upper {
            self.outer(r)
        } else {
            self.inner(r)
        }
    }

    /// `mu'(r)` for `r != a`.
    pub fn eval_deriv(&self, r: f64) -> Result<f64> {
        if r == self.a {
            return Err(LabError::SingularPoint(r));
        }
        Ok(self.deriv_branch(r, r > self.a))
    }

    pub fn deriv_branch(&self, r: f64, upper: bool) -> f64 {
        let x = r + 1.0;
        if upper {
            (2.0 * self.s - 1.0) * x.powf(-2.0 * self.s)
        } else {
            2.0 * self.k * x.powf(2.0 * self.k - 1.0) - 2.0 * self.k0 * x.powf(2.0 * self.k0 - 1.0)
        }
    }

    /// `2 mu(r) - r mu'(r)`, factored below `a` so small `r` does not cancel.
    pub fn two_mu_minus_r_deriv(&self, r: f64) -> Result<f64> {
        if r == self.a {
            return Err(LabError::SingularPoint(r));
        }
        if r > self.a {
            return Ok(2.0 * self.outer(r) - r * self.deriv_branch(r, true));
        }
        let nu = 2.0 * (self.k - self.k0);
        let l = r.ln_1p();
        let big_x = (nu * l).exp_m1();
        let pre = 2.0 * ((2.0 * self.k0 - 1.0) * l).exp();
        Ok(pre * ((1.0 - self.k) * r * big_x + big_x - 0.5 * nu * r))
    }

    /// `sup mu = mu(a) + (a+1)^{1-2s}`.
    pub fn sup(&self) -> f64 {
        self.mu_a + ((1.0 - 2.0 * self.s) * self.a.ln_1p()).exp()
    }
}
