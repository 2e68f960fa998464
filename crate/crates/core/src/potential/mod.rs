//! Radial potential families, decay envelopes and their Hölder regularity.

mod holder;
mod kernel;
mod mollify;

pub use holder::holder_seminorm;
pub use kernel::MollifierKernel;
pub use mollify::{theta_for, MollifiedPotential, MollifierRatios};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};

/// A radial function `r -> f(r)` that can be shared between workers.
pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Strictly positive floor added to every tabulated envelope so that `p > 0`.
const ENVELOPE_FLOOR: f64 = 1e-12;

/// Named potential families addressable from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialFamily {
    /// `V(r) = c (r+1)^{-delta}`; Lipschitz with derivative decay `beta = delta + 1`.
    PowerLaw { c: f64, delta: f64 },
    /// `V(r) = c (r+1)^{-4} |cos(freq r)|^alpha`; Hölder of order `alpha` with `beta = 4`.
    HolderBump { c: f64, alpha: f64, freq: f64 },
    /// A well of depth `height` on `[0, r_well]` enclosed by a barrier of the same height
    /// ending at `r_barrier`, joined by smoothstep ramps of width `smoothness`.
    BarrierWell {
        height: f64,
        r_well: f64,
        r_barrier: f64,
        smoothness: f64,
    },
    Zero,
}

impl PotentialFamily {
    pub const NAMES: [&'static str; 4] = ["power_law", "holder_bump", "barrier_well", "zero"];

    pub fn name(&self) -> &'static str {
        match self {
            PotentialFamily::PowerLaw { .. } => "power_law",
            PotentialFamily::HolderBump { .. } => "holder_bump",
            PotentialFamily::BarrierWell { .. } => "barrier_well",
            PotentialFamily::Zero => "zero",
        }
    }

    /// Builds the model, its envelope and Hölder constant.
    pub fn build(&self) -> Result<PotentialModel> {
        match *self {
            PotentialFamily::PowerLaw { c, delta } => {
                if !(delta > 0.0) || !c.is_finite() {
                    return invalid("power_law needs delta > 0 and finite c");
                }
                let eval: RadialFn = Arc::new(move |r: f64| c * (r + 1.0).powf(-delta));
                let holder_const = c.abs() * delta * 2f64.powf(delta + 1.0);
                let tail: RadialFn = Arc::new(move |r: f64| c.max(0.0) * (r + 1.0).powf(-delta));
                let envelope = Envelope::suffix_sup(&*eval, holder_const, 1.0, delta + 1.0, tail);
                PotentialModel::new(self.clone(), eval, 1.0, delta + 1.0, envelope, holder_const)
            }
            PotentialFamily::HolderBump { c, alpha, freq } => {
                if !(alpha > 0.0 && alpha < 1.0) || !(freq > 0.0) || !c.is_finite() {
                    return invalid("holder_bump needs 0 < alpha < 1, freq > 0 and finite c");
                }
                let eval: RadialFn = Arc::new(move |r: f64| {
                    c * (r + 1.0).powi(-4) * (freq * r).cos().abs().powf(alpha)
                });
                // |cos|^alpha contributes freq^alpha; the (r+1)^-4 factor contributes at most 64.
                let holder_const = c.abs() * (freq.powf(alpha) + 64.0);
                let tail: RadialFn = Arc::new(move |r: f64| c.max(0.0) * (r + 1.0).powi(-4));
                let envelope = Envelope::suffix_sup(&*eval, holder_const, alpha, 4.0, tail);
                PotentialModel::new(self.clone(), eval, alpha, 4.0, envelope, holder_const)
            }
            PotentialFamily::BarrierWell {
                height,
                r_well,
                r_barrier,
                smoothness,
            } => {
                if !(smoothness > 0.0) || !(r_well >= 0.0) || r_barrier < r_well + smoothness {
                    return invalid(
                        "barrier_well needs smoothness > 0, r_well >= 0 and r_barrier >= r_well + smoothness",
                    );
                }
                if !height.is_finite() {
                    return invalid("barrier_well height must be finite");
                }
                let eval: RadialFn = Arc::new(move |r: f64| {
                    if r <= r_barrier {
                        height * (2.0 * smoothstep((r - r_well) / smoothness) - 1.0)
                    } else {
                        height * (1.0 - smoothstep((r - r_barrier) / smoothness))
                    }
                });
                let beta = 2.0;
                let lipschitz = 3.0 * height.abs() / smoothness;
                let support = r_barrier + smoothness;
                let holder_const = lipschitz * (support + 2.0).powf(beta);
                let tail: RadialFn = Arc::new(|_| 0.0);
                let envelope = Envelope::suffix_sup(&*eval, holder_const, 1.0, beta, tail);
                PotentialModel::new(self.clone(), eval, 1.0, beta, envelope, holder_const)
            }
            PotentialFamily::Zero => {
                let eval: RadialFn = Arc::new(|_| 0.0);
                let envelope = Envelope::from_fn(Arc::new(|r: f64| {
                    ENVELOPE_FLOOR * (r.max(0.0) + 1.0).powi(-4)
                }));
                PotentialModel::new(self.clone(), eval, 1.0, 4.0, envelope, 0.0)
            }
        }
    }
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// A non-increasing positive envelope `p` with `p(r) -> 0` and `V(r) <= p(r)`.
#[derive(Clone)]
pub struct Envelope {
    eval: RadialFn,
}

impl fmt::Debug for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Envelope")
            .field("p(0)", &(self.eval)(0.0))
            .finish()
    }
}

impl Envelope {
    const REF_STEP: f64 = 1e-3;
    const REF_RADIUS: f64 = 100.0;

    pub fn from_fn(eval: RadialFn) -> Self {
        Self { eval }
    }

    /// Suffix supremum of `v` on a reference grid of step `1e-3` over `[0, 100]`.
    ///
    /// Off-grid values are covered by adding the Hölder allowance
    /// `holder_const * step^alpha * (r_j+1)^{-beta}` to each sample; beyond the
    /// reference radius `tail` must bound `sup_{[r, inf)} v` and be non-increasing.
    pub fn suffix_sup(
        v: &(dyn Fn(f64) -> f64 + Send + Sync),
        holder_const: f64,
        alpha: f64,
        beta: f64,
        tail: RadialFn,
    ) -> Self {
        let step = Self::REF_STEP;
        let n = (Self::REF_RADIUS / step).round() as usize;
        let allowance = holder_const * step.powf(alpha);
        let mut table: Vec<f64> = (0..=n)
            .map(|j| {
                let r = j as f64 * step;
                v(r) + allowance * (r + 1.0).powf(-beta)
            })
            .collect();
        for j in (0..n).rev() {
            table[j] = table[j].max(table[j + 1]);
        }
        for value in &mut table {
            *value = value.max(0.0);
        }
        let table: Arc<[f64]> = table.into();
        let eval: RadialFn = Arc::new(move |r: f64| {
            let r = r.max(0.0);
            let floor = ENVELOPE_FLOOR * (r + 1.0).powi(-4);
            let idx = (r / step).floor();
            let tabulated = if idx < table.len() as f64 {
                table[idx as usize]
            } else {
                0.0
            };
            tabulated.max(tail(r)) + floor
        });
        Self { eval }
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    pub fn as_fn(&self) -> RadialFn {
        self.eval.clone()
    }

    /// Smallest sampled radius beyond which `p <= level`, scanning up to `r_max`.
    pub fn radius_below(&self, level: f64, r_max: f64) -> f64 {
        let mut r = 0.0;
        let step = 1e-2;
        while r < r_max {
            if self.eval(r) <= level {
                return r;
            }
            r += step;
        }
        r_max
    }
}

/// A radial potential with its regularity data.
#[derive(Clone)]
pub struct PotentialModel {
    family: PotentialFamily,
    eval: RadialFn,
    alpha: f64,
    beta: f64,
    envelope: Envelope,
    holder_const: f64,
}

impl fmt::Debug for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialModel")
            .field("family", &self.family)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("holder_const", &self.holder_const)
            .finish()
    }
}

impl PotentialModel {
    /// Validates the envelope on a sample grid and assembles the model.
    ///
    /// Rejects envelopes that increase, fail to decay, or sit below `V`.
    pub fn new(
        family: PotentialFamily,
        eval: RadialFn,
        alpha: f64,
        beta: f64,
        envelope: Envelope,
        holder_const: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return invalid(format!("Hölder exponent {alpha} outside (0, 1]"));
        }
        if !(beta > 0.0) {
            return invalid(format!("decay exponent beta = {beta} must be positive"));
        }
        if !(holder_const >= 0.0) {
            return invalid("Hölder constant must be non-negative");
        }
        let model = Self {
            family,
            eval,
            alpha,
            beta,
            envelope,
            holder_const,
        };
        model.validate_envelope()?;
        Ok(model)
    }

    fn validate_envelope(&self) -> Result<()> {
        let grid = envelope_sample_grid();
        let mut prev = f64::INFINITY;
        for &r in &grid {
            let p = self.envelope.eval(r);
            if !p.is_finite() || p <= 0.0 {
                return Err(LabError::InvalidInput(format!(
                    "envelope p({r}) = {p} must be finite and positive"
                )));
            }
            if p > prev {
                return invalid(format!("envelope increases at r = {r}"));
            }
            let v = self.eval(r);
            if !v.is_finite() {
                return Err(LabError::Evaluation {
                    r,
                    what: "potential value".into(),
                });
            }
            if v > p {
                return invalid(format!("V({r}) = {v} exceeds envelope p = {p}"));
            }
            prev = p;
        }
        let first = self.envelope.eval(grid[0]);
        let last = self.envelope.eval(*grid.last().unwrap());
        if !(last < first) {
            return invalid("envelope p does not decay towards 0");
        }
        Ok(())
    }

    pub fn family(&self) -> &PotentialFamily {
        &self.family
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    pub fn as_fn(&self) -> RadialFn {
        self.eval.clone()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn holder_const(&self) -> f64 {
        self.holder_const
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    /// Checks the `C^alpha_beta` membership quotient on `grid` against `holder_const`.
    pub fn check_holder_class(&self, grid: &[f64]) -> Result<f64> {
        let seminorm = holder_seminorm(&*self.eval, self.alpha, self.beta, grid)?;
        if seminorm > self.holder_const * (1.0 + 1e-12) {
            return invalid(format!(
                "sampled Hölder quotient {seminorm} exceeds declared constant {}",
                self.holder_const
            ));
        }
        Ok(seminorm)
    }

    /// Minimum of `V` over the envelope sample grid (step 0.01 to 20, then log-spaced).
    pub fn sampled_min(&self) -> f64 {
        envelope_sample_grid()
            .into_iter()
            .map(|r| self.eval(r))
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximum of `V` over the same sample grid.
    pub fn sampled_max(&self) -> f64 {
        envelope_sample_grid()
            .into_iter()
            .map(|r| self.eval(r))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn envelope_sample_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.01).collect();
    grid.extend((1..=400).map(|i| 20.0 * 10f64.powf(i as f64 / 100.0)));
    grid
}
