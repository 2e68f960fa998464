use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operator::{assemble, interaction_radius, AngularSector, DiscreteOperator, RadialGrid, ResolventQuery};
use crate::error::{LabError, Result};

pub const MAX_ITERATIONS: usize = 10_000;
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Largest singular value of `W A^{-1} W` for one sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorNorm {
    pub l: usize,
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Power iteration on `(W A^{-1} W)^* (W A^{-1} W)` from a seeded random start.
pub fn sector_norm(op: &DiscreteOperator, seed: u64) -> Result<SectorNorm> {
    let lu = op.factor()?;
    let w = op.weights();
    let n = op.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (op.sector.l as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut x: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut x);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        for i in 0..n {
            y[i] = x[i] * w[i];
        }
        lu.solve_in_place(&mut y);
        for i in 0..n {
            y[i] *= w[i] * w[i];
        }
        lu.solve_adjoint_in_place(&mut y);
        for yi in y.iter_mut().zip(&w) {
            *yi.0 *= *yi.1;
        }
        lambda = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(LabError::Accuracy {
                what: format!("Rayleigh quotient {lambda} in sector {}", op.sector.l),
                residual,
            });
        }
        residual = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b - a * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / lambda;
        std::mem::swap(&mut x, &mut y);
        normalize(&mut x);
        if residual <= RESIDUAL_TOL {
            return Ok(SectorNorm {
                l: op.sector.l,
                value: lambda.sqrt(),
                iterations: it,
                residual,
            });
        }
    }
    Err(LabError::Accuracy {
        what: format!(
            "power iteration in sector {} did not converge in {MAX_ITERATIONS} iterations (estimate {})",
            op.sector.l,
            lambda.sqrt()
        ),
        residual,
    })
}

fn normalize(x: &mut [Complex64]) {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in x.iter_mut() {
        *z /= norm;
    }
}

/// Which angular sectors to measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorPolicy {
    /// Fixed highest sector; `None` selects it from the interaction radius.
    #[serde(default)]
    pub l_max: Option<usize>,
    /// The largest norm among the last `tail_window` sectors must be below the largest
    /// among the `tail_window` before them, otherwise the range is extended.
    #[serde(default = "SectorPolicy::default_tail_window")]
    pub tail_window: usize,
    #[serde(default = "SectorPolicy::default_l_cap")]
    pub l_cap: usize,
}

impl Default for SectorPolicy {
    fn default() -> Self {
        Self {
            l_max: None,
            tail_window: Self::default_tail_window(),
            l_cap: Self::default_l_cap(),
        }
    }
}

impl SectorPolicy {
    fn default_tail_window() -> usize {
        3
    }
    fn default_l_cap() -> usize {
        4000
    }

    pub fn fixed(l_max: usize) -> Self {
        Self {
            l_max: Some(l_max),
            ..Self::default()
        }
    }

    /// Smallest `l` with `Lambda_l >= (E - inf V) r_int^2`: beyond it the whole interaction
    /// region is classically forbidden and the sector behaves like a free one.
    pub fn initial_l_max(&self, query: &ResolventQuery) -> usize {
        if let Some(l) = self.l_max {
            return l;
        }
        let r_int = interaction_radius(&query.potential, query.energy);
        let depth = (-query.potential.sampled_min()).max(0.0);
        let target = (query.energy + depth) * r_int * r_int;
        let mut l = 0;
        while l < self.l_cap && AngularSector::new(query.d, l, query.h).lambda_value < target {
            l += 1;
        }
        l.max(2 * self.tail_window)
    }
}

/// Weighted resolvent norm over the measured sectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub g_value: f64,
    /// Iterations used in the maximizing sector.
    pub iterations: usize,
    /// Largest final residual over all sectors.
    pub residual: f64,
    pub l_max_used: usize,
    pub argmax_l: usize,
    /// Largest norm among the last `tail_window` measured sectors; with decreasing block
    /// maxima it bounds the sectors that were not measured.
    pub truncation_bound: f64,
    pub sectors: Vec<SectorNorm>,
    pub grid: RadialGrid,
}

fn measure_range(
    query: &ResolventQuery,
    grid: &RadialGrid,
    seed: u64,
    range: std::ops::Range<usize>,
) -> Result<Vec<SectorNorm>> {
    range
        .into_par_iter()
        .map(|l| {
            let op = assemble(query, &AngularSector::new(query.d, l, query.h), grid)?;
            sector_norm(&op, seed)
        })
        .collect()
}

/// `||(r+1)^{-s} (P - E +- i eps)^{-1} (r+1)^{-s}||` as the max over sectors.
pub fn weighted_resolvent_norm(
    query: &ResolventQuery,
    grid: &RadialGrid,
    policy: &SectorPolicy,
    seed: u64,
) -> Result<NormEstimate> {
    let mut l_end = policy.initial_l_max(query) + 1;
    let mut sectors = measure_range(query, grid, seed, 0..l_end)?;
    if policy.l_max.is_none() {
        let window = policy.tail_window.max(1);
        loop {
            let settled = tail_settled(&sectors, window);
            if settled || l_end >= policy.l_cap {
                break;
            }
            let next = (l_end + window).min(policy.l_cap);
            sectors.extend(measure_range(query, grid, seed, l_end..next)?);
            l_end = next;
        }
    }
    let best = argmax(&sectors);
    let value = sectors[best].value;
    Ok(NormEstimate {
        value,
        g_value: value.ln(),
        iterations: sectors[best].iterations,
        residual: sectors.iter().map(|s| s.residual).fold(0.0, f64::max),
        l_max_used: l_end - 1,
        argmax_l: sectors[best].l,
        truncation_bound: sectors[sectors.len().saturating_sub(policy.tail_window.max(1))..]
            .iter()
            .map(|s| s.value)
            .fold(0.0, f64::max),
        sectors,
        grid: *grid,
    })
}

fn tail_settled(sectors: &[SectorNorm], window: usize) -> bool {
    let n = sectors.len();
    if n < 2 * window {
        return false;
    }
    let block_max = |range: std::ops::Range<usize>| {
        sectors[range].iter().map(|s| s.value).fold(0.0, f64::max)
    };
    block_max(n - window..n) < block_max(n - 2 * window..n - window) && argmax(sectors) < n - window
}

fn argmax(sectors: &[SectorNorm]) -> usize {
    let mut best = 0;
    for (i, s) in sectors.iter().enumerate() {
        if s.value > sectors[best].value {
            best = i;
        }
    }
    best
}
