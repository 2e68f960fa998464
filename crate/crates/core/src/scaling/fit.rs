use serde::{Deserialize, Serialize};

use super::class::RegularityClass;
use crate::error::{invalid, Result};

/// `g(h) ~ intercept + c * shape(h)` for one regularity class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundModel {
    pub kind: RegularityClass,
    pub c: f64,
    pub intercept: f64,
}

impl BoundModel {
    pub fn eval(&self, h: f64) -> f64 {
        self.intercept + self.c * self.kind.shape(h)
    }
}

/// Least-squares fit of one model with its root-mean-square residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: BoundModel,
    pub residual: f64,
}

/// Fits of every candidate and the selected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub fits: Vec<ModelFit>,
    pub best: usize,
    /// Set when the data carry no `h` dependence; every fit then has `c = 0`.
    pub degenerate: bool,
}

impl FitReport {
    pub fn best_fit(&self) -> &ModelFit {
        &self.fits[self.best]
    }
}

/// Relative residual gap under which two fits count as tied.
const TIE_TOL: f64 = 1e-9;

/// Fits `g = intercept + c shape(h)` for each candidate; ties go to the slowest-growing
/// shape.
pub fn fit_points(h: &[f64], g: &[f64], candidates: &[RegularityClass]) -> Result<FitReport> {
    if h.len() != g.len() {
        return invalid("h and g lists differ in length");
    }
    if h.len() < 4 {
        return invalid(format!("fitting needs at least 4 rows, got {}", h.len()));
    }
    if candidates.is_empty() {
        return invalid("no candidate models");
    }
    for c in candidates {
        c.validate()?;
    }
    let n = g.len() as f64;
    let g_mean = g.iter().sum::<f64>() / n;
    let spread = g.iter().map(|v| (v - g_mean).abs()).fold(0.0, f64::max);
    let degenerate = spread <= 1e-12 * g_mean.abs().max(1.0);
    let mut fits = Vec::with_capacity(candidates.len());
    for &kind in candidates {
        let x: Vec<f64> = h.iter().map(|&hi| kind.shape(hi)).collect();
        let x_mean = x.iter().sum::<f64>() / n;
        let sxx: f64 = x.iter().map(|xi| (xi - x_mean).powi(2)).sum();
        let sxy: f64 = x.iter().zip(g).map(|(xi, gi)| (xi - x_mean) * (gi - g_mean)).sum();
        let c = if degenerate || sxx == 0.0 { 0.0 } else { sxy / sxx };
        let intercept = g_mean - c * x_mean;
        let model = BoundModel { kind, c, intercept };
        let residual =
            (h.iter().zip(g).map(|(&hi, gi)| (model.eval(hi) - gi).powi(2)).sum::<f64>() / n).sqrt();
        fits.push(ModelFit { model, residual });
    }
    let best_residual = fits.iter().map(|f| f.residual).fold(f64::INFINITY, f64::min);
    let tie = TIE_TOL * (best_residual + 1e-12 * g_mean.abs().max(1.0));
    let best = (0..fits.len())
        .filter(|&i| fits[i].residual <= best_residual + tie)
        .min_by(|&i, &j| {
            let (a, b) = (fits[i].model.kind.growth_key(), fits[j].model.kind.growth_key());
            a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
        })
        .expect("at least one fit");
    Ok(FitReport {
        fits,
        best,
        degenerate,
    })
}
