use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::bound_from_certificate;
use super::class::RegularityClass;
use super::fit::{fit_points, FitReport};
use crate::carleman::Certificate;
use crate::error::{invalid, LabError, Result};
use crate::potential::PotentialFamily;
use crate::radial::{weighted_resolvent_norm, GridPolicy, ResolventQuery, SectorPolicy, Sign};

pub const DEFAULT_H: [f64; 5] = [0.2, 0.15, 0.1, 0.07, 0.05];
pub const DEFAULT_EPS: [f64; 2] = [1e-2, 1e-4];

/// Everything a sweep row shares except `h`, `eps` and the sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryTemplate {
    #[serde(default = "default_dim")]
    pub d: usize,
    #[serde(default = "default_energy")]
    pub energy: f64,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_potential")]
    pub potential: PotentialFamily,
}

fn default_dim() -> usize {
    3
}
fn default_energy() -> f64 {
    1.0
}
fn default_s() -> f64 {
    0.6
}
fn default_potential() -> PotentialFamily {
    PotentialFamily::Zero
}

impl Default for QueryTemplate {
    fn default() -> Self {
        Self {
            d: default_dim(),
            energy: default_energy(),
            s: default_s(),
            potential: default_potential(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub template: QueryTemplate,
    #[serde(default = "default_h")]
    pub h_values: Vec<f64>,
    #[serde(default = "default_eps")]
    pub eps_values: Vec<f64>,
    #[serde(default = "default_signs")]
    pub signs: Vec<Sign>,
    #[serde(default)]
    pub grid_policy: GridPolicy,
    #[serde(default)]
    pub sector_policy: SectorPolicy,
    #[serde(default)]
    pub seed: u64,
}

fn default_h() -> Vec<f64> {
    DEFAULT_H.to_vec()
}
fn default_eps() -> Vec<f64> {
    DEFAULT_EPS.to_vec()
}
fn default_signs() -> Vec<Sign> {
    vec![Sign::Plus]
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            template: QueryTemplate::default(),
            h_values: default_h(),
            eps_values: default_eps(),
            signs: default_signs(),
            grid_policy: GridPolicy::default(),
            sector_policy: SectorPolicy::default(),
            seed: 0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.h_values.is_empty() {
            return invalid("empty h list");
        }
        if self.eps_values.is_empty() {
            return invalid("empty eps list");
        }
        if self.signs.is_empty() {
            return invalid("empty sign list");
        }
        if let Some(h) = self.h_values.iter().find(|&&h| !(h > 0.0 && h <= 1.0)) {
            return invalid(format!("h = {h} must lie in (0, 1]"));
        }
        if self.h_values.windows(2).any(|w| !(w[0] > w[1])) {
            return invalid("h values must be strictly decreasing");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Failed(String),
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }

    pub fn label(&self) -> String {
        match self {
            RowStatus::Ok => "ok".into(),
            RowStatus::Failed(msg) => format!("failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub eps: f64,
    pub sign: Sign,
    pub g_measured: Option<f64>,
    pub g_bound: Option<f64>,
    pub sectors: usize,
    pub lmax: usize,
    pub grid_points: usize,
    pub residual: f64,
    /// Wall time; not part of the reproducible output.
    pub runtime_ms: u64,
    pub status: RowStatus,
    /// Copied from the other sign at the same `(h, eps)`. The potential is real, so the
    /// two sector matrices are entrywise conjugates and the weighted norms coincide.
    #[serde(default)]
    pub mirrored: bool,
}

/// Fit of one `(eps, sign)` series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub eps: f64,
    pub sign: Sign,
    pub report: FitReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fits: Vec<SeriesFit>,
    /// `Some(true)` iff a certificate was given and every row has
    /// `g_measured <= g_bound`; a failed row counts as a violation.
    pub bound_respected: Option<bool>,
}

impl SweepResult {
    /// `(h, g_measured)` of the successful rows of one series, in row order.
    pub fn series(&self, eps: f64, sign: Sign) -> (Vec<f64>, Vec<f64>) {
        self.rows
            .iter()
            .filter(|r| r.eps == eps && r.sign == sign)
            .filter_map(|r| r.g_measured.map(|g| (r.h, g)))
            .unzip()
    }

    /// Fits every `(eps, sign)` series that has at least 4 successful rows.
    pub fn attach_fits(&mut self, candidates: &[RegularityClass]) -> Result<()> {
        let mut keys: Vec<(f64, Sign)> = Vec::new();
        for row in &self.rows {
            if !keys.contains(&(row.eps, row.sign)) {
                keys.push((row.eps, row.sign));
            }
        }
        let mut fits = Vec::new();
        for (eps, sign) in keys {
            let (h, g) = self.series(eps, sign);
            if h.len() >= 4 {
                fits.push(SeriesFit {
                    eps,
                    sign,
                    report: fit_points(&h, &g, candidates)?,
                });
            }
        }
        self.fits = fits;
        Ok(())
    }
}

/// Fits the `(eps, sign)` series of a sweep against the candidate shapes.
pub fn fit_models(
    result: &SweepResult,
    eps: f64,
    sign: Sign,
    candidates: &[RegularityClass],
) -> Result<FitReport> {
    let (h, g) = result.series(eps, sign);
    fit_points(&h, &g, candidates)
}

/// Measures `g_s` on the Cartesian product of `h`, `eps` and signs.
///
/// Rows are evaluated concurrently and returned in the order of the input lists. Each
/// `(h, eps)` is measured once with the first listed sign; the other sign reuses it. A row
/// whose norm estimate fails is marked and the sweep carries on.
pub fn sweep(spec: &SweepSpec, certificate: Option<&Certificate>) -> Result<SweepResult> {
    spec.validate()?;
    let potential = spec.template.potential.build()?;
    let bound = certificate
        .map(|c| bound_from_certificate(c, &spec.h_values))
        .transpose()?;
    let mut cells = Vec::new();
    for &h in &spec.h_values {
        for &eps in &spec.eps_values {
            cells.push((h, eps, spec.signs[0]));
        }
    }
    let template = &spec.template;
    let first_query = ResolventQuery {
        d: template.d,
        energy: template.energy,
        h: spec.h_values[0],
        eps: spec.eps_values[0],
        sign: spec.signs[0],
        s: template.s,
        potential: potential.clone(),
    };
    first_query.validate()?;
    let measured: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(h, eps, sign)| {
            let query = ResolventQuery {
                h,
                eps,
                sign,
                ..first_query.clone()
            };
            let g_bound = bound.as_ref().and_then(|b| b.at(h)).map(|p| p.g_bound);
            let start = Instant::now();
            let estimate = spec
                .grid_policy
                .grid_for(&query)
                .and_then(|grid| weighted_resolvent_norm(&query, &grid, &spec.sector_policy, spec.seed));
            let runtime_ms = start.elapsed().as_millis() as u64;
            match estimate {
                Ok(est) => SweepRow {
                    h,
                    eps,
                    sign,
                    g_measured: Some(est.g_value),
                    g_bound,
                    sectors: est.sectors.len(),
                    lmax: est.l_max_used,
                    grid_points: est.grid.n,
                    residual: est.residual,
                    runtime_ms,
                    status: RowStatus::Ok,
                    mirrored: false,
                },
                Err(err) => SweepRow {
                    h,
                    eps,
                    sign,
                    g_measured: None,
                    g_bound,
                    sectors: 0,
                    lmax: 0,
                    grid_points: 0,
                    residual: f64::NAN,
                    runtime_ms,
                    status: RowStatus::Failed(err.to_string()),
                    mirrored: false,
                },
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(measured.len() * spec.signs.len());
    for row in measured {
        for (i, &sign) in spec.signs.iter().enumerate() {
            let mirrored = i > 0;
            rows.push(SweepRow {
                sign,
                mirrored,
                runtime_ms: if mirrored { 0 } else { row.runtime_ms },
                ..row.clone()
            });
        }
    }
    if rows.iter().all(|r| !r.status.is_ok()) {
        let first = rows[0].status.label();
        return Err(LabError::Accuracy {
            what: format!("every sweep row failed; first: {first}"),
            residual: f64::NAN,
        });
    }
    let bound_respected = bound.as_ref().map(|_| {
        rows.iter().all(|r| match (r.g_measured, r.g_bound) {
            (Some(g), Some(b)) => g <= b,
            _ => false,
        })
    });
    Ok(SweepResult {
        rows,
        fits: Vec::new(),
        bound_respected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lists() {
        let mut spec = SweepSpec {
            h_values: vec![],
            ..SweepSpec::default()
        };
        assert!(matches!(sweep(&spec, None), Err(LabError::InvalidInput(_))));
        spec.h_values = vec![0.1, 0.2];
        assert!(spec.validate().is_err());
        spec.h_values = vec![0.5, 1.5];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn cartesian_product_in_order() {
        let spec = SweepSpec {
            h_values: vec![0.5, 0.4],
            eps_values: vec![1e-1, 5e-2],
            signs: vec![Sign::Plus, Sign::Minus],
            ..SweepSpec::default()
        };
        let result = sweep(&spec, None).unwrap();
        assert_eq!(result.rows.len(), 8);
        let keys: Vec<_> = result.rows.iter().map(|r| (r.h, r.eps, r.sign)).collect();
        assert_eq!(keys[0], (0.5, 1e-1, Sign::Plus));
        assert_eq!(keys[1], (0.5, 1e-1, Sign::Minus));
        assert_eq!(keys[2], (0.5, 5e-2, Sign::Plus));
        assert_eq!(keys[7], (0.4, 5e-2, Sign::Minus));
        assert!(result.rows.iter().all(|r| r.status.is_ok()));
        assert_eq!(result.bound_respected, None);
    }

    #[test]
    fn mirrored_rows_match_a_direct_measurement() {
        let barrier = PotentialFamily::BarrierWell {
            height: 0.5,
            r_well: 0.5,
            r_barrier: 1.5,
            smoothness: 0.5,
        };
        let spec = SweepSpec {
            template: QueryTemplate {
                potential: barrier,
                ..QueryTemplate::default()
            },
            h_values: vec![0.5],
            eps_values: vec![1e-1],
            signs: vec![Sign::Plus, Sign::Minus],
            ..SweepSpec::default()
        };
        let result = sweep(&spec, None).unwrap();
        let minus = &result.rows[1];
        assert!(minus.mirrored && minus.sign == Sign::Minus);
        let query = ResolventQuery {
            d: 3,
            energy: 1.0,
            h: 0.5,
            eps: 1e-1,
            sign: Sign::Minus,
            s: spec.template.s,
            potential: spec.template.potential.build().unwrap(),
        };
        let grid = spec.grid_policy.grid_for(&query).unwrap();
        let direct = weighted_resolvent_norm(&query, &grid, &spec.sector_policy, spec.seed).unwrap();
        let g = minus.g_measured.unwrap();
        assert!((g - direct.g_value).abs() <= 1e-6, "{g} vs {}", direct.g_value);
        assert_eq!(minus.lmax, direct.l_max_used);
    }
}
