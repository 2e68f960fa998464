use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::audit::{audit_at, PotentialBounds};
use super::config::{default_ell, CarlemanConfig, Regularity};
use super::phase::PhaseFunction;
use super::weight::WeightFunction;
use crate::error::{invalid, LabError, Result};

/// Default constant multiplying `B` in the Carleman inequalities.
pub const DEFAULT_C: f64 = 6.0;

/// Lowest certified radius in dimension `d >= 3` (the log grid cannot start at 0).
const R_LO_3D: f64 = 1e-6;

/// Names of the margin families.
pub const MONOTONICITY: &str = "weight_monotonicity";
pub const MOMENT: [&str; 3] = ["weight_moment_0", "weight_moment_1", "weight_moment_2"];
pub const CARLEMAN: &str = "carleman";
pub const CARLEMAN_2D: &str = "carleman_2d";

/// Description of the audit grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "GridSpec::default_ppd")]
    pub points_per_decade: usize,
    /// Right end as a multiple of `a`.
    #[serde(default = "GridSpec::default_extent")]
    pub extent_factor: f64,
    /// Left end; defaults to `1e-6` for `d >= 3` and `1` for `d = 2`.
    #[serde(default)]
    pub r_min: Option<f64>,
    /// Relative offsets `delta` adding the points `a(1 -+ delta)`.
    #[serde(default = "GridSpec::default_near_a")]
    pub near_a: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points_per_decade: Self::default_ppd(),
            extent_factor: Self::default_extent(),
            r_min: None,
            near_a: Self::default_near_a(),
        }
    }
}

impl GridSpec {
    fn default_ppd() -> usize {
        200
    }

    fn default_extent() -> f64 {
        10.0
    }

    fn default_near_a() -> Vec<f64> {
        vec![1e-6, 1e-4, 1e-2]
    }

    /// Same grid with twice the density.
    pub fn finer(&self) -> Self {
        Self {
            points_per_decade: 2 * self.points_per_decade,
            ..self.clone()
        }
    }

    pub fn r_min_for(&self, d: usize) -> f64 {
        self.r_min.unwrap_or(if d == 2 { 1.0 } else { R_LO_3D })
    }

    /// Log-spaced points on `[r_min, extent * a]` plus the near-`a` refinement; `a` excluded.
    pub fn points(&self, a: f64, d: usize) -> Result<Vec<f64>> {
        if self.points_per_decade < 200 {
            return invalid(format!(
                "grid too sparse: {} points per decade, need at least 200",
                self.points_per_decade
            ));
        }
        if !(self.extent_factor >= 10.0) {
            return invalid(format!(
                "grid too short: extent factor {} below 10",
                self.extent_factor
            ));
        }
        if !self.near_a.iter().any(|&x| x > 0.0 && x <= 1e-6) {
            return invalid("near-a refinement must include an offset of at most 1e-6");
        }
        let r_min = self.r_min_for(d);
        let r_max = self.extent_factor * a;
        if !(r_min > 0.0) || !(r_min < a) {
            return invalid(format!("r_min = {r_min} must lie in (0, a = {a})"));
        }
        let (lo, hi) = (r_min.log10(), r_max.log10());
        let n = ((hi - lo) * self.points_per_decade as f64).ceil() as usize;
        let mut pts: Vec<f64> = (0..=n)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / n as f64))
            .collect();
        for &delta in &self.near_a {
            if delta > 0.0 && delta < 1.0 {
                pts.push(a * (1.0 - delta));
                pts.push(a * (1.0 + delta));
            }
        }
        pts.retain(|&r| r != a && r >= r_min && r <= r_max);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(pts)
    }
}

/// Summary of one margin family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub name: String,
    pub min_margin: f64,
    pub argmin_r: f64,
}

/// Per-point margins of one family (normalized, sign-preserving).
#[derive(Debug, Clone, PartialEq)]
pub struct MarginSeries {
    pub name: &'static str,
    pub values: Vec<f64>,
}

/// One `tau0` tried by the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub tau0: f64,
    pub k: f64,
    pub k0: f64,
    pub passed: bool,
    pub worst_family: String,
    pub worst_margin: f64,
    pub worst_r: f64,
}

/// Grid-verified margins for the weight and Carleman inequalities.
///
/// Margins are divided by the sum of absolute values of their terms, so each lies in
/// `[-1, 1]` and keeps the sign of the raw inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub config: CarlemanConfig,
    #[serde(rename = "C_used")]
    pub c_used: f64,
    pub r_min: f64,
    pub lead_const: f64,
    pub moment_alpha: f64,
    pub moment_alpha_deriv: f64,
    pub grid_spec: GridSpec,
    pub families: Vec<FamilySummary>,
    pub tau0_found: f64,
    pub passed: bool,
    #[serde(default)]
    pub fallback_used: bool,
    #[serde(default)]
    pub attempts: Vec<Attempt>,
    #[serde(skip)]
    pub grid: Vec<f64>,
    #[serde(skip)]
    pub margins: Vec<MarginSeries>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| LabError::InvalidInput(format!("certificate JSON: {e}")))
    }

    /// The family with the smallest margin.
    pub fn worst(&self) -> Option<&FamilySummary> {
        self.families
            .iter()
            .min_by(|x, y| x.min_margin.total_cmp(&y.min_margin))
    }

    pub fn family(&self, name: &str) -> Option<&FamilySummary> {
        self.families.iter().find(|f| f.name == name)
    }

    pub fn margins_of(&self, name: &str) -> Option<&[f64]> {
        self.margins
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.values.as_slice())
    }

    /// Potential constants recorded at certification time.
    pub fn bounds_with(&self, envelope: crate::potential::RadialFn) -> PotentialBounds {
        let mut b = PotentialBounds::from_envelope(envelope);
        b.lead_const = self.lead_const;
        b.moment_alpha = self.moment_alpha;
        b.moment_alpha_deriv = self.moment_alpha_deriv;
        b
    }
}

/// Constants `K_j` in `mu^j / mu' <= K_j a^{2kj} (r+1)^{2s}`: twice the analytic
/// constant, since beyond `a` the `j = 0` bound is an equality.
fn moment_constants(config: &CarlemanConfig) -> [f64; 3] {
    let base = 2.0 * (0.5 / (config.k - config.k0)).max(1.0 / (2.0 * config.s - 1.0));
    let growth = 2f64.powf(2.0 * config.k) + 1.0;
    [base, base * growth, base * growth * growth]
}

struct PointMargins {
    values: [f64; 5],
}

fn margins_at(
    r: f64,
    config: &CarlemanConfig,
    weight: &WeightFunction,
    phase: &PhaseFunction,
    bounds: &PotentialBounds,
    c: f64,
    k_mom: &[f64; 3],
) -> Result<PointMargins> {
    let audit = audit_at(r, config, weight, phase, bounds, c)?;
    let mu = weight.eval(r);
    let dmu = weight.eval_deriv(r)?;
    let mono_raw = weight.two_mu_minus_r_deriv(r)? / r;
    let mono = mono_raw / (2.0 * mu / r + dmu);
    let a = config.a();
    let mut values = [0.0; 5];
    values[0] = mono;
    for (j, kj) in k_mom.iter().enumerate() {
        let lhs = kj * a.powf(2.0 * config.k * j as f64) * (r + 1.0).powf(2.0 * config.s);
        let rhs = mu.powi(j as i32) / dmu;
        values[1 + j] = (lhs - rhs) / (lhs + rhs);
    }
    values[4] = if config.d == 2 {
        audit.lhs221 / audit.scale221
    } else {
        audit.lhs29 / audit.scale29
    };
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(LabError::Evaluation {
                r,
                what: format!("margin {i}"),
            });
        }
    }
    Ok(PointMargins { values })
}

/// Evaluates every margin family on the grid described by `grid_spec`.
pub fn certify(
    config: &CarlemanConfig,
    bounds: &PotentialBounds,
    c: f64,
    grid_spec: &GridSpec,
) -> Result<Certificate> {
    config.validate()?;
    if !(c > 0.0) {
        return invalid(format!("constant C = {c} must be positive"));
    }
    let weight = WeightFunction::new(config)?;
    let phase = PhaseFunction::new(config)?;
    let grid = grid_spec.points(config.a(), config.d)?;
    let k_mom = moment_constants(config);
    let per_point: Vec<PointMargins> = grid
        .par_iter()
        .map(|&r| margins_at(r, config, &weight, &phase, bounds, c, &k_mom))
        .collect::<Result<_>>()?;

    let last_name = if config.d == 2 { CARLEMAN_2D } else { CARLEMAN };
    let names = [MONOTONICITY, MOMENT[0], MOMENT[1], MOMENT[2], last_name];
    let mut margins = Vec::with_capacity(names.len());
    let mut families = Vec::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        let values: Vec<f64> = per_point.iter().map(|p| p.values[i]).collect();
        let (argmin, min) = values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (j, &v)| {
                if v < bv {
                    (j, v)
                } else {
                    (bi, bv)
                }
            });
        families.push(FamilySummary {
            name: name.to_string(),
            min_margin: min,
            argmin_r: grid[argmin],
        });
        margins.push(MarginSeries { name, values });
    }
    let passed = families.iter().all(|f| f.min_margin >= 0.0);
    Ok(Certificate {
        config: *config,
        c_used: c,
        r_min: grid_spec.r_min_for(config.d),
        lead_const: bounds.lead_const,
        moment_alpha: bounds.moment_alpha,
        moment_alpha_deriv: bounds.moment_alpha_deriv,
        grid_spec: grid_spec.clone(),
        families,
        tau0_found: config.tau0,
        passed,
        fallback_used: false,
        attempts: Vec::new(),
        grid,
        margins,
    })
}

fn attempt_of(cert: &Certificate) -> Attempt {
    let worst = cert.worst().expect("at least one family");
    Attempt {
        tau0: cert.config.tau0,
        k: cert.config.k,
        k0: cert.config.k0,
        passed: cert.passed,
        worst_family: worst.name.clone(),
        worst_margin: worst.min_margin,
        worst_r: worst.argmin_r,
    }
}

/// Doubles `tau0` from 4 until certification passes or `tau0 > tau0_max`.
pub fn search_tau0(
    template: &CarlemanConfig,
    bounds: &PotentialBounds,
    c: f64,
    grid_spec: &GridSpec,
    tau0_max: f64,
) -> Result<Certificate> {
    if !(tau0_max >= 4.0) {
        return invalid(format!("tau0_max = {tau0_max} must be at least 4"));
    }
    let mut attempts = Vec::new();
    let mut tau0 = 4.0;
    while tau0 <= tau0_max {
        let config = template.with_tau0(tau0);
        if config.validate().is_err() && !attempts.is_empty() {
            // a = tau0^ell overflowed; larger tau0 cannot help
            break;
        }
        let mut cert = certify(&config, bounds, c, grid_spec)?;
        attempts.push(attempt_of(&cert));
        if cert.passed {
            cert.attempts = attempts;
            return Ok(cert);
        }
        tau0 *= 2.0;
    }
    let last = attempts
        .last()
        .ok_or_else(|| LabError::Internal("search made no attempt".into()))?;
    Err(LabError::SearchExhausted {
        tau0_max,
        family: last.worst_family.clone(),
        worst_margin: last.worst_margin,
        r: last.worst_r,
    })
}

/// Runs [`search_tau0`]; in dimension 2 with Hölder weights `(1, 1/2)` a failed search
/// is retried with `(1/2, 0)`.
pub fn search_with_fallback(
    template: &CarlemanConfig,
    bounds: &PotentialBounds,
    c: f64,
    grid_spec: &GridSpec,
    tau0_max: f64,
) -> Result<Certificate> {
    let first = search_tau0(template, bounds, c, grid_spec, tau0_max);
    let eligible = template.d == 2
        && matches!(template.regularity, Regularity::Holder { .. })
        && (template.k, template.k0) == (1.0, 0.5);
    match first {
        Err(LabError::SearchExhausted { .. }) if eligible => {
            let mut fallback = template.with_weights(0.5, 0.0);
            fallback.ell = fallback.ell.max(default_ell(0.5, fallback.beta(), fallback.s));
            let mut cert = search_tau0(&fallback, bounds, c, grid_spec, tau0_max)?;
            cert.fallback_used = true;
            Ok(cert)
        }
        other => other,
    }
}

/// Largest `h` in `h_values` such that `config` (with its `tau0`) certifies at every
/// listed `h' <= h`; `None` when the smallest value already fails.
pub fn find_h0(
    config: &CarlemanConfig,
    bounds: &PotentialBounds,
    c: f64,
    grid_spec: &GridSpec,
    h_values: &[f64],
) -> Result<Option<f64>> {
    let mut hs = h_values.to_vec();
    hs.sort_by(f64::total_cmp);
    let mut h0 = None;
    for h in hs {
        if !certify(&config.with_h(h), bounds, c, grid_spec)?.passed {
            break;
        }
        h0 = Some(h);
    }
    Ok(h0)
}
