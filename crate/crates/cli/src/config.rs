use std::path::PathBuf;

use reslab::carleman::DEFAULT_C;
use reslab::radial::{GridPolicy, SectorPolicy, Sign};
use reslab::scaling::{QueryTemplate, RegularityClass, SweepSpec, DEFAULT_EPS, DEFAULT_H};
use reslab::{ConfigSpec, GridSpec, PotentialFamily};
use serde::{Deserialize, Serialize};

/// One JSON file with an optional block per subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub certify: Option<CertifyBlock>,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub mollify: Option<MollifyBlock>,
    #[serde(default)]
    pub convert: Option<ConvertBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyBlock {
    pub config: ConfigSpec,
    #[serde(default = "zero_potential")]
    pub potential: PotentialFamily,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_tau0_max")]
    pub tau0_max: f64,
    /// Retry with `(k, k0) = (1/2, 0)` when a d = 2 Hölder search fails.
    #[serde(default = "yes")]
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
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
    /// Certificate whose composed bound fills the `g_bound` column.
    #[serde(default)]
    pub certificate: Option<PathBuf>,
    #[serde(default = "default_candidates")]
    pub candidates: Vec<RegularityClass>,
}

impl SweepBlock {
    pub fn spec(&self, seed: u64) -> SweepSpec {
        SweepSpec {
            template: self.template.clone(),
            h_values: self.h_values.clone(),
            eps_values: self.eps_values.clone(),
            signs: self.signs.clone(),
            grid_policy: self.grid_policy.clone(),
            sector_policy: self.sector_policy.clone(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MollifyBlock {
    pub potential: PotentialFamily,
    /// Kernel moment exponent; defaults to the potential's own Hölder exponent.
    #[serde(default)]
    pub alpha: Option<f64>,
    pub thetas: Vec<f64>,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvertBlock {
    pub class: RegularityClass,
    #[serde(default)]
    pub lambdas: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub lambda0: f64,
    #[serde(default)]
    pub ts: Option<Vec<f64>>,
    #[serde(default)]
    pub radial: bool,
}

/// Written next to every run; feeding it back as `--config` repeats the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub resolved_config: RunConfig,
}

fn zero_potential() -> PotentialFamily {
    PotentialFamily::Zero
}
fn default_c() -> f64 {
    DEFAULT_C
}
fn default_tau0_max() -> f64 {
    4.0 * 1024.0
}
fn yes() -> bool {
    true
}
fn one() -> f64 {
    1.0
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
fn default_candidates() -> Vec<RegularityClass> {
    vec![
        RegularityClass::Lipschitz,
        RegularityClass::Holder { alpha: 0.5 },
        RegularityClass::LInfinity,
    ]
}
fn default_r_max() -> f64 {
    20.0
}
fn default_points() -> usize {
    10_000
}
