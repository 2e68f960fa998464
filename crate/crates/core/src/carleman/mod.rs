//! Carleman weight and phase functions, their audit functions and grid certification.

mod audit;
mod certify;
mod config;
mod phase;
mod weight;

pub use audit::{audit_at, AuditValues, PotentialBounds};
pub use certify::{
    certify, find_h0, search_tau0, search_with_fallback, Attempt, Certificate, FamilySummary,
    GridSpec, MarginSeries, CARLEMAN, CARLEMAN_2D, DEFAULT_C, MOMENT, MONOTONICITY,
};
pub use config::{default_ell, CarlemanConfig, ConfigSpec, Regularity};
pub use phase::PhaseFunction;
pub use weight::WeightFunction;
