//! Numerical laboratory for semiclassical resolvent estimates with Hölder and
//! Lipschitz radial potentials.
//!
//! The crate builds Carleman weight and phase functions, certifies their pointwise
//! inequalities on dense grids, discretizes the radial Schrödinger operator sector by
//! sector, measures weighted resolvent norms and compares them with certificate-backed
//! exponential bounds.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carleman;
pub mod error;
pub mod potential;
pub mod quadrature;
pub mod radial;
pub mod scaling;

pub use carleman::{
    audit_at, certify, search_tau0, AuditValues, CarlemanConfig, Certificate, ConfigSpec, GridSpec,
    PhaseFunction, PotentialBounds, Regularity, WeightFunction,
};
pub use error::{LabError, Result};
pub use radial::{
    assemble, weighted_resolvent_norm, AngularSector, DiscreteOperator, GridPolicy, NormEstimate,
    RadialGrid, ResolventQuery, SectorPolicy, Sign,
};
pub use scaling::{
    bound_from_certificate, fit_models, omega_map, psi_map, sweep, BoundModel, CertifiedBound,
    RegularityClass, SweepResult, SweepRow, SweepSpec,
};
pub use potential::{
    holder_seminorm, theta_for, Envelope, MollifiedPotential, MollifierKernel, MollifierRatios,
    PotentialFamily, PotentialModel, RadialFn,
};
