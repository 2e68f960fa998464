//! Sector-by-sector discretization of the radial operator, weighted resolvent norms and
//! the energy-functional audit.

mod energy;
mod norm;
mod operator;
mod tridiag;

pub use energy::{energy_audit, relative_residual, solve_conjugated, EnergyTrace, SOLVE_TOL};
pub use norm::{
    sector_norm, weighted_resolvent_norm, NormEstimate, SectorNorm, SectorPolicy, MAX_ITERATIONS,
    RESIDUAL_TOL,
};
pub use operator::{
    assemble, conjugate_check, interaction_radius, AngularSector, DiscreteOperator, GridPolicy,
    RadialGrid, ResolventQuery, Sign, TestFunction,
};
pub use tridiag::{tridiag_mul, TridiagLu};
