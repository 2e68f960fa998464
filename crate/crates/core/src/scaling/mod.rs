//! h-sweeps of the measured resolvent norm, certificate-backed upper bounds, scaling
//! fits and the high-frequency growth maps.

mod bound;
mod class;
mod fit;
mod maps;
mod sweep;

pub use bound::{bound_from_certificate, bound_point, BoundPoint, CertifiedBound};
pub use class::RegularityClass;
pub use fit::{fit_points, BoundModel, FitReport, ModelFit};
pub use maps::{omega_map, psi_map, PsiPoint};
pub use sweep::{
    fit_models, sweep, QueryTemplate, RowStatus, SeriesFit, SweepResult, SweepRow, SweepSpec,
    DEFAULT_EPS, DEFAULT_H,
};
