use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tridiag::{tridiag_mul, TridiagLu};
use crate::carleman::PhaseFunction;
use crate::error::{invalid, Result};
use crate::potential::PotentialModel;

/// Sign of the absorption term `+- i eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One resolvent `(P(h) - E +- i eps)^{-1}` weighted by `(r+1)^{-s}` on both sides.
#[derive(Debug, Clone)]
pub struct ResolventQuery {
    pub d: usize,
    pub energy: f64,
    pub h: f64,
    pub eps: f64,
    pub sign: Sign,
    pub s: f64,
    pub potential: PotentialModel,
}

impl ResolventQuery {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return invalid(format!("dimension d = {} must be at least 2", self.d));
        }
        if !(self.energy > 0.0) || !self.energy.is_finite() {
            return invalid(format!("energy E = {} must be positive", self.energy));
        }
        if !(self.h > 0.0 && self.h <= 1.0) {
            return invalid(format!("h = {} must lie in (0, 1]", self.h));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return invalid(format!("eps = {} must lie in (0, 1]", self.eps));
        }
        if !(self.s > 0.5) || !self.s.is_finite() {
            return invalid(format!("weight power s = {} must exceed 1/2", self.s));
        }
        Ok(())
    }
}

/// Angular momentum sector `l` with `Lambda_w = h^2 (l(l+d-2) + (d-1)(d-3)/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularSector {
    pub d: usize,
    pub l: usize,
    pub lambda_value: f64,
}

impl AngularSector {
    pub fn new(d: usize, l: usize, h: f64) -> Self {
        let (df, lf) = (d as f64, l as f64);
        let lambda_value = h * h * (lf * (lf + df - 2.0) + (df - 1.0) * (df - 3.0) / 4.0);
        Self { d, l, lambda_value }
    }
}

/// Uniform radial grid `r_j = r_min + j dr`, `j = 1..=n`, with Dirichlet values at
/// `r_min` and `r_max = r_min + (n+1) dr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
    /// `(r_max+1)^{-2s}` must not exceed this.
    pub tail_tol: f64,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n: usize, tail_tol: f64) -> Result<Self> {
        if !(r_min >= 0.0) || !(r_max > r_min) || n < 2 {
            return invalid(format!(
                "radial grid needs 0 <= r_min < r_max and n >= 2 (got {r_min}, {r_max}, {n})"
            ));
        }
        Ok(Self {
            r_min,
            r_max,
            n,
            tail_tol,
        })
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n + 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.r_min + (j + 1) as f64 * self.dr()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n + 1,
            ..*self
        }
    }
}

/// Rules turning a query into a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPolicy {
    /// `dr = h / points_per_h`; must be at least 10.
    #[serde(default = "GridPolicy::default_points_per_h")]
    pub points_per_h: f64,
    #[serde(default = "GridPolicy::default_tail_tol")]
    pub tail_tol: f64,
    /// `R_max >= damping h sqrt(E) / eps`: a wave reflected at the Dirichlet wall returns
    /// with amplitude `exp(-damping)`. The default 6.9 leaves 1e-3.
    #[serde(default = "GridPolicy::default_damping")]
    pub damping: f64,
    /// `R_max >= interaction_factor * (radius where |V| > 1e-3 E, plus 1)`.
    #[serde(default = "GridPolicy::default_interaction_factor")]
    pub interaction_factor: f64,
    /// Left end used in dimension 2.
    #[serde(default = "GridPolicy::default_r_min_2d")]
    pub r_min_2d: f64,
    /// Memory budget: the damping rule is capped at this many points.
    #[serde(default = "GridPolicy::default_max_points")]
    pub max_points: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            points_per_h: Self::default_points_per_h(),
            tail_tol: Self::default_tail_tol(),
            damping: Self::default_damping(),
            interaction_factor: Self::default_interaction_factor(),
            r_min_2d: Self::default_r_min_2d(),
            max_points: Self::default_max_points(),
        }
    }
}

impl GridPolicy {
    fn default_points_per_h() -> f64 {
        10.0
    }
    fn default_tail_tol() -> f64 {
        1e-4
    }
    fn default_damping() -> f64 {
        6.9
    }
    fn default_interaction_factor() -> f64 {
        4.0
    }
    fn default_r_min_2d() -> f64 {
        1.0
    }
    fn default_max_points() -> usize {
        2_000_000
    }

    /// Grid for `query`: spacing `h/points_per_h`, right end the largest of the tail,
    /// damping and interaction radii (damping capped by `max_points`).
    pub fn grid_for(&self, query: &ResolventQuery) -> Result<RadialGrid> {
        query.validate()?;
        if !(self.points_per_h >= 10.0) {
            return invalid("grid policy needs points_per_h >= 10 (dr <= h/10)");
        }
        let dr = query.h / self.points_per_h;
        let r_min = if query.d == 2 { self.r_min_2d } else { 0.0 };
        let r_tail = self.tail_tol.powf(-0.5 / query.s) - 1.0;
        let r_damp = self.damping * query.h * query.energy.sqrt() / query.eps;
        let r_int = self.interaction_factor * interaction_radius(&query.potential, query.energy);
        let r_cap = r_min + self.max_points as f64 * dr;
        let r_max = r_tail.max(r_int).max(r_damp.min(r_cap)) + r_min;
        let n = ((r_max - r_min) / dr).ceil() as usize;
        RadialGrid::new(r_min, r_min + n as f64 * dr, n - 1, self.tail_tol)
    }
}

/// `1 +` the largest sampled radius in `[0, 100]` where `|V| > 1e-3 E`.
pub fn interaction_radius(potential: &PotentialModel, energy: f64) -> f64 {
    let level = 1e-3 * energy;
    let step = 1e-2;
    let last = (0..=10_000)
        .rev()
        .map(|j| j as f64 * step)
        .find(|&r| potential.eval(r).abs() > level);
    last.map_or(1.0, |r| r + 1.0)
}

/// Tridiagonal matrix of one sector of `-h^2 d_r^2 + Lambda/r^2 + V - E +- i eps`
/// with Dirichlet ends.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub grid: RadialGrid,
    pub sector: AngularSector,
    pub h: f64,
    pub energy: f64,
    pub eps: f64,
    pub sign: Sign,
    pub s: f64,
    pub lower: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub upper: Vec<Complex64>,
}

/// Checks the grid rules and assembles the sector matrix.
pub fn assemble(
    query: &ResolventQuery,
    sector: &AngularSector,
    grid: &RadialGrid,
) -> Result<DiscreteOperator> {
    query.validate()?;
    if sector.d != query.d {
        return invalid("sector dimension differs from the query dimension");
    }
    let dr = grid.dr();
    if dr > query.h / 10.0 * (1.0 + 1e-12) {
        return invalid(format!(
            "grid rule dr <= h/10 violated: dr = {dr}, h = {}",
            query.h
        ));
    }
    if (grid.r_max + 1.0).powf(-2.0 * query.s) > grid.tail_tol {
        return invalid(format!(
            "grid rule (R_max+1)^(-2s) <= {} violated at R_max = {}",
            grid.tail_tol, grid.r_max
        ));
    }
    if query.d == 2 && !(grid.r_min > 0.0) {
        return invalid("dimension 2 needs r_min > 0");
    }
    let h2 = query.h * query.h;
    let kinetic = h2 / (dr * dr);
    let absorb = query.sign.factor() * query.eps;
    let diag: Vec<Complex64> = (0..grid.n)
        .map(|j| {
            let r = grid.point(j);
            let re = 2.0 * kinetic + sector.lambda_value / (r * r) + query.potential.eval(r)
                - query.energy;
            Complex64::new(re, absorb)
        })
        .collect();
    let off = vec![Complex64::new(-kinetic, 0.0); grid.n - 1];
    Ok(DiscreteOperator {
        grid: *grid,
        sector: *sector,
        h: query.h,
        energy: query.energy,
        eps: query.eps,
        sign: query.sign,
        s: query.s,
        lower: off.clone(),
        diag,
        upper: off,
    })
}

impl DiscreteOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        tridiag_mul(&self.lower, &self.diag, &self.upper, x)
    }

    pub fn factor(&self) -> Result<TridiagLu> {
        TridiagLu::factor(&self.lower, &self.diag, &self.upper)
    }

    /// `e^{phi/h} P e^{-phi/h}` on the same grid.
    pub fn conjugated(&self, phase: &PhaseFunction) -> Self {
        let phi: Vec<f64> = (0..self.grid.n)
            .map(|j| phase.eval(self.grid.point(j)) / self.h)
            .collect();
        let lower = (0..self.grid.n - 1)
            .map(|i| self.lower[i] * (phi[i + 1] - phi[i]).exp())
            .collect();
        let upper = (0..self.grid.n - 1)
            .map(|i| self.upper[i] * (phi[i] - phi[i + 1]).exp())
            .collect();
        Self {
            lower,
            upper,
            ..self.clone()
        }
    }

    /// Weight `(r_j+1)^{-s}` at the grid points.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.grid.n)
            .map(|j| (self.grid.point(j) + 1.0).powf(-self.s))
            .collect()
    }
}

/// A radial test function with its first two derivatives.
pub struct TestFunction {
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub df: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl TestFunction {
    /// `exp(-((r - center)/width)^2)`.
    pub fn gaussian(center: f64, width: f64) -> Self {
        let w2 = width * width;
        Self {
            f: Box::new(move |r| (-(r - center).powi(2) / w2).exp()),
            df: Box::new(move |r| -2.0 * (r - center) / w2 * (-(r - center).powi(2) / w2).exp()),
            d2f: Box::new(move |r| {
                let x = r - center;
                (4.0 * x * x / (w2 * w2) - 2.0 / w2) * (-(x * x) / w2).exp()
            }),
        }
    }
}

/// Compares the discrete `d_r^2 - (Lambda/h^2)/r^2` applied to `r^{(d-1)/2} f` with
/// `r^{(d-1)/2}` times the radial Laplacian of `f Y_l`; returns the max relative error.
pub fn conjugate_check(d: usize, l: usize, grid: &RadialGrid, test: &TestFunction) -> Result<f64> {
    let pts = grid.points();
    let half = (d as f64 - 1.0) / 2.0;
    let fmax = pts.iter().map(|&r| (test.f)(r).abs()).fold(0.0, f64::max);
    // for odd d the factor r^{(d-1)/2} is smooth and already enforces u(0) = 0
    let left = if d % 2 == 1 && grid.r_min == 0.0 {
        0.0
    } else {
        (test.f)(grid.r_min).abs()
    };
    let edge = left.max((test.f)(grid.r_max).abs());
    if !(fmax > 0.0) || edge > 1e-12 * fmax {
        return invalid("test function support touches the grid boundary");
    }
    let sector = AngularSector::new(d, l, 1.0);
    let ang = (l * (l + d - 2)) as f64;
    let dr = grid.dr();
    let u = |r: f64| r.powf(half) * (test.f)(r);
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &r in &pts {
        let lhs = (u(r + dr) - 2.0 * u(r) + u(r - dr)) / (dr * dr) - sector.lambda_value / (r * r) * u(r);
        let lap = (test.d2f)(r) + (d as f64 - 1.0) / r * (test.df)(r) - ang / (r * r) * (test.f)(r);
        let rhs = r.powf(half) * lap;
        err = err.max((lhs - rhs).abs());
        scale = scale.max(rhs.abs());
    }
    Ok(err / scale)
}
