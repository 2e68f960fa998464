use num_complex::Complex64;
use serde::Serialize;

use super::operator::DiscreteOperator;
use crate::carleman::{CarlemanConfig, PhaseFunction, WeightFunction};
use crate::error::{invalid, Result};

/// Residual bound required of the solution handed to [`energy_audit`], in the frame
/// `e^{-phi/h} u`.
pub const SOLVE_TOL: f64 = 1e-8;

/// Energy functional and flux inequality along the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTrace {
    /// Node radii including both Dirichlet ends.
    pub grid: Vec<f64>,
    pub f_values: Vec<f64>,
    /// Cell midpoints where the derivative of `mu F` is evaluated.
    pub midpoints: Vec<f64>,
    /// `(mu F)' - rhs` per midpoint; the continuum inequality says `>= 0`.
    pub flux_inequality_residuals: Vec<f64>,
    /// `10 dr` times the sum of magnitudes of the terms at each midpoint.
    pub tolerances: Vec<f64>,
    /// `|int (mu F)'| / int |(mu F)'|`.
    pub integrated_identity: f64,
}

impl EnergyTrace {
    /// Smallest `residual + tolerance`; non-negative iff every point passes.
    pub fn worst_slack(&self) -> (f64, f64) {
        self.flux_inequality_residuals
            .iter()
            .zip(&self.tolerances)
            .zip(&self.midpoints)
            .map(|((res, tol), &r)| (res + tol, r))
            .fold((f64::INFINITY, 0.0), |best, cur| if cur.0 < best.0 { cur } else { best })
    }

    pub fn passed(&self) -> bool {
        self.worst_slack().0 >= 0.0
    }
}

/// Solves the conjugated system `P_phi u = rhs`.
pub fn solve_conjugated(conjugated: &DiscreteOperator, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let lu = conjugated.factor()?;
    let mut u = rhs.to_vec();
    lu.solve_in_place(&mut u);
    Ok(u)
}

/// Relative residual `||P_phi u - rhs|| / ||rhs||`.
pub fn relative_residual(op: &DiscreteOperator, u: &[Complex64], rhs: &[Complex64]) -> f64 {
    let au = op.apply(u);
    let num: f64 = au.iter().zip(rhs).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = rhs.iter().map(|z| z.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Evaluates `F(r) = -(Lambda/r^2 - E - phi'^2 + V_L)|u|^2 + |D_r u|^2` on the grid and the
/// residual of `(mu F)' >= (E/2) mu'|u|^2 + (mu'/3)|Du|^2 - 3 h^{-2} mu^2/mu' |P_phi u|^2
/// - eps h^{-1} mu (|u|^2 + |Du|^2)` at cell midpoints.
///
/// `conjugated` must be the sector matrix conjugated by `e^{phi/h}` and `u` must solve it
/// with right-hand side `rhs`; `v_long` is the smooth part of the potential.
pub fn energy_audit(
    u: &[Complex64],
    conjugated: &DiscreteOperator,
    config: &CarlemanConfig,
    weight: &WeightFunction,
    phase: &PhaseFunction,
    rhs: &[Complex64],
    v_long: &dyn Fn(f64) -> f64,
) -> Result<EnergyTrace> {
    if config.d < 3 {
        return invalid("energy audit needs d >= 3 (non-negative angular operator)");
    }
    let n = conjugated.len();
    if u.len() != n || rhs.len() != n {
        return invalid("solution and right-hand side must match the grid");
    }
    let grid = conjugated.grid;
    if grid.r_min != 0.0 {
        return invalid("energy audit integrates from r = 0");
    }
    let rhs_norm: f64 = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if rhs_norm > 0.0 {
        // measured in the unconjugated frame: e^{phi/h} spans hundreds of orders of magnitude
        let h = conjugated.h;
        let scale: Vec<f64> = (0..n).map(|j| (-phase.eval(grid.point(j)) / h).exp()).collect();
        let au = conjugated.apply(u);
        let num: f64 = (0..n).map(|j| ((au[j] - rhs[j]) * scale[j]).norm_sqr()).sum();
        let den: f64 = (0..n).map(|j| (rhs[j] * scale[j]).norm_sqr()).sum();
        let res = (num / den).sqrt();
        if !(res <= SOLVE_TOL) {
            return invalid(format!("solution residual {res:e} exceeds {SOLVE_TOL:e}"));
        }
    }
    let h = conjugated.h;
    let e = conjugated.energy;
    let eps = conjugated.eps;
    let lambda = conjugated.sector.lambda_value;
    let dr = grid.dr();

    // nodes 0..=n+1 with Dirichlet zeros at both ends
    let m = n + 2;
    let radii: Vec<f64> = (0..m).map(|j| grid.r_min + j as f64 * dr).collect();
    let mut uu = vec![Complex64::new(0.0, 0.0); m];
    uu[1..=n].copy_from_slice(u);
    let mut ff = vec![Complex64::new(0.0, 0.0); m];
    ff[1..=n].copy_from_slice(rhs);
    let ih = Complex64::new(0.0, -h);
    let du: Vec<Complex64> = (0..m)
        .map(|j| {
            let d = if j == 0 {
                (-3.0 * uu[0] + 4.0 * uu[1] - uu[2]) / (2.0 * dr)
            } else if j == m - 1 {
                (3.0 * uu[j] - 4.0 * uu[j - 1] + uu[j - 2]) / (2.0 * dr)
            } else {
                (uu[j + 1] - uu[j - 1]) / (2.0 * dr)
            };
            ih * d
        })
        .collect();
    let f_values: Vec<f64> = (0..m)
        .map(|j| {
            let r = radii[j];
            let dphi = phase.eval_deriv(r);
            let centrifugal = if r > 0.0 { lambda / (r * r) } else { 0.0 };
            -(centrifugal - e - dphi * dphi + v_long(r)) * uu[j].norm_sqr() + du[j].norm_sqr()
        })
        .collect();
    let g: Vec<f64> = (0..m).map(|j| weight.eval(radii[j]) * f_values[j]).collect();

    let mut midpoints = Vec::with_capacity(m - 1);
    let mut residuals = Vec::with_capacity(m - 1);
    let mut tolerances = Vec::with_capacity(m - 1);
    let mut signed = 0.0;
    let mut absolute = 0.0;
    for j in 0..m - 1 {
        let mut r = 0.5 * (radii[j] + radii[j + 1]);
        if r == weight.a() {
            r = r.next_up();
        }
        let dg = (g[j + 1] - g[j]) / dr;
        let mu = weight.eval(r);
        let dmu = weight.eval_deriv(r)?;
        let u2 = 0.5 * (uu[j].norm_sqr() + uu[j + 1].norm_sqr());
        let du2 = 0.5 * (du[j].norm_sqr() + du[j + 1].norm_sqr());
        let f2 = 0.5 * (ff[j].norm_sqr() + ff[j + 1].norm_sqr());
        let terms = [
            0.5 * e * dmu * u2,
            dmu / 3.0 * du2,
            -3.0 / (h * h) * mu * mu / dmu * f2,
            -eps / h * mu * (u2 + du2),
        ];
        let rhs_value: f64 = terms.iter().sum();
        let scale = dg.abs() + terms.iter().map(|t| t.abs()).sum::<f64>();
        midpoints.push(r);
        residuals.push(dg - rhs_value);
        tolerances.push(10.0 * dr * scale);
        signed += dg * dr;
        absolute += dg.abs() * dr;
    }
    let integrated_identity = if absolute > 0.0 { signed.abs() / absolute } else { 0.0 };
    Ok(EnergyTrace {
        grid: radii,
        f_values,
        midpoints,
        flux_inequality_residuals: residuals,
        tolerances,
        integrated_identity,
    })
}
