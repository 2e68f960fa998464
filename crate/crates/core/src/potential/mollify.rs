use serde::{Deserialize, Serialize};

use super::{MollifierKernel, PotentialModel};
use crate::error::{invalid, LabError, Result};
use crate::quadrature::GaussLegendre;

const REL_TOL: f64 = 1e-8;
const MAX_DEPTH: usize = 48;

/// Smoothing width `theta = h^{2/(alpha+3)}` for `0 < h <= 1`, `0 < alpha < 1`.
pub fn theta_for(h: f64, alpha: f64) -> Result<f64> {
    if !(h > 0.0 && h <= 1.0) {
        return invalid(format!("h = {h} outside (0, 1]"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!(
            "alpha = {alpha} outside (0, 1); Lipschitz potentials are not mollified"
        ));
    }
    Ok(h.powf(2.0 / (alpha + 3.0)))
}

/// `V_theta(r) = ∫ rho(s) V(r + theta s) ds` and its derivative.
#[derive(Debug, Clone)]
pub struct MollifiedPotential {
    theta: f64,
    base: PotentialModel,
    kernel: MollifierKernel,
}

/// Sup-norm ratios of the mollification error and derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierRatios {
    pub theta: f64,
    /// `sup |V - V_theta| (r+1)^beta / theta^alpha`.
    pub error_ratio: f64,
    /// `sup |V'_theta| (r+1)^beta / theta^(alpha-1)`.
    pub deriv_ratio: f64,
}

impl MollifiedPotential {
    pub fn new(base: PotentialModel, kernel: MollifierKernel, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return invalid(format!("theta = {theta} must lie in (0, 1)"));
        }
        if (kernel.moment0 - 1.0).abs() > 1e-10 || kernel.deriv_integral.abs() > 1e-10 {
            return invalid("kernel moments violate the normalization");
        }
        Ok(Self {
            theta,
            base,
            kernel,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn base(&self) -> &PotentialModel {
        &self.base
    }

    pub fn kernel(&self) -> &MollifierKernel {
        &self.kernel
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let theta = self.theta;
        let f = |s: f64| self.kernel.rho(s) * self.base.eval(r + theta * s);
        let g = |s: f64| (self.kernel.rho(s) * self.base.eval(r + theta * s)).abs();
        integrate_checked(&f, &g, r, "V_theta")
    }

    pub fn eval_deriv(&self, r: f64) -> Result<f64> {
        let theta = self.theta;
        let v0 = self.base.eval(r);
        let f = |s: f64| self.kernel.rho_deriv(s) * (self.base.eval(r + theta * s) - v0);
        let g = |s: f64| f(s).abs();
        // d/dr ∫ rho(s) V(r + theta s) ds = -theta^{-1} ∫ rho'(s) (V(r + theta s) - V(r)) ds
        Ok(-integrate_checked(&f, &g, r, "V'_theta")? / theta)
    }

    /// Error and derivative ratios over `grid`.
    pub fn ratios(&self, grid: &[f64]) -> Result<MollifierRatios> {
        let (alpha, beta) = (self.base.alpha(), self.base.beta());
        let mut error_ratio = 0.0_f64;
        let mut deriv_ratio = 0.0_f64;
        for &r in grid {
            let w = (r + 1.0).powf(beta);
            let err = (self.base.eval(r) - self.eval(r)?).abs();
            error_ratio = error_ratio.max(err * w / self.theta.powf(alpha));
            deriv_ratio = deriv_ratio.max(self.eval_deriv(r)?.abs() * w / self.theta.powf(alpha - 1.0));
        }
        Ok(MollifierRatios {
            theta: self.theta,
            error_ratio,
            deriv_ratio,
        })
    }

    /// Checks the three pointwise bounds with multiplicative `slack`:
    /// the approximation error, the derivative growth and `V_theta <= p + O(theta^alpha)`.
    pub fn check_invariants(&self, grid: &[f64], slack: f64) -> Result<MollifierRatios> {
        let ratios = self.ratios(grid)?;
        let c = self.base.holder_const();
        let error_cap = c * self.kernel.moment_alpha * (1.0 + slack);
        let deriv_cap = c * self.kernel.moment_alpha_deriv * (1.0 + slack);
        if ratios.error_ratio > error_cap {
            return invalid(format!(
                "mollification error ratio {} exceeds {error_cap}",
                ratios.error_ratio
            ));
        }
        if ratios.deriv_ratio > deriv_cap {
            return invalid(format!(
                "mollified derivative ratio {} exceeds {deriv_cap}",
                ratios.deriv_ratio
            ));
        }
        let (alpha, beta) = (self.base.alpha(), self.base.beta());
        for &r in grid {
            let bound = self.base.envelope().eval(r)
                + c * self.kernel.moment_alpha * self.theta.powf(alpha) * (r + 1.0).powf(-beta);
            let v = self.eval(r)?;
            if v > bound * (1.0 + 1e-12) {
                return invalid(format!("V_theta({r}) = {v} exceeds envelope bound {bound}"));
            }
        }
        Ok(ratios)
    }
}

/// Adaptive 64-point Gauss–Legendre panels on `[0, 1]`: each panel is compared with its two
/// halves and accepted when they agree to `1e-8` relative to `∫ |integrand|`.
fn integrate_checked(
    f: &dyn Fn(f64) -> f64,
    abs_f: &dyn Fn(f64) -> f64,
    r: f64,
    what: &str,
) -> Result<f64> {
    let rule = GaussLegendre::order64();
    let whole = rule.integrate(0.0, 1.0, f);
    let scale = rule.integrate(0.0, 1.0, abs_f);
    if !whole.is_finite() || !scale.is_finite() {
        return Err(LabError::Evaluation {
            r,
            what: what.to_string(),
        });
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    let tol = REL_TOL * scale * 0.25;
    panel(f, rule, 0.0, 1.0, whole, tol, 0).ok_or_else(|| LabError::Accuracy {
        what: format!("{what} quadrature at r = {r} did not converge"),
        residual: tol,
    })
}

fn panel(
    f: &dyn Fn(f64) -> f64,
    rule: &GaussLegendre,
    lo: f64,
    hi: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Option<f64> {
    let mid = 0.5 * (lo + hi);
    let left = rule.integrate(lo, mid, f);
    let right = rule.integrate(mid, hi, f);
    if (left + right - whole).abs() <= tol {
        return Some(left + right);
    }
    if depth >= MAX_DEPTH {
        return None;
    }
    Some(panel(f, rule, lo, mid, left, tol, depth + 1)? + panel(f, rule, mid, hi, right, tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Envelope, PotentialFamily, RadialFn};
    use std::sync::Arc;

    fn affine() -> PotentialModel {
        let eval: RadialFn = Arc::new(|r: f64| -r);
        let envelope = Envelope::from_fn(Arc::new(|r: f64| (r + 1.0).powi(-2)));
        PotentialModel::new(PotentialFamily::Zero, eval, 1.0, 0.5, envelope, 1.0).unwrap()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_for(1.0, 0.3).unwrap(), 1.0);
        let t = theta_for(0.1, 0.5).unwrap();
        assert!((t - 0.1f64.powf(2.0 / 3.5)).abs() < 1e-15);
        assert!((t - 0.2683).abs() < 1e-4);
        assert!(theta_for(0.01, 1.0).is_err());
        assert!(theta_for(0.0, 0.5).is_err());
        assert!(theta_for(1.5, 0.5).is_err());
    }

    #[test]
    fn constants_are_reproduced_exactly() {
        let eval: RadialFn = Arc::new(|_| -0.25);
        let envelope = Envelope::from_fn(Arc::new(|r: f64| 0.5 * (r + 1.0).powi(-1)));
        let model =
            PotentialModel::new(PotentialFamily::Zero, eval, 0.5, 0.5, envelope, 0.0).unwrap();
        let m = MollifiedPotential::new(model, MollifierKernel::bump(0.5).unwrap(), 0.3).unwrap();
        for r in [0.0, 0.7, 13.0] {
            assert!((m.eval(r).unwrap() + 0.25).abs() < 1e-14);
            assert!(m.eval_deriv(r).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn affine_potential_shifts_by_first_moment() {
        let kernel = MollifierKernel::bump(1.0).unwrap();
        let theta = 0.2;
        let m = MollifiedPotential::new(affine(), kernel, theta).unwrap();
        for r in [0.0, 1.0, 5.5] {
            let expected = -(r + theta * kernel.moment1);
            assert!((m.eval(r).unwrap() - expected).abs() < 1e-13);
            assert!((m.eval_deriv(r).unwrap() + 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn translation_commutes_with_mollification() {
        let base = PotentialFamily::HolderBump {
            c: 1.0,
            alpha: 0.5,
            freq: 2.0,
        }
        .build()
        .unwrap();
        let shift = 0.37;
        let eval = base.as_fn();
        let p = base.envelope().as_fn();
        let shifted = PotentialModel::new(
            PotentialFamily::Zero,
            Arc::new(move |r: f64| eval(r + shift)),
            0.5,
            4.0,
            Envelope::from_fn(Arc::new(move |r: f64| p(r + shift))),
            base.holder_const(),
        )
        .unwrap();
        let kernel = MollifierKernel::bump(0.5).unwrap();
        let m = MollifiedPotential::new(base, kernel, 0.05).unwrap();
        let ms = MollifiedPotential::new(shifted, kernel, 0.05).unwrap();
        for r in [0.1, 1.2, 3.3] {
            assert!((ms.eval(r).unwrap() - m.eval(r + shift).unwrap()).abs() < 1e-10);
            assert!((ms.eval_deriv(r).unwrap() - m.eval_deriv(r + shift).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_theta_outside_unit_interval() {
        let kernel = MollifierKernel::bump(0.5).unwrap();
        assert!(MollifiedPotential::new(affine(), kernel, 1.5).is_err());
        assert!(MollifiedPotential::new(affine(), kernel, 0.0).is_err());
    }

    #[test]
    fn cusp_potential_ratios_are_stable_across_decades() {
        let base = PotentialFamily::HolderBump {
            c: 1.0,
            alpha: 0.5,
            freq: 1.0,
        }
        .build()
        .unwrap();
        let kernel = MollifierKernel::bump(0.5).unwrap();
        let grid: Vec<f64> = (0..10_000).map(|i| i as f64 * 20.0 / 10_000.0).collect();
        let ratios: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&t| {
                MollifiedPotential::new(base.clone(), kernel, t)
                    .unwrap()
                    .check_invariants(&grid, 0.5)
                    .unwrap()
                    .error_ratio
            })
            .collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 2.0, "{ratios:?}");
    }
}
