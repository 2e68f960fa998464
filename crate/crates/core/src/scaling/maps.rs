use serde::Serialize;

use super::class::RegularityClass;
use crate::error::{invalid, Result};

/// `psi(lambda)` with the semiclassical substitution `h = lambda0/lambda`, `E = lambda0^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiPoint {
    pub lambda: f64,
    pub psi: f64,
    pub h: f64,
    pub energy: f64,
}

/// Growth function of the high-frequency resolvent bound `e^{C psi(lambda)}`.
pub fn psi_map(class: RegularityClass, lambdas: &[f64], lambda0: f64) -> Result<Vec<PsiPoint>> {
    class.validate()?;
    if !(lambda0 > 0.0) {
        return invalid(format!("lambda0 = {lambda0} must be positive"));
    }
    lambdas
        .iter()
        .map(|&lambda| {
            if !(lambda >= lambda0) || !lambda.is_finite() {
                return invalid(format!("lambda = {lambda} below lambda0 = {lambda0}"));
            }
            let power = lambda.powf(class.exponent());
            let psi = if class.has_log() {
                power * lambda.ln_1p()
            } else {
                power
            };
            Ok(PsiPoint {
                lambda,
                psi,
                h: lambda0 / lambda,
                energy: lambda0 * lambda0,
            })
        })
        .collect()
}

/// Decay rate `omega(t)` of the local energy; `radial` selects the variants valid for
/// radial potentials.
pub fn omega_map(class: RegularityClass, ts: &[f64], radial: bool) -> Result<Vec<f64>> {
    class.validate()?;
    let threshold = std::f64::consts::E.exp();
    ts.iter()
        .map(|&t| {
            if !(t > threshold) || !t.is_finite() {
                return invalid(format!("t = {t} must exceed e^e = {threshold}"));
            }
            let l = t.ln();
            let power = match class {
                RegularityClass::Lipschitz => return Ok(1.0 / l),
                RegularityClass::Holder { alpha } => (alpha + 3.0) / 4.0,
                RegularityClass::LInfinity => 0.75,
            };
            Ok(if radial {
                l.powf(-power)
            } else {
                (l.ln() / l).powf(power)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        let psi = psi_map(RegularityClass::Lipschitz, &[10.0], 1.0).unwrap();
        assert_eq!(psi[0].psi, 10.0);
        assert_eq!(psi[0].h, 0.1);
        let e = std::f64::consts::E;
        let psi = psi_map(RegularityClass::LInfinity, &[e - 1.0], 1.0).unwrap();
        assert!((psi[0].psi - (e - 1.0).powf(4.0 / 3.0)).abs() < 1e-14);
        // log(lambda + 1) = 1 here, so psi = 1.71828^{4/3} = 2.0581
        assert!((psi[0].psi - 2.0581).abs() < 1e-4);

        let w = omega_map(RegularityClass::Lipschitz, &[10f64.exp()], false).unwrap();
        assert!((w[0] - 0.1).abs() < 1e-15);
        let w = omega_map(RegularityClass::LInfinity, &[(e * e).exp()], false).unwrap();
        assert!((w[0] - (2.0 / (e * e)).powf(0.75)).abs() < 1e-14);
        assert!((w[0] - 0.375259).abs() < 1e-6);
        let w = omega_map(RegularityClass::LInfinity, &[16f64.exp()], true).unwrap();
        assert!((w[0] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn holder_at_alpha_one_matches_lipschitz_exponent() {
        assert_eq!(RegularityClass::Holder { alpha: 1.0 }.exponent(), 1.0);
        let h = omega_map(RegularityClass::Holder { alpha: 1.0 }, &[1e6], true).unwrap();
        let lip = omega_map(RegularityClass::Lipschitz, &[1e6], true).unwrap();
        assert!((h[0] - lip[0]).abs() < 1e-15);
    }

    #[test]
    fn domains_are_enforced() {
        assert!(omega_map(RegularityClass::Lipschitz, &[2.0], false).is_err());
        assert!(psi_map(RegularityClass::Lipschitz, &[0.5], 1.0).is_err());
        assert!(psi_map(RegularityClass::Holder { alpha: 1.5 }, &[2.0], 1.0).is_err());
    }
}
