use crate::error::{check_finite, invalid, Result};

/// Grid estimate of the weighted Hölder seminorm
/// `sup |f(r) - f(r')| (r+1)^beta / |r - r'|^alpha` over pairs with `0 < |r - r'| <= 1`.
///
/// Both orientations of each pair are considered, so the weight uses the larger radius.
/// The value is a lower bound on the true seminorm and never decreases when points are added.
pub fn holder_seminorm(
    f: &dyn Fn(f64) -> f64,
    alpha: f64,
    beta: f64,
    grid: &[f64],
) -> Result<f64> {
    if grid.len() < 2 {
        return invalid("holder_seminorm needs at least two grid points");
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha = {alpha} outside (0, 1]"));
    }
    if !(beta >= 0.0) {
        return invalid(format!("beta = {beta} must be non-negative"));
    }
    if grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return invalid("grid points must be finite and non-negative");
    }
    let mut points = grid.to_vec();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let values = points
        .iter()
        .map(|&r| check_finite(r, f(r), "seminorm integrand"))
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0.0_f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let gap = points[j] - points[i];
            if gap > 1.0 {
                break;
            }
            let weight = (points[j] + 1.0).powf(beta);
            let q = (values[j] - values[i]).abs() * weight / gap.powf(alpha);
            best = best.max(q);
        }
    }
    Ok(best)
}
