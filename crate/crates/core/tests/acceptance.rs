//! One line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reslab::carleman::{
    certify, find_h0, search_tau0, search_with_fallback, CarlemanConfig, Certificate, ConfigSpec,
    GridSpec, PhaseFunction, PotentialBounds, Regularity, WeightFunction, CARLEMAN, CARLEMAN_2D,
    DEFAULT_C, MOMENT, MONOTONICITY,
};
use reslab::radial::{
    assemble, conjugate_check, energy_audit, sector_norm, solve_conjugated, weighted_resolvent_norm,
    AngularSector, DiscreteOperator, RadialGrid, ResolventQuery, SectorPolicy, Sign, TestFunction,
};
use reslab::scaling::{
    fit_models, fit_points, omega_map, psi_map, sweep, RegularityClass, SweepSpec, DEFAULT_EPS,
    DEFAULT_H,
};
use reslab::{MollifiedPotential, MollifierKernel, PotentialFamily};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(0.0, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Uniform grid on [0, 20] plus points around every cusp of |cos r| at offsets up to theta.
fn cusp_grid(theta: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=10_000).map(|i| i as f64 * 0.002).collect();
    let mut c = FRAC_PI_2;
    while c < 20.0 {
        for t in [-1.0, -0.75, -0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
            grid.push(c + t * theta);
        }
        c += PI;
    }
    grid
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.8] {
        let model = PotentialFamily::HolderBump { c: 1.0, alpha, freq: 1.0 }.build().map_err(|e| e.to_string())?;
        let kernel = MollifierKernel::bump(alpha).map_err(|e| e.to_string())?;
        let mut err = Vec::new();
        let mut der = Vec::new();
        for theta in [1e-1, 1e-2, 1e-3] {
            let ratios = MollifiedPotential::new(model.clone(), kernel, theta)
                .and_then(|m| m.ratios(&cusp_grid(theta)))
                .map_err(|e| e.to_string())?;
            err.push(ratios.error_ratio);
            der.push(ratios.deriv_ratio);
        }
        ensure(spread(&err) <= 2.0, || format!("alpha {alpha}: error ratios {err:?}"))?;
        ensure(spread(&der) <= 2.0, || format!("alpha {alpha}: derivative ratios {der:?}"))?;
        worst = worst.max(spread(&err)).max(spread(&der));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!("largest spread across decades {worst:.3} (limit 2), {secs:.1} s"))
}

fn criterion_2() -> Outcome {
    let grid = GridSpec::default();
    let mut largest_tau0: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    let mut count = 0;
    for beta in [1.5f64, 2.0, 3.0] {
        let potentials = [
            PotentialFamily::Zero,
            PotentialFamily::PowerLaw { c: 1.0, delta: beta - 1.0 },
        ];
        for potential in potentials {
            let model = potential.build().map_err(|e| e.to_string())?;
            let bounds = PotentialBounds::from_model(&model, None);
            for h in [0.05, 0.1, 0.5] {
                let start = Instant::now();
                let config = ConfigSpec::new(Regularity::Lipschitz { beta }, h)
                    .resolve()
                    .map_err(|e| e.to_string())?;
                let label = format!("{} beta {beta} h {h}", potential.name());
                let cert = search_tau0(&config, &bounds, DEFAULT_C, &grid, 4096.0)
                    .map_err(|e| format!("{label}: {e}"))?;
                for name in [MONOTONICITY, MOMENT[0], MOMENT[1], MOMENT[2], CARLEMAN] {
                    let fam = cert.family(name).ok_or_else(|| format!("{label}: no {name}"))?;
                    ensure(fam.min_margin >= 0.0, || format!("{label}: {name} margin {}", fam.min_margin))?;
                }
                let finer = certify(&cert.config, &bounds, DEFAULT_C, &grid.finer())
                    .map_err(|e| format!("{label}: {e}"))?;
                ensure(finer.passed, || format!("{label}: finer grid fails {:?}", finer.worst()))?;
                let secs = start.elapsed().as_secs_f64();
                ensure(secs < 30.0, || format!("{label}: {secs:.1} s"))?;
                largest_tau0 = largest_tau0.max(cert.tau0_found);
                slowest = slowest.max(secs);
                count += 1;
            }
        }
    }
    Ok(format!(
        "{count} configurations certified, largest tau0 {largest_tau0}, slowest {slowest:.2} s"
    ))
}

fn criterion_3() -> Outcome {
    let grid = GridSpec::default();
    let model = PotentialFamily::HolderBump { c: 1.0, alpha: 0.5, freq: 1.0 }.build().map_err(|e| e.to_string())?;
    let kernel = MollifierKernel::bump(0.5).map_err(|e| e.to_string())?;
    let bounds = PotentialBounds::from_model(&model, Some(&kernel));
    let template = |h: f64| -> Result<CarlemanConfig, String> {
        let mut spec = ConfigSpec::new(Regularity::Holder { alpha: 0.5 }, h);
        spec.d = 2;
        spec.resolve().map_err(|e| e.to_string())
    };
    for h in [0.1, 0.5, 0.9] {
        let strong = template(h)?;
        let mut flat = strong.with_weights(0.5, 0.0);
        flat.ell = flat.ell.max(reslab::carleman::default_ell(0.5, flat.beta(), flat.s));
        let cert = search_tau0(&flat, &bounds, DEFAULT_C, &grid, 4096.0).map_err(|e| format!("(1/2, 0) at h {h}: {e}"))?;
        ensure(cert.r_min == 1.0 && cert.family(CARLEMAN_2D).is_some(), || "wrong family or r_min".into())?;
    }
    // tau0 that works for the strong weights at the smallest h, then the largest h it covers
    let hs = [0.05, 0.1, 0.2, 0.5, 0.9];
    let strong = search_tau0(&template(hs[0])?, &bounds, DEFAULT_C, &grid, 4096.0).map_err(|e| e.to_string())?;
    let tau0 = strong.tau0_found;
    let h0 = find_h0(&strong.config, &bounds, DEFAULT_C, &grid, &hs)
        .map_err(|e| e.to_string())?
        .ok_or("strong weights fail at every h")?;
    for &h in &hs {
        let cert = search_with_fallback(&template(h)?, &bounds, DEFAULT_C, &grid, tau0)
            .map_err(|e| format!("h {h}: {e}"))?;
        ensure(cert.passed, || format!("h {h} did not pass"))?;
        ensure(cert.fallback_used == (h > h0), || {
            format!("h {h}: fallback_used = {} with h0 = {h0}", cert.fallback_used)
        })?;
    }
    Ok(format!(
        "(1/2, 0) passes at h = 0.1, 0.5, 0.9; (1, 1/2) with tau0 = {tau0} holds up to h0 = {h0}, fallback above"
    ))
}

fn criterion_4() -> Outcome {
    let mut min_order = f64::INFINITY;
    for d in [2usize, 3, 5] {
        let test = if d % 2 == 0 { TestFunction::gaussian(4.0, 0.7) } else { TestFunction::gaussian(3.0, 1.0) };
        for l in [0, 1, 3] {
            let coarse = RadialGrid::new(0.0, 12.0, 11_999, 1.0).map_err(|e| e.to_string())?;
            let e1 = conjugate_check(d, l, &coarse, &test).map_err(|e| e.to_string())?;
            let e2 = conjugate_check(d, l, &coarse.refined(), &test).map_err(|e| e.to_string())?;
            min_order = min_order.min((e1 / e2).log2());
        }
    }
    ensure(min_order >= 1.9, || format!("observed order {min_order:.3}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for sign in [Sign::Plus, Sign::Minus] {
        let q = query(3, 0.5, 1e-2, sign, barrier())?;
        let op = assemble(&q, &AngularSector::new(3, 1, 0.5), &small_grid(3)).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let f: Vec<Complex64> = (0..op.len())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let form: Complex64 = op.apply(&f).iter().zip(&f).map(|(x, y)| x * y.conj()).sum();
            let norm2: f64 = f.iter().map(|z| z.norm_sqr()).sum();
            let lhs = q.eps * norm2;
            worst = worst.max((lhs - sign.factor() * form.im).abs() / lhs);
        }
    }
    ensure(worst <= 1e-12, || format!("symmetry identity off by {worst:e}"))?;
    Ok(format!("min order {min_order:.3} (>= 1.9), symmetry identity {worst:.1e} (<= 1e-12)"))
}

fn query(d: usize, h: f64, eps: f64, sign: Sign, potential: PotentialFamily) -> Result<ResolventQuery, String> {
    Ok(ResolventQuery {
        d,
        energy: 1.0,
        h,
        eps,
        sign,
        s: 0.6,
        potential: potential.build().map_err(|e| e.to_string())?,
    })
}

fn barrier() -> PotentialFamily {
    PotentialFamily::BarrierWell {
        height: 0.5,
        r_well: 0.5,
        r_barrier: 1.5,
        smoothness: 0.5,
    }
}

fn small_grid(d: usize) -> RadialGrid {
    let r_min = if d == 2 { 1.0 } else { 0.0 };
    RadialGrid::new(r_min, r_min + 18.0, 399, 1.0).expect("valid grid")
}

fn dense_norm(op: &DiscreteOperator) -> f64 {
    let n = op.len();
    let mut a = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = op.diag[i];
        if i + 1 < n {
            a[(i + 1, i)] = op.lower[i];
            a[(i, i + 1)] = op.upper[i];
        }
    }
    let inv = a.try_inverse().expect("sector matrix is invertible");
    let w = op.weights();
    DMatrix::from_fn(n, n, |i, j| inv[(i, j)] * (w[i] * w[j])).singular_values().max()
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for d in [2, 3] {
        for eps in [1e-2, 1e-4] {
            for potential in [PotentialFamily::Zero, barrier()] {
                let q = query(d, 0.5, eps, Sign::Plus, potential)?;
                let grid = small_grid(d);
                let mut oracle_max: f64 = 0.0;
                for l in 0..=2 {
                    let op = assemble(&q, &AngularSector::new(d, l, 0.5), &grid).map_err(|e| e.to_string())?;
                    let oracle = dense_norm(&op);
                    let est = sector_norm(&op, 0).map_err(|e| e.to_string())?;
                    worst = worst.max((est.value - oracle).abs() / oracle);
                    oracle_max = oracle_max.max(oracle);
                    cases += 1;
                }
                let est = weighted_resolvent_norm(&q, &grid, &SectorPolicy::fixed(2), 0).map_err(|e| e.to_string())?;
                worst = worst.max((est.value - oracle_max).abs() / oracle_max);
            }
        }
    }
    ensure(worst <= 1e-6, || format!("relative deviation {worst:e}"))?;
    Ok(format!("{cases} sectors on n = 400 grids, worst relative deviation {worst:.1e} (<= 1e-6)"))
}

/// Searches tau0 at the largest sweep h and re-certifies it at every other h.
fn sweep_certificate(regularity: Regularity, potential: &PotentialFamily) -> Result<Certificate, String> {
    let model = potential.build().map_err(|e| e.to_string())?;
    let kernel = match regularity {
        Regularity::Holder { alpha } => Some(MollifierKernel::bump(alpha).map_err(|e| e.to_string())?),
        Regularity::Lipschitz { .. } => None,
    };
    let bounds = PotentialBounds::from_model(&model, kernel.as_ref());
    let config = ConfigSpec::new(regularity, DEFAULT_H[0]).resolve().map_err(|e| e.to_string())?;
    let grid = GridSpec::default();
    let cert = search_tau0(&config, &bounds, DEFAULT_C, &grid, 4096.0).map_err(|e| e.to_string())?;
    for &h in &DEFAULT_H[1..] {
        let other = certify(&cert.config.with_h(h), &bounds, DEFAULT_C, &grid).map_err(|e| e.to_string())?;
        ensure(other.passed, || format!("tau0 {} fails at h {h}: {:?}", cert.tau0_found, other.worst()))?;
    }
    Ok(cert)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cases = [
        (Regularity::Lipschitz { beta: 2.0 }, barrier()),
        (
            Regularity::Holder { alpha: 0.5 },
            PotentialFamily::HolderBump { c: 1.0, alpha: 0.5, freq: 1.0 },
        ),
    ];
    let mut lines = Vec::new();
    for (regularity, potential) in cases {
        let cert = sweep_certificate(regularity, &potential)?;
        let mut spec = SweepSpec::default();
        spec.template.potential = potential.clone();
        spec.signs = vec![Sign::Plus, Sign::Minus];
        let result = sweep(&spec, Some(&cert)).map_err(|e| e.to_string())?;
        ensure(result.rows.len() == 20, || format!("{} rows", result.rows.len()))?;
        for row in &result.rows {
            ensure(row.status.is_ok(), || format!("{} h {} eps {}: {}", potential.name(), row.h, row.eps, row.status.label()))?;
        }
        ensure(result.bound_respected == Some(true), || {
            let bad = result
                .rows
                .iter()
                .find(|r| !matches!((r.g_measured, r.g_bound), (Some(g), Some(b)) if g <= b))
                .unwrap();
            format!("{}: g {:?} > bound {:?} at h {}", potential.name(), bad.g_measured, bad.g_bound, bad.h)
        })?;
        // minus rows reuse the plus measurement; spot-check one against a direct solve
        let row = result.rows.iter().find(|r| r.mirrored).ok_or("no mirrored row")?;
        let q = query(3, row.h, row.eps, Sign::Minus, potential.clone())?;
        let grid = spec.grid_policy.grid_for(&q).map_err(|e| e.to_string())?;
        let direct = weighted_resolvent_norm(&q, &grid, &spec.sector_policy, spec.seed).map_err(|e| e.to_string())?;
        let g = row.g_measured.unwrap_or(f64::NAN);
        ensure((g - direct.g_value).abs() <= 1e-6, || format!("mirrored g {g} vs direct {}", direct.g_value))?;
        let max_g = result.rows.iter().filter_map(|r| r.g_measured).fold(0.0, f64::max);
        let min_bound = result.rows.iter().filter_map(|r| r.g_bound).fold(f64::INFINITY, f64::min);
        lines.push(format!(
            "{} (tau0 {}): max g {max_g:.3}, min bound {min_bound:.3e}",
            potential.name(),
            cert.tau0_found
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 600.0, || format!("took {secs:.0} s"))?;
    Ok(format!("40 rows dominated (minus rows by conjugation, spot-checked); {}; {secs:.0} s", lines.join("; ")))
}

fn criterion_7() -> Outcome {
    let hs = DEFAULT_H;
    let kinds = [
        RegularityClass::Lipschitz,
        RegularityClass::Holder { alpha: 0.5 },
        RegularityClass::LInfinity,
    ];
    let mut worst: f64 = 0.0;
    for kind in kinds {
        let g: Vec<f64> = hs.iter().map(|&h| 3.0 * kind.shape(h)).collect();
        let report = fit_points(&hs, &g, &[kind]).map_err(|e| e.to_string())?;
        worst = worst.max((report.best_fit().model.c - 3.0).abs() / 3.0);
    }
    ensure(worst <= 1e-8, || format!("self-generated C recovered to {worst:e}"))?;

    let result = sweep(&SweepSpec::default(), None).map_err(|e| e.to_string())?;
    let mut picks = Vec::new();
    for eps in DEFAULT_EPS {
        let report = fit_models(&result, eps, Sign::Plus, &kinds).map_err(|e| e.to_string())?;
        let best = report.best_fit().model.kind;
        ensure(best == RegularityClass::Lipschitz, || format!("eps {eps}: {best} selected"))?;
        picks.push(format!("eps {eps}: {best}"));
    }
    Ok(format!("C recovered to {worst:.1e}; free sweep selects {}", picks.join(", ")))
}

fn criterion_8() -> Outcome {
    let psi = psi_map(RegularityClass::Lipschitz, &[10.0], 1.0).map_err(|e| e.to_string())?[0].psi;
    let w_lip = omega_map(RegularityClass::Lipschitz, &[10f64.exp()], false).map_err(|e| e.to_string())?[0];
    let w_rad = omega_map(RegularityClass::LInfinity, &[16f64.exp()], true).map_err(|e| e.to_string())?[0];
    let errors = [(psi - 10.0).abs(), (w_lip - 0.1).abs(), (w_rad - 16f64.powf(-0.75)).abs()];
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("deviations {errors:?}"))?;
    Ok(format!("psi(10) = {psi}, omega(e^10) = {w_lip}, radial omega(e^16) = {w_rad}"))
}

fn criterion_9() -> Outcome {
    let model = PotentialFamily::Zero.build().map_err(|e| e.to_string())?;
    let bounds = PotentialBounds::from_model(&model, Some(&MollifierKernel::bump(0.5).map_err(|e| e.to_string())?));
    let h = 0.5;
    let config = ConfigSpec::new(Regularity::Holder { alpha: 0.5 }, h).resolve().map_err(|e| e.to_string())?;
    let cert = search_tau0(&config, &bounds, DEFAULT_C, &GridSpec::default(), 4096.0).map_err(|e| e.to_string())?;
    let config = cert.config;
    let weight = WeightFunction::new(&config).map_err(|e| e.to_string())?;
    let phase = PhaseFunction::new(&config).map_err(|e| e.to_string())?;
    let a = config.a();
    // outgoing waves decay like exp(-eps r / 2h): about e^-10 across [0, 2a], then 20
    // more decay lengths before the wall, so |u|^2 stays clear of subnormals
    let eps = 10.0 * h / a;
    let r_max = 2.0 * a + 20.0 * 2.0 * h / eps;
    let n = (r_max / (h / 10.0)).ceil() as usize;
    let grid = RadialGrid::new(0.0, r_max, n, 1.0).map_err(|e| e.to_string())?;
    let q = ResolventQuery {
        d: 3,
        energy: config.energy,
        h,
        eps,
        sign: Sign::Plus,
        s: config.s,
        potential: model,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_slack = f64::INFINITY;
    let mut worst_identity: f64 = 0.0;
    for l in [0, 1, 3] {
        let op = assemble(&q, &AngularSector::new(3, l, h), &grid).map_err(|e| e.to_string())?;
        let conj = op.conjugated(&phase);
        let bumps: Vec<(f64, Complex64)> = (0..5)
            .map(|_| (rng.gen_range(1.0..0.5 * a), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let rhs: Vec<Complex64> = grid
            .points()
            .iter()
            .map(|&r| bumps.iter().map(|&(c, z)| z * (-(r - c).powi(2)).exp()).sum())
            .collect();
        // solve P v = e^{-phi/h} rhs and set u = e^{phi/h} v; factoring the conjugated
        // matrix directly loses digits across the e^{phi/h} range
        let shift: Vec<f64> = grid.points().iter().map(|&r| phase.eval(r) / h).collect();
        let scaled: Vec<Complex64> = rhs.iter().zip(&shift).map(|(z, s)| z * (-s).exp()).collect();
        let v = solve_conjugated(&op, &scaled).map_err(|e| e.to_string())?;
        let u: Vec<Complex64> = v.iter().zip(&shift).map(|(z, s)| z * s.exp()).collect();
        let trace = energy_audit(&u, &conj, &config, &weight, &phase, &rhs, &|_| 0.0).map_err(|e| e.to_string())?;
        let (slack, r) = trace.worst_slack();
        ensure(trace.passed(), || format!("l {l}: residual below -tol by {slack:e} at r = {r}"))?;
        ensure(trace.integrated_identity <= 1e-6, || format!("l {l}: integrated identity {:e}", trace.integrated_identity))?;
        worst_slack = worst_slack.min(slack);
        worst_identity = worst_identity.max(trace.integrated_identity);
    }
    Ok(format!(
        "tau0 {}, a = {a:.1}, n = {n}: min slack {worst_slack:.2e} (>= 0), integrated identity {worst_identity:.1e} (<= 1e-6)",
        config.tau0
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("mollifier ratios", criterion_1),
        ("inequality certification", criterion_2),
        ("d = 2 fallback", criterion_3),
        ("discrete operator fidelity", criterion_4),
        ("norm oracle equivalence", criterion_5),
        ("bound domination", criterion_6),
        ("scaling-shape recovery", criterion_7),
        ("growth maps", criterion_8),
        ("energy audit", criterion_9),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
