use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use reslab::carleman::search_with_fallback;
use reslab::scaling::{omega_map, psi_map, sweep, SweepResult};
use reslab::{
    search_tau0, Certificate, MollifiedPotential, MollifierKernel, PotentialBounds, Regularity,
};

use crate::config::{
    CertifyBlock, ConvertBlock, Manifest, MollifyBlock, RunConfig, SweepBlock,
};
use crate::{Cli, CliError, Command};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<()> {
    let (name, args) = match &cli.command {
        Command::Certify(a) => ("certify", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Mollify(a) => ("mollify", a),
        Command::Convert(a) => ("convert", a),
    };
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    }
    let mut config = load_config(&args.config, name)?;
    // the manifest must not depend on where the config file lived
    if let Some(path) = config.sweep.as_mut().and_then(|b| b.certificate.as_mut()) {
        if path.is_relative() {
            let base = args.config.parent().unwrap_or(Path::new("."));
            *path = std::path::absolute(base.join(&*path))
                .map_err(|e| CliError::Invalid(format!("certificate path {}: {e}", path.display())))?;
        }
    }
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", args.out.display())))?;
    let manifest = Manifest {
        command: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        resolved_config: config.clone(),
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;
    let missing = || CliError::Invalid(format!("config has no `{name}` block"));
    match &cli.command {
        Command::Certify(_) => certify_cmd(config.certify.as_ref().ok_or_else(missing)?, &args.out),
        Command::Sweep(_) => sweep_cmd(
            config.sweep.as_ref().ok_or_else(missing)?,
            config.seed,
            &args.out,
        ),
        Command::Mollify(_) => mollify_cmd(config.mollify.as_ref().ok_or_else(missing)?, &args.out),
        Command::Convert(_) => convert_cmd(config.convert.as_ref().ok_or_else(missing)?, &args.out),
    }
}

/// Reads a run config, or the resolved config inside a manifest.
fn load_config(path: &Path, command: &str) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    if value.get("resolved_config").is_some() {
        let manifest: Manifest = serde_json::from_value(value)
            .map_err(|e| CliError::Invalid(format!("manifest {}: {e}", path.display())))?;
        if manifest.command != command {
            return Err(CliError::Invalid(format!(
                "manifest was written by `{}`, not `{command}`",
                manifest.command
            )));
        }
        return Ok(manifest.resolved_config);
    }
    serde_json::from_value(value).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Internal(format!("serializing {}: {e}", path.display())))?;
    write_text(path, &text)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))
}

fn certify_cmd(block: &CertifyBlock, out: &Path) -> Result<()> {
    let config = block.config.resolve()?;
    let model = block.potential.build()?;
    let kernel = match config.regularity {
        Regularity::Lipschitz { beta } => {
            if model.alpha() < 1.0 || model.beta() < beta {
                return Err(CliError::Invalid(format!(
                    "potential {} (alpha {}, beta {}) is not Lipschitz with decay beta = {beta}",
                    block.potential.name(),
                    model.alpha(),
                    model.beta()
                )));
            }
            None
        }
        Regularity::Holder { alpha } => {
            if model.alpha() < alpha || model.beta() < 4.0 {
                return Err(CliError::Invalid(format!(
                    "potential {} (alpha {}, beta {}) is not in the Hölder class alpha = {alpha}, beta = 4",
                    block.potential.name(),
                    model.alpha(),
                    model.beta()
                )));
            }
            Some(MollifierKernel::bump(alpha)?)
        }
    };
    let bounds = PotentialBounds::from_model(&model, kernel.as_ref());
    let result = if block.fallback {
        search_with_fallback(&config, &bounds, block.c, &block.grid, block.tau0_max)
    } else {
        search_tau0(&config, &bounds, block.c, &block.grid, block.tau0_max)
    };
    let cert = result?;
    write_text(&out.join("certificate.json"), &cert.to_json())?;
    println!(
        "certified tau0 = {} (C = {}, fallback {})",
        cert.tau0_found, cert.c_used, cert.fallback_used
    );
    Ok(())
}

fn sweep_cmd(block: &SweepBlock, seed: u64, out: &Path) -> Result<()> {
    let certificate = match &block.certificate {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Invalid(format!("cannot read certificate {}: {e}", path.display()))
            })?;
            Some(Certificate::from_json(&text)?)
        }
        None => None,
    };
    if let Some(cert) = &certificate {
        let t = &block.template;
        if cert.config.d != t.d || cert.config.energy != t.energy || t.s < cert.config.s {
            return Err(CliError::Invalid(format!(
                "certificate (d = {}, E = {}, s = {}) does not cover the sweep (d = {}, E = {}, s = {})",
                cert.config.d, cert.config.energy, cert.config.s, t.d, t.energy, t.s
            )));
        }
    }
    let mut result = sweep(&block.spec(seed), certificate.as_ref())?;
    result.attach_fits(&block.candidates)?;
    write_sweep_csv(&out.join("sweep.csv"), &result)?;
    write_text(&out.join("plotdata.tsv"), &plot_data(&result))?;
    let summary = Summary {
        rows: result.rows.len(),
        failed_rows: result.rows.iter().filter(|r| !r.status.is_ok()).count(),
        certificate: block.certificate.as_ref().map(|p| p.display().to_string()),
        bound_respected: result.bound_respected,
        fits: &result.fits,
    };
    write_json(&out.join("summary.json"), &summary)?;
    println!(
        "{} rows, {} failed, bound respected: {:?}",
        summary.rows, summary.failed_rows, summary.bound_respected
    );
    if result.bound_respected == Some(false) {
        return Err(CliError::Math("measured g_s exceeds the certified bound".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    rows: usize,
    failed_rows: usize,
    certificate: Option<String>,
    bound_respected: Option<bool>,
    fits: &'a [reslab::scaling::SeriesFit],
}

#[derive(Serialize)]
struct CsvRow {
    h: f64,
    eps: f64,
    sign: &'static str,
    g_measured: Option<f64>,
    g_bound: Option<f64>,
    sectors: usize,
    lmax: usize,
    runtime_ms: u64,
    status: String,
}

fn write_sweep_csv(path: &Path, result: &SweepResult) -> Result<()> {
    let internal = |e: csv::Error| CliError::Internal(format!("writing {}: {e}", path.display()));
    let mut writer = csv::Writer::from_path(path).map_err(internal)?;
    for row in &result.rows {
        writer
            .serialize(CsvRow {
                h: row.h,
                eps: row.eps,
                sign: row.sign.symbol(),
                g_measured: row.g_measured,
                g_bound: row.g_bound,
                sectors: row.sectors,
                lmax: row.lmax,
                runtime_ms: row.runtime_ms,
                status: row.status.label(),
            })
            .map_err(internal)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))
}

/// Blocks of `h<TAB>g` pairs, one per series, separated by blank lines.
fn plot_data(result: &SweepResult) -> String {
    let mut keys = Vec::new();
    for row in &result.rows {
        if !keys.contains(&(row.eps, row.sign)) {
            keys.push((row.eps, row.sign));
        }
    }
    let mut text = String::new();
    for (eps, sign) in keys {
        let rows: Vec<_> = result.rows.iter().filter(|r| r.eps == eps && r.sign == sign).collect();
        let _ = writeln!(text, "# g_measured eps={eps} sign={}", sign.symbol());
        for r in &rows {
            if let Some(g) = r.g_measured {
                let _ = writeln!(text, "{}\t{}", r.h, g);
            }
        }
        text.push('\n');
    }
    // the bound does not depend on eps or the sign
    let mut seen = Vec::new();
    let mut bound = String::new();
    for r in &result.rows {
        if let Some(b) = r.g_bound {
            if !seen.contains(&r.h) {
                seen.push(r.h);
                let _ = writeln!(bound, "{}\t{}", r.h, b);
            }
        }
    }
    if !bound.is_empty() {
        text.push_str("# g_bound\n");
        text.push_str(&bound);
        text.push('\n');
    }
    text
}

fn mollify_cmd(block: &MollifyBlock, out: &Path) -> Result<()> {
    if block.thetas.is_empty() {
        return Err(CliError::Invalid("empty theta list".into()));
    }
    if block.points < 2 || block.r_max.is_nan() || block.r_max <= 0.0 {
        return Err(CliError::Invalid("mollify grid needs points >= 2 and r_max > 0".into()));
    }
    let model = block.potential.build()?;
    let kernel = MollifierKernel::bump(block.alpha.unwrap_or(model.alpha()))?;
    let step = block.r_max / (block.points - 1) as f64;
    let grid: Vec<f64> = (0..block.points).map(|i| i as f64 * step).collect();
    let mut text = String::from("theta\terror_ratio\tderiv_ratio\n");
    for &theta in &block.thetas {
        let ratios = MollifiedPotential::new(model.clone(), kernel, theta)?.ratios(&grid)?;
        let _ = writeln!(text, "{}\t{}\t{}", ratios.theta, ratios.error_ratio, ratios.deriv_ratio);
    }
    write_text(&out.join("mollify.tsv"), &text)
}

fn convert_cmd(block: &ConvertBlock, out: &Path) -> Result<()> {
    if block.lambdas.is_none() && block.ts.is_none() {
        return Err(CliError::Invalid("convert needs `lambdas` or `ts`".into()));
    }
    if let Some(lambdas) = &block.lambdas {
        let points = psi_map(block.class, lambdas, block.lambda0)?;
        let mut text = String::from("lambda\tpsi\th\tenergy\n");
        for p in points {
            let _ = writeln!(text, "{}\t{}\t{}\t{}", p.lambda, p.psi, p.h, p.energy);
        }
        write_text(&out.join("psi.tsv"), &text)?;
    }
    if let Some(ts) = &block.ts {
        let omegas = omega_map(block.class, ts, block.radial)?;
        let mut text = String::from("t\tomega\n");
        for (t, w) in ts.iter().zip(omegas) {
            let _ = writeln!(text, "{t}\t{w}");
        }
        write_text(&out.join("omega.tsv"), &text)?;
    }
    Ok(())
}
