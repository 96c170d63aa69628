//! Subcommand implementations. Each returns the JSON document for stdout.

use std::fs;
use std::path::Path;
use std::time::Instant;

use devar_core::assoc::{run_test, Method, TestConfig, TestReport};
use devar_core::matrix::to_rows as rows_of;
use devar_core::CovariateMatrix;
use devar_core::bench::{run_sweep, GridAxis, SkippedPoint, SweepKind, SweepResult, SweepRow, SweepSpec};
use devar_core::preprocess::{residualize, standardize};
use devar_core::simgen::{generate_pair, JiveConfig};
use devar_core::theory::{
    critical_value_rv, power_dev_scenario1, power_dev_scenario3, power_lower_bound, RegimeProfile,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::{Formula, SimulateArgs, SweepArgs, TestArgs, TheoryArgs};
use crate::error::{CliError, CliResult};
use crate::io::{load_config, load_matrix, write_file, write_matrix};

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Data(format!("serializing output: {e}")))
}

#[derive(Debug, Serialize)]
struct TestOutput {
    #[serde(flatten)]
    report: TestReport,
    alpha: f64,
    reject: bool,
    n: usize,
    p: usize,
    q: usize,
}

pub fn cmd_test(args: &TestArgs) -> CliResult<String> {
    if args.method == Method::Gold && (args.sigma_x.is_none() || args.sigma_y.is_none()) {
        return Err(CliError::Usage("--method gold requires --sigma-x and --sigma-y".into()));
    }
    let config = TestConfig {
        method: args.method,
        n_perms: args.perms,
        seed: args.seed,
        alpha: args.alpha,
    };
    config.validate()?;

    let mut x = load_matrix(&args.x, args.delimiter, args.header)?;
    let mut y = load_matrix(&args.y, args.delimiter, args.header)?;
    if x.nrows() != y.nrows() {
        return Err(CliError::Data(format!(
            "row count mismatch: {} has {} rows, {} has {}",
            args.x.display(),
            x.nrows(),
            args.y.display(),
            y.nrows()
        )));
    }
    if let Some(path) = &args.covariates {
        let raw = load_matrix(path, args.delimiter, args.header)?;
        let c = CovariateMatrix::with_intercept(raw.into_values())
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        x = residualize(&x, &c)?;
        y = residualize(&y, &c)?;
    }
    let x = standardize(&x).map_err(|e| CliError::Data(format!("{}: {e}", args.x.display())))?;
    let y = standardize(&y).map_err(|e| CliError::Data(format!("{}: {e}", args.y.display())))?;

    let (sx, sy) = match (&args.sigma_x, &args.sigma_y) {
        (Some(a), Some(b)) if args.method == Method::Gold => (
            Some(load_matrix(a, args.delimiter, false)?.into_values()),
            Some(load_matrix(b, args.delimiter, false)?.into_values()),
        ),
        _ => (None, None),
    };
    let result = run_test(&x, &y, &config, sx.as_ref(), sy.as_ref())?;
    to_json(&TestOutput {
        reject: result.rejects(args.alpha),
        report: result.report(),
        alpha: args.alpha,
        n: x.nrows(),
        p: x.ncols(),
        q: y.ncols(),
    })
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let mut config: JiveConfig = match &args.config {
        Some(p) => load_config(p)?,
        None => JiveConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let pair = generate_pair(&config)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    let t = &pair.truth;
    let truth = json!({
        "config": t.config,
        "l_jx": rows_of(t.l_jx.as_ref()),
        "l_jy": rows_of(t.l_jy.as_ref()),
        "l_ix": rows_of(t.l_ix.as_ref()),
        "l_iy": rows_of(t.l_iy.as_ref()),
        "s_j": rows_of(t.s_j.as_ref()),
        "s_ix": rows_of(t.s_ix.as_ref()),
        "s_iy": rows_of(t.s_iy.as_ref()),
    });
    let out = Path::new(&args.out);
    write_matrix(&out.join("x.csv"), &pair.x)?;
    write_matrix(&out.join("y.csv"), &pair.y)?;
    write_file(&out.join("truth.json"), to_json(&truth)?.as_bytes())?;
    to_json(&json!({
        "x": out.join("x.csv"),
        "y": out.join("y.csv"),
        "truth": out.join("truth.json"),
        "n": config.n,
        "p": config.p,
        "q": config.q,
        "seed": config.seed,
    }))
}

/// Sweep config file. Unset fields fall back to flags, then to defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepFile {
    pub base: JiveConfig,
    pub vary: Vec<GridAxis>,
    pub methods: Option<Vec<Method>>,
    pub replicates: Option<usize>,
    pub n_perms: Option<usize>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub allow_low_replicates: bool,
}

pub fn default_replicates(kind: SweepKind, fast: bool) -> usize {
    match (kind, fast) {
        (SweepKind::Power, false) => 1000,
        (SweepKind::Power, true) => 200,
        (SweepKind::TypeI, false) => 10_000,
        (SweepKind::TypeI, true) => 2000,
    }
}

pub fn build_sweep_spec(kind: SweepKind, args: &SweepArgs) -> CliResult<SweepSpec> {
    let file: SweepFile = match &args.config {
        Some(p) => load_config(p)?,
        None => SweepFile::default(),
    };
    let methods = args
        .methods
        .clone()
        .or(file.methods)
        .unwrap_or_else(|| Method::ALL.to_vec());
    let replicates = args
        .replicates
        .or(file.replicates)
        .unwrap_or_else(|| default_replicates(kind, args.fast));
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let mut spec = SweepSpec::new(kind, file.base, methods, replicates, seed);
    spec.vary = file.vary;
    if let Some(b) = args.perms.or(file.n_perms) {
        spec.n_perms = b;
    }
    if let Some(a) = args.alpha.or(file.alpha) {
        spec.alpha = a;
    }
    spec.allow_low_replicates = args.allow_low_replicates || file.allow_low_replicates;
    spec.validate()?;
    Ok(spec)
}

#[derive(Debug, Serialize)]
struct SweepOutput<'a> {
    kind: SweepKind,
    seed: u64,
    replicates: usize,
    n_perms: usize,
    alpha: f64,
    rows: &'a [SweepRow],
    skipped: &'a [SkippedPoint],
}

/// Tidy table: one line per grid point and method.
pub fn sweep_csv(spec: &SweepSpec, result: &SweepResult) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = spec.vary.iter().map(|a| a.name.clone()).collect();
    header.extend(
        [
            "method",
            "alpha",
            "rejections",
            "replicates",
            "failures",
            "rejection_rate",
            "monte_carlo_se",
            "mean_statistic",
        ]
        .map(String::from),
    );
    let err = |e: csv::Error| CliError::Data(format!("writing CSV: {e}"));
    w.write_record(&header).map_err(err)?;
    for row in &result.rows {
        let mut rec: Vec<String> = row.point.iter().map(|(_, v)| v.to_string()).collect();
        rec.push(row.method.tag().to_string());
        rec.push(row.alpha.to_string());
        rec.push(row.rejections.to_string());
        rec.push(row.replicates.to_string());
        rec.push(row.failures.to_string());
        rec.push(row.rejection_rate.to_string());
        rec.push(row.monte_carlo_se.to_string());
        rec.push(row.mean_statistic.to_string());
        w.write_record(&rec).map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Data(format!("writing CSV: {e}")))
}

pub fn cmd_sweep(kind: SweepKind, args: &SweepArgs, threads: usize) -> CliResult<String> {
    let spec = build_sweep_spec(kind, args)?;
    let start = Instant::now();
    let result = run_sweep(&spec)?;
    let wall = start.elapsed().as_secs_f64();
    for s in &result.skipped {
        log::warn!("skipped {:?}: {}", s.point, s.reason);
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
        write_file(&dir.join("sweep.csv"), &sweep_csv(&spec, &result)?)?;
        let sidecar = json!({
            "tool": "devar",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": spec.seed,
            "threads": threads,
            "wall_time_secs": wall,
            "spec": spec,
        });
        write_file(&dir.join("sweep.json"), to_json(&sidecar)?.as_bytes())?;
    }
    to_json(&SweepOutput {
        kind,
        seed: spec.seed,
        replicates: spec.replicates,
        n_perms: spec.n_perms,
        alpha: spec.alpha,
        rows: &result.rows,
        skipped: &result.skipped,
    })
}

fn required<T: Copy>(v: Option<T>, flag: &str, formula: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--formula {formula} requires --{flag}")))
}

pub fn cmd_theory(args: &TheoryArgs) -> CliResult<String> {
    let base = RegimeProfile {
        alpha: args.alpha,
        r_j: args.rj,
        r_ix: args.rix.unwrap_or(1),
        r_iy: args.riy.unwrap_or(1),
        tau_x: args.tau_x,
        tau_y: args.tau_y,
        mu4_x: args.mu4_x,
        mu4_y: args.mu4_y,
        sigma_ix: args.sigma_ix.unwrap_or(1.0),
        sigma_iy: args.sigma_iy.unwrap_or(1.0),
        ..RegimeProfile::default()
    };
    let (name, inputs, value) = match args.formula {
        Formula::Scenario1 => {
            let p = RegimeProfile {
                c_x: required(args.cx, "cx", "scenario1")?,
                c_y: required(args.cy, "cy", "scenario1")?,
                sigma_j: required(args.sigma_j, "sigma-j", "scenario1")?,
                ..base
            };
            ("scenario1", json!(p), power_dev_scenario1(&p)?)
        }
        Formula::Scenario3 => {
            let p = RegimeProfile {
                c_x: required(args.cx, "cx", "scenario3")?,
                c_y: required(args.cy, "cy", "scenario3")?,
                ..base
            };
            ("scenario3", json!(p), power_dev_scenario3(&p)?)
        }
        Formula::LowerBound => (
            "lower-bound",
            json!({ "alpha": args.alpha, "r_j": args.rj }),
            power_lower_bound(args.alpha, args.rj)?,
        ),
        Formula::CriticalRv => {
            let p = RegimeProfile {
                n: required(args.n, "n", "critical-rv")?,
                sigma_ix: required(args.sigma_ix, "sigma-ix", "critical-rv")?,
                sigma_iy: required(args.sigma_iy, "sigma-iy", "critical-rv")?,
                ..base
            };
            ("critical-rv", json!(p), critical_value_rv(&p)?)
        }
    };
    to_json(&json!({ "formula": name, "inputs": inputs, "value": value }))
}
