//! Configuration-driven runs of the `entroprod` command.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use entroprod_core::entanglement::{
    concurrence, negativity, relative_entropy_of_entanglement, ReeOptions,
};
use entroprod_core::papermodels::{collision_run, paper_lindblad_model, verify_calibration};
use entroprod_core::production::{conjecture_scan_with_threads, production_series};
use entroprod_core::{EntropyValue, Error, Operator, ProductionSeries};
use serde::Serialize;
use serde_json::json;

use config::{RunConfig, Scenario};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "t,S,E,sigma,sigmaE,concurrence,negativity";

#[derive(Debug, Parser)]
#[command(
    name = "entroprod",
    version,
    about = "Entropy and entanglement production runs"
)]
pub struct Cli {
    pub scenario: Scenario,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Override a config entry, e.g. `--set paper.gamma=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output file; defaults to the config's `out`, then standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for the scan scenario.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration (exit code 1).
    Validation(String),
    /// Numerical failure or IO error (exit code 2).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid input: {m}"),
            Self::Runtime(m) => write!(f, "run failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence(_)
            | Error::StateInvalid { .. }
            | Error::CalibrationFailure { .. } => Self::Runtime(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

/// Formats a float as its shortest round-trip decimal (`inf` for infinity).
fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

/// Renders a series as CSV with `CSV_HEADER`.
pub fn series_csv(series: &ProductionSeries) -> String {
    let mut out = String::with_capacity(64 * (series.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in 0..series.len() {
        let row = [
            series.times[i],
            series.entropy[i],
            series.ent[i],
            series.sigma[i].value(),
            series.sigma_e[i],
            series.concurrence[i],
            series.negativity[i],
        ];
        let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses CSV written by `series_csv` and validates the series invariants.
pub fn parse_series_csv(text: &str) -> Result<ProductionSeries, CliError> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(CliError::Validation("unexpected CSV header".into()));
    }
    let mut s = ProductionSeries {
        times: Vec::new(),
        entropy: Vec::new(),
        ent: Vec::new(),
        sigma: Vec::new(),
        sigma_e: Vec::new(),
        concurrence: Vec::new(),
        negativity: Vec::new(),
        pre_concurrence: Vec::new(),
    };
    for (n, line) in lines.enumerate() {
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Validation(format!("CSV row {}: {e}", n + 1)))?;
        let [t, entropy, ent, sigma, sigma_e, conc, neg] = cells[..] else {
            return Err(CliError::Validation(format!(
                "CSV row {} has {} columns",
                n + 1,
                cells.len()
            )));
        };
        s.times.push(t);
        s.entropy.push(entropy);
        s.ent.push(ent);
        s.sigma.push(if sigma.is_infinite() && sigma > 0.0 {
            EntropyValue::Infinite
        } else {
            EntropyValue::Finite(sigma)
        });
        s.sigma_e.push(sigma_e);
        s.concurrence.push(conc);
        s.negativity.push(neg);
        s.pre_concurrence.push(conc);
    }
    s.validate()?;
    Ok(s)
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(contents).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

pub fn emit_series(series: &ProductionSeries, path: &Path) -> Result<(), CliError> {
    write_atomic(path, series_csv(series).as_bytes())
}

fn json_report(body: impl Serialize) -> Result<String, CliError> {
    let mut value = serde_json::to_value(body).map_err(|e| CliError::Runtime(e.to_string()))?;
    if let Some(obj) = value.as_object_mut() {
        obj.insert("schema".into(), json!(SCHEMA_VERSION));
    }
    let mut text =
        serde_json::to_string_pretty(&value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct MatrixOut {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<&Operator> for MatrixOut {
    fn from(op: &Operator) -> Self {
        let d = op.dim();
        Self {
            re: (0..d)
                .map(|i| (0..d).map(|j| op[(i, j)].re).collect())
                .collect(),
            im: (0..d)
                .map(|i| (0..d).map(|j| op[(i, j)].im).collect())
                .collect(),
        }
    }
}

fn required<T: Clone>(block: &Option<T>, name: &str) -> Result<T, CliError> {
    block
        .clone()
        .ok_or_else(|| CliError::Validation(format!("missing [{name}] block")))
}

/// Runs one scenario and returns the output document.
pub fn execute(scenario: Scenario, cfg: &RunConfig, threads: usize) -> Result<String, CliError> {
    match scenario {
        Scenario::Simulate => {
            let block = required(&cfg.simulate, "simulate")?;
            let grid = required(&cfg.grid, "grid")?.times()?;
            let model = block.model()?;
            let rho0 = block.initial.build(cfg.seed)?;
            Ok(series_csv(&production_series(&model, &rho0, &grid)?))
        }
        Scenario::Paper => {
            let p = required(&cfg.paper, "paper")?.params()?;
            let grid = required(&cfg.grid, "grid")?.times()?;
            verify_calibration(&p, &grid)?;
            let series = production_series(&paper_lindblad_model(&p)?, &p.initial_state(), &grid)?;
            Ok(series_csv(&series))
        }
        Scenario::Collision => {
            let cc = required(&cfg.collision, "collision")?.config();
            let (state, audit) = collision_run(&cc)?;
            json_report(json!({
                "config": cc,
                "final_state": MatrixOut::from(state.op()),
                "audit": audit,
            }))
        }
        Scenario::Scan => {
            let sc = required(&cfg.scan, "scan")?.config(cfg.seed);
            json_report(conjecture_scan_with_threads(&sc, threads)?)
        }
        Scenario::Ree => {
            let block = required(&cfg.ree, "ree")?;
            let rho = block.state.build(cfg.seed)?;
            let mut opts = ReeOptions::default();
            if let Some(n) = block.max_iterations {
                opts.max_iterations = n;
            }
            if let Some(t) = block.tolerance {
                opts.tolerance = t;
            }
            let est = relative_entropy_of_entanglement(&rho, &opts)?;
            json_report(json!({
                "value": est.value,
                "route": est.route,
                "sep": est.sep.as_ref().map(MatrixOut::from),
                "concurrence": concurrence(&rho)?,
                "negativity": negativity(&rho)?,
            }))
        }
    }
}

/// Full command: load the config, run the scenario, write the output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config::load(&cli.config, &cli.overrides, cli.scenario)?;
    let out = cli.out.clone().or_else(|| cfg.out.clone());
    if let Some(path) = &out {
        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(CliError::Validation(format!(
                "output directory {} does not exist",
                dir.display()
            )));
        }
    }
    if cli.threads == 0 {
        return Err(CliError::Validation("--threads must be at least 1".into()));
    }
    let doc = execute(cli.scenario, &cfg, cli.threads)?;
    match out {
        Some(path) => write_atomic(&path, doc.as_bytes()),
        None => std::io::stdout()
            .write_all(doc.as_bytes())
            .map_err(|e| CliError::Runtime(format!("stdout: {e}"))),
    }
}
