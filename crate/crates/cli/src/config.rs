//! Run configuration: one TOML document with a single scenario block.

use std::path::{Path, PathBuf};

use entroprod_core::entanglement::XFamilyState;
use entroprod_core::linalg::{c, kron, pauli, FactorLayout, Operator, C64};
use entroprod_core::papermodels::{CollisionConfig, EnvKind, PaperModelParams};
use entroprod_core::production::{uniform_grid, ScanConfig, ScanFamily};
use entroprod_core::states::{random_mixed, random_pure};
use entroprod_core::{DensityMatrix, LindbladModel};
use serde::Deserialize;
use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    Simulate,
    Paper,
    Collision,
    Scan,
    Ree,
}

impl Scenario {
    pub fn key(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Paper => "paper",
            Self::Collision => "collision",
            Self::Scan => "scan",
            Self::Ree => "ree",
        }
    }

    const ALL: [Scenario; 5] = [
        Self::Simulate,
        Self::Paper,
        Self::Collision,
        Self::Scan,
        Self::Ree,
    ];
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub grid: Option<GridSpec>,
    pub simulate: Option<SimulateBlock>,
    pub paper: Option<PaperBlock>,
    pub collision: Option<CollisionBlock>,
    pub scan: Option<ScanBlock>,
    pub ree: Option<ReeBlock>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        Ok(uniform_grid(self.t_max, self.points)?)
    }
}

/// Complex matrix as separate real and (optional) imaginary row lists.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    pub fn to_operator(&self) -> Result<Operator, CliError> {
        let d = self.re.len();
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if d == 0 || !shape_ok(&self.re) || self.im.as_ref().is_some_and(|im| !shape_ok(im)) {
            return Err(CliError::Validation(
                "matrices must be square with matching re/im shapes".into(),
            ));
        }
        Ok(Operator::from_fn(d, |i, j| {
            let im = self.im.as_ref().map_or(0.0, |m| m[i][j]);
            c(self.re[i][j], im)
        }))
    }
}

/// Two-qubit state specification.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    /// `sqrt(a0sq)|00> + sqrt(1-a0sq)|11>`.
    Ab {
        a0sq: f64,
    },
    Bell,
    MaximallyMixed,
    RandomPure,
    RandomMixed,
    XFamily {
        a: f64,
        m_re: f64,
        #[serde(default)]
        m_im: f64,
    },
    Matrix {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
}

impl StateSpec {
    pub fn build(&self, seed: u64) -> Result<DensityMatrix, CliError> {
        let layout = FactorLayout::two_qubits();
        let zero = c(0.0, 0.0);
        Ok(match self {
            Self::Ab { a0sq } => {
                if !(0.0..=1.0).contains(a0sq) {
                    return Err(CliError::Validation(format!(
                        "a0sq = {a0sq} outside [0, 1]"
                    )));
                }
                DensityMatrix::pure(
                    &[c(a0sq.sqrt(), 0.0), zero, zero, c((1.0 - a0sq).sqrt(), 0.0)],
                    layout,
                )?
            }
            Self::Bell => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                DensityMatrix::pure(&[c(s, 0.0), zero, zero, c(s, 0.0)], layout)?
            }
            Self::MaximallyMixed => DensityMatrix::maximally_mixed(layout),
            Self::RandomPure => random_pure(layout, seed),
            Self::RandomMixed => random_mixed(layout, seed),
            Self::XFamily { a, m_re, m_im } => {
                XFamilyState::new(*a, C64::new(*m_re, *m_im))?.to_density()
            }
            Self::Matrix { re, im } => {
                let op = MatrixSpec {
                    re: re.clone(),
                    im: im.clone(),
                }
                .to_operator()?;
                DensityMatrix::new(op, layout)?
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    pub hamiltonian: Option<MatrixSpec>,
    #[serde(default)]
    pub jumps: Vec<MatrixSpec>,
    /// Adds `sqrt(rate) σ⁻` on each qubit.
    #[serde(default)]
    pub damping_down: f64,
    /// Adds `sqrt(rate) σ⁺` on each qubit.
    #[serde(default)]
    pub damping_up: f64,
    pub initial: StateSpec,
}

impl SimulateBlock {
    pub fn model(&self) -> Result<LindbladModel, CliError> {
        let h = match &self.hamiltonian {
            Some(m) => m.to_operator()?,
            None => Operator::zeros(4),
        };
        let mut jumps = self
            .jumps
            .iter()
            .map(MatrixSpec::to_operator)
            .collect::<Result<Vec<_>, _>>()?;
        let id = pauli::id();
        for (rate, op) in [
            (self.damping_down, pauli::lower()),
            (self.damping_up, pauli::raise()),
        ] {
            if rate < 0.0 {
                return Err(CliError::Validation(format!(
                    "damping rate {rate} is negative"
                )));
            }
            if rate > 0.0 {
                let l = op.scale_re(rate.sqrt());
                jumps.push(kron(&l, &id));
                jumps.push(kron(&id, &l));
            }
        }
        Ok(LindbladModel::new(h, jumps, FactorLayout::two_qubits())?)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperBlock {
    pub a0sq: f64,
    pub omega: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub eta: f64,
}

impl PaperBlock {
    pub fn params(&self) -> Result<PaperModelParams, CliError> {
        Ok(PaperModelParams::new(
            self.a0sq, self.omega, self.gamma, self.kappa, self.eta,
        )?)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionBlock {
    pub a0sq: f64,
    pub eta: f64,
    pub total_time: f64,
    pub k: usize,
    #[serde(default = "default_env")]
    pub env: EnvKind,
    #[serde(default)]
    pub retain_env: bool,
}

fn default_env() -> EnvKind {
    EnvKind::Pure
}

impl CollisionBlock {
    pub fn config(&self) -> CollisionConfig {
        CollisionConfig {
            a0sq: self.a0sq,
            eta: self.eta,
            total_time: self.total_time,
            k: self.k,
            env: self.env,
            retain_env: self.retain_env,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub samples: usize,
    #[serde(default = "default_rates")]
    pub rate_range: [f64; 2],
    pub time_horizon: f64,
    pub grid_points: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_family")]
    pub family: ScanFamily,
}

fn default_rates() -> [f64; 2] {
    [0.1, 2.0]
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_family() -> ScanFamily {
    ScanFamily::Mixed
}

impl ScanBlock {
    pub fn config(&self, seed: u64) -> ScanConfig {
        ScanConfig {
            seed,
            samples: self.samples,
            rate_range: self.rate_range,
            time_horizon: self.time_horizon,
            grid_points: self.grid_points,
            tolerance: self.tolerance,
            family: self.family,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReeBlock {
    pub state: StateSpec,
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
}

/// Reads the config file, applies `key=value` overrides and checks that
/// exactly the requested scenario block is present.
pub fn load(path: &Path, overrides: &[String], scenario: Scenario) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| {
        CliError::Validation(format!("config is not valid TOML: {}", e.message()))
    })?;
    for item in overrides {
        apply_override(&mut table, item)?;
    }
    let present: Vec<&str> = Scenario::ALL
        .iter()
        .map(|s| s.key())
        .filter(|k| table.contains_key(*k))
        .collect();
    if present != [scenario.key()] {
        return Err(CliError::Validation(format!(
            "config must contain exactly one scenario block [{}], found {present:?}",
            scenario.key()
        )));
    }
    Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| {
            CliError::Validation(format!("invalid config: {}", e.message()))
        })
}

/// Sets a dotted key such as `paper.gamma=0.5`; the value is parsed as TOML,
/// falling back to a plain string.
pub fn apply_override(table: &mut Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item.split_once('=').ok_or_else(|| {
        CliError::Validation(format!("override {item:?} is not of the form key=value"))
    })?;
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Validation(format!(
            "override key {key:?} is malformed"
        )));
    }
    let (last, parents) = parts.split_last().unwrap();
    let mut node = table;
    for p in parents {
        let entry = node
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        node = entry.as_table_mut().ok_or_else(|| {
            CliError::Validation(format!("override key {key:?} descends into a non-table"))
        })?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_parses_values() {
        let mut t: Table = "[paper]\ngamma = 1.0\n".parse().unwrap();
        apply_override(&mut t, "paper.gamma=0.25").unwrap();
        apply_override(&mut t, "grid.points=7").unwrap();
        apply_override(&mut t, "collision.env=dephased-mixed").unwrap();
        assert_eq!(t["paper"]["gamma"].as_float(), Some(0.25));
        assert_eq!(t["grid"]["points"].as_integer(), Some(7));
        assert_eq!(t["collision"]["env"].as_str(), Some("dephased-mixed"));
        assert!(apply_override(&mut t, "novalue").is_err());
        assert!(apply_override(&mut t, "paper.gamma.x=1").is_err());
    }

    #[test]
    fn state_specs_build() {
        let bell: StateSpec = toml::from_str("kind = \"bell\"").unwrap();
        assert!((bell.build(0).unwrap().purity() - 1.0).abs() < 1e-12);
        let x: StateSpec = toml::from_str("kind = \"x-family\"\na = 0.6\nm_re = 0.3").unwrap();
        assert_eq!(x.build(0).unwrap().op()[(0, 3)].re, 0.3);
        let bad: StateSpec = toml::from_str("kind = \"ab\"\na0sq = 1.5").unwrap();
        assert!(bad.build(0).is_err());
    }

    #[test]
    fn matrix_shape_checked() {
        let m = MatrixSpec {
            re: vec![vec![1.0, 0.0], vec![0.0]],
            im: None,
        };
        assert!(m.to_operator().is_err());
    }
}
