//! Entropy and entanglement production along trajectories, the gap formula
//! for the two-qubit model, sudden-death detection and the randomized scan
//! of `|σ_E| <= σ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    default_step, entropy_production, integrate_default, propagate, reference_state, LindbladModel,
    Trajectory,
};
use crate::entanglement::{
    negativity, pre_concurrence, relative_entropy_of_entanglement, ReeOptions, ReeRoute,
};
use crate::error::{Error, Result};
use crate::linalg::{kron, FactorLayout, Operator};
use crate::papermodels::{closed_form_state, paper_lindblad_model, PaperModelParams};
use crate::states::{
    gaussian_matrix, random_mixed_with, random_pure_with, von_neumann_entropy, DensityMatrix,
    EntropyValue,
};

/// Concurrence at or below this counts as zero for sudden-death detection.
pub const DEATH_THRESHOLD: f64 = 1e-9;

/// Local finite-difference offset, relative to `min(h, t)`.
const LOCAL_FD_FRACTION: f64 = 1e-3;

/// Pointwise production quantities on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductionSeries {
    pub times: Vec<f64>,
    /// Von Neumann entropy `S(ρ(t))`.
    pub entropy: Vec<f64>,
    /// Relative entropy of entanglement `E(ρ(t))`.
    pub ent: Vec<f64>,
    pub sigma: Vec<EntropyValue>,
    pub sigma_e: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub negativity: Vec<f64>,
    /// Signed concurrence before clamping; locates zero crossings between grid points.
    pub pre_concurrence: Vec<f64>,
}

impl ProductionSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks equal lengths, increasing times and `σ >= -1e-9`.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        let lens = [
            self.entropy.len(),
            self.ent.len(),
            self.sigma.len(),
            self.sigma_e.len(),
            self.concurrence.len(),
            self.negativity.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::ConfigInvalid(
                "series columns differ in length".into(),
            ));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ConfigInvalid(
                "series times must increase strictly".into(),
            ));
        }
        if let Some(s) = self.sigma.iter().find(|s| s.value() < -1e-9) {
            return Err(Error::ConfigInvalid(format!(
                "negative entropy production {}",
                s.value()
            )));
        }
        Ok(())
    }
}

/// How `σ_E` is differentiated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaEMethod {
    /// `Local` when every state has a closed-form REE, `Grid` otherwise.
    #[default]
    Auto,
    /// Differences of `E` between neighbouring grid points.
    Grid,
    /// Differences of `E` at `t ± δ`, propagating each grid state by `δ << h`.
    Local,
}

#[derive(Debug, Clone, Default)]
pub struct SeriesOptions {
    pub method: SigmaEMethod,
    pub ree: ReeOptions,
}

/// Evenly spaced grid `0, t_max/(n-1), ..., t_max`.
pub fn uniform_grid(t_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::ConfigInvalid(format!(
            "grid needs t_max > 0 and at least 2 points, got t_max = {t_max}, points = {points}"
        )));
    }
    let h = t_max / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { t_max } else { i as f64 * h })
        .collect())
}

fn grid_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::ConfigInvalid(
            "differentiation needs at least two grid points".into(),
        ));
    }
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if times
        .windows(2)
        .any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0))
    {
        return Err(Error::ConfigInvalid(
            "entanglement production needs a uniform grid".into(),
        ));
    }
    Ok(h)
}

struct EntPoint {
    value: f64,
    route: ReeRoute,
    sep: Option<Operator>,
}

fn ent_point(op: &Operator, layout: &FactorLayout, opts: &ReeOptions) -> Result<EntPoint> {
    let rho = DensityMatrix::repaired(op, layout.clone(), 1e-8)?;
    let est = relative_entropy_of_entanglement(&rho, opts)?;
    Ok(EntPoint {
        value: est.value,
        route: est.route,
        sep: est.sep,
    })
}

/// Derivative at `values[i]` from samples spaced `h`, using only samples in the
/// same phase (entangled or not) as point `i`.
fn phase_derivative(values: &[f64], phase: &[bool], i: usize, h: f64) -> f64 {
    let n = values.len();
    let same = |j: isize| j >= 0 && (j as usize) < n && phase[j as usize] == phase[i];
    let v = |j: isize| values[j as usize];
    let i = i as isize;
    if same(i - 1) && same(i + 1) {
        (v(i + 1) - v(i - 1)) / (2.0 * h)
    } else if same(i + 1) && same(i + 2) {
        (-3.0 * v(i) + 4.0 * v(i + 1) - v(i + 2)) / (2.0 * h)
    } else if same(i - 1) && same(i - 2) {
        (3.0 * v(i) - 4.0 * v(i - 1) + v(i - 2)) / (2.0 * h)
    } else if same(i + 1) {
        (v(i + 1) - v(i)) / h
    } else if same(i - 1) {
        (v(i) - v(i - 1)) / h
    } else {
        0.0
    }
}

/// `E(t)` and `σ_E = dE/dt` along a two-qubit trajectory.
///
/// Differences never straddle a change between entangled and separable
/// states, so the kink at a sudden-death time is differentiated one-sidedly.
pub fn entanglement_series(
    traj: &Trajectory,
    opts: &SeriesOptions,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let layout = traj.model.layout().clone();
    if !layout.is_two_qubit() {
        return Err(Error::LayoutMismatch {
            factors: layout.factors().to_vec(),
            dim: traj.model.dim(),
        });
    }
    let n = traj.states.len();
    let mut ent = Vec::with_capacity(n);
    let mut all_closed = true;
    let mut ree = opts.ree.clone();
    for s in &traj.states {
        let p = ent_point(s.op(), &layout, &ree)?;
        all_closed &= p.route != ReeRoute::Optimizer;
        if let Some(sep) = p.sep {
            ree.initial = Some(sep);
        }
        ent.push(p.value);
    }
    if n < 2 {
        return Ok((ent, vec![0.0; n]));
    }
    let h = grid_spacing(&traj.times)?;
    let method = match opts.method {
        SigmaEMethod::Auto if all_closed => SigmaEMethod::Local,
        SigmaEMethod::Auto => SigmaEMethod::Grid,
        m => m,
    };

    let sigma_e = match method {
        SigmaEMethod::Local => {
            let step = default_step(&traj.model, &traj.times);
            let mut out = Vec::with_capacity(n);
            for (i, s) in traj.states.iter().enumerate() {
                let t = traj.times[i] - traj.times[0];
                let delta = LOCAL_FD_FRACTION * if i == 0 { h } else { h.min(t) };
                let mut vals = [0.0; 5];
                let mut phase = [false; 5];
                for k in -2isize..=2 {
                    let idx = (k + 2) as usize;
                    vals[idx] = match k {
                        0 => ent[i],
                        // no history before the first grid point
                        _ if i == 0 && k < 0 => continue,
                        _ => {
                            let op = propagate(&traj.model, s.op(), k as f64 * delta, step);
                            ent_point(&op, &layout, &opts.ree)?.value
                        }
                    };
                    phase[idx] = vals[idx] > 0.0;
                }
                if i == 0 {
                    phase[0] = !phase[2];
                    phase[1] = !phase[2];
                }
                out.push(phase_derivative(&vals, &phase, 2, delta));
            }
            out
        }
        _ => {
            let phase: Vec<bool> = ent.iter().map(|&e| e > 0.0).collect();
            (0..n)
                .map(|i| phase_derivative(&ent, &phase, i, h))
                .collect()
        }
    };
    Ok((ent, sigma_e))
}

/// Integrates `model` from `rho0` and fills every production series.
///
/// `σ` uses the reference state the dynamics relaxes to from `rho0`.
pub fn production_series(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &[f64],
) -> Result<ProductionSeries> {
    production_series_with(model, rho0, grid, &SeriesOptions::default())
}

pub fn production_series_with(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &[f64],
    opts: &SeriesOptions,
) -> Result<ProductionSeries> {
    if !model.layout().is_two_qubit() {
        return Err(Error::LayoutMismatch {
            factors: model.layout().factors().to_vec(),
            dim: model.dim(),
        });
    }
    let reference = reference_state(model, rho0)?;
    let traj = integrate_default(model, rho0, grid)?;
    let (ent, sigma_e) = entanglement_series(&traj, opts)?;
    let n = traj.states.len();
    let mut series = ProductionSeries {
        times: traj.times.clone(),
        entropy: Vec::with_capacity(n),
        ent,
        sigma: Vec::with_capacity(n),
        sigma_e,
        concurrence: Vec::with_capacity(n),
        negativity: Vec::with_capacity(n),
        pre_concurrence: Vec::with_capacity(n),
    };
    for s in &traj.states {
        series.entropy.push(von_neumann_entropy(s));
        series.sigma.push(entropy_production(model, s, &reference)?);
        let pre = pre_concurrence(s)?;
        series.pre_concurrence.push(pre);
        series.concurrence.push(pre.clamp(0.0, 1.0));
        series.negativity.push(negativity(s)?);
    }
    Ok(series)
}

/// `σ - |σ_E| = ȧ ln[(1-a) a_∞ / (a (1-a_∞))]` for the two-qubit model.
pub fn gap_formula(p: &PaperModelParams, t: f64) -> Result<f64> {
    let a_inf = p
        .a_inf()
        .ok_or_else(|| Error::DegenerateParams("gap needs gamma + kappa > 0".into()))?;
    if p.a0sq == a_inf {
        return Ok(0.0);
    }
    if !(a_inf > 0.0 && a_inf < 1.0) {
        return Err(Error::DegenerateParams(format!(
            "a_inf = {a_inf} must lie in (0, 1)"
        )));
    }
    let a = p.a_at(t);
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::DegenerateParams(format!(
            "a(t) = {a} must lie in (0, 1)"
        )));
    }
    let log = ((1.0 - a) / a).ln() + (a_inf / (1.0 - a_inf)).ln();
    Ok(p.a_dot(t) * log)
}

/// First time after which the concurrence stays at or below `DEATH_THRESHOLD`,
/// interpolated between the bracketing grid points.
pub fn sudden_death_time(series: &ProductionSeries) -> Option<f64> {
    let c = &series.concurrence;
    let last = *c.last()?;
    if last > DEATH_THRESHOLD {
        return None;
    }
    let k = c
        .iter()
        .rposition(|&x| x > DEATH_THRESHOLD)
        .map_or(0, |i| i + 1);
    if k == 0 {
        return Some(series.times[0]);
    }
    let signed = |i: usize| series.pre_concurrence.get(i).copied().unwrap_or(c[i]);
    let (c0, c1) = (signed(k - 1), signed(k));
    let (t0, t1) = (series.times[k - 1], series.times[k]);
    let frac = ((c0 - DEATH_THRESHOLD) / (c0 - c1)).clamp(0.0, 1.0);
    Some(t0 + frac * (t1 - t0))
}

/// Which models the scan draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanFamily {
    /// Random local Hamiltonians and local jump operators.
    Local,
    /// The two-qubit model with random rates.
    Paper,
    /// Alternates `Local` (even samples) and `Paper` (odd samples).
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub seed: u64,
    pub samples: usize,
    pub rate_range: [f64; 2],
    pub time_horizon: f64,
    pub grid_points: usize,
    pub tolerance: f64,
    pub family: ScanFamily,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100,
            rate_range: [0.1, 2.0],
            time_horizon: 3.0,
            grid_points: 31,
            tolerance: 1e-6,
            family: ScanFamily::Mixed,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.rate_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::ConfigInvalid(format!(
                "rate_range [{lo}, {hi}] must be positive and ordered"
            )));
        }
        if !(self.time_horizon > 0.0) || !self.time_horizon.is_finite() {
            return Err(Error::ConfigInvalid("time_horizon must be positive".into()));
        }
        if self.grid_points < 3 {
            return Err(Error::ConfigInvalid(
                "grid_points must be at least 3".into(),
            ));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::ConfigInvalid("tolerance must be nonnegative".into()));
        }
        Ok(())
    }

    fn family_of(&self, sample: usize) -> ScanFamily {
        match self.family {
            ScanFamily::Mixed if sample.is_multiple_of(2) => ScanFamily::Local,
            ScanFamily::Mixed => ScanFamily::Paper,
            f => f,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample: usize,
    pub family: ScanFamily,
    pub model: String,
    pub t: f64,
    pub sigma: f64,
    pub abs_sigma_e: f64,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub sample: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCounts {
    pub samples: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub samples_run: usize,
    pub violations: Vec<Violation>,
    /// Largest `|σ_E| - σ` over all finite-σ points; `None` when no point was evaluated.
    pub max_excess: Option<f64>,
    pub local: FamilyCounts,
    pub paper: FamilyCounts,
    pub failures: Vec<SampleFailure>,
    pub config: ScanConfig,
}

struct SampleOutcome {
    family: ScanFamily,
    violations: Vec<Violation>,
    max_excess: Option<f64>,
    failure: Option<String>,
}

fn uniform(rng: &mut impl Rng, [lo, hi]: [f64; 2]) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn random_hermitian(rng: &mut impl Rng, scale: f64) -> Operator {
    let g = gaussian_matrix(rng, 2);
    (&g + &g.adjoint()).scale_re(0.25 * scale)
}

/// Undriven two-qubit model: `H = h_A ⊗ 1 + 1 ⊗ h_B` and two jumps per qubit.
fn random_local_model(rng: &mut impl Rng, rates: [f64; 2]) -> Result<(LindbladModel, Vec<f64>)> {
    let id = Operator::identity(2);
    let (sa, sb) = (uniform(rng, rates), uniform(rng, rates));
    let h = &kron(&random_hermitian(rng, sa), &id) + &kron(&id, &random_hermitian(rng, sb));
    let mut jumps = Vec::new();
    let mut drawn = Vec::new();
    for qubit in 0..2 {
        for _ in 0..2 {
            let rate = uniform(rng, rates);
            let g = gaussian_matrix(rng, 2);
            let g = g.scale_re(rate.sqrt() / g.frobenius_norm());
            jumps.push(if qubit == 0 {
                kron(&g, &id)
            } else {
                kron(&id, &g)
            });
            drawn.push(rate);
        }
    }
    Ok((
        LindbladModel::new(h, jumps, FactorLayout::two_qubits())?,
        drawn,
    ))
}

/// Model, initial state and a description for scan sample `sample`.
pub fn draw_sample(
    cfg: &ScanConfig,
    sample: usize,
) -> Result<(LindbladModel, DensityMatrix, String)> {
    let family = cfg.family_of(sample);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(sample as u64));
    match family {
        ScanFamily::Paper => {
            let r = cfg.rate_range;
            let p = PaperModelParams::new(
                rng.random_range(0.05..0.95),
                uniform(&mut rng, r),
                uniform(&mut rng, r),
                uniform(&mut rng, r),
                uniform(&mut rng, r),
            )?;
            let desc = format!(
                "paper a0sq={} omega={} gamma={} kappa={} eta={}",
                p.a0sq, p.omega, p.gamma, p.kappa, p.eta
            );
            Ok((paper_lindblad_model(&p)?, closed_form_state(&p, 0.0), desc))
        }
        _ => {
            let (model, rates) = random_local_model(&mut rng, cfg.rate_range)?;
            let layout = FactorLayout::two_qubits();
            let rho0 = if sample.is_multiple_of(2) {
                random_pure_with(&mut rng, layout)
            } else {
                random_mixed_with(&mut rng, layout)
            };
            Ok((
                model,
                rho0,
                format!("local sample {sample}, jump rates {rates:?}"),
            ))
        }
    }
}

fn run_sample(cfg: &ScanConfig, sample: usize, grid: &[f64]) -> SampleOutcome {
    let family = cfg.family_of(sample);
    let drawn = draw_sample(cfg, sample);
    let run =
        drawn.and_then(|(model, rho0, desc)| Ok((production_series(&model, &rho0, grid)?, desc)));
    let (series, desc) = match run {
        Ok(x) => x,
        Err(e) => {
            return SampleOutcome {
                family,
                violations: Vec::new(),
                max_excess: None,
                failure: Some(e.to_string()),
            }
        }
    };
    let mut violations = Vec::new();
    let mut max_excess: Option<f64> = None;
    for i in 0..series.len() {
        let EntropyValue::Finite(sigma) = series.sigma[i] else {
            continue;
        };
        let abs_e = series.sigma_e[i].abs();
        let excess = abs_e - sigma;
        max_excess = Some(max_excess.map_or(excess, |m| m.max(excess)));
        if excess > cfg.tolerance {
            violations.push(Violation {
                sample,
                family,
                model: desc.clone(),
                t: series.times[i],
                sigma,
                abs_sigma_e: abs_e,
                excess,
            });
        }
    }
    SampleOutcome {
        family,
        violations,
        max_excess,
        failure: None,
    }
}

/// Runs the scan on the current rayon pool; results are merged in sample order.
pub fn conjecture_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let grid = uniform_grid(cfg.time_horizon, cfg.grid_points)?;
    let outcomes: Vec<SampleOutcome> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| run_sample(cfg, i, &grid))
        .collect();
    let mut report = ScanReport {
        samples_run: cfg.samples,
        violations: Vec::new(),
        max_excess: None,
        local: FamilyCounts::default(),
        paper: FamilyCounts::default(),
        failures: Vec::new(),
        config: cfg.clone(),
    };
    for (sample, o) in outcomes.into_iter().enumerate() {
        let counts = match o.family {
            ScanFamily::Paper => &mut report.paper,
            _ => &mut report.local,
        };
        counts.samples += 1;
        counts.violations += o.violations.len();
        report.violations.extend(o.violations);
        if let Some(m) = o.max_excess {
            report.max_excess = Some(report.max_excess.map_or(m, |r| r.max(m)));
        }
        if let Some(message) = o.failure {
            report.failures.push(SampleFailure { sample, message });
        }
    }
    Ok(report)
}

/// `conjecture_scan` on a dedicated pool of `threads` workers.
pub fn conjecture_scan_with_threads(cfg: &ScanConfig, threads: usize) -> Result<ScanReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::ConfigInvalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| conjecture_scan(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, pauli};
    use crate::states::spectrum_entropy;

    fn amplitude_damping(gamma: f64) -> LindbladModel {
        let id = pauli::id();
        let l = pauli::lower().scale_re(gamma.sqrt());
        LindbladModel::new(
            Operator::zeros(4),
            vec![kron(&l, &id), kron(&id, &l)],
            FactorLayout::two_qubits(),
        )
        .unwrap()
    }

    fn ab_state(a0sq: f64) -> DensityMatrix {
        let psi = [
            c(a0sq.sqrt(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c((1.0 - a0sq).sqrt(), 0.0),
        ];
        DensityMatrix::pure(&psi, FactorLayout::two_qubits()).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = uniform_grid(5.0, 200).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g[199], 5.0);
        assert!(uniform_grid(1.0, 1).is_err());
        assert!(grid_spacing(&[0.0, 1.0, 3.0]).is_err());
    }

    #[test]
    fn constant_trajectory_has_no_production() {
        let model =
            LindbladModel::new(Operator::zeros(4), vec![], FactorLayout::two_qubits()).unwrap();
        let rho = ab_state(0.3);
        let grid = uniform_grid(1.0, 11).unwrap();
        let traj = crate::dynamics::integrate_default(&model, &rho, &grid).unwrap();
        for method in [SigmaEMethod::Grid, SigmaEMethod::Local] {
            let opts = SeriesOptions {
                method,
                ..Default::default()
            };
            let (ent, se) = entanglement_series(&traj, &opts).unwrap();
            assert!(ent.iter().all(|&e| (e - ent[0]).abs() < 1e-14));
            assert!(se.iter().all(|&x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn pure_dephasing_matches_entropy_derivative() {
        let p = PaperModelParams::new(0.4, 1.0, 0.0, 0.0, 0.8).unwrap();
        let model = paper_lindblad_model(&p).unwrap();
        let grid = uniform_grid(3.0, 61).unwrap();
        let s = production_series(&model, &p.initial_state(), &grid).unwrap();
        // closed-form -dS/dt with a fixed diagonal
        for (i, &t) in grid.iter().enumerate().skip(1) {
            let eps = 1e-6;
            let ent_at = |t: f64| {
                let x = crate::papermodels::closed_form_x(&p, t);
                spectrum_entropy(&[x.a, 1.0 - x.a]) - spectrum_entropy(&x.block_eigenvalues())
            };
            let oracle = (ent_at(t + eps) - ent_at(t - eps)) / (2.0 * eps);
            assert!((s.sigma_e[i] - oracle).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn stationary_start_produces_nothing() {
        let p = PaperModelParams::new(0.5, 1.0, 1.0, 1.0, 1.0).unwrap();
        let model = paper_lindblad_model(&p).unwrap();
        let rho = DensityMatrix::new(
            Operator::diag(&[0.5, 0.0, 0.0, 0.5]),
            FactorLayout::two_qubits(),
        )
        .unwrap();
        let s = production_series(&model, &rho, &uniform_grid(2.0, 21).unwrap()).unwrap();
        for i in 0..s.len() {
            assert!(s.sigma[i].value().abs() < 1e-9);
            assert!(s.sigma_e[i].abs() < 1e-9);
        }
        s.validate().unwrap();
    }

    #[test]
    fn paper_entanglement_never_increases() {
        let p = PaperModelParams::new(0.85, 0.3, 0.4, 1.2, 0.6).unwrap();
        let s = production_series(
            &paper_lindblad_model(&p).unwrap(),
            &p.initial_state(),
            &uniform_grid(4.0, 41).unwrap(),
        )
        .unwrap();
        assert!(s.ent.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(s.sigma_e.iter().all(|&x| x <= 1e-9));
    }

    #[test]
    fn gap_examples() {
        let p = PaperModelParams::new(0.5, 1.0, 1.0, 1.0, 1.0).unwrap();
        for t in [0.1, 1.0, 10.0] {
            assert_eq!(gap_formula(&p, t).unwrap(), 0.0);
        }
        let q = PaperModelParams::new(0.5, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            gap_formula(&q, 1.0),
            Err(Error::DegenerateParams(_))
        ));
        let r = PaperModelParams::new(0.9, 0.2, 0.7, 0.4, 0.3).unwrap();
        for k in 1..50 {
            assert!(gap_formula(&r, 0.1 * k as f64).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn gap_matches_series() {
        let p = PaperModelParams::new(0.9, 1.0, 1.0, 1.0, 1.0).unwrap();
        let grid = uniform_grid(1.0, 21).unwrap();
        let s = production_series(
            &paper_lindblad_model(&p).unwrap(),
            &p.initial_state(),
            &grid,
        )
        .unwrap();
        let i = 10; // t = 0.5
        let numeric = s.sigma[i].value() - s.sigma_e[i].abs();
        assert!((numeric - gap_formula(&p, 0.5).unwrap()).abs() < 1e-4);
    }

    #[test]
    fn sudden_death_under_amplitude_damping() {
        let grid = uniform_grid(3.0, 61).unwrap();
        let s = production_series(&amplitude_damping(1.0), &ab_state(0.25), &grid).unwrap();
        let t_star = sudden_death_time(&s).expect("finite death time");
        // Wootters oracle: C(t) = 2 max(0, e^{-t} (|ab| - b² (1 - e^{-t})))
        let (ab, b2) = ((0.25f64 * 0.75).sqrt(), 0.75);
        let exact = -(1.0 - ab / b2).ln();
        assert!((t_star - exact).abs() < 0.01, "{t_star} vs {exact}");
        for (i, &t) in grid.iter().enumerate() {
            if t > t_star {
                assert_eq!(s.ent[i], 0.0);
                assert_eq!(s.sigma_e[i], 0.0);
            }
        }
    }

    #[test]
    fn no_sudden_death_for_paper_model() {
        let p = PaperModelParams::new(0.7, 1.0, 1.0, 1.0, 1.0).unwrap();
        let s = production_series(
            &paper_lindblad_model(&p).unwrap(),
            &p.initial_state(),
            &uniform_grid(5.0, 51).unwrap(),
        )
        .unwrap();
        assert_eq!(sudden_death_time(&s), None);
    }

    #[test]
    fn separable_start_dies_immediately() {
        let rho = DensityMatrix::maximally_mixed(FactorLayout::two_qubits());
        let s = production_series(
            &amplitude_damping(1.0),
            &rho,
            &uniform_grid(1.0, 11).unwrap(),
        )
        .unwrap();
        assert_eq!(sudden_death_time(&s), Some(0.0));
    }

    #[test]
    fn grid_differences_converge_quadratically() {
        let p = PaperModelParams::new(0.8, 0.5, 0.6, 0.3, 0.9).unwrap();
        let model = paper_lindblad_model(&p).unwrap();
        let opts = SeriesOptions {
            method: SigmaEMethod::Grid,
            ..Default::default()
        };
        let at_one = |points: usize| {
            let grid = uniform_grid(2.0, points).unwrap();
            let s = production_series_with(&model, &p.initial_state(), &grid, &opts).unwrap();
            s.sigma_e[(points - 1) / 2]
        };
        let local = {
            let grid = uniform_grid(2.0, 21).unwrap();
            production_series(&model, &p.initial_state(), &grid)
                .unwrap()
                .sigma_e[10]
        };
        let e1 = (at_one(21) - local).abs();
        let e2 = (at_one(41) - local).abs();
        assert!(e2 < 0.3 * e1, "{e1} {e2}");
    }

    #[test]
    fn scan_is_deterministic() {
        let cfg = ScanConfig {
            samples: 4,
            grid_points: 6,
            time_horizon: 1.0,
            ..Default::default()
        };
        let a = conjecture_scan_with_threads(&cfg, 1).unwrap();
        let b = conjecture_scan_with_threads(&cfg, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.local.samples, 2);
        assert_eq!(a.paper.samples, 2);
        assert_eq!(a.paper.violations, 0);
    }

    #[test]
    fn empty_scan() {
        let cfg = ScanConfig {
            samples: 0,
            ..Default::default()
        };
        let r = conjecture_scan(&cfg).unwrap();
        assert_eq!(r.samples_run, 0);
        assert!(r.violations.is_empty());
        assert_eq!(r.max_excess, None);
    }
}
