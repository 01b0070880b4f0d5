//! The two-qubit dissipative model with its closed-form solution, and the
//! collision-model construction of dephasing.
//!
//! Basis order is `|00>, |01>, |10>, |11>` with `|0>` the ground state, so
//! decay (rate γ) pumps population into `|00>` and the asymptotic `|00>`
//! population is `γ / (γ + κ)`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, LindbladModel};
use crate::entanglement::{ree_x_family, XFamilyState};
use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eig, kron, pauli, FactorLayout, Operator, C64};
use crate::states::{spectrum_entropy, trace_distance, DensityMatrix};

/// Trace-distance budget for the calibrated master equation against the closed form.
pub const CALIBRATION_TOL: f64 = 1e-6;

/// Largest retained-environment collision run for pure units (state-vector memory bound).
pub const MAX_RETAINED_PURE: usize = 14;

/// Largest retained-environment run for mixed units, which carry one purifying qubit per unit.
pub const MAX_RETAINED_MIXED: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaperModelParams {
    /// Initial `|00>` population `a^2` of `a|00> + b|11>`.
    pub a0sq: f64,
    pub omega: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub eta: f64,
}

impl PaperModelParams {
    pub fn new(a0sq: f64, omega: f64, gamma: f64, kappa: f64, eta: f64) -> Result<Self> {
        let p = Self {
            a0sq,
            omega,
            gamma,
            kappa,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.a0sq) {
            return Err(Error::ConfigInvalid(format!(
                "a0sq = {} outside [0, 1]",
                self.a0sq
            )));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("eta", self.eta),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::ConfigInvalid(format!(
                    "{name} = {v} must be a nonnegative rate"
                )));
            }
        }
        if !self.omega.is_finite() {
            return Err(Error::ConfigInvalid("omega must be finite".into()));
        }
        Ok(())
    }

    pub fn relaxation_rate(&self) -> f64 {
        self.gamma + self.kappa
    }

    /// Largest of the rates and the frequency.
    pub fn max_rate(&self) -> f64 {
        self.gamma
            .max(self.kappa)
            .max(self.eta)
            .max(self.omega.abs())
    }

    /// `γ / (γ + κ)`; undefined (`None`) without population relaxation.
    pub fn a_inf(&self) -> Option<f64> {
        let r = self.relaxation_rate();
        (r > 0.0).then(|| self.gamma / r)
    }

    /// `a(t) = δ(t) a0² + δ'(t)`.
    pub fn a_at(&self, t: f64) -> f64 {
        let r = self.relaxation_rate();
        if r == 0.0 {
            return self.a0sq;
        }
        let delta = (-r * t).exp();
        let delta_prime = self.gamma * (-(-r * t).exp_m1()) / r;
        delta * self.a0sq + delta_prime
    }

    /// `da/dt = -(γ+κ)(a0² - a_∞) e^{-(γ+κ)t}`.
    pub fn a_dot(&self, t: f64) -> f64 {
        match self.a_inf() {
            Some(a_inf) => {
                let r = self.relaxation_rate();
                -r * (self.a0sq - a_inf) * (-r * t).exp()
            }
            None => 0.0,
        }
    }

    /// `μ(t) = exp(-iωt - (γ+κ+η)t/2)`.
    pub fn mu(&self, t: f64) -> C64 {
        let decay = 0.5 * (self.gamma + self.kappa + self.eta) * t;
        C64::from_polar((-decay).exp(), -self.omega * t)
    }

    pub fn initial_state(&self) -> DensityMatrix {
        closed_form_state(self, 0.0)
    }
}

/// The X-family state `ρ(t)` with populations `a(t), 1-a(t)` and corner `μ(t) a b`.
pub fn closed_form_state(p: &PaperModelParams, t: f64) -> DensityMatrix {
    closed_form_x(p, t).to_density()
}

pub fn closed_form_x(p: &PaperModelParams, t: f64) -> XFamilyState {
    let ab = (p.a0sq * (1.0 - p.a0sq)).sqrt();
    XFamilyState {
        a: p.a_at(t),
        m: p.mu(t) * ab,
    }
}

/// Master equation whose solution is the closed form.
///
/// Jumps act collectively on both qubits (`σ⁻⊗σ⁻` at rate γ, `σ⁺⊗σ⁺` at
/// rate κ) so the middle populations stay empty; the dephasing operator is
/// `(sqrt(η)/2) σ_z ⊗ 1`, which damps the `|00><11|` coherence at rate η/2;
/// `H = (ω/2) σ_z ⊗ 1` rotates it as `e^{-iωt}`.
pub fn paper_lindblad_model(p: &PaperModelParams) -> Result<LindbladModel> {
    p.validate()?;
    let id = pauli::id();
    let h = kron(&pauli::z(), &id).scale_re(0.5 * p.omega);
    let mut jumps = Vec::new();
    if p.gamma > 0.0 {
        jumps.push(kron(&pauli::lower(), &pauli::lower()).scale_re(p.gamma.sqrt()));
    }
    if p.kappa > 0.0 {
        jumps.push(kron(&pauli::raise(), &pauli::raise()).scale_re(p.kappa.sqrt()));
    }
    if p.eta > 0.0 {
        jumps.push(kron(&pauli::z(), &id).scale_re(0.5 * p.eta.sqrt()));
    }
    LindbladModel::new(h, jumps, FactorLayout::two_qubits())
}

/// Integrates the calibrated model on `grid` and returns the worst trace
/// distance to the closed form; fails with `CalibrationFailure` above
/// `CALIBRATION_TOL`.
pub fn verify_calibration(p: &PaperModelParams, grid: &[f64]) -> Result<f64> {
    let model = paper_lindblad_model(p)?;
    let rho0 = closed_form_state(p, grid[0]);
    let step = crate::dynamics::default_step(&model, grid);
    let traj = integrate(&model, &rho0, grid, step)?;
    let mut worst: f64 = 0.0;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        worst = worst.max(trace_distance(s, &closed_form_state(p, *t))?);
    }
    if worst > CALIBRATION_TOL {
        return Err(Error::CalibrationFailure {
            distance: worst,
            tolerance: CALIBRATION_TOL,
        });
    }
    Ok(worst)
}

/// Environment unit preparation for the collision model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvKind {
    /// Every unit starts in `|0>`.
    Pure,
    /// Every unit starts in `1/2` (computational-basis dephased).
    DephasedMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionConfig {
    pub a0sq: f64,
    pub eta: f64,
    pub total_time: f64,
    /// Number of collisions.
    pub k: usize,
    pub env: EnvKind,
    /// Keep every environment unit instead of tracing it out after its collision.
    pub retain_env: bool,
}

impl CollisionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.a0sq) {
            return Err(Error::ConfigInvalid(format!(
                "a0sq = {} outside [0, 1]",
                self.a0sq
            )));
        }
        if !(self.eta >= 0.0) || !(self.total_time > 0.0) || self.k == 0 {
            return Err(Error::ConfigInvalid(
                "collision model needs eta >= 0, total_time > 0 and k >= 1".into(),
            ));
        }
        if self.eta * self.total_time / self.k as f64 >= 1.0 {
            return Err(Error::ConfigInvalid(format!(
                "overlap 1 - eta*dt = {} must stay positive",
                1.0 - self.eta * self.total_time / self.k as f64
            )));
        }
        if self.retain_env {
            let cap = match self.env {
                EnvKind::Pure => MAX_RETAINED_PURE,
                EnvKind::DephasedMixed => MAX_RETAINED_MIXED,
            };
            if self.k > cap {
                return Err(Error::ConfigInvalid(format!(
                    "retained environment supports at most {cap} collisions, got {}",
                    self.k
                )));
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.k as f64
    }

    /// `cos θ = <a_E|b_E> = 1 - η δt`.
    pub fn overlap_per_step(&self) -> f64 {
        1.0 - self.eta * self.dt()
    }
}

/// `(1 - ηt/k)^k`.
pub fn overlap_after_k(eta: f64, t: f64, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::ConfigInvalid("k must be at least 1".into()));
    }
    let x = eta * t / k as f64;
    if !(x < 1.0) || x < 0.0 {
        return Err(Error::ConfigInvalid(format!(
            "eta*t/k = {x} must lie in [0, 1)"
        )));
    }
    // exp(k ln(1-x)) keeps full relative precision for large k
    Ok((k as f64 * (-x).ln_1p()).exp())
}

/// Quantities recorded after each collision (step 0 is the initial state).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionRecord {
    pub step: usize,
    pub t: f64,
    pub s_ab: f64,
    pub e_ab: f64,
    /// `|<00|ρ_AB|11>|`.
    pub coherence: f64,
    /// Change of entanglement since step 0.
    pub delta_e: f64,
    /// Environment entropy (retained mode only).
    pub s_env: Option<f64>,
    /// `I(AB : env)` (retained mode only).
    pub mutual_info: Option<f64>,
    /// `ΔS_AB + ΔS_env` since step 0 (retained mode only).
    pub delta_s_total: Option<f64>,
    /// `S_AB + S_BE - S_ABE - S_B`, nonnegative by strong subadditivity (retained mode only).
    pub ssa_slack: Option<f64>,
    /// `I(B : env)` (retained mode only).
    pub mutual_info_b_env: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionAudit {
    pub records: Vec<CollisionRecord>,
    /// Product of the per-step overlaps `<a_E|b_E>`.
    pub final_overlap: f64,
}

/// Unit rotation in the `|11>` branch: `U|0> = cos θ |0> + sin θ |1>`.
fn branch_unitary(cos_theta: f64) -> [[f64; 2]; 2] {
    let s = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    [[cos_theta, -s], [s, cos_theta]]
}

fn initial_ab_vector(a0sq: f64) -> [C64; 4] {
    let a = a0sq.sqrt();
    let b = (1.0 - a0sq).sqrt();
    [c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(b, 0.0)]
}

fn ab_record(step: usize, t: f64, rho_ab: &DensityMatrix, e0: f64) -> CollisionRecord {
    let x = XFamilyState::from_density(rho_ab).expect("collision dynamics stays in the X-family");
    let e_ab = ree_x_family(&x).value();
    CollisionRecord {
        step,
        t,
        s_ab: spectrum_entropy(&x.block_eigenvalues()),
        e_ab,
        coherence: x.m.norm(),
        delta_e: e_ab - e0,
        s_env: None,
        mutual_info: None,
        delta_s_total: None,
        ssa_slack: None,
        mutual_info_b_env: None,
    }
}

/// Runs the collision model, tracing each unit out after its collision unless `retain_env` is set.
pub fn collision_run(cfg: &CollisionConfig) -> Result<(DensityMatrix, CollisionAudit)> {
    cfg.validate()?;
    if cfg.retain_env {
        return retained_run(cfg);
    }
    let cos = cfg.overlap_per_step();
    let u = branch_unitary(cos);
    // Kraus operators K_{e,f} = sqrt(p_f) <e|V|f>, diagonal in the AB basis.
    let env_states: &[(usize, f64)] = match cfg.env {
        EnvKind::Pure => &[(0, 1.0)],
        EnvKind::DephasedMixed => &[(0, 0.5), (1, 0.5)],
    };
    let mut kraus = Vec::new();
    for &(f, p) in env_states {
        for (e, row) in u.iter().enumerate() {
            let id_entry = if e == f { 1.0 } else { 0.0 };
            let diag = [id_entry, id_entry, id_entry, row[f]];
            kraus.push(Operator::diag(&diag.map(|x| x * p.sqrt())));
        }
    }

    let psi = initial_ab_vector(cfg.a0sq);
    let mut rho = Operator::outer(&psi);
    let layout = FactorLayout::two_qubits();
    let start = DensityMatrix::trusted(rho.clone(), layout.clone());
    let e0 = ree_x_family(&XFamilyState::from_density(&start).unwrap()).value();
    let mut records = vec![ab_record(0, 0.0, &start, e0)];
    for step in 1..=cfg.k {
        let mut next = Operator::zeros(4);
        for k in &kraus {
            next += &k.sandwich(&rho)?;
        }
        rho = next;
        let state = DensityMatrix::trusted(rho.clone(), layout.clone());
        records.push(ab_record(step, step as f64 * cfg.dt(), &state, e0));
    }
    let final_state = DensityMatrix::repaired(&rho, layout, 1e-10)?;
    Ok((
        final_state,
        CollisionAudit {
            records,
            final_overlap: cos.powi(cfg.k as i32),
        },
    ))
}

/// Retained-environment run with every audit field filled in.
pub fn collision_audits(cfg: &CollisionConfig) -> Result<CollisionAudit> {
    let cfg = CollisionConfig {
        retain_env: true,
        ..*cfg
    };
    Ok(collision_run(&cfg)?.1)
}

/// Pure state over qubits `[A, B, E_1..E_k, R_1..R_k]`, qubit 0 most significant.
/// Mixed units are purified by a reference qubit `R_j` in `|Φ+>` with `E_j`.
struct GlobalState {
    amps: Vec<C64>,
    qubits: usize,
}

impl GlobalState {
    fn bit(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.qubits - 1 - qubit)) & 1
    }

    /// Spectrum of the reduced state on `subset`, computed from the smaller side.
    fn subsystem_spectrum(&self, subset: &[usize]) -> Result<Vec<f64>> {
        let rest: Vec<usize> = (0..self.qubits).filter(|q| !subset.contains(q)).collect();
        if subset.is_empty() || rest.is_empty() {
            return Ok(vec![1.0]);
        }
        let (small, large) = if subset.len() <= rest.len() {
            (subset.to_vec(), rest)
        } else {
            (rest, subset.to_vec())
        };
        let ds = 1usize << small.len();
        let dl = 1usize << large.len();
        let mut m = vec![C64::new(0.0, 0.0); ds * dl];
        for (idx, &amp) in self.amps.iter().enumerate() {
            let mut i = 0;
            for &q in &small {
                i = (i << 1) | self.bit(idx, q);
            }
            let mut j = 0;
            for &q in &large {
                j = (j << 1) | self.bit(idx, q);
            }
            m[i * dl + j] = amp;
        }
        let mut rho = Operator::zeros(ds);
        for i in 0..ds {
            for k in i..ds {
                let ri = &m[i * dl..(i + 1) * dl];
                let rk = &m[k * dl..(k + 1) * dl];
                let v: C64 = ri.iter().zip(rk).map(|(x, y)| x * y.conj()).sum();
                rho[(i, k)] = v;
                rho[(k, i)] = v.conj();
            }
        }
        Ok(hermitian_eig(&rho)?.values)
    }

    fn entropy(&self, subset: &[usize]) -> Result<f64> {
        Ok(spectrum_entropy(&self.subsystem_spectrum(subset)?))
    }

    fn reduced_ab(&self) -> DensityMatrix {
        let rest = 1usize << (self.qubits - 2);
        let mut rho = Operator::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] = (0..rest)
                    .map(|r| self.amps[i * rest + r] * self.amps[j * rest + r].conj())
                    .sum();
            }
        }
        DensityMatrix::trusted(rho.hermitian_part(), FactorLayout::two_qubits())
    }
}

fn retained_run(cfg: &CollisionConfig) -> Result<(DensityMatrix, CollisionAudit)> {
    let k = cfg.k;
    let mixed = cfg.env == EnvKind::DephasedMixed;
    let qubits = 2 + k + if mixed { k } else { 0 };
    let dim = 1usize << qubits;
    let psi_ab = initial_ab_vector(cfg.a0sq);

    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let tail = qubits - 2;
    if mixed {
        let norm = 0.5f64.powi(k as i32).sqrt();
        for (ab, &amp_ab) in psi_ab.iter().enumerate() {
            for env in 0..(1usize << k) {
                // R_j = E_j, so the reference register repeats the environment bits
                let idx = (ab << tail) | (env << k) | env;
                amps[idx] = amp_ab * norm;
            }
        }
    } else {
        for (ab, &amp_ab) in psi_ab.iter().enumerate() {
            amps[ab << tail] = amp_ab;
        }
    }
    let mut state = GlobalState { amps, qubits };

    let env: Vec<usize> = (2..2 + k).collect();
    let b_env: Vec<usize> = std::iter::once(1).chain(env.iter().copied()).collect();
    let ab_env: Vec<usize> = (0..2 + k).collect();

    let cos = cfg.overlap_per_step();
    let u = branch_unitary(cos);

    let audit_step =
        |state: &GlobalState, step: usize, e0: f64, s0: (f64, f64)| -> Result<CollisionRecord> {
            let rho_ab = state.reduced_ab();
            let mut rec = ab_record(step, step as f64 * cfg.dt(), &rho_ab, e0);
            let s_ab = state.entropy(&[0, 1])?;
            let s_env = state.entropy(&env)?;
            let s_abe = state.entropy(&ab_env)?;
            let s_b = state.entropy(&[1])?;
            let s_be = state.entropy(&b_env)?;
            rec.s_ab = s_ab;
            rec.s_env = Some(s_env);
            rec.mutual_info = Some(s_ab + s_env - s_abe);
            rec.delta_s_total = Some((s_ab - s0.0) + (s_env - s0.1));
            rec.ssa_slack = Some(s_ab + s_be - s_abe - s_b);
            rec.mutual_info_b_env = Some(s_b + s_env - s_be);
            Ok(rec)
        };

    let s0 = (state.entropy(&[0, 1])?, state.entropy(&env)?);
    let e0 = ree_x_family(&XFamilyState::from_density(&state.reduced_ab()).unwrap()).value();
    let mut records = vec![audit_step(&state, 0, e0, s0)?];

    for step in 1..=k {
        let unit = 2 + step - 1;
        let shift = qubits - 1 - unit;
        let ab11 = 3usize << tail;
        for idx in 0..dim {
            // visit each (|0>, |1>) pair of the unit once, only in the |11> branch
            if idx & (3 << tail) != ab11 || (idx >> shift) & 1 == 1 {
                continue;
            }
            let j = idx | (1 << shift);
            let (x0, x1) = (state.amps[idx], state.amps[j]);
            state.amps[idx] = x0 * u[0][0] + x1 * u[0][1];
            state.amps[j] = x0 * u[1][0] + x1 * u[1][1];
        }
        records.push(audit_step(&state, step, e0, s0)?);
    }
    let final_state =
        DensityMatrix::repaired(state.reduced_ab().op(), FactorLayout::two_qubits(), 1e-10)?;
    Ok((
        final_state,
        CollisionAudit {
            records,
            final_overlap: cos.powi(k as i32),
        },
    ))
}
