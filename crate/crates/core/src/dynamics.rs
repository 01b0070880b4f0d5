//! Lindblad dynamics: generator, RK4 integration, the jump/no-jump step,
//! stationary states and the entropy production rate.
//!
//! Superoperators use column stacking: `vec(rho)[i + j*d] = rho[i][j]`, so
//! `vec(A X B) = (B^T ⊗ A) vec(X)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, expm, hermitian_eig, kron, FactorLayout, Operator, C64, HERMITICITY_TOL, SUPPORT_CUTOFF,
};
use crate::states::{support_contained, DensityMatrix, EntropyValue};

/// Eigenvalue floor below which an integrated state is rejected.
pub const INTEGRATION_PSD_TOL: f64 = 1e-8;

/// `||rho_dot||_max` accepted for a stationary state.
pub const STATIONARY_TOL: f64 = 1e-9;

/// Second-smallest singular value of the generator below which the null space counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Kernel-projected `rho_dot` mass above which the support of rho is treated as unstable.
pub const SUPPORT_FLOW_TOL: f64 = 1e-10;

/// Time-independent Hamiltonian plus jump operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LindbladModel {
    h: Operator,
    jumps: Vec<Operator>,
    layout: FactorLayout,
    #[serde(skip)]
    cache: Option<GeneratorCache>,
}

#[derive(Debug, Clone)]
struct GeneratorCache {
    /// `H - (i/2) sum Γ†Γ`
    h_eff: Operator,
    jump_adj: Vec<Operator>,
}

impl LindbladModel {
    pub fn new(h: Operator, jumps: Vec<Operator>, layout: FactorLayout) -> Result<Self> {
        layout.check(h.dim())?;
        let violation = h.hermiticity_violation();
        if violation > HERMITICITY_TOL {
            return Err(Error::NonHermitian { violation });
        }
        for j in &jumps {
            if j.dim() != h.dim() {
                return Err(Error::DimMismatch {
                    left: h.dim(),
                    right: j.dim(),
                });
            }
        }
        let mut model = Self {
            h: h.hermitian_part(),
            jumps,
            layout,
            cache: None,
        };
        model.cache = Some(model.build_cache());
        Ok(model)
    }

    fn build_cache(&self) -> GeneratorCache {
        let d = self.h.dim();
        let mut damping = Operator::zeros(d);
        for j in &self.jumps {
            damping += &j.gram();
        }
        GeneratorCache {
            h_eff: &self.h - &damping.scale(c(0.0, 0.5)),
            jump_adj: self.jumps.iter().map(Operator::adjoint).collect(),
        }
    }

    fn cache(&self) -> std::borrow::Cow<'_, GeneratorCache> {
        match &self.cache {
            Some(c) => std::borrow::Cow::Borrowed(c),
            None => std::borrow::Cow::Owned(self.build_cache()),
        }
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.h
    }

    pub fn jumps(&self) -> &[Operator] {
        &self.jumps
    }

    pub fn layout(&self) -> &FactorLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Non-Hermitian effective Hamiltonian `H - (i/2) sum Γ†Γ`.
    pub fn effective_hamiltonian(&self) -> Operator {
        self.cache().h_eff.clone()
    }

    /// Characteristic rate `2||H|| + sum ||Γ†Γ||` (spectral norms).
    pub fn rate_scale(&self) -> f64 {
        let spectral = |a: &Operator| {
            hermitian_eig(a)
                .map(|e| e.values.iter().map(|l| l.abs()).fold(0.0, f64::max))
                .unwrap_or_else(|_| a.frobenius_norm())
        };
        2.0 * spectral(&self.h) + self.jumps.iter().map(|j| spectral(&j.gram())).sum::<f64>()
    }

    /// Generator applied to an arbitrary operator.
    pub fn apply(&self, rho: &Operator) -> Operator {
        let cache = self.cache();
        let heff_rho = &cache.h_eff * rho;
        // -i (H̃ ρ - ρ H̃†), and ρ H̃† = (H̃ ρ)† for Hermitian ρ; use the general form.
        let rho_heff_adj = rho * &cache.h_eff.adjoint();
        let mut out = (&heff_rho - &rho_heff_adj).scale(c(0.0, -1.0));
        for (j, ja) in self.jumps.iter().zip(&cache.jump_adj) {
            out += &(&(j * rho) * ja);
        }
        out
    }

    /// `d^2 x d^2` generator matrix in column-stacking convention.
    pub fn superoperator(&self) -> Operator {
        let d = self.dim();
        let id = Operator::identity(d);
        let h_eff = &self.cache().h_eff;
        // -i (I ⊗ H̃) + i (conj(H̃) ⊗ I)
        let mut l =
            (&kron(&id, h_eff).scale(c(0.0, -1.0))) + &kron(&h_eff.conj(), &id).scale(c(0.0, 1.0));
        for j in &self.jumps {
            l += &kron(&j.conj(), j);
        }
        l
    }
}

/// `(1/i)[H, ρ] - (1/2) Σ {Γ†Γ, ρ} + Σ Γ ρ Γ†`.
pub fn lindblad_rhs(model: &LindbladModel, rho: &DensityMatrix) -> Result<Operator> {
    if rho.dim() != model.dim() {
        return Err(Error::DimMismatch {
            left: model.dim(),
            right: rho.dim(),
        });
    }
    Ok(model.apply(rho.op()))
}

/// States sampled on a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub model: LindbladModel,
}

/// Default RK4 step: `min(0.01 / rate, spacing)`.
pub fn default_step(model: &LindbladModel, grid: &[f64]) -> f64 {
    let rate = model.rate_scale();
    let spacing = grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let from_rate = if rate > 0.0 {
        0.01 / rate
    } else {
        f64::INFINITY
    };
    let step = from_rate.min(spacing);
    if step.is_finite() {
        step
    } else {
        1.0
    }
}

fn rk4_step(model: &LindbladModel, rho: &Operator, h: f64) -> Operator {
    let k1 = model.apply(rho);
    let k2 = model.apply(&(rho + &k1.scale_re(0.5 * h)));
    let k3 = model.apply(&(rho + &k2.scale_re(0.5 * h)));
    let k4 = model.apply(&(rho + &k3.scale_re(h)));
    let mut incr = &k1 + &k4;
    incr += &(&k2 + &k3).scale_re(2.0);
    rho + &incr.scale_re(h / 6.0)
}

/// Propagates an operator by `duration` (may be negative) with RK4 sub-steps no larger than `max_step`.
pub fn propagate(model: &LindbladModel, rho: &Operator, duration: f64, max_step: f64) -> Operator {
    if duration == 0.0 {
        return rho.clone();
    }
    let n = (duration.abs() / max_step).ceil().max(1.0) as usize;
    let h = duration / n as f64;
    let mut x = rho.clone();
    for _ in 0..n {
        x = rk4_step(model, &x, h);
    }
    x
}

/// Classical fourth-order Runge-Kutta on the master equation.
///
/// Each grid interval is split into equal sub-steps no longer than `step`.
/// Emitted states are Hermitized and renormalized; an eigenvalue below
/// `-INTEGRATION_PSD_TOL` aborts with `StateInvalid` at that time.
pub fn integrate(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &[f64],
    step: f64,
) -> Result<Trajectory> {
    if rho0.dim() != model.dim() {
        return Err(Error::DimMismatch {
            left: model.dim(),
            right: rho0.dim(),
        });
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::ConfigInvalid(format!(
            "integration step must be positive, got {step}"
        )));
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ConfigInvalid(
            "time grid must be non-empty and strictly increasing".into(),
        ));
    }
    let layout = model.layout().clone();
    let mut states = Vec::with_capacity(grid.len());
    states.push(rho0.clone());
    let mut x = rho0.op().clone();
    for w in grid.windows(2) {
        x = propagate(model, &x, w[1] - w[0], step);
        let state =
            DensityMatrix::repaired(&x, layout.clone(), INTEGRATION_PSD_TOL).map_err(|e| {
                Error::StateInvalid {
                    t: w[1],
                    reason: e.to_string(),
                }
            })?;
        states.push(state);
    }
    Ok(Trajectory {
        times: grid.to_vec(),
        states,
        model: model.clone(),
    })
}

/// `integrate` with the default step rule.
pub fn integrate_default(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    grid: &[f64],
) -> Result<Trajectory> {
    integrate(model, rho0, grid, default_step(model, grid))
}

/// Kraus operators of one small time step: `W0 = 1 - i H̃ dt`, `Wk = sqrt(dt) Γk`.
pub fn kraus_operators(model: &LindbladModel, dt: f64) -> Vec<Operator> {
    let d = model.dim();
    let mut ops = Vec::with_capacity(model.jumps().len() + 1);
    ops.push(&Operator::identity(d) - &model.cache().h_eff.scale(c(0.0, dt)));
    ops.extend(model.jumps().iter().map(|j| j.scale_re(dt.sqrt())));
    ops
}

/// One jump/no-jump CP-map step, renormalized by its trace.
pub fn kraus_step(model: &LindbladModel, rho: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
    if !(dt > 0.0) {
        return Err(Error::ConfigInvalid(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if rho.dim() != model.dim() {
        return Err(Error::DimMismatch {
            left: model.dim(),
            right: rho.dim(),
        });
    }
    let mut out = Operator::zeros(model.dim());
    for w in kraus_operators(model, dt) {
        out += &w.sandwich(rho.op())?;
    }
    DensityMatrix::repaired(&out, model.layout().clone(), INTEGRATION_PSD_TOL).map_err(|e| {
        Error::StateInvalid {
            t: dt,
            reason: e.to_string(),
        }
    })
}

/// A state annihilated by the generator.
#[derive(Debug, Clone)]
pub struct Stationary {
    pub state: DensityMatrix,
    /// Set when the generator's null space is degenerate; `state` is then
    /// the asymptotic state reached from the maximally mixed state.
    pub non_unique: bool,
    /// Smallest two singular values of the generator.
    pub singular_values: [f64; 2],
}

/// Null vector of the generator via the Hermitian dilation `[[0, L], [L†, 0]]`,
/// whose eigenvalues are `±` the singular values of `L`.
pub fn stationary_state(model: &LindbladModel) -> Result<Stationary> {
    let l = model.superoperator();
    let n = l.dim();
    let dil = Operator::from_fn(2 * n, |i, j| match (i < n, j < n) {
        (true, false) => l[(i, j - n)],
        (false, true) => l[(j, i - n)].conj(),
        _ => C64::new(0.0, 0.0),
    });
    let eig = hermitian_eig(&dil)?;
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.values[a].abs().total_cmp(&eig.values[b].abs()));
    let s_min = eig.values[order[0]].abs();
    let s_next = eig.values[order[2]].abs();

    if s_next < DEGENERACY_TOL {
        let start = DensityMatrix::maximally_mixed(model.layout().clone());
        let state = asymptotic_state(model, &start)?;
        return Ok(Stationary {
            state,
            non_unique: true,
            singular_values: [s_min, s_next],
        });
    }

    // Right singular vector: the lower half of the dilation eigenvector with the most weight there.
    let lower = |k: usize| -> Vec<C64> { (n..2 * n).map(|i| eig.vectors[(i, k)]).collect() };
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let (a, b) = (lower(order[0]), lower(order[1]));
    let v = if norm(&a) >= norm(&b) { a } else { b };
    let d = model.dim();
    let tr: C64 = (0..d).map(|i| v[i + i * d]).sum();
    if tr.norm() < 1e-12 {
        return Err(Error::NoConvergence(
            "stationary null vector is traceless".into(),
        ));
    }
    let op = Operator::from_fn(d, |i, j| v[i + j * d] / tr);
    let state = DensityMatrix::repaired(&op, model.layout().clone(), INTEGRATION_PSD_TOL)?;
    let residual = model.apply(state.op()).max_abs();
    if residual > STATIONARY_TOL {
        return Err(Error::NoConvergence(format!(
            "stationary residual {residual:e} exceeds {STATIONARY_TOL:e}"
        )));
    }
    Ok(Stationary {
        state,
        non_unique: false,
        singular_values: [s_min, s_next],
    })
}

/// Limit of `exp(L t) rho0` as `t -> ∞`, by repeated squaring of a short-time propagator.
pub fn asymptotic_state(model: &LindbladModel, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let rate = model.rate_scale();
    let tau = if rate > 0.0 { 1.0 / rate } else { 1.0 };
    let d = model.dim();
    let mut prop = expm(&model.superoperator().scale_re(tau));
    let mut x: Vec<C64> = (0..d * d).map(|k| rho0.op()[(k % d, k / d)]).collect();
    let to_op = |x: &[C64]| Operator::from_fn(d, |i, j| x[i + j * d]);
    // 2^60 τ is far beyond any relaxation time the generator can express at double precision.
    for _ in 0..60 {
        x = prop.apply(&x)?;
        let op = to_op(&x);
        let tr = op.trace().re;
        if model.apply(&op).max_abs() <= STATIONARY_TOL * 0.1 * tr.abs().max(1e-300) {
            return DensityMatrix::repaired(&op, model.layout().clone(), INTEGRATION_PSD_TOL);
        }
        prop = &prop * &prop;
    }
    Err(Error::NoConvergence(
        "evolution does not settle to a stationary state".into(),
    ))
}

/// Reference state for entropy production along a trajectory starting at `rho0`:
/// the unique stationary state when it exists, otherwise the state the
/// dynamics relaxes to from `rho0`.
pub fn reference_state(model: &LindbladModel, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let stat = stationary_state(model)?;
    if stat.non_unique {
        asymptotic_state(model, rho0)
    } else {
        Ok(stat.state)
    }
}

/// Spohn entropy production `-tr(ρ̇ (ln ρ - ln ρ_ref))`.
///
/// Returns `Infinite` when `supp(ρ) ⊄ supp(ρ_ref)` or when ρ̇ has weight on
/// the kernel of ρ (the logarithm diverges along the flow).
pub fn entropy_production(
    model: &LindbladModel,
    rho: &DensityMatrix,
    reference: &DensityMatrix,
) -> Result<EntropyValue> {
    if rho.dim() != reference.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: reference.dim(),
        });
    }
    let rho_dot = lindblad_rhs(model, rho)?;
    let eig = rho.eig();
    let kernel = eig.projector(|l| l <= SUPPORT_CUTOFF);
    if kernel.max_abs() > 0.0 {
        let flow = (&(&kernel * &rho_dot) * &kernel).max_abs();
        if flow > SUPPORT_FLOW_TOL {
            return Ok(EntropyValue::Infinite);
        }
    }
    let ref_eig = reference.eig();
    if !support_contained(rho.op(), &ref_eig) {
        return Ok(EntropyValue::Infinite);
    }
    let ln_rho = eig.map_on_support(SUPPORT_CUTOFF, f64::ln);
    let ln_ref = ref_eig.map_on_support(SUPPORT_CUTOFF, f64::ln);
    let sigma = -rho_dot.trace_product(&(&ln_rho - &ln_ref))?.re;
    if (-1e-9..0.0).contains(&sigma) {
        Ok(EntropyValue::Finite(0.0))
    } else {
        Ok(EntropyValue::Finite(sigma))
    }
}
