//! Validated density matrices and entropy functionals (all in nats).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, kron, partial_trace, trace_norm, FactorLayout, HermitianEigen, Operator, C64,
    SUPPORT_CUTOFF,
};

/// Tolerance on Hermiticity, trace and negativity when validating states.
pub const STATE_TOL: f64 = 1e-10;

/// Kernel-projected mass above which a support inclusion is considered violated.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace operator over a factor layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    op: Operator,
    layout: FactorLayout,
}

/// Entropy in nats, or `Infinite` when a relative entropy has a support violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EntropyValue {
    Finite(f64),
    Infinite,
}

impl EntropyValue {
    /// Clamps tiny negative rounding to zero.
    pub fn finite(x: f64) -> Self {
        if (-1e-12..0.0).contains(&x) {
            Self::Finite(0.0)
        } else {
            Self::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// The value as `f64`, with `Infinite` mapped to `f64::INFINITY`.
    pub fn value(&self) -> f64 {
        match *self {
            Self::Finite(x) => x,
            Self::Infinite => f64::INFINITY,
        }
    }
}

impl DensityMatrix {
    /// Validates `op` as a state on `layout`.
    pub fn new(op: Operator, layout: FactorLayout) -> Result<Self> {
        layout.check(op.dim())?;
        let violation = op.hermiticity_violation();
        if violation > STATE_TOL {
            return Err(Error::NonHermitian { violation });
        }
        let trace = op.trace().re;
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::NonUnitTrace { trace });
        }
        let eig = hermitian_eig(&op)?;
        if eig.min() < -STATE_TOL {
            return Err(Error::NotPsd { min_eig: eig.min() });
        }
        Ok(Self { op, layout })
    }

    /// Hermitizes and renormalizes `op`, failing if an eigenvalue falls below `-psd_tol`.
    pub fn repaired(op: &Operator, layout: FactorLayout, psd_tol: f64) -> Result<Self> {
        layout.check(op.dim())?;
        let h = op.hermitian_part();
        let trace = h.trace().re;
        if !(trace.is_finite() && trace > 0.0) {
            return Err(Error::NonUnitTrace { trace });
        }
        let h = h.scale_re(1.0 / trace);
        let eig = hermitian_eig(&h)?;
        if eig.min() < -psd_tol {
            return Err(Error::NotPsd { min_eig: eig.min() });
        }
        Ok(Self { op: h, layout })
    }

    /// Projector onto the normalized vector `psi`.
    pub fn pure(psi: &[C64], layout: FactorLayout) -> Result<Self> {
        layout.check(psi.len())?;
        let mut v = psi.to_vec();
        if crate::linalg::normalize(&mut v) == 0.0 {
            return Err(Error::NonUnitTrace { trace: 0.0 });
        }
        Ok(Self {
            op: Operator::outer(&v),
            layout,
        })
    }

    pub fn maximally_mixed(layout: FactorLayout) -> Self {
        let d = layout.dim();
        Self {
            op: Operator::identity(d).scale_re(1.0 / d as f64),
            layout,
        }
    }

    /// `rho_a (x) rho_b` with concatenated layouts.
    pub fn product(a: &Self, b: &Self) -> Self {
        let mut factors = a.layout.factors().to_vec();
        factors.extend_from_slice(b.layout.factors());
        Self {
            op: kron(&a.op, &b.op),
            layout: FactorLayout::new(factors).expect("factor dims are positive"),
        }
    }

    /// Wraps an operator that is known to be a state up to rounding (crate use only).
    pub(crate) fn trusted(op: Operator, layout: FactorLayout) -> Self {
        debug_assert_eq!(op.dim(), layout.dim());
        Self { op, layout }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn layout(&self) -> &FactorLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eig(&self) -> HermitianEigen {
        hermitian_eig(&self.op).expect("density matrices are Hermitian")
    }

    pub fn purity(&self) -> f64 {
        self.op.trace_product(&self.op).expect("same operator").re
    }

    /// Reduced state on the factors in `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        let op = partial_trace(&self.op, &self.layout, keep)?;
        Ok(Self {
            op,
            layout: self.layout.restrict(keep)?,
        })
    }
}

/// `-sum lambda ln lambda` over the positive part of a spectrum.
pub fn spectrum_entropy(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&l| l > SUPPORT_CUTOFF)
        .map(|&l| -l * l.ln())
        .sum();
    s.max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    spectrum_entropy(&rho.eig().values)
}

/// Quantum relative entropy `tr(rho ln rho - rho ln sigma)`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<EntropyValue> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let sig = sigma.eig();
    if !support_contained(rho.op(), &sig) {
        return Ok(EntropyValue::Infinite);
    }
    let ln_sigma = sig.map_on_support(SUPPORT_CUTOFF, f64::ln);
    let cross = rho.op().trace_product(&ln_sigma)?.re;
    let value = -von_neumann_entropy(rho) - cross;
    Ok(EntropyValue::finite(value))
}

/// Whether `supp(a) ⊆ supp(sigma)`, tested on the mass `a` places in sigma's kernel.
pub fn support_contained(a: &Operator, sigma: &HermitianEigen) -> bool {
    let kernel = sigma.projector(|l| l <= SUPPORT_CUTOFF);
    if kernel.max_abs() == 0.0 {
        return true;
    }
    let leaked = kernel.matmul(a).and_then(|x| x.matmul(&kernel));
    match leaked {
        Ok(x) => x.max_abs() <= SUPPORT_TOL,
        Err(_) => false,
    }
}

/// `S(rho_A) + S(rho_B) - S(rho_AB)` for the cut `side_a | rest`.
pub fn mutual_information(rho: &DensityMatrix, side_a: &[usize]) -> Result<f64> {
    let n = rho.layout().len();
    if n < 2 || side_a.is_empty() || side_a.iter().any(|&k| k >= n) {
        return Err(Error::LayoutMismatch {
            factors: rho.layout().factors().to_vec(),
            dim: rho.dim(),
        });
    }
    let side_b: Vec<usize> = (0..n).filter(|k| !side_a.contains(k)).collect();
    if side_b.is_empty() {
        return Err(Error::LayoutMismatch {
            factors: rho.layout().factors().to_vec(),
            dim: rho.dim(),
        });
    }
    let sa = von_neumann_entropy(&rho.reduced(side_a)?);
    let sb = von_neumann_entropy(&rho.reduced(&side_b)?);
    Ok(sa + sb - von_neumann_entropy(rho))
}

/// Gibbs state `exp(-beta h) / Z`.
pub fn thermal_state(h: &Operator, beta: f64, layout: FactorLayout) -> Result<DensityMatrix> {
    layout.check(h.dim())?;
    let eig = hermitian_eig(h)?;
    // shift by the ground energy so the largest weight is exp(0)
    let e0 = eig.min();
    let weights: Vec<f64> = eig
        .values
        .iter()
        .map(|&e| (-beta * (e - e0)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let shifted = HermitianEigen {
        values: weights.iter().map(|w| w / z).collect(),
        vectors: eig.vectors,
    };
    Ok(DensityMatrix::trusted(shifted.reconstruct(), layout))
}

/// `(1/2) ||a - b||_1`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(0.5 * trace_norm(&(a.op() - b.op()))?)
}

pub fn gaussian_vector(rng: &mut impl Rng, dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn gaussian_matrix(rng: &mut impl Rng, dim: usize) -> Operator {
    Operator::from_vec(dim, gaussian_vector(rng, dim * dim)).expect("square")
}

/// Haar-random pure state drawn from `rng`.
pub fn random_pure_with(rng: &mut impl Rng, layout: FactorLayout) -> DensityMatrix {
    let v = gaussian_vector(rng, layout.dim());
    DensityMatrix::pure(&v, layout).expect("Gaussian vector is nonzero")
}

/// Hilbert-Schmidt random mixed state `G G^dagger / tr(G G^dagger)` drawn from `rng`.
pub fn random_mixed_with(rng: &mut impl Rng, layout: FactorLayout) -> DensityMatrix {
    let g = gaussian_matrix(rng, layout.dim());
    let w = &g * &g.adjoint();
    let t = w.trace().re;
    DensityMatrix::trusted(w.scale_re(1.0 / t).hermitian_part(), layout)
}

pub fn random_pure(layout: FactorLayout, seed: u64) -> DensityMatrix {
    random_pure_with(&mut ChaCha8Rng::seed_from_u64(seed), layout)
}

pub fn random_mixed(layout: FactorLayout, seed: u64) -> DensityMatrix {
    random_mixed_with(&mut ChaCha8Rng::seed_from_u64(seed), layout)
}
