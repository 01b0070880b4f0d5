//! Shared inputs for the benchmarks.

use entroprod_core::linalg::{c, FactorLayout};
use entroprod_core::papermodels::{paper_lindblad_model, PaperModelParams};
use entroprod_core::states::random_mixed;
use entroprod_core::{DensityMatrix, LindbladModel};

/// Reference two-qubit model with all rates equal to one.
pub fn reference_model() -> (LindbladModel, DensityMatrix) {
    let p = PaperModelParams::new(0.7, 1.0, 1.0, 1.0, 1.0).expect("valid parameters");
    (
        paper_lindblad_model(&p).expect("calibrated model"),
        p.initial_state(),
    )
}

/// Generic entangled two-qubit state (not in the closed-form family).
pub fn entangled_state() -> DensityMatrix {
    let noise = random_mixed(FactorLayout::two_qubits(), 11);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DensityMatrix::pure(
        &[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
        FactorLayout::two_qubits(),
    )
    .expect("normalized");
    let op = &bell.op().scale_re(0.8) + &noise.op().scale_re(0.2);
    DensityMatrix::new(op, FactorLayout::two_qubits()).expect("convex combination of states")
}
