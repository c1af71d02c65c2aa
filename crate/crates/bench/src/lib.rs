//! Shared fixtures for the solver benchmarks.

use magqrm_core::{BasisLabel, InitialState, ModelParams};

/// Three identical qubits with equal couplings `g`, mode at `omega0`.
pub fn three_qubits(omega0: f64, g: f64, n_max: usize) -> ModelParams {
    ModelParams::identical(omega0, 1.0, g, g, 3, n_max).expect("fixture parameters are valid")
}

pub fn ground_with_one_boson() -> InitialState {
    InitialState::Basis(BasisLabel::all_ground(1, 3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(three_qubits(3.0, 0.1, 10).space.dim(), 80);
        assert!(ground_with_one_boson()
            .resolve(&three_qubits(3.0, 0.1, 4).space)
            .is_ok());
    }
}
