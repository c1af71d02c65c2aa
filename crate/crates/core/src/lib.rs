//! Squeezed magnon mode coupled to spin qubits: Hamiltonian construction,
//! exact spectra, time evolution and perturbative effective couplings.
//!
//! ```
//! use magqrm_core::{extract_geff, geff_total_resonance, ghz_fidelity_peak, ModelParams};
//!
//! let p = ModelParams::identical(3.0, 1.0, 0.1, 0.1, 3, 10)?;
//! let ex = extract_geff(&p)?;
//! let pert = geff_total_resonance(0.1, 0.1, 1.0)?;
//! assert!((ex.geff - pert).abs() < 0.05 * pert);
//! let peak = ghz_fidelity_peak(&p.with_omega0(ex.omega0_star))?;
//! assert!(peak.fidelity > 0.98);
//! # Ok::<(), magqrm_core::Error>(())
//! ```

pub mod config;
pub mod convergence;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod model;
pub mod perturbation;
pub mod spectrum;

pub use config::{Energy, EnergyUnit, RunConfig};
pub use convergence::Convergence;
pub use dynamics::{
    default_time_grid, evolve, evolve_default, evolve_with, ghz_fidelity_peak, ghz_target,
    rabi_period, DynamicsTrace, EvolveOptions, GhzPeak, InitialState, Propagator,
};
pub use error::{Error, Result};
pub use hilbert::{build_space, BasisLabel, DenseOperator, HilbertSpace, QubitOp, StateVector};
pub use model::{
    bogoliubov, build_hamiltonian, estimate, Estimate, InterfaceParams, MaterialParams,
    ModelParams, QubitParams, SqueezeParams,
};
pub use perturbation::{
    crossing_shift, geff3_general, geff3_identical, geff3_shifted, geff5_diagrams,
    geff5_identical_resonance, geff_total_resonance, resonance_breakdown, FifthOrderFamilies,
    FifthOrderMode, PertInputs, PertResult,
};
pub use spectrum::{
    extract_geff, find_gap, find_gap_with, fit_geff_surface, sweep, sweep_with, GapFeature,
    GapKind, GapOptions, GeffExtraction, GeffFit, LevelSelector, SpectrumSweep, StandardFeature,
};
