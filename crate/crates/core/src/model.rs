//! Material parameters to model parameters, and the Hamiltonians built from
//! them.
//!
//! Material quantities (`J`, `K_x,y,z`, Zeeman energy, `J_int`) are plain
//! energies in whatever unit the caller uses consistently (the CLI uses meV).
//! The coupled model is usually written in units of the qubit splitting.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::hilbert::{
    annihilation_block, boson_number, qubit_operator, DenseOperator, HilbertSpace, QubitOp,
};

/// 1 meV expressed as a frequency E/h in GHz.
pub const MEV_IN_GHZ: f64 = 241.799;

/// Ferromagnet described by exchange, spin length, single-ion anisotropy and
/// Zeeman energy on a simple cubic lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Nearest-neighbour exchange `J > 0`.
    pub exchange: f64,
    pub spin: f64,
    pub k_x: f64,
    pub k_y: f64,
    pub k_z: f64,
    /// `|γ|μ₀H₀`
    pub zeeman: f64,
    pub lattice_constant: f64,
    /// Total number of ferromagnet sites `N_F`.
    pub n_sites: u64,
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.exchange,
            self.spin,
            self.k_x,
            self.k_y,
            self.k_z,
            self.zeeman,
            self.lattice_constant,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return param("material parameters must be finite");
        }
        if self.exchange < 0.0 {
            return param(format!(
                "exchange J = {} must be non-negative (ferromagnetic)",
                self.exchange
            ));
        }
        if self.spin <= 0.0 {
            return param(format!("spin S = {} must be positive", self.spin));
        }
        if self.lattice_constant <= 0.0 {
            return param("lattice constant must be positive");
        }
        if self.n_sites == 0 {
            return param("N_F must be at least 1");
        }
        Ok(())
    }
}

/// Coefficients of `A a†a + B(a² + a†²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub a: f64,
    pub b: f64,
}

/// Uniform-mode coefficients `A = |γ|μ₀H₀ + (K_x + K_y − 2K_z)S`,
/// `B = S(K_x − K_y)/2`.
pub fn anisotropy_to_ab(m: &MaterialParams) -> Result<ModeCoefficients> {
    magnon_dispersion(m, [0.0; 3])
}

/// `A_k` and `B_k` for wavevector `k` on the simple cubic lattice.
pub fn magnon_dispersion(m: &MaterialParams, k: [f64; 3]) -> Result<ModeCoefficients> {
    m.validate()?;
    let s = m.spin;
    let cos_sum: f64 = k.iter().map(|ki| (ki * m.lattice_constant).cos()).sum();
    let a = m.zeeman + (m.k_x + m.k_y - 2.0 * m.k_z) * s + 4.0 * m.exchange * s * (3.0 - cos_sum);
    let b = s * (m.k_x - m.k_y) / 2.0;
    Ok(ModeCoefficients { a, b })
}

/// Lattice factor `c_l` of the long-wavelength form `c_l J S a² k²`:
/// half the curvature of `4[3 − Σ cos(k_i a)]` at `k = 0`, i.e. 2 for simple cubic.
pub fn lattice_factor() -> f64 {
    // d²/dk² 4(1 - cos k) at k = 0
    4.0 / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleModeCheck {
    /// `A_{k₁} − A₀` with `k₁ = (π/(L a), 0, 0)`.
    pub spacing: f64,
    pub threshold: f64,
    pub ok: bool,
}

/// Default threshold for [`check_single_mode`]: five times the larger dressed coupling.
pub fn single_mode_threshold(g_r: f64, g_cr: f64) -> f64 {
    5.0 * g_r.abs().max(g_cr.abs())
}

/// Gap between the uniform mode and the lowest standing wave of a magnet
/// `linear_size` sites across.
pub fn check_single_mode(
    m: &MaterialParams,
    linear_size: usize,
    threshold: f64,
) -> Result<SingleModeCheck> {
    if linear_size < 2 {
        return param(format!("linear size L = {linear_size} must be at least 2"));
    }
    let k1 = PI / (linear_size as f64 * m.lattice_constant);
    let spacing = magnon_dispersion(m, [k1, 0.0, 0.0])?.a - anisotropy_to_ab(m)?.a;
    Ok(SingleModeCheck {
        spacing,
        threshold,
        ok: spacing > threshold,
    })
}

/// Bogoliubov transform `a = cosh r α + sinh r α†` of `A a†a + B(a² + a†²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub a: f64,
    pub b: f64,
    /// Eigenmode energy `√(A² − 4B²)`.
    pub omega0: f64,
    pub r: f64,
    pub cosh_r: f64,
    pub sinh_r: f64,
}

pub fn bogoliubov(a: f64, b: f64) -> Result<SqueezeParams> {
    if !(a.is_finite() && b.is_finite()) {
        return param("A and B must be finite");
    }
    let disc = a * a - 4.0 * b * b;
    if disc <= 0.0 {
        return Err(Error::Domain(format!(
            "A² > 4B² violated (A = {a}, B = {b}, A² − 4B² = {disc})"
        )));
    }
    let omega0 = disc.sqrt();
    let shifted = (a + omega0).powi(2) - 4.0 * b * b;
    if shifted <= 0.0 {
        return Err(Error::Domain(format!(
            "(A + ω₀)² > 4B² violated (A = {a}, B = {b}, ω₀ = {omega0})"
        )));
    }
    let sinh_r = -2.0 * b / shifted.sqrt();
    let cosh_r = (1.0 + sinh_r * sinh_r).sqrt();
    Ok(SqueezeParams {
        a,
        b,
        omega0,
        r: sinh_r.asinh(),
        cosh_r,
        sinh_r,
    })
}

/// Interfacial exchange coupling of one qubit to the uniform mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub j_int: f64,
    pub n_int: u64,
    /// Interface-averaged qubit probability `|ψ|²`.
    pub psi2: f64,
    /// Bare coupling `J_int N_int |ψ|² √(S/(2 N_F))`.
    pub g: f64,
    pub g_r: f64,
    pub g_cr: f64,
    /// Shift `−S J_int N_int |ψ|²` of the qubit splitting. Reported, never
    /// folded into `ω_q` here.
    pub delta_omega_q: f64,
}

/// Bare coupling without squeezing (`g_R = g`, `g_CR = 0`); see
/// [`CouplingParams::dressed`].
pub fn bare_coupling(
    j_int: f64,
    n_int: u64,
    psi2: f64,
    spin: f64,
    n_f: u64,
) -> Result<CouplingParams> {
    if !(j_int.is_finite() && j_int >= 0.0) {
        return param(format!("J_int = {j_int} must be finite and non-negative"));
    }
    if n_int == 0 {
        return param("N_int must be at least 1");
    }
    if !(psi2 > 0.0 && psi2 <= 1.0) {
        return param(format!("|ψ|² = {psi2} must lie in (0, 1]"));
    }
    if !(spin > 0.0 && spin.is_finite()) {
        return param(format!("spin S = {spin} must be positive"));
    }
    if n_f == 0 {
        return param("N_F must be at least 1");
    }
    let weight = j_int * n_int as f64 * psi2;
    let g = weight * (spin / (2.0 * n_f as f64)).sqrt();
    Ok(CouplingParams {
        j_int,
        n_int,
        psi2,
        g,
        g_r: g,
        g_cr: 0.0,
        delta_omega_q: -spin * weight,
    })
}

impl CouplingParams {
    pub fn dressed(mut self, sq: &SqueezeParams) -> Self {
        (self.g_r, self.g_cr) = dressed_couplings(self.g, sq);
        self
    }
}

/// `(g cosh r, g sinh r)`
pub fn dressed_couplings(g: f64, sq: &SqueezeParams) -> (f64, f64) {
    (g * sq.cosh_r, g * sq.sinh_r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    pub omega_q: f64,
    pub g_r: f64,
    pub g_cr: f64,
}

/// Parameters of the coupled mode–qubit Hamiltonian in the squeezed eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    pub qubits: Vec<QubitParams>,
    pub space: HilbertSpace,
}

impl ModelParams {
    pub fn new(omega0: f64, qubits: Vec<QubitParams>, n_max: usize) -> Result<Self> {
        let space = HilbertSpace::new(n_max, qubits.len())?;
        let p = Self {
            omega0,
            qubits,
            space,
        };
        p.validate()?;
        Ok(p)
    }

    /// `n_qubits` identical qubits.
    pub fn identical(
        omega0: f64,
        omega_q: f64,
        g_r: f64,
        g_cr: f64,
        n_qubits: usize,
        n_max: usize,
    ) -> Result<Self> {
        Self::new(
            omega0,
            vec![QubitParams { omega_q, g_r, g_cr }; n_qubits],
            n_max,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits.is_empty() || self.qubits.len() > 3 {
            return param(format!(
                "{} qubits given, expected 1 to 3",
                self.qubits.len()
            ));
        }
        if self.space.n_qubits() != self.qubits.len() {
            return param(format!(
                "space holds {} qubits but {} qubit parameter sets were given",
                self.space.n_qubits(),
                self.qubits.len()
            ));
        }
        if !self.omega0.is_finite() {
            return param("ω₀ must be finite");
        }
        for (n, q) in self.qubits.iter().enumerate() {
            if !(q.omega_q.is_finite() && q.g_r.is_finite() && q.g_cr.is_finite()) {
                return param(format!("qubit {} has non-finite parameters", n + 1));
            }
            if q.omega_q <= 0.0 {
                return param(format!(
                    "qubit {} splitting ω_q = {} must be positive",
                    n + 1,
                    q.omega_q
                ));
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn with_omega0(&self, omega0: f64) -> Self {
        Self {
            omega0,
            ..self.clone()
        }
    }

    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        Ok(Self {
            space: self.space.with_n_max(n_max)?,
            ..self.clone()
        })
    }

    pub fn mean_omega_q(&self) -> f64 {
        self.qubits.iter().map(|q| q.omega_q).sum::<f64>() / self.qubits.len() as f64
    }

    pub fn sum_omega_q(&self) -> f64 {
        self.qubits.iter().map(|q| q.omega_q).sum()
    }

    pub fn mean_g_r(&self) -> f64 {
        self.qubits.iter().map(|q| q.g_r).sum::<f64>() / self.qubits.len() as f64
    }

    pub fn mean_g_cr(&self) -> f64 {
        self.qubits.iter().map(|q| q.g_cr).sum::<f64>() / self.qubits.len() as f64
    }

    /// Whether all qubits share splitting and couplings exactly.
    pub fn is_identical(&self) -> bool {
        self.qubits.windows(2).all(|w| w[0] == w[1])
    }
}

/// `ω₀ α†α + Σₙ (ω_qn/2) σzⁿ + Σₙ g_Rn(α†σ₋ⁿ + ασ₊ⁿ) + g_CRn(α†σ₊ⁿ + ασ₋ⁿ)`
///
/// Filled element by element; every coupling term flips one qubit and moves
/// the boson number by one, so each basis state has at most two partners per
/// qubit.
pub fn build_hamiltonian(p: &ModelParams) -> Result<DenseOperator> {
    p.validate()?;
    let space = &p.space;
    let dim = space.dim();
    let qd = space.qubit_dim();
    let n_max = space.n_max();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let n = space.fock_of(i);
        let mut diag = p.omega0 * n as f64;
        for (k, q) in p.qubits.iter().enumerate() {
            let qubit = k + 1;
            if space.is_excited(i, qubit) {
                diag += q.omega_q / 2.0;
                continue;
            }
            diag -= q.omega_q / 2.0;
            let raised = (i % qd) | (1 << (space.n_qubits() - qubit));
            // α σ₊ : |n, g⟩ → |n−1, e⟩
            if n > 0 && q.g_r != 0.0 {
                set_pair(&mut h, (n - 1) * qd + raised, i, q.g_r * (n as f64).sqrt());
            }
            // α† σ₊ : |n, g⟩ → |n+1, e⟩
            if n + 1 < n_max && q.g_cr != 0.0 {
                set_pair(
                    &mut h,
                    (n + 1) * qd + raised,
                    i,
                    q.g_cr * ((n + 1) as f64).sqrt(),
                );
            }
        }
        h[(i, i)] = Complex64::new(diag, 0.0);
    }
    DenseOperator::from_matrix(h)
}

fn set_pair(h: &mut DMatrix<Complex64>, row: usize, col: usize, value: f64) {
    h[(row, col)] = Complex64::new(value, 0.0);
    h[(col, row)] = Complex64::new(value, 0.0);
}

/// `α†α + Σₙ σ₊ⁿσ₋ⁿ`, conserved when every `g_CR` vanishes.
pub fn excitation_number(space: &HilbertSpace) -> DenseOperator {
    let mut n = boson_number(space);
    for q in 1..=space.n_qubits() {
        let up = qubit_operator(space, q, QubitOp::Raise).expect("index in range");
        let dn = qubit_operator(space, q, QubitOp::Lower).expect("index in range");
        n = &n + &(&up * &dn);
    }
    n
}

/// Lab-frame magnon Hamiltonian `A a†a + B(a² + a†²)` (qubits untouched),
/// truncated in the bare magnon number basis. Only used to cross-check the
/// Bogoliubov transform; constant terms are dropped.
pub fn build_lab_frame_mode(space: &HilbertSpace, a: f64, b: f64) -> Result<DenseOperator> {
    bogoliubov(a, b)?;
    let blk = annihilation_block(space.n_max());
    let blk_d = blk.adjoint();
    let mode = (&blk_d * &blk) * num_complex::Complex64::new(a, 0.0)
        + (&blk * &blk + &blk_d * &blk_d) * num_complex::Complex64::new(b, 0.0);
    let qubits = nalgebra::DMatrix::identity(space.qubit_dim(), space.qubit_dim());
    DenseOperator::from_matrix(mode.kronecker(&qubits))
}

/// Interface description used by [`estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceParams {
    pub j_int: f64,
    pub n_int: u64,
    pub psi2: f64,
}

/// Material-to-model summary; energies in the material's unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub a: f64,
    pub b: f64,
    pub omega0: f64,
    pub r: f64,
    pub g: f64,
    pub g_r: f64,
    pub g_cr: f64,
    pub delta_omega_q: f64,
    pub mode_spacing: f64,
    pub single_mode_ok: bool,
}

pub fn estimate(
    m: &MaterialParams,
    iface: &InterfaceParams,
    linear_size: usize,
) -> Result<Estimate> {
    let ab = anisotropy_to_ab(m)?;
    let sq = bogoliubov(ab.a, ab.b)?;
    let c = bare_coupling(iface.j_int, iface.n_int, iface.psi2, m.spin, m.n_sites)?.dressed(&sq);
    let check = check_single_mode(m, linear_size, single_mode_threshold(c.g_r, c.g_cr))?;
    Ok(Estimate {
        a: ab.a,
        b: ab.b,
        omega0: sq.omega0,
        r: sq.r,
        g: c.g,
        g_r: c.g_r,
        g_cr: c.g_cr,
        delta_omega_q: c.delta_omega_q,
        mode_spacing: check.spacing,
        single_mode_ok: check.ok,
    })
}
