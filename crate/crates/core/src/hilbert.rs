//! Truncated composite Hilbert space of one bosonic mode and up to three
//! qubits, with the elementary operators embedded as dense complex matrices.
//!
//! Basis ordering: `index = fock * 2^n_qubits + bits`, where qubit 1 is the
//! most significant bit of `bits` and a set bit means the qubit is excited
//! (`|e⟩`). The boson is the squeezed eigenmode; `fock` runs over
//! `0..n_max`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{param, Error, Result};

pub type StateVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_max: usize,
    n_qubits: usize,
}

pub fn build_space(n_max: usize, n_qubits: usize) -> Result<HilbertSpace> {
    HilbertSpace::new(n_max, n_qubits)
}

impl HilbertSpace {
    pub fn new(n_max: usize, n_qubits: usize) -> Result<Self> {
        if n_max < 2 {
            return param(format!("Fock cutoff n_max = {n_max} must be at least 2"));
        }
        if !(1..=3).contains(&n_qubits) {
            return param(format!("n_qubits = {n_qubits} must be 1, 2 or 3"));
        }
        Ok(Self { n_max, n_qubits })
    }

    /// Number of retained boson levels (occupations `0..n_max`).
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn qubit_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.n_max * self.qubit_dim()
    }

    /// Same qubit count, Fock cutoff doubled.
    pub fn doubled(&self) -> Self {
        Self {
            n_max: 2 * self.n_max,
            n_qubits: self.n_qubits,
        }
    }

    pub fn with_n_max(&self, n_max: usize) -> Result<Self> {
        Self::new(n_max, self.n_qubits)
    }

    /// Boson occupation of a basis index.
    pub fn fock_of(&self, index: usize) -> usize {
        index / self.qubit_dim()
    }

    /// Whether qubit `qubit` (1-based) is excited in a basis index.
    pub fn is_excited(&self, index: usize, qubit: usize) -> bool {
        let bits = index % self.qubit_dim();
        bits & (1 << (self.n_qubits - qubit)) != 0
    }

    pub fn index_of(&self, label: &BasisLabel) -> Result<usize> {
        if label.excited.len() != self.n_qubits {
            return param(format!(
                "state {label} has {} qubits, space has {}",
                label.excited.len(),
                self.n_qubits
            ));
        }
        if label.fock >= self.n_max {
            return param(format!(
                "state {label} exceeds the Fock cutoff n_max = {}",
                self.n_max
            ));
        }
        let bits = label
            .excited
            .iter()
            .fold(0usize, |acc, &e| (acc << 1) | usize::from(e));
        Ok(label.fock * self.qubit_dim() + bits)
    }

    pub fn label_of(&self, index: usize) -> BasisLabel {
        BasisLabel {
            fock: self.fock_of(index),
            excited: (1..=self.n_qubits)
                .map(|q| self.is_excited(index, q))
                .collect(),
        }
    }

    pub fn basis_vector(&self, label: &BasisLabel) -> Result<StateVector> {
        let idx = self.index_of(label)?;
        let mut v = StateVector::zeros(self.dim());
        v[idx] = ONE;
        Ok(v)
    }
}

/// A computational basis state such as `|1,ggg⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub fock: usize,
    /// `excited[q]` refers to qubit `q + 1`.
    pub excited: Vec<bool>,
}

impl BasisLabel {
    pub fn new(fock: usize, excited: &[bool]) -> Self {
        Self {
            fock,
            excited: excited.to_vec(),
        }
    }

    pub fn all_ground(fock: usize, n_qubits: usize) -> Self {
        Self {
            fock,
            excited: vec![false; n_qubits],
        }
    }

    pub fn all_excited(fock: usize, n_qubits: usize) -> Self {
        Self {
            fock,
            excited: vec![true; n_qubits],
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},", self.fock)?;
        for &e in &self.excited {
            f.write_str(if e { "e" } else { "g" })?;
        }
        f.write_str("⟩")
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    /// Parses `"1,ggg"` (optionally wrapped as `"|1,ggg>"` or `"|1,ggg⟩"`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parameter(format!(
                "cannot parse basis state {s:?}; expected e.g. \"1,ggg\""
            ))
        };
        let t = s
            .trim()
            .trim_start_matches('|')
            .trim_end_matches('>')
            .trim_end_matches('⟩');
        let (n, q) = t.split_once(',').ok_or_else(bad)?;
        let fock = n.trim().parse::<usize>().map_err(|_| bad())?;
        let excited = q
            .trim()
            .chars()
            .map(|c| match c {
                'g' => Ok(false),
                'e' => Ok(true),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        if excited.is_empty() {
            return Err(bad());
        }
        Ok(Self { fock, excited })
    }
}

/// Square complex matrix on a truncated composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return param(format!(
                "operator matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        Ok(Self { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (i..n).all(|j| (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm() <= tol)
        })
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        &self.matrix * psi
    }

    /// `⟨ψ|O|ψ⟩`
    pub fn expectation(&self, psi: &StateVector) -> Complex64 {
        psi.dotc(&(&self.matrix * psi))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
        }
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: Self) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: Self) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: Self) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitOp {
    X,
    Y,
    Z,
    /// σ₊ = |e⟩⟨g|
    Raise,
    /// σ₋ = |g⟩⟨e|
    Lower,
}

impl QubitOp {
    /// 2x2 matrix in the local (g, e) ordering.
    fn local(self) -> DMatrix<Complex64> {
        let m = match self {
            QubitOp::X => [ZERO, ONE, ONE, ZERO],
            QubitOp::Y => [ZERO, I, -I, ZERO],
            QubitOp::Z => [-ONE, ZERO, ZERO, ONE],
            QubitOp::Raise => [ZERO, ZERO, ONE, ZERO],
            QubitOp::Lower => [ZERO, ONE, ZERO, ZERO],
        };
        DMatrix::from_row_slice(2, 2, &m)
    }
}

fn embed(
    space: &HilbertSpace,
    boson: &DMatrix<Complex64>,
    qubit: Option<(usize, QubitOp)>,
) -> DenseOperator {
    let id2 = DMatrix::<Complex64>::identity(2, 2);
    let mut m = boson.clone();
    for q in 1..=space.n_qubits() {
        let factor = match qubit {
            Some((idx, op)) if idx == q => op.local(),
            _ => id2.clone(),
        };
        m = m.kronecker(&factor);
    }
    DenseOperator { matrix: m }
}

/// Truncated annihilation operator on the boson factor alone.
pub(crate) fn annihilation_block(n_max: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(n_max, n_max);
    for n in 1..n_max {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `a|n⟩ = √n |n−1⟩`, identity on the qubits.
pub fn boson_annihilation(space: &HilbertSpace) -> DenseOperator {
    embed(space, &annihilation_block(space.n_max()), None)
}

pub fn boson_creation(space: &HilbertSpace) -> DenseOperator {
    boson_annihilation(space).adjoint()
}

/// `a†a`, diagonal in the basis.
pub fn boson_number(space: &HilbertSpace) -> DenseOperator {
    let n = DMatrix::from_fn(space.n_max(), space.n_max(), |i, j| {
        if i == j {
            Complex64::new(i as f64, 0.0)
        } else {
            ZERO
        }
    });
    embed(space, &n, None)
}

/// Pauli or ladder operator of qubit `qubit_index` (1-based).
pub fn qubit_operator(
    space: &HilbertSpace,
    qubit_index: usize,
    kind: QubitOp,
) -> Result<DenseOperator> {
    if qubit_index == 0 || qubit_index > space.n_qubits() {
        return param(format!(
            "qubit index {qubit_index} out of range 1..={}",
            space.n_qubits()
        ));
    }
    let id = DMatrix::identity(space.n_max(), space.n_max());
    Ok(embed(space, &id, Some((qubit_index, kind))))
}

pub fn identity(space: &HilbertSpace) -> DenseOperator {
    DenseOperator::identity(space.dim())
}
