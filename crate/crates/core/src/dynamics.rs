//! Unitary evolution by spectral decomposition, with the population
//! observables used to follow the `|1,ggg⟩ ↔ |0,eee⟩` exchange.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convergence::Convergence;
use crate::error::{param, Error, Result};
use crate::hilbert::{BasisLabel, DenseOperator, HilbertSpace, StateVector};
use crate::linalg::{eigh, Eigen};
use crate::model::{build_hamiltonian, ModelParams};
use crate::perturbation::geff_total_resonance;
use crate::spectrum::{linspace, pad, LevelSelector};

pub const DEFAULT_TIME_POINTS: usize = 2048;
/// Default trace length in Rabi periods.
pub const DEFAULT_SPAN_PERIODS: f64 = 1.2;
const GHZ_SAMPLES_PER_CYCLE: f64 = 16.0;
const GHZ_MIN_POINTS: usize = 4096;
const GHZ_MAX_POINTS: usize = 50_000_000;
const NORM_TOL: f64 = 1e-10;
const MIN_SAMPLES_PER_PEAK: usize = 8;
const MAX_REFINEMENTS: usize = 4;

/// `exp(−iHt)` from one eigendecomposition of `H`.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigen: Eigen,
}

impl Propagator {
    pub fn new(h: &DenseOperator) -> Self {
        Self { eigen: eigh(h) }
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eigen
    }

    /// Eigenbasis amplitudes `V†ψ`.
    pub fn amplitudes(&self, psi: &StateVector) -> StateVector {
        self.eigen.vectors.ad_mul(psi)
    }

    pub fn evolve_amplitudes(&self, amps: &StateVector, t: f64) -> StateVector {
        let phased = StateVector::from_iterator(
            amps.len(),
            amps.iter()
                .zip(self.eigen.values.iter())
                .map(|(c, e)| c * Complex64::from_polar(1.0, -e * t)),
        );
        &self.eigen.vectors * phased
    }

    /// `exp(−iHt)ψ`; negative `t` propagates backwards.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> StateVector {
        self.evolve_amplitudes(&self.amplitudes(psi), t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Basis(BasisLabel),
    Vector(StateVector),
}

impl InitialState {
    pub fn resolve(&self, space: &HilbertSpace) -> Result<StateVector> {
        match self {
            Self::Basis(label) => space.basis_vector(label),
            Self::Vector(v) => {
                if v.len() != space.dim() {
                    return param(format!(
                        "initial state has length {}, space dimension is {}",
                        v.len(),
                        space.dim()
                    ));
                }
                if (v.norm() - 1.0).abs() > NORM_TOL {
                    return param(format!(
                        "initial state is not normalized (norm {})",
                        v.norm()
                    ));
                }
                Ok(v.clone())
            }
        }
    }

    fn padded(&self, dim: usize) -> Self {
        match self {
            Self::Basis(l) => Self::Basis(l.clone()),
            Self::Vector(v) => Self::Vector(pad(v, dim)),
        }
    }
}

impl From<BasisLabel> for InitialState {
    fn from(l: BasisLabel) -> Self {
        Self::Basis(l)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsTrace {
    pub times: Vec<f64>,
    pub magnon_number: Vec<f64>,
    /// `qubit_excitation[q][k]`: excited population of qubit `q + 1` at `times[k]`.
    pub qubit_excitation: Vec<Vec<f64>>,
    /// Population of the all-excited qubit state, traced over the mode.
    pub three_qubit_correlator: Vec<f64>,
    pub target_fidelity: Vec<f64>,
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
}

impl DynamicsTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `(|1, g…g⟩ − i|0, e…e⟩)/√2`
pub fn ghz_target(space: &HilbertSpace) -> StateVector {
    let n = space.n_qubits();
    let a = space
        .basis_vector(&BasisLabel::all_ground(1, n))
        .expect("label fits any valid space");
    let b = space
        .basis_vector(&BasisLabel::all_excited(0, n))
        .expect("label fits any valid space");
    (a - b * Complex64::i()) / Complex64::new(2f64.sqrt(), 0.0)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvolveOptions {
    /// Fidelity reference; `None` uses [`ghz_target`].
    pub target: Option<StateVector>,
    pub convergence: Convergence,
}

pub fn evolve(p: &ModelParams, initial: &InitialState, times: &[f64]) -> Result<DynamicsTrace> {
    evolve_with(p, initial, times, &EvolveOptions::default())
}

pub fn evolve_with(
    p: &ModelParams,
    initial: &InitialState,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<DynamicsTrace> {
    p.validate()?;
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return param("times must be finite and nonnegative");
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return param("times must be strictly increasing");
    }
    let trace = compute_trace(p, initial, opts.target.as_ref(), times)?;
    if opts.convergence.check {
        let fine_p = p.with_n_max(2 * p.space.n_max())?;
        let dim = fine_p.space.dim();
        let fine_target = opts.target.as_ref().map(|t| pad(t, dim));
        let fine = compute_trace(&fine_p, &initial.padded(dim), fine_target.as_ref(), times)?;
        let conv = &opts.convergence;
        let n_max = p.space.n_max();
        let mut series: Vec<(&str, &[f64], &[f64])> = vec![
            ("magnon number", &trace.magnon_number, &fine.magnon_number),
            (
                "all-excited population",
                &trace.three_qubit_correlator,
                &fine.three_qubit_correlator,
            ),
            (
                "target fidelity",
                &trace.target_fidelity,
                &fine.target_fidelity,
            ),
        ];
        for (coarse, fine) in trace.qubit_excitation.iter().zip(&fine.qubit_excitation) {
            series.push(("qubit excitation", coarse, fine));
        }
        for (name, coarse, fine) in series {
            for (k, (a, b)) in coarse.iter().zip(fine).enumerate() {
                conv.compare(&format!("{name} at t = {}", times[k]), n_max, *a, *b, 1.0)?;
            }
        }
    }
    Ok(trace)
}

fn compute_trace(
    p: &ModelParams,
    initial: &InitialState,
    target: Option<&StateVector>,
    times: &[f64],
) -> Result<DynamicsTrace> {
    let space = &p.space;
    let psi0 = initial.resolve(space)?;
    let target = match target {
        Some(t) if t.len() != space.dim() => {
            return param(format!(
                "target has length {}, space dimension is {}",
                t.len(),
                space.dim()
            ))
        }
        Some(t) => t.clone(),
        None => ghz_target(space),
    };
    let h = build_hamiltonian(p)?;
    let prop = Propagator::new(&h);
    let amps = prop.amplitudes(&psi0);

    let nq = space.n_qubits();
    let all_excited = space.qubit_dim() - 1;
    let mut trace = DynamicsTrace {
        times: times.to_vec(),
        magnon_number: Vec::with_capacity(times.len()),
        qubit_excitation: vec![Vec::with_capacity(times.len()); nq],
        three_qubit_correlator: Vec::with_capacity(times.len()),
        target_fidelity: Vec::with_capacity(times.len()),
        norm: Vec::with_capacity(times.len()),
        energy: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let psi = prop.evolve_amplitudes(&amps, t);
        let mut n_mag = 0.0;
        let mut excited = vec![0.0; nq];
        let mut p_all = 0.0;
        let mut norm2 = 0.0;
        for (i, c) in psi.iter().enumerate() {
            let w = c.norm_sqr();
            norm2 += w;
            n_mag += w * space.fock_of(i) as f64;
            for (q, e) in excited.iter_mut().enumerate() {
                if space.is_excited(i, q + 1) {
                    *e += w;
                }
            }
            if i % space.qubit_dim() == all_excited {
                p_all += w;
            }
        }
        trace.magnon_number.push(n_mag);
        for (q, e) in excited.into_iter().enumerate() {
            trace.qubit_excitation[q].push(e);
        }
        trace.three_qubit_correlator.push(p_all);
        trace.target_fidelity.push(target.dotc(&psi).norm_sqr());
        trace.norm.push(norm2.sqrt());
        trace.energy.push(h.expectation(&psi).re);
    }
    Ok(trace)
}

/// Effective coupling used to size time windows: the perturbative resonance
/// value for the mean couplings, or `None` if it vanishes.
fn estimated_geff(p: &ModelParams) -> Option<f64> {
    let g = geff_total_resonance(p.mean_g_r(), p.mean_g_cr(), p.mean_omega_q())
        .ok()?
        .abs();
    (g > 0.0 && g.is_finite()).then_some(g)
}

/// [`DEFAULT_TIME_POINTS`] samples over [`DEFAULT_SPAN_PERIODS`] periods
/// `2π/g_eff` of the perturbative estimate.
pub fn default_time_grid(p: &ModelParams) -> Vec<f64> {
    default_time_grid_with(p, DEFAULT_TIME_POINTS)
}

fn default_time_grid_with(p: &ModelParams, n_points: usize) -> Vec<f64> {
    let span = match estimated_geff(p) {
        Some(g) => DEFAULT_SPAN_PERIODS * 2.0 * PI / g,
        None => 1e4 / p.mean_omega_q(),
    };
    linspace(0.0, span, n_points)
}

/// Evolves on the default time span with `n_points` samples, doubling the
/// sampling density (up to four times) while the all-excited population peaks
/// are undersampled.
pub fn evolve_default(
    p: &ModelParams,
    initial: &InitialState,
    n_points: usize,
    opts: &EvolveOptions,
) -> Result<DynamicsTrace> {
    if n_points < 3 {
        return param("a trace needs at least 3 time points");
    }
    let mut n_points = n_points;
    let mut trace = evolve_with(p, initial, &default_time_grid_with(p, n_points), opts)?;
    for _ in 0..MAX_REFINEMENTS {
        let runs = peak_runs(&trace.three_qubit_correlator);
        if runs.iter().all(|r| r.end - r.start >= MIN_SAMPLES_PER_PEAK) {
            break;
        }
        n_points *= 2;
        trace = evolve_with(p, initial, &default_time_grid_with(p, n_points), opts)?;
    }
    Ok(trace)
}

/// Runs of samples above the midline, with hysteresis of a tenth of the range
/// to keep noise from splitting a peak. Runs touching either end are dropped.
fn peak_runs(y: &[f64]) -> Vec<std::ops::Range<usize>> {
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let range = hi - lo;
    if range.is_nan() || range <= 1e-9 {
        return vec![];
    }
    let mid = 0.5 * (lo + hi);
    let (up, down) = (mid + 0.1 * range, mid - 0.1 * range);
    let mut runs = vec![];
    let mut start: Option<usize> = None;
    let mut armed = y[0] < down;
    for (k, &v) in y.iter().enumerate() {
        match start {
            None if armed && v > up => start = Some(k),
            None if v < down => armed = true,
            Some(s) if v < down => {
                runs.push(s..k);
                start = None;
            }
            _ => {}
        }
    }
    runs
}

/// Peak location by a parabola through the largest sample of a run and its
/// neighbours.
fn refine_peak(times: &[f64], y: &[f64], run: std::ops::Range<usize>) -> f64 {
    let k = run
        .clone()
        .max_by(|&a, &b| y[a].total_cmp(&y[b]))
        .expect("runs are non-empty");
    if k == 0 || k + 1 >= y.len() {
        return times[k];
    }
    let (ym, y0, yp) = (y[k - 1], y[k], y[k + 1]);
    let curv = ym - 2.0 * y0 + yp;
    if curv >= 0.0 {
        return times[k];
    }
    let h = 0.5 * (times[k + 1] - times[k - 1]);
    times[k] + 0.5 * (ym - yp) / curv * h
}

/// Oscillation period of the all-excited population from its first two maxima.
pub fn rabi_period(trace: &DynamicsTrace) -> Result<f64> {
    let y = &trace.three_qubit_correlator;
    if y.len() != trace.times.len() || y.len() < 3 {
        return Err(Error::InsufficientSpan(
            "trace has fewer than 3 samples".into(),
        ));
    }
    let runs = peak_runs(y);
    if runs.len() < 2 {
        return Err(Error::InsufficientSpan(format!(
            "found {} complete maxima of the all-excited population, need 2",
            runs.len()
        )));
    }
    let t1 = refine_peak(&trace.times, y, runs[0].clone());
    let t2 = refine_peak(&trace.times, y, runs[1].clone());
    Ok(t2 - t1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzPeak {
    pub t_star: f64,
    pub fidelity: f64,
}

/// Maximum fidelity to [`ghz_target`] starting from `|1, g…g⟩`, searched over
/// the first exchange period `π/g`, with `g` half the splitting of the two
/// eigenstates carrying the most `|1,ggg⟩`/`|0,eee⟩` weight at `p.omega0`.
///
/// The fidelity is a short sum over the eigenstates shared by the initial and
/// target states, so it is sampled densely enough to resolve its fastest
/// oscillation before the best sample is polished by golden section.
pub fn ghz_fidelity_peak(p: &ModelParams) -> Result<GhzPeak> {
    p.validate()?;
    let space = &p.space;
    let prop = Propagator::new(&build_hamiltonian(p)?);
    let LevelSelector::Overlap(r0, r1) = LevelSelector::all_qubits(space) else {
        unreachable!("all_qubits builds an overlap selector")
    };
    let eig = prop.eigen();
    let w = eig.weights(&[r0.clone(), r1]);
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    let split = (eig.values[order[0]] - eig.values[order[1]]).abs();
    let span = if split > 0.0 {
        2.0 * PI / split
    } else {
        1e4 / p.mean_omega_q()
    };

    let init = prop.amplitudes(&r0);
    let target = prop.amplitudes(&ghz_target(space));
    let terms: Vec<(f64, Complex64)> = init
        .iter()
        .zip(target.iter())
        .zip(eig.values.iter())
        .map(|((a, b), e)| (*e, b.conj() * a))
        .collect();
    let largest = terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let terms: Vec<(f64, Complex64)> = terms
        .into_iter()
        .filter(|(_, c)| c.norm() > 1e-14 * largest)
        .collect();
    let fidelity = |t: f64| {
        terms
            .iter()
            .map(|(e, c)| c * Complex64::from_polar(1.0, -e * t))
            .sum::<Complex64>()
            .norm_sqr()
    };

    let (e_lo, e_hi) = terms
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (e, _)| {
            (lo.min(*e), hi.max(*e))
        });
    let fastest = (e_hi - e_lo).max(split);
    let n = ((span * fastest / (2.0 * PI) * GHZ_SAMPLES_PER_CYCLE).ceil() as usize)
        .clamp(GHZ_MIN_POINTS, GHZ_MAX_POINTS);
    let dt = span / (n - 1) as f64;
    let (k, _) = (0..n).map(|k| fidelity(k as f64 * dt)).enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (k, f)| if f > best.1 { (k, f) } else { best },
    );

    let (mut a, mut b) = (
        k.saturating_sub(1) as f64 * dt,
        ((k + 1).min(n - 1)) as f64 * dt,
    );
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (fidelity(c), fidelity(d));
    while b - a > 1e-12 * span {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fidelity(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fidelity(d);
        }
    }
    let polished = 0.5 * (a + b);
    let sampled = k as f64 * dt;
    let (t_star, fid) = if fidelity(polished) >= fidelity(sampled) {
        (polished, fidelity(polished))
    } else {
        (sampled, fidelity(sampled))
    };
    Ok(GhzPeak {
        t_star,
        fidelity: fid,
    })
}
