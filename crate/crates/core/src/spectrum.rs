//! Eigenvalue sweeps in ω₀, gap location and classification, and extraction
//! of the effective three-qubit coupling from exact spectra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::Convergence;
use crate::error::{param, Error, Result};
use crate::hilbert::{BasisLabel, DenseOperator, HilbertSpace, StateVector};
use crate::linalg::{eigh, eigvalsh};
use crate::model::{build_hamiltonian, ModelParams};
use crate::perturbation::crossing_shift;

/// Crossing/anticrossing threshold in units of the mean qubit splitting.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;

const COARSE_POINTS: usize = 64;
const GOLDEN_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SpectrumSweep {
    pub omega0_grid: Vec<f64>,
    /// `levels[k]` holds the lowest eigenvalues, ascending, at `omega0_grid[k]`.
    pub levels: Vec<Vec<f64>>,
    pub params: ModelParams,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn lowest_levels(p: &ModelParams, omega0: f64, n_levels: usize) -> Result<Vec<f64>> {
    let mut ev = eigvalsh(&build_hamiltonian(&p.with_omega0(omega0))?);
    ev.truncate(n_levels);
    Ok(ev)
}

pub fn sweep(
    p: &ModelParams,
    range: (f64, f64),
    n_points: usize,
    n_levels: usize,
) -> Result<SpectrumSweep> {
    sweep_with(p, range, n_points, n_levels, &Convergence::default())
}

/// Grid points are diagonalized in parallel; the result is ordered by grid
/// index and independent of the thread count.
pub fn sweep_with(
    p: &ModelParams,
    (lo, hi): (f64, f64),
    n_points: usize,
    n_levels: usize,
    conv: &Convergence,
) -> Result<SpectrumSweep> {
    p.validate()?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return param(format!("sweep range requires lo < hi, got [{lo}, {hi}]"));
    }
    if n_points < 2 {
        return param("a sweep needs at least 2 grid points");
    }
    if n_levels == 0 || n_levels > p.space.dim() {
        return param(format!(
            "n_levels = {n_levels} must lie in 1..={}",
            p.space.dim()
        ));
    }
    let grid = linspace(lo, hi, n_points);
    let levels = grid
        .par_iter()
        .map(|&w| lowest_levels(p, w, n_levels))
        .collect::<Result<Vec<_>>>()?;

    if conv.check {
        let fine_p = p.with_n_max(2 * p.space.n_max())?;
        let fine = grid
            .par_iter()
            .map(|&w| lowest_levels(&fine_p, w, n_levels))
            .collect::<Result<Vec<_>>>()?;
        let scale = p.mean_omega_q();
        for ((w, coarse), fine) in grid.iter().zip(&levels).zip(&fine) {
            for (k, (a, b)) in coarse.iter().zip(fine).enumerate() {
                conv.compare(
                    &format!("level E_{k} at ω0 = {w}"),
                    p.space.n_max(),
                    *a,
                    *b,
                    w.abs().max(scale),
                )?;
            }
        }
    }
    Ok(SpectrumSweep {
        omega0_grid: grid,
        levels,
        params: p.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapKind {
    Crossing,
    Anticrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapFeature {
    pub omega0_star: f64,
    pub min_gap: f64,
    /// Ascending-sorted level indices of the pair at `omega0_star`.
    pub level_pair: (usize, usize),
    pub kind: GapKind,
}

/// Which pair of levels a gap refers to.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSelector {
    /// Levels `i < j` of the ascending spectrum.
    Sorted(usize, usize),
    /// The two eigenvectors with the largest weight on the span of two
    /// orthonormal reference states, which is robust against spectator
    /// levels passing through the window.
    Overlap(StateVector, StateVector),
}

impl LevelSelector {
    pub fn basis_pair(space: &HilbertSpace, a: &BasisLabel, b: &BasisLabel) -> Result<Self> {
        Ok(Self::Overlap(
            space.basis_vector(a)?,
            space.basis_vector(b)?,
        ))
    }

    /// `|1, g…g⟩` and `|0, e…e⟩`.
    pub fn all_qubits(space: &HilbertSpace) -> Self {
        let n = space.n_qubits();
        Self::basis_pair(
            space,
            &BasisLabel::all_ground(1, n),
            &BasisLabel::all_excited(0, n),
        )
        .expect("labels fit any valid space")
    }

    /// Zero-pads reference vectors into a larger Fock cutoff (boson-major
    /// ordering keeps existing indices unchanged).
    fn padded(&self, dim: usize) -> Self {
        match self {
            Self::Sorted(i, j) => Self::Sorted(*i, *j),
            Self::Overlap(a, b) => Self::Overlap(pad(a, dim), pad(b, dim)),
        }
    }
}

pub(crate) fn pad(v: &StateVector, dim: usize) -> StateVector {
    let mut out = StateVector::zeros(dim);
    out.rows_mut(0, v.len()).copy_from(v);
    out
}

/// Permutation-symmetric state with `n_excited` excited qubits and `fock`
/// bosons, normalized.
pub fn symmetric_state(space: &HilbertSpace, fock: usize, n_excited: usize) -> Result<StateVector> {
    let nq = space.n_qubits();
    if n_excited > nq || fock >= space.n_max() {
        return param(format!(
            "no symmetric state with {n_excited} excitations and {fock} bosons"
        ));
    }
    let mut v = StateVector::zeros(space.dim());
    let mut count = 0usize;
    for bits in 0..space.qubit_dim() {
        if (bits as u32).count_ones() as usize == n_excited {
            v[fock * space.qubit_dim() + bits] = Complex64::new(1.0, 0.0);
            count += 1;
        }
    }
    Ok(v / Complex64::new((count as f64).sqrt(), 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    /// Absolute classification threshold; `None` means
    /// `DEFAULT_THRESHOLD × mean ω_q`.
    pub threshold: Option<f64>,
    pub coarse_points: usize,
    pub convergence: Convergence,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            threshold: None,
            coarse_points: COARSE_POINTS,
            convergence: Convergence::default(),
        }
    }
}

impl GapOptions {
    fn threshold_for(&self, p: &ModelParams) -> f64 {
        self.threshold
            .unwrap_or(DEFAULT_THRESHOLD * p.mean_omega_q())
    }
}

/// Gap and bookkeeping of the selected pair at one ω₀.
#[derive(Debug, Clone, Copy)]
struct PairSample {
    gap: f64,
    pair: (usize, usize),
    /// Overlap selector only: sign tells which reference dominates the lower level.
    character: f64,
}

fn sample_pair(h: &DenseOperator, selector: &LevelSelector) -> Result<PairSample> {
    match selector {
        LevelSelector::Sorted(i, j) => {
            let ev = eigvalsh(h);
            if *j >= ev.len() {
                return param(format!("level index {j} beyond dimension {}", ev.len()));
            }
            Ok(PairSample {
                gap: ev[*j] - ev[*i],
                pair: (*i, *j),
                character: 0.0,
            })
        }
        LevelSelector::Overlap(r0, r1) => {
            if r0.len() != h.dim() || r1.len() != h.dim() {
                return param("reference states do not match the Hamiltonian dimension");
            }
            let eig = eigh(h);
            let w = eig.weights(&[r0.clone(), r1.clone()]);
            let mut order: Vec<usize> = (0..w.len()).collect();
            order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
            let (lo, hi) = if order[0] < order[1] {
                (order[0], order[1])
            } else {
                (order[1], order[0])
            };
            let low_vec = eig.vectors.column(lo);
            let character = r0.dotc(&low_vec).norm_sqr() - r1.dotc(&low_vec).norm_sqr();
            Ok(PairSample {
                gap: eig.values[hi] - eig.values[lo],
                pair: (lo, hi),
                character,
            })
        }
    }
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
fn golden_min(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a) > rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid)?;
    let best = [(mid, fm), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty");
    Ok(best)
}

pub fn find_gap(
    p: &ModelParams,
    window: (f64, f64),
    selector: &LevelSelector,
) -> Result<GapFeature> {
    find_gap_with(p, window, selector, &GapOptions::default())
}

pub fn find_gap_with(
    p: &ModelParams,
    window: (f64, f64),
    selector: &LevelSelector,
    opts: &GapOptions,
) -> Result<GapFeature> {
    find_gap_with_builder(p, window, selector, opts, build_hamiltonian)
}

/// As [`find_gap_with`], with a caller-supplied Hamiltonian builder (called
/// with `p` at each trial ω₀, and at doubled `n_max` for the convergence check).
pub fn find_gap_with_builder<B>(
    p: &ModelParams,
    (lo, hi): (f64, f64),
    selector: &LevelSelector,
    opts: &GapOptions,
    builder: B,
) -> Result<GapFeature>
where
    B: Fn(&ModelParams) -> Result<DenseOperator> + Sync,
{
    p.validate()?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return param(format!("gap window requires lo < hi, got [{lo}, {hi}]"));
    }
    if opts.coarse_points < 4 {
        return param("gap search needs at least 4 coarse points");
    }
    if let LevelSelector::Sorted(i, j) = selector {
        if i >= j {
            return param(format!("sorted level pair ({i}, {j}) must satisfy i < j"));
        }
    }

    let grid = linspace(lo, hi, opts.coarse_points);
    let samples = grid
        .par_iter()
        .map(|&w| sample_pair(&builder(&p.with_omega0(w))?, selector))
        .collect::<Result<Vec<_>>>()?;

    let candidates: Vec<usize> = match selector {
        LevelSelector::Overlap(..) => (0..samples.len() - 1)
            .filter(|&k| samples[k].character.signum() != samples[k + 1].character.signum())
            .collect(),
        LevelSelector::Sorted(..) => (1..samples.len() - 1)
            .filter(|&k| {
                samples[k].gap < samples[k - 1].gap && samples[k].gap <= samples[k + 1].gap
            })
            .collect(),
    };
    let k = match candidates.as_slice() {
        [] => return Err(Error::NotFound { lo, hi }),
        [k] => *k,
        many => {
            return Err(Error::Ambiguous {
                lo,
                hi,
                count: many.len(),
            })
        }
    };
    let (a, b) = match selector {
        LevelSelector::Overlap(..) => {
            (grid[k.saturating_sub(1)], grid[(k + 2).min(grid.len() - 1)])
        }
        LevelSelector::Sorted(..) => (grid[k - 1], grid[k + 1]),
    };

    let refine = |params: &ModelParams, sel: &LevelSelector| -> Result<(f64, PairSample)> {
        let (x, _) = golden_min(
            |w| Ok(sample_pair(&builder(&params.with_omega0(w))?, sel)?.gap),
            a,
            b,
            GOLDEN_REL_TOL,
        )?;
        Ok((x, sample_pair(&builder(&params.with_omega0(x))?, sel)?))
    };
    let (omega0_star, best) = refine(p, selector)?;
    let threshold = opts.threshold_for(p);

    if opts.convergence.check {
        let fine_p = p.with_n_max(2 * p.space.n_max())?;
        let fine_sel = selector.padded(fine_p.space.dim());
        let (fine_star, fine_best) = refine(&fine_p, &fine_sel)?;
        let conv = &opts.convergence;
        let n_max = p.space.n_max();
        conv.compare(
            "gap location ω0*",
            n_max,
            omega0_star,
            fine_star,
            p.mean_omega_q(),
        )?;
        conv.compare("minimal gap", n_max, best.gap, fine_best.gap, threshold)?;
    }

    let min_gap = best.gap.abs();
    Ok(GapFeature {
        omega0_star,
        min_gap,
        level_pair: best.pair,
        kind: if min_gap < threshold {
            GapKind::Crossing
        } else {
            GapKind::Anticrossing
        },
    })
}

/// Gap features looked for in a standard spectrum run: the mode in resonance
/// with `k` simultaneously excited qubits, probed between `|1, g…g⟩` and the
/// symmetric `k`-excitation state with no bosons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardFeature {
    OneExcitation,
    TwoExcitation,
    ThreeExcitation,
}

impl StandardFeature {
    pub const ALL: [StandardFeature; 3] = [
        Self::OneExcitation,
        Self::TwoExcitation,
        Self::ThreeExcitation,
    ];

    pub fn excitations(self) -> usize {
        match self {
            Self::OneExcitation => 1,
            Self::TwoExcitation => 2,
            Self::ThreeExcitation => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::OneExcitation => "one_excitation",
            Self::TwoExcitation => "two_excitation",
            Self::ThreeExcitation => "three_excitation",
        }
    }

    pub fn applies_to(self, p: &ModelParams) -> bool {
        self.excitations() <= p.n_qubits()
    }

    pub fn window(self, p: &ModelParams) -> (f64, f64) {
        let wq = p.mean_omega_q();
        match self {
            Self::OneExcitation | Self::TwoExcitation => {
                let c = self.excitations() as f64 * wq;
                (c - 0.25 * wq, c + 0.25 * wq)
            }
            Self::ThreeExcitation => three_excitation_window(p),
        }
    }

    pub fn selector(self, p: &ModelParams) -> Result<LevelSelector> {
        let space = &p.space;
        let initial = space.basis_vector(&BasisLabel::all_ground(1, space.n_qubits()))?;
        Ok(LevelSelector::Overlap(
            initial,
            symmetric_state(space, 0, self.excitations())?,
        ))
    }
}

/// Window around the predicted `|1,ggg⟩`/`|0,eee⟩` crossing, wide enough for
/// the second-order level shift.
pub fn three_excitation_window(p: &ModelParams) -> (f64, f64) {
    let wq = p.mean_omega_q();
    let shift = crossing_shift(p.mean_g_r(), p.mean_g_cr(), wq).unwrap_or(3.0 * wq) - 3.0 * wq;
    let center = p.sum_omega_q() + shift;
    let half = 0.05 * wq + 2.0 * shift.abs();
    (center - half, center + half)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeffExtraction {
    /// Half the minimal gap.
    pub geff: f64,
    pub omega0_star: f64,
    pub min_gap: f64,
    pub kind: GapKind,
}

pub fn extract_geff(p: &ModelParams) -> Result<GeffExtraction> {
    extract_geff_with(p, &GapOptions::default())
}

/// Effective `|1,ggg⟩ ↔ |0,eee⟩` coupling as half the minimal gap near
/// `ω₀ ≈ Σ ω_q`.
pub fn extract_geff_with(p: &ModelParams, opts: &GapOptions) -> Result<GeffExtraction> {
    if p.n_qubits() != 3 {
        return param("effective three-qubit coupling needs exactly 3 qubits");
    }
    if p.qubits.iter().all(|q| q.g_cr == 0.0) {
        return param("effective three-qubit coupling needs a nonzero counter-rotating coupling");
    }
    let feature = find_gap_with(
        p,
        three_excitation_window(p),
        &LevelSelector::all_qubits(&p.space),
        opts,
    )?;
    Ok(GeffExtraction {
        geff: feature.min_gap / 2.0,
        omega0_star: feature.omega0_star,
        min_gap: feature.min_gap,
        kind: feature.kind,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeffPoint {
    pub g_r: f64,
    pub g_cr: f64,
    /// Extracted coupling, signed like `g_CR`.
    pub geff: f64,
    pub omega0_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub g_r: f64,
    pub g_cr: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeffFit {
    pub c1: f64,
    pub c2: f64,
    /// `‖model − data‖ / ‖data‖`
    pub residual: f64,
    pub points: Vec<GeffPoint>,
    pub skipped: Vec<SkippedPoint>,
}

impl GeffFit {
    /// `(c1 g_CR g_R⁴ + c2 g_CR³ g_R²)/ω_q⁴`
    pub fn predict(&self, g_r: f64, g_cr: f64, omega_q: f64) -> f64 {
        (self.c1 * g_cr * g_r.powi(4) + self.c2 * g_cr.powi(3) * g_r.powi(2)) / omega_q.powi(4)
    }
}

/// Largest coupling (in units of `ω_q`) accepted by [`fit_geff_surface`].
pub const FIT_MAX_COUPLING: f64 = 0.15;
const FIT_MIN_POINTS: usize = 6;

pub fn fit_geff_surface(
    p_base: &ModelParams,
    gr_grid: &[f64],
    gcr_grid: &[f64],
) -> Result<GeffFit> {
    fit_geff_surface_with(p_base, gr_grid, gcr_grid, &GapOptions::default())
}

/// Least-squares fit of extracted couplings over the `gr_grid × gcr_grid`
/// product, for identical qubits with the splitting and cutoff of `p_base`.
/// Grid points whose extraction fails are skipped and reported.
pub fn fit_geff_surface_with(
    p_base: &ModelParams,
    gr_grid: &[f64],
    gcr_grid: &[f64],
    opts: &GapOptions,
) -> Result<GeffFit> {
    let wq = p_base.mean_omega_q();
    let limit = FIT_MAX_COUPLING * wq;
    if let Some(g) = gr_grid
        .iter()
        .chain(gcr_grid)
        .find(|g| g.abs() > limit || !g.is_finite())
    {
        return param(format!(
            "coupling {g} outside the perturbative fit range |g| ≤ {limit}"
        ));
    }
    let pairs: Vec<(f64, f64)> = gr_grid
        .iter()
        .flat_map(|&gr| gcr_grid.iter().map(move |&gcr| (gr, gcr)))
        .collect();
    let outcomes: Vec<std::result::Result<GeffPoint, SkippedPoint>> = pairs
        .par_iter()
        .map(|&(g_r, g_cr)| {
            let skip = |reason: String| SkippedPoint { g_r, g_cr, reason };
            let p = ModelParams::identical(3.0 * wq, wq, g_r, g_cr, 3, p_base.space.n_max())
                .map_err(|e| skip(e.to_string()))?;
            let ex = extract_geff_with(&p, opts).map_err(|e| skip(e.to_string()))?;
            Ok(GeffPoint {
                g_r,
                g_cr,
                geff: ex.geff.copysign(g_cr),
                omega0_star: ex.omega0_star,
            })
        })
        .collect();
    let (points, skipped): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(|o| o.is_ok());
    let points: Vec<GeffPoint> = points.into_iter().map(|o| o.unwrap()).collect();
    let skipped: Vec<SkippedPoint> = skipped.into_iter().map(|o| o.unwrap_err()).collect();
    if points.len() < FIT_MIN_POINTS {
        return param(format!(
            "fit needs at least {FIT_MIN_POINTS} valid points, {} extracted ({} skipped)",
            points.len(),
            skipped.len()
        ));
    }

    let n = points.len();
    let w4 = wq.powi(4);
    let design = DMatrix::from_fn(n, 2, |r, c| {
        let pt = &points[r];
        match c {
            0 => pt.g_cr * pt.g_r.powi(4) / w4,
            _ => pt.g_cr.powi(3) * pt.g_r.powi(2) / w4,
        }
    });
    let data = DVector::from_iterator(n, points.iter().map(|pt| pt.geff));
    let coef = design
        .clone()
        .svd(true, true)
        .solve(&data, 0.0)
        .map_err(|e| Error::Parameter(format!("least squares failed: {e}")))?;
    let residual = (&design * &coef - &data).norm() / data.norm();
    Ok(GeffFit {
        c1: coef[0],
        c2: coef[1],
        residual,
        points,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::geff_total_resonance;

    fn fig3(omega0: f64, g_r: f64, g_cr: f64) -> ModelParams {
        ModelParams::identical(omega0, 1.0, g_r, g_cr, 3, 10).unwrap()
    }

    #[test]
    fn sweep_shape_and_errors() {
        let p = fig3(1.0, 0.1, 0.1);
        let s = sweep(&p, (0.5, 1.5), 5, 6).unwrap();
        assert_eq!(s.omega0_grid.len(), 5);
        assert!(s
            .levels
            .iter()
            .all(|l| l.len() == 6 && l.windows(2).all(|w| w[0] <= w[1])));
        assert!(s.omega0_grid.windows(2).all(|w| w[0] < w[1]));
        assert!(sweep(&p, (1.0, 1.0), 5, 6).is_err());
        assert!(sweep(&p, (0.5, 1.0), 1, 6).is_err());
        assert!(sweep(&p, (0.5, 1.0), 3, 81).is_err());
    }

    #[test]
    fn uncoupled_levels_are_linear_with_integer_slopes() {
        let p = fig3(1.0, 0.0, 0.0);
        let s = sweep(&p, (0.5, 3.5), 31, 16).unwrap();
        let h = s.omega0_grid[1] - s.omega0_grid[0];
        for k in 1..s.omega0_grid.len() {
            // between grid points with no reordering the slope is an integer N
            for (a, b) in s.levels[k - 1].iter().zip(&s.levels[k]) {
                let slope = (b - a) / h;
                assert!(slope > -1e-9 && slope < 16.0);
            }
        }
        // each level equals N ω0 + (qubit energy) at every point
        for (w, lv) in s.omega0_grid.iter().zip(&s.levels) {
            for e in lv {
                let ok = (0..10).any(|n| {
                    (-3..=3)
                        .step_by(2)
                        .any(|q| (e - (n as f64 * w + q as f64 / 2.0)).abs() < 1e-12)
                });
                assert!(ok, "{e} at {w}");
            }
        }
    }

    #[test]
    fn sweep_continuity() {
        let p = fig3(1.0, 0.1, 0.1);
        let n_levels = 16;
        let s = sweep(&p, (0.5, 3.5), 121, n_levels).unwrap();
        let h = s.omega0_grid[1] - s.omega0_grid[0];
        for k in 1..s.levels.len() {
            for (a, b) in s.levels[k - 1].iter().zip(&s.levels[k]) {
                assert!((b - a).abs() <= n_levels as f64 * h + 1e-9);
            }
        }
    }

    #[test]
    fn sweep_rejects_unconverged_cutoff() {
        // with n_max = 2 the top retained level sits at the truncation edge
        let p = ModelParams::identical(1.0, 1.0, 0.3, 0.3, 1, 2).unwrap();
        assert!(matches!(
            sweep(&p, (0.5, 1.5), 3, 4),
            Err(Error::Convergence { .. })
        ));
        assert!(sweep_with(&p, (0.5, 1.5), 3, 4, &Convergence::disabled()).is_ok());
    }

    #[test]
    fn sweep_invariant_under_relabeling() {
        let mut p = ModelParams::identical(1.0, 1.0, 0.1, 0.05, 3, 8).unwrap();
        p.qubits[0].g_r = 0.12;
        p.qubits[2].omega_q = 1.1;
        let mut q = p.clone();
        q.qubits.swap(0, 2);
        let a = sweep(&p, (0.8, 3.2), 7, 20).unwrap();
        let b = sweep(&q, (0.8, 3.2), 7, 20).unwrap();
        for (la, lb) in a.levels.iter().zip(&b.levels) {
            for (x, y) in la.iter().zip(lb) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_excitation_point_is_a_crossing() {
        let p = fig3(2.0, 0.1, 0.1);
        let f = StandardFeature::TwoExcitation;
        let gap = find_gap(&p, f.window(&p), &f.selector(&p).unwrap()).unwrap();
        assert_eq!(gap.kind, GapKind::Crossing, "{gap:?}");
        assert!(gap.min_gap < 1e-8);
    }

    #[test]
    fn one_excitation_point_is_a_wide_anticrossing() {
        let p = fig3(1.0, 0.1, 0.1);
        let f = StandardFeature::OneExcitation;
        let gap = find_gap(&p, f.window(&p), &f.selector(&p).unwrap()).unwrap();
        assert_eq!(gap.kind, GapKind::Anticrossing);
        // vacuum Rabi splitting of the symmetric state, 2√3 g, up to dressing
        assert!(
            (gap.min_gap - 2.0 * 3f64.sqrt() * 0.1).abs() < 0.05,
            "{gap:?}"
        );
    }

    #[test]
    fn three_excitation_anticrossing_and_jc_crossing() {
        let p = fig3(3.0, 0.1, 0.1);
        let sel = LevelSelector::all_qubits(&p.space);
        let gap = find_gap(&p, three_excitation_window(&p), &sel).unwrap();
        assert_eq!(gap.kind, GapKind::Anticrossing);
        assert!(gap.min_gap > 1e-6);
        let jc = fig3(3.0, 0.1, 0.0);
        let gap = find_gap(&jc, three_excitation_window(&jc), &sel).unwrap();
        assert_eq!(gap.kind, GapKind::Crossing);
    }

    #[test]
    fn window_errors() {
        let p = fig3(3.0, 0.1, 0.1);
        let sel = LevelSelector::all_qubits(&p.space);
        assert!(matches!(
            find_gap(&p, (2.5, 2.7), &sel),
            Err(Error::NotFound { .. })
        ));
        // the sorted ground/first-excited pair never touches here
        assert!(matches!(
            find_gap(&p, (0.2, 0.4), &LevelSelector::Sorted(0, 1)),
            Err(Error::NotFound { .. })
        ));
        // three evenly spaced crossings of sorted levels 1 and 2 in the uncoupled spectrum
        let free = fig3(1.0, 0.0, 0.0);
        let many = find_gap_with(
            &free,
            (0.3, 3.3),
            &LevelSelector::Sorted(6, 7),
            &GapOptions {
                convergence: Convergence::disabled(),
                coarse_points: 200,
                ..GapOptions::default()
            },
        );
        assert!(matches!(many, Err(Error::Ambiguous { .. })), "{many:?}");
        assert!(find_gap(&p, (3.0, 2.0), &sel).is_err());
    }

    #[test]
    fn gap_is_invariant_under_energy_shift() {
        let p = fig3(3.0, 0.1, 0.1);
        let sel = LevelSelector::all_qubits(&p.space);
        let opts = GapOptions::default();
        let plain = find_gap_with(&p, three_excitation_window(&p), &sel, &opts).unwrap();
        let shifted = find_gap_with_builder(&p, three_excitation_window(&p), &sel, &opts, |q| {
            let h = build_hamiltonian(q)?;
            Ok(&h + &DenseOperator::identity(h.dim()).scaled(0.73))
        })
        .unwrap();
        assert!((plain.min_gap - shifted.min_gap).abs() < 1e-6 * plain.min_gap);
        assert!((plain.omega0_star - shifted.omega0_star).abs() < 1e-8);
    }

    #[test]
    fn extract_geff_near_perturbative_value() {
        let ex = extract_geff(&fig3(3.0, 0.1, 0.1)).unwrap();
        let pert = geff_total_resonance(0.1, 0.1, 1.0).unwrap();
        assert!((ex.geff - pert).abs() / pert < 0.3, "{ex:?}");
        assert!((ex.omega0_star - 2.985).abs() < 5e-3);
        assert!(extract_geff(&fig3(3.0, 0.1, 0.0)).is_err());
        assert!(extract_geff(&ModelParams::identical(2.0, 1.0, 0.1, 0.1, 2, 8).unwrap()).is_err());
        let weak = extract_geff(&fig3(3.0, 0.1, 1e-4)).unwrap();
        assert!(weak.geff < 2e-3 * ex.geff);
    }

    #[test]
    fn fit_needs_enough_points_and_small_couplings() {
        let p = fig3(3.0, 0.1, 0.1);
        assert!(fit_geff_surface(&p, &[0.1, 0.2], &[0.1]).is_err());
        assert!(fit_geff_surface(&p, &[0.06, 0.08], &[0.06, 0.08]).is_err());
    }

    #[test]
    fn symmetric_states_are_normalized() {
        let s = HilbertSpace::new(3, 3).unwrap();
        for k in 0..=3 {
            assert!((symmetric_state(&s, 0, k).unwrap().norm() - 1.0).abs() < 1e-15);
        }
        assert!(symmetric_state(&s, 0, 4).is_err());
    }
}
