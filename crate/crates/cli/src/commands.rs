use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error as ThisError;

use magqrm_core::dynamics::evolve_default;
use magqrm_core::model::MEV_IN_GHZ;
use magqrm_core::perturbation::{FifthOrderFamilies, PERTURBATIVE_FIT, REFERENCE_FIT};
use magqrm_core::spectrum::{fit_geff_surface_with, linspace, GapOptions, GeffPoint, SkippedPoint};
use magqrm_core::{
    estimate as estimate_model, evolve_with, extract_geff, geff3_general, geff3_shifted,
    geff5_diagrams, geff5_identical_resonance, geff_total_resonance, ghz_fidelity_peak,
    rabi_period, spectrum, BasisLabel, Convergence, Error, EvolveOptions, FifthOrderMode, GapKind,
    InitialState, ModelParams, PertInputs, RunConfig, StandardFeature,
};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Io(_) => 1,
            Self::Model(e) => match e {
                Error::Config(_) | Error::Parameter(_) => 2,
                Error::Domain(_) | Error::Convergence { .. } => 3,
                Error::NotFound { .. }
                | Error::Ambiguous { .. }
                | Error::Singularity { .. }
                | Error::InsufficientSpan(_) => 4,
            },
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct Context {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub n_max: Option<usize>,
}

impl Context {
    fn params(&self) -> CliResult<ModelParams> {
        Ok(self.cfg.model_params(self.n_max)?)
    }

    fn convergence(&self) -> Convergence {
        if self.cfg.run.check_convergence {
            Convergence::default()
        } else {
            Convergence::disabled()
        }
    }

    fn gap_options(&self) -> CliResult<GapOptions> {
        Ok(GapOptions {
            threshold: self
                .cfg
                .run
                .threshold
                .map(|t| self.cfg.to_wq(t))
                .transpose()?,
            convergence: self.convergence(),
            ..GapOptions::default()
        })
    }

    fn write(&self, name: &str, contents: &str) -> CliResult {
        let path = self.out.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> CliResult {
        let mut text = serde_json::to_string_pretty(value).expect("output types serialize");
        text.push('\n');
        self.write(name, &text)
    }
}

#[derive(Serialize)]
struct GapRecord {
    name: &'static str,
    omega0_star: f64,
    min_gap: f64,
    kind: GapKind,
    level_pair: [usize; 2],
}

pub fn spectrum(ctx: &Context) -> CliResult {
    let p = ctx.params()?;
    let run = &ctx.cfg.run;
    let lo = run
        .omega0_min
        .map(|e| ctx.cfg.to_wq(e))
        .transpose()?
        .unwrap_or(0.5 * p.mean_omega_q());
    let hi = run
        .omega0_max
        .map(|e| ctx.cfg.to_wq(e))
        .transpose()?
        .unwrap_or(p.sum_omega_q() + 0.5 * p.mean_omega_q());
    let n_levels = run.n_levels.min(p.space.dim());
    let sweep = spectrum::sweep_with(&p, (lo, hi), run.n_points, n_levels, &ctx.convergence())?;

    let mut csv = String::from("omega0");
    for k in 0..n_levels {
        write!(csv, ",E_{k}").unwrap();
    }
    csv.push('\n');
    for (w, levels) in sweep.omega0_grid.iter().zip(&sweep.levels) {
        csv.push_str(&num(*w));
        for e in levels {
            write!(csv, ",{}", num(*e)).unwrap();
        }
        csv.push('\n');
    }
    ctx.write("spectrum.csv", &csv)?;

    let opts = ctx.gap_options()?;
    let mut gaps = vec![];
    for feature in StandardFeature::ALL {
        if !feature.applies_to(&p) {
            continue;
        }
        let window = feature.window(&p);
        let center = 0.5 * (window.0 + window.1);
        if center < lo || center > hi {
            continue;
        }
        let gap = spectrum::find_gap_with(&p, window, &feature.selector(&p)?, &opts)?;
        gaps.push(GapRecord {
            name: feature.name(),
            omega0_star: gap.omega0_star,
            min_gap: gap.min_gap,
            kind: gap.kind,
            level_pair: [gap.level_pair.0, gap.level_pair.1],
        });
    }
    ctx.write_json("gaps.json", &gaps)
}

#[derive(Serialize)]
struct DynamicsSummary {
    omega0: f64,
    period: Option<f64>,
    t_star: Option<f64>,
    fidelity: Option<f64>,
    geff: Option<f64>,
}

pub fn dynamics(ctx: &Context) -> CliResult {
    let mut p = ctx.params()?;
    let run = &ctx.cfg.run;
    let nq = p.n_qubits();
    let explicit_omega0 = ctx.cfg.model()?.omega0.is_some();
    let has_cr = p.qubits.iter().any(|q| q.g_cr != 0.0);
    let mut geff = None;
    if nq == 3 && has_cr {
        let ex = extract_geff(&p)?;
        geff = Some(ex.geff);
        if !explicit_omega0 {
            p = p.with_omega0(ex.omega0_star);
        }
    }

    let initial = InitialState::Basis(
        ctx.cfg
            .initial_state()?
            .unwrap_or_else(|| BasisLabel::all_ground(1, nq)),
    );
    let opts = EvolveOptions {
        target: None,
        convergence: ctx.convergence(),
    };
    let trace = match run.t_max {
        Some(t_max) => {
            if t_max.is_nan() || t_max <= 0.0 {
                return Err(Error::Config(format!("run.t_max = {t_max} must be positive")).into());
            }
            evolve_with(&p, &initial, &linspace(0.0, t_max, run.n_times), &opts)?
        }
        None => evolve_default(&p, &initial, run.n_times, &opts)?,
    };

    let mut csv = String::from("t,n_magnon");
    for q in 1..=nq {
        write!(csv, ",p_q{q}").unwrap();
    }
    csv.push_str(",p_eee,fidelity\n");
    for k in 0..trace.len() {
        write!(
            csv,
            "{},{}",
            num(trace.times[k]),
            num(trace.magnon_number[k])
        )
        .unwrap();
        for q in 0..nq {
            write!(csv, ",{}", num(trace.qubit_excitation[q][k])).unwrap();
        }
        writeln!(
            csv,
            ",{},{}",
            num(trace.three_qubit_correlator[k]),
            num(trace.target_fidelity[k])
        )
        .unwrap();
    }
    ctx.write("dynamics.csv", &csv)?;

    let period = match rabi_period(&trace) {
        Ok(t) => Some(t),
        Err(Error::InsufficientSpan(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let peak = if has_cr {
        Some(ghz_fidelity_peak(&p)?)
    } else {
        None
    };
    ctx.write_json(
        "dynamics_summary.json",
        &DynamicsSummary {
            omega0: p.omega0,
            period,
            t_star: peak.map(|pk| pk.t_star),
            fidelity: peak.map(|pk| pk.fidelity),
            geff,
        },
    )
}

#[derive(Serialize)]
struct FamilyRecord {
    a_c: f64,
    b_d: f64,
    e: f64,
    f: f64,
    g: f64,
}

impl From<FifthOrderFamilies> for FamilyRecord {
    fn from(f: FifthOrderFamilies) -> Self {
        Self {
            a_c: f.a_c,
            b_d: f.b_d,
            e: f.e,
            f: f.f,
            g: f.g,
        }
    }
}

#[derive(Serialize)]
struct PertRecord {
    omega0: f64,
    g3: f64,
    /// Resonance quantities below exist for identical qubits only.
    g5_families: Option<FamilyRecord>,
    g5: Option<f64>,
    g3_shifted: Option<f64>,
    total: Option<f64>,
    omega0_crossing: Option<f64>,
}

pub fn pert(ctx: &Context) -> CliResult {
    let p = ctx.params()?;
    if p.n_qubits() != 3 {
        return Err(Error::Config("pert needs model.n_qubits = 3".into()).into());
    }
    let q = &p.qubits;
    let inp = PertInputs {
        omega0: p.omega0,
        omega_q: [q[0].omega_q, q[1].omega_q, q[2].omega_q],
        g_r: [q[0].g_r, q[1].g_r, q[2].g_r],
        g_cr: [q[0].g_cr, q[1].g_cr, q[2].g_cr],
    };
    inp.validate()?;
    let g3 = geff3_general(&inp)?;
    let mut rec = PertRecord {
        omega0: p.omega0,
        g3,
        g5_families: None,
        g5: None,
        g3_shifted: None,
        total: None,
        omega0_crossing: None,
    };
    if inp.is_identical() {
        let (wq, g_r, g_cr) = (inp.omega_q[0], inp.g_r[0], inp.g_cr[0]);
        let families = geff5_diagrams(
            &PertInputs::resonant(g_r, g_cr, wq),
            FifthOrderMode::Anchored,
        )?;
        rec.g5_families = Some(families.into());
        rec.g5 = Some(geff5_identical_resonance(g_r, g_cr, wq)?);
        rec.g3_shifted = Some(geff3_shifted(g_r, g_cr, wq)?);
        rec.total = Some(geff_total_resonance(g_r, g_cr, wq)?);
        rec.omega0_crossing = Some(magqrm_core::crossing_shift(g_r, g_cr, wq)?);
    }
    ctx.write_json("pert.json", &rec)
}

#[derive(Serialize)]
struct Coefficients {
    c1: f64,
    c2: f64,
}

#[derive(Serialize)]
struct FitRecord {
    c1: f64,
    c2: f64,
    residual: f64,
    reference: Coefficients,
    perturbative: Coefficients,
    points: Vec<GeffPoint>,
    skipped: Vec<SkippedPoint>,
}

const DEFAULT_FIT_GRID: [f64; 4] = [0.06, 0.08, 0.10, 0.12];

pub fn fit(ctx: &Context) -> CliResult {
    let p = ctx.params()?;
    let wq = p.mean_omega_q();
    let grid = |g: &Option<Vec<magqrm_core::Energy>>| -> CliResult<Vec<f64>> {
        match g {
            Some(v) => Ok(v
                .iter()
                .map(|e| ctx.cfg.to_wq(*e))
                .collect::<Result<_, _>>()?),
            None => Ok(DEFAULT_FIT_GRID.iter().map(|g| g * wq).collect()),
        }
    };
    let gr = grid(&ctx.cfg.run.gr_grid)?;
    let gcr = grid(&ctx.cfg.run.gcr_grid)?;
    let fit = fit_geff_surface_with(&p, &gr, &gcr, &ctx.gap_options()?)?;
    ctx.write_json(
        "fit.json",
        &FitRecord {
            c1: fit.c1,
            c2: fit.c2,
            residual: fit.residual,
            reference: Coefficients {
                c1: REFERENCE_FIT.0,
                c2: REFERENCE_FIT.1,
            },
            perturbative: Coefficients {
                c1: PERTURBATIVE_FIT.0,
                c2: PERTURBATIVE_FIT.1,
            },
            points: fit.points,
            skipped: fit.skipped,
        },
    )
}

#[derive(Serialize)]
struct EstimateRecord {
    units: &'static str,
    a: f64,
    b: f64,
    omega0: f64,
    r: f64,
    g: f64,
    g_r: f64,
    g_cr: f64,
    delta_omega_q: f64,
    mode_spacing: f64,
    single_mode_ok: bool,
    /// `g` as a frequency `E/h`.
    g_ghz: f64,
    /// `g` as an angular frequency `E/ħ`, in 10⁹ rad/s.
    g_angular_ghz: f64,
    assumptions: Vec<String>,
}

pub fn estimate(ctx: &Context) -> CliResult {
    let m = ctx.cfg.material_params()?;
    let iface = ctx.cfg.interface_params()?;
    let linear_size = ctx.cfg.material()?.linear_size;
    let est = estimate_model(&m, &iface, linear_size)?;
    let g_ghz = est.g * MEV_IN_GHZ;
    let assumptions = vec![
        format!("spin S = {}", m.spin),
        format!("interfacial sites N_int = {}", iface.n_int),
        format!("qubit density per interfacial site |psi|^2 = {}", iface.psi2),
        format!("ferromagnet sites N_F = {}", m.n_sites),
        format!("cube edge L = {linear_size} sites, lattice constant {}", m.lattice_constant),
        format!("1 meV = {MEV_IN_GHZ} GHz (E/h); angular values are 2*pi times larger"),
        "single-mode check: nearest finite-size mode at least 5 max(g_R, g_CR) above the uniform mode".into(),
    ];
    ctx.write_json(
        "estimate.json",
        &EstimateRecord {
            units: "meV",
            a: est.a,
            b: est.b,
            omega0: est.omega0,
            r: est.r,
            g: est.g,
            g_r: est.g_r,
            g_cr: est.g_cr,
            delta_omega_q: est.delta_omega_q,
            mode_spacing: est.mode_spacing,
            single_mode_ok: est.single_mode_ok,
            g_ghz,
            g_angular_ghz: 2.0 * std::f64::consts::PI * g_ghz,
            assumptions,
        },
    )
}
