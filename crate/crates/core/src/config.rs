//! TOML run configuration. Every energy is a string carrying its unit:
//! `"0.1 wq"` (multiples of the qubit splitting), `"5 GHz"` (E/h) or
//! `"0.02 meV"`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::BasisLabel;
use crate::model::{InterfaceParams, MaterialParams, ModelParams, QubitParams, MEV_IN_GHZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyUnit {
    QubitSplitting,
    GHz,
    MeV,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Energy {
    pub value: f64,
    pub unit: EnergyUnit,
}

impl Energy {
    pub fn wq(value: f64) -> Self {
        Self {
            value,
            unit: EnergyUnit::QubitSplitting,
        }
    }

    /// Absolute value in meV, if the unit is absolute.
    pub fn to_mev(self) -> Option<f64> {
        match self.unit {
            EnergyUnit::QubitSplitting => None,
            EnergyUnit::GHz => Some(self.value / MEV_IN_GHZ),
            EnergyUnit::MeV => Some(self.value),
        }
    }

    /// Value in units of the qubit splitting `omega_q`.
    pub fn in_units_of(self, omega_q: Energy) -> Result<f64> {
        match (self.unit, omega_q.unit) {
            (EnergyUnit::QubitSplitting, EnergyUnit::QubitSplitting) => {
                Ok(self.value / omega_q.value)
            }
            (EnergyUnit::QubitSplitting, _) => Ok(self.value),
            (_, EnergyUnit::QubitSplitting) => Err(Error::Config(format!(
                "energy {self} needs an absolute qubit splitting (omega_q given as {omega_q})"
            ))),
            _ => Ok(self.to_mev().unwrap() / omega_q.to_mev().unwrap()),
        }
    }
}

impl FromStr for Energy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let (Some(v), Some(u), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Config(format!(
                "energy {s:?} must look like \"<value> <wq|GHz|meV>\""
            )));
        };
        let value: f64 = v
            .parse()
            .map_err(|_| Error::Config(format!("energy {s:?}: {v:?} is not a number")))?;
        if !value.is_finite() {
            return Err(Error::Config(format!("energy {s:?} is not finite")));
        }
        let unit = match u {
            "wq" => EnergyUnit::QubitSplitting,
            "GHz" => EnergyUnit::GHz,
            "meV" => EnergyUnit::MeV,
            other => {
                return Err(Error::Config(format!(
                    "energy {s:?}: unknown unit {other:?}"
                )))
            }
        };
        Ok(Self { value, unit })
    }
}

impl TryFrom<String> for Energy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Energy> for String {
    fn from(e: Energy) -> String {
        e.to_string()
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = match self.unit {
            EnergyUnit::QubitSplitting => "wq",
            EnergyUnit::GHz => "GHz",
            EnergyUnit::MeV => "meV",
        };
        write!(f, "{} {unit}", self.value)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: Option<MaterialConfig>,
    pub coupling: Option<CouplingConfig>,
    pub model: Option<ModelConfig>,
    #[serde(default)]
    pub run: RunOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub exchange: Energy,
    pub spin: f64,
    pub k_x: Energy,
    pub k_y: Energy,
    pub k_z: Energy,
    pub zeeman: Energy,
    #[serde(default = "one")]
    pub lattice_constant: f64,
    pub n_sites: u64,
    /// Cube edge in lattice sites, for the mode-spacing check.
    pub linear_size: usize,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub j_int: Energy,
    pub n_int: u64,
    /// Qubit probability density per interfacial site.
    pub psi2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "three")]
    pub n_qubits: usize,
    #[serde(default = "ten")]
    pub n_max: usize,
    /// Identical qubit splitting; the reference unit.
    pub omega_q: Option<Energy>,
    /// Per-qubit splittings; the reference unit is their mean.
    pub omega_qs: Option<Vec<Energy>>,
    #[serde(default)]
    pub omega0: Option<Energy>,
    pub g_r: Energy,
    pub g_cr: Energy,
}

fn three() -> usize {
    3
}

fn ten() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    pub omega0_min: Option<Energy>,
    pub omega0_max: Option<Energy>,
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default = "default_levels")]
    pub n_levels: usize,
    /// Crossing/anticrossing threshold.
    pub threshold: Option<Energy>,
    /// Initial basis state, e.g. `"1,ggg"`.
    pub initial: Option<String>,
    /// Trace length in units of `1/ω_q`.
    pub t_max: Option<f64>,
    #[serde(default = "default_times")]
    pub n_times: usize,
    pub gr_grid: Option<Vec<Energy>>,
    pub gcr_grid: Option<Vec<Energy>>,
    #[serde(default = "yes")]
    pub check_convergence: bool,
}

fn default_points() -> usize {
    301
}

fn default_levels() -> usize {
    16
}

fn default_times() -> usize {
    crate::dynamics::DEFAULT_TIME_POINTS
}

fn yes() -> bool {
    true
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            omega0_min: None,
            omega0_max: None,
            n_points: default_points(),
            n_levels: default_levels(),
            threshold: None,
            initial: None,
            t_max: None,
            n_times: default_times(),
            gr_grid: None,
            gcr_grid: None,
            check_convergence: true,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn model(&self) -> Result<&ModelConfig> {
        self.model
            .as_ref()
            .ok_or_else(|| Error::Config("missing [model] block".into()))
    }

    pub fn material(&self) -> Result<&MaterialConfig> {
        self.material
            .as_ref()
            .ok_or_else(|| Error::Config("missing [material] block".into()))
    }

    pub fn coupling(&self) -> Result<&CouplingConfig> {
        self.coupling
            .as_ref()
            .ok_or_else(|| Error::Config("missing [coupling] block".into()))
    }

    /// Reference splitting of the model block.
    pub fn omega_q_ref(&self) -> Result<Energy> {
        let m = self.model()?;
        match (&m.omega_q, &m.omega_qs) {
            (Some(w), None) => Ok(*w),
            (None, Some(ws)) => {
                let first = *ws
                    .first()
                    .ok_or_else(|| Error::Config("model.omega_qs is empty".into()))?;
                if ws.iter().any(|w| w.unit != first.unit) {
                    return Err(Error::Config("model.omega_qs must share one unit".into()));
                }
                Ok(Energy {
                    value: ws.iter().map(|w| w.value).sum::<f64>() / ws.len() as f64,
                    unit: first.unit,
                })
            }
            (None, None) => Ok(Energy::wq(1.0)),
            (Some(_), Some(_)) => Err(Error::Config(
                "set only one of model.omega_q and model.omega_qs".into(),
            )),
        }
    }

    /// Converts an energy of the model or run block to units of `ω_q`.
    pub fn to_wq(&self, e: Energy) -> Result<f64> {
        e.in_units_of(self.omega_q_ref()?)
    }

    /// Model parameters in units of `ω_q`. `omega0` defaults to `Σ ω_q`.
    pub fn model_params(&self, n_max_override: Option<usize>) -> Result<ModelParams> {
        let m = self.model()?;
        let reference = self.omega_q_ref()?;
        let omegas: Vec<f64> = match &m.omega_qs {
            Some(ws) => {
                if ws.len() != m.n_qubits {
                    return Err(Error::Config(format!(
                        "model.omega_qs has {} entries for n_qubits = {}",
                        ws.len(),
                        m.n_qubits
                    )));
                }
                ws.iter()
                    .map(|w| w.in_units_of(reference))
                    .collect::<Result<_>>()?
            }
            None => vec![1.0; m.n_qubits],
        };
        let g_r = m.g_r.in_units_of(reference)?;
        let g_cr = m.g_cr.in_units_of(reference)?;
        let omega0 = match m.omega0 {
            Some(w) => w.in_units_of(reference)?,
            None => omegas.iter().sum(),
        };
        let qubits = omegas
            .into_iter()
            .map(|omega_q| QubitParams { omega_q, g_r, g_cr })
            .collect();
        ModelParams::new(omega0, qubits, n_max_override.unwrap_or(m.n_max))
    }

    /// Material parameters in meV.
    pub fn material_params(&self) -> Result<MaterialParams> {
        let m = self.material()?;
        let mev = |name: &str, e: Energy| {
            e.to_mev().ok_or_else(|| {
                Error::Config(format!(
                    "material.{name} needs an absolute unit (GHz or meV)"
                ))
            })
        };
        Ok(MaterialParams {
            exchange: mev("exchange", m.exchange)?,
            spin: m.spin,
            k_x: mev("k_x", m.k_x)?,
            k_y: mev("k_y", m.k_y)?,
            k_z: mev("k_z", m.k_z)?,
            zeeman: mev("zeeman", m.zeeman)?,
            lattice_constant: m.lattice_constant,
            n_sites: m.n_sites,
        })
    }

    pub fn interface_params(&self) -> Result<InterfaceParams> {
        let c = self.coupling()?;
        Ok(InterfaceParams {
            j_int: c.j_int.to_mev().ok_or_else(|| {
                Error::Config("coupling.j_int needs an absolute unit (GHz or meV)".into())
            })?,
            n_int: c.n_int,
            psi2: c.psi2,
        })
    }

    pub fn initial_state(&self) -> Result<Option<BasisLabel>> {
        self.run
            .initial
            .as_deref()
            .map(|s| {
                s.parse()
                    .map_err(|e: Error| Error::Config(format!("run.initial: {e}")))
            })
            .transpose()
    }
}
