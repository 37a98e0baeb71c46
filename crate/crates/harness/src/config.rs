//! Experiment configuration. Every key that carries a physical quantity
//! names its unit; missing keys take the defaults below.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use qcdma_core::chaos::{CircuitParams, Transistor, REFERENCE_BANDWIDTH_HZ};
use qcdma_core::entangle::MeasurementModel;
use qcdma_core::spectral::{EomParams, PsdOptions, Window};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TransistorConfig {
    PiecewiseLinear,
    Exponential {
        saturation_current_a: f64,
        thermal_voltage_v: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitConfig {
    pub resistance_ohm: f64,
    pub inductance_h: f64,
    pub c1_f: f64,
    pub c2_f: f64,
    pub vcc_v: f64,
    pub bias_current_a: f64,
    pub threshold_v: f64,
    pub on_conductance_s: f64,
    pub transistor: TransistorConfig,
    /// Bandwidth attributed to these component values.
    pub reference_bandwidth_hz: f64,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        let p = CircuitParams::default();
        Self {
            resistance_ohm: p.resistance,
            inductance_h: p.inductance,
            c1_f: p.c1,
            c2_f: p.c2,
            vcc_v: p.vcc,
            bias_current_a: p.bias_current,
            threshold_v: p.threshold,
            on_conductance_s: p.on_conductance,
            transistor: TransistorConfig::PiecewiseLinear,
            reference_bandwidth_hz: REFERENCE_BANDWIDTH_HZ,
        }
    }
}

impl CircuitConfig {
    pub fn params(&self) -> CircuitParams {
        CircuitParams {
            resistance: self.resistance_ohm,
            inductance: self.inductance_h,
            c1: self.c1_f,
            c2: self.c2_f,
            vcc: self.vcc_v,
            bias_current: self.bias_current_a,
            threshold: self.threshold_v,
            on_conductance: self.on_conductance_s,
            transistor: match self.transistor {
                TransistorConfig::PiecewiseLinear => Transistor::PiecewiseLinear,
                TransistorConfig::Exponential {
                    saturation_current_a,
                    thermal_voltage_v,
                } => Transistor::Exponential {
                    saturation_current: saturation_current_a,
                    thermal_voltage: thermal_voltage_v,
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EomConfig {
    pub carrier_angular_frequency_rad_s: f64,
    pub refractive_index: f64,
    pub electro_optic_coefficient_m_per_v: f64,
    pub length_m: f64,
    pub thickness_m: f64,
    pub round_trip_time_s: f64,
    /// Per-channel gains overriding the one derived from the crystal.
    pub gain_override_rad_per_s_v: Option<[f64; 2]>,
}

impl Default for EomConfig {
    fn default() -> Self {
        let e = EomParams::default();
        Self {
            carrier_angular_frequency_rad_s: e.carrier_angular_frequency,
            refractive_index: e.refractive_index,
            electro_optic_coefficient_m_per_v: e.electro_optic_coefficient,
            length_m: e.length,
            thickness_m: e.thickness,
            round_trip_time_s: e.round_trip_time,
            gain_override_rad_per_s_v: None,
        }
    }
}

impl EomConfig {
    pub fn params(&self) -> EomParams {
        EomParams {
            carrier_angular_frequency: self.carrier_angular_frequency_rad_s,
            refractive_index: self.refractive_index,
            electro_optic_coefficient: self.electro_optic_coefficient_m_per_v,
            length: self.length_m,
            thickness: self.thickness_m,
            round_trip_time: self.round_trip_time_s,
        }
    }

    /// Gain of channel 0 or 1 in rad/(s V).
    pub fn gain(&self, channel: usize) -> f64 {
        match self.gain_override_rad_per_s_v {
            Some(g) => g[channel],
            None => self.params().gain(),
        }
    }
}

/// Integration band for the correction factor, as fractions of the nominal
/// bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandConfig {
    pub lower_fraction: f64,
    pub upper_fraction: f64,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            lower_fraction: 0.05,
            upper_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsdConfig {
    pub segment_samples: usize,
    pub overlap_fraction: f64,
    pub window: Window,
}

impl Default for PsdConfig {
    fn default() -> Self {
        let o = PsdOptions::default();
        Self {
            segment_samples: o.segment_len,
            overlap_fraction: o.overlap,
            window: o.window,
        }
    }
}

impl PsdConfig {
    pub fn options(&self) -> PsdOptions {
        PsdOptions {
            segment_len: self.segment_samples,
            overlap: self.overlap_fraction,
            window: self.window,
        }
    }
}

/// Simulation lengths in periods of the linear resonance of the circuit at
/// hand, so they scale with bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub steps_per_period: f64,
    pub transient_periods: f64,
    pub record_periods: f64,
    pub lyapunov_periods: f64,
    pub reorthonormalize_every_steps: usize,
    /// Samples of the phase-portrait excerpts.
    pub portrait_samples: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            steps_per_period: 200.0,
            transient_periods: 1000.0,
            record_periods: 10000.0,
            lyapunov_periods: 20000.0,
            reorthonormalize_every_steps: 10,
            portrait_samples: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyncConfig {
    pub duration_s: f64,
    pub transient_s: f64,
    /// Receiver start relative to the transmitter: `[v_c2 (V), i_l (A)]`.
    pub receiver_offset: [f64; 2],
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self {
            duration_s: 400e-9,
            transient_s: 100e-9,
            receiver_offset: [1.5, -0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub fig4_bandwidth_hz: Vec<f64>,
    pub fig5_m: Vec<f64>,
    pub fig5_n_bar: Vec<f64>,
    pub fig5_bandwidth_hz: Vec<f64>,
    pub fig6_eta: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            fig4_bandwidth_hz: (1..=12).map(|k| k as f64 * 50e6).collect(),
            fig5_m: vec![0.0, 1e-4, 1e-3, 0.01, 0.03, 0.1, 0.2, 0.4, 0.7, 1.0],
            fig5_n_bar: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            fig5_bandwidth_hz: vec![300e6, 400e6, 450e6, 500e6, 600e6, 800e6],
            fig6_eta: (0..10).map(|k| k as f64 / 10.0).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub circuit: CircuitConfig,
    /// Target bandwidth for single-circuit scenarios.
    pub bandwidth_hz: f64,
    pub eom: EomConfig,
    pub band: BandConfig,
    pub psd: PsdConfig,
    pub simulation: SimulationConfig,
    pub sync: SyncConfig,
    pub n_bar: f64,
    pub phi_rad: f64,
    pub eta: f64,
    /// Correction factors used where no circuit is simulated.
    pub m1: f64,
    pub m2: f64,
    pub measurement_model: MeasurementModel,
    pub seed: u64,
    pub grids: Grids,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            circuit: CircuitConfig::default(),
            bandwidth_hz: REFERENCE_BANDWIDTH_HZ,
            eom: EomConfig::default(),
            band: BandConfig::default(),
            psd: PsdConfig::default(),
            simulation: SimulationConfig::default(),
            sync: SyncConfig::default(),
            n_bar: 10.0,
            phi_rad: PI / 3.0,
            eta: 0.0,
            m1: 0.0,
            m2: 0.0,
            measurement_model: MeasurementModel::CoherentProjection,
            seed: 0,
            grids: Grids::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(bad(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn grid(name: &str, g: &[f64], check: impl Fn(f64) -> bool) -> Result<()> {
    if g.is_empty() {
        return Err(bad(format!("grid {name} is empty")));
    }
    if let Some(v) = g.iter().find(|&&v| !check(v)) {
        return Err(bad(format!("grid {name} has invalid entry {v}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.circuit.params().validate().map_err(|e| bad(e.to_string()))?;
        positive("circuit.reference_bandwidth_hz", self.circuit.reference_bandwidth_hz)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        self.eom.params().validate().map_err(|e| bad(e.to_string()))?;
        if let Some(g) = self.eom.gain_override_rad_per_s_v {
            if g.iter().any(|v| !v.is_finite()) {
                return Err(bad("gain override must be finite"));
            }
        }
        let b = &self.band;
        if !(b.lower_fraction > 0.0 && b.upper_fraction > b.lower_fraction && b.upper_fraction.is_finite()) {
            return Err(bad(format!(
                "band fractions must satisfy 0 < lower < upper, got [{}, {}]",
                b.lower_fraction, b.upper_fraction
            )));
        }
        if self.psd.segment_samples < 16 || !(0.0..1.0).contains(&self.psd.overlap_fraction) {
            return Err(bad("psd needs segment_samples >= 16 and overlap_fraction in [0, 1)"));
        }
        let s = &self.simulation;
        if !(s.steps_per_period >= 100.0 && s.steps_per_period.is_finite()) {
            return Err(bad("simulation.steps_per_period must be >= 100"));
        }
        if !(s.transient_periods >= 0.0) {
            return Err(bad("simulation.transient_periods must be >= 0"));
        }
        positive("simulation.record_periods", s.record_periods)?;
        positive("simulation.lyapunov_periods", s.lyapunov_periods)?;
        if s.reorthonormalize_every_steps == 0 || s.portrait_samples == 0 {
            return Err(bad("simulation step counts must be >= 1"));
        }
        if (s.record_periods * s.steps_per_period) < self.psd.segment_samples as f64 {
            return Err(bad("record shorter than one PSD segment"));
        }
        positive("sync.duration_s", self.sync.duration_s)?;
        if !(self.sync.transient_s >= 0.0 && self.sync.transient_s < self.sync.duration_s) {
            return Err(bad("sync.transient_s must lie in [0, duration_s)"));
        }
        positive("n_bar", self.n_bar)?;
        if !(self.phi_rad > 0.0 && self.phi_rad < PI) {
            return Err(bad(format!("phi_rad must lie in (0, π), got {}", self.phi_rad)));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(bad(format!("eta must lie in [0, 1), got {}", self.eta)));
        }
        for (n, m) in [("m1", self.m1), ("m2", self.m2)] {
            if !(0.0..=1.0).contains(&m) {
                return Err(bad(format!("{n} must lie in [0, 1], got {m}")));
            }
        }
        let g = &self.grids;
        grid("fig4_bandwidth_hz", &g.fig4_bandwidth_hz, |v| v > 0.0 && v.is_finite())?;
        grid("fig5_m", &g.fig5_m, |v| (0.0..=1.0).contains(&v))?;
        grid("fig5_n_bar", &g.fig5_n_bar, |v| v > 0.0 && v.is_finite())?;
        grid("fig5_bandwidth_hz", &g.fig5_bandwidth_hz, |v| v > 0.0 && v.is_finite())?;
        grid("fig6_eta", &g.fig6_eta, |v| (0.0..1.0).contains(&v))?;
        Ok(())
    }
}
