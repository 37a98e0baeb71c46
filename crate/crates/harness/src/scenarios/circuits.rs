use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qcdma_core::chaos::{
    advance, integrate, integrate_visit, lyapunov_spectrum, scale_to_bandwidth, CircuitParams,
    LyapunovOptions,
};
use qcdma_core::spectral::{
    accumulate_phase, correction_factor, empirical_phase_average, estimate_psd, Band,
    PowerSpectrum, SignalTrace,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{write_raw_csv, write_table};
use crate::seeds::initial_state;

/// Bandwidths at which phase portraits and spectra are emitted.
pub const PORTRAIT_BANDWIDTHS_HZ: [f64; 2] = [100e6, 500e6];

pub fn circuit_at(cfg: &ExperimentConfig, bandwidth_hz: f64) -> Result<CircuitParams> {
    let p = scale_to_bandwidth(&cfg.circuit.params(), cfg.circuit.reference_bandwidth_hz, bandwidth_hz)?;
    p.validate()?;
    Ok(p)
}

pub fn step_for(cfg: &ExperimentConfig, p: &CircuitParams) -> f64 {
    1.0 / (cfg.simulation.steps_per_period * p.resonance_frequency())
}

pub fn steps(cfg: &ExperimentConfig, periods: f64) -> usize {
    (periods * cfg.simulation.steps_per_period).round() as usize
}

/// One chaotic phase shifter simulated at one bandwidth.
#[derive(Debug, Clone)]
pub struct ChannelRun {
    pub dt: f64,
    pub spectrum: PowerSpectrum,
    pub m: f64,
    /// `|⟨e^{iθ}⟩|` over the recorded window.
    pub phase_average: f64,
    pub measured_bandwidth_hz: f64,
}

pub fn channel_run(cfg: &ExperimentConfig, bandwidth_hz: f64, channel: usize) -> Result<ChannelRun> {
    let p = circuit_at(cfg, bandwidth_hz)?;
    let dt = step_for(cfg, &p);
    let start = initial_state(&p, cfg.seed, channel as u64);
    let warm = advance(&p, start, dt, steps(cfg, cfg.simulation.transient_periods))?;
    let n = steps(cfg, cfg.simulation.record_periods);
    let gain = cfg.eom.gain(channel);
    let mut delta = Vec::with_capacity(n);
    integrate_visit(&p, warm, dt, n - 1, |_, s| delta.push(gain * s.v_c2))?;
    let trace = SignalTrace::new(dt, delta)?;

    let spectrum = estimate_psd(&trace, &cfg.psd.options())?;
    let band = Band::from_bandwidth(bandwidth_hz, cfg.band.lower_fraction, cfg.band.upper_fraction)?;
    let m = correction_factor(&spectrum, &band)?;
    let theta = accumulate_phase(&trace.demeaned())?;
    let phase_average = empirical_phase_average(&theta, 0.0)?.norm();
    let measured_bandwidth_hz = spectrum.bandwidth_hz();
    Ok(ChannelRun {
        dt,
        spectrum,
        m,
        phase_average,
        measured_bandwidth_hz,
    })
}

/// Largest Lyapunov exponent of channel 0 (1/s).
pub fn largest_exponent(cfg: &ExperimentConfig, bandwidth_hz: f64) -> Result<f64> {
    let p = circuit_at(cfg, bandwidth_hz)?;
    let period = 1.0 / p.resonance_frequency();
    let opts = LyapunovOptions {
        dt: step_for(cfg, &p),
        transient: cfg.simulation.transient_periods * period,
        duration: cfg.simulation.lyapunov_periods * period,
        reorthonormalize_every: cfg.simulation.reorthonormalize_every_steps,
    };
    Ok(lyapunov_spectrum(&p, initial_state(&p, cfg.seed, 0), &opts)?[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Row {
    pub bandwidth_hz: f64,
    pub m1: f64,
    pub m2: f64,
    pub m: f64,
    pub lambda_max: f64,
    pub phase_average_1: f64,
    pub phase_average_2: f64,
    pub measured_bandwidth_1_hz: f64,
    pub measured_bandwidth_2_hz: f64,
}

impl Fig4Row {
    pub const COLUMNS: [&'static str; 10] = [
        "bandwidth_hz",
        "m1",
        "m2",
        "m",
        "lambda_max_per_s",
        "lambda_over_2pi_bw",
        "phase_average_1",
        "phase_average_2",
        "measured_bandwidth_1_hz",
        "measured_bandwidth_2_hz",
    ];

    fn values(&self) -> Vec<f64> {
        vec![
            self.bandwidth_hz,
            self.m1,
            self.m2,
            self.m,
            self.lambda_max,
            self.lambda_max / (2.0 * PI * self.bandwidth_hz),
            self.phase_average_1,
            self.phase_average_2,
            self.measured_bandwidth_1_hz,
            self.measured_bandwidth_2_hz,
        ]
    }
}

pub fn fig4_row(cfg: &ExperimentConfig, bandwidth_hz: f64) -> Result<Fig4Row> {
    let a = channel_run(cfg, bandwidth_hz, 0)?;
    let b = channel_run(cfg, bandwidth_hz, 1)?;
    Ok(Fig4Row {
        bandwidth_hz,
        m1: a.m,
        m2: b.m,
        m: a.m.sqrt() * b.m.sqrt(),
        lambda_max: largest_exponent(cfg, bandwidth_hz)?,
        phase_average_1: a.phase_average,
        phase_average_2: b.phase_average,
        measured_bandwidth_1_hz: a.measured_bandwidth_hz,
        measured_bandwidth_2_hz: b.measured_bandwidth_hz,
    })
}

pub struct Portrait {
    pub bandwidth_hz: f64,
    pub trajectory_csv: String,
    pub spectrum_csv: String,
}

fn portrait(cfg: &ExperimentConfig, bandwidth_hz: f64) -> Result<Portrait> {
    let p = circuit_at(cfg, bandwidth_hz)?;
    let dt = step_for(cfg, &p);
    let start = initial_state(&p, cfg.seed, 0);
    let warm = advance(&p, start, dt, steps(cfg, cfg.simulation.transient_periods))?;
    let traj = integrate(&p, warm, dt, cfg.simulation.portrait_samples - 1)?;
    let mut trajectory_csv = Vec::new();
    traj.write_csv(&mut trajectory_csv).expect("in-memory write");
    let mut spectrum_csv = Vec::new();
    channel_run(cfg, bandwidth_hz, 0)?
        .spectrum
        .write_csv(&mut spectrum_csv)
        .expect("in-memory write");
    Ok(Portrait {
        bandwidth_hz,
        trajectory_csv: String::from_utf8(trajectory_csv).expect("ascii"),
        spectrum_csv: String::from_utf8(spectrum_csv).expect("ascii"),
    })
}

pub struct Fig4Data {
    pub rows: Vec<Fig4Row>,
    pub portraits: Vec<Portrait>,
}

pub fn fig4_data(cfg: &ExperimentConfig) -> Result<Fig4Data> {
    let rows = cfg
        .grids
        .fig4_bandwidth_hz
        .par_iter()
        .map(|&bw| fig4_row(cfg, bw))
        .collect::<Result<Vec<_>>>()?;
    let portraits = PORTRAIT_BANDWIDTHS_HZ
        .par_iter()
        .map(|&bw| portrait(cfg, bw))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig4Data { rows, portraits })
}

pub fn run_fig4(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let data = fig4_data(cfg)?;
    let rows: Vec<Vec<f64>> = data.rows.iter().map(Fig4Row::values).collect();
    let mut files = write_table(out, "fig4", "fig4", &Fig4Row::COLUMNS, &rows, cfg, json!(null))?;
    for p in &data.portraits {
        let tag = format!("{}mhz", (p.bandwidth_hz / 1e6).round());
        let lines = |s: &str| s.lines().count().saturating_sub(1);
        let note = json!({ "bandwidth_hz": p.bandwidth_hz, "channel": 0 });
        files.extend(write_raw_csv(
            out,
            &format!("fig4_portrait_{tag}"),
            "fig4",
            &["t", "v_c1", "v_c2", "i_l"],
            lines(&p.trajectory_csv),
            &p.trajectory_csv,
            cfg,
            note.clone(),
        )?);
        files.extend(write_raw_csv(
            out,
            &format!("fig4_spectrum_{tag}"),
            "fig4",
            &["omega_rad_s", "S"],
            lines(&p.spectrum_csv),
            &p.spectrum_csv,
            cfg,
            note,
        )?);
    }
    Ok(files)
}
