//! Electro-optic detuning, chaotic phase accumulation, Welch power spectra
//! and the correction factor
//!
//! ```text
//! M = exp[-π ∫_{ω_l}^{ω_u} S(ω) / ω² dω]
//! ```
//!
//! Spectra are one-sided in angular frequency and normalized so that
//! `∫_0^∞ S(ω) dω` equals the variance of the signal.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Transverse electro-optic modulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EomParams {
    /// Optical carrier angular frequency (rad/s).
    pub carrier_angular_frequency: f64,
    pub refractive_index: f64,
    /// Electro-optic coefficient (m/V).
    pub electro_optic_coefficient: f64,
    /// Crystal length (m).
    pub length: f64,
    /// Crystal thickness across which the voltage is applied (m).
    pub thickness: f64,
    /// Optical round-trip time through the crystal (s).
    pub round_trip_time: f64,
}

impl Default for EomParams {
    /// 1550 nm carrier through a 2 cm lithium-niobate crystal with a 30 µm
    /// electrode gap; gain about -3.0e9 rad/(s V).
    fn default() -> Self {
        Self {
            carrier_angular_frequency: 2.0 * PI * SPEED_OF_LIGHT / 1550e-9,
            refractive_index: 2.2,
            electro_optic_coefficient: 30.8e-12,
            length: 0.02,
            thickness: 30e-6,
            round_trip_time: 2.93e-10,
        }
    }
}

impl EomParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("carrier_angular_frequency", self.carrier_angular_frequency),
            ("refractive_index", self.refractive_index),
            ("electro_optic_coefficient", self.electro_optic_coefficient),
            ("length", self.length),
            ("thickness", self.thickness),
            ("round_trip_time", self.round_trip_time),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("EOM {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Phase per volt, `β / V = ω n³ r L / (c d)` (rad/V).
    pub fn phase_per_volt(&self) -> f64 {
        self.carrier_angular_frequency * self.refractive_index.powi(3) * self.electro_optic_coefficient
            * self.length
            / (SPEED_OF_LIGHT * self.thickness)
    }

    /// Detuning per volt, `κ = -(β/V) / τ` (rad/(s V)).
    pub fn gain(&self) -> f64 {
        -self.phase_per_volt() / self.round_trip_time
    }
}

/// Uniformly sampled detuning δ(t) in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalTrace {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SignalTrace {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample at index {k}")));
        }
        Ok(Self { dt, values })
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.values.len() as f64
    }

    /// Copy with the sample mean removed.
    pub fn demeaned(&self) -> Self {
        let m = self.mean();
        Self {
            dt: self.dt,
            values: self.values.iter().map(|v| v - m).collect(),
        }
    }

    /// CSV with header `t,delta`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,delta")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{:?},{:?}", k as f64 * self.dt, v)?;
        }
        Ok(())
    }
}

/// Accumulated phase θ(t) in rad, with θ(0) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub dt: f64,
    pub values: Vec<f64>,
}

/// `δ(t) = κ V(t)` with the EOM gain κ.
pub fn detuning_from_voltage(voltage: &[f64], dt: f64, eom: &EomParams) -> Result<SignalTrace> {
    eom.validate()?;
    let k = eom.gain();
    SignalTrace::new(dt, voltage.iter().map(|v| k * v).collect())
}

/// Cumulative trapezoidal integral of δ.
pub fn accumulate_phase(s: &SignalTrace) -> Result<PhaseTrace> {
    if s.values.len() < 2 {
        return Err(Error::Config("phase accumulation needs at least two samples".into()));
    }
    let half = 0.5 * s.dt;
    let mut values = Vec::with_capacity(s.values.len());
    let mut theta = 0.0;
    values.push(theta);
    for w in s.values.windows(2) {
        theta += half * (w[0] + w[1]);
        values.push(theta);
    }
    Ok(PhaseTrace { dt: s.dt, values })
}

/// Time average of `exp(iθ)` over samples at or after `transient` seconds.
pub fn empirical_phase_average(theta: &PhaseTrace, transient: f64) -> Result<Complex64> {
    let skip = (transient / theta.dt).ceil().max(0.0) as usize;
    if skip >= theta.values.len() {
        return Err(Error::Config("transient longer than the phase trace".into()));
    }
    let tail = &theta.values[skip..];
    let sum: Complex64 = tail.iter().map(|&t| Complex64::from_polar(1.0, t)).sum();
    Ok(sum / tail.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    Hann,
    Rectangular,
}

impl Window {
    fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            // Periodic Hann, the usual choice for spectral averaging.
            Window::Hann => (0..n)
                .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos())
                .collect(),
            Window::Rectangular => vec![1.0; n],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdOptions {
    pub segment_len: usize,
    /// Fractional overlap between consecutive segments, in `[0, 1)`.
    pub overlap: f64,
    pub window: Window,
}

impl Default for PsdOptions {
    fn default() -> Self {
        Self {
            segment_len: 8192,
            overlap: 0.5,
            window: Window::Hann,
        }
    }
}

/// One-sided spectral density over ascending angular frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
}

impl PowerSpectrum {
    /// `∫ S dω` by the trapezoidal rule.
    pub fn total_power(&self) -> f64 {
        self.omega
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(w, s)| 0.5 * (w[1] - w[0]) * (s[0] + s[1]))
            .sum()
    }

    /// Angular frequency of the largest density value.
    pub fn peak_omega(&self) -> f64 {
        let k = self
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        self.omega[k]
    }

    /// Highest frequency (Hz) at which the density is within 20 dB of its
    /// peak.
    pub fn bandwidth_hz(&self) -> f64 {
        let peak = self.density.iter().copied().fold(0.0, f64::max);
        if peak <= 0.0 {
            return 0.0;
        }
        let k = self
            .density
            .iter()
            .rposition(|&s| s >= 0.01 * peak)
            .unwrap_or(0);
        self.omega[k] / (2.0 * PI)
    }

    /// CSV with header `omega_rad_s,S`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "omega_rad_s,S")?;
        for (o, s) in self.omega.iter().zip(&self.density) {
            writeln!(w, "{o:?},{s:?}")?;
        }
        Ok(())
    }
}

/// Welch averaged-periodogram estimate. The whole-trace mean is removed
/// first; each segment is windowed, transformed and averaged.
pub fn estimate_psd(s: &SignalTrace, opts: &PsdOptions) -> Result<PowerSpectrum> {
    let n = opts.segment_len;
    if n < 2 {
        return Err(Error::Config(format!("segment length must be >= 2, got {n}")));
    }
    if !(0.0..1.0).contains(&opts.overlap) {
        return Err(Error::Config(format!("overlap must lie in [0, 1), got {}", opts.overlap)));
    }
    if s.values.len() < n {
        return Err(Error::Config(format!(
            "trace of {} samples shorter than segment length {n}",
            s.values.len()
        )));
    }
    let hop = ((n as f64) * (1.0 - opts.overlap)).round().max(1.0) as usize;
    let mean = s.mean();
    let window = opts.window.coefficients(n);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);

    let bins = n / 2 + 1;
    let mut acc = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut segments = 0usize;
    let mut start = 0;
    while start + n <= s.values.len() {
        for ((b, &x), &w) in buf.iter_mut().zip(&s.values[start..start + n]).zip(&window) {
            *b = Complex64::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    // Density per Hz: |X|² / (fs Σw²), doubled off DC and Nyquist; then per
    // rad/s by dividing by 2π.
    let fs = 1.0 / s.dt;
    let scale = 1.0 / (segments as f64 * fs * window_power * 2.0 * PI);
    let density = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let one_sided = if k == 0 || (n % 2 == 0 && k == n / 2) { 1.0 } else { 2.0 };
            a * scale * one_sided
        })
        .collect();
    let omega = (0..bins).map(|k| 2.0 * PI * k as f64 * fs / n as f64).collect();
    Ok(PowerSpectrum { omega, density })
}

/// Integration band `[ω_l, ω_u]` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

impl Band {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0) {
            return Err(Error::Domain(format!(
                "lower band edge must be positive (1/ω² is singular at 0), got {lower}"
            )));
        }
        if !(upper > lower && upper.is_finite()) {
            return Err(Error::Domain(format!("need lower < upper, got [{lower}, {upper}]")));
        }
        Ok(Self { lower, upper })
    }

    /// `[2π·lo·bw, 2π·hi·bw]` for a bandwidth `bw` in Hz.
    pub fn from_bandwidth(bandwidth_hz: f64, lower_fraction: f64, upper_fraction: f64) -> Result<Self> {
        Self::new(
            2.0 * PI * lower_fraction * bandwidth_hz,
            2.0 * PI * upper_fraction * bandwidth_hz,
        )
    }
}

fn interpolate(omega: &[f64], density: &[f64], w: f64) -> f64 {
    let k = omega.partition_point(|&o| o <= w);
    if k == 0 {
        return density[0];
    }
    if k >= omega.len() {
        return density[omega.len() - 1];
    }
    let (w0, w1) = (omega[k - 1], omega[k]);
    let t = (w - w0) / (w1 - w0);
    density[k - 1] * (1.0 - t) + density[k] * t
}

/// `∫_{ω_l}^{ω_u} S(ω)/ω² dω` by the trapezoidal rule on the spectrum grid,
/// with the density linearly interpolated at the band edges.
pub fn phase_noise_integral(spec: &PowerSpectrum, band: &Band) -> Result<f64> {
    if band.lower <= 0.0 {
        return Err(Error::Domain("lower band edge must be positive".into()));
    }
    let (first, last) = match (spec.omega.first(), spec.omega.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(Error::Config("empty spectrum".into())),
    };
    if band.lower < first || band.upper > last {
        return Err(Error::Domain(format!(
            "band [{:e}, {:e}] outside spectrum support [{first:e}, {last:e}]",
            band.lower, band.upper
        )));
    }
    let mut nodes = vec![(band.lower, interpolate(&spec.omega, &spec.density, band.lower))];
    for (&o, &s) in spec.omega.iter().zip(&spec.density) {
        if o > band.lower && o < band.upper {
            nodes.push((o, s));
        }
    }
    nodes.push((band.upper, interpolate(&spec.omega, &spec.density, band.upper)));
    Ok(nodes
        .windows(2)
        .map(|w| {
            let (a, sa) = w[0];
            let (b, sb) = w[1];
            0.5 * (b - a) * (sa / (a * a) + sb / (b * b))
        })
        .sum())
}

/// Correction factor `M = exp(-π ∫ S/ω² dω)` over `band`, in `(0, 1]`.
pub fn correction_factor(spec: &PowerSpectrum, band: &Band) -> Result<f64> {
    let integral = phase_noise_integral(spec, band)?;
    Ok((-PI * integral).exp().clamp(f64::MIN_POSITIVE, 1.0))
}
