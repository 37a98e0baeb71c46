use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Bandwidth attributed to the reference (appendix) component values.
pub const REFERENCE_BANDWIDTH_HZ: f64 = 500e6;

/// Driving-point characteristic of the transistor's base-emitter junction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Transistor {
    /// `I_E = Gon * max(0, v_be - Vth)` using the params' threshold and
    /// on-conductance.
    PiecewiseLinear,
    /// `I_E = Is * (exp(v_be / VT) - 1)`.
    Exponential {
        saturation_current: f64,
        thermal_voltage: f64,
    },
}

/// Component values of a single-transistor Colpitts oscillator with an
/// emitter current-source bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Series resistance (ohm).
    pub resistance: f64,
    /// Tank inductance (H).
    pub inductance: f64,
    /// Collector-emitter capacitance (F).
    pub c1: f64,
    /// Emitter-ground capacitance (F).
    pub c2: f64,
    /// Supply voltage (V).
    pub vcc: f64,
    /// Emitter bias current source (A).
    pub bias_current: f64,
    /// Base-emitter threshold voltage (V).
    pub threshold: f64,
    /// Forward-active on-conductance (S).
    pub on_conductance: f64,
    pub transistor: Transistor,
}

impl Default for CircuitParams {
    /// Appendix component values. The bias current and on-conductance put
    /// the piecewise-linear model just past the onset of chaos.
    fn default() -> Self {
        Self {
            resistance: 27.99,
            inductance: 17.5e-9,
            c1: 13.1e-12,
            c2: 12.7e-12,
            vcc: 15.0,
            bias_current: 0.02,
            threshold: 0.75,
            on_conductance: 0.375,
            transistor: Transistor::PiecewiseLinear,
        }
    }
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("resistance", self.resistance),
            ("inductance", self.inductance),
            ("c1", self.c1),
            ("c2", self.c2),
            ("vcc", self.vcc),
            ("bias_current", self.bias_current),
            ("on_conductance", self.on_conductance),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.threshold > 0.0 && self.threshold < self.vcc) {
            return Err(Error::Config(format!(
                "threshold must lie in (0, vcc), got {}",
                self.threshold
            )));
        }
        if let Transistor::Exponential {
            saturation_current,
            thermal_voltage,
        } = self.transistor
        {
            if !(saturation_current > 0.0 && thermal_voltage > 0.0) {
                return Err(Error::Config(
                    "exponential transistor needs positive Is and VT".into(),
                ));
            }
        }
        Ok(())
    }

    /// Series capacitance seen by the inductor.
    pub fn series_capacitance(&self) -> f64 {
        self.c1 * self.c2 / (self.c1 + self.c2)
    }

    /// Linear LC resonance `1 / (2π sqrt(L C1 C2 / (C1 + C2)))` in Hz.
    pub fn resonance_frequency(&self) -> f64 {
        1.0 / (2.0 * PI * (self.inductance * self.series_capacitance()).sqrt())
    }

    /// Default integration step, 200 samples per linear resonance period.
    pub fn default_step(&self) -> f64 {
        1.0 / (200.0 * self.resonance_frequency())
    }

    /// Emitter current and its derivative with respect to `v_c2`.
    pub(crate) fn emitter_current(&self, v_c2: f64) -> (f64, f64) {
        let v_be = -v_c2;
        match self.transistor {
            Transistor::PiecewiseLinear => {
                if v_be > self.threshold {
                    (self.on_conductance * (v_be - self.threshold), -self.on_conductance)
                } else {
                    (0.0, 0.0)
                }
            }
            Transistor::Exponential {
                saturation_current,
                thermal_voltage,
            } => {
                let e = (v_be / thermal_voltage).exp();
                (
                    saturation_current * (e - 1.0),
                    -saturation_current * e / thermal_voltage,
                )
            }
        }
    }

    /// Per-component magnitude limits outside which a trajectory counts as
    /// divergent: `|v| <= 10 Vcc`, `|i_l| <= 10 Vcc / R`.
    pub fn divergence_box(&self) -> [f64; 3] {
        let v = 10.0 * self.vcc;
        [v, v, v / self.resistance]
    }
}

/// Capacitor voltages and inductor current.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CircuitState {
    pub v_c1: f64,
    pub v_c2: f64,
    pub i_l: f64,
}

impl CircuitState {
    pub const fn new(v_c1: f64, v_c2: f64, i_l: f64) -> Self {
        Self { v_c1, v_c2, i_l }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.v_c1, self.v_c2, self.i_l]
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        Self::new(x[0], x[1], x[2])
    }

    pub fn is_finite(&self) -> bool {
        self.v_c1.is_finite() && self.v_c2.is_finite() && self.i_l.is_finite()
    }
}

/// Time derivative of a [`CircuitState`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateRate {
    pub dv_c1: f64,
    pub dv_c2: f64,
    pub di_l: f64,
}

#[inline]
pub(crate) fn field(p: &CircuitParams, x: [f64; 3]) -> [f64; 3] {
    let [v1, v2, i] = x;
    let (ie, _) = p.emitter_current(v2);
    [
        (i - ie) / p.c1,
        (i - p.bias_current) / p.c2,
        (p.vcc - v1 - v2 - p.resistance * i) / p.inductance,
    ]
}

/// Colpitts equations
///
/// ```text
/// C1 dv_c1/dt = i_l - I_E(-v_c2)
/// C2 dv_c2/dt = i_l - I0
/// L  di_l/dt  = Vcc - v_c1 - v_c2 - R i_l
/// ```
pub fn vector_field(p: &CircuitParams, s: &CircuitState) -> Result<StateRate> {
    if !s.is_finite() {
        return Err(Error::Domain(format!("non-finite state {s:?}")));
    }
    let [dv_c1, dv_c2, di_l] = field(p, s.to_array());
    Ok(StateRate { dv_c1, dv_c2, di_l })
}

/// Jacobian of the vector field, rows/cols ordered `(v_c1, v_c2, i_l)`.
pub fn jacobian(p: &CircuitParams, s: &CircuitState) -> [[f64; 3]; 3] {
    jacobian_array(p, s.to_array())
}

#[inline]
pub(crate) fn jacobian_array(p: &CircuitParams, x: [f64; 3]) -> [[f64; 3]; 3] {
    let (_, die_dv2) = p.emitter_current(x[1]);
    let l = p.inductance;
    [
        [0.0, -die_dv2 / p.c1, 1.0 / p.c1],
        [0.0, 0.0, 1.0 / p.c2],
        [-1.0 / l, -1.0 / l, -p.resistance / l],
    ]
}

/// Operating point where the vector field vanishes: `i_l = I0`,
/// `I_E(-v_c2) = I0`, `v_c1 = Vcc - v_c2 - R I0`.
pub fn equilibrium(p: &CircuitParams) -> CircuitState {
    let v_be = match p.transistor {
        Transistor::PiecewiseLinear => p.threshold + p.bias_current / p.on_conductance,
        Transistor::Exponential {
            saturation_current,
            thermal_voltage,
        } => thermal_voltage * (1.0 + p.bias_current / saturation_current).ln(),
    };
    let v_c2 = -v_be;
    CircuitState::new(p.vcc - v_c2 - p.resistance * p.bias_current, v_c2, p.bias_current)
}

/// Rescales the circuit from `reference_bw` to `target_bw` by multiplying
/// `L`, `C1` and `C2` by `reference_bw / target_bw`. Impedances are kept, so
/// the dynamics only change by a time rescaling and every frequency moves in
/// proportion to `target_bw`.
pub fn scale_to_bandwidth(
    p: &CircuitParams,
    reference_bw: f64,
    target_bw: f64,
) -> Result<CircuitParams> {
    if !(target_bw > 0.0 && target_bw.is_finite()) {
        return Err(Error::Config(format!("target bandwidth must be positive, got {target_bw}")));
    }
    if !(reference_bw > 0.0 && reference_bw.is_finite()) {
        return Err(Error::Config(format!(
            "reference bandwidth must be positive, got {reference_bw}"
        )));
    }
    let k = reference_bw / target_bw;
    Ok(CircuitParams {
        inductance: p.inductance * k,
        c1: p.c1 * k,
        c2: p.c2 * k,
        ..*p
    })
}
