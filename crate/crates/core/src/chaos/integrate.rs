use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::circuit::{field, CircuitParams, CircuitState};
use crate::error::{Error, Result};

/// Uniformly sampled circuit trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    samples: Vec<CircuitState>,
}

impl Trajectory {
    pub fn new(t0: f64, dt: f64, samples: Vec<CircuitState>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if samples.is_empty() {
            return Err(Error::Config("trajectory needs at least one sample".into()));
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn samples(&self) -> &[CircuitState] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn last(&self) -> CircuitState {
        self.samples[self.samples.len() - 1]
    }

    pub fn v_c1(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.v_c1).collect()
    }

    pub fn v_c2(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.v_c2).collect()
    }

    /// Drops the first `n` samples, shifting `t0` accordingly.
    pub fn skip(&self, n: usize) -> Result<Self> {
        if n >= self.samples.len() {
            return Err(Error::Config(format!(
                "cannot skip {n} of {} samples",
                self.samples.len()
            )));
        }
        Self::new(self.time(n), self.dt, self.samples[n..].to_vec())
    }

    /// CSV with header `t,v_c1,v_c2,i_l`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,v_c1,v_c2,i_l")?;
        for (k, s) in self.samples.iter().enumerate() {
            writeln!(w, "{:?},{:?},{:?},{:?}", self.time(k), s.v_c1, s.v_c2, s.i_l)?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn axpy(x: [f64; 3], a: f64, y: [f64; 3]) -> [f64; 3] {
    [x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]]
}

/// One classical RK4 step of the circuit equations.
#[inline]
pub(crate) fn rk4_step(p: &CircuitParams, x: [f64; 3], h: f64) -> [f64; 3] {
    let k1 = field(p, x);
    let k2 = field(p, axpy(x, 0.5 * h, k1));
    let k3 = field(p, axpy(x, 0.5 * h, k2));
    let k4 = field(p, axpy(x, h, k3));
    let mut out = x;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

pub(crate) fn check_box(p: &CircuitParams, x: [f64; 3], step: usize) -> Result<()> {
    let lim = p.divergence_box();
    if x.iter().zip(lim).all(|(v, l)| v.abs() <= l) {
        Ok(())
    } else {
        Err(Error::Divergence {
            step,
            detail: format!("state {x:?} outside box {lim:?}"),
        })
    }
}

/// Accuracy guard: the step must resolve the linear resonance with at least
/// 100 samples per period.
pub(crate) fn check_step(p: &CircuitParams, dt: f64) -> Result<()> {
    let max_dt = 1.0 / (100.0 * p.resonance_frequency());
    if !(dt > 0.0 && dt <= max_dt * (1.0 + 1e-12)) {
        return Err(Error::Config(format!(
            "dt = {dt:e} s outside (0, {max_dt:e}] for this circuit"
        )));
    }
    Ok(())
}

/// Fixed-step RK4 integration over `n` steps starting at `t = 0`. The
/// returned trajectory holds `n + 1` samples, the first one being `init`.
pub fn integrate(p: &CircuitParams, init: CircuitState, dt: f64, n: usize) -> Result<Trajectory> {
    p.validate()?;
    check_step(p, dt)?;
    if !init.is_finite() {
        return Err(Error::Domain(format!("non-finite initial state {init:?}")));
    }
    let mut x = init.to_array();
    check_box(p, x, 0)?;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(init);
    for step in 1..=n {
        x = rk4_step(p, x, dt);
        check_box(p, x, step)?;
        samples.push(CircuitState::from_array(x));
    }
    Trajectory::new(0.0, dt, samples)
}

/// Like [`integrate`] but hands each sample `(k, state)` to `visit` instead
/// of storing it; returns the final state.
pub fn integrate_visit<F: FnMut(usize, &CircuitState)>(
    p: &CircuitParams,
    init: CircuitState,
    dt: f64,
    n: usize,
    mut visit: F,
) -> Result<CircuitState> {
    p.validate()?;
    check_step(p, dt)?;
    if !init.is_finite() {
        return Err(Error::Domain(format!("non-finite initial state {init:?}")));
    }
    let mut x = init.to_array();
    check_box(p, x, 0)?;
    visit(0, &init);
    for step in 1..=n {
        x = rk4_step(p, x, dt);
        check_box(p, x, step)?;
        visit(step, &CircuitState::from_array(x));
    }
    Ok(CircuitState::from_array(x))
}

/// Advances `init` by `n` steps without storing the path.
pub fn advance(p: &CircuitParams, init: CircuitState, dt: f64, n: usize) -> Result<CircuitState> {
    p.validate()?;
    check_step(p, dt)?;
    let mut x = init.to_array();
    check_box(p, x, 0)?;
    for step in 1..=n {
        x = rk4_step(p, x, dt);
        check_box(p, x, step)?;
    }
    Ok(CircuitState::from_array(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::circuit::equilibrium;

    fn generic_init(p: &CircuitParams) -> CircuitState {
        let eq = equilibrium(p);
        CircuitState::new(eq.v_c1 + 0.3, eq.v_c2 - 0.1, eq.i_l * 1.05)
    }

    #[test]
    fn zero_steps_returns_init() {
        let p = CircuitParams::default();
        let init = generic_init(&p);
        let tr = integrate(&p, init, p.default_step(), 0).unwrap();
        assert_eq!(tr.samples(), &[init]);
    }

    #[test]
    fn integration_is_bitwise_deterministic() {
        let p = CircuitParams::default();
        let init = generic_init(&p);
        let a = integrate(&p, init, p.default_step(), 5000).unwrap();
        let b = integrate(&p, init, p.default_step(), 5000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coarse_step_is_rejected() {
        let p = CircuitParams::default();
        let dt = 1.0 / (50.0 * p.resonance_frequency());
        assert!(matches!(
            integrate(&p, generic_init(&p), dt, 10),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn leaving_the_box_reports_the_step() {
        let p = CircuitParams::default();
        let init = CircuitState::new(0.0, 0.0, 20.0 * p.vcc / p.resistance);
        match integrate(&p, init, p.default_step(), 10) {
            Err(Error::Divergence { step, .. }) => assert_eq!(step, 0),
            other => panic!("{other:?}"),
        }
        // Inside the box initially, charging C1 straight through its edge.
        let init = CircuitState::new(10.0 * p.vcc - 0.01, -0.5, 5.0);
        match integrate(&p, init, p.default_step(), 100) {
            Err(Error::Divergence { step, .. }) => assert_eq!(step, 1),
            other => panic!("{other:?}"),
        }
    }

    /// Richardson study on a smooth (linear, transistor off) segment: the
    /// error ratio between successive step halvings approaches 2^4.
    #[test]
    fn fourth_order_convergence() {
        let mut p = CircuitParams::default();
        p.threshold = 14.0; // keeps the transistor cut off
        p.bias_current = 1e-9;
        let init = CircuitState::new(15.0, -0.5, 0.02);
        let t_end = 2.0 / p.resonance_frequency();
        let base = 1.0 / (100.0 * p.resonance_frequency());
        let run = |h: f64| {
            let n = (t_end / h).round() as usize;
            advance(&p, init, h, n).unwrap().to_array()
        };
        let x = [run(base), run(base / 2.0), run(base / 4.0), run(base / 8.0)];
        let d = |a: [f64; 3], b: [f64; 3]| {
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        };
        let r1 = d(x[0], x[1]) / d(x[1], x[2]);
        let r2 = d(x[1], x[2]) / d(x[2], x[3]);
        assert!((r1 - 16.0).abs() < 1.0, "ratio {r1}");
        assert!((r2 - 16.0).abs() < 1.0, "ratio {r2}");
    }

    #[test]
    fn visiting_matches_stored_trajectory() {
        let p = CircuitParams::default();
        let tr = integrate(&p, generic_init(&p), p.default_step(), 300).unwrap();
        let mut seen = Vec::new();
        let last = integrate_visit(&p, generic_init(&p), p.default_step(), 300, |k, s| {
            assert_eq!(k, seen.len());
            seen.push(*s);
        })
        .unwrap();
        assert_eq!(seen, tr.samples());
        assert_eq!(last, tr.last());
    }

    #[test]
    fn csv_header_and_rows() {
        let p = CircuitParams::default();
        let tr = integrate(&p, generic_init(&p), p.default_step(), 2).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "t,v_c1,v_c2,i_l");
        assert_eq!(lines.len(), 4);
        let row: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[0], tr.time(1));
        assert_eq!(row[2], tr.samples()[1].v_c2);
    }
}
