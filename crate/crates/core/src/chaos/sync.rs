//! Pecora-Carroll drive-response synchronization.
//!
//! The transmitter's `v_c1` is sent to the receiver, which only owns the
//! `(v_c2, i_l)` subsystem. At each sample the receiver's `v_c1` is
//! overwritten with the drive value and the full RK4 step is taken from
//! `(drive v_c1, own v_c2, own i_l)`; the receiver keeps only the response
//! components of the result. Intermediate stage values of `v_c1` are thus
//! predicted by the receiver's own copy of the `v_c1` equation. With an
//! identical starting state this reproduces the transmitter bit for bit.

use serde::{Deserialize, Serialize};

use super::circuit::{CircuitParams, CircuitState};
use super::integrate::{check_box, check_step, rk4_step, Trajectory};
use super::lyapunov::gram_schmidt;
use crate::error::{Error, Result};

/// Sampled drive signal, the transmitter's `v_c1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub t0: f64,
    pub dt: f64,
    pub v_c1: Vec<f64>,
}

impl Drive {
    pub fn from_trajectory(tx: &Trajectory) -> Self {
        Self {
            t0: tx.t0,
            dt: tx.dt,
            v_c1: tx.v_c1(),
        }
    }
}

fn check_drive(p: &CircuitParams, drive: &Drive, dt: f64) -> Result<()> {
    p.validate()?;
    check_step(p, dt)?;
    if drive.v_c1.is_empty() {
        return Err(Error::Config("empty drive".into()));
    }
    if (drive.dt - dt).abs() > 1e-12 * dt {
        return Err(Error::Config(format!(
            "drive sampled at {:e} s but receiver steps at {dt:e} s",
            drive.dt
        )));
    }
    Ok(())
}

/// Integrates the receiver under `drive`. The returned trajectory has one
/// sample per drive sample; its `v_c1` column is the drive itself.
pub fn pecora_carroll_receive(
    p: &CircuitParams,
    drive: &Drive,
    init: CircuitState,
    dt: f64,
) -> Result<Trajectory> {
    check_drive(p, drive, dt)?;
    if !init.is_finite() {
        return Err(Error::Domain(format!("non-finite receiver state {init:?}")));
    }
    let mut x = [drive.v_c1[0], init.v_c2, init.i_l];
    check_box(p, x, 0)?;
    let mut samples = Vec::with_capacity(drive.v_c1.len());
    samples.push(CircuitState::from_array(x));
    for (step, &v1) in drive.v_c1.iter().enumerate().skip(1) {
        x = rk4_step(p, x, dt);
        x[0] = v1;
        check_box(p, x, step)?;
        samples.push(CircuitState::from_array(x));
    }
    Trajectory::new(drive.t0, dt, samples)
}

/// Conditional (sub-)Lyapunov exponents of the `(v_c2, i_l)` response
/// subsystem along `drive`, sorted descending.
pub fn conditional_lyapunov(
    p: &CircuitParams,
    drive: &Drive,
    init: CircuitState,
    dt: f64,
    reorthonormalize_every: usize,
) -> Result<[f64; 2]> {
    check_drive(p, drive, dt)?;
    if reorthonormalize_every == 0 {
        return Err(Error::Config("re-orthonormalization interval must be >= 1".into()));
    }
    let blocks = (drive.v_c1.len() - 1) / reorthonormalize_every;
    if blocks == 0 {
        return Err(Error::Config("drive shorter than one re-orthonormalization block".into()));
    }
    // d(v_c2, i_l)/dt depends on v_c1 only additively, so the response
    // Jacobian is the constant [[0, 1/C2], [-1/L, -R/L]].
    let jac = [
        [0.0, 1.0 / p.c2],
        [-1.0 / p.inductance, -p.resistance / p.inductance],
    ];
    let apply = |m: &[[f64; 2]; 2]| -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = jac[i][0] * m[0][j] + jac[i][1] * m[1][j];
            }
        }
        out
    };
    let add = |a: &[[f64; 2]; 2], s: f64, b: &[[f64; 2]; 2]| {
        let mut out = *a;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += s * b[i][j];
            }
        }
        out
    };

    let mut x = [drive.v_c1[0], init.v_c2, init.i_l];
    let mut q = [[1.0, 0.0], [0.0, 1.0]];
    let mut sums = [0.0; 2];
    let mut k = 0;
    for _ in 0..blocks {
        for _ in 0..reorthonormalize_every {
            k += 1;
            x = rk4_step(p, x, dt);
            x[0] = drive.v_c1[k];
            check_box(p, x, k)?;
            let w1 = apply(&q);
            let w2 = apply(&add(&q, 0.5 * dt, &w1));
            let w3 = apply(&add(&q, 0.5 * dt, &w2));
            let w4 = apply(&add(&q, dt, &w3));
            for i in 0..2 {
                for j in 0..2 {
                    q[i][j] += dt / 6.0 * (w1[i][j] + 2.0 * w2[i][j] + 2.0 * w3[i][j] + w4[i][j]);
                }
            }
        }
        let norms = gram_schmidt(&mut q);
        for (s, n) in sums.iter_mut().zip(norms) {
            *s += n.ln();
        }
    }
    let total = (blocks * reorthonormalize_every) as f64 * dt;
    let mut exps = sums.map(|s| s / total);
    exps.sort_by(|a, b| b.total_cmp(a));
    Ok(exps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncError {
    /// Pointwise `|v_c2 - ṽ_c2|`.
    pub trace: Vec<f64>,
    /// Supremum of the trace after the transient.
    pub max_after_transient: f64,
}

pub fn sync_error(tx: &Trajectory, rx: &Trajectory, transient: f64) -> Result<SyncError> {
    if tx.len() != rx.len() || (tx.dt - rx.dt).abs() > 1e-12 * tx.dt {
        return Err(Error::Shape(format!(
            "tx ({} samples, dt {:e}) vs rx ({} samples, dt {:e})",
            tx.len(),
            tx.dt,
            rx.len(),
            rx.dt
        )));
    }
    let trace: Vec<f64> = tx
        .samples()
        .iter()
        .zip(rx.samples())
        .map(|(a, b)| (a.v_c2 - b.v_c2).abs())
        .collect();
    let skip = (transient / tx.dt).ceil() as usize;
    if skip >= trace.len() {
        return Err(Error::Config("transient longer than the traces".into()));
    }
    let max_after_transient = trace[skip..].iter().copied().fold(0.0, f64::max);
    Ok(SyncError {
        trace,
        max_after_transient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::circuit::equilibrium;
    use crate::chaos::integrate::integrate;

    fn tx(p: &CircuitParams, n: usize) -> Trajectory {
        let eq = equilibrium(p);
        let init = CircuitState::new(eq.v_c1 + 0.2, eq.v_c2 - 0.3, eq.i_l);
        integrate(p, init, p.default_step(), n).unwrap()
    }

    #[test]
    fn identical_start_gives_zero_error() {
        let p = CircuitParams::default();
        let t = tx(&p, 20_000);
        let rx = pecora_carroll_receive(&p, &Drive::from_trajectory(&t), t.samples()[0], t.dt)
            .unwrap();
        let err = sync_error(&t, &rx, 0.0).unwrap();
        assert!(err.trace.iter().all(|&e| e == 0.0));
        assert_eq!(rx, t);
    }

    #[test]
    fn mismatched_start_synchronizes() {
        let p = CircuitParams::default();
        let t = tx(&p, 40_000);
        let rx = pecora_carroll_receive(
            &p,
            &Drive::from_trajectory(&t),
            CircuitState::new(0.0, 2.0, -0.05),
            t.dt,
        )
        .unwrap();
        let err = sync_error(&t, &rx, 100e-9).unwrap();
        assert!(err.trace[0] > 1.0);
        assert!(err.max_after_transient < 1e-6 * p.vcc, "{}", err.max_after_transient);
    }

    #[test]
    fn conditional_exponents_are_negative() {
        let p = CircuitParams::default();
        let t = tx(&p, 50_000);
        let exps = conditional_lyapunov(
            &p,
            &Drive::from_trajectory(&t),
            CircuitState::new(0.0, 1.0, 0.0),
            t.dt,
            10,
        )
        .unwrap();
        // Underdamped response: both exponents equal -R/(2L).
        let want = -p.resistance / (2.0 * p.inductance);
        for e in exps {
            assert!(e < 0.0);
            assert!((e - want).abs() < 1e-3 * want.abs(), "{exps:?}");
        }
    }

    #[test]
    fn drive_step_mismatch_is_rejected() {
        let p = CircuitParams::default();
        let t = tx(&p, 100);
        let r = pecora_carroll_receive(&p, &Drive::from_trajectory(&t), t.last(), t.dt / 2.0);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let p = CircuitParams::default();
        let a = tx(&p, 100);
        let b = tx(&p, 50);
        assert!(matches!(sync_error(&a, &b, 0.0), Err(Error::Shape(_))));
    }
}
