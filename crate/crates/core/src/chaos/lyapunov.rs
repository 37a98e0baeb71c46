// Lyapunov spectrum by tangent-space co-integration with periodic
// Gram-Schmidt re-orthonormalization (Benettin et al.).

use serde::{Deserialize, Serialize};

use super::circuit::{field, jacobian_array, CircuitParams, CircuitState};
use super::integrate::{axpy, check_box, check_step, rk4_step};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOptions {
    /// Integration step (s).
    pub dt: f64,
    /// Time discarded before accumulating (s).
    pub transient: f64,
    /// Averaging time after the transient (s).
    pub duration: f64,
    /// Steps between re-orthonormalizations.
    pub reorthonormalize_every: usize,
}

impl LyapunovOptions {
    /// Step of `1/(200 f0)`, transient of 2000 and averaging window of
    /// 20000 linear periods.
    pub fn for_circuit(p: &CircuitParams) -> Self {
        let period = 1.0 / p.resonance_frequency();
        Self {
            dt: p.default_step(),
            transient: 2000.0 * period,
            duration: 20000.0 * period,
            reorthonormalize_every: 10,
        }
    }

    fn validate(&self) -> Result<(usize, usize)> {
        if self.reorthonormalize_every == 0 {
            return Err(Error::Config("re-orthonormalization interval must be >= 1".into()));
        }
        if !(self.transient >= 0.0 && self.duration > 0.0) {
            return Err(Error::Config("need transient >= 0 and duration > 0".into()));
        }
        let transient = (self.transient / self.dt).round() as usize;
        let blocks = ((self.duration / self.dt) / self.reorthonormalize_every as f64).round() as usize;
        if blocks == 0 {
            return Err(Error::Config("duration shorter than one re-orthonormalization block".into()));
        }
        Ok((transient, blocks))
    }
}

type Mat3 = [[f64; 3]; 3];

#[inline]
fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

#[inline]
fn mat_axpy(x: &Mat3, a: f64, y: &Mat3) -> Mat3 {
    let mut out = *x;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += a * y[i][j];
        }
    }
    out
}

/// Modified Gram-Schmidt on the columns of `q`, returning the column norms
/// before normalization.
pub(crate) fn gram_schmidt<const N: usize>(q: &mut [[f64; N]; N]) -> [f64; N] {
    let mut norms = [0.0; N];
    for j in 0..N {
        for k in 0..j {
            let dot: f64 = (0..N).map(|i| q[i][j] * q[i][k]).sum();
            for i in 0..N {
                q[i][j] -= dot * q[i][k];
            }
        }
        let norm = (0..N).map(|i| q[i][j] * q[i][j]).sum::<f64>().sqrt();
        for row in q.iter_mut() {
            row[j] /= norm;
        }
        norms[j] = norm;
    }
    norms
}

/// Lyapunov exponents (1/s), sorted descending.
pub fn lyapunov_spectrum(
    p: &CircuitParams,
    init: CircuitState,
    opts: &LyapunovOptions,
) -> Result<[f64; 3]> {
    p.validate()?;
    check_step(p, opts.dt)?;
    let (transient, blocks) = opts.validate()?;
    let h = opts.dt;

    let mut x = init.to_array();
    check_box(p, x, 0)?;
    for step in 1..=transient {
        x = rk4_step(p, x, h);
        check_box(p, x, step)?;
    }

    let mut q: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut sums = [0.0; 3];
    let mut step = transient;
    for _ in 0..blocks {
        for _ in 0..opts.reorthonormalize_every {
            // State and tangent share the RK4 stage points.
            let k1 = field(p, x);
            let x2 = axpy(x, 0.5 * h, k1);
            let k2 = field(p, x2);
            let x3 = axpy(x, 0.5 * h, k2);
            let k3 = field(p, x3);
            let x4 = axpy(x, h, k3);
            let k4 = field(p, x4);

            let w1 = mat_mul(&jacobian_array(p, x), &q);
            let w2 = mat_mul(&jacobian_array(p, x2), &mat_axpy(&q, 0.5 * h, &w1));
            let w3 = mat_mul(&jacobian_array(p, x3), &mat_axpy(&q, 0.5 * h, &w2));
            let w4 = mat_mul(&jacobian_array(p, x4), &mat_axpy(&q, h, &w3));
            for i in 0..3 {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                for j in 0..3 {
                    q[i][j] += h / 6.0 * (w1[i][j] + 2.0 * w2[i][j] + 2.0 * w3[i][j] + w4[i][j]);
                }
            }
            step += 1;
            check_box(p, x, step)?;
        }
        let norms = gram_schmidt(&mut q);
        for (s, n) in sums.iter_mut().zip(norms) {
            *s += n.ln();
        }
    }
    let total = (blocks * opts.reorthonormalize_every) as f64 * h;
    let mut exps = sums.map(|s| s / total);
    exps.sort_by(|a, b| b.total_cmp(a));
    Ok(exps)
}
