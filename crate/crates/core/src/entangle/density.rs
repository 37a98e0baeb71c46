use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::branch::{BranchState, QubitId};
use crate::error::{Error, Result};
use crate::optics::coherent_overlap;

const TOL: f64 = 1e-10;

type Rows = [[[f64; 2]; 4]; 4];

/// Two-qubit density matrix in the basis `{gg, ge, eg, ee}`.
///
/// Serialized row-major as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Rows", try_from = "Rows")]
pub struct TwoQubitDensityMatrix(Matrix4<Complex64>);

impl From<TwoQubitDensityMatrix> for Rows {
    fn from(r: TwoQubitDensityMatrix) -> Rows {
        let mut out = [[[0.0; 2]; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let z = r.0[(i, j)];
                *cell = [z.re, z.im];
            }
        }
        out
    }
}

impl TryFrom<Rows> for TwoQubitDensityMatrix {
    type Error = Error;
    fn try_from(rows: Rows) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
    }
}

impl TwoQubitDensityMatrix {
    pub fn new(m: Matrix4<Complex64>) -> Result<Self> {
        let r = Self(m);
        r.validate()?;
        Ok(r)
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: Vector4<Complex64>) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let ev = self.0.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    /// Hermitian, unit trace and positive semidefinite, each to 1e-10.
    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain("non-finite density matrix entry".into()));
        }
        let skew = (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if skew > TOL {
            return Err(Error::Domain(format!("density matrix not Hermitian (off by {skew:e})")));
        }
        let tr = self.0.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::Domain(format!("density matrix trace {tr}")));
        }
        let min = self.eigenvalues()[0];
        if min < -TOL {
            return Err(Error::Domain(format!("density matrix eigenvalue {min:e} < 0")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bell {
    /// `(|ge⟩ + |eg⟩)/√2`, the distribution target.
    #[default]
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl Bell {
    pub fn vector(self) -> Vector4<Complex64> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            Bell::PsiPlus => Vector4::new(z, h, h, z),
            Bell::PsiMinus => Vector4::new(z, h, -h, z),
            Bell::PhiPlus => Vector4::new(h, z, z, h),
            Bell::PhiMinus => Vector4::new(h, z, z, -h),
        }
    }
}

/// `⟨B|ρ|B⟩` for the Bell state `B`.
pub fn fidelity(rho: &TwoQubitDensityMatrix, target: Bell) -> Result<f64> {
    rho.validate()?;
    let v = target.vector();
    let f = (v.adjoint() * rho.0 * v)[(0, 0)].re;
    Ok(f.clamp(0.0, 1.0))
}

/// Reduced state of qubits `(qa, qb)`: the other qubits are traced out and
/// any remaining probe modes enter through their overlaps.
pub fn reduced_density(state: &BranchState, (qa, qb): (QubitId, QubitId)) -> Result<TwoQubitDensityMatrix> {
    state.check_qubit(qa)?;
    state.check_qubit(qb)?;
    if qa == qb {
        return Err(Error::DuplicateId(format!("qubit {qa} used twice")));
    }
    let pair_mask = (1u32 << qa) | (1u32 << qb);
    let index = |config: u32| 2 * (config >> qa & 1) as usize + (config >> qb & 1) as usize;

    let mut m = Matrix4::<Complex64>::zeros();
    let branches = state.branches();
    for a in branches {
        for b in branches {
            if a.config & !pair_mask != b.config & !pair_mask {
                continue;
            }
            let g: Complex64 = a
                .fields
                .iter()
                .zip(&b.fields)
                .map(|(&x, &y)| coherent_overlap(y, x))
                .product();
            m[(index(a.config), index(b.config))] += a.coefficient * b.coefficient.conj() * g;
        }
    }
    let tr = m.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Measurement("reduced state has zero weight".into()));
    }
    m /= Complex64::new(tr, 0.0);
    // Remove rounding asymmetry before validation.
    let m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    TwoQubitDensityMatrix::new(m)
}
