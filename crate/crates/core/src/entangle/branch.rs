use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{coherent_overlap, network_transfer, CoherentAmplitude, NetworkFactors};

pub type QubitId = usize;
pub type ModeId = usize;

/// Largest register supported; configurations are stored as bit masks.
pub const MAX_QUBITS: usize = 16;

/// One term `c |config⟩ ⊗ |α_1⟩ ⊗ … ⊗ |α_m⟩`. Bit `q` of `config` is set
/// when qubit `q` is excited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub config: u32,
    pub coefficient: Complex64,
    pub fields: Vec<CoherentAmplitude>,
}

impl Branch {
    pub fn is_excited(&self, q: QubitId) -> bool {
        self.config >> q & 1 == 1
    }
}

/// Qubit register entangled with coherent probe modes, stored as a sum of
/// branches with distinct qubit configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchState {
    n_qubits: usize,
    modes: Vec<ModeId>,
    branches: Vec<Branch>,
}

impl BranchState {
    pub fn new(n_qubits: usize, modes: Vec<ModeId>, branches: Vec<Branch>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Domain(format!(
                "qubit count must lie in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        for (k, m) in modes.iter().enumerate() {
            if modes[..k].contains(m) {
                return Err(Error::DuplicateId(format!("mode {m}")));
            }
        }
        let mut seen = Vec::with_capacity(branches.len());
        for b in &branches {
            if b.fields.len() != modes.len() {
                return Err(Error::Shape(format!(
                    "branch carries {} fields for {} modes",
                    b.fields.len(),
                    modes.len()
                )));
            }
            if b.config >> n_qubits != 0 {
                return Err(Error::Shape(format!(
                    "configuration {:#b} exceeds {n_qubits} qubits",
                    b.config
                )));
            }
            if seen.contains(&b.config) {
                return Err(Error::DuplicateId(format!("configuration {:#b}", b.config)));
            }
            seen.push(b.config);
        }
        Ok(Self {
            n_qubits,
            modes,
            branches,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn mode_index(&self, mode: ModeId) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .ok_or_else(|| Error::UnknownId(format!("mode {mode}")))
    }

    pub(crate) fn check_qubit(&self, q: QubitId) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::UnknownId(format!("qubit {q} of {}", self.n_qubits)));
        }
        Ok(())
    }

    /// `⟨Ψ|Ψ⟩`, with the field overlaps between branches of equal
    /// configuration included.
    pub fn norm_sqr(&self) -> f64 {
        let mut sum = 0.0;
        for (i, a) in self.branches.iter().enumerate() {
            for b in &self.branches[i..] {
                if a.config != b.config {
                    continue;
                }
                let g: Complex64 = a
                    .fields
                    .iter()
                    .zip(&b.fields)
                    .map(|(&x, &y)| coherent_overlap(x, y))
                    .product();
                let term = (a.coefficient.conj() * b.coefficient * g).re;
                sum += if std::ptr::eq(a, b) { term } else { 2.0 * term };
            }
        }
        sum
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::Measurement("cannot normalize a zero state".into()));
        }
        let k = 1.0 / n.sqrt();
        let mut out = self.clone();
        for b in &mut out.branches {
            b.coefficient *= k;
        }
        Ok(out)
    }

    /// Removes `mode` from every branch.
    pub(crate) fn without_mode(&self, idx: usize) -> Self {
        let mut out = self.clone();
        out.modes.remove(idx);
        for b in &mut out.branches {
            b.fields.remove(idx);
        }
        out
    }

    pub(crate) fn with_branches(&self, branches: Vec<Branch>) -> Self {
        Self {
            n_qubits: self.n_qubits,
            modes: self.modes.clone(),
            branches,
        }
    }
}

/// `((|g⟩ + |e⟩)/√2)^{⊗n}` with no modes attached.
pub fn prepare_plus(n_qubits: usize) -> Result<BranchState> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Domain(format!(
            "qubit count must lie in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    let c = Complex64::new((0.5f64).powf(n_qubits as f64 / 2.0), 0.0);
    let branches = (0..1u32 << n_qubits)
        .map(|config| Branch {
            config,
            coefficient: c,
            fields: Vec::new(),
        })
        .collect();
    BranchState::new(n_qubits, Vec::new(), branches)
}

/// Attaches a probe mode in coherent state `|α⟩` to every branch.
pub fn attach_probe(state: &BranchState, mode: ModeId, alpha: CoherentAmplitude) -> Result<BranchState> {
    if state.modes.contains(&mode) {
        return Err(Error::DuplicateId(format!("mode {mode}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("non-finite amplitude {alpha:?}")));
    }
    let mut out = state.clone();
    out.modes.push(mode);
    for b in &mut out.branches {
        b.fields.push(alpha);
    }
    Ok(out)
}

/// Dispersive qubit-probe interaction: the probe amplitude picks up
/// `e^{-iφ/2}` when the qubit is in `g` and `e^{+iφ/2}` when in `e`.
pub fn dispersive_interact(
    state: &BranchState,
    qubit: QubitId,
    mode: ModeId,
    phi: f64,
) -> Result<BranchState> {
    state.check_qubit(qubit)?;
    let idx = state.mode_index(mode)?;
    let (minus, plus) = (Complex64::from_polar(1.0, -phi / 2.0), Complex64::from_polar(1.0, phi / 2.0));
    let mut out = state.clone();
    for b in &mut out.branches {
        let k = if b.is_excited(qubit) { plus } else { minus };
        b.fields[idx] = b.fields[idx] * k;
    }
    Ok(out)
}

/// Sends modes `(a, b)` through the network; afterwards `a` holds output 3
/// and `b` holds output 4.
pub fn propagate_network(
    state: &BranchState,
    (a, b): (ModeId, ModeId),
    f: &NetworkFactors,
) -> Result<BranchState> {
    let ia = state.mode_index(a)?;
    let ib = state.mode_index(b)?;
    if ia == ib {
        return Err(Error::DuplicateId(format!("mode {a} used twice")));
    }
    let mut out = state.clone();
    for br in &mut out.branches {
        let (x, y) = network_transfer(br.fields[ia], br.fields[ib], f)?;
        br.fields[ia] = x;
        br.fields[ib] = y;
    }
    Ok(out)
}
