//! Truncated number-basis simulator of the distribution protocol, used to
//! check the coherent-branch algebra on small amplitudes.
//!
//! A [`FockVector`] stores one block of `N^modes` number amplitudes per
//! qubit configuration. Beam splitters act block by block through the exact
//! number-conserving matrices; loss mixes the mode with a vacuum ancilla on a
//! beam splitter. The ancilla is then removed block by block keeping the
//! pure conditional field state, which matches the pure-coherent treatment
//! of the network in the branch simulator.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::entangle::DistributeConfig;
use crate::error::{Error, Result};
use crate::optics::CoherentAmplitude;

const NORM_TOL: f64 = 1e-8;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Cutoff rule `N = ⌈10|α|² + 10⌉`.
pub fn cutoff_for(alpha: CoherentAmplitude) -> usize {
    (10.0 * alpha.mean_photons() + 10.0).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    n_qubits: usize,
    n_modes: usize,
    /// Number states `0..cutoff` per mode.
    cutoff: usize,
    data: Vec<Complex64>,
}

impl FockVector {
    fn block_len(&self) -> usize {
        self.cutoff.pow(self.n_modes as u32)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Amplitude of `|config⟩ ⊗ |n_1, …, n_m⟩`.
    pub fn amplitude(&self, config: usize, numbers: &[usize]) -> Complex64 {
        assert_eq!(numbers.len(), self.n_modes);
        let idx = numbers.iter().fold(0, |acc, &n| acc * self.cutoff + n);
        self.data[config * self.block_len() + idx]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if (self.n_qubits, self.n_modes, self.cutoff) != (other.n_qubits, other.n_modes, other.cutoff) {
            return Err(Error::Shape("Fock vectors live in different spaces".into()));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }

    /// `Σ_c q_c |c⟩ ⊗ |ψ_1⟩ ⊗ … ⊗ |ψ_m⟩` from single-mode vectors.
    pub fn product(n_qubits: usize, qubit_coefficients: &[Complex64], modes: &[FockVector]) -> Result<Self> {
        if qubit_coefficients.len() != 1 << n_qubits {
            return Err(Error::Shape(format!(
                "{} qubit coefficients for {n_qubits} qubits",
                qubit_coefficients.len()
            )));
        }
        let cutoff = modes.first().map_or(1, |m| m.cutoff);
        if modes.iter().any(|m| m.n_modes != 1 || m.n_qubits != 0 || m.cutoff != cutoff) {
            return Err(Error::Shape("modes must be single-mode vectors with a common cutoff".into()));
        }
        let mut field = vec![Complex64::new(1.0, 0.0)];
        for m in modes {
            field = field
                .iter()
                .flat_map(|a| m.data.iter().map(move |b| a * b))
                .collect();
        }
        let data = qubit_coefficients
            .iter()
            .flat_map(|q| field.iter().map(move |f| q * f))
            .collect();
        Ok(Self {
            n_qubits,
            n_modes: modes.len(),
            cutoff,
            data,
        })
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            return Err(Error::UnknownId(format!("mode {mode} of {}", self.n_modes)));
        }
        Ok(())
    }

    fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow((self.n_modes - 1 - mode) as u32)
    }
}

/// Single-mode coherent state truncated to `cutoff` number states.
pub fn coherent_fock(alpha: CoherentAmplitude, cutoff: usize) -> Result<FockVector> {
    if cutoff == 0 {
        return Err(Error::CutoffOverflow("cutoff must be >= 1".into()));
    }
    let a = alpha.value();
    let mut data = Vec::with_capacity(cutoff);
    let mut c = Complex64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
    data.push(c);
    for n in 1..cutoff {
        c = c * a / (n as f64).sqrt();
        data.push(c);
    }
    let v = FockVector {
        n_qubits: 0,
        n_modes: 1,
        cutoff,
        data,
    };
    let deficit = 1.0 - v.norm_sqr();
    if deficit > NORM_TOL {
        return Err(Error::CutoffOverflow(format!(
            "cutoff {cutoff} leaves norm deficit {deficit:e} for |α|² = {}",
            a.norm_sqr()
        )));
    }
    Ok(v)
}

/// Output amplitudes of `|n_a, n - n_a⟩` under the beam splitter
/// `a† → c a† + s b†`, `b† → s a† - c b†`, indexed by the photon number in
/// the first output mode.
fn bs_column(n: usize, na: usize, c: f64, s: f64) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    v[0] = 1.0;
    // Apply the transformed creation operators one at a time, dividing by
    // √j as we go so the result stays normalized.
    let mut m = 0;
    let apply = |v: &mut Vec<f64>, m: usize, ca: f64, cb: f64, j: usize| {
        let mut out = vec![0.0; n + 1];
        let norm = (j as f64).sqrt();
        for k in 0..=m + 1 {
            let mut x = 0.0;
            if k >= 1 {
                x += ca * (k as f64).sqrt() * v[k - 1];
            }
            if k <= m {
                x += cb * ((m + 1 - k) as f64).sqrt() * v[k];
            }
            out[k] = x / norm;
        }
        *v = out;
    };
    for j in 1..=na {
        apply(&mut v, m, c, s, j);
        m += 1;
    }
    for j in 1..=n - na {
        apply(&mut v, m, s, -c, j);
        m += 1;
    }
    v
}

struct BsTable {
    c: f64,
    s: f64,
    columns: Vec<Option<Vec<Vec<f64>>>>,
}

impl BsTable {
    fn new(angle: f64) -> Self {
        Self {
            c: angle.cos(),
            s: angle.sin(),
            columns: Vec::new(),
        }
    }

    fn column(&mut self, n: usize, na: usize) -> &[f64] {
        if self.columns.len() <= n {
            self.columns.resize(n + 1, None);
        }
        let (c, s) = (self.c, self.s);
        let cols = self.columns[n].get_or_insert_with(|| (0..=n).map(|k| bs_column(n, k, c, s)).collect());
        &cols[na]
    }
}

/// Applies the beam splitter to modes `(ma, mb)` of one configuration block
/// with `n_modes` modes. Returns the weight pushed past the cutoff.
fn bs_block(
    block: &[Complex64],
    n_modes: usize,
    cutoff: usize,
    (ma, mb): (usize, usize),
    table: &mut BsTable,
) -> (Vec<Complex64>, f64) {
    let stride = |m: usize| cutoff.pow((n_modes - 1 - m) as u32);
    let (sa, sb) = (stride(ma), stride(mb));
    let mut out = vec![ZERO; block.len()];
    let mut input_weight = 0.0;
    for base in 0..block.len() {
        if (base / sa) % cutoff != 0 || (base / sb) % cutoff != 0 {
            continue;
        }
        for na in 0..cutoff {
            for nb in 0..cutoff {
                let x = block[base + na * sa + nb * sb];
                if x == ZERO {
                    continue;
                }
                input_weight += x.norm_sqr();
                let n = na + nb;
                let col = table.column(n, na);
                let lo = n.saturating_sub(cutoff - 1);
                let hi = n.min(cutoff - 1);
                for k in lo..=hi {
                    out[base + k * sa + (n - k) * sb] += x * col[k];
                }
            }
        }
    }
    let kept: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    (out, (input_weight - kept).max(0.0))
}

fn check_overflow(lost: f64, total: f64, what: &str) -> Result<()> {
    if lost > NORM_TOL * total.max(1e-300) {
        return Err(Error::CutoffOverflow(format!(
            "{what} pushed weight {lost:e} past the cutoff"
        )));
    }
    Ok(())
}

/// Two-mode beam splitter of mixing angle `angle`; `π/4` is the 50:50
/// splitter `(a + b)/√2, (a - b)/√2` on coherent amplitudes.
pub fn beamsplitter_fock(state: &FockVector, (ma, mb): (usize, usize), angle: f64) -> Result<FockVector> {
    state.check_mode(ma)?;
    state.check_mode(mb)?;
    if ma == mb {
        return Err(Error::DuplicateId(format!("mode {ma} used twice")));
    }
    let mut table = BsTable::new(angle);
    let len = state.block_len();
    let mut data = Vec::with_capacity(state.data.len());
    let mut lost = 0.0;
    for block in state.data.chunks(len) {
        let (out, l) = bs_block(block, state.n_modes, state.cutoff, (ma, mb), &mut table);
        data.extend(out);
        lost += l;
    }
    check_overflow(lost, state.norm_sqr(), "beam splitter")?;
    Ok(FockVector { data, ..state.clone() })
}

/// Amplitude transmission `t` through a beam splitter whose other input is
/// a vacuum ancilla. The ancilla is removed per configuration block, where
/// the field is a product with it, keeping the pure conditional state with
/// the block's weight and the phase of its vacuum amplitude.
pub fn attenuate(state: &FockVector, mode: usize, t: f64) -> Result<FockVector> {
    state.check_mode(mode)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("transmission must lie in [0, 1], got {t}")));
    }
    let n = state.cutoff;
    let len = state.block_len();
    let mut table = BsTable::new(t.acos());
    let mut data = Vec::with_capacity(state.data.len());
    let mut lost = 0.0;
    for block in state.data.chunks(len) {
        let weight: f64 = block.iter().map(|z| z.norm_sqr()).sum();
        if weight == 0.0 {
            data.extend_from_slice(block);
            continue;
        }
        // Ancilla appended as the last, fastest-varying digit.
        let mut ext = vec![ZERO; len * n];
        for (i, &z) in block.iter().enumerate() {
            ext[i * n] = z;
        }
        let (mixed, l) = bs_block(&ext, state.n_modes + 1, n, (mode, state.n_modes), &mut table);
        lost += l;

        let best = (0..n)
            .max_by(|&a, &b| {
                let wa: f64 = (0..len).map(|i| mixed[i * n + a].norm_sqr()).sum();
                let wb: f64 = (0..len).map(|i| mixed[i * n + b].norm_sqr()).sum();
                wa.total_cmp(&wb)
            })
            .unwrap_or(0);
        let mut cond: Vec<Complex64> = (0..len).map(|i| mixed[i * n + best]).collect();
        let cw: f64 = cond.iter().map(|z| z.norm_sqr()).sum();
        let mut k = Complex64::new((weight / cw).sqrt(), 0.0);
        if block[0].norm() > 0.0 && cond[0].norm() > 0.0 {
            k *= Complex64::from_polar(1.0, block[0].arg() - cond[0].arg());
        }
        for z in &mut cond {
            *z *= k;
        }
        data.extend(cond);
    }
    check_overflow(lost, state.norm_sqr(), "attenuation")?;
    Ok(FockVector { data, ..state.clone() })
}

/// `exp(∓i φ n̂ / 2)` on `mode`, `-` when `qubit` is in g and `+` when in e.
pub fn dispersive_fock(state: &FockVector, qubit: usize, mode: usize, phi: f64) -> Result<FockVector> {
    state.check_mode(mode)?;
    if qubit >= state.n_qubits {
        return Err(Error::UnknownId(format!("qubit {qubit} of {}", state.n_qubits)));
    }
    let len = state.block_len();
    let stride = state.stride(mode);
    let mut out = state.clone();
    for (config, block) in out.data.chunks_mut(len).enumerate() {
        let sign = if config >> qubit & 1 == 1 { 1.0 } else { -1.0 };
        for (i, z) in block.iter_mut().enumerate() {
            let n = (i / stride) % state.cutoff;
            *z *= Complex64::from_polar(1.0, sign * phi * n as f64 / 2.0);
        }
    }
    Ok(out)
}

/// Applies `⟨β|` to `mode`, removing it. The result is not renormalized.
pub fn project(state: &FockVector, mode: usize, beta: CoherentAmplitude) -> Result<FockVector> {
    state.check_mode(mode)?;
    let bra = coherent_fock(beta, state.cutoff)?;
    let n = state.cutoff;
    let stride = state.stride(mode);
    let len = state.block_len();
    let new_len = len / n;
    let mut data = vec![ZERO; state.data.len() / n];
    for (config, block) in state.data.chunks(len).enumerate() {
        for (i, &z) in block.iter().enumerate() {
            let k = (i / stride) % n;
            let rest = (i / (stride * n)) * stride + i % stride;
            data[config * new_len + rest] += bra.data[k].conj() * z;
        }
    }
    Ok(FockVector {
        n_qubits: state.n_qubits,
        n_modes: state.n_modes - 1,
        cutoff: n,
        data,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockResult {
    pub f1: f64,
    pub f2: f64,
    pub p_success: f64,
    /// Unnormalized `‖⟨s|_A ⟨s|_B Ψ‖²`.
    pub success_weight: f64,
}

fn psi_plus_fidelity(amps: &[Complex64], qa: usize, qb: usize) -> f64 {
    let mut rho = [[ZERO; 4]; 4];
    let idx = |c: usize| 2 * (c >> qa & 1) + (c >> qb & 1);
    let mask = (1 << qa) | (1 << qb);
    for (ca, &a) in amps.iter().enumerate() {
        for (cb, &b) in amps.iter().enumerate() {
            if ca & !mask == cb & !mask {
                rho[idx(ca)][idx(cb)] += a * b.conj();
            }
        }
    }
    let tr: f64 = (0..4).map(|i| rho[i][i].re).sum();
    (rho[1][1].re + rho[2][2].re + 2.0 * rho[1][2].re) / (2.0 * tr)
}

/// Runs the whole protocol in the number basis. Amplitudes up to |α| = 2
/// keep the basis small enough for tests.
pub fn pipeline_fock(cfg: &DistributeConfig) -> Result<FockResult> {
    if !(cfg.n_bar > 0.0) || !(0.0..=1.0).contains(&cfg.eta) {
        return Err(Error::Config("n_bar must be positive and η in [0, 1]".into()));
    }
    let alpha = CoherentAmplitude::new(cfg.n_bar.sqrt(), 0.0);
    let n = cutoff_for(alpha);
    let probe = coherent_fock(alpha, n)?;
    let mut psi = FockVector::product(4, &[Complex64::new(0.25, 0.0); 16], &[probe.clone(), probe])?;

    psi = dispersive_fock(&psi, 0, 0, cfg.phi)?;
    psi = dispersive_fock(&psi, 1, 1, cfg.phi)?;
    // Network: diagonalize on the symmetric and antisymmetric combinations,
    // attenuate each, recombine.
    let cross = (cfg.m1 * cfg.m2).sqrt();
    let keep = (1.0 - cfg.eta).sqrt();
    psi = beamsplitter_fock(&psi, (0, 1), FRAC_PI_4)?;
    psi = attenuate(&psi, 0, keep * (1.0 + cross) / 2.0)?;
    psi = attenuate(&psi, 1, keep * (1.0 - cross) / 2.0)?;
    psi = beamsplitter_fock(&psi, (0, 1), FRAC_PI_4)?;
    psi = dispersive_fock(&psi, 2, 0, cfg.phi)?;
    psi = dispersive_fock(&psi, 3, 1, cfg.phi)?;

    let s = CoherentAmplitude::new(keep * cfg.n_bar.sqrt() / 2.0, 0.0);
    let outcomes = [
        s,
        s * Complex64::from_polar(1.0, -cfg.phi),
        s * Complex64::from_polar(1.0, cfg.phi),
    ];

    let on_a: Vec<FockVector> = outcomes.iter().map(|&b| project(&psi, 0, b)).collect::<Result<_>>()?;
    let w_a: Vec<f64> = on_a.iter().map(FockVector::norm_sqr).collect();
    let cond_a = &on_a[0];
    let on_b: Vec<FockVector> = outcomes.iter().map(|&b| project(cond_a, 0, b)).collect::<Result<_>>()?;
    let w_b: Vec<f64> = on_b.iter().map(FockVector::norm_sqr).collect();

    let p3 = w_a[0] / w_a.iter().sum::<f64>();
    let p4 = w_b[0] / w_b.iter().sum::<f64>();
    let amps = &on_b[0].data;
    Ok(FockResult {
        f1: psi_plus_fidelity(amps, 0, 2),
        f2: psi_plus_fidelity(amps, 1, 3),
        p_success: p3 * p4,
        success_weight: w_b[0],
    })
}
