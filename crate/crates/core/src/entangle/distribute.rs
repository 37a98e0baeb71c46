use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::branch::{attach_probe, dispersive_interact, prepare_plus, propagate_network, BranchState};
use super::density::{fidelity, reduced_density, Bell, TwoQubitDensityMatrix};
use super::measure::{measure_pointer_all, sample_outcome, MeasurementModel};
use crate::error::{Error, Result};
use crate::optics::{CoherentAmplitude, NetworkFactors};

/// Qubits 0..4 are atoms 1..4. Arm A carries atom 1's probe to atom 3, arm B
/// carries atom 2's probe to atom 4.
pub const ARM_A: usize = 0;
pub const ARM_B: usize = 1;

/// Dispersive atom-cavity coupling; all frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveCoupling {
    pub cavity_frequency: f64,
    pub qubit_frequency: f64,
    pub coupling: f64,
    /// Interaction time τ' (s).
    pub interaction_time: f64,
    /// Smallest allowed |Δ|/|g|.
    pub validity_ratio: f64,
}

impl DispersiveCoupling {
    /// Interaction time chosen to produce pointer phase `phi`.
    pub fn for_phase(cavity_frequency: f64, qubit_frequency: f64, coupling: f64, phi: f64) -> Result<Self> {
        let delta = cavity_frequency - qubit_frequency;
        let c = Self {
            cavity_frequency,
            qubit_frequency,
            coupling,
            interaction_time: phi * delta / (2.0 * coupling * coupling),
            validity_ratio: 10.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn detuning(&self) -> f64 {
        self.cavity_frequency - self.qubit_frequency
    }

    /// `χ = g²/Δ`.
    pub fn dispersive_shift(&self) -> f64 {
        self.coupling * self.coupling / self.detuning()
    }

    /// `φ = 2 g² τ' / Δ`.
    pub fn phase(&self) -> f64 {
        2.0 * self.dispersive_shift() * self.interaction_time
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.detuning();
        if !(d.is_finite() && self.coupling.is_finite() && self.coupling != 0.0) {
            return Err(Error::Config("coupling and detuning must be finite and nonzero".into()));
        }
        if d.abs() < self.validity_ratio * self.coupling.abs() {
            return Err(Error::Config(format!(
                "|Δ| = {:e} below {} |g| = {:e}: not dispersive",
                d.abs(),
                self.validity_ratio,
                self.validity_ratio * self.coupling.abs()
            )));
        }
        check_phase(self.phase())
    }
}

fn check_phase(phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi < PI) {
        return Err(Error::Config(format!("pointer phase must lie in (0, π), got {phi}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributeConfig {
    pub n_bar: f64,
    pub phi: f64,
    pub m1: f64,
    pub m2: f64,
    pub eta: f64,
    #[serde(default)]
    pub model: MeasurementModel,
    #[serde(default)]
    pub seed: u64,
}

impl DistributeConfig {
    pub fn new(n_bar: f64, phi: f64, m: f64, eta: f64) -> Self {
        Self {
            n_bar,
            phi,
            m1: m,
            m2: m,
            eta,
            model: MeasurementModel::default(),
            seed: 0,
        }
    }

    pub fn factors(&self) -> Result<NetworkFactors> {
        NetworkFactors::new(self.m1, self.m2, self.eta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_bar > 0.0 && self.n_bar.is_finite()) {
            return Err(Error::Config(format!("n_bar must be positive, got {}", self.n_bar)));
        }
        check_phase(self.phi)?;
        self.factors().map_err(|e| Error::Config(e.to_string()))?;
        // At η = 1 every pointer collapses to vacuum and the outcomes coincide.
        if self.eta >= 1.0 {
            return Err(Error::Config("decay rate must be < 1 for pointer discrimination".into()));
        }
        Ok(())
    }

    /// Unshifted pointer amplitude at the receivers, `√(1-η) α/2`.
    pub fn success_pointer(&self) -> CoherentAmplitude {
        CoherentAmplitude::new((1.0 - self.eta).sqrt() * self.n_bar.sqrt() / 2.0, 0.0)
    }

    /// `{s, s e^{-iφ}, s e^{iφ}}`; index 0 is success.
    pub fn outcomes(&self) -> [CoherentAmplitude; 3] {
        let s = self.success_pointer();
        [
            s,
            s * Complex64::from_polar(1.0, -self.phi),
            s * Complex64::from_polar(1.0, self.phi),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributeResult {
    pub config: DistributeConfig,
    #[serde(rename = "F1")]
    pub f1: f64,
    #[serde(rename = "F2")]
    pub f2: f64,
    pub p_success: f64,
    pub model: MeasurementModel,
    pub seed: u64,
    pub rho13: TwoQubitDensityMatrix,
    pub rho24: TwoQubitDensityMatrix,
    /// Outcome indices of one seeded shot on arms A and B.
    pub sampled_outcomes: [usize; 2],
    pub sampled_success: bool,
    /// Network outputs are treated as pure coherent states.
    pub approximation: String,
}

/// Four-qubit state with both probes at the receivers, before measurement.
pub fn prepare_network_state(cfg: &DistributeConfig) -> Result<BranchState> {
    cfg.validate()?;
    let alpha = CoherentAmplitude::from_mean_photons(cfg.n_bar)?;
    let mut s = prepare_plus(4)?;
    s = attach_probe(&s, ARM_A, alpha)?;
    s = attach_probe(&s, ARM_B, alpha)?;
    s = dispersive_interact(&s, 0, ARM_A, cfg.phi)?;
    s = dispersive_interact(&s, 1, ARM_B, cfg.phi)?;
    s = propagate_network(&s, (ARM_A, ARM_B), &cfg.factors()?)?;
    s = dispersive_interact(&s, 2, ARM_A, cfg.phi)?;
    dispersive_interact(&s, 3, ARM_B, cfg.phi)
}

/// Full protocol: the fidelities are those of the state conditioned on the
/// success pointer on both arms, measured arm A first.
pub fn distribute(cfg: &DistributeConfig) -> Result<DistributeResult> {
    let state = prepare_network_state(cfg)?;
    let outcomes = cfg.outcomes();

    let first = measure_pointer_all(&state, ARM_A, &outcomes, cfg.model)?;
    let p3 = first[0].probability;
    let second = measure_pointer_all(&first[0].state, ARM_B, &outcomes, cfg.model)?;
    let p4 = second[0].probability;
    let success = &second[0].state;
    if !(p3 * p4 > 0.0) {
        return Err(Error::Measurement("success outcome has zero probability".into()));
    }

    let rho13 = reduced_density(success, (0, 2))?;
    let rho24 = reduced_density(success, (1, 3))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shot_a = sample_outcome(first, &mut rng)?;
    let all_b = measure_pointer_all(&shot_a.state, ARM_B, &outcomes, cfg.model)?;
    let shot_b = sample_outcome(all_b, &mut rng)?;

    Ok(DistributeResult {
        config: *cfg,
        f1: fidelity(&rho13, Bell::PsiPlus)?,
        f2: fidelity(&rho24, Bell::PsiPlus)?,
        p_success: p3 * p4,
        model: cfg.model,
        seed: cfg.seed,
        rho13,
        rho24,
        sampled_outcomes: [shot_a.index, shot_b.index],
        sampled_success: shot_a.index == 0 && shot_b.index == 0,
        approximation: "pure-coherent".into(),
    })
}

/// `1/(1 + e^{-(1-η) n̄ sin²(φ/2)})`, the fidelity at `M = 0` under coherent
/// projection.
pub fn closed_form_fidelity(n_bar: f64, phi: f64, eta: f64) -> f64 {
    1.0 / (1.0 + (-(1.0 - eta) * n_bar * (phi / 2.0).sin().powi(2)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI: f64 = PI / 3.0;

    #[test]
    fn coupling_phase_and_guard() {
        let c = DispersiveCoupling::for_phase(2.0 * PI * 6e9, 2.0 * PI * 5e9, 2.0 * PI * 50e6, PHI).unwrap();
        assert!((c.phase() - PHI).abs() < 1e-12);
        assert!((c.dispersive_shift() - c.coupling.powi(2) / c.detuning()).abs() < 1e-6);
        assert!(DispersiveCoupling::for_phase(2.0 * PI * 6e9, 2.0 * PI * 5.99e9, 2.0 * PI * 50e6, PHI).is_err());
        assert!(DispersiveCoupling::for_phase(2.0 * PI * 6e9, 2.0 * PI * 5e9, 2.0 * PI * 50e6, PI).is_err());
    }

    #[test]
    fn ideal_limit() {
        let r = distribute(&DistributeConfig::new(1e4, PHI, 0.0, 0.0)).unwrap();
        assert!((r.f1 - 1.0).abs() < 1e-6 && (r.f2 - 1.0).abs() < 1e-6);
        assert!((r.p_success - 0.25).abs() < 1e-3);
    }

    #[test]
    fn idealized_model_in_the_ideal_limit() {
        let mut cfg = DistributeConfig::new(1e4, PHI, 0.0, 0.0);
        cfg.model = MeasurementModel::IdealizedOrthogonal;
        let r = distribute(&cfg).unwrap();
        assert!((r.f1 - 1.0).abs() < 1e-12);
        assert!((r.p_success - 0.25).abs() < 1e-12);
    }

    #[test]
    fn finite_photon_number_leakage() {
        let r = distribute(&DistributeConfig::new(10.0, PHI, 0.0, 0.0)).unwrap();
        let want = 0.5 / (0.5 + 0.5 * (-2.5f64).exp());
        assert!((r.f1 - want).abs() < 1e-6, "{} vs {want}", r.f1);
        assert!((r.f1 - 0.924).abs() < 1e-3);
        assert!((r.f1 - r.f2).abs() < 1e-12);

        let lossy = distribute(&DistributeConfig::new(10.0, PHI, 0.0, 0.5)).unwrap();
        assert!((lossy.f1 - 1.0 / (1.0 + (-1.25f64).exp())).abs() < 1e-6);
        assert!((lossy.f1 - 0.777).abs() < 1e-3);
    }

    #[test]
    fn success_contamination_matches_overlap() {
        // Relative amplitude of the gg branch against a ge branch after
        // projecting arm A on the success pointer.
        let cfg = DistributeConfig::new(10.0, PHI, 0.0, 0.0);
        let s = prepare_network_state(&cfg).unwrap();
        let all = measure_pointer_all(&s, ARM_A, &cfg.outcomes(), cfg.model).unwrap();
        let b = all[0].state.branches();
        let c = |cfg_bits: u32| b.iter().find(|x| x.config == cfg_bits).unwrap().coefficient.norm();
        // Qubit 0 = atom 1, qubit 2 = atom 3.
        let ratio = c(0b0000) / c(0b0100);
        assert!((ratio - (-1.25f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_grows_with_photon_number_and_falls_with_loss() {
        let f = |n, eta| distribute(&DistributeConfig::new(n, PHI, 0.0, eta)).unwrap().f1;
        let by_n: Vec<f64> = [1.0, 3.0, 10.0, 30.0, 100.0].iter().map(|&n| f(n, 0.2)).collect();
        assert!(by_n.windows(2).all(|w| w[1] >= w[0]));
        let by_eta: Vec<f64> = (0..10).map(|k| f(10.0, k as f64 / 10.0)).collect();
        assert!(by_eta.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn densities_are_physical_and_symmetric_under_arm_swap() {
        let mut cfg = DistributeConfig::new(10.0, PHI, 0.2, 0.3);
        cfg.m2 = 0.05;
        let r = distribute(&cfg).unwrap();
        r.rho13.validate().unwrap();
        r.rho24.validate().unwrap();
        let swapped = distribute(&DistributeConfig { m1: cfg.m2, m2: cfg.m1, ..cfg }).unwrap();
        assert_eq!(r.f1, swapped.f2);
        assert_eq!(r.f2, swapped.f1);
    }

    #[test]
    fn removing_the_modulators_degrades_fidelity() {
        for eta in [0.0, 0.25, 0.5] {
            let without = distribute(&DistributeConfig::new(10.0, PHI, 1.0, eta)).unwrap().f1;
            let with = distribute(&DistributeConfig::new(10.0, PHI, 1e-3, eta)).unwrap().f1;
            assert!(without < with, "η = {eta}: {without} vs {with}");
        }
    }

    #[test]
    fn sampled_shot_is_reproducible() {
        let mut cfg = DistributeConfig::new(10.0, PHI, 0.0, 0.0);
        let shots: Vec<[usize; 2]> = (0..20)
            .map(|s| {
                cfg.seed = s;
                distribute(&cfg).unwrap().sampled_outcomes
            })
            .collect();
        let again: Vec<[usize; 2]> = (0..20)
            .map(|s| {
                cfg.seed = s;
                distribute(&cfg).unwrap().sampled_outcomes
            })
            .collect();
        assert_eq!(shots, again);
        assert!(shots.iter().any(|s| s != &shots[0]));
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(distribute(&DistributeConfig::new(0.0, PHI, 0.0, 0.0)), Err(Error::Config(_))));
        assert!(distribute(&DistributeConfig::new(10.0, 0.0, 0.0, 0.0)).is_err());
        assert!(distribute(&DistributeConfig::new(10.0, PHI, 1.5, 0.0)).is_err());
        assert!(distribute(&DistributeConfig::new(10.0, PHI, 0.0, 1.0)).is_err());
    }

    #[test]
    fn closed_form_reference_values() {
        assert!((closed_form_fidelity(10.0, PHI, 0.0) - 0.924).abs() < 1e-3);
        assert!((closed_form_fidelity(10.0, PHI, 0.5) - 0.777).abs() < 1e-3);
    }

    #[test]
    fn result_serializes_with_paper_field_names() {
        let r = distribute(&DistributeConfig::new(4.0, PHI, 0.0, 0.0)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["config", "F1", "F2", "p_success", "model", "seed", "rho13"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["model"], "coherent-projection");
        assert_eq!(v["rho13"].as_array().unwrap().len(), 4);
    }
}
