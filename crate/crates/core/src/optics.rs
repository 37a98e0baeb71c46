//! Coherent-state amplitude algebra for the two-pair network: chaotic phase
//! shifters, 50:50 beam splitters, the beam-splitter loss channel and the
//! chaos-averaged end-to-end transfer.
//!
//! Vacuum ports carry zero mean amplitude and are left out of the
//! arithmetic. The averaged transfer treats its outputs as pure coherent
//! states with reduced amplitude; power scattered into broadband components
//! is discarded rather than modelled as extra dephasing.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex amplitude α of a coherent state, with mean photon number |α|².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoherentAmplitude(pub Complex64);

impl CoherentAmplitude {
    pub const VACUUM: Self = Self(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self(Complex64::from_polar(r, theta))
    }

    /// Real amplitude `√n̄`.
    pub fn from_mean_photons(n_bar: f64) -> Result<Self> {
        if !(n_bar >= 0.0 && n_bar.is_finite()) {
            return Err(Error::Domain(format!("mean photon number must be >= 0, got {n_bar}")));
        }
        Ok(Self::new(n_bar.sqrt(), 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn mean_photons(self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn is_finite(self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }
}

impl From<Complex64> for CoherentAmplitude {
    fn from(z: Complex64) -> Self {
        Self(z)
    }
}

impl Add for CoherentAmplitude {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(self.0 + o.0)
    }
}

impl Sub for CoherentAmplitude {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(self.0 - o.0)
    }
}

impl Neg for CoherentAmplitude {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul<f64> for CoherentAmplitude {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self(self.0 * k)
    }
}

impl Mul<Complex64> for CoherentAmplitude {
    type Output = Self;
    fn mul(self, k: Complex64) -> Self {
        Self(self.0 * k)
    }
}

/// Chaos-averaged correction factors of the two pairs and the channel decay
/// rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkFactors {
    pub m1: f64,
    pub m2: f64,
    pub eta: f64,
}

impl NetworkFactors {
    /// Accepts `M ∈ [0, 1]`; `M = 0` is the infinite-bandwidth limit.
    pub fn new(m1: f64, m2: f64, eta: f64) -> Result<Self> {
        let f = Self { m1, m2, eta };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("M1", self.m1), ("M2", self.m2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        check_eta(self.eta)
    }

    /// Cross-talk weight `√(M1 M2)`.
    pub fn cross(&self) -> f64 {
        (self.m1 * self.m2).sqrt()
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("decay rate must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

/// Phase shifter: `α e^{-iθ}`.
pub fn phase_shift(a: CoherentAmplitude, theta: f64) -> CoherentAmplitude {
    a * Complex64::from_polar(1.0, -theta)
}

/// Lossless 50:50 beam splitter: `((a + b)/√2, (a - b)/√2)`.
pub fn beam_splitter_5050(
    a: CoherentAmplitude,
    b: CoherentAmplitude,
) -> (CoherentAmplitude, CoherentAmplitude) {
    ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2)
}

/// Beam-splitter loss with a vacuum noise port: `√(1-η) α`.
pub fn loss(a: CoherentAmplitude, eta: f64) -> Result<CoherentAmplitude> {
    check_eta(eta)?;
    Ok(a * (1.0 - eta).sqrt())
}

/// Chaos-averaged network output `(α3, α4)` for inputs `(α1, α2)`.
pub fn network_transfer(
    a1: CoherentAmplitude,
    a2: CoherentAmplitude,
    f: &NetworkFactors,
) -> Result<(CoherentAmplitude, CoherentAmplitude)> {
    f.validate()?;
    let direct = 0.5 * (1.0 - f.eta).sqrt();
    let cross = 0.5 * ((1.0 - f.eta) * f.m1 * f.m2).sqrt();
    Ok((a1 * direct + a2 * cross, a2 * direct + a1 * cross))
}

/// Inner product `⟨α|β⟩` of two coherent states.
pub fn coherent_overlap(a: CoherentAmplitude, b: CoherentAmplitude) -> Complex64 {
    (-0.5 * a.0.norm_sqr() - 0.5 * b.0.norm_sqr() + a.0.conj() * b.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: CoherentAmplitude, b: CoherentAmplitude, tol: f64) -> bool {
        (a.0 - b.0).norm() <= tol
    }

    #[test]
    fn phase_shift_examples() {
        let a = CoherentAmplitude::new(1.3, -0.4);
        assert_eq!(phase_shift(a, 0.0), a);
        assert!(close(phase_shift(a, PI), -a, 1e-15));
        assert!(close(phase_shift(phase_shift(a, 0.77), -0.77), a, 1e-15));
    }

    #[test]
    fn beam_splitter_examples() {
        let one = CoherentAmplitude::new(1.0, 0.0);
        let (c, d) = beam_splitter_5050(one, one);
        assert!(close(c, CoherentAmplitude::new(2f64.sqrt(), 0.0), 1e-15));
        assert_eq!(d, CoherentAmplitude::VACUUM);
        let a = CoherentAmplitude::new(0.3, 2.0);
        let (c, d) = beam_splitter_5050(a, CoherentAmplitude::VACUUM);
        assert!(close(c, a * FRAC_1_SQRT_2, 1e-15) && close(d, a * FRAC_1_SQRT_2, 1e-15));
    }

    #[test]
    fn loss_examples() {
        let a = CoherentAmplitude::new(2.0, 1.0);
        assert_eq!(loss(a, 0.0).unwrap(), a);
        assert_eq!(loss(a, 1.0).unwrap(), CoherentAmplitude::VACUUM);
        assert!((loss(a, 0.3).unwrap().mean_photons() - 0.7 * a.mean_photons()).abs() < 1e-14);
        assert!(loss(a, 1.1).is_err());
        assert!(loss(a, -0.1).is_err());
    }

    #[test]
    fn network_transfer_examples() {
        let a1 = CoherentAmplitude::new(2.0, 0.5);
        let a2 = CoherentAmplitude::new(-1.0, 0.3);
        let f0 = NetworkFactors::new(0.0, 0.0, 0.0).unwrap();
        let (a3, a4) = network_transfer(a1, a2, &f0).unwrap();
        assert!(close(a3, a1 * 0.5, 1e-15) && close(a4, a2 * 0.5, 1e-15));

        let f1 = NetworkFactors::new(1.0, 1.0, 0.0).unwrap();
        let (a3, _) = network_transfer(
            CoherentAmplitude::new(2.0, 0.0),
            CoherentAmplitude::new(-2.0, 0.0),
            &f1,
        )
        .unwrap();
        assert_eq!(a3, CoherentAmplitude::VACUUM);

        let f = NetworkFactors::new(0.0, 0.0, 0.75).unwrap();
        let (a3, _) = network_transfer(CoherentAmplitude::new(2.0, 0.0), CoherentAmplitude::VACUUM, &f)
            .unwrap();
        assert!(close(a3, CoherentAmplitude::new(0.5, 0.0), 1e-15));
    }

    #[test]
    fn factors_are_range_checked() {
        assert!(NetworkFactors::new(1.2, 0.0, 0.0).is_err());
        assert!(NetworkFactors::new(0.0, -0.1, 0.0).is_err());
        assert!(NetworkFactors::new(0.0, 0.0, 1.5).is_err());
        assert!(NetworkFactors::new(f64::NAN, 0.0, 0.0).is_err());
    }

    /// Encode, combine on BS1, split on BS2 with a vacuum port, decode.
    fn chain(a1: CoherentAmplitude, a2: CoherentAmplitude, t1: f64, t2: f64) -> [CoherentAmplitude; 3] {
        let (a5, a6) = beam_splitter_5050(phase_shift(a1, t1), phase_shift(a2, t2));
        let (a3p, a4p) = beam_splitter_5050(a5, CoherentAmplitude::VACUUM);
        [phase_shift(a3p, -t1), phase_shift(a4p, -t2), a6]
    }

    #[test]
    fn decoding_leaves_phase_coded_cross_talk() {
        let a1 = CoherentAmplitude::new(1.0, 0.4);
        let a2 = CoherentAmplitude::new(-0.2, 1.0);
        let (t1, t2) = (0.9, -2.3);
        let [a3, a4, _] = chain(a1, a2, t1, t2);
        let c = Complex64::from_polar(1.0, t1 - t2);
        assert!(close(a3, (a1 + a2 * c) * 0.5, 1e-14));
        assert!(close(a4, (a2 + a1 * c.conj()) * 0.5, 1e-14));
    }

    #[test]
    fn equal_codes_match_unit_factor_transfer() {
        let a1 = CoherentAmplitude::new(1.5, -0.3);
        let a2 = CoherentAmplitude::new(0.7, 0.2);
        let [a3, a4, _] = chain(a1, a2, 1.7, 1.7);
        let f = NetworkFactors::new(1.0, 1.0, 0.0).unwrap();
        let (b3, b4) = network_transfer(a1, a2, &f).unwrap();
        assert!(close(a3, b3, 1e-14) && close(a4, b4, 1e-14));
    }

    #[test]
    fn overlap_examples() {
        let a = CoherentAmplitude::new(1.1, -0.7);
        assert!((coherent_overlap(a, a) - 1.0).norm() < 1e-15);

        let n_bar: f64 = 10.0;
        let phi = PI / 3.0;
        let half = CoherentAmplitude::new(n_bar.sqrt() / 2.0, 0.0);
        let rotated = half * Complex64::from_polar(1.0, phi);
        let sq = coherent_overlap(half, rotated).norm_sqr();
        assert!((sq - (-n_bar * (phi / 2.0).sin().powi(2)).exp()).abs() < 1e-14);
        assert!((sq - (-2.5f64).exp()).abs() < 1e-14);
        assert!((sq - 0.0821).abs() < 1e-4);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn amp() -> impl Strategy<Value = CoherentAmplitude> {
            (-5.0f64..5.0, -5.0f64..5.0).prop_map(|(r, i)| CoherentAmplitude::new(r, i))
        }

        proptest! {
            #[test]
            fn beam_splitter_conserves_energy(a in amp(), b in amp()) {
                let (c, d) = beam_splitter_5050(a, b);
                let before = a.mean_photons() + b.mean_photons();
                let after = c.mean_photons() + d.mean_photons();
                prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before));
            }

            #[test]
            fn phase_shift_preserves_magnitude(a in amp(), t in -10.0f64..10.0) {
                let b = phase_shift(a, t);
                prop_assert!((b.0.norm() - a.0.norm()).abs() <= 1e-12 * (1.0 + a.0.norm()));
            }

            #[test]
            fn loss_scales_energy(a in amp(), eta in 0.0f64..=1.0) {
                let b = loss(a, eta).unwrap();
                prop_assert!((b.mean_photons() - (1.0 - eta) * a.mean_photons()).abs() <= 1e-12 * (1.0 + a.mean_photons()));
            }

            /// With equal codes the two outputs plus the discarded BS1 port
            /// hold all of the input energy.
            #[test]
            fn unit_factors_conserve_energy(a in amp(), b in amp()) {
                let f = NetworkFactors::new(1.0, 1.0, 0.0).unwrap();
                let (c, d) = network_transfer(a, b, &f).unwrap();
                let (_, a6) = beam_splitter_5050(a, b);
                let out = c.mean_photons() + d.mean_photons() + a6.mean_photons();
                let total = a.mean_photons() + b.mean_photons();
                prop_assert!((out - total).abs() <= 1e-12 * (1.0 + total));
            }

            #[test]
            fn overlap_is_hermitian_and_bounded(a in amp(), b in amp()) {
                let ab = coherent_overlap(a, b);
                let ba = coherent_overlap(b, a);
                prop_assert!((ab - ba.conj()).norm() <= 1e-12);
                prop_assert!(ab.norm() <= 1.0 + 1e-12);
                if (a.0 - b.0).norm() > 1e-3 {
                    prop_assert!(ab.norm() < 1.0);
                }
            }
        }
    }
}
