//! Per-channel random streams. Channel `c` under seed `s` always draws from
//! stream `c` of `ChaCha8(s)`, independent of sweep position or thread.

use qcdma_core::chaos::{equilibrium, CircuitParams, CircuitState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn channel_rng(seed: u64, channel: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(channel);
    rng
}

/// Starting state scattered around the equilibrium: ±0.5 V on both
/// capacitors and ±1 mA on the inductor. Voltages and currents are unchanged
/// by bandwidth rescaling, so the same channel starts from the same point at
/// every bandwidth.
pub fn initial_state(p: &CircuitParams, seed: u64, channel: u64) -> CircuitState {
    let mut rng = channel_rng(seed, channel);
    let eq = equilibrium(p);
    CircuitState::new(
        eq.v_c1 + rng.gen_range(-0.5..0.5),
        eq.v_c2 + rng.gen_range(-0.5..0.5),
        eq.i_l + rng.gen_range(-1e-3..1e-3),
    )
}
