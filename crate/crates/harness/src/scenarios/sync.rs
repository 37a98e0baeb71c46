use std::path::{Path, PathBuf};

use qcdma_core::chaos::{
    advance, conditional_lyapunov, integrate, pecora_carroll_receive, sync_error, CircuitState,
    Drive, Trajectory,
};
use serde_json::json;

use super::circuits::{circuit_at, step_for, steps};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::write_table;
use crate::seeds::initial_state;

pub struct SyncData {
    pub tx: Trajectory,
    pub rx: Trajectory,
    pub error: Vec<f64>,
    pub max_after_transient: f64,
    pub vcc: f64,
    pub conditional_exponents: [f64; 2],
}

pub fn sync_data(cfg: &ExperimentConfig) -> Result<SyncData> {
    let p = circuit_at(cfg, cfg.bandwidth_hz)?;
    let dt = step_for(cfg, &p);
    let start = initial_state(&p, cfg.seed, 0);
    let warm = advance(&p, start, dt, steps(cfg, cfg.simulation.transient_periods))?;
    let n = (cfg.sync.duration_s / dt).round() as usize;
    let tx = integrate(&p, warm, dt, n)?;
    let [dv, di] = cfg.sync.receiver_offset;
    let rx_init = CircuitState::new(warm.v_c1, warm.v_c2 + dv, warm.i_l + di);
    let drive = Drive::from_trajectory(&tx);
    let rx = pecora_carroll_receive(&p, &drive, rx_init, dt)?;
    let err = sync_error(&tx, &rx, cfg.sync.transient_s)?;
    let conditional_exponents =
        conditional_lyapunov(&p, &drive, rx_init, dt, cfg.simulation.reorthonormalize_every_steps)?;
    Ok(SyncData {
        tx,
        rx,
        error: err.trace,
        max_after_transient: err.max_after_transient,
        vcc: p.vcc,
        conditional_exponents,
    })
}

pub fn run_sync(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let d = sync_data(cfg)?;
    let rows: Vec<Vec<f64>> = d
        .tx
        .samples()
        .iter()
        .zip(d.rx.samples())
        .zip(&d.error)
        .enumerate()
        .map(|(k, ((a, b), &e))| vec![d.tx.time(k), a.v_c2, b.v_c2, e])
        .collect();
    write_table(
        out,
        "sync",
        "sync",
        &["t", "v_c2_tx", "v_c2_rx", "error"],
        &rows,
        cfg,
        json!({
            "max_error_after_transient_v": d.max_after_transient,
            "threshold_v": 1e-6 * d.vcc,
            "conditional_exponents_per_s": d.conditional_exponents,
        }),
    )
}
