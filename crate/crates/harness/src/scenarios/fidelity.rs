use std::path::{Path, PathBuf};

use qcdma_core::entangle::{closed_form_fidelity, distribute, DistributeConfig, DistributeResult};
use rayon::prelude::*;
use serde_json::json;

use super::circuits::channel_run;
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::output::{ensure_dir, write_table, write_text};

/// Protocol parameters from the config with the given network factors.
pub fn distribute_config(cfg: &ExperimentConfig, n_bar: f64, m1: f64, m2: f64, eta: f64) -> DistributeConfig {
    DistributeConfig {
        n_bar,
        phi: cfg.phi_rad,
        m1,
        m2,
        eta,
        model: cfg.measurement_model,
        seed: cfg.seed,
    }
}

pub struct Fig5Data {
    /// `[m, n_bar, m1m2_n_bar_over_4, F1, F2, p_success]`
    pub surface: Vec<[f64; 6]>,
    /// `[bandwidth_hz, m1, m2, F1, F2, p_success]`
    pub bandwidth: Vec<[f64; 6]>,
}

pub fn fig5_data(cfg: &ExperimentConfig) -> Result<Fig5Data> {
    let g = &cfg.grids;
    let points: Vec<(f64, f64)> = g
        .fig5_m
        .iter()
        .flat_map(|&m| g.fig5_n_bar.iter().map(move |&n| (m, n)))
        .collect();
    let surface = points
        .par_iter()
        .map(|&(m, n)| {
            let r = distribute(&distribute_config(cfg, n, m, m, cfg.eta))?;
            Ok([m, n, m * m * n / 4.0, r.f1, r.f2, r.p_success])
        })
        .collect::<Result<Vec<_>>>()?;
    let bandwidth = g
        .fig5_bandwidth_hz
        .par_iter()
        .map(|&bw| {
            let m1 = channel_run(cfg, bw, 0)?.m;
            let m2 = channel_run(cfg, bw, 1)?.m;
            let r = distribute(&distribute_config(cfg, cfg.n_bar, m1, m2, cfg.eta))?;
            Ok([bw, m1, m2, r.f1, r.f2, r.p_success])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig5Data { surface, bandwidth })
}

pub fn run_fig5(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let data = fig5_data(cfg)?;
    let surface: Vec<Vec<f64>> = data.surface.iter().map(|r| r.to_vec()).collect();
    let mut files = write_table(
        out,
        "fig5_surface",
        "fig5",
        &["m", "n_bar", "m1m2_n_bar_over_4", "F1", "F2", "p_success"],
        &surface,
        cfg,
        json!({ "injection": "m1 = m2 = m" }),
    )?;
    let bandwidth: Vec<Vec<f64>> = data.bandwidth.iter().map(|r| r.to_vec()).collect();
    files.extend(write_table(
        out,
        "fig5_bandwidth",
        "fig5",
        &["bandwidth_hz", "m1", "m2", "F1", "F2", "p_success"],
        &bandwidth,
        cfg,
        json!({ "n_bar": cfg.n_bar }),
    )?);
    Ok(files)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig6Row {
    pub eta: f64,
    pub f1_ideal: f64,
    pub f1_with_eom: f64,
    pub f1_no_eom: f64,
    pub f1_closed_form: f64,
}

pub fn fig6_data(cfg: &ExperimentConfig) -> Result<Vec<Fig6Row>> {
    cfg.grids
        .fig6_eta
        .par_iter()
        .map(|&eta| {
            let with = distribute(&distribute_config(cfg, cfg.n_bar, cfg.m1, cfg.m2, eta))?;
            let without = distribute(&distribute_config(cfg, cfg.n_bar, 1.0, 1.0, eta))?;
            Ok(Fig6Row {
                eta,
                f1_ideal: 1.0,
                f1_with_eom: with.f1,
                f1_no_eom: without.f1,
                f1_closed_form: closed_form_fidelity(cfg.n_bar, cfg.phi_rad, eta),
            })
        })
        .collect()
}

pub fn run_fig6(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let rows: Vec<Vec<f64>> = fig6_data(cfg)?
        .iter()
        .map(|r| vec![r.eta, r.f1_ideal, r.f1_with_eom, r.f1_no_eom, r.f1_closed_form])
        .collect();
    write_table(
        out,
        "fig6",
        "fig6",
        &["eta", "F1_ideal", "F1_with_eom", "F1_no_eom", "F1_closed_form"],
        &rows,
        cfg,
        json!({ "with_eom": { "m1": cfg.m1, "m2": cfg.m2 }, "no_eom": { "m1": 1.0, "m2": 1.0 } }),
    )
}

pub fn run_distribute(cfg: &ExperimentConfig, out: &Path) -> Result<(DistributeResult, Vec<PathBuf>)> {
    let r = distribute(&distribute_config(cfg, cfg.n_bar, cfg.m1, cfg.m2, cfg.eta))?;
    ensure_dir(out)?;
    let path = out.join("distribute.json");
    let body = serde_json::to_string_pretty(&json!({ "result": r, "config": cfg }))
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    write_text(&path, &(body + "\n"))?;
    Ok((r, vec![path]))
}
