use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qcdma_core::entangle::{distribute, DistributeConfig, MeasurementModel};
use qcdma_core::fock_oracle::pipeline_fock;
use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::output::write_table;

pub const ORACLE_TOLERANCE: f64 = 1e-4;

const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
const PHIS: [f64; 2] = [PI / 6.0, PI / 3.0];
const ETAS: [f64; 2] = [0.0, 0.3];
const MS: [f64; 2] = [0.0, 0.25];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow {
    pub alpha: f64,
    pub phi: f64,
    pub eta: f64,
    pub m: f64,
    pub branch: [f64; 3],
    pub fock: [f64; 3],
}

impl OracleRow {
    pub fn max_abs_diff(&self) -> f64 {
        self.branch
            .iter()
            .zip(&self.fock)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Both simulators on the fixed comparison grid, always under coherent
/// projection.
pub fn oracle_data(cfg: &ExperimentConfig) -> Result<Vec<OracleRow>> {
    let mut points = Vec::new();
    for &alpha in &ALPHAS {
        for &phi in &PHIS {
            for &eta in &ETAS {
                for &m in &MS {
                    points.push((alpha, phi, eta, m));
                }
            }
        }
    }
    points
        .par_iter()
        .map(|&(alpha, phi, eta, m)| {
            let dc = DistributeConfig {
                model: MeasurementModel::CoherentProjection,
                seed: cfg.seed,
                ..DistributeConfig::new(alpha * alpha, phi, m, eta)
            };
            let b = distribute(&dc)?;
            let f = pipeline_fock(&dc)?;
            Ok(OracleRow {
                alpha,
                phi,
                eta,
                m,
                branch: [b.f1, b.f2, b.p_success],
                fock: [f.f1, f.f2, f.p_success],
            })
        })
        .collect()
}

/// Writes the comparison table, then fails if any point disagrees by more
/// than [`ORACLE_TOLERANCE`].
pub fn run_oracle_check(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let data = oracle_data(cfg)?;
    let rows: Vec<Vec<f64>> = data
        .iter()
        .map(|r| {
            vec![
                r.alpha,
                r.phi,
                r.eta,
                r.m,
                r.branch[0],
                r.fock[0],
                r.branch[1],
                r.fock[1],
                r.branch[2],
                r.fock[2],
                r.max_abs_diff(),
            ]
        })
        .collect();
    let files = write_table(
        out,
        "oracle_check",
        "oracle-check",
        &[
            "alpha", "phi", "eta", "m", "F1_branch", "F1_fock", "F2_branch", "F2_fock",
            "p_branch", "p_fock", "max_abs_diff",
        ],
        &rows,
        cfg,
        json!({ "tolerance": ORACLE_TOLERANCE }),
    )?;
    let worst = data.iter().map(OracleRow::max_abs_diff).fold(0.0, f64::max);
    if worst > ORACLE_TOLERANCE {
        return Err(HarnessError::Mismatch(format!(
            "largest difference {worst:e} exceeds {ORACLE_TOLERANCE:e}"
        )));
    }
    Ok(files)
}
