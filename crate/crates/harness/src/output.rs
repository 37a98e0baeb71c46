//! CSV emission with a JSON sidecar per file. Numbers are written in the
//! shortest representation that round-trips.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

#[derive(Serialize)]
struct Sidecar<'a> {
    scenario: &'a str,
    file: &'a str,
    columns: &'a [&'a str],
    rows: usize,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Value::is_null")]
    notes: Value,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn format_row(row: &[f64]) -> String {
    row.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.json`.
pub fn write_table(
    dir: &Path,
    name: &str,
    scenario: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
    cfg: &ExperimentConfig,
    notes: Value,
) -> Result<Vec<PathBuf>> {
    let mut text = columns.join(",");
    text.push('\n');
    for r in rows {
        text.push_str(&format_row(r));
        text.push('\n');
    }
    write_raw_csv(dir, name, scenario, columns, rows.len(), &text, cfg, notes)
}

/// Writes CSV text produced elsewhere and its sidecar.
#[allow(clippy::too_many_arguments)]
pub fn write_raw_csv(
    dir: &Path,
    name: &str,
    scenario: &str,
    columns: &[&str],
    rows: usize,
    text: &str,
    cfg: &ExperimentConfig,
    notes: Value,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let csv = dir.join(format!("{name}.csv"));
    write_text(&csv, text)?;
    let file = format!("{name}.csv");
    let side = Sidecar {
        scenario,
        file: &file,
        columns,
        rows,
        config: cfg,
        notes,
    };
    let json = dir.join(format!("{name}.json"));
    let body = serde_json::to_string_pretty(&side).expect("sidecar serializes");
    write_text(&json, &(body + "\n"))?;
    Ok(vec![csv, json])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_use_round_trip_formatting() {
        assert_eq!(format_row(&[0.1, 1e-7, 3.0, -2.5e20]), "0.1,1e-7,3.0,-2.5e20");
        let x = 0.1 + 0.2;
        assert_eq!(format_row(&[x]).parse::<f64>().unwrap(), x);
    }

    proptest::proptest! {
        #[test]
        fn every_finite_value_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            proptest::prop_assert_eq!(format_row(&[x]).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn table_and_sidecar_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::default();
        let files = write_table(
            dir.path(),
            "t",
            "test",
            &["a", "b"],
            &[vec![1.0, 2.0]],
            &cfg,
            Value::Null,
        )
        .unwrap();
        assert_eq!(fs::read_to_string(&files[0]).unwrap(), "a,b\n1.0,2.0\n");
        let side: Value = serde_json::from_str(&fs::read_to_string(&files[1]).unwrap()).unwrap();
        assert_eq!(side["rows"], 1);
        assert_eq!(side["config"]["n_bar"], 10.0);
        assert!(side.get("notes").is_none());
    }
}
