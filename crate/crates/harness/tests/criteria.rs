//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qcdma_core::entangle::{distribute, DistributeConfig, MeasurementModel};
use qcdma_harness::scenarios::{
    channel_run, fig4_data, fig6_data, largest_exponent, oracle_data, run_fig4, run_fig5, run_fig6,
    run_oracle_check, run_sync, sync_data, ORACLE_TOLERANCE,
};
use qcdma_harness::ExperimentConfig;

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check {
        pass,
        detail: detail.into(),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn all(parts: Vec<Check>) -> Check {
    let pass = parts.iter().all(|c| c.pass);
    let detail = parts
        .iter()
        .map(|c| format!("[{}] {}", if c.pass { "ok" } else { "FAILED" }, c.detail))
        .collect::<Vec<_>>()
        .join("; ");
    check(pass, detail)
}

fn chaos_regime(cfg: &ExperimentConfig) -> Check {
    let mut parts = Vec::new();
    for bw in [50e6, 80e6] {
        let (l, t) = timed(|| largest_exponent(cfg, bw).unwrap());
        let bound = 0.02 * 2.0 * PI * bw;
        parts.push(check(
            l.abs() < bound && t.as_secs_f64() < 60.0,
            format!("{} MHz: λ = {l:.3e} /s vs bound {bound:.3e}, {:.1} s", bw / 1e6, t.as_secs_f64()),
        ));
    }
    let (l, t) = timed(|| largest_exponent(cfg, 500e6).unwrap());
    parts.push(check(
        l > 0.0 && t.as_secs_f64() < 60.0,
        format!("500 MHz: λ = {l:.3e} /s > 0, {:.1} s", t.as_secs_f64()),
    ));
    all(parts)
}

fn synchronization(cfg: &ExperimentConfig) -> Check {
    let (d, t) = timed(|| sync_data(cfg).unwrap());
    let bound = 1e-6 * d.vcc;
    check(
        d.max_after_transient < bound && t.as_secs_f64() < 10.0,
        format!(
            "max |v_c2 - ṽ_c2| after {:.0} ns = {:.3e} V (bound {bound:.1e} V), {:.2} s",
            cfg.sync.transient_s * 1e9,
            d.max_after_transient,
            t.as_secs_f64()
        ),
    )
}

fn phase_consistency(cfg: &ExperimentConfig) -> Check {
    let mut parts = Vec::new();
    for ch in 0..2 {
        let r = channel_run(cfg, 500e6, ch).unwrap();
        let root = r.m.sqrt();
        let rel = (r.phase_average - root).abs() / root;
        parts.push(check(
            rel < 0.3,
            format!(
                "500 MHz channel {}: |⟨e^iθ⟩| = {:.4}, √M = {root:.4}, relative error {rel:.2}",
                ch + 1,
                r.phase_average
            ),
        ));
    }
    let m1 = channel_run(cfg, 450e6, 0).unwrap().m;
    let m2 = channel_run(cfg, 450e6, 1).unwrap().m;
    parts.push(check(
        [m1, m2].iter().all(|m| (1e-4..=1e-2).contains(m)),
        format!("450 MHz: M1 = {m1:.3e}, M2 = {m2:.3e} in [1e-4, 1e-2]"),
    ));
    let rows = fig4_data(cfg).unwrap().rows;
    let ms: Vec<f64> = rows.iter().map(|r| r.m).collect();
    let decreasing = ms.windows(2).all(|w| w[1] <= w[0]);
    parts.push(check(
        decreasing,
        format!(
            "M along {:.0}..{:.0} MHz: {:.2e} .. {:.2e} (decreasing required)",
            rows[0].bandwidth_hz / 1e6,
            rows[rows.len() - 1].bandwidth_hz / 1e6,
            ms[0],
            ms[ms.len() - 1]
        ),
    ));
    all(parts)
}

fn ideal_limit() -> Check {
    let (r, t) = timed(|| distribute(&DistributeConfig::new(1e4, PI / 3.0, 0.0, 0.0)).unwrap());
    check(
        (r.f1 - 1.0).abs() <= 1e-6
            && (r.f2 - 1.0).abs() <= 1e-6
            && (r.p_success - 0.25).abs() <= 1e-3
            && t.as_secs_f64() < 1.0,
        format!(
            "n̄ = 1e4: F1 = {:.9}, F2 = {:.9}, p = {:.6}, {:.3} s",
            r.f1,
            r.f2,
            r.p_success,
            t.as_secs_f64()
        ),
    )
}

fn finite_n_bar(cfg: &ExperimentConfig) -> Check {
    let f = |n: f64| {
        let c = DistributeConfig {
            model: MeasurementModel::CoherentProjection,
            ..DistributeConfig::new(n, PI / 3.0, 0.0, 0.0)
        };
        distribute(&c).unwrap().f1
    };
    let expected = 0.5 / (0.5 + 0.5 * (-2.5f64).exp());
    let f10 = f(10.0);
    let curve: Vec<f64> = [1.0, 3.0, 10.0, 30.0, 100.0].iter().map(|&n| f(n)).collect();
    // Validity region: F1 >= 0.9 wherever M1M2 is well below 4/n̄ and n̄ >= 10.
    let mut worst = f64::INFINITY;
    for &m in &cfg.grids.fig5_m {
        for &n in cfg.grids.fig5_n_bar.iter().filter(|&&n| n >= 10.0) {
            if m * m * n / 4.0 <= 0.1 {
                worst = worst.min(distribute(&DistributeConfig::new(n, PI / 3.0, m, 0.0)).unwrap().f1);
            }
        }
    }
    all(vec![
        check(
            (f10 - expected).abs() <= 1e-6,
            format!("F1(n̄ = 10) = {f10:.9} vs {expected:.9}"),
        ),
        check(
            curve.windows(2).all(|w| w[1] > w[0]),
            format!("F1 over n̄ = 1, 3, 10, 30, 100: {curve:.4?}"),
        ),
        check(worst >= 0.9, format!("min F1 where M1M2·n̄/4 <= 0.1, n̄ >= 10: {worst:.4}")),
    ])
}

fn noise_robustness() -> Check {
    let mut cfg = ExperimentConfig::default();
    cfg.grids.fig6_eta = (0..10).map(|k| k as f64 / 10.0).collect();
    let rows = fig6_data(&cfg).unwrap();
    let non_increasing = rows.windows(2).all(|w| w[1].f1_with_eom <= w[0].f1_with_eom);
    let dev = rows
        .iter()
        .map(|r| (r.f1_with_eom - 1.0 / (1.0 + (-2.5 * (1.0 - r.eta)).exp())).abs())
        .fold(0.0, f64::max);
    let gap = rows
        .iter()
        .filter(|r| r.eta <= 0.5 + 1e-12)
        .map(|r| r.f1_with_eom - r.f1_no_eom)
        .fold(f64::INFINITY, f64::min);
    let below = rows.iter().all(|r| r.f1_no_eom < r.f1_with_eom);
    all(vec![
        check(non_increasing, "F1 non-increasing in η"),
        check(dev <= 1e-3, format!("max deviation from closed form {dev:.2e}")),
        check(below && gap >= 0.05, format!("no-EOM below with-EOM; min gap for η <= 0.5: {gap:.4}")),
    ])
}

fn oracle_equivalence(cfg: &ExperimentConfig) -> Check {
    let (rows, t) = timed(|| oracle_data(cfg).unwrap());
    let worst = rows.iter().map(|r| r.max_abs_diff()).fold(0.0, f64::max);
    check(
        worst <= ORACLE_TOLERANCE && rows.len() == 24 && t.as_secs_f64() < 300.0,
        format!("{} points, largest difference {worst:.2e}, {:.1} s", rows.len(), t.as_secs_f64()),
    )
}

fn csv_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn determinism(cfg: &ExperimentConfig) -> Check {
    let tmp = std::env::temp_dir().join(format!("qcdma-acceptance-{}", std::process::id()));
    let mut cfg = cfg.clone();
    cfg.grids.fig4_bandwidth_hz = vec![100e6, 450e6];
    cfg.grids.fig5_bandwidth_hz = vec![450e6];
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = tmp.join(k.to_string());
        cfg.output_dir = out.clone();
        run_fig4(&cfg, &out).unwrap();
        run_fig5(&cfg, &out).unwrap();
        run_fig6(&cfg, &out).unwrap();
        run_sync(&cfg, &out).unwrap();
        run_oracle_check(&cfg, &out).unwrap();
        runs.push(csv_bytes(&out));
    }
    let _ = fs::remove_dir_all(&tmp);
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    check(
        runs[0] == runs[1] && !names.is_empty(),
        format!("{} CSV files compared across two runs", names.len()),
    )
}

fn main() -> ExitCode {
    let cfg = ExperimentConfig::default();
    cfg.validate().unwrap();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("chaos regime classification", Box::new(|| chaos_regime(&cfg))),
        ("synchronization", Box::new(|| synchronization(&cfg))),
        ("phase-average self-consistency", Box::new(|| phase_consistency(&cfg))),
        ("ideal distribution limit", Box::new(ideal_limit)),
        ("finite-n̄ leakage", Box::new(|| finite_n_bar(&cfg))),
        ("noise robustness", Box::new(noise_robustness)),
        ("oracle equivalence", Box::new(|| oracle_equivalence(&cfg))),
        ("determinism", Box::new(|| determinism(&cfg))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let c = run();
        if !c.pass {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} :: {}",
            k + 1,
            if c.pass { "PASS" } else { "FAIL" },
            name,
            c.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
