use std::time::{Duration, Instant};

use decoherence::scenario::{preset, presets, run_scenario, series_csv};

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn every_preset_runs_within_a_minute() {
    for p in presets() {
        let dir = tempfile::tempdir().unwrap();
        let start = Instant::now();
        let out = run_scenario(&p.scenario, dir.path()).unwrap();
        let elapsed = start.elapsed();
        println!("{:16} {:>8.2?}", p.name, elapsed);
        assert!(elapsed < Duration::from_secs(60), "{} took {elapsed:?}", p.name);
        for file in &out.files {
            assert!(file.exists());
        }
        assert!(dir.path().join(format!("{}_manifest.json", p.name)).exists());
    }
}

#[test]
fn linear_preset_classical_equals_quantum() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&preset("linear").unwrap(), dir.path()).unwrap();
    let s = &out.series;
    assert!(max_abs_diff(&s.gamma_c, &s.gamma_q) < 1e-12);
    assert!(max_abs_diff(&s.entropy_c, &s.entropy_q) < 1e-10);
}

#[test]
fn cubic_preset_decoheres_without_classical_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&preset("cubic-cat").unwrap(), dir.path()).unwrap();
    let s = &out.series;
    assert!(s.gamma_c.iter().all(|&g| g == 0.0));
    for (k, &t) in s.times.iter().enumerate() {
        if t > 0.0 {
            assert!(s.gamma_q[k] < 0.0, "t={t} gamma_q={}", s.gamma_q[k]);
        }
    }
}

#[test]
fn sine_preset_is_decoherence_free_quantum_mechanically() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&preset("sine-cat").unwrap(), dir.path()).unwrap();
    let s = &out.series;
    for (k, &t) in s.times.iter().enumerate() {
        if t > 0.0 {
            assert!(s.gamma_c[k] < 0.0, "t={t}");
            // Zero up to rounding in sin(pi).
            assert!(s.gamma_q[k].abs() < 1e-20 * s.gamma_c[k].abs(), "t={t}");
        }
    }
}

#[test]
fn identical_config_and_seed_give_identical_files() {
    for name in ["mc-validate", "saturation-scan"] {
        let scenario = preset(name).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ra = run_scenario(&scenario, a.path()).unwrap();
        run_scenario(&scenario, b.path()).unwrap();
        for file in &ra.files {
            let other = b.path().join(file.file_name().unwrap());
            assert_eq!(std::fs::read(file).unwrap(), std::fs::read(other).unwrap(), "{file:?}");
        }
    }
}

#[test]
fn different_seed_changes_only_the_oracle() {
    let mut scenario = preset("mc-validate").unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ra = run_scenario(&scenario, a.path()).unwrap();
    scenario.seed += 1;
    let rb = run_scenario(&scenario, b.path()).unwrap();
    assert_eq!(series_csv(&ra.series), series_csv(&rb.series));
    let (oa, ob) = (ra.oracle.unwrap(), rb.oracle.unwrap());
    assert_ne!(oa.monte_carlo[0].mean_re, ob.monte_carlo[0].mean_re);
}

#[test]
fn manifest_records_reproduction_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = preset("mc-validate").unwrap();
    run_scenario(&scenario, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("mc-validate_manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(m["grid"]["spacing"].as_f64().unwrap() > 0.0);
    assert_eq!(m["bath"]["n_modes"], 1);
    assert_eq!(m["mc_samples"], 100_000);
    assert_eq!(m["seed"], scenario.seed);
    assert_eq!(m["config"]["name"], "mc-validate");
}

#[test]
fn oracle_presets_agree_with_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let mc = run_scenario(&preset("mc-validate").unwrap(), dir.path()).unwrap();
    for r in mc.oracle.unwrap().monte_carlo {
        assert!(r.sigma_distance < 3.0, "{r:?}");
    }
    let fock = run_scenario(&preset("fock-validate").unwrap(), dir.path()).unwrap();
    let records = fock.oracle.unwrap().fock;
    assert_eq!(records.len(), 10);
    for r in records {
        assert!(r.modulus_error < 1e-4, "{r:?}");
    }
}

#[test]
fn scan_presets_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    run_scenario(&preset("saturation-scan").unwrap(), dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("saturation-scan_scan.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "separation,grid_points,grid_spacing,rate_classical,rate_quantum,ratio"
    );
    assert_eq!(lines.count(), 5);

    run_scenario(&preset("hbar-scan").unwrap(), dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("hbar-scan_scan.csv")).unwrap();
    let ratios: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 5);
    for r in &ratios {
        assert!((r / ratios[0] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn shipped_config_files_match_presets() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for p in presets() {
        let path = dir.join(format!("{}.json", p.name));
        let shipped = decoherence::scenario::Scenario::from_path(&path).unwrap();
        assert_eq!(shipped, p.scenario, "{path:?} is stale; regenerate with `decoherence presets --write configs`");
    }
}
