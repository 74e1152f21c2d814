use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mmrelay_core::blockage::nu_for_blockage_fraction;
use mmrelay_core::scenario::write_scenario;
use mmrelay_core::ScenarioConfig;

fn mmrelay(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmrelay"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) -> Output {
    let o = mmrelay(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

/// Header plus rows of a comma-separated file without quoted fields.
fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = lines.next().unwrap();
    (header, lines.collect())
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].clone()).collect()
}

fn numbers(values: Vec<String>) -> Vec<f64> {
    values.iter().map(|v| v.parse().unwrap()).collect()
}

fn scenario_file(dir: &Path, cfg: &ScenarioConfig) -> PathBuf {
    let path = dir.join("scenario.toml");
    write_scenario(cfg, &path).unwrap();
    path
}

#[test]
fn run_defaults_choose_relay_and_write_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&["run"], &out);
    let (h, rows) = table(&out.join("throughput.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(column(&h, &rows, "decision"), ["relay"]);
    let fraction = numbers(column(&h, &rows, "blockage_fraction"))[0];
    assert!((fraction - 0.632).abs() < 1e-3);
    let (h, rows) = table(&out.join("delay.csv"));
    assert_eq!(rows.len(), 1);
    assert!(["fallback", "relay", "tie", "infeasible"].contains(&column(&h, &rows, "decision")[0].as_str()));

    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "run");
    assert_eq!(manifest["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["scenario_path"].is_null());
    assert!(manifest["seed"].is_null());
    assert_eq!(manifest["output_paths"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["config_echo"]["obstacles"]["nu_per_s"], 0.5);
    assert_eq!(manifest["config_echo"]["eq15_paper_literal"], false);
}

#[test]
fn run_low_blockage_chooses_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let nu = nu_for_blockage_fraction(0.5, 0.3).unwrap();
    let path = scenario_file(dir.path(), &ScenarioConfig::default().with_nu(nu).unwrap());
    let out = dir.path().join("out");
    ok(&["run", "--scenario", path.to_str().unwrap()], &out);
    let (h, rows) = table(&out.join("throughput.csv"));
    assert_eq!(column(&h, &rows, "decision"), ["fallback"]);
    assert!((numbers(column(&h, &rows, "blockage_fraction"))[0] - 0.3).abs() < 1e-8);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario_path"], path.to_str().unwrap());
}

#[test]
fn invalid_scenario_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "schema = 1\n[antenna]\nepsilon = 2.0\n").unwrap();
    let out = dir.path().join("out");
    for cmd in ["run", "sweep-blockage", "region", "validate"] {
        let o = mmrelay(&[cmd, "--scenario", bad.to_str().unwrap()], &out);
        assert!(!o.status.success(), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("antenna.epsilon"), "{cmd}");
        assert!(!out.exists(), "{cmd} left output behind");
    }
    let o = mmrelay(
        &["run", "--scenario", dir.path().join("missing.toml").to_str().unwrap()],
        &out,
    );
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn paper_literal_flags_reach_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("plain");
    let literal = dir.path().join("literal");
    ok(&["run"], &plain);
    ok(&["run", "--paper-literal-eq15"], &literal);
    let (h, a) = table(&plain.join("delay.csv"));
    let (_, b) = table(&literal.join("delay.csv"));
    let c_rm = numbers(column(&h, &b, "rate_relay_bps"))[0];
    let s_literal = numbers(column(&h, &b, "service_rate_relay_bps"))[0];
    let s_plain = numbers(column(&h, &a, "service_rate_relay_bps"))[0];
    assert!((s_literal - c_rm / 2.0).abs() <= 1e-8 * c_rm);
    assert!(s_plain < s_literal);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(literal.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_echo"]["eq15_paper_literal"], true);

    let both = dir.path().join("both");
    ok(&["run", "--gain-both-ends"], &both);
    let (h, t1) = table(&plain.join("throughput.csv"));
    let (_, t2) = table(&both.join("throughput.csv"));
    assert!(numbers(column(&h, &t2, "rate_direct_los_bps"))[0] > numbers(column(&h, &t1, "rate_direct_los_bps"))[0]);
}

#[test]
fn sweep_shape_matches_the_blockage_structure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&["sweep-blockage", "--nu-range", "0.5:1.0:20"], &out);
    let (h, rows) = table(&out.join("sweep_blockage.csv"));
    assert_eq!(rows.len(), 20);
    let fraction = numbers(column(&h, &rows, "blockage_fraction"));
    let fallback = numbers(column(&h, &rows, "fallback_bits_per_slot"));
    let relay = numbers(column(&h, &rows, "relay_bits_per_slot_approx"));
    let los = numbers(column(&h, &rows, "mean_los_s"));
    assert!(column(&h, &rows, "relay_bits_per_slot_mc").iter().all(String::is_empty));

    assert!(los.iter().all(|&y| y == 2.0));
    let (lo, hi) = fallback
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!((hi - lo) / hi < 0.05, "fallback spread {}", (hi - lo) / hi);

    // rows run from high to low blockage as nu grows
    for i in 1..rows.len() {
        assert!(fraction[i] < fraction[i - 1]);
        assert!(relay[i] < relay[i - 1]);
    }
    let decisions = column(&h, &rows, "decision");
    assert_eq!(decisions[0], "relay");
    assert_eq!(decisions[19], "fallback");
    assert_eq!(decisions.windows(2).filter(|w| w[0] != w[1]).count(), 1);
}

#[test]
fn sweep_with_slots_is_reproducible_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep-blockage",
        "--nu-range",
        "0.5:1.0:4",
        "--slots",
        "2000",
        "--seed",
        "11",
    ];
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    ok(&args, &a);
    ok(&args, &b);
    ok(
        &[
            "sweep-blockage",
            "--nu-range",
            "0.5:1.0:4",
            "--slots",
            "2000",
            "--seed",
            "12",
        ],
        &c,
    );
    let read = |d: &Path| fs::read(d.join("sweep_blockage.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    let (h, rows) = table(&a.join("sweep_blockage.csv"));
    let mc = numbers(column(&h, &rows, "relay_bits_per_slot_mc"));
    // each point draws from its own stream
    assert!(mc.windows(2).all(|w| w[0] != w[1]));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["parameters"]["slots"], 2000);
}

#[test]
fn sweep_rejects_bad_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for r in ["0:1:3", "1:0.5:3", "0.5:1.0", "x:1:2"] {
        assert!(
            !mmrelay(&["sweep-blockage", "--nu-range", r], &out).status.success(),
            "{r}"
        );
    }
    assert!(!out.exists());
}

#[test]
fn region_grids() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("single");
    ok(
        &[
            "region",
            "--theta-list",
            "20",
            "--blockage-list",
            "0.5",
            "--target-rate",
            "2e9",
        ],
        &single,
    );
    let (h, rows) = table(&single.join("region.csv"));
    assert_eq!(h, mmrelay_core::export::REGION_HEADER);
    assert_eq!(rows.len(), 1);

    let full = dir.path().join("full");
    ok(&["region", "--target-rate", "2e9"], &full);
    let (h, rows) = table(&full.join("region.csv"));
    assert_eq!(rows.len(), 7 * 9);
    let theta = numbers(column(&h, &rows, "theta_deg"));
    let choice = column(&h, &rows, "choice");
    // every column switches from fallback to relay at most once
    for t in [1.0, 2.0, 3.0, 5.0, 10.0, 15.0, 20.0] {
        let col: Vec<&String> = choice
            .iter()
            .zip(&theta)
            .filter(|(_, &th)| th == t)
            .map(|(c, _)| c)
            .collect();
        let relay: Vec<bool> = col
            .iter()
            .map(|c| c.ends_with("relay") || c.ends_with("relay-faster"))
            .collect();
        assert!(relay.windows(2).all(|w| w[0] <= w[1]), "theta {t}: {col:?}");
        assert!(!relay[0] && relay[8], "theta {t}: {col:?}");
    }

    let starved = dir.path().join("starved");
    ok(&["region", "--target-rate", "1e12"], &starved);
    let (h, rows) = table(&starved.join("region.csv"));
    assert!(column(&h, &rows, "choice").iter().all(|c| c == "infeasible"));
    assert!(column(&h, &rows, "delay_relay_s").iter().all(|c| c == "diverged"));
}

#[test]
fn region_rejects_unrealizable_blockage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = mmrelay(&["region", "--blockage-list", "0.5,1.0"], &out);
    assert!(!o.status.success());
    assert!(!out.exists());
}

#[test]
fn validate_default_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&["validate", "--slots", "100000", "--seed", "1"], &out);
    let (h, rows) = table(&out.join("validation.csv"));
    let quantity = column(&h, &rows, "quantity");
    let err = numbers(column(&h, &rows, "relative_error_fraction"));
    let at = |q: &str| err[quantity.iter().position(|x| x == q).unwrap()];
    assert!(at("mean_nonlos") < 0.02);
    assert!(at("relay_bits_per_slot") < 0.005);
    let status = column(&h, &rows, "status");
    assert!(status.iter().all(|s| s == "pass" || s == "info"));
}

#[test]
fn validate_scales_tolerance_with_slot_count() {
    let dir = tempfile::tempdir().unwrap();
    let (small, large) = (dir.path().join("small"), dir.path().join("large"));
    ok(&["validate", "--slots", "1000"], &small);
    ok(&["validate", "--slots", "100000"], &large);
    let (h, s) = table(&small.join("validation.csv"));
    let (_, l) = table(&large.join("validation.csv"));
    let hw_s = numbers(column(&h, &s, "half_width_95"));
    let hw_l = numbers(column(&h, &l, "half_width_95"));
    assert!(hw_s.iter().zip(&hw_l).all(|(a, b)| a > b));
    let tol_s = column(&h, &s, "tolerance_fraction");
    let tol_l = column(&h, &l, "tolerance_fraction");
    let widened = tol_s
        .iter()
        .zip(&tol_l)
        .filter(|(a, b)| !a.is_empty() && a.parse::<f64>().unwrap() > b.parse::<f64>().unwrap())
        .count();
    assert!(widened >= 1);

    let few = dir.path().join("few");
    assert!(!mmrelay(&["validate", "--slots", "999"], &few).status.success());
    assert!(!few.exists());
}

#[test]
fn headers_name_units() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&["run"], &out);
    ok(&["sweep-blockage", "--nu-range", "0.5:1:2", "--slots", "1000"], &out);
    ok(&["region", "--theta-list", "5", "--blockage-list", "0.5"], &out);
    ok(&["validate", "--slots", "1000"], &out);
    let unit_suffixes = [
        "_s",
        "_bps",
        "_fraction",
        "_deg",
        "_per_s",
        "_bits_per_slot",
        "_bits_per_slot_approx",
        "_bits_per_slot_mc",
        "_bits",
        "_95",
    ];
    let labels = [
        "decision",
        "choice",
        "quantity",
        "unit",
        "status",
        "analytic",
        "monte_carlo",
        "overhead_exceeds_mean_slot",
    ];
    for f in [
        "throughput.csv",
        "delay.csv",
        "sweep_blockage.csv",
        "region.csv",
        "validation.csv",
    ] {
        let (h, _) = table(&out.join(f));
        for name in &h {
            assert!(
                labels.contains(&name.as_str()) || unit_suffixes.iter().any(|s| name.ends_with(s)),
                "{f}: {name}"
            );
        }
    }
}
