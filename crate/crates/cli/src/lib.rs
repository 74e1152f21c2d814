//! Subcommands of the `mmrelay` tool. Every command computes its results in
//! full before anything is written, so a failing run leaves no files behind.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context as _, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use mmrelay_core::analysis::{relay_throughput_mc, throughput_report, McEstimate, Z_95};
use mmrelay_core::blockage::{blockage_stats, BlockageSimulator, SimulationRun};
use mmrelay_core::channel::alignment_overhead;
use mmrelay_core::delay::{decision_region, delay_decision};
use mmrelay_core::export::{fmt_delay, fmt_num, write_region, write_table};
use mmrelay_core::rates::rate_set;
use mmrelay_core::scenario::load_scenario;
use mmrelay_core::{BlockageStats, DecisionOutcome, DelayReport, RegionGrid, ScenarioConfig, ThroughputReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";
pub const THROUGHPUT_FILE: &str = "throughput.csv";
pub const DELAY_FILE: &str = "delay.csv";
pub const SWEEP_FILE: &str = "sweep_blockage.csv";
pub const REGION_FILE: &str = "region.csv";
pub const VALIDATION_FILE: &str = "validation.csv";

/// Smallest slot count `validate` accepts.
pub const MIN_VALIDATION_SLOTS: usize = 1_000;

/// Model switches that can be forced from the command line on top of the
/// scenario file.
#[derive(Debug, Clone, Copy, Default)]
pub struct ModelFlags {
    pub paper_literal_eq12: bool,
    pub paper_literal_eq15: bool,
    pub gain_both_ends: bool,
}

/// Resolved scenario plus where results go.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: ScenarioConfig,
    pub scenario_path: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl Context {
    /// Loads `scenario` (or the built-in defaults when `None`) and applies
    /// `flags`. Flags only switch options on.
    pub fn load(scenario: Option<&Path>, flags: ModelFlags, out_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg = match scenario {
            Some(p) => load_scenario(p)?,
            None => ScenarioConfig::default(),
        };
        cfg.eq12_paper_literal |= flags.paper_literal_eq12;
        cfg.eq15_paper_literal |= flags.paper_literal_eq15;
        cfg.gain_both_ends |= flags.gain_both_ends;
        Ok(Context {
            cfg,
            scenario_path: scenario.map(Path::to_path_buf),
            out_dir: out_dir.into(),
        })
    }

    pub fn from_config(cfg: ScenarioConfig, out_dir: impl Into<PathBuf>) -> Result<Self> {
        cfg.validate()?;
        Ok(Context {
            cfg,
            scenario_path: None,
            out_dir: out_dir.into(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario_path: Option<String>,
    pub seed: Option<u64>,
    pub output_paths: Vec<String>,
    pub tool_version: String,
    pub parameters: serde_json::Value,
    pub config_echo: ScenarioConfig,
}

/// Inclusive, evenly spaced departure rates written as `min:max:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for NuRange {
    fn default() -> Self {
        NuRange {
            min: 0.5,
            max: 1.0,
            steps: 20,
        }
    }
}

impl NuRange {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for NuRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        ensure!(parts.len() == 3, "expected min:max:steps, got {s:?}");
        let min: f64 = parts[0]
            .trim()
            .parse()
            .with_context(|| format!("bad minimum in {s:?}"))?;
        let max: f64 = parts[1]
            .trim()
            .parse()
            .with_context(|| format!("bad maximum in {s:?}"))?;
        let steps: usize = parts[2]
            .trim()
            .parse()
            .with_context(|| format!("bad step count in {s:?}"))?;
        ensure!(
            min.is_finite() && min > 0.0,
            "departure rates must be positive, got {min}"
        );
        ensure!(max.is_finite() && max >= min, "maximum {max} is below minimum {min}");
        ensure!(steps >= 1, "at least one step is required");
        ensure!(steps > 1 || min == max, "a single step needs min == max");
        Ok(NuRange { min, max, steps })
    }
}

/// Monte Carlo settings shared by the sweep and the validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub slots: usize,
    pub seed: u64,
}

fn simulate(cfg: &ScenarioConfig, mc: McOptions, stream: u64) -> Result<SimulationRun> {
    Ok(BlockageSimulator::exponential(&cfg.obstacles)?.run(mc.slots, mc.seed, stream)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    write_table(create(path)?, header, rows).with_context(|| format!("cannot write {}", path.display()))
}

fn prepare_out_dir(ctx: &Context) -> Result<()> {
    fs::create_dir_all(&ctx.out_dir).with_context(|| format!("cannot create {}", ctx.out_dir.display()))
}

fn write_manifest(
    ctx: &Context,
    command: &str,
    seed: Option<u64>,
    outputs: &[PathBuf],
    parameters: serde_json::Value,
) -> Result<PathBuf> {
    let path = ctx.path(MANIFEST_FILE);
    let manifest = RunManifest {
        command: command.to_string(),
        scenario_path: ctx.scenario_path.as_ref().map(|p| p.display().to_string()),
        seed,
        output_paths: outputs.iter().map(|p| p.display().to_string()).collect(),
        tool_version: TOOL_VERSION.to_string(),
        parameters,
        config_echo: ctx.cfg.clone(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

// ---------------------------------------------------------------- run

pub const THROUGHPUT_HEADER: [&str; 16] = [
    "theta_deg",
    "blockage_fraction",
    "mean_nonlos_s",
    "mean_los_s",
    "mean_slot_s",
    "alignment_overhead_s",
    "rate_fallback_nonlos_bps",
    "rate_direct_los_bps",
    "rate_relay_bps",
    "fallback_bits_per_slot",
    "relay_bits_per_slot",
    "fallback_bps",
    "relay_bps",
    "margin_bits_per_slot",
    "overhead_exceeds_mean_slot",
    "decision",
];

pub const DELAY_HEADER: [&str; 13] = [
    "offered_load_bps",
    "rate_fallback_nonlos_bps",
    "rate_direct_los_bps",
    "rate_relay_bps",
    "service_rate_fallback_bps",
    "service_rate_relay_bps",
    "utilization_fallback_fraction",
    "utilization_relay_fraction",
    "delay_fallback_s",
    "delay_relay_s",
    "throughput_fallback_bps",
    "throughput_relay_bps",
    "decision",
];

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub throughput: ThroughputReport,
    pub delay: DelayReport,
    pub delay_outcome: DecisionOutcome,
    pub files: Vec<PathBuf>,
}

/// Long-packet throughput comparison and finite-blocklength delay
/// comparison of the scenario as given.
pub fn cmd_run(ctx: &Context) -> Result<RunOutput> {
    let cfg = &ctx.cfg;
    let throughput = throughput_report(cfg, None)?;
    let (delay, delay_outcome) = delay_decision(cfg)?;

    let d = &throughput.decision;
    let throughput_row = vec![
        fmt_num(cfg.antenna.theta_deg()),
        fmt_num(d.stats.blockage_fraction),
        fmt_num(d.stats.mean_nonlos_s),
        fmt_num(d.stats.mean_los_s),
        fmt_num(d.stats.mean_slot_s),
        fmt_num(d.alignment_overhead_s),
        fmt_num(d.rates.c_d_mu_x_bps),
        fmt_num(d.rates.c_d_m_y_bps),
        fmt_num(d.rates.c_rm_bps),
        fmt_num(throughput.fallback_bits_per_slot),
        fmt_num(throughput.relay_bits_per_slot_approx),
        fmt_num(throughput.fallback_bps()),
        fmt_num(throughput.relay_bps()),
        fmt_num(d.margin_bits_per_slot),
        throughput.overhead_exceeds_mean_slot.to_string(),
        d.choice.to_string(),
    ];
    let r = &delay_outcome.rates;
    let delay_row = vec![
        fmt_num(delay.offered_load_bps),
        fmt_num(r.c_d_mu_x_bps),
        fmt_num(r.c_d_m_y_bps),
        fmt_num(r.c_rm_bps),
        fmt_num(delay.service_rate_fallback_bps),
        fmt_num(delay.service_rate_relay_bps),
        fmt_num(delay.utilization_fallback),
        fmt_num(delay.utilization_relay),
        fmt_delay(delay.delay_fallback),
        fmt_delay(delay.delay_relay),
        fmt_num(delay.throughput_fallback_bps()),
        fmt_num(delay.throughput_relay_bps()),
        delay_outcome.choice.to_string(),
    ];

    prepare_out_dir(ctx)?;
    let mut files = vec![ctx.path(THROUGHPUT_FILE), ctx.path(DELAY_FILE)];
    write_csv(&files[0], &THROUGHPUT_HEADER, vec![throughput_row])?;
    write_csv(&files[1], &DELAY_HEADER, vec![delay_row])?;
    files.push(write_manifest(ctx, "run", None, &files, json!({}))?);
    Ok(RunOutput {
        throughput,
        delay,
        delay_outcome,
        files,
    })
}

// ---------------------------------------------------------------- sweep

pub const SWEEP_HEADER: [&str; 12] = [
    "nu_per_s",
    "blockage_fraction",
    "mean_nonlos_s",
    "mean_los_s",
    "mean_slot_s",
    "fallback_bits_per_slot",
    "relay_bits_per_slot_approx",
    "relay_bits_per_slot_mc",
    "relay_mc_half_width_bits",
    "min_sampled_slot_s",
    "margin_bits_per_slot",
    "decision",
];

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub nu_per_s: f64,
    pub report: ThroughputReport,
}

impl SweepRow {
    pub fn stats(&self) -> &BlockageStats {
        &self.report.decision.stats
    }

    fn record(&self) -> Vec<String> {
        let r = &self.report;
        let s = self.stats();
        let mc = r.relay_bits_per_slot_mc.as_ref();
        vec![
            fmt_num(self.nu_per_s),
            fmt_num(s.blockage_fraction),
            fmt_num(s.mean_nonlos_s),
            fmt_num(s.mean_los_s),
            fmt_num(s.mean_slot_s),
            fmt_num(r.fallback_bits_per_slot),
            fmt_num(r.relay_bits_per_slot_approx),
            opt_num(mc.map(|m| m.bits_per_slot)),
            opt_num(mc.map(|m| m.half_width)),
            opt_num(mc.map(|m| m.min_slot_s)),
            fmt_num(r.decision.margin_bits_per_slot),
            r.decision.choice.to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub files: Vec<PathBuf>,
}

/// Throughput of both options while the obstacle departure rate sweeps
/// `nu`. With `mc`, each point also gets a Monte Carlo relay estimate from
/// its own random stream (the point's index).
pub fn cmd_sweep_blockage(ctx: &Context, nu: NuRange, mc: Option<McOptions>) -> Result<SweepOutput> {
    let rows = sweep_rows(&ctx.cfg, &nu.values(), mc)?;

    prepare_out_dir(ctx)?;
    let mut files = vec![ctx.path(SWEEP_FILE)];
    write_csv(&files[0], &SWEEP_HEADER, rows.iter().map(SweepRow::record).collect())?;
    let params = json!({
        "nu_min_per_s": nu.min,
        "nu_max_per_s": nu.max,
        "nu_steps": nu.steps,
        "slots": mc.map(|m| m.slots),
    });
    files.push(write_manifest(
        ctx,
        "sweep-blockage",
        mc.map(|m| m.seed),
        &files,
        params,
    )?);
    Ok(SweepOutput { rows, files })
}

/// Sweep rows without writing anything.
pub fn sweep_rows(cfg: &ScenarioConfig, nus: &[f64], mc: Option<McOptions>) -> Result<Vec<SweepRow>> {
    if let Some(m) = mc {
        ensure!(m.slots > 0, "--slots must be positive");
    }
    nus.par_iter()
        .enumerate()
        .map(|(i, &nu)| {
            let c = cfg.with_nu(nu)?;
            let samples = mc.map(|m| simulate(&c, m, i as u64)).transpose()?;
            let report = throughput_report(&c, samples.as_ref().map(|s| &s.samples))?;
            Ok(SweepRow { nu_per_s: nu, report })
        })
        .collect()
}

// ---------------------------------------------------------------- region

#[derive(Debug, Clone)]
pub struct RegionOutput {
    pub grid: RegionGrid,
    pub files: Vec<PathBuf>,
}

/// Delay-optimal choice over a beamwidth by blockage-fraction grid.
pub fn cmd_region(ctx: &Context, target_rate_bps: f64, thetas_deg: &[f64], blockage: &[f64]) -> Result<RegionOutput> {
    ensure!(
        target_rate_bps.is_finite() && target_rate_bps >= 0.0,
        "target rate must be a non-negative number of bits/s, got {target_rate_bps}"
    );
    let grid = decision_region(&ctx.cfg, thetas_deg, blockage, target_rate_bps)?;

    prepare_out_dir(ctx)?;
    let mut files = vec![ctx.path(REGION_FILE)];
    write_region(create(&files[0])?, &grid).with_context(|| format!("cannot write {}", files[0].display()))?;
    let params = json!({
        "target_rate_bps": target_rate_bps,
        "theta_list_deg": thetas_deg,
        "blockage_list": blockage,
    });
    files.push(write_manifest(ctx, "region", None, &files, params)?);
    Ok(RegionOutput { grid, files })
}

// ---------------------------------------------------------------- validate

pub const VALIDATION_HEADER: [&str; 9] = [
    "quantity",
    "unit",
    "analytic",
    "monte_carlo",
    "relative_error_fraction",
    "half_width_95",
    "relative_standard_error_fraction",
    "tolerance_fraction",
    "status",
];

/// Relative tolerance floor of the moment checks.
pub const MOMENT_TOLERANCE: f64 = 0.02;
/// Relative tolerance floor of the relay-throughput approximation check.
pub const RELAY_APPROX_TOLERANCE: f64 = 0.005;
/// The applied tolerance never drops below this many standard errors.
pub const TOLERANCE_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported for reference only.
    Info,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub quantity: &'static str,
    pub unit: &'static str,
    pub analytic: f64,
    pub monte_carlo: f64,
    pub relative_error: f64,
    pub half_width: f64,
    pub relative_standard_error: f64,
    /// `None` for informational rows.
    pub tolerance: Option<f64>,
}

impl ValidationRow {
    fn new(
        quantity: &'static str,
        unit: &'static str,
        analytic: f64,
        monte_carlo: f64,
        standard_error: f64,
        base_tolerance: Option<f64>,
    ) -> Self {
        let rse = standard_error / analytic.abs();
        ValidationRow {
            quantity,
            unit,
            analytic,
            monte_carlo,
            relative_error: (monte_carlo - analytic).abs() / analytic.abs(),
            half_width: Z_95 * standard_error,
            relative_standard_error: rse,
            tolerance: base_tolerance.map(|t| t.max(TOLERANCE_SIGMAS * rse)),
        }
    }

    pub fn status(&self) -> CheckStatus {
        match self.tolerance {
            None => CheckStatus::Info,
            Some(t) if self.relative_error <= t => CheckStatus::Pass,
            Some(_) => CheckStatus::Fail,
        }
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.quantity.to_string(),
            self.unit.to_string(),
            fmt_num(self.analytic),
            fmt_num(self.monte_carlo),
            fmt_num(self.relative_error),
            fmt_num(self.half_width),
            fmt_num(self.relative_standard_error),
            opt_num(self.tolerance),
            self.status().as_str().to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct ValidationOutput {
    pub rows: Vec<ValidationRow>,
    pub relay_mc: McEstimate,
    pub files: Vec<PathBuf>,
}

impl ValidationOutput {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.status() != CheckStatus::Fail)
    }

    pub fn row(&self, quantity: &str) -> Option<&ValidationRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Ratio of sums `sum(a) / sum(b)` with its delta-method standard error.
fn ratio_and_se(a: &[f64], b: &[f64]) -> (f64, f64) {
    let n = a.len() as f64;
    let mean_b = b.iter().sum::<f64>() / n;
    let ratio = a.iter().sum::<f64>() / b.iter().sum::<f64>();
    let resid: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - ratio * y).collect();
    let (_, se_resid) = mean_and_se(&resid);
    (ratio, se_resid / mean_b)
}

/// Compares the closed-form blockage moments and relay throughput against
/// one simulated run of `mc.slots` slots.
pub fn validation_rows(cfg: &ScenarioConfig, mc: McOptions) -> Result<(Vec<ValidationRow>, McEstimate)> {
    if mc.slots < MIN_VALIDATION_SLOTS {
        bail!(
            "validation needs at least {MIN_VALIDATION_SLOTS} slots, got {}",
            mc.slots
        );
    }
    let stats = blockage_stats(&cfg.obstacles);
    let rates = rate_set(cfg)?;
    let t_a = alignment_overhead(&cfg.antenna);
    let run = simulate(cfg, mc, 0)?;
    let s = &run.samples;
    let slots: Vec<f64> = s.slot_durations().collect();

    let (mean_x, se_x) = mean_and_se(&s.nonlos_s);
    let (mean_y, se_y) = mean_and_se(&s.los_s);
    let (fraction, se_fraction) = ratio_and_se(&s.nonlos_s, &slots);
    let (occupancy, se_occupancy) = ratio_and_se(&run.occupancy_s, &slots);
    let ratios: Vec<f64> = s.nonlos_s.iter().zip(&slots).map(|(x, t)| x / t).collect();
    let (mean_ratio, se_ratio) = mean_and_se(&ratios);

    let relay = relay_throughput_mc(rates.c_rm_bps, s, t_a)?;
    let relay_approx = rates.c_rm_bps * (stats.mean_slot_s - t_a) / 2.0;

    let rows = vec![
        ValidationRow::new(
            "mean_nonlos",
            "s",
            stats.mean_nonlos_s,
            mean_x,
            se_x,
            Some(MOMENT_TOLERANCE),
        ),
        ValidationRow::new("mean_los", "s", stats.mean_los_s, mean_y, se_y, Some(MOMENT_TOLERANCE)),
        ValidationRow::new(
            "blockage_fraction",
            "fraction",
            stats.blockage_fraction,
            fraction,
            se_fraction,
            Some(MOMENT_TOLERANCE),
        ),
        ValidationRow::new(
            "mean_obstacles",
            "count",
            cfg.obstacles.load(),
            occupancy,
            se_occupancy,
            Some(MOMENT_TOLERANCE),
        ),
        ValidationRow::new(
            "relay_bits_per_slot",
            "bits",
            relay_approx,
            relay.bits_per_slot,
            relay.half_width / Z_95,
            Some(RELAY_APPROX_TOLERANCE),
        ),
        ValidationRow::new(
            "mean_blockage_ratio_per_slot",
            "fraction",
            stats.blockage_fraction,
            mean_ratio,
            se_ratio,
            None,
        ),
    ];
    Ok((rows, relay))
}

/// Writes the validation table. The caller decides the exit status from
/// [`ValidationOutput::all_passed`].
pub fn cmd_validate(ctx: &Context, mc: McOptions) -> Result<ValidationOutput> {
    let (rows, relay_mc) = validation_rows(&ctx.cfg, mc)?;

    prepare_out_dir(ctx)?;
    let mut files = vec![ctx.path(VALIDATION_FILE)];
    write_csv(
        &files[0],
        &VALIDATION_HEADER,
        rows.iter().map(ValidationRow::record).collect(),
    )?;
    files.push(write_manifest(
        ctx,
        "validate",
        Some(mc.seed),
        &files,
        json!({ "slots": mc.slots }),
    )?);
    Ok(ValidationOutput { rows, relay_mc, files })
}
