use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use mmrelay_cli::{
    cmd_region, cmd_run, cmd_sweep_blockage, cmd_validate, CheckStatus, Context, McOptions, ModelFlags, NuRange,
};

/// Blockage-aware choice between a mmWave relay and a microwave fallback.
#[derive(Parser, Debug)]
#[command(name = "mmrelay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario TOML file; built-in defaults when omitted.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Use `+log2(L)` in the finite-blocklength rate.
    #[arg(long, global = true)]
    paper_literal_eq12: bool,
    /// Use `C_rm / 2` as the relay service rate.
    #[arg(long, global = true)]
    paper_literal_eq15: bool,
    /// Apply the main-lobe gain at both link ends.
    #[arg(long, global = true)]
    gain_both_ends: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Throughput and delay comparison of one scenario.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Throughput of both options over a departure-rate sweep.
    SweepBlockage {
        #[command(flatten)]
        common: Common,
        /// Departure rates as min:max:steps (inclusive, obstacles/s).
        #[arg(long, default_value = "0.5:1.0:20")]
        nu_range: NuRange,
        /// Simulated slots per point; omit to skip the Monte Carlo column.
        #[arg(long)]
        slots: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Delay-optimal decision region over beamwidth and blockage fraction.
    Region {
        #[command(flatten)]
        common: Common,
        /// Target rate in bits/s; defaults to the scenario's offered load.
        #[arg(long)]
        target_rate: Option<f64>,
        /// Beamwidths in degrees.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,5,10,15,20")]
        theta_list: Vec<f64>,
        /// Blockage fractions in (0, 1).
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        blockage_list: Vec<f64>,
    },
    /// Closed-form blockage model against simulation.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        slots: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

impl Common {
    fn context(&self) -> Result<Context> {
        let flags = ModelFlags {
            paper_literal_eq12: self.paper_literal_eq12,
            paper_literal_eq15: self.paper_literal_eq15,
            gain_both_ends: self.gain_both_ends,
        };
        Context::load(self.scenario.as_deref(), flags, &self.out)
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { common } => {
            let out = cmd_run(&common.context()?)?;
            println!(
                "throughput: {} (margin {:.6e} bits/slot); delay: {}",
                out.throughput.decision.choice, out.throughput.decision.margin_bits_per_slot, out.delay_outcome.choice
            );
        }
        Command::SweepBlockage {
            common,
            nu_range,
            slots,
            seed,
        } => {
            let mc = slots.map(|slots| McOptions { slots, seed });
            let out = cmd_sweep_blockage(&common.context()?, nu_range, mc)?;
            println!("{} sweep points written", out.rows.len());
        }
        Command::Region {
            common,
            target_rate,
            theta_list,
            blockage_list,
        } => {
            let ctx = common.context()?;
            let target = target_rate.unwrap_or(ctx.cfg.traffic.offered_load_bps);
            let out = cmd_region(&ctx, target, &theta_list, &blockage_list)?;
            println!("{} region cells written", out.grid.cells.len());
        }
        Command::Validate { common, slots, seed } => {
            let out = cmd_validate(&common.context()?, McOptions { slots, seed })?;
            for row in &out.rows {
                println!(
                    "{:<30} {:>5}  rel err {:.3e}  tol {}",
                    row.quantity,
                    row.status().as_str(),
                    row.relative_error,
                    row.tolerance.map(|t| format!("{t:.3e}")).unwrap_or_else(|| "-".into())
                );
            }
            if !out.all_passed() {
                let failed: Vec<_> = out
                    .rows
                    .iter()
                    .filter(|r| r.status() == CheckStatus::Fail)
                    .map(|r| r.quantity)
                    .collect();
                eprintln!("validation failed: {}", failed.join(", "));
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
