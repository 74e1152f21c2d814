//! Short-packet delay comparison. Each option is an M/D/1 queue of bits
//! with Poisson arrivals at rate `G` and a constant service rate `S`:
//!
//! * fallback: `S = C_dμX E[X]/E[T] + C_dmY E[Y]/E[T]`
//! * relay: `S = C_rm (E[T] - T_a) / (2 E[T])`, or `C_rm / 2` in
//!   paper-literal mode
//!
//! and mean sojourn `τ = (2 - ρ) / (2 S (1 - ρ))` with `ρ = G/S`. Delays are
//! per bit, in seconds.

use std::fmt;

use rayon::prelude::*;

use crate::analysis::{Choice, DecisionOutcome};
use crate::blockage::{blockage_stats, nu_for_blockage_fraction, BlockageStats};
use crate::channel::alignment_overhead;
use crate::error::{Error, Result};
use crate::rates::{rate_set_with, RateModel, RateSet, Regime};
use crate::scenario::{ObstacleProcess, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueueDelay {
    Finite(f64),
    /// Utilization at or above 1: the queue grows without bound.
    Diverged,
}

impl QueueDelay {
    pub fn seconds(self) -> Option<f64> {
        match self {
            QueueDelay::Finite(s) => Some(s),
            QueueDelay::Diverged => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, QueueDelay::Finite(_))
    }
}

pub fn fallback_service_rate(rates: &RateSet, stats: &BlockageStats) -> f64 {
    rates.c_d_mu_x_bps * stats.mean_nonlos_s / stats.mean_slot_s
        + rates.c_d_m_y_bps * stats.mean_los_s / stats.mean_slot_s
}

/// Relay service rate. The default charges one alignment per slot, matching
/// the per-slot relay throughput; `paper_literal` drops that haircut.
pub fn relay_service_rate(c_rm_bps: f64, stats: &BlockageStats, t_a_s: f64, paper_literal: bool) -> f64 {
    if paper_literal {
        return c_rm_bps / 2.0;
    }
    if t_a_s >= stats.mean_slot_s {
        return 0.0;
    }
    c_rm_bps * (stats.mean_slot_s - t_a_s) / (2.0 * stats.mean_slot_s)
}

/// M/D/1 mean sojourn time. A zero service rate diverges for any load.
pub fn md1_delay(offered_load_bps: f64, service_rate_bps: f64) -> QueueDelay {
    if !(service_rate_bps > 0.0) {
        return QueueDelay::Diverged;
    }
    let rho = offered_load_bps / service_rate_bps;
    if rho >= 1.0 {
        return QueueDelay::Diverged;
    }
    QueueDelay::Finite((2.0 - rho) / (2.0 * service_rate_bps * (1.0 - rho)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayReport {
    pub offered_load_bps: f64,
    pub service_rate_fallback_bps: f64,
    pub service_rate_relay_bps: f64,
    pub utilization_fallback: f64,
    pub utilization_relay: f64,
    pub delay_fallback: QueueDelay,
    pub delay_relay: QueueDelay,
}

impl DelayReport {
    /// Carried throughput: the offered load while stable, else the service rate.
    pub fn throughput_fallback_bps(&self) -> f64 {
        self.offered_load_bps.min(self.service_rate_fallback_bps)
    }

    pub fn throughput_relay_bps(&self) -> f64 {
        self.offered_load_bps.min(self.service_rate_relay_bps)
    }

    /// Lower finite delay wins; one stable option beats none; ties are explicit.
    pub fn choice(&self) -> Choice {
        match (self.delay_fallback, self.delay_relay) {
            (QueueDelay::Finite(f), QueueDelay::Finite(r)) => {
                if f < r {
                    Choice::Fallback
                } else if r < f {
                    Choice::Relay
                } else {
                    Choice::Tie
                }
            }
            (QueueDelay::Finite(_), QueueDelay::Diverged) => Choice::Fallback,
            (QueueDelay::Diverged, QueueDelay::Finite(_)) => Choice::Relay,
            (QueueDelay::Diverged, QueueDelay::Diverged) => Choice::Infeasible,
        }
    }
}

fn utilization(load: f64, service: f64) -> f64 {
    if service > 0.0 {
        load / service
    } else if load > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Delay comparison from already computed rates and blockage statistics.
pub fn delay_report(
    rates: &RateSet,
    stats: &BlockageStats,
    t_a_s: f64,
    offered_load_bps: f64,
    relay_paper_literal: bool,
) -> DelayReport {
    let s_f = fallback_service_rate(rates, stats);
    let s_r = relay_service_rate(rates.c_rm_bps, stats, t_a_s, relay_paper_literal);
    DelayReport {
        offered_load_bps,
        service_rate_fallback_bps: s_f,
        service_rate_relay_bps: s_r,
        utilization_fallback: utilization(offered_load_bps, s_f),
        utilization_relay: utilization(offered_load_bps, s_r),
        delay_fallback: md1_delay(offered_load_bps, s_f),
        delay_relay: md1_delay(offered_load_bps, s_r),
    }
}

fn outcome(report: &DelayReport, rates: RateSet, stats: BlockageStats, t_a_s: f64) -> DecisionOutcome {
    let margin = match (report.delay_fallback, report.delay_relay) {
        (QueueDelay::Finite(f), QueueDelay::Finite(r)) => r - f,
        _ => f64::NAN,
    };
    DecisionOutcome {
        choice: report.choice(),
        margin_bits_per_slot: margin,
        stats,
        rates,
        alignment_overhead_s: t_a_s,
    }
}

/// Delay-optimal option for the scenario's offered load under
/// finite-blocklength rates.
///
/// The returned outcome's margin holds `delay_relay - delay_fallback` in
/// seconds (NaN when either queue diverges).
pub fn delay_decision(cfg: &ScenarioConfig) -> Result<(DelayReport, DecisionOutcome)> {
    let stats = blockage_stats(&cfg.obstacles);
    delay_decision_at(cfg, &stats, cfg.traffic.offered_load_bps)
}

/// [`delay_decision`] with explicit blockage statistics and load.
pub fn delay_decision_at(
    cfg: &ScenarioConfig,
    stats: &BlockageStats,
    offered_load_bps: f64,
) -> Result<(DelayReport, DecisionOutcome)> {
    let rates = rate_set_with(cfg, &RateModel::for_regime(cfg, Regime::ShortPacket)?)?;
    let t_a = alignment_overhead(&cfg.antenna);
    let report = delay_report(&rates, stats, t_a, offered_load_bps, cfg.eq15_paper_literal);
    Ok((report, outcome(&report, rates, *stats, t_a)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    /// Only the fallback queue is stable.
    Fallback,
    /// Only the relay queue is stable.
    Relay,
    BothFeasibleFallbackFaster,
    BothFeasibleRelayFaster,
    /// Both stable with identical delay.
    BothFeasibleTie,
    Infeasible,
}

impl RegionLabel {
    pub fn from_report(report: &DelayReport) -> Self {
        let both = report.delay_fallback.is_finite() && report.delay_relay.is_finite();
        match (report.choice(), both) {
            (Choice::Fallback, true) => RegionLabel::BothFeasibleFallbackFaster,
            (Choice::Relay, true) => RegionLabel::BothFeasibleRelayFaster,
            (Choice::Tie, _) => RegionLabel::BothFeasibleTie,
            (Choice::Fallback, false) => RegionLabel::Fallback,
            (Choice::Relay, false) => RegionLabel::Relay,
            (Choice::Infeasible, _) => RegionLabel::Infeasible,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::Fallback => "fallback",
            RegionLabel::Relay => "relay",
            RegionLabel::BothFeasibleFallbackFaster => "both-feasible-fallback-faster",
            RegionLabel::BothFeasibleRelayFaster => "both-feasible-relay-faster",
            RegionLabel::BothFeasibleTie => "both-feasible-tie",
            RegionLabel::Infeasible => "infeasible",
        }
    }

    pub fn favors_fallback(self) -> bool {
        matches!(self, RegionLabel::Fallback | RegionLabel::BothFeasibleFallbackFaster)
    }

    pub fn favors_relay(self) -> bool {
        matches!(self, RegionLabel::Relay | RegionLabel::BothFeasibleRelayFaster)
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionCell {
    pub theta_deg: f64,
    pub blockage_fraction: f64,
    pub stats: BlockageStats,
    pub label: RegionLabel,
    pub report: DelayReport,
}

/// Decision labels over a (beamwidth, blockage) grid. Cells are stored
/// row-major: all blockage values for the first beamwidth, then the next.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub theta_axis_deg: Vec<f64>,
    pub blockage_axis: Vec<f64>,
    pub cells: Vec<RegionCell>,
}

impl RegionGrid {
    pub fn cell(&self, theta_index: usize, blockage_index: usize) -> &RegionCell {
        &self.cells[theta_index * self.blockage_axis.len() + blockage_index]
    }

    pub fn column(&self, theta_index: usize) -> &[RegionCell] {
        let n = self.blockage_axis.len();
        &self.cells[theta_index * n..(theta_index + 1) * n]
    }
}

/// Labels every (beamwidth, blockage fraction) cell at the target rate.
/// Each fraction is realized by solving for the departure rate at the
/// scenario's arrival rate.
pub fn decision_region(
    cfg: &ScenarioConfig,
    theta_values_deg: &[f64],
    blockage_values: &[f64],
    target_rate_bps: f64,
) -> Result<RegionGrid> {
    let lambda = cfg.obstacles.lambda_per_s;
    let mut stats = Vec::with_capacity(blockage_values.len());
    for (column, &fraction) in blockage_values.iter().enumerate() {
        let nu = nu_for_blockage_fraction(lambda, fraction).ok_or(Error::UnrealizableBlockage {
            fraction,
            theta_deg: theta_values_deg.first().copied().unwrap_or(f64::NAN),
            column,
            lambda_per_s: lambda,
        })?;
        let mut s = blockage_stats(&ObstacleProcess {
            lambda_per_s: lambda,
            nu_per_s: nu,
        });
        s.blockage_fraction = fraction;
        stats.push(s);
    }
    decision_region_with_stats(cfg, theta_values_deg, &stats, target_rate_bps)
}

/// [`decision_region`] over directly specified blockage statistics, for
/// regimes (such as sub-second mean slots) that the scenario's arrival rate
/// cannot produce.
pub fn decision_region_with_stats(
    cfg: &ScenarioConfig,
    theta_values_deg: &[f64],
    blockage: &[BlockageStats],
    target_rate_bps: f64,
) -> Result<RegionGrid> {
    if theta_values_deg.is_empty() || blockage.is_empty() {
        return Err(Error::EmptyAxis);
    }
    let configs = theta_values_deg
        .iter()
        .map(|&t| cfg.with_theta_deg(t))
        .collect::<Result<Vec<_>>>()?;

    let cells = configs
        .par_iter()
        .zip(theta_values_deg.par_iter())
        .map(|(c, &theta_deg)| {
            blockage
                .iter()
                .map(|s| {
                    let (report, _) = delay_decision_at(c, s, target_rate_bps)?;
                    Ok(RegionCell {
                        theta_deg,
                        blockage_fraction: s.blockage_fraction,
                        stats: *s,
                        label: RegionLabel::from_report(&report),
                        report,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    Ok(RegionGrid {
        theta_axis_deg: theta_values_deg.to_vec(),
        blockage_axis: blockage.iter().map(|s| s.blockage_fraction).collect(),
        cells,
    })
}

/// One point of a delay-versus-load curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayPoint {
    pub offered_load_bps: f64,
    pub delay_fallback: QueueDelay,
    pub delay_relay: QueueDelay,
}

/// Delays of both options over a range of offered loads.
pub fn delay_curve(cfg: &ScenarioConfig, stats: &BlockageStats, loads_bps: &[f64]) -> Result<Vec<DelayPoint>> {
    loads_bps
        .iter()
        .map(|&g| {
            let (r, _) = delay_decision_at(cfg, stats, g)?;
            Ok(DelayPoint {
                offered_load_bps: g,
                delay_fallback: r.delay_fallback,
                delay_relay: r.delay_relay,
            })
        })
        .collect()
}
