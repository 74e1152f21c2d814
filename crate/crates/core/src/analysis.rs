//! Long-packet throughput of the fallback and relay options per virtual
//! time slot, and the throughput-optimal choice between them.
//!
//! * fallback: `C_dμX E[X] + C_dmY E[Y]`
//! * relay: `C_rm max((X + Y - T_a)/2, 0)`, approximated in expectation by
//!   `C_rm (E[T] - T_a)/2` when every slot outlasts the alignment time.
//!
//! The decision compares `(C_rm/2) T_a` with
//! `(C_rm/2 - C_dμX) E[X] + (C_rm/2 - C_dmY) E[Y]`; fallback wins when the
//! left side is larger.

use std::fmt;

use crate::blockage::{blockage_stats, nu_for_blockage_fraction, BlockageStats, PeriodSamples};
use crate::channel::alignment_overhead;
use crate::error::{Error, Result};
use crate::rates::{rate_set, RateSet};
use crate::scenario::{ObstacleProcess, ScenarioConfig};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Choice {
    Fallback,
    Relay,
    Tie,
    Infeasible,
}

impl Choice {
    pub fn as_str(self) -> &'static str {
        match self {
            Choice::Fallback => "fallback",
            Choice::Relay => "relay",
            Choice::Tie => "tie",
            Choice::Infeasible => "infeasible",
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionOutcome {
    pub choice: Choice,
    /// `E[R_fallback] - E[R_relay]`, bits per slot.
    pub margin_bits_per_slot: f64,
    pub stats: BlockageStats,
    pub rates: RateSet,
    pub alignment_overhead_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayApprox {
    pub bits_per_slot: f64,
    /// `E[T] <= T_a`: the approximation has no meaning and is reported as 0.
    pub overhead_exceeds_slot: bool,
}

/// Monte Carlo estimate of the exact relay throughput.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub bits_per_slot: f64,
    /// 95% normal-approximation confidence half-width.
    pub half_width: f64,
    /// Fraction of slots with `T_i <= T_a` (zero throughput).
    pub truncated_fraction: f64,
    pub min_slot_s: f64,
}

impl McEstimate {
    /// Every sampled slot outlasted the alignment overhead.
    pub fn assumption_holds(&self) -> bool {
        self.truncated_fraction == 0.0
    }
}

pub fn fallback_throughput(rates: &RateSet, stats: &BlockageStats) -> f64 {
    rates.c_d_mu_x_bps * stats.mean_nonlos_s + rates.c_d_m_y_bps * stats.mean_los_s
}

pub fn relay_throughput_approx(c_rm_bps: f64, stats: &BlockageStats, t_a_s: f64) -> RelayApprox {
    if stats.mean_slot_s <= t_a_s {
        return RelayApprox {
            bits_per_slot: 0.0,
            overhead_exceeds_slot: true,
        };
    }
    RelayApprox {
        bits_per_slot: c_rm_bps * (stats.mean_slot_s - t_a_s) / 2.0,
        overhead_exceeds_slot: false,
    }
}

/// Averages `C_rm max((X_i + Y_i - T_a)/2, 0)` over the sampled slots.
pub fn relay_throughput_mc(c_rm_bps: f64, samples: &PeriodSamples, t_a_s: f64) -> Result<McEstimate> {
    let n = samples.nonlos_s.len().min(samples.los_s.len());
    if n == 0 {
        return Err(Error::EmptySamples);
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut truncated = 0usize;
    let mut min_slot = f64::INFINITY;
    for t in samples.slot_durations() {
        min_slot = min_slot.min(t);
        let bits = if t > t_a_s {
            c_rm_bps * (t - t_a_s) / 2.0
        } else {
            truncated += 1;
            0.0
        };
        sum += bits;
        sum_sq += bits * bits;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let half_width = if n > 1 {
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        Z_95 * (var / nf).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(McEstimate {
        bits_per_slot: mean,
        half_width,
        truncated_fraction: truncated as f64 / nf,
        min_slot_s: min_slot,
    })
}

/// Both sides of the decision rule; fallback wins when `.0 > .1`.
pub fn decision_sides(rates: &RateSet, stats: &BlockageStats, t_a_s: f64) -> (f64, f64) {
    let half = rates.c_rm_bps / 2.0;
    let lhs = half * t_a_s;
    let rhs = (half - rates.c_d_mu_x_bps) * stats.mean_nonlos_s + (half - rates.c_d_m_y_bps) * stats.mean_los_s;
    (lhs, rhs)
}

pub fn throughput_decision(rates: &RateSet, stats: &BlockageStats, t_a_s: f64) -> DecisionOutcome {
    let (lhs, rhs) = decision_sides(rates, stats, t_a_s);
    let choice = match lhs.partial_cmp(&rhs) {
        Some(std::cmp::Ordering::Greater) => Choice::Fallback,
        Some(std::cmp::Ordering::Less) => Choice::Relay,
        _ => Choice::Tie,
    };
    DecisionOutcome {
        choice,
        margin_bits_per_slot: lhs - rhs,
        stats: *stats,
        rates: *rates,
        alignment_overhead_s: t_a_s,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputReport {
    pub fallback_bits_per_slot: f64,
    pub relay_bits_per_slot_approx: f64,
    pub relay_bits_per_slot_mc: Option<McEstimate>,
    /// Minimum sampled slot exceeds `T_a`; `None` without samples.
    pub assumption1_satisfied: Option<bool>,
    pub overhead_exceeds_mean_slot: bool,
    pub decision: DecisionOutcome,
}

impl ThroughputReport {
    pub fn fallback_bps(&self) -> f64 {
        self.fallback_bits_per_slot / self.decision.stats.mean_slot_s
    }

    pub fn relay_bps(&self) -> f64 {
        self.relay_bits_per_slot_approx / self.decision.stats.mean_slot_s
    }
}

/// Full long-packet comparison for a scenario, with an optional Monte Carlo
/// check of the relay approximation.
pub fn throughput_report(cfg: &ScenarioConfig, samples: Option<&PeriodSamples>) -> Result<ThroughputReport> {
    let rates = rate_set(cfg)?;
    let stats = blockage_stats(&cfg.obstacles);
    let t_a = alignment_overhead(&cfg.antenna);
    let approx = relay_throughput_approx(rates.c_rm_bps, &stats, t_a);
    let mc = samples
        .map(|s| relay_throughput_mc(rates.c_rm_bps, s, t_a))
        .transpose()?;
    Ok(ThroughputReport {
        fallback_bits_per_slot: fallback_throughput(&rates, &stats),
        relay_bits_per_slot_approx: approx.bits_per_slot,
        assumption1_satisfied: mc.map(|m| m.min_slot_s > t_a),
        relay_bits_per_slot_mc: mc,
        overhead_exceeds_mean_slot: approx.overhead_exceeds_slot,
        decision: throughput_decision(&rates, &stats, t_a),
    })
}

/// Blockage fraction in `[lo, hi]` at which the throughput decision flips,
/// found by bisection with departure rate solved from the fraction at fixed
/// arrival rate. `None` when the decision does not change sign over the range.
pub fn throughput_crossover(rates: &RateSet, lambda_per_s: f64, t_a_s: f64, lo: f64, hi: f64) -> Option<f64> {
    let margin = |f: f64| {
        let nu = nu_for_blockage_fraction(lambda_per_s, f)?;
        let stats = blockage_stats(&ObstacleProcess {
            lambda_per_s,
            nu_per_s: nu,
        });
        Some(throughput_decision(rates, &stats, t_a_s).margin_bits_per_slot)
    };
    let (mut lo, mut hi) = (lo, hi);
    let m_lo = margin(lo)?;
    let m_hi = margin(hi)?;
    if m_lo == 0.0 {
        return Some(lo);
    }
    if m_lo.signum() == m_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if margin(mid)?.signum() == m_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}
