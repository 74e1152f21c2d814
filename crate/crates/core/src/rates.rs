//! Achievable link rates.
//!
//! Long packets use Shannon capacity. Short packets use the normal
//! approximation
//!
//! ```text
//! W (log2(1+SNR) - sqrt(V/L) Q^-1(P_b) + log2(L)/(2L))
//! V = SNR/2 * (SNR+2)/(SNR+1)^2 * log2(e)
//! ```
//!
//! capped to `[0, W log2(1+SNR)]`. The `paper_literal` variant uses
//! `+log2(L)` as the last term and only clamps at zero; it exceeds capacity
//! for every `L >= 2`.

use std::f64::consts::{LOG2_E, SQRT_2};
use std::fmt;

use crate::channel::{link_snr, Link};
use crate::error::{Error, Result};
use crate::scenario::{Band, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    LongPacket,
    ShortPacket,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::LongPacket => "long-packet",
            Regime::ShortPacket => "short-packet",
        })
    }
}

/// The three rates the relay/fallback comparison needs, in bits/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    /// Microwave on the direct path, used during non-LoS periods.
    pub c_d_mu_x_bps: f64,
    /// mmWave on the direct path, used during LoS periods.
    pub c_d_m_y_bps: f64,
    /// Two-hop mmWave path through the relay.
    pub c_rm_bps: f64,
    pub regime: Regime,
}

pub fn shannon_rate(bandwidth_hz: f64, snr_linear: f64) -> f64 {
    bandwidth_hz * snr_linear.ln_1p() * LOG2_E
}

/// Inverse of the standard Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p > 0.5 {
        return Ok(-SQRT_2 * statrs::function::erf::erfc_inv(2.0 * (1.0 - p)));
    }
    Ok(SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p))
}

/// Channel dispersion `SNR/2 * (SNR+2)/(SNR+1)^2 * log2(e)`.
pub fn channel_dispersion(snr_linear: f64) -> f64 {
    let s = snr_linear;
    s / 2.0 * (s + 2.0) / ((s + 1.0) * (s + 1.0)) * LOG2_E
}

/// Spectral-efficiency terms of the normal approximation, bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalApproxTerms {
    pub capacity: f64,
    /// `sqrt(V/L) Q^-1(P_b)`, subtracted.
    pub dispersion_penalty: f64,
    /// `log2(L)/(2L)`, or `log2(L)` in paper-literal mode; added.
    pub blocklength_term: f64,
}

impl NormalApproxTerms {
    pub fn raw(&self) -> f64 {
        self.capacity - self.dispersion_penalty + self.blocklength_term
    }
}

pub fn normal_approx_terms(
    snr_linear: f64,
    packet_bits: u64,
    packet_error_prob: f64,
    paper_literal: bool,
) -> Result<NormalApproxTerms> {
    let q = q_inverse(packet_error_prob)?;
    Ok(terms_with_q(snr_linear, packet_bits, q, paper_literal))
}

fn terms_with_q(snr_linear: f64, packet_bits: u64, q: f64, paper_literal: bool) -> NormalApproxTerms {
    let l = packet_bits as f64;
    let log_l = l.log2();
    NormalApproxTerms {
        capacity: snr_linear.ln_1p() * LOG2_E,
        dispersion_penalty: (channel_dispersion(snr_linear) / l).sqrt() * q,
        blocklength_term: if paper_literal { log_l } else { log_l / (2.0 * l) },
    }
}

fn bounded_efficiency(terms: NormalApproxTerms, paper_literal: bool) -> f64 {
    let raw = terms.raw().max(0.0);
    if paper_literal {
        raw
    } else {
        raw.min(terms.capacity)
    }
}

pub fn finite_blocklength_rate(
    bandwidth_hz: f64,
    snr_linear: f64,
    packet_bits: u64,
    packet_error_prob: f64,
    paper_literal: bool,
) -> Result<f64> {
    if packet_bits < 1 {
        return Err(Error::invalid("traffic.packet_bits", "must be at least 1"));
    }
    let terms = normal_approx_terms(snr_linear, packet_bits, packet_error_prob, paper_literal)?;
    Ok(bandwidth_hz * bounded_efficiency(terms, paper_literal))
}

/// Rate formula selected by a scenario: regime plus short-packet parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateModel {
    pub regime: Regime,
    pub packet_bits: u64,
    pub packet_error_prob: f64,
    pub paper_literal: bool,
    q_inv: f64,
}

impl RateModel {
    pub fn new(regime: Regime, packet_bits: u64, packet_error_prob: f64, paper_literal: bool) -> Result<Self> {
        if packet_bits < 1 {
            return Err(Error::invalid("traffic.packet_bits", "must be at least 1"));
        }
        Ok(RateModel {
            regime,
            packet_bits,
            packet_error_prob,
            paper_literal,
            q_inv: q_inverse(packet_error_prob)?,
        })
    }

    pub fn long_packet() -> Self {
        RateModel {
            regime: Regime::LongPacket,
            packet_bits: 1,
            packet_error_prob: 0.5,
            paper_literal: false,
            q_inv: 0.0,
        }
    }

    /// The model configured by the scenario's traffic section.
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        let regime = if cfg.traffic.long_packet_mode {
            Regime::LongPacket
        } else {
            Regime::ShortPacket
        };
        Self::for_regime(cfg, regime)
    }

    pub fn for_regime(cfg: &ScenarioConfig, regime: Regime) -> Result<Self> {
        Self::new(
            regime,
            cfg.traffic.packet_bits,
            cfg.traffic.packet_error_prob,
            cfg.eq12_paper_literal,
        )
    }

    /// Bits/s/Hz at the given SNR.
    pub fn spectral_efficiency(&self, snr_linear: f64) -> f64 {
        match self.regime {
            Regime::LongPacket => snr_linear.ln_1p() * LOG2_E,
            Regime::ShortPacket => bounded_efficiency(
                terms_with_q(snr_linear, self.packet_bits, self.q_inv, self.paper_literal),
                self.paper_literal,
            ),
        }
    }

    pub fn rate(&self, bandwidth_hz: f64, snr_linear: f64) -> f64 {
        bandwidth_hz * self.spectral_efficiency(snr_linear)
    }
}

/// Two-hop rate with equal hop durations: `W * min(eff(sr), eff(rd))`.
pub fn relay_rate(bandwidth_hz: f64, snr_sr: f64, snr_rd: f64, model: &RateModel) -> f64 {
    bandwidth_hz * model.spectral_efficiency(snr_sr).min(model.spectral_efficiency(snr_rd))
}

/// Rates under the scenario's configured regime.
pub fn rate_set(cfg: &ScenarioConfig) -> Result<RateSet> {
    rate_set_with(cfg, &RateModel::from_config(cfg)?)
}

/// Microwave is evaluated with one obstacle on the direct path (it is only
/// used while the link is blocked); the direct mmWave link is evaluated in
/// LoS; the relay hops are assumed obstacle-free.
pub fn rate_set_with(cfg: &ScenarioConfig, model: &RateModel) -> Result<RateSet> {
    let mu = link_snr(cfg, Link::SourceDest, Band::Microwave, 1)?;
    let mm = link_snr(cfg, Link::SourceDest, Band::Mmwave, 0)?;
    let sr = link_snr(cfg, Link::SourceRelay, Band::Mmwave, 0)?;
    let rd = link_snr(cfg, Link::RelayDest, Band::Mmwave, 0)?;
    Ok(RateSet {
        c_d_mu_x_bps: model.rate(cfg.microwave.bandwidth_hz, mu.snr_linear),
        c_d_m_y_bps: model.rate(cfg.mmwave.bandwidth_hz, mm.snr_linear),
        c_rm_bps: relay_rate(cfg.mmwave.bandwidth_hz, sr.snr_linear, rd.snr_linear, model),
        regime: model.regime,
    })
}
