//! Deterministic link budget: path gain, ideal-sector antenna gain, thermal
//! noise, SNR, and the beam-training time needed to align beam-level beams.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::scenario::{AntennaPattern, Band, BandParams, ScenarioConfig};

pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// Thermal noise density at 290 K, zero noise figure.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Relative slack used to decide that `phi / theta` is an integer.
const RATIO_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    SourceDest,
    SourceRelay,
    RelayDest,
}

impl Link {
    pub fn distance_m(self, cfg: &ScenarioConfig) -> f64 {
        match self {
            Link::SourceDest => cfg.geometry.d_sd_m,
            Link::SourceRelay => cfg.geometry.d_sr_m,
            Link::RelayDest => cfg.geometry.d_rd_m,
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Link::SourceDest => "source->dest",
            Link::SourceRelay => "source->relay",
            Link::RelayDest => "relay->dest",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    /// Channel gain in dB; `-inf` when an obstacle blocks a mmWave link.
    pub gain_db: f64,
    pub snr_linear: f64,
    pub band: Band,
}

impl LinkBudget {
    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr_linear.log10()
    }
}

/// Channel gain in dB: reference attenuation, free-space spreading,
/// atmospheric absorption and per-obstacle penetration loss.
///
/// Absorption is `atmo_db_per_km` times the distance in km.
pub fn path_gain_db(band: &BandParams, distance_m: f64, n_obstacles: u32, obstacle_loss_db: f64) -> Result<f64> {
    if !(distance_m >= REFERENCE_DISTANCE_M) {
        return Err(Error::BelowReferenceDistance(distance_m));
    }
    let spreading = 20.0 * distance_m.log10();
    let absorption = band.atmo_db_per_km * distance_m / 1000.0;
    Ok(-band.ref_attenuation_db - spreading - absorption - f64::from(n_obstacles) * obstacle_loss_db)
}

/// Main-lobe gain of the ideal sector pattern, `(2pi - eps (2pi - theta)) / theta`.
pub fn mainlobe_gain(pattern: &AntennaPattern) -> f64 {
    let theta = pattern.theta_rad;
    (TAU - pattern.epsilon * (TAU - theta)) / theta
}

/// Number of beam-level beams per sector side, `ceil(phi / theta)`.
///
/// Ratios within a relative `1e-9` of an integer count as that integer, so
/// 90 deg / 1 deg gives 90 even though the radian quotient is not exact.
pub fn beams_per_sector(pattern: &AntennaPattern) -> u64 {
    let ratio = pattern.phi_rad / pattern.theta_rad;
    let nearest = ratio.round();
    let beams = if (ratio - nearest).abs() <= RATIO_SNAP * ratio {
        nearest
    } else {
        ratio.ceil()
    };
    beams as u64
}

/// Beam-training time `ceil(phi/theta)^2 * T_p`, seconds.
pub fn alignment_overhead(pattern: &AntennaPattern) -> f64 {
    let beams = beams_per_sector(pattern);
    (beams * beams) as f64 * pattern.pilot_time_s
}

pub fn noise_power_dbm(bandwidth_hz: f64) -> f64 {
    THERMAL_NOISE_DBM_PER_HZ + 10.0 * bandwidth_hz.log10()
}

pub fn mw_to_dbm(power_mw: f64) -> f64 {
    10.0 * power_mw.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// SNR of one link. Microwave transmits omnidirectionally (antenna factor 1);
/// mmWave applies the main-lobe gain once, or squared with `gain_both_ends`.
/// Any obstacle on a mmWave link makes it unusable (SNR 0).
pub fn link_snr(cfg: &ScenarioConfig, link: Link, band: Band, n_obstacles: u32) -> Result<LinkBudget> {
    let params = cfg.band(band);
    let distance = link.distance_m(cfg);

    if band == Band::Mmwave && n_obstacles > 0 {
        path_gain_db(params, distance, 0, 0.0)?;
        return Ok(LinkBudget {
            gain_db: f64::NEG_INFINITY,
            snr_linear: 0.0,
            band,
        });
    }

    let gain_db = path_gain_db(params, distance, n_obstacles, params.obstacle_loss_db)?;
    let antenna = match band {
        Band::Microwave => 1.0,
        Band::Mmwave if cfg.gain_both_ends => mainlobe_gain(&cfg.antenna).powi(2),
        Band::Mmwave => mainlobe_gain(&cfg.antenna),
    };
    let snr_db = mw_to_dbm(cfg.tx_power_mw) + gain_db - noise_power_dbm(params.bandwidth_hz);
    Ok(LinkBudget {
        gain_db,
        snr_linear: db_to_linear(snr_db) * antenna,
        band,
    })
}
