//! Scenario configuration for the three-node (source, relay, destination)
//! setup and its TOML representation.
//!
//! Every field of a scenario file is optional except the top-level
//! `schema = 1` key; omitted values fall back to the reference indoor
//! 60 GHz setup (10 m links, 2.5 mW, 90 degree sectors, 20 degree beams,
//! epsilon 0.05, 20 us pilots, 0.5 obstacles/s arriving and leaving).
//! Angles are written in degrees and held in radians.
//!
//! ```toml
//! schema = 1
//! tx_power_mw = 2.5
//!
//! [antenna]
//! theta_deg = 1.0
//!
//! [obstacles]
//! nu_per_s = 0.75
//! ```

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: i64 = 1;

/// Slack allowed when checking `phi <= 2 pi` after a degree conversion.
const ANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Microwave,
    Mmwave,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::Microwave => "microwave",
            Band::Mmwave => "mmwave",
        })
    }
}

/// Propagation constants of one frequency band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandParams {
    pub label: Band,
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    /// Attenuation at the 1 m reference distance, dB.
    pub ref_attenuation_db: f64,
    /// Atmospheric absorption, dB/km.
    pub atmo_db_per_km: f64,
    /// Penetration loss per obstacle, dB. Only used for the microwave band;
    /// obstacles are impenetrable at mmWave.
    pub obstacle_loss_db: f64,
}

impl BandParams {
    pub fn microwave() -> Self {
        BandParams {
            label: Band::Microwave,
            carrier_ghz: 2.4,
            bandwidth_hz: 20e6,
            ref_attenuation_db: 46.7,
            atmo_db_per_km: 0.005,
            obstacle_loss_db: 0.0,
        }
    }

    pub fn mmwave() -> Self {
        BandParams {
            label: Band::Mmwave,
            carrier_ghz: 60.0,
            bandwidth_hz: 2.16e9,
            ref_attenuation_db: 68.0,
            atmo_db_per_km: 16.0,
            obstacle_loss_db: 0.0,
        }
    }

    fn validate(&self, section: &str) -> Result<()> {
        positive(&format!("{section}.carrier_ghz"), self.carrier_ghz)?;
        positive(&format!("{section}.bandwidth_hz"), self.bandwidth_hz)?;
        positive(&format!("{section}.ref_attenuation_db"), self.ref_attenuation_db)?;
        non_negative(&format!("{section}.atmo_db_per_km"), self.atmo_db_per_km)?;
        non_negative(&format!("{section}.obstacle_loss_db"), self.obstacle_loss_db)?;
        Ok(())
    }
}

/// Ideal sector antenna: constant main-lobe gain over `theta`, constant
/// side-lobe gain `epsilon` elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntennaPattern {
    /// Beam-level beamwidth, radians.
    pub theta_rad: f64,
    /// Sector-level beamwidth, radians.
    pub phi_rad: f64,
    pub epsilon: f64,
    /// Duration of one pilot transmission, seconds.
    pub pilot_time_s: f64,
}

impl Default for AntennaPattern {
    fn default() -> Self {
        AntennaPattern {
            theta_rad: 20f64.to_radians(),
            phi_rad: 90f64.to_radians(),
            epsilon: 0.05,
            pilot_time_s: 20e-6,
        }
    }
}

impl AntennaPattern {
    pub fn from_degrees(theta_deg: f64, phi_deg: f64, epsilon: f64, pilot_time_s: f64) -> Result<Self> {
        let pattern = AntennaPattern {
            theta_rad: theta_deg.to_radians(),
            phi_rad: phi_deg.to_radians(),
            epsilon,
            pilot_time_s,
        };
        pattern.validate()?;
        Ok(pattern)
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_rad.to_degrees()
    }

    pub fn phi_deg(&self) -> f64 {
        self.phi_rad.to_degrees()
    }

    pub fn validate(&self) -> Result<()> {
        positive("antenna.theta_deg", self.theta_rad)?;
        if !(self.theta_rad <= self.phi_rad) {
            return Err(Error::invalid(
                "antenna.theta_deg",
                format!(
                    "beam width {} deg exceeds sector width {} deg",
                    self.theta_deg(),
                    self.phi_deg()
                ),
            ));
        }
        if !(self.phi_rad <= TAU + ANGLE_SLACK) {
            return Err(Error::invalid("antenna.phi_deg", "must not exceed 360 deg"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(
                "antenna.epsilon",
                format!("side-lobe gain {} must lie in (0, 1)", self.epsilon),
            ));
        }
        positive("antenna.pilot_time_s", self.pilot_time_s)
    }
}

/// Link lengths in meters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Geometry {
    pub d_sd_m: f64,
    pub d_sr_m: f64,
    pub d_rd_m: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            d_sd_m: 10.0,
            d_sr_m: 10.0,
            d_rd_m: 10.0,
        }
    }
}

/// Poisson obstacle arrivals with exponential sojourns on the direct link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstacleProcess {
    pub lambda_per_s: f64,
    pub nu_per_s: f64,
}

impl Default for ObstacleProcess {
    fn default() -> Self {
        ObstacleProcess {
            lambda_per_s: 0.5,
            nu_per_s: 0.5,
        }
    }
}

impl ObstacleProcess {
    pub fn new(lambda_per_s: f64, nu_per_s: f64) -> Result<Self> {
        let proc = ObstacleProcess { lambda_per_s, nu_per_s };
        proc.validate()?;
        Ok(proc)
    }

    pub fn validate(&self) -> Result<()> {
        positive("obstacles.lambda_per_s", self.lambda_per_s)?;
        positive("obstacles.nu_per_s", self.nu_per_s)
    }

    /// Offered obstacle load `lambda / nu`, the mean number of obstacles present.
    pub fn load(&self) -> f64 {
        self.lambda_per_s / self.nu_per_s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrafficParams {
    /// Poisson bit arrival rate, bits/s.
    pub offered_load_bps: f64,
    pub packet_bits: u64,
    pub packet_error_prob: f64,
    /// `true` selects Shannon rates, `false` finite-blocklength rates.
    pub long_packet_mode: bool,
}

impl Default for TrafficParams {
    fn default() -> Self {
        TrafficParams {
            offered_load_bps: 2e9,
            packet_bits: 2000,
            packet_error_prob: 1e-3,
            long_packet_mode: true,
        }
    }
}

impl TrafficParams {
    fn validate(&self) -> Result<()> {
        non_negative("traffic.offered_load_bps", self.offered_load_bps)?;
        if self.packet_bits < 1 {
            return Err(Error::invalid("traffic.packet_bits", "must be at least 1"));
        }
        if !(self.packet_error_prob > 0.0 && self.packet_error_prob < 1.0) {
            return Err(Error::invalid(
                "traffic.packet_error_prob",
                format!("{} must lie in (0, 1)", self.packet_error_prob),
            ));
        }
        Ok(())
    }
}

/// Complete parameter set of one experiment. Immutable once validated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub microwave: BandParams,
    pub mmwave: BandParams,
    pub antenna: AntennaPattern,
    pub geometry: Geometry,
    pub obstacles: ObstacleProcess,
    pub traffic: TrafficParams,
    pub tx_power_mw: f64,
    /// Apply the main-lobe gain at both link ends (squared gain) instead of once.
    pub gain_both_ends: bool,
    /// Use the finite-blocklength rate with a `+log2(L)` term instead of `+log2(L)/(2L)`.
    pub eq12_paper_literal: bool,
    /// Use a relay service rate of `C_rm / 2` with no alignment haircut.
    pub eq15_paper_literal: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            microwave: BandParams::microwave(),
            mmwave: BandParams::mmwave(),
            antenna: AntennaPattern::default(),
            geometry: Geometry::default(),
            obstacles: ObstacleProcess::default(),
            traffic: TrafficParams::default(),
            tx_power_mw: 2.5,
            gain_both_ends: false,
            eq12_paper_literal: false,
            eq15_paper_literal: false,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.microwave.validate("microwave")?;
        self.mmwave.validate("mmwave")?;
        if self.microwave.label != Band::Microwave {
            return Err(Error::invalid("microwave.label", "must be \"microwave\""));
        }
        if self.mmwave.label != Band::Mmwave {
            return Err(Error::invalid("mmwave.label", "must be \"mmwave\""));
        }
        if !(self.microwave.bandwidth_hz < self.mmwave.bandwidth_hz) {
            return Err(Error::invalid(
                "microwave.bandwidth_hz",
                "must be narrower than the mmWave bandwidth",
            ));
        }
        self.antenna.validate()?;
        positive("geometry.d_sd_m", self.geometry.d_sd_m)?;
        positive("geometry.d_sr_m", self.geometry.d_sr_m)?;
        positive("geometry.d_rd_m", self.geometry.d_rd_m)?;
        self.obstacles.validate()?;
        self.traffic.validate()?;
        positive("tx_power_mw", self.tx_power_mw)
    }

    pub fn band(&self, band: Band) -> &BandParams {
        match band {
            Band::Microwave => &self.microwave,
            Band::Mmwave => &self.mmwave,
        }
    }

    /// Copy with a different beam-level beamwidth.
    pub fn with_theta_deg(&self, theta_deg: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.antenna.theta_rad = theta_deg.to_radians();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Copy with a different obstacle departure rate.
    pub fn with_nu(&self, nu_per_s: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.obstacles.nu_per_s = nu_per_s;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.resolve()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&ScenarioFile::from_config(self)).expect("scenario file structure always serializes")
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ScenarioConfig::from_toml_str(&text)
}

pub fn write_scenario(cfg: &ScenarioConfig, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, cfg.to_toml_string())?;
    Ok(())
}

fn positive(field: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("{value} must be positive and finite")))
    }
}

fn non_negative(field: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("{value} must be non-negative and finite"),
        ))
    }
}

/// Degree value whose conversion back to radians reproduces `rad` bit for bit.
fn degrees_exact(rad: f64) -> f64 {
    let deg = rad.to_degrees();
    let mut candidates = [
        deg,
        deg.next_up(),
        deg.next_down(),
        deg.next_up().next_up(),
        deg.next_down().next_down(),
    ]
    .into_iter();
    candidates.find(|d| d.to_radians() == rad).unwrap_or(deg)
}

// On-disk layout. Every key is optional apart from `schema`.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tx_power_mw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gain_both_ends: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eq12_paper_literal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eq15_paper_literal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    microwave: Option<BandFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mmwave: Option<BandFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    antenna: Option<AntennaFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    geometry: Option<GeometryFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    obstacles: Option<ObstacleFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    traffic: Option<TrafficFile>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandFile {
    label: Option<Band>,
    carrier_ghz: Option<f64>,
    bandwidth_hz: Option<f64>,
    ref_attenuation_db: Option<f64>,
    atmo_db_per_km: Option<f64>,
    obstacle_loss_db: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AntennaFile {
    theta_deg: Option<f64>,
    phi_deg: Option<f64>,
    epsilon: Option<f64>,
    pilot_time_s: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    d_sd_m: Option<f64>,
    d_sr_m: Option<f64>,
    d_rd_m: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstacleFile {
    lambda_per_s: Option<f64>,
    nu_per_s: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrafficFile {
    offered_load_bps: Option<f64>,
    packet_bits: Option<u64>,
    packet_error_prob: Option<f64>,
    long_packet_mode: Option<bool>,
}

impl BandFile {
    fn resolve(self, defaults: BandParams) -> BandParams {
        BandParams {
            label: self.label.unwrap_or(defaults.label),
            carrier_ghz: self.carrier_ghz.unwrap_or(defaults.carrier_ghz),
            bandwidth_hz: self.bandwidth_hz.unwrap_or(defaults.bandwidth_hz),
            ref_attenuation_db: self.ref_attenuation_db.unwrap_or(defaults.ref_attenuation_db),
            atmo_db_per_km: self.atmo_db_per_km.unwrap_or(defaults.atmo_db_per_km),
            obstacle_loss_db: self.obstacle_loss_db.unwrap_or(defaults.obstacle_loss_db),
        }
    }

    fn from_params(b: &BandParams) -> Self {
        BandFile {
            label: Some(b.label),
            carrier_ghz: Some(b.carrier_ghz),
            bandwidth_hz: Some(b.bandwidth_hz),
            ref_attenuation_db: Some(b.ref_attenuation_db),
            atmo_db_per_km: Some(b.atmo_db_per_km),
            obstacle_loss_db: Some(b.obstacle_loss_db),
        }
    }
}

impl ScenarioFile {
    fn resolve(self) -> Result<ScenarioConfig> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Schema {
                found: self.schema,
                expected: SCHEMA_VERSION,
            });
        }
        let d = ScenarioConfig::default();

        let antenna = self.antenna.unwrap_or_default();
        let antenna = AntennaPattern {
            theta_rad: antenna.theta_deg.map_or(d.antenna.theta_rad, f64::to_radians),
            phi_rad: antenna.phi_deg.map_or(d.antenna.phi_rad, f64::to_radians),
            epsilon: antenna.epsilon.unwrap_or(d.antenna.epsilon),
            pilot_time_s: antenna.pilot_time_s.unwrap_or(d.antenna.pilot_time_s),
        };
        let geometry = self.geometry.unwrap_or_default();
        let obstacles = self.obstacles.unwrap_or_default();
        let traffic = self.traffic.unwrap_or_default();

        let cfg = ScenarioConfig {
            microwave: self.microwave.unwrap_or_default().resolve(d.microwave),
            mmwave: self.mmwave.unwrap_or_default().resolve(d.mmwave),
            antenna,
            geometry: Geometry {
                d_sd_m: geometry.d_sd_m.unwrap_or(d.geometry.d_sd_m),
                d_sr_m: geometry.d_sr_m.unwrap_or(d.geometry.d_sr_m),
                d_rd_m: geometry.d_rd_m.unwrap_or(d.geometry.d_rd_m),
            },
            obstacles: ObstacleProcess {
                lambda_per_s: obstacles.lambda_per_s.unwrap_or(d.obstacles.lambda_per_s),
                nu_per_s: obstacles.nu_per_s.unwrap_or(d.obstacles.nu_per_s),
            },
            traffic: TrafficParams {
                offered_load_bps: traffic.offered_load_bps.unwrap_or(d.traffic.offered_load_bps),
                packet_bits: traffic.packet_bits.unwrap_or(d.traffic.packet_bits),
                packet_error_prob: traffic.packet_error_prob.unwrap_or(d.traffic.packet_error_prob),
                long_packet_mode: traffic.long_packet_mode.unwrap_or(d.traffic.long_packet_mode),
            },
            tx_power_mw: self.tx_power_mw.unwrap_or(d.tx_power_mw),
            gain_both_ends: self.gain_both_ends.unwrap_or(d.gain_both_ends),
            eq12_paper_literal: self.eq12_paper_literal.unwrap_or(d.eq12_paper_literal),
            eq15_paper_literal: self.eq15_paper_literal.unwrap_or(d.eq15_paper_literal),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_config(c: &ScenarioConfig) -> Self {
        ScenarioFile {
            schema: SCHEMA_VERSION,
            tx_power_mw: Some(c.tx_power_mw),
            gain_both_ends: Some(c.gain_both_ends),
            eq12_paper_literal: Some(c.eq12_paper_literal),
            eq15_paper_literal: Some(c.eq15_paper_literal),
            microwave: Some(BandFile::from_params(&c.microwave)),
            mmwave: Some(BandFile::from_params(&c.mmwave)),
            antenna: Some(AntennaFile {
                theta_deg: Some(degrees_exact(c.antenna.theta_rad)),
                phi_deg: Some(degrees_exact(c.antenna.phi_rad)),
                epsilon: Some(c.antenna.epsilon),
                pilot_time_s: Some(c.antenna.pilot_time_s),
            }),
            geometry: Some(GeometryFile {
                d_sd_m: Some(c.geometry.d_sd_m),
                d_sr_m: Some(c.geometry.d_sr_m),
                d_rd_m: Some(c.geometry.d_rd_m),
            }),
            obstacles: Some(ObstacleFile {
                lambda_per_s: Some(c.obstacles.lambda_per_s),
                nu_per_s: Some(c.obstacles.nu_per_s),
            }),
            traffic: Some(TrafficFile {
                offered_load_bps: Some(c.traffic.offered_load_bps),
                packet_bits: Some(c.traffic.packet_bits),
                packet_error_prob: Some(c.traffic.packet_error_prob),
                long_packet_mode: Some(c.traffic.long_packet_mode),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_file_gives_reference_setup() {
        let cfg = ScenarioConfig::from_toml_str("schema = 1\n").unwrap();
        assert_eq!(cfg.tx_power_mw, 2.5);
        assert!((cfg.antenna.phi_rad - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(cfg.antenna.epsilon, 0.05);
        assert_eq!(cfg.microwave.bandwidth_hz, 20e6);
        assert_eq!(cfg.mmwave.bandwidth_hz, 2.16e9);
        assert_eq!(cfg.antenna.pilot_time_s, 20e-6);
        assert_eq!(cfg.obstacles.lambda_per_s, 0.5);
        assert_eq!(cfg, ScenarioConfig::default());
    }

    #[test]
    fn epsilon_out_of_range_names_field() {
        let err = ScenarioConfig::from_toml_str("schema = 1\n[antenna]\nepsilon = 1.2\n").unwrap_err();
        match err {
            Error::Invalid { field, .. } => assert!(field.contains("epsilon"), "{field}"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn angles_are_converted_to_radians() {
        let cfg = ScenarioConfig::from_toml_str("schema = 1\n[antenna]\ntheta_deg = 20\nphi_deg = 90\n").unwrap();
        assert!((cfg.antenna.theta_rad - 0.3491).abs() < 1e-4);
        assert!((cfg.antenna.phi_rad - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn schema_key_is_required_and_checked() {
        assert!(matches!(
            ScenarioConfig::from_toml_str("tx_power_mw = 2.5\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            ScenarioConfig::from_toml_str("schema = 2\n"),
            Err(Error::Schema { found: 2, .. })
        ));
    }

    #[test]
    fn unknown_keys_and_bad_syntax_are_parse_errors() {
        assert!(matches!(
            ScenarioConfig::from_toml_str("schema = 1\n[antenna]\nbeam = 3\n"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            ScenarioConfig::from_toml_str("schema = = 1"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn invariants_rejected_at_load() {
        let cases = [
            ("[antenna]\ntheta_deg = 100\n", "antenna.theta_deg"),
            ("[antenna]\ntheta_deg = 0\n", "antenna.theta_deg"),
            ("[antenna]\nphi_deg = 400\ntheta_deg = 20\n", "antenna.phi_deg"),
            ("[antenna]\npilot_time_s = 0\n", "antenna.pilot_time_s"),
            ("[geometry]\nd_sr_m = -1\n", "geometry.d_sr_m"),
            ("[obstacles]\nnu_per_s = 0\n", "obstacles.nu_per_s"),
            ("[traffic]\npacket_error_prob = 1.0\n", "traffic.packet_error_prob"),
            ("[traffic]\npacket_bits = 0\n", "traffic.packet_bits"),
            ("[traffic]\noffered_load_bps = -1\n", "traffic.offered_load_bps"),
            ("tx_power_mw = 0\n", "tx_power_mw"),
            ("[microwave]\nbandwidth_hz = 3e9\n", "microwave.bandwidth_hz"),
            ("[mmwave]\natmo_db_per_km = -1\n", "mmwave.atmo_db_per_km"),
            ("[mmwave]\nlabel = \"microwave\"\n", "mmwave.label"),
        ];
        for (body, want) in cases {
            let text = format!("schema = 1\n{body}");
            match ScenarioConfig::from_toml_str(&text) {
                Err(Error::Invalid { field, .. }) => assert_eq!(field, want, "{body}"),
                other => panic!("{body}: expected invalid {want}, got {other:?}"),
            }
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_scenario("/nonexistent/scenario.toml"),
            Err(Error::Io { .. })
        ));
    }
}
