//! Named simulation parameters, their textual forms, and resolution of a
//! parameter set into a runnable link configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::channel::{default_atmosphere_fraction, ChannelTables, LossMode, Scenario};
use crate::error::{Error, Result};
use crate::geometry::{classify_station, LinkGeometry, Platform};
use crate::linkbudget::{
    evaluate_link, Bandwidth, LinkResult, RadioConfig, RxGain, DEFAULT_G_TX_DBI,
};
use crate::relay::{evaluate_chain, RelayChain, RelayMode};

pub const DEFAULT_FC_GHZ: f64 = 20.0;
pub const DEFAULT_ALTITUDE_KM: f64 = 300.0;
pub const DEFAULT_ELEVATION_DEG: f64 = 10.0;
pub const DEFAULT_HAP_ALTITUDE_KM: f64 = 20.0;

/// Every key accepted in config, sweep-spec and fixture files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    AltitudeKm,
    FcGhz,
    ElevationDeg,
    GRxDbi,
    Scenario,
    Mode,
    TxPowerDbm,
    GTxDbi,
    NoiseTemperatureK,
    GOverTDbiPerK,
    BandwidthHz,
    HapAltitudeKm,
    AtmosphereFraction,
    LossMode,
    Seed,
}

impl Param {
    pub const ALL: [Param; 15] = [
        Param::AltitudeKm,
        Param::FcGhz,
        Param::ElevationDeg,
        Param::GRxDbi,
        Param::Scenario,
        Param::Mode,
        Param::TxPowerDbm,
        Param::GTxDbi,
        Param::NoiseTemperatureK,
        Param::GOverTDbiPerK,
        Param::BandwidthHz,
        Param::HapAltitudeKm,
        Param::AtmosphereFraction,
        Param::LossMode,
        Param::Seed,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Param::AltitudeKm => "altitude_km",
            Param::FcGhz => "fc_ghz",
            Param::ElevationDeg => "elevation_deg",
            Param::GRxDbi => "g_rx_dbi",
            Param::Scenario => "scenario",
            Param::Mode => "mode",
            Param::TxPowerDbm => "tx_power_dbm",
            Param::GTxDbi => "g_tx_dbi",
            Param::NoiseTemperatureK => "noise_temperature_k",
            Param::GOverTDbiPerK => "g_over_t_dbi_per_k",
            Param::BandwidthHz => "bandwidth_hz",
            Param::HapAltitudeKm => "hap_altitude_km",
            Param::AtmosphereFraction => "atmosphere_fraction",
            Param::LossMode => "loss_mode",
            Param::Seed => "seed",
        }
    }

    pub fn from_key(key: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.key() == key)
    }

    /// Parameters that may be swept as grid axes.
    pub fn is_axis(self) -> bool {
        matches!(
            self,
            Param::AltitudeKm
                | Param::FcGhz
                | Param::ElevationDeg
                | Param::GRxDbi
                | Param::Scenario
                | Param::Mode
        )
    }

    pub fn parse_value(self, text: &str) -> Result<Value> {
        let text = text.trim();
        let bad = |what: &str| Error::Config(format!("`{}`: {what}, got `{text}`", self.key()));
        match self {
            Param::Scenario => Ok(Value::Scenario(text.parse()?)),
            Param::Mode => Ok(Value::Mode(text.parse()?)),
            Param::LossMode => match text.to_ascii_lowercase().as_str() {
                "expected" => Ok(Value::Loss(LossKind::Expected)),
                "sampled" => Ok(Value::Loss(LossKind::Sampled)),
                _ => Err(bad("expected `expected` or `sampled`")),
            },
            Param::Seed => text
                .parse::<u64>()
                .map(Value::Seed)
                .map_err(|_| bad("expected a non-negative integer")),
            Param::BandwidthHz if text.eq_ignore_ascii_case("auto") => Ok(Value::Auto),
            Param::AtmosphereFraction if text.eq_ignore_ascii_case("auto") => Ok(Value::Auto),
            Param::BandwidthHz => parse_frequency_hz(text).map(Value::Num).ok_or_else(|| {
                bad("expected `auto` or a number with optional Hz/kHz/MHz/GHz unit")
            }),
            _ => match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Value::Num(v)),
                _ => Err(bad("expected a number")),
            },
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

fn parse_frequency_hz(text: &str) -> Option<f64> {
    let split = text
        .find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        .unwrap_or(text.len());
    let (num, unit) = text.split_at(split);
    let scale = match unit.trim().to_ascii_lowercase().as_str() {
        "" | "hz" => 1.0,
        "khz" => 1e3,
        "mhz" => 1e6,
        "ghz" => 1e9,
        _ => return None,
    };
    let v: f64 = num.trim().parse().ok()?;
    (v.is_finite()).then_some(v * scale)
}

/// Link topology evaluated at a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Topology {
    #[default]
    Direct,
    Relay(RelayMode),
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Direct => "direct",
            Topology::Relay(RelayMode::AmplifyForward) => "relay-af",
            Topology::Relay(RelayMode::DecodeForward) => "relay-df",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "direct" => Ok(Topology::Direct),
            "relay" | "relay-af" => Ok(Topology::Relay(RelayMode::AmplifyForward)),
            "relay-df" => Ok(Topology::Relay(RelayMode::DecodeForward)),
            _ => Err(Error::Config(format!(
                "unknown mode `{s}` (valid: direct, relay-af, relay-df)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    Expected,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Auto,
    Scenario(Scenario),
    Mode(Topology),
    Loss(LossKind),
    Seed(u64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Auto => f.write_str("auto"),
            Value::Scenario(s) => write!(f, "{s}"),
            Value::Mode(m) => write!(f, "{m}"),
            Value::Loss(LossKind::Expected) => f.write_str("expected"),
            Value::Loss(LossKind::Sampled) => f.write_str("sampled"),
            Value::Seed(s) => write!(f, "{s}"),
        }
    }
}

pub type ParamSet = BTreeMap<Param, Value>;

/// A fully resolved single-point configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub radio: RadioConfig,
    pub altitude_km: f64,
    pub elevation_deg: f64,
    pub scenario: Scenario,
    pub topology: Topology,
    pub hap_altitude_km: f64,
    /// `None` picks the fraction from the hop's lower altitude.
    pub atmosphere_fraction: Option<f64>,
    pub loss_mode: LossMode,
}

fn num(params: &ParamSet, p: Param) -> Option<f64> {
    match params.get(&p) {
        Some(Value::Num(v)) => Some(*v),
        _ => None,
    }
}

/// Applies defaults and cross-field rules to a parameter set. Only
/// `tx_power_dbm` is mandatory.
pub fn resolve(params: &ParamSet) -> Result<LinkConfig> {
    let tx_power_dbm = num(params, Param::TxPowerDbm)
        .ok_or_else(|| Error::MissingKey(Param::TxPowerDbm.key().into()))?;
    let fc_ghz = num(params, Param::FcGhz).unwrap_or(DEFAULT_FC_GHZ);
    let mut radio = RadioConfig::new(fc_ghz, tx_power_dbm);
    radio.g_tx_dbi = num(params, Param::GTxDbi).unwrap_or(DEFAULT_G_TX_DBI);

    let g_rx = num(params, Param::GRxDbi);
    let temp = num(params, Param::NoiseTemperatureK);
    let got = num(params, Param::GOverTDbiPerK);
    radio.rx =
        match (g_rx, temp, got) {
            (Some(_), _, Some(_)) => return Err(Error::Config(
                "set either g_rx_dbi (with noise_temperature_k) or g_over_t_dbi_per_k, not both"
                    .into(),
            )),
            (Some(g_rx_dbi), Some(noise_temperature_k), None) => RxGain::Antenna {
                g_rx_dbi,
                noise_temperature_k,
            },
            (Some(_), None, None) => {
                return Err(Error::Config(
                    "g_rx_dbi requires noise_temperature_k".into(),
                ))
            }
            (None, Some(_), _) => {
                return Err(Error::Config(
                    "noise_temperature_k only applies together with g_rx_dbi".into(),
                ))
            }
            (None, None, Some(g_over_t_dbi_per_k)) => RxGain::GOverT { g_over_t_dbi_per_k },
            (None, None, None) => radio.rx,
        };
    radio.bandwidth = match num(params, Param::BandwidthHz) {
        Some(w) => Bandwidth::Hz(w),
        None => Bandwidth::Auto,
    };
    radio.validate()?;

    let scenario = match params.get(&Param::Scenario) {
        Some(Value::Scenario(s)) => *s,
        _ => Scenario::DenseUrban,
    };
    let topology = match params.get(&Param::Mode) {
        Some(Value::Mode(m)) => *m,
        _ => Topology::Direct,
    };
    let seed = match params.get(&Param::Seed) {
        Some(Value::Seed(s)) => Some(*s),
        _ => None,
    };
    let loss_mode = match (params.get(&Param::LossMode), seed) {
        (Some(Value::Loss(LossKind::Expected)), Some(_)) => {
            return Err(Error::Config(
                "seed only applies to loss_mode = sampled".into(),
            ))
        }
        (Some(Value::Loss(LossKind::Expected)), None) => LossMode::Expected,
        (Some(Value::Loss(LossKind::Sampled)), s) => LossMode::Sampled(s.unwrap_or(0)),
        (_, Some(s)) => LossMode::Sampled(s),
        (_, None) => LossMode::Expected,
    };
    let atmosphere_fraction = num(params, Param::AtmosphereFraction);
    if let Some(f) = atmosphere_fraction {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Config(format!(
                "atmosphere_fraction must be in [0, 1], got {f}"
            )));
        }
    }
    Ok(LinkConfig {
        radio,
        altitude_km: num(params, Param::AltitudeKm).unwrap_or(DEFAULT_ALTITUDE_KM),
        elevation_deg: num(params, Param::ElevationDeg).unwrap_or(DEFAULT_ELEVATION_DEG),
        scenario,
        topology,
        hap_altitude_km: num(params, Param::HapAltitudeKm).unwrap_or(DEFAULT_HAP_ALTITUDE_KM),
        atmosphere_fraction,
        loss_mode,
    })
}

impl LinkConfig {
    /// Runs the configured direct link or HAP relay chain.
    pub fn evaluate(&self, tables: &ChannelTables) -> Result<LinkResult> {
        let platform = classify_station(self.altitude_km)?.platform;
        if platform == Platform::GroundTerminal {
            return Err(Error::Geometry(
                "platform altitude must be above ground".into(),
            ));
        }
        match self.topology {
            Topology::Direct => {
                let geometry = LinkGeometry::from_ground(self.altitude_km, self.elevation_deg)?;
                let fraction = self
                    .atmosphere_fraction
                    .unwrap_or_else(|| default_atmosphere_fraction(0.0));
                evaluate_link(
                    &geometry,
                    &self.radio,
                    self.scenario,
                    tables,
                    fraction,
                    self.loss_mode,
                )
            }
            Topology::Relay(mode) => {
                let hap = classify_station(self.hap_altitude_km)?;
                if hap.platform != Platform::Hap {
                    return Err(Error::Config(format!(
                        "relay altitude {} km is a {} station, expected hap",
                        self.hap_altitude_km, hap.platform
                    )));
                }
                let mut chain = RelayChain::via_hap(
                    self.altitude_km,
                    self.hap_altitude_km,
                    self.elevation_deg,
                    self.radio,
                    self.scenario,
                    mode,
                )?;
                chain.loss_mode = self.loss_mode;
                if let Some(f) = self.atmosphere_fraction {
                    for hop in &mut chain.hops {
                        hop.atmosphere_fraction = f;
                    }
                }
                evaluate_chain(&chain, tables)
            }
        }
    }
}
