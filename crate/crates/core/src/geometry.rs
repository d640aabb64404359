//! Spherical-Earth hop geometry: station classes, slant range and delay.
//!
//! Elevation is always measured at the lower endpoint of a hop and is limited
//! to the swept range [10°, 90°].

use std::fmt;

use crate::error::{domain, Error, Result};

/// Mean Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Speed of light in km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

pub const MIN_ELEVATION_DEG: f64 = 10.0;
pub const MAX_ELEVATION_DEG: f64 = 90.0;

/// Platform category of a station, ordered by altitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Platform {
    GroundTerminal,
    Uav,
    Hap,
    Leo,
    Meo,
    Geo,
}

impl Platform {
    pub fn name(self) -> &'static str {
        match self {
            Platform::GroundTerminal => "ground",
            Platform::Uav => "uav",
            Platform::Hap => "hap",
            Platform::Leo => "leo",
            Platform::Meo => "meo",
            Platform::Geo => "geo",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A station placed at a given altitude together with its platform class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Station {
    pub platform: Platform,
    pub altitude_km: f64,
}

/// Altitude bands, checked in order. Each band is `(platform, low, high, low_inclusive)`
/// with an inclusive upper bound, so a shared boundary goes to the earlier band.
const BANDS: [(Platform, f64, f64, bool); 6] = [
    (Platform::GroundTerminal, 0.0, 0.0, true),
    (Platform::Uav, 0.0, 10.0, false),
    (Platform::Hap, 17.0, 25.0, true),
    (Platform::Leo, 200.0, 2000.0, true),
    (Platform::Meo, 2000.0, 35000.0, false),
    (Platform::Geo, 35700.0, 35900.0, true),
];

/// Maps an altitude onto its platform class.
pub fn classify_station(altitude_km: f64) -> Result<Station> {
    if !altitude_km.is_finite() || altitude_km < 0.0 {
        return Err(domain(format!(
            "altitude must be finite and non-negative, got {altitude_km}"
        )));
    }
    for (platform, lo, hi, lo_inclusive) in BANDS {
        let above = if lo_inclusive {
            altitude_km >= lo
        } else {
            altitude_km > lo
        };
        if above && altitude_km <= hi {
            return Ok(Station {
                platform,
                altitude_km,
            });
        }
    }
    let gap = BANDS
        .windows(2)
        .find(|w| altitude_km > w[0].2 && altitude_km < w[1].1)
        .map(|w| {
            format!(
                "({} km, {} km) between {} and {}",
                w[0].2, w[1].1, w[0].0, w[1].0
            )
        })
        .unwrap_or_else(|| format!("above {} km", BANDS[BANDS.len() - 1].2));
    Err(Error::UnclassifiableAltitude { altitude_km, gap })
}

fn check_elevation(elevation_deg: f64) -> Result<()> {
    if !(MIN_ELEVATION_DEG..=MAX_ELEVATION_DEG).contains(&elevation_deg) {
        return Err(domain(format!(
            "elevation {elevation_deg}° outside [{MIN_ELEVATION_DEG}, {MAX_ELEVATION_DEG}]"
        )));
    }
    Ok(())
}

/// Distance between two stations at `low_km` and `high_km`, seen from the
/// lower one at `elevation_deg`.
pub fn slant_range_km(low_km: f64, high_km: f64, elevation_deg: f64) -> Result<f64> {
    check_elevation(elevation_deg)?;
    if !(low_km >= 0.0 && low_km < high_km && high_km.is_finite()) {
        return Err(Error::Geometry(format!(
            "need 0 <= low < high, got low = {low_km} km, high = {high_km} km"
        )));
    }
    let r = EARTH_RADIUS_KM + low_km;
    let dh = high_km - low_km;
    let r_sin = r * elevation_deg.to_radians().sin();
    Ok((r_sin * r_sin + dh * dh + 2.0 * dh * r).sqrt() - r_sin)
}

/// One-way free-space propagation delay in milliseconds.
pub fn propagation_delay_ms(slant_range_km: f64) -> Result<f64> {
    if !(slant_range_km >= 0.0) {
        return Err(domain(format!(
            "slant range must be non-negative, got {slant_range_km}"
        )));
    }
    Ok(slant_range_km / SPEED_OF_LIGHT_KM_S * 1000.0)
}

/// Delay spread between a ground user at the footprint edge and one at the
/// footprint center for a platform at `altitude_km`.
pub fn differential_delay_ms(
    altitude_km: f64,
    edge_elevation_deg: f64,
    center_elevation_deg: f64,
) -> Result<f64> {
    if !(altitude_km > 0.0) {
        return Err(domain(format!(
            "altitude must be positive, got {altitude_km}"
        )));
    }
    if !(MIN_ELEVATION_DEG <= edge_elevation_deg
        && edge_elevation_deg < center_elevation_deg
        && center_elevation_deg <= MAX_ELEVATION_DEG)
    {
        return Err(domain(format!(
            "need 10 <= edge < center <= 90, got edge = {edge_elevation_deg}, center = {center_elevation_deg}"
        )));
    }
    let edge = slant_range_km(0.0, altitude_km, edge_elevation_deg)?;
    let center = slant_range_km(0.0, altitude_km, center_elevation_deg)?;
    propagation_delay_ms(edge - center)
}

/// Geometry of a single hop between two altitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    low_altitude_km: f64,
    high_altitude_km: f64,
    elevation_deg: f64,
    slant_range_km: f64,
    one_way_delay_ms: f64,
}

impl LinkGeometry {
    pub fn new(low_altitude_km: f64, high_altitude_km: f64, elevation_deg: f64) -> Result<Self> {
        let slant = slant_range_km(low_altitude_km, high_altitude_km, elevation_deg)?;
        Ok(Self {
            low_altitude_km,
            high_altitude_km,
            elevation_deg,
            slant_range_km: slant,
            one_way_delay_ms: propagation_delay_ms(slant)?,
        })
    }

    /// Ground terminal to a platform at `altitude_km`.
    pub fn from_ground(altitude_km: f64, elevation_deg: f64) -> Result<Self> {
        Self::new(0.0, altitude_km, elevation_deg)
    }

    pub fn low_altitude_km(&self) -> f64 {
        self.low_altitude_km
    }

    pub fn high_altitude_km(&self) -> f64 {
        self.high_altitude_km
    }

    pub fn elevation_deg(&self) -> f64 {
        self.elevation_deg
    }

    pub fn slant_range_km(&self) -> f64 {
        self.slant_range_km
    }

    pub fn one_way_delay_ms(&self) -> f64 {
        self.one_way_delay_ms
    }

    pub fn is_ground_terminated(&self) -> bool {
        self.low_altitude_km == 0.0
    }
}
