//! Staged path loss for one hop: free space, atmospheric gases,
//! scintillation, and terminal clutter.

mod tables;

pub use tables::{
    table_checksum, AtmosphereTable, ChannelTables, ClutterParams, Scenario, ScenarioTable,
    ATMOSPHERE_FILE, SCENARIOS_FILE, TABLE_VERSION,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::geometry::{LinkGeometry, MAX_ELEVATION_DEG, MIN_ELEVATION_DEG};

/// FSPL constant for distance in km and frequency in GHz.
pub const FSPL_CONSTANT_DB: f64 = 92.45;

/// Exponent of the elevation scaling applied to the scintillation reference.
pub const SCINTILLATION_ELEVATION_EXPONENT: f64 = 1.2;

/// Reference elevation of the scintillation column in the atmosphere table.
pub const SCINTILLATION_REF_ELEVATION_DEG: f64 = 10.0;

/// Altitude above which a hop endpoint sits over most of the troposphere.
pub const STRATOSPHERE_FLOOR_KM: f64 = 17.0;

/// Altitude above which a hop is treated as exoatmospheric.
pub const EXOATMOSPHERE_FLOOR_KM: f64 = 100.0;

/// How the clutter term is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossMode {
    /// LOS-probability-weighted mean; smooth and deterministic.
    #[default]
    Expected,
    /// One random LOS state plus lognormal shadowing, reproducible per seed.
    Sampled(u64),
}

impl LossMode {
    pub fn name(self) -> &'static str {
        match self {
            LossMode::Expected => "expected",
            LossMode::Sampled(_) => "sampled",
        }
    }
}

/// Per-stage attenuation of one hop, all in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub fspl_db: f64,
    pub gas_db: f64,
    pub scintillation_db: f64,
    pub excess_db: f64,
    pub total_db: f64,
}

impl LossBreakdown {
    pub fn new(fspl_db: f64, gas_db: f64, scintillation_db: f64, excess_db: f64) -> Self {
        Self {
            fspl_db,
            gas_db,
            scintillation_db,
            excess_db,
            total_db: fspl_db + gas_db + scintillation_db + excess_db,
        }
    }

    /// Stage-wise sum of several breakdowns, e.g. along a relay path.
    pub fn sum<'a>(parts: impl IntoIterator<Item = &'a LossBreakdown>) -> Self {
        let (mut f, mut g, mut s, mut x) = (0.0, 0.0, 0.0, 0.0);
        for p in parts {
            f += p.fspl_db;
            g += p.gas_db;
            s += p.scintillation_db;
            x += p.excess_db;
        }
        Self::new(f, g, s, x)
    }
}

fn check_elevation(elevation_deg: f64) -> Result<()> {
    if !(MIN_ELEVATION_DEG..=MAX_ELEVATION_DEG).contains(&elevation_deg) {
        return Err(domain(format!(
            "elevation {elevation_deg}° outside [{MIN_ELEVATION_DEG}, {MAX_ELEVATION_DEG}]"
        )));
    }
    Ok(())
}

pub fn fspl_db(slant_range_km: f64, fc_ghz: f64) -> Result<f64> {
    if !(slant_range_km > 0.0 && fc_ghz > 0.0) {
        return Err(domain(format!(
            "free-space loss needs positive range and frequency, got {slant_range_km} km, {fc_ghz} GHz"
        )));
    }
    Ok(FSPL_CONSTANT_DB + 20.0 * fc_ghz.log10() + 20.0 * slant_range_km.log10())
}

/// Slant-path gas absorption: zenith attenuation scaled by csc(α).
pub fn gas_attenuation_db(fc_ghz: f64, elevation_deg: f64, table: &AtmosphereTable) -> Result<f64> {
    check_elevation(elevation_deg)?;
    Ok(table.zenith_gas_db(fc_ghz)? / elevation_deg.to_radians().sin())
}

/// Elevation scaling of the scintillation fade, normalised to 1 at 10°.
pub fn scintillation_profile(elevation_deg: f64) -> f64 {
    let reference = SCINTILLATION_REF_ELEVATION_DEG.to_radians().sin();
    (reference / elevation_deg.to_radians().sin()).powf(SCINTILLATION_ELEVATION_EXPONENT)
}

pub fn scintillation_db(fc_ghz: f64, elevation_deg: f64, table: &AtmosphereTable) -> Result<f64> {
    check_elevation(elevation_deg)?;
    let reference = table.scintillation_ref_db(fc_ghz)?;
    if elevation_deg == SCINTILLATION_REF_ELEVATION_DEG {
        return Ok(reference);
    }
    Ok(reference * scintillation_profile(elevation_deg))
}

/// One sampled clutter realisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessDraw {
    pub los: bool,
    pub clutter_db: f64,
    pub shadowing_db: f64,
    /// `clutter_db + shadowing_db`, floored at zero.
    pub excess_db: f64,
}

/// Draws the LOS state and shadowing for `seed`.
pub fn sample_excess(
    scenario: Scenario,
    elevation_deg: f64,
    seed: u64,
    table: &ScenarioTable,
) -> Result<ExcessDraw> {
    check_elevation(elevation_deg)?;
    let p = table.params(scenario, elevation_deg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let los = rng.random::<f64>() < p.p_los;
    let clutter_db = if los {
        p.clutter_los_db
    } else {
        p.clutter_nlos_db
    };
    let z: f64 = rng.sample(StandardNormal);
    let shadowing_db = p.shadow_sigma_db * z;
    Ok(ExcessDraw {
        los,
        clutter_db,
        shadowing_db,
        excess_db: (clutter_db + shadowing_db).max(0.0),
    })
}

/// Scenario-dependent clutter and shadowing loss at the ground terminal.
///
/// The shipped scenario table is frequency-flat, so `fc_ghz` is only
/// validated.
pub fn excess_loss_db(
    scenario: Scenario,
    fc_ghz: f64,
    elevation_deg: f64,
    mode: LossMode,
    table: &ScenarioTable,
) -> Result<f64> {
    if !(fc_ghz > 0.0) {
        return Err(domain(format!("frequency must be positive, got {fc_ghz}")));
    }
    check_elevation(elevation_deg)?;
    match mode {
        LossMode::Expected => table.expected_db(scenario, elevation_deg),
        LossMode::Sampled(seed) => {
            Ok(sample_excess(scenario, elevation_deg, seed, table)?.excess_db)
        }
    }
}

/// Fraction of the gas and scintillation column a hop traverses, chosen from
/// the altitude of its lower endpoint.
pub fn default_atmosphere_fraction(low_altitude_km: f64) -> f64 {
    if low_altitude_km >= EXOATMOSPHERE_FLOOR_KM {
        0.0
    } else if low_altitude_km >= STRATOSPHERE_FLOOR_KM {
        0.1
    } else {
        1.0
    }
}

/// Full loss breakdown for one hop. Clutter only applies when the hop ends at
/// a ground terminal; elevated endpoints see zero excess loss.
pub fn total_path_loss(
    geometry: &LinkGeometry,
    fc_ghz: f64,
    scenario: Scenario,
    tables: &ChannelTables,
    atmosphere_fraction: f64,
    mode: LossMode,
) -> Result<LossBreakdown> {
    if !(0.0..=1.0).contains(&atmosphere_fraction) {
        return Err(domain(format!(
            "atmosphere fraction must be in [0, 1], got {atmosphere_fraction}"
        )));
    }
    let elevation = geometry.elevation_deg();
    let fspl = fspl_db(geometry.slant_range_km(), fc_ghz)?;
    let gas = atmosphere_fraction * gas_attenuation_db(fc_ghz, elevation, &tables.atmosphere)?;
    let scint = atmosphere_fraction * scintillation_db(fc_ghz, elevation, &tables.atmosphere)?;
    let excess = if geometry.is_ground_terminated() {
        excess_loss_db(scenario, fc_ghz, elevation, mode, &tables.scenarios)?
    } else {
        0.0
    };
    Ok(LossBreakdown::new(fspl, gas, scint, excess))
}
