//! Multi-hop composition: a descending chain of hops ending at a ground
//! terminal, relayed transparently (amplify-and-forward) or regeneratively
//! (decode-and-forward).

use std::fmt;
use std::str::FromStr;

use crate::channel::{
    default_atmosphere_fraction, ChannelTables, LossBreakdown, LossMode, Scenario,
};
use crate::error::{domain, Error, Result};
use crate::geometry::LinkGeometry;
use crate::linkbudget::{evaluate_link, linear_to_db, LinkResult, RadioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RelayMode {
    #[default]
    AmplifyForward,
    DecodeForward,
}

impl RelayMode {
    pub fn name(self) -> &'static str {
        match self {
            RelayMode::AmplifyForward => "af",
            RelayMode::DecodeForward => "df",
        }
    }
}

impl fmt::Display for RelayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "af" | "amplify-forward" | "amplify_forward" => Ok(RelayMode::AmplifyForward),
            "df" | "decode-forward" | "decode_forward" => Ok(RelayMode::DecodeForward),
            _ => Err(domain(format!("unknown relay mode `{s}` (valid: af, df)"))),
        }
    }
}

/// End-to-end linear SNR of two amplify-and-forward hops.
pub fn af_end_to_end_snr(snr_linear_1: f64, snr_linear_2: f64) -> Result<f64> {
    if !(snr_linear_1 >= 0.0 && snr_linear_2 >= 0.0) {
        return Err(domain(format!(
            "linear SNRs must be non-negative, got {snr_linear_1} and {snr_linear_2}"
        )));
    }
    // Limits of γ1γ2 / (γ1 + γ2 + 1) as either side grows without bound.
    match (snr_linear_1.is_infinite(), snr_linear_2.is_infinite()) {
        (true, true) => Ok(f64::INFINITY),
        (true, false) => Ok(snr_linear_2),
        (false, true) => Ok(snr_linear_1),
        (false, false) => Ok(snr_linear_1 * snr_linear_2 / (snr_linear_1 + snr_linear_2 + 1.0)),
    }
}

/// Decode-and-forward capacity: the weakest hop.
pub fn df_end_to_end_capacity(c1_bps: f64, c2_bps: f64) -> f64 {
    c1_bps.min(c2_bps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub geometry: LinkGeometry,
    pub radio: RadioConfig,
    pub atmosphere_fraction: f64,
}

impl Hop {
    /// Hop with the atmosphere fraction implied by its lower altitude.
    pub fn new(geometry: LinkGeometry, radio: RadioConfig) -> Self {
        Self {
            atmosphere_fraction: default_atmosphere_fraction(geometry.low_altitude_km()),
            geometry,
            radio,
        }
    }
}

/// Hops ordered from the highest platform down to the ground terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChain {
    pub hops: Vec<Hop>,
    pub mode: RelayMode,
    /// Clutter environment of the ground terminal.
    pub scenario: Scenario,
    pub loss_mode: LossMode,
}

impl RelayChain {
    /// Satellite to HAP to ground, both hops at the same elevation and radio.
    pub fn via_hap(
        satellite_altitude_km: f64,
        hap_altitude_km: f64,
        elevation_deg: f64,
        radio: RadioConfig,
        scenario: Scenario,
        mode: RelayMode,
    ) -> Result<Self> {
        let upper = LinkGeometry::new(hap_altitude_km, satellite_altitude_km, elevation_deg)?;
        let lower = LinkGeometry::from_ground(hap_altitude_km, elevation_deg)?;
        Ok(Self {
            hops: vec![Hop::new(upper, radio), Hop::new(lower, radio)],
            mode,
            scenario,
            loss_mode: LossMode::Expected,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.hops.is_empty() {
            return Err(Error::Chain {
                hop: 0,
                reason: "chain has no hops".into(),
            });
        }
        for (i, pair) in self.hops.windows(2).enumerate() {
            let (above, below) = (&pair[0].geometry, &pair[1].geometry);
            if above.low_altitude_km() != below.high_altitude_km() {
                return Err(Error::Chain {
                    hop: i + 1,
                    reason: format!(
                        "starts at {} km but hop {i} ends at {} km",
                        below.high_altitude_km(),
                        above.low_altitude_km()
                    ),
                });
            }
        }
        let ground: Vec<usize> = self
            .hops
            .iter()
            .enumerate()
            .filter(|(_, h)| h.geometry.is_ground_terminated())
            .map(|(i, _)| i)
            .collect();
        match ground.as_slice() {
            [_] => Ok(()),
            [] => Err(Error::Chain {
                hop: self.hops.len() - 1,
                reason: "no hop terminates at the ground".into(),
            }),
            [_, second, ..] => Err(Error::Chain {
                hop: *second,
                reason: "more than one hop terminates at the ground".into(),
            }),
        }
    }

    fn hop_loss_mode(&self, index: usize) -> LossMode {
        match self.loss_mode {
            LossMode::Expected => LossMode::Expected,
            LossMode::Sampled(seed) => LossMode::Sampled(seed.wrapping_add(index as u64)),
        }
    }
}

/// Evaluates every hop and combines them according to the chain's mode.
/// A single-hop chain yields exactly the direct-link result.
pub fn evaluate_chain(chain: &RelayChain, tables: &ChannelTables) -> Result<LinkResult> {
    chain.validate()?;
    let hops = chain
        .hops
        .iter()
        .enumerate()
        .map(|(i, hop)| {
            evaluate_link(
                &hop.geometry,
                &hop.radio,
                chain.scenario,
                tables,
                hop.atmosphere_fraction,
                chain.hop_loss_mode(i),
            )
            .map_err(|e| Error::Chain {
                hop: i,
                reason: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    if hops.len() == 1 {
        return Ok(hops.into_iter().next().expect("one hop"));
    }

    let (snr_db, bandwidth_hz, capacity_bps) = match chain.mode {
        RelayMode::AmplifyForward => {
            let mut snr = hops[0].snr_linear();
            for h in &hops[1..] {
                snr = af_end_to_end_snr(snr, h.snr_linear())?;
            }
            let bandwidth = hops
                .iter()
                .map(|h| h.bandwidth_hz)
                .fold(f64::INFINITY, f64::min);
            let capacity = bandwidth * snr.ln_1p() / std::f64::consts::LN_2;
            (linear_to_db(snr), bandwidth, capacity)
        }
        RelayMode::DecodeForward => {
            let capacity = hops
                .iter()
                .map(|h| h.capacity_bps)
                .fold(f64::INFINITY, df_end_to_end_capacity);
            let bottleneck = hops
                .iter()
                .find(|h| h.capacity_bps == capacity)
                .expect("minimum comes from a hop");
            (bottleneck.snr_db, bottleneck.bandwidth_hz, capacity)
        }
    };
    let ground = hops
        .iter()
        .find(|h| h.geometry.is_ground_terminated())
        .expect("validated");
    Ok(LinkResult {
        label: format!("relay-{}/{}-hop", chain.mode, hops.len()),
        geometry: ground.geometry,
        breakdown: LossBreakdown::sum(hops.iter().map(|h| &h.breakdown)),
        snr_db,
        capacity_bps,
        bandwidth_hz,
        hops,
    })
}
