//! dB-domain link budget: loss breakdown plus radio parameters to SNR and
//! Shannon capacity.

use crate::channel::{total_path_loss, ChannelTables, LossBreakdown, LossMode, Scenario};
use crate::error::{domain, Error, Result};
use crate::geometry::LinkGeometry;

/// Boltzmann's constant in dBm/K/Hz.
pub const BOLTZMANN_DBM_PER_K_HZ: f64 = -198.6;

/// Gain of the directional terminal antenna, dBi.
pub const DEFAULT_G_TX_DBI: f64 = 39.7;

/// Receiver figure of merit used when none is configured, dBi/K.
pub const DEFAULT_G_OVER_T_DBI_PER_K: f64 = 15.9;

/// Receive side of the budget: either an antenna gain with a system noise
/// temperature, or a G/T figure of merit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RxGain {
    Antenna {
        g_rx_dbi: f64,
        noise_temperature_k: f64,
    },
    GOverT {
        g_over_t_dbi_per_k: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    /// Picked from the carrier frequency by [`default_bandwidth`].
    #[default]
    Auto,
    Hz(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub fc_ghz: f64,
    pub tx_power_dbm: f64,
    pub g_tx_dbi: f64,
    pub rx: RxGain,
    pub bandwidth: Bandwidth,
}

impl RadioConfig {
    /// Terminal antenna gain, G/T receiver and automatic bandwidth.
    pub fn new(fc_ghz: f64, tx_power_dbm: f64) -> Self {
        Self {
            fc_ghz,
            tx_power_dbm,
            g_tx_dbi: DEFAULT_G_TX_DBI,
            rx: RxGain::GOverT {
                g_over_t_dbi_per_k: DEFAULT_G_OVER_T_DBI_PER_K,
            },
            bandwidth: Bandwidth::Auto,
        }
    }

    pub fn with_g_rx(mut self, g_rx_dbi: f64, noise_temperature_k: f64) -> Self {
        self.rx = RxGain::Antenna {
            g_rx_dbi,
            noise_temperature_k,
        };
        self
    }

    pub fn with_g_over_t(mut self, g_over_t_dbi_per_k: f64) -> Self {
        self.rx = RxGain::GOverT { g_over_t_dbi_per_k };
        self
    }

    pub fn with_bandwidth_hz(mut self, hz: f64) -> Self {
        self.bandwidth = Bandwidth::Hz(hz);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fc_ghz > 0.0 && self.fc_ghz.is_finite()) {
            return Err(Error::Config(format!(
                "carrier frequency must be positive, got {}",
                self.fc_ghz
            )));
        }
        if !self.tx_power_dbm.is_finite() || !self.g_tx_dbi.is_finite() {
            return Err(Error::Config(
                "transmit power and gain must be finite".into(),
            ));
        }
        match self.rx {
            RxGain::Antenna {
                g_rx_dbi,
                noise_temperature_k,
            } => {
                if !g_rx_dbi.is_finite() {
                    return Err(Error::Config("receive gain must be finite".into()));
                }
                if !(noise_temperature_k > 0.0 && noise_temperature_k.is_finite()) {
                    return Err(Error::Config(format!(
                        "noise temperature must be positive, got {noise_temperature_k}"
                    )));
                }
            }
            RxGain::GOverT { g_over_t_dbi_per_k } => {
                if !g_over_t_dbi_per_k.is_finite() {
                    return Err(Error::Config("G/T must be finite".into()));
                }
            }
        }
        if let Bandwidth::Hz(w) = self.bandwidth {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Config(format!(
                    "bandwidth must be positive, got {w}"
                )));
            }
        }
        Ok(())
    }

    /// Copy with `Bandwidth::Auto` replaced by the frequency rule.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        let mut out = *self;
        if out.bandwidth == Bandwidth::Auto {
            out.bandwidth = Bandwidth::Hz(default_bandwidth(self.fc_ghz)?);
        }
        Ok(out)
    }

    pub fn bandwidth_hz(&self) -> Option<f64> {
        match self.bandwidth {
            Bandwidth::Auto => None,
            Bandwidth::Hz(w) => Some(w),
        }
    }
}

/// Channel bandwidth for a carrier: 20 MHz up to 6 GHz, 800 MHz up to
/// 60 GHz, 2 GHz above.
pub fn default_bandwidth(fc_ghz: f64) -> Result<f64> {
    if !(fc_ghz > 0.0) {
        return Err(domain(format!("frequency must be positive, got {fc_ghz}")));
    }
    Ok(if fc_ghz <= 6.0 {
        20e6
    } else if fc_ghz <= 60.0 {
        800e6
    } else {
        2e9
    })
}

pub fn snr_db(radio: &RadioConfig, breakdown: &LossBreakdown) -> Result<f64> {
    let w = radio
        .bandwidth_hz()
        .ok_or_else(|| Error::Config("bandwidth must be resolved before computing SNR".into()))?;
    let received = radio.tx_power_dbm + radio.g_tx_dbi;
    Ok(match radio.rx {
        RxGain::Antenna {
            g_rx_dbi,
            noise_temperature_k,
        } => {
            let noise_dbm =
                BOLTZMANN_DBM_PER_K_HZ + 10.0 * noise_temperature_k.log10() + 10.0 * w.log10();
            received + g_rx_dbi - breakdown.total_db - noise_dbm
        }
        RxGain::GOverT { g_over_t_dbi_per_k } => {
            received + g_over_t_dbi_per_k
                - breakdown.total_db
                - BOLTZMANN_DBM_PER_K_HZ
                - 10.0 * w.log10()
        }
    })
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// `W · log2(1 + SNR)` in bit/s.
pub fn shannon_capacity_bps(bandwidth_hz: f64, snr_db: f64) -> f64 {
    bandwidth_hz * db_to_linear(snr_db).ln_1p() / std::f64::consts::LN_2
}

/// Outcome of evaluating a direct link or a relay chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkResult {
    pub label: String,
    /// For a chain, the ground-terminated hop.
    pub geometry: LinkGeometry,
    /// For a chain, the stage-wise sum over all hops.
    pub breakdown: LossBreakdown,
    pub snr_db: f64,
    pub capacity_bps: f64,
    pub bandwidth_hz: f64,
    /// Per-hop results in hop order; empty for a direct link.
    pub hops: Vec<LinkResult>,
}

impl LinkResult {
    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    /// End-to-end one-way propagation delay along all hops.
    pub fn path_delay_ms(&self) -> f64 {
        if self.hops.is_empty() {
            self.geometry.one_way_delay_ms()
        } else {
            self.hops
                .iter()
                .map(|h| h.geometry.one_way_delay_ms())
                .sum()
        }
    }

    /// End-to-end path length along all hops.
    pub fn path_length_km(&self) -> f64 {
        if self.hops.is_empty() {
            self.geometry.slant_range_km()
        } else {
            self.hops.iter().map(|h| h.geometry.slant_range_km()).sum()
        }
    }
}

/// Evaluates one hop end to end: losses, SNR, capacity.
pub fn evaluate_link(
    geometry: &LinkGeometry,
    radio: &RadioConfig,
    scenario: Scenario,
    tables: &ChannelTables,
    atmosphere_fraction: f64,
    mode: LossMode,
) -> Result<LinkResult> {
    let radio = radio.resolved()?;
    let breakdown = total_path_loss(
        geometry,
        radio.fc_ghz,
        scenario,
        tables,
        atmosphere_fraction,
        mode,
    )?;
    let snr = snr_db(&radio, &breakdown)?;
    let bandwidth_hz = radio.bandwidth_hz().expect("resolved");
    Ok(LinkResult {
        label: "direct".to_string(),
        geometry: *geometry,
        breakdown,
        snr_db: snr,
        capacity_bps: shannon_capacity_bps(bandwidth_hz, snr),
        bandwidth_hz,
        hops: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn breakdown(total: f64) -> LossBreakdown {
        LossBreakdown::new(total, 0.0, 0.0, 0.0)
    }

    #[test]
    fn bandwidth_rule() {
        assert_eq!(default_bandwidth(2.0).unwrap(), 20e6);
        assert_eq!(default_bandwidth(6.0).unwrap(), 20e6);
        assert_eq!(default_bandwidth(6.0 + 1e-9).unwrap(), 800e6);
        assert_eq!(default_bandwidth(20.0).unwrap(), 800e6);
        assert_eq!(default_bandwidth(60.0).unwrap(), 800e6);
        assert_eq!(default_bandwidth(70.0).unwrap(), 2e9);
        assert!(default_bandwidth(0.0).is_err());
    }

    #[test]
    fn snr_reference_budget() {
        let radio = RadioConfig::new(20.0, 30.0)
            .with_g_over_t(15.9)
            .with_bandwidth_hz(800e6);
        let snr = snr_db(&radio, &breakdown(180.0)).unwrap();
        // 30 + 39.7 + 15.9 - 180 + 198.6 - 10 log10(800e6)
        assert_relative_eq!(snr, 15.169100130080565, max_relative = 1e-12);
    }

    #[test]
    fn snr_needs_resolved_bandwidth() {
        let radio = RadioConfig::new(20.0, 30.0);
        assert!(matches!(
            snr_db(&radio, &breakdown(180.0)),
            Err(Error::Config(_))
        ));
        let resolved = radio.resolved().unwrap();
        assert_eq!(resolved.bandwidth, Bandwidth::Hz(800e6));
    }

    #[test]
    fn explicit_bandwidth_wins() {
        let radio = RadioConfig::new(20.0, 30.0)
            .with_bandwidth_hz(400e6)
            .resolved()
            .unwrap();
        assert_eq!(radio.bandwidth_hz(), Some(400e6));
    }

    #[test]
    fn gain_forms_agree() {
        let base = RadioConfig::new(20.0, 30.0).with_bandwidth_hz(800e6);
        let a = snr_db(&base.with_g_rx(25.9, 10.0), &breakdown(180.0)).unwrap();
        let b = snr_db(&base.with_g_over_t(15.9), &breakdown(180.0)).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn rx_gain_is_db_linear() {
        let base = RadioConfig::new(20.0, 30.0).with_bandwidth_hz(800e6);
        let a = snr_db(&base.with_g_rx(40.0, 290.0), &breakdown(200.0)).unwrap();
        let b = snr_db(&base.with_g_rx(50.0, 290.0), &breakdown(200.0)).unwrap();
        assert_relative_eq!(b - a, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn capacity_examples() {
        assert_relative_eq!(shannon_capacity_bps(20e6, 0.0), 20e6, max_relative = 1e-15);
        assert_relative_eq!(
            shannon_capacity_bps(800e6, 10.0),
            2767545294.9098377,
            max_relative = 1e-12
        );
        assert!(shannon_capacity_bps(800e6, -400.0) < 1e-20);
        assert_eq!(shannon_capacity_bps(800e6, f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn invalid_radio_rejected() {
        let r = RadioConfig::new(20.0, 30.0).with_g_rx(40.0, 0.0);
        assert!(r.resolved().is_err());
        let r = RadioConfig::new(-1.0, 30.0);
        assert!(r.resolved().is_err());
        let r = RadioConfig::new(20.0, 30.0).with_bandwidth_hz(0.0);
        assert!(r.resolved().is_err());
    }

    #[test]
    fn evaluate_link_is_pure_and_consistent() {
        let t = ChannelTables::builtin();
        let g = LinkGeometry::from_ground(600.0, 10.0).unwrap();
        let r = RadioConfig::new(20.0, 33.0).with_g_rx(50.0, 290.0);
        let a = evaluate_link(&g, &r, Scenario::DenseUrban, &t, 1.0, LossMode::Expected).unwrap();
        let b = evaluate_link(&g, &r, Scenario::DenseUrban, &t, 1.0, LossMode::Expected).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.bandwidth_hz, 800e6);
        let c = a.bandwidth_hz * (1.0 + db_to_linear(a.snr_db)).log2();
        assert_relative_eq!(a.capacity_bps, c, max_relative = 1e-9);
    }

    #[test]
    fn sub6_capacity_is_limited() {
        let t = ChannelTables::builtin();
        let g = LinkGeometry::from_ground(600.0, 10.0).unwrap();
        let r = RadioConfig::new(2.0, 33.0).with_g_rx(60.0, 290.0);
        let res = evaluate_link(&g, &r, Scenario::DenseUrban, &t, 1.0, LossMode::Expected).unwrap();
        assert!(res.capacity_bps < 500e6);
    }

    #[test]
    fn absorption_knee_above_70ghz() {
        let t = ChannelTables::builtin();
        let g = LinkGeometry::from_ground(600.0, 10.0).unwrap();
        let cap = |fc| {
            let r = RadioConfig::new(fc, 33.0).with_g_rx(60.0, 290.0);
            evaluate_link(&g, &r, Scenario::DenseUrban, &t, 1.0, LossMode::Expected)
                .unwrap()
                .capacity_bps
        };
        assert!(cap(90.0) < cap(70.0));
    }

    proptest! {
        #[test]
        fn gain_form_equivalence(
            p in -10.0f64..80.0,
            g_rx in 0.0f64..70.0,
            t_k in 1.0f64..2000.0,
            loss in 100.0f64..300.0,
            w in 1e6f64..5e9,
        ) {
            let base = RadioConfig::new(20.0, p).with_bandwidth_hz(w);
            let a = snr_db(&base.with_g_rx(g_rx, t_k), &breakdown(loss)).unwrap();
            let b = snr_db(&base.with_g_over_t(g_rx - 10.0 * t_k.log10()), &breakdown(loss)).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn capacity_monotone_in_altitude_and_gain(
            h in 200.0f64..30000.0,
            dh in 1.0f64..5000.0,
            a in 10.0f64..=90.0,
            g in 20.0f64..60.0,
            dg in 0.0f64..10.0,
            fc in 0.5f64..=100.0,
        ) {
            let t = ChannelTables::builtin();
            let eval = |h: f64, g: f64| {
                let geo = LinkGeometry::from_ground(h, a).unwrap();
                let r = RadioConfig::new(fc, 33.0).with_g_rx(g, 290.0);
                evaluate_link(&geo, &r, Scenario::Urban, &t, 1.0, LossMode::Expected).unwrap().capacity_bps
            };
            prop_assert!(eval(h + dh, g) <= eval(h, g));
            prop_assert!(eval(h, g + dg) >= eval(h, g));
        }
    }
}
