//! Built-in sweeps for the three reference figures.
//!
//! Each preset combines values taken from the figure setups with the
//! calibration fixture in `data/fig-defaults.cfg`. Every fixed value carries
//! its source, which ends up in the CSV header.

use std::collections::BTreeMap;

use super::kv;
use super::params::{Param, Topology, Value};
use super::sweep::{Axis, FixedValue, SweepSpec};
use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::linkbudget::DEFAULT_G_TX_DBI;
use crate::relay::RelayMode;

pub const PRESET_NAMES: [&str; 3] = ["fig2", "fig3", "fig4"];

pub const FIXTURE_NAME: &str = "fig-defaults";
const FIXTURE: &str = include_str!("../../data/fig-defaults.cfg");

fn nums(values: &[f64]) -> Vec<Value> {
    values.iter().map(|v| Value::Num(*v)).collect()
}

fn elevations() -> Vec<Value> {
    nums(&[10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0])
}

/// Reads the fixture section for one preset.
fn fixture(section: &str) -> Result<Vec<(Param, Value)>> {
    let bad = |msg: String| Error::Table(format!("{FIXTURE_NAME} fixture: {msg}"));
    let entries = kv::parse(FIXTURE).map_err(|e| bad(e.to_string()))?;
    entries
        .into_iter()
        .filter(|e| e.section.as_deref() == Some(section))
        .map(|e| {
            let p = Param::from_key(&e.key)
                .ok_or_else(|| bad(format!("line {}: unknown key `{}`", e.line, e.key)))?;
            let v = p
                .parse_value(&e.value)
                .map_err(|err| bad(err.to_string()))?;
            Ok((p, v))
        })
        .collect()
}

struct Builder {
    name: &'static str,
    axes: Vec<Axis>,
    fixed: BTreeMap<Param, FixedValue>,
    notes: Vec<String>,
}

impl Builder {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            axes: Vec::new(),
            fixed: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn axis(mut self, param: Param, values: Vec<Value>) -> Self {
        self.axes.push(Axis { param, values });
        self
    }

    fn setup(mut self, param: Param, value: Value) -> Self {
        let source = format!("{} setup", self.name);
        self.fixed.insert(param, FixedValue { value, source });
        self
    }

    fn note(mut self, text: &str) -> Self {
        self.notes.push(text.to_string());
        self
    }

    fn build(mut self) -> Result<SweepSpec> {
        for (param, value) in fixture(self.name)? {
            let source = format!("calibration fixture {FIXTURE_NAME}");
            self.fixed.insert(param, FixedValue { value, source });
        }
        let spec = SweepSpec {
            name: self.name.to_string(),
            output_schema: SweepSpec::default_schema(&self.axes),
            axes: self.axes,
            fixed: self.fixed,
            seed: None,
            notes: self.notes,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Returns the sweep for `fig2`, `fig3` or `fig4`.
pub fn preset(name: &str) -> Result<SweepSpec> {
    let spec = match name {
        "fig2" => Builder::new("fig2")
            .axis(Param::AltitudeKm, nums(&[300.0, 600.0, 1200.0, 35786.0]))
            .axis(Param::FcGhz, nums(&[2.0, 6.0, 20.0, 30.0, 50.0, 70.0, 90.0]))
            .axis(Param::GRxDbi, nums(&[30.0, 40.0, 50.0, 60.0]))
            .setup(Param::ElevationDeg, Value::Num(10.0))
            .setup(Param::Scenario, Value::Scenario(Scenario::DenseUrban))
            .setup(Param::GTxDbi, Value::Num(DEFAULT_G_TX_DBI))
            .setup(Param::Mode, Value::Mode(Topology::Direct))
            .note("axis ticks are a reconstruction bracketing sub-6 GHz to 90 GHz and LEO to GEO, not a transcription")
            .note("g_rx_dbi is antenna gain; noise temperature comes from the calibration fixture"),
        "fig3" => Builder::new("fig3")
            .axis(Param::ElevationDeg, elevations())
            .axis(
                Param::Scenario,
                vec![
                    Value::Scenario(Scenario::DenseUrban),
                    Value::Scenario(Scenario::Rural),
                ],
            )
            .setup(Param::AltitudeKm, Value::Num(300.0))
            .setup(Param::GOverTDbiPerK, Value::Num(15.9))
            .setup(Param::GTxDbi, Value::Num(DEFAULT_G_TX_DBI))
            .setup(Param::Mode, Value::Mode(Topology::Direct)),
        "fig4" => Builder::new("fig4")
            .axis(Param::ElevationDeg, elevations())
            .axis(Param::AltitudeKm, nums(&[300.0, 600.0, 1200.0]))
            .axis(
                Param::Mode,
                vec![
                    Value::Mode(Topology::Direct),
                    Value::Mode(Topology::Relay(RelayMode::AmplifyForward)),
                ],
            )
            .setup(Param::FcGhz, Value::Num(20.0))
            .setup(Param::Scenario, Value::Scenario(Scenario::DenseUrban))
            .setup(Param::HapAltitudeKm, Value::Num(20.0))
            .setup(Param::GTxDbi, Value::Num(DEFAULT_G_TX_DBI))
            .note("relay hops share the elevation angle; the HAP amplifies and forwards"),
        other => {
            return Err(Error::Preset {
                name: other.to_string(),
                valid: PRESET_NAMES.join(", "),
            })
        }
    };
    spec.build()
}
