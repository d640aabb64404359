//! Shipped channel data: atmospheric absorption and scenario clutter tables.
//!
//! Both files are line-oriented. Lines starting with `#` are comments; a
//! comment of the form `# key: value` is header metadata. Every table must
//! declare `# version: 1`. An optional `# sha256: <hex>` header is verified
//! against the data lines (see [`table_checksum`]).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TABLE_VERSION: u32 = 1;

pub const ATMOSPHERE_FILE: &str = "atmosphere.tbl";
pub const SCENARIOS_FILE: &str = "scenarios.tbl";

const BUILTIN_ATMOSPHERE: &str = include_str!("../../data/atmosphere.tbl");
const BUILTIN_SCENARIOS: &str = include_str!("../../data/scenarios.tbl");

/// SHA-256 over the data lines of a table file: each non-comment, non-blank
/// line with surrounding whitespace trimmed, terminated by `\n`.
pub fn table_checksum(text: &str) -> String {
    let mut hasher = Sha256::new();
    for line in data_lines(text) {
        hasher.update(line.1.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|l| {
            let (k, v) = l.split_once(':')?;
            (k.trim() == key).then(|| v.trim())
        })
}

fn check_header(text: &str, what: &str) -> Result<String> {
    match header_value(text, "version") {
        Some(v) if v.parse::<u32>() == Ok(TABLE_VERSION) => {}
        Some(v) => {
            return Err(Error::Table(format!(
                "{what}: unsupported version `{v}` (expected {TABLE_VERSION})"
            )))
        }
        None => return Err(Error::Table(format!("{what}: missing `# version:` header"))),
    }
    let actual = table_checksum(text);
    if let Some(expected) = header_value(text, "sha256") {
        if !expected.eq_ignore_ascii_case(&actual) {
            return Err(Error::Table(format!(
                "{what}: checksum mismatch (header {expected}, data {actual})"
            )));
        }
    }
    Ok(actual)
}

fn parse_number(field: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::Table(format!("{what} line {line}: `{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Table(format!(
            "{what} line {line}: `{field}` is not finite"
        )));
    }
    Ok(v)
}

/// Piecewise-linear interpolation on an ascending grid. Caller guarantees
/// `x` lies within the grid.
pub(crate) fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let upper = grid.partition_point(|&g| g < x);
    if upper == 0 {
        return values[0];
    }
    if upper == grid.len() {
        return values[grid.len() - 1];
    }
    if grid[upper] == x {
        return values[upper];
    }
    let (x0, x1) = (grid[upper - 1], grid[upper]);
    let t = (x - x0) / (x1 - x0);
    values[upper - 1] + t * (values[upper] - values[upper - 1])
}

/// Zenith gas attenuation and scintillation reference versus frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct AtmosphereTable {
    frequency_grid_ghz: Vec<f64>,
    zenith_gas_db: Vec<f64>,
    scintillation_ref_db: Vec<f64>,
    checksum: String,
}

impl AtmosphereTable {
    pub const MIN_COVERAGE_GHZ: f64 = 0.5;
    pub const MAX_COVERAGE_GHZ: f64 = 100.0;

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_ATMOSPHERE).expect("shipped atmosphere table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "atmosphere table";
        let checksum = check_header(text, WHAT)?;
        let (mut freq, mut gas, mut scint) = (Vec::new(), Vec::new(), Vec::new());
        for (line, content) in data_lines(text) {
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Table(format!(
                    "{WHAT} line {line}: expected 3 columns, found {}",
                    fields.len()
                )));
            }
            let f = parse_number(fields[0], line, WHAT)?;
            let g = parse_number(fields[1], line, WHAT)?;
            let s = parse_number(fields[2], line, WHAT)?;
            if g < 0.0 || s < 0.0 {
                return Err(Error::Table(format!(
                    "{WHAT} line {line}: negative attenuation"
                )));
            }
            if let Some(&prev) = freq.last() {
                if f <= prev {
                    return Err(Error::Table(format!(
                        "{WHAT} line {line}: frequency grid not strictly ascending ({f} after {prev})"
                    )));
                }
            }
            freq.push(f);
            gas.push(g);
            scint.push(s);
        }
        let table = Self {
            frequency_grid_ghz: freq,
            zenith_gas_db: gas,
            scintillation_ref_db: scint,
            checksum,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let grid = &self.frequency_grid_ghz;
        if grid.len() < 2
            || grid[0] > Self::MIN_COVERAGE_GHZ
            || grid[grid.len() - 1] < Self::MAX_COVERAGE_GHZ
        {
            return Err(Error::Table(format!(
                "atmosphere table must cover [{}, {}] GHz",
                Self::MIN_COVERAGE_GHZ,
                Self::MAX_COVERAGE_GHZ
            )));
        }
        // Oxygen complex: the zenith profile must peak somewhere in 55..65 GHz,
        // above its values at 50 and 70 GHz.
        let at = |f: f64| interpolate(grid, &self.zenith_gas_db, f);
        let peak = grid
            .iter()
            .zip(&self.zenith_gas_db)
            .filter(|(f, _)| (55.0..=65.0).contains(*f))
            .map(|(_, g)| *g)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(peak > at(50.0) && peak > at(70.0)) {
            return Err(Error::Table(
                "atmosphere table lacks an oxygen absorption peak within [55, 65] GHz".into(),
            ));
        }
        Ok(())
    }

    pub fn frequency_grid_ghz(&self) -> &[f64] {
        &self.frequency_grid_ghz
    }

    pub fn zenith_gas_grid_db(&self) -> &[f64] {
        &self.zenith_gas_db
    }

    pub fn scintillation_ref_grid_db(&self) -> &[f64] {
        &self.scintillation_ref_db
    }

    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    pub fn bounds_ghz(&self) -> (f64, f64) {
        (
            self.frequency_grid_ghz[0],
            self.frequency_grid_ghz[self.frequency_grid_ghz.len() - 1],
        )
    }

    fn check_frequency(&self, fc_ghz: f64) -> Result<()> {
        let (min_ghz, max_ghz) = self.bounds_ghz();
        if !(fc_ghz >= min_ghz && fc_ghz <= max_ghz) {
            return Err(Error::TableDomain {
                fc_ghz,
                min_ghz,
                max_ghz,
            });
        }
        Ok(())
    }

    /// Interpolated one-way zenith gas attenuation, dB.
    pub fn zenith_gas_db(&self, fc_ghz: f64) -> Result<f64> {
        self.check_frequency(fc_ghz)?;
        Ok(interpolate(
            &self.frequency_grid_ghz,
            &self.zenith_gas_db,
            fc_ghz,
        ))
    }

    /// Interpolated scintillation fade at the 10° reference elevation, dB.
    pub fn scintillation_ref_db(&self, fc_ghz: f64) -> Result<f64> {
        self.check_frequency(fc_ghz)?;
        Ok(interpolate(
            &self.frequency_grid_ghz,
            &self.scintillation_ref_db,
            fc_ghz,
        ))
    }
}

/// Propagation environment around the ground terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    DenseUrban,
    Urban,
    Suburban,
    Rural,
}

impl Scenario {
    /// All scenarios, from most to least obstructed.
    pub const ALL: [Scenario; 4] = [
        Scenario::DenseUrban,
        Scenario::Urban,
        Scenario::Suburban,
        Scenario::Rural,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DenseUrban => "dense_urban",
            Scenario::Urban => "urban",
            Scenario::Suburban => "suburban",
            Scenario::Rural => "rural",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        match key.as_str() {
            "dense_urban" | "denseurban" => Ok(Scenario::DenseUrban),
            "urban" => Ok(Scenario::Urban),
            "suburban" => Ok(Scenario::Suburban),
            "rural" => Ok(Scenario::Rural),
            _ => Err(Error::Domain(format!(
                "unknown scenario `{s}` (valid: dense_urban, urban, suburban, rural)"
            ))),
        }
    }
}

/// Clutter and shadowing parameters at one elevation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClutterParams {
    pub p_los: f64,
    pub clutter_los_db: f64,
    pub clutter_nlos_db: f64,
    pub shadow_sigma_db: f64,
}

impl ClutterParams {
    /// LOS-probability-weighted clutter loss.
    pub fn expected_db(&self) -> f64 {
        self.p_los * self.clutter_los_db + (1.0 - self.p_los) * self.clutter_nlos_db
    }
}

#[derive(Debug, Clone, PartialEq)]
struct ScenarioRows {
    elevation_deg: Vec<f64>,
    params: Vec<ClutterParams>,
    expected_db: Vec<f64>,
}

impl ScenarioRows {
    fn expected_at(&self, elevation_deg: f64) -> f64 {
        interpolate(&self.elevation_deg, &self.expected_db, elevation_deg)
    }

    fn params_at(&self, elevation_deg: f64) -> ClutterParams {
        let col = |f: fn(&ClutterParams) -> f64| -> f64 {
            let values: Vec<f64> = self.params.iter().map(f).collect();
            interpolate(&self.elevation_deg, &values, elevation_deg)
        };
        ClutterParams {
            p_los: col(|p| p.p_los),
            clutter_los_db: col(|p| p.clutter_los_db),
            clutter_nlos_db: col(|p| p.clutter_nlos_db),
            shadow_sigma_db: col(|p| p.shadow_sigma_db),
        }
    }
}

/// LOS probability and clutter loss per scenario and elevation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTable {
    rows: [Option<ScenarioRows>; 4],
    checksum: String,
}

impl ScenarioTable {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_SCENARIOS).expect("shipped scenario table is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "scenario table";
        let checksum = check_header(text, WHAT)?;
        let mut rows: [Option<ScenarioRows>; 4] = Default::default();
        for (line, content) in data_lines(text) {
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(Error::Table(format!(
                    "{WHAT} line {line}: expected 6 columns, found {}",
                    fields.len()
                )));
            }
            let scenario: Scenario = fields[0]
                .parse()
                .map_err(|e| Error::Table(format!("{WHAT} line {line}: {e}")))?;
            let num = |i: usize| parse_number(fields[i], line, WHAT);
            let elevation = num(1)?;
            let params = ClutterParams {
                p_los: num(2)?,
                clutter_los_db: num(3)?,
                clutter_nlos_db: num(4)?,
                shadow_sigma_db: num(5)?,
            };
            if !(0.0..=1.0).contains(&params.p_los) {
                return Err(Error::Table(format!(
                    "{WHAT} line {line}: p_los outside [0, 1]"
                )));
            }
            if params.clutter_los_db < 0.0
                || params.clutter_nlos_db < 0.0
                || params.shadow_sigma_db < 0.0
            {
                return Err(Error::Table(format!(
                    "{WHAT} line {line}: negative loss or sigma"
                )));
            }
            let entry = rows[scenario as usize].get_or_insert_with(|| ScenarioRows {
                elevation_deg: Vec::new(),
                params: Vec::new(),
                expected_db: Vec::new(),
            });
            if let Some(&prev) = entry.elevation_deg.last() {
                if elevation <= prev {
                    return Err(Error::Table(format!(
                        "{WHAT} line {line}: {scenario} elevations not strictly ascending"
                    )));
                }
            }
            entry.elevation_deg.push(elevation);
            entry.expected_db.push(params.expected_db());
            entry.params.push(params);
        }
        let table = Self { rows, checksum };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let present: Vec<(Scenario, &ScenarioRows)> = Scenario::ALL
            .iter()
            .filter_map(|&s| self.rows[s as usize].as_ref().map(|r| (s, r)))
            .collect();
        if present.is_empty() {
            return Err(Error::Table("scenario table has no rows".into()));
        }
        for (s, r) in &present {
            let (lo, hi) = (
                r.elevation_deg[0],
                r.elevation_deg[r.elevation_deg.len() - 1],
            );
            if lo > 10.0 || hi < 90.0 {
                return Err(Error::Table(format!(
                    "{s} rows must cover elevations 10..90"
                )));
            }
            if r.expected_db.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::Table(format!(
                    "{s}: expected clutter loss must not increase with elevation"
                )));
            }
        }
        // Obstruction ordering must hold at every node of every scenario.
        let mut nodes: Vec<f64> = present
            .iter()
            .flat_map(|(_, r)| r.elevation_deg.iter().copied())
            .filter(|e| (10.0..=90.0).contains(e))
            .collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        for pair in present.windows(2) {
            let ((a, ra), (b, rb)) = (pair[0], pair[1]);
            if let Some(&e) = nodes
                .iter()
                .find(|&&e| ra.expected_at(e) < rb.expected_at(e))
            {
                return Err(Error::Table(format!(
                    "expected clutter loss of {a} below {b} at {e}°"
                )));
            }
        }
        Ok(())
    }

    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    fn rows(&self, scenario: Scenario) -> Result<&ScenarioRows> {
        self.rows[scenario as usize]
            .as_ref()
            .ok_or_else(|| Error::Domain(format!("scenario `{scenario}` not present in table")))
    }

    /// Clutter parameters linearly interpolated to `elevation_deg`.
    pub fn params(&self, scenario: Scenario, elevation_deg: f64) -> Result<ClutterParams> {
        Ok(self.rows(scenario)?.params_at(elevation_deg))
    }

    /// Expected clutter loss, interpolated between the per-node expectations.
    pub fn expected_db(&self, scenario: Scenario, elevation_deg: f64) -> Result<f64> {
        Ok(self.rows(scenario)?.expected_at(elevation_deg))
    }

    /// All `(scenario, elevation, expected loss)` nodes in the table.
    pub fn nodes(&self) -> Vec<(Scenario, f64, f64)> {
        Scenario::ALL
            .iter()
            .filter_map(|&s| self.rows[s as usize].as_ref().map(|r| (s, r)))
            .flat_map(|(s, r)| {
                r.elevation_deg
                    .iter()
                    .zip(&r.expected_db)
                    .map(move |(&e, &x)| (s, e, x))
            })
            .collect()
    }
}

/// The pair of tables a channel evaluation reads from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTables {
    pub atmosphere: AtmosphereTable,
    pub scenarios: ScenarioTable,
}

impl ChannelTables {
    pub fn builtin() -> Self {
        Self {
            atmosphere: AtmosphereTable::builtin(),
            scenarios: ScenarioTable::builtin(),
        }
    }

    /// Loads `atmosphere.tbl` and `scenarios.tbl` from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        Ok(Self {
            atmosphere: AtmosphereTable::load(dir.join(ATMOSPHERE_FILE))?,
            scenarios: ScenarioTable::load(dir.join(SCENARIOS_FILE))?,
        })
    }
}
