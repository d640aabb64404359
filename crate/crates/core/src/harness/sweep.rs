//! Cartesian parameter sweeps.
//!
//! Grid points are numbered in lexicographic axis order (first axis
//! outermost). Points are evaluated in parallel and gathered back into that
//! order, so output never depends on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use super::kv;
use super::params::{resolve, Param, ParamSet, Value};
use crate::channel::{ChannelTables, LossMode};
use crate::error::{Error, Result};
use crate::linkbudget::LinkResult;

/// One output column of a result table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    Param(Param),
    Label,
    PathLengthKm,
    PathDelayMs,
    FsplDb,
    GasDb,
    ScintillationDb,
    ExcessDb,
    TotalLossDb,
    SnrDb,
    BandwidthHz,
    CapacityBps,
}

impl Column {
    /// Every column computed from a result, in display order.
    pub const DERIVED: [Column; 11] = [
        Column::Label,
        Column::PathLengthKm,
        Column::PathDelayMs,
        Column::FsplDb,
        Column::GasDb,
        Column::ScintillationDb,
        Column::ExcessDb,
        Column::TotalLossDb,
        Column::SnrDb,
        Column::BandwidthHz,
        Column::CapacityBps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::Param(p) => p.key(),
            Column::Label => "label",
            Column::PathLengthKm => "path_length_km",
            Column::PathDelayMs => "path_delay_ms",
            Column::FsplDb => "fspl_db",
            Column::GasDb => "gas_db",
            Column::ScintillationDb => "scintillation_db",
            Column::ExcessDb => "excess_db",
            Column::TotalLossDb => "total_loss_db",
            Column::SnrDb => "snr_db",
            Column::BandwidthHz => "bandwidth_hz",
            Column::CapacityBps => "capacity_bps",
        }
    }

    pub fn from_name(name: &str) -> Option<Column> {
        // `bandwidth_hz` names both a parameter and the resolved bandwidth;
        // the resolved value wins.
        Column::DERIVED
            .into_iter()
            .find(|c| c.name() == name)
            .or_else(|| Param::from_key(name).map(Column::Param))
    }

    fn cell(self, params: &ParamSet, r: &LinkResult) -> Cell {
        match self {
            Column::Param(p) => match params.get(&p) {
                Some(Value::Num(v)) => Cell::Num(*v),
                Some(Value::Seed(s)) => Cell::Text(s.to_string()),
                Some(v) => Cell::Text(v.to_string()),
                None => Cell::Empty,
            },
            Column::Label => Cell::Text(r.label.clone()),
            Column::PathLengthKm => Cell::Num(r.path_length_km()),
            Column::PathDelayMs => Cell::Num(r.path_delay_ms()),
            Column::FsplDb => Cell::Num(r.breakdown.fspl_db),
            Column::GasDb => Cell::Num(r.breakdown.gas_db),
            Column::ScintillationDb => Cell::Num(r.breakdown.scintillation_db),
            Column::ExcessDb => Cell::Num(r.breakdown.excess_db),
            Column::TotalLossDb => Cell::Num(r.breakdown.total_db),
            Column::SnrDb => Cell::Num(r.snr_db),
            Column::BandwidthHz => Cell::Num(r.bandwidth_hz),
            Column::CapacityBps => Cell::Num(r.capacity_bps),
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedValue {
    pub value: Value,
    /// Where the value comes from; printed in the CSV header.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<Param, FixedValue>,
    pub output_schema: Vec<Column>,
    /// Switches clutter to sampled mode; point `i` uses `seed ^ i`.
    pub seed: Option<u64>,
    /// Free-form provenance remarks copied into the CSV header.
    pub notes: Vec<String>,
}

const REQUIRED: [Param; 5] = [
    Param::AltitudeKm,
    Param::FcGhz,
    Param::ElevationDeg,
    Param::Scenario,
    Param::TxPowerDbm,
];

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

impl SweepSpec {
    /// Axis columns in axis order, then the loss breakdown, SNR and capacity.
    pub fn default_schema(axes: &[Axis]) -> Vec<Column> {
        axes.iter()
            .map(|a| Column::Param(a.param))
            .chain([
                Column::FsplDb,
                Column::GasDb,
                Column::ScintillationDb,
                Column::ExcessDb,
                Column::TotalLossDb,
                Column::SnrDb,
                Column::CapacityBps,
            ])
            .collect()
    }

    pub fn grid_size(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_set(&self, p: Param) -> bool {
        self.fixed.contains_key(&p) || self.axes.iter().any(|a| a.param == p)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, axis) in self.axes.iter().enumerate() {
            if !axis.param.is_axis() {
                return Err(spec_err(format!("`{}` cannot be swept", axis.param)));
            }
            if axis.values.is_empty() {
                return Err(spec_err(format!("axis `{}` is empty", axis.param)));
            }
            if self.axes[..i].iter().any(|a| a.param == axis.param) {
                return Err(spec_err(format!("axis `{}` listed twice", axis.param)));
            }
            if self.fixed.contains_key(&axis.param) {
                return Err(spec_err(format!(
                    "`{}` is both an axis and fixed",
                    axis.param
                )));
            }
        }
        for p in [Param::Seed, Param::LossMode] {
            if self.fixed.contains_key(&p) {
                return Err(spec_err(format!("`{p}` belongs in [sweep], not [fixed]")));
            }
        }
        if let Some(p) = REQUIRED.iter().find(|p| !self.is_set(**p)) {
            return Err(spec_err(format!(
                "required parameter `{p}` is neither an axis nor fixed"
            )));
        }
        match (
            self.is_set(Param::GRxDbi),
            self.is_set(Param::GOverTDbiPerK),
        ) {
            (false, false) => {
                return Err(spec_err(
                    "one of `g_rx_dbi` or `g_over_t_dbi_per_k` is required",
                ))
            }
            (true, true) => {
                return Err(spec_err(
                    "`g_rx_dbi` and `g_over_t_dbi_per_k` are mutually exclusive",
                ))
            }
            _ => {}
        }
        if self.output_schema.is_empty() {
            return Err(spec_err("output schema has no columns"));
        }
        // Parameter-combination rules do not depend on the grid position.
        resolve(&self.point(0)).map_err(|e| spec_err(e.to_string()))?;
        Ok(())
    }

    /// Parameters at grid point `index`, decoded with the last axis fastest.
    pub fn point(&self, index: usize) -> ParamSet {
        let mut params: ParamSet = self.fixed.iter().map(|(p, f)| (*p, f.value)).collect();
        let mut rest = index;
        for axis in self.axes.iter().rev() {
            let n = axis.values.len();
            params.insert(axis.param, axis.values[rest % n]);
            rest /= n;
        }
        params
    }

    fn provenance(&self, tables: &ChannelTables) -> Vec<String> {
        let mut lines = vec![
            format!("ntnsim sweep {}", self.name),
            format!(
                "grid: {} = {} points",
                self.axes
                    .iter()
                    .map(|a| format!("{}[{}]", a.param, a.values.len()))
                    .collect::<Vec<_>>()
                    .join(" x "),
                self.grid_size()
            ),
            tables_provenance(tables),
            match self.seed {
                None => "loss mode: expected".to_string(),
                Some(s) => {
                    format!("loss mode: sampled, seed {s} (point seed = seed xor row index)")
                }
            },
        ];
        for a in &self.axes {
            let values: Vec<String> = a.values.iter().map(|v| v.to_string()).collect();
            lines.push(format!("axis {} = {}", a.param, values.join(", ")));
        }
        for (p, f) in &self.fixed {
            lines.push(format!("fixed {p} = {} ({})", f.value, f.source));
        }
        lines.extend(self.notes.iter().cloned());
        lines
    }
}

/// Identifies the channel tables in output headers.
pub fn tables_provenance(tables: &ChannelTables) -> String {
    format!(
        "tables: atmosphere sha256 {}; scenarios sha256 {}",
        tables.atmosphere.checksum(),
        tables.scenarios.checksum()
    )
}

/// A successfully evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub index: usize,
    pub params: ParamSet,
    pub result: LinkResult,
    pub cells: Vec<Cell>,
}

impl Row {
    pub fn num(&self, p: Param) -> Option<f64> {
        match self.params.get(&p) {
            Some(Value::Num(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn matches(&self, filter: &[(Param, Value)]) -> bool {
        filter.iter().all(|(p, v)| self.params.get(p) == Some(v))
    }
}

/// A grid point that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub index: usize,
    pub params: ParamSet,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub errors: Vec<RowError>,
    /// Header comment lines, written before the CSV header.
    pub provenance: Vec<String>,
}

impl ResultTable {
    pub fn empty(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            errors: Vec::new(),
            provenance: Vec::new(),
        }
    }

    /// One row per result with every derived column, for single evaluations.
    pub fn from_results(results: Vec<LinkResult>, provenance: Vec<String>) -> Self {
        let columns = Column::DERIVED.to_vec();
        let params = ParamSet::new();
        let rows = results
            .into_iter()
            .enumerate()
            .map(|(index, result)| Row {
                index,
                cells: columns.iter().map(|c| c.cell(&params, &result)).collect(),
                params: params.clone(),
                result,
            })
            .collect();
        Self {
            columns,
            rows,
            errors: Vec::new(),
            provenance,
        }
    }

    pub fn find(&self, filter: &[(Param, Value)]) -> Option<&Row> {
        self.rows.iter().find(|r| r.matches(filter))
    }

    pub fn select(&self, filter: &[(Param, Value)]) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.matches(filter)).collect()
    }

    /// Rows matching `filter`, as a table without provenance or error records.
    pub fn slice(&self, filter: &[(Param, Value)]) -> ResultTable {
        ResultTable {
            columns: self.columns.clone(),
            rows: self.select(filter).into_iter().cloned().collect(),
            errors: Vec::new(),
            provenance: Vec::new(),
        }
    }
}

fn evaluate_point(
    spec: &SweepSpec,
    index: usize,
    tables: &ChannelTables,
) -> std::result::Result<Row, RowError> {
    let params = spec.point(index);
    let outcome = resolve(&params).and_then(|mut config| {
        if let Some(seed) = spec.seed {
            config.loss_mode = LossMode::Sampled(seed ^ index as u64);
        }
        config.evaluate(tables)
    });
    match outcome {
        Ok(result) => {
            let cells = spec
                .output_schema
                .iter()
                .map(|c| c.cell(&params, &result))
                .collect();
            Ok(Row {
                index,
                params,
                result,
                cells,
            })
        }
        Err(e) => Err(RowError {
            index,
            params,
            reason: e.to_string(),
        }),
    }
}

/// Evaluates every grid point. Points that fail are recorded as row errors
/// and do not stop the run.
pub fn run_sweep(spec: &SweepSpec, tables: &ChannelTables) -> Result<ResultTable> {
    spec.validate()?;
    let outcomes: Vec<_> = (0..spec.grid_size())
        .into_par_iter()
        .map(|i| evaluate_point(spec, i, tables))
        .collect();
    let mut table = ResultTable::empty(spec.output_schema.clone());
    table.provenance = spec.provenance(tables);
    for outcome in outcomes {
        match outcome {
            Ok(row) => table.rows.push(row),
            Err(err) => table.errors.push(err),
        }
    }
    Ok(table)
}

fn parse_axis_values(param: Param, text: &str) -> Result<Vec<Value>> {
    let mut values = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            continue;
        }
        if let Some((start, rest)) = item.split_once("..") {
            let (end, step) = match rest.split_once("step") {
                Some((end, step)) => (end, step),
                None => return Err(spec_err(format!("range `{item}` needs `step`"))),
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| spec_err(format!("bad number `{}` in range `{item}`", s.trim())))
            };
            let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
            if !(step > 0.0) || end < start {
                return Err(spec_err(format!(
                    "range `{item}` must ascend with a positive step"
                )));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            values.extend((0..count).map(|i| Value::Num(start + i as f64 * step)));
        } else {
            values.push(param.parse_value(item)?);
        }
    }
    Ok(values)
}

/// Parses a sweep-spec file (sections `[sweep]`, `[axes]`, `[fixed]`,
/// `[output]`).
pub fn parse_sweep_spec(text: &str) -> Result<SweepSpec> {
    let entries = kv::parse(text).map_err(|e| spec_err(e.to_string()))?;
    let mut spec = SweepSpec {
        name: "custom".into(),
        axes: Vec::new(),
        fixed: BTreeMap::new(),
        output_schema: Vec::new(),
        seed: None,
        notes: Vec::new(),
    };
    let mut columns = None;
    for e in entries {
        let at = |msg: String| spec_err(format!("line {}: {msg}", e.line));
        let param =
            || Param::from_key(&e.key).ok_or_else(|| at(format!("unknown key `{}`", e.key)));
        match e.section.as_deref() {
            Some("sweep") => match e.key.as_str() {
                "name" => spec.name = e.value.clone(),
                "seed" => {
                    spec.seed =
                        Some(e.value.parse().map_err(|_| {
                            at(format!("seed must be an integer, got `{}`", e.value))
                        })?)
                }
                other => return Err(at(format!("unknown key `{other}` in [sweep]"))),
            },
            Some("axes") => {
                let param = param()?;
                let values =
                    parse_axis_values(param, &e.value).map_err(|err| at(err.to_string()))?;
                spec.axes.push(Axis { param, values });
            }
            Some("fixed") => {
                let param = param()?;
                let value = param
                    .parse_value(&e.value)
                    .map_err(|err| at(err.to_string()))?;
                let fixed = FixedValue {
                    value,
                    source: "spec file".into(),
                };
                if spec.fixed.insert(param, fixed).is_some() {
                    return Err(at(format!("duplicate fixed key `{}`", e.key)));
                }
            }
            Some("output") => match e.key.as_str() {
                "columns" => {
                    let cols = e
                        .value
                        .split(',')
                        .map(str::trim)
                        .filter(|c| !c.is_empty())
                        .map(|c| {
                            Column::from_name(c).ok_or_else(|| at(format!("unknown column `{c}`")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    columns = Some(cols);
                }
                other => return Err(at(format!("unknown key `{other}` in [output]"))),
            },
            Some(other) => return Err(at(format!("unknown section `[{other}]`"))),
            None => return Err(at(format!("key `{}` outside any section", e.key))),
        }
    }
    spec.output_schema = columns.unwrap_or_else(|| SweepSpec::default_schema(&spec.axes));
    spec.validate()?;
    Ok(spec)
}

pub fn load_sweep_spec(path: impl AsRef<Path>) -> Result<SweepSpec> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_sweep_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Scenario;

    const SPEC: &str = "\
[sweep]
name = rural-elevation
[axes]
elevation_deg = 10..90 step 10
[fixed]
altitude_km = 300
fc_ghz = 20
scenario = rural
tx_power_dbm = 10
g_over_t_dbi_per_k = 15.9
";

    #[test]
    fn parses_ranges_and_defaults() {
        let spec = parse_sweep_spec(SPEC).unwrap();
        assert_eq!(spec.grid_size(), 9);
        assert_eq!(spec.axes[0].values[8], Value::Num(90.0));
        assert_eq!(spec.output_schema[0], Column::Param(Param::ElevationDeg));
        assert_eq!(*spec.output_schema.last().unwrap(), Column::CapacityBps);
    }

    #[test]
    fn rural_capacity_rises_with_elevation() {
        let spec = parse_sweep_spec(SPEC).unwrap();
        let t = run_sweep(&spec, &ChannelTables::builtin()).unwrap();
        assert_eq!(t.rows.len(), 9);
        assert!(t
            .rows
            .windows(2)
            .all(|w| w[1].result.capacity_bps >= w[0].result.capacity_bps));
    }

    #[test]
    fn lexicographic_order() {
        let text = SPEC
            .replace(
                "elevation_deg = 10..90 step 10",
                "elevation_deg = 10, 50\nscenario = dense_urban, rural",
            )
            .replace("scenario = rural\n", "");
        let spec = parse_sweep_spec(&text).unwrap();
        let t = run_sweep(&spec, &ChannelTables::builtin()).unwrap();
        let order: Vec<(f64, Value)> = t
            .rows
            .iter()
            .map(|r| {
                (
                    r.num(Param::ElevationDeg).unwrap(),
                    r.params[&Param::Scenario],
                )
            })
            .collect();
        let du = Value::Scenario(Scenario::DenseUrban);
        let ru = Value::Scenario(Scenario::Rural);
        assert_eq!(order, vec![(10.0, du), (10.0, ru), (50.0, du), (50.0, ru)]);
    }

    #[test]
    fn empty_axis_is_spec_error() {
        let text = SPEC.replace("10..90 step 10", ",");
        assert!(matches!(parse_sweep_spec(&text), Err(Error::Spec(_))));
    }

    #[test]
    fn structural_errors() {
        let dup = SPEC.replace("altitude_km = 300", "altitude_km = 300\nelevation_deg = 10");
        assert!(parse_sweep_spec(&dup)
            .unwrap_err()
            .to_string()
            .contains("both"));
        let missing = SPEC.replace("tx_power_dbm = 10\n", "");
        assert!(parse_sweep_spec(&missing)
            .unwrap_err()
            .to_string()
            .contains("tx_power_dbm"));
        let not_axis = SPEC.replace(
            "elevation_deg = 10..90 step 10",
            "elevation_deg = 10..90 step 10\ntx_power_dbm = 1, 2",
        );
        assert!(parse_sweep_spec(&not_axis).is_err());
        let no_rx = SPEC.replace("g_over_t_dbi_per_k = 15.9\n", "");
        assert!(parse_sweep_spec(&no_rx).is_err());
        let bad_col = format!("{SPEC}[output]\ncolumns = elevation_deg, throughput\n");
        assert!(parse_sweep_spec(&bad_col)
            .unwrap_err()
            .to_string()
            .contains("throughput"));
        let stray = format!("x = 1\n{SPEC}");
        assert!(parse_sweep_spec(&stray)
            .unwrap_err()
            .to_string()
            .contains("line 1"));
        let no_temp = SPEC.replace("g_over_t_dbi_per_k = 15.9", "g_rx_dbi = 40");
        assert!(matches!(parse_sweep_spec(&no_temp), Err(Error::Spec(_))));
    }

    #[test]
    fn bad_points_become_error_rows() {
        let text = SPEC
            .replace("elevation_deg = 10..90 step 10", "altitude_km = 50, 300")
            .replace("altitude_km = 300", "elevation_deg = 30");
        let spec = parse_sweep_spec(&text).unwrap();
        let t = run_sweep(&spec, &ChannelTables::builtin()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.errors.len(), 1);
        assert_eq!(t.errors[0].index, 0);
        assert!(t.errors[0].reason.contains("gap"), "{}", t.errors[0].reason);
        assert_eq!(t.rows.len() + t.errors.len(), spec.grid_size());
    }

    #[test]
    fn seeded_runs_repeat_and_differ_per_point() {
        let text = SPEC
            .replace("[sweep]\n", "[sweep]\nseed = 11\n")
            .replace("scenario = rural", "scenario = dense_urban");
        let spec = parse_sweep_spec(&text).unwrap();
        let tables = ChannelTables::builtin();
        let a = run_sweep(&spec, &tables).unwrap();
        let b = run_sweep(&spec, &tables).unwrap();
        assert_eq!(a, b);
        assert!(a.provenance.iter().any(|l| l.contains("seed 11")));
    }

    #[test]
    fn custom_columns() {
        let text =
            format!("{SPEC}[output]\ncolumns = elevation_deg, label, bandwidth_hz, capacity_bps\n");
        let spec = parse_sweep_spec(&text).unwrap();
        let t = run_sweep(&spec, &ChannelTables::builtin()).unwrap();
        assert_eq!(t.rows[0].cells[1], Cell::Text("direct".into()));
        assert_eq!(t.rows[0].cells[2], Cell::Num(800e6));
    }
}
