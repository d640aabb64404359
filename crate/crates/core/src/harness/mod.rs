//! Sweeps, presets, config files and CSV output.

pub mod config;
pub mod csv;
mod kv;
pub mod params;
pub mod preset;
pub mod sweep;

pub use config::{load_config, load_config_params, parse_config, parse_config_params};
pub use csv::{csv_string, emit_csv, format_g6, write_csv};
pub use params::{resolve, LinkConfig, Param, ParamSet, Topology, Value};
pub use preset::{preset, PRESET_NAMES};
pub use sweep::{
    load_sweep_spec, parse_sweep_spec, run_sweep, tables_provenance, Cell, Column, ResultTable,
    Row, RowError, SweepSpec,
};
