use std::fs;

use approx::assert_relative_eq;
use ntnsim_core::channel::{ATMOSPHERE_FILE, SCENARIOS_FILE};
use ntnsim_core::geometry::{
    classify_station, differential_delay_ms, propagation_delay_ms, slant_range_km,
};
use ntnsim_core::harness::{csv_string, preset, run_sweep, write_csv, Param, ResultTable, Value};
use ntnsim_core::{ChannelTables, Error, Platform, Scenario};

#[test]
fn reference_geometry() {
    assert_relative_eq!(
        slant_range_km(0.0, 300.0, 10.0).unwrap(),
        1160.0782992764314,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        propagation_delay_ms(300.0).unwrap(),
        1.0006922855944562,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        differential_delay_ms(35786.0, 10.0, 90.0).unwrap(),
        15.994994826179113,
        max_relative = 1e-9
    );
    assert_eq!(classify_station(35786.0).unwrap().platform, Platform::Geo);
    assert_eq!(classify_station(20.0).unwrap().platform, Platform::Hap);
}

#[test]
fn empty_table_is_header_only() {
    let spec = preset("fig3").unwrap();
    let table = ResultTable::empty(spec.output_schema.clone());
    let text = csv_string(&table);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("elevation_deg,scenario,"));
}

#[test]
fn rural_slice_has_ten_lines() {
    let t = run_sweep(&preset("fig3").unwrap(), &ChannelTables::builtin()).unwrap();
    let rural = t.slice(&[(Param::Scenario, Value::Scenario(Scenario::Rural))]);
    let text = csv_string(&rural);
    assert_eq!(text.lines().count(), 10);
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn csv_header_carries_provenance() {
    let t = run_sweep(&preset("fig4").unwrap(), &ChannelTables::builtin()).unwrap();
    let text = csv_string(&t);
    let comments: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(comments
        .iter()
        .any(|l| l.contains("hap_altitude_km = 20 (fig4 setup)")));
    assert!(comments
        .iter()
        .any(|l| l.contains("tx_power_dbm = 71 (calibration fixture fig-defaults)")));
    assert!(comments.iter().any(|l| l.contains("sha256")));
    let header = text.lines().nth(comments.len()).unwrap();
    assert_eq!(header.split(',').count(), t.columns.len());
    assert_eq!(text.lines().count(), comments.len() + 1 + 54);
}

#[test]
fn tables_load_from_directory() {
    let dir = tempfile::tempdir().unwrap();
    let builtin = ChannelTables::builtin();
    let atm = include_str!("../data/atmosphere.tbl");
    let scen = include_str!("../data/scenarios.tbl");
    fs::write(dir.path().join(ATMOSPHERE_FILE), atm).unwrap();
    fs::write(dir.path().join(SCENARIOS_FILE), scen).unwrap();
    let loaded = ChannelTables::load_dir(dir.path()).unwrap();
    assert_eq!(loaded.atmosphere.checksum(), builtin.atmosphere.checksum());

    // A tampered data line no longer matches the declared checksum.
    fs::write(
        dir.path().join(ATMOSPHERE_FILE),
        atm.replace("0.300  0.976", "0.310  0.976"),
    )
    .unwrap();
    assert!(matches!(
        ChannelTables::load_dir(dir.path()),
        Err(Error::Table(_))
    ));

    let missing = tempfile::tempdir().unwrap();
    assert!(ChannelTables::load_dir(missing.path()).is_err());
}

#[test]
fn unwritable_destination_is_io_error() {
    let t = ResultTable::empty(vec![]);
    let err = write_csv(&t, "/nonexistent-dir/out.csv").unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}
