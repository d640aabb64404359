use std::fs;
use std::process::{Command, Output};

fn ntnsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ntnsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn link_prints_one_row() {
    let o = ntnsim(&[
        "link",
        "--txpow",
        "30",
        "--alt",
        "600",
        "--elev",
        "30",
        "--scenario",
        "rural",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines = data_lines(&text);
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("label,"));
    assert!(lines[1].starts_with("direct,"));
}

#[test]
fn link_reads_config_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("link.cfg");
    fs::write(
        &cfg,
        "[radio]\ntx_power_dbm = 30\nbandwidth_hz = 400 MHz\n[link]\naltitude_km = 600\n",
    )
    .unwrap();
    let o = ntnsim(&["link", "--config", cfg.to_str().unwrap(), "--elev", "45"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.contains("# elevation_deg = 45"));
    assert!(data_lines(&text)[1].contains(",4e+08,"));
}

#[test]
fn chain_lists_hops_then_total() {
    let o = ntnsim(&[
        "chain",
        "--txpow",
        "71",
        "--hop",
        "1200:20:10",
        "--hop",
        "20:0:10",
        "--mode",
        "df",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let labels: Vec<&str> = data_lines(&text)[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(labels, ["hop0", "hop1", "relay-df/2-hop"]);
}

#[test]
fn chain_gap_names_the_hop() {
    let o = ntnsim(&[
        "chain",
        "--txpow",
        "71",
        "--hop",
        "1200:25:10",
        "--hop",
        "20:0:10",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hop 1"));
}

#[test]
fn preset_to_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = ntnsim(&["preset", "--name", "fig4", "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert_eq!(data_lines(std::str::from_utf8(&text).unwrap()).len(), 55);
}

#[test]
fn sweep_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("rural.spec");
    fs::write(
        &spec,
        "[sweep]\nname = rural\n[axes]\nelevation_deg = 10..90 step 10\n[fixed]\n\
         altitude_km = 300\nfc_ghz = 20\nscenario = rural\ntx_power_dbm = 10\ng_over_t_dbi_per_k = 15.9\n",
    )
    .unwrap();
    let o = ntnsim(&["sweep", "--spec", spec.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("seed 3"));
    assert_eq!(data_lines(&text).len(), 10);
}

#[test]
fn exit_codes() {
    assert_eq!(ntnsim(&["link"]).status.code(), Some(1));
    assert_eq!(ntnsim(&["link", "--txpow", "x"]).status.code(), Some(1));
    assert_eq!(
        ntnsim(&["link", "--txpow", "30", "--fc", "150"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ntnsim(&["link", "--txpow", "30", "--tables", "/nonexistent"])
            .status
            .code(),
        Some(2)
    );
    let bad = ntnsim(&["preset", "--name", "fig9"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("fig2, fig3, fig4"));

    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("empty.spec");
    fs::write(&spec, "[axes]\nelevation_deg = ,\n").unwrap();
    assert_eq!(
        ntnsim(&["sweep", "--spec", spec.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(ntnsim(&["--help"]).status.code(), Some(0));
}
