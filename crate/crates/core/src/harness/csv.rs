//! CSV output for result tables.
//!
//! Layout: `# ` provenance lines, one header line, one line per evaluated
//! point, then one `# error row ...` line per failed point. Numbers use six
//! significant digits in C `%g` style. Output is UTF-8 with LF endings.

use std::io::Write;
use std::path::Path;

use super::sweep::{Cell, ResultTable};
use crate::error::{Error, Result};

/// Formats `x` like C's `printf("%.6g", x)`.
pub fn format_g6(x: f64) -> String {
    const PRECISION: i32 = 6;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    // Round to the target precision first; the exponent may move (9.999995 -> 10).
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn quote(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_g6(*v),
        Cell::Text(t) => quote(t),
        Cell::Empty => String::new(),
    }
}

fn comment(line: &str) -> String {
    // Keep every comment on one physical line.
    format!("# {}\n", line.replace(['\r', '\n'], " "))
}

pub fn emit_csv<W: Write>(table: &ResultTable, out: &mut W) -> std::io::Result<()> {
    let mut text = String::new();
    for line in &table.provenance {
        text.push_str(&comment(line));
    }
    let header: Vec<&str> = table.columns.iter().map(|c| c.name()).collect();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.cells.iter().map(cell_text).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    for err in &table.errors {
        let point: Vec<String> = err.params.iter().map(|(p, v)| format!("{p}={v}")).collect();
        text.push_str(&comment(&format!(
            "error row {} [{}]: {}",
            err.index,
            point.join(" "),
            err.reason
        )));
    }
    out.write_all(text.as_bytes())
}

pub fn csv_string(table: &ResultTable) -> String {
    let mut buf = Vec::new();
    emit_csv(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

pub fn write_csv(table: &ResultTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, csv_string(table))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
