//! File formats: CSV series with a fixed header and JSON metadata.
//!
//! Times are in `1/J` and energies in `J`. Non-finite values are written as
//! `inf` / `NaN`; an infinite `xi2` marks a depolarized collective spin.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use rsw_core::observables::ObservableRecord;

use crate::error::CliError;

pub const SERIES_COLUMNS: [&str; 18] = [
    "t",
    "mean_jx",
    "mean_jx_rotor",
    "mean_jx_sw",
    "var_jx",
    "var_jx_rotor",
    "var_jx_sw",
    "mean_jz",
    "var_jz",
    "min_perp_var",
    "xi2",
    "n0_density",
    "nfm_density",
    "renyi2",
    "renyi2_rotor",
    "renyi2_sw",
    "extrapolated",
    "negative_variance",
];

pub const CORRELATION_COLUMNS: [&str; 9] =
    ["t", "dx", "dy", "cyy", "czz", "cyy_rotor", "cyy_sw", "czz_rotor", "czz_sw"];

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn series_row(r: &ObservableRecord) -> Vec<String> {
    let s2 = r.renyi2.map_or([f64::NAN; 3], |s| [s.total, s.rotor, s.spin_wave]);
    vec![
        num(r.time),
        num(r.mean_jx.total),
        num(r.mean_jx.rotor),
        num(r.mean_jx.spin_wave),
        num(r.var_jx.total),
        num(r.var_jx.rotor),
        num(r.var_jx.spin_wave),
        num(r.mean_jz),
        num(r.var_jz),
        num(r.min_transverse_variance),
        num(r.squeezing),
        num(r.n0_density),
        num(r.nfm_density),
        num(s2[0]),
        num(s2[1]),
        num(s2[2]),
        (r.flags.extrapolated as u8).to_string(),
        (r.flags.negative_variance as u8).to_string(),
    ]
}

pub fn write_series(path: &Path, records: &[ObservableRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SERIES_COLUMNS)?;
    for r in records {
        w.write_record(series_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// One row per `(t, d)`, with `d` the minimum-image displacement.
pub fn write_correlations(path: &Path, records: &[ObservableRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CORRELATION_COLUMNS)?;
    for r in records {
        for c in &r.correlations {
            w.write_record([
                num(r.time),
                c.displacement[0].to_string(),
                c.displacement[1].to_string(),
                num(c.yy.total),
                num(c.zz.total),
                num(c.yy.rotor),
                num(c.yy.spin_wave),
                num(c.zz.rotor),
                num(c.zz.spin_wave),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_table<S: AsRef<str>>(path: &Path, header: &[&str], rows: &[Vec<S>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref()))?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON; non-finite floats become `null`.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
