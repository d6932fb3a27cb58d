//! Output record and the CSV encodings of each command's results.

use std::io::Write;

use chrono::{SecondsFormat, Utc};
use coulomb_info::asymptotics::AsymptoticRow;
use coulomb_info::measures::{MeasureSet, Provenance};
use coulomb_info::oracle::ComparisonReport;
use coulomb_info::scan::SeriesScan;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Serialize)]
pub struct OutputRecord<T: Serialize> {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub inputs: Value,
    pub results: T,
    pub timestamp: String,
}

impl<T: Serialize> OutputRecord<T> {
    pub fn new(command: &'static str, inputs: Value, results: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            inputs,
            results,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn provenance(p: Option<&Provenance>) -> &'static str {
    match p {
        Some(Provenance::ClosedForm) => "closed_form",
        Some(Provenance::Numeric) => "numeric",
        Some(Provenance::Asymptotic) => "asymptotic",
        None => "",
    }
}

pub fn measures_csv<W: Write>(set: &MeasureSet, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["section", "name", "value", "provenance"])?;
    w.write_record(["energy", "energy", &num(set.energy), "closed_form"])?;
    for (section, map) in [
        ("position", &set.position),
        ("momentum", &set.momentum),
        ("products", &set.products),
    ] {
        for (name, v) in map {
            w.write_record([section, name, &num(*v), provenance(set.provenance.get(name))])?;
        }
    }
    for (name, v) in &set.numeric {
        let p = if set.unconverged.contains(name) { "oracle_unconverged" } else { "oracle" };
        w.write_record(["numeric", name, &num(*v), p])?;
    }
    w.flush()?;
    Ok(())
}

/// Row names are qualified with the state, e.g. `delta_x@n=2;Z=0.5`.
pub fn verify_csv<W: Write>(reports: &[ComparisonReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "closed", "numeric", "abs_err", "rel_err", "pass"])?;
    for report in reports {
        let tag = format!("n={};Z={}", report.state.n(), report.state.z());
        for row in &report.rows {
            w.write_record([
                format!("{}@{tag}", row.name),
                row.closed.map(num).unwrap_or_default(),
                num(row.numeric),
                num(row.abs_err),
                num(row.rel_err),
                row.pass.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn scan_csv<W: Write>(scan: &SeriesScan, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "value"])?;
    for p in &scan.points {
        w.write_record([p.n.to_string(), num(p.value)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn asymptotics_csv<W: Write>(rows: &[AsymptoticRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "Z",
        "s_numeric",
        "s_error_estimate",
        "s_stability",
        "s_asymptotic",
        "shannon_length_asymptotic",
        "difference",
        "relative_error",
        "e1_numeric",
        "e1_asymptotic",
        "residual",
        "converged",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            num(r.z),
            num(r.s_numeric),
            num(r.s_error_estimate),
            num(r.s_stability),
            num(r.s_asymptotic),
            num(r.shannon_length_asymptotic),
            num(r.difference),
            num(r.relative_error),
            num(r.e1_numeric),
            num(r.e1_asymptotic),
            num(r.residual),
            r.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
