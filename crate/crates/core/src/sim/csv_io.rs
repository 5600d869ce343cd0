//! CSV export of a run and read-back of the sensitivity columns.
//!
//! Column order: `t`, the model states, the pose `X, Y, psi`, the inputs, then
//! `Z_<state>_<param>` for every state (outer) and parameter (inner).

use std::io::{Read, Write};
use std::path::Path;

use crate::error::Error;
use crate::sim::output::SimOutput;

pub const POSE_NAMES: [&str; 3] = ["X", "Y", "psi"];

pub fn z_column(state: &str, param: &str) -> String {
    format!("Z_{state}_{param}")
}

pub fn header(out: &SimOutput) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(out.state_names.iter().cloned());
    h.extend(POSE_NAMES.iter().map(|s| s.to_string()));
    h.extend(out.input_names.iter().cloned());
    if out.sensitivities.is_some() {
        for s in &out.state_names {
            for p in &out.param_names {
                h.push(z_column(s, p));
            }
        }
    }
    h
}

pub fn write_csv<W: Write>(out: &SimOutput, w: W) -> Result<(), Error> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header(out))?;
    let n = out.state_names.len();
    for i in 0..out.len() {
        let mut row: Vec<String> = Vec::with_capacity(1 + n * (1 + out.param_names.len()));
        row.push(out.time[i].to_string());
        row.extend(out.states[i].iter().map(f64::to_string));
        row.extend(out.pose[i].iter().map(f64::to_string));
        row.extend(out.inputs[i].iter().map(f64::to_string));
        if let Some(zs) = &out.sensitivities {
            let z = &zs[i];
            for r in 0..z.nrows() {
                for c in 0..z.ncols() {
                    row.push(z[(r, c)].to_string());
                }
            }
        }
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_csv_file(out: &SimOutput, path: &Path) -> Result<(), Error> {
    write_csv(out, std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// A numeric CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Result<Vec<f64>, Error> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Parameter names present as `Z_<state>_*` columns, in file order.
    pub fn z_params(&self, state: &str) -> Vec<String> {
        let prefix = format!("Z_{state}_");
        self.header.iter().filter_map(|h| h.strip_prefix(&prefix).map(str::to_string)).collect()
    }
}

pub fn read_csv<R: Read>(r: R) -> Result<CsvTable, Error> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Mismatch(format!("not a number: `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

pub fn read_csv_file(path: &Path) -> Result<CsvTable, Error> {
    read_csv(std::fs::File::open(path)?)
}
