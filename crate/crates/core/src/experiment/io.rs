//! CSV and JSON formats used by the command-line tool.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::study::StudyTable;
use crate::error::{Error, Result};
use crate::filters::FilterOutput;
use crate::svm::{SvmParams, Trajectory};

/// Model parameters as read from a JSON config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub mu: f64,
    pub phi: f64,
    pub sigma_h: f64,
    pub alpha: f64,
    pub beta: f64,
    pub sigma_v: f64,
}

impl ModelConfig {
    pub fn to_params(&self) -> Result<SvmParams> {
        SvmParams::new(self.mu, self.phi, self.sigma_h, self.alpha, self.beta, self.sigma_v)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut text = String::new();
        File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
            .read_to_string(&mut text)?;
        Self::from_json(&text)
    }
}

impl From<&SvmParams> for ModelConfig {
    fn from(p: &SvmParams) -> Self {
        Self {
            mu: p.mu(),
            phi: p.phi(),
            sigma_h: p.sigma_h(),
            alpha: p.obs_noise().alpha,
            beta: p.obs_noise().beta,
            sigma_v: p.obs_noise().gamma,
        }
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// `t,y,h_true` with a leading `0,,h0` row.
pub fn write_data<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "y", "h_true"])?;
    w.write_record(["0".to_string(), String::new(), traj.h[0].to_string()])?;
    for (t, y) in traj.y.iter().enumerate() {
        w.write_record([(t + 1).to_string(), y.to_string(), traj.h[t + 1].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_data_file(traj: &Trajectory, path: &Path) -> Result<()> {
    let file = create(path)?;
    write_data(traj, file)
}

/// Observations read from a data file. `h_true` is present only when every
/// row, including the `t = 0` row, carries it.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedData {
    pub y: Vec<f64>,
    pub h_true: Option<Vec<f64>>,
}

fn parse_field(field: &str, what: &str, line: usize) -> Result<Option<f64>> {
    let field = field.trim();
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::Parse(format!("line {line}: bad {what} '{field}'")))
}

pub fn read_data<R: Read>(input: R) -> Result<ObservedData> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (ti, yi) = match (col("t"), col("y")) {
        (Some(t), Some(y)) => (t, y),
        _ => return Err(Error::Parse("data header must contain t and y".into())),
    };
    let hi = col("h_true");

    let mut y = Vec::new();
    let mut h = Vec::new();
    let mut h_complete = hi.is_some();
    let mut saw_zero = false;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let t: usize = rec
            .get(ti)
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: bad t")))?;
        let hv = match hi {
            Some(i) => parse_field(rec.get(i).unwrap_or(""), "h_true", line)?,
            None => None,
        };
        if t == 0 && row == 0 {
            saw_zero = true;
        } else {
            let expected = y.len() + 1;
            if t != expected {
                return Err(Error::Parse(format!("line {line}: expected t = {expected}, got {t}")));
            }
            let yv = parse_field(rec.get(yi).unwrap_or(""), "y", line)?
                .ok_or_else(|| Error::Parse(format!("line {line}: missing y")))?;
            y.push(yv);
        }
        match hv {
            Some(v) => h.push(v),
            None => h_complete = false,
        }
    }
    if y.is_empty() {
        return Err(Error::Empty("observations"));
    }
    let h_true = (h_complete && saw_zero && h.len() == y.len() + 1).then_some(h);
    Ok(ObservedData { y, h_true })
}

pub fn read_data_file(path: &Path) -> Result<ObservedData> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_data(file)
}

/// `t,h_est,ess`, one row per t = 1..T.
pub fn write_filtered<W: Write>(out: &FilterOutput, dest: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(dest);
    w.write_record(["t", "h_est", "ess"])?;
    for (t, (m, e)) in out.filtered_mean.iter().zip(&out.ess_trace).enumerate() {
        w.write_record([(t + 1).to_string(), m.to_string(), e.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_filtered_file(out: &FilterOutput, path: &Path) -> Result<()> {
    let file = create(path)?;
    write_filtered(out, file)
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "algo",
    "proposal",
    "kernel",
    "eps",
    "replicate",
    "rmse",
    "ae",
    "seconds",
    "degeneracies",
];

/// Per-replicate rows for every cell, then `mean`, `median`, `min`, `max`
/// rows per cell.
pub fn write_summary<W: Write>(table: &StudyTable, dest: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(dest);
    w.write_record(SUMMARY_HEADER)?;
    let prefix = |c: usize| {
        let cell = &table.cells[c];
        [
            cell.algorithm.label().to_string(),
            cell.proposal_label().to_string(),
            cell.kernel_label().to_string(),
            cell.eps_value().to_string(),
        ]
    };
    for r in &table.records {
        let m = &r.metrics;
        let mut row = prefix(r.cell).to_vec();
        row.extend([
            r.replicate.to_string(),
            m.rmse.to_string(),
            m.ae.to_string(),
            m.elapsed.to_string(),
            m.degeneracy_count.to_string(),
        ]);
        w.write_record(&row)?;
    }
    for (c, agg) in table.aggregates.iter().enumerate() {
        for (name, pick) in [
            (
                "mean",
                (|s: &super::study::Summary| s.mean) as fn(&super::study::Summary) -> f64,
            ),
            ("median", |s| s.median),
            ("min", |s| s.min),
            ("max", |s| s.max),
        ] {
            let mut row = prefix(c).to_vec();
            row.extend([
                name.to_string(),
                pick(&agg.rmse).to_string(),
                pick(&agg.ae).to_string(),
                pick(&agg.seconds).to_string(),
                pick(&agg.degeneracies).to_string(),
            ]);
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_file(table: &StudyTable, path: &Path) -> Result<()> {
    write_summary(table, create(path)?)
}

/// Long format: one row per (cell, replicate, metric).
pub fn write_boxplot<W: Write>(table: &StudyTable, dest: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(dest);
    w.write_record([
        "cell",
        "algo",
        "proposal",
        "kernel",
        "eps",
        "replicate",
        "metric",
        "value",
    ])?;
    for r in &table.records {
        let cell = &table.cells[r.cell];
        let m = &r.metrics;
        for (metric, value) in [
            ("rmse", m.rmse),
            ("ae", m.ae),
            ("seconds", m.elapsed),
            ("degeneracies", m.degeneracy_count as f64),
        ] {
            w.write_record([
                r.cell.to_string(),
                cell.algorithm.label().to_string(),
                cell.proposal_label().to_string(),
                cell.kernel_label().to_string(),
                cell.eps_value().to_string(),
                r.replicate.to_string(),
                metric.to_string(),
                value.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_boxplot_file(table: &StudyTable, path: &Path) -> Result<()> {
    let file = create(path)?;
    write_boxplot(table, file)
}
