use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// One row of diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub t: f64,
    pub l2_sq: f64,
    pub grad_l2_sq: f64,
    pub htilde_d_sq: f64,
    /// `‖e^{σt|D_s|}u‖²_{H̃^d}`, one entry per σ.
    pub analytic: Vec<f64>,
    pub radius: f64,
    pub diss_residual: f64,
    pub drift: f64,
    /// Problem-specific columns, appended after the fixed set.
    pub extra: Vec<f64>,
}

/// Per-step diagnostics with strictly increasing times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeries {
    sigmas: Vec<f64>,
    extra_names: Vec<String>,
    records: Vec<Record>,
}

impl TimeSeries {
    pub fn new(sigmas: Vec<f64>, extra_names: Vec<String>) -> Self {
        TimeSeries { sigmas, extra_names, records: Vec::new() }
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    pub fn push(&mut self, r: Record) -> Result<()> {
        if r.analytic.len() != self.sigmas.len() || r.extra.len() != self.extra_names.len() {
            return Err(Error::Format("record width does not match the header".into()));
        }
        if let Some(last) = self.records.last() {
            if !(r.t > last.t) {
                return Err(Error::Format(format!("time {} does not follow {}", r.t, last.t)));
            }
        }
        self.records.push(r);
        Ok(())
    }

    pub fn header(&self) -> String {
        let mut cols: Vec<String> = ["t", "l2_sq", "grad_l2_sq", "htilde_d_sq"].iter().map(|s| s.to_string()).collect();
        cols.extend(self.sigmas.iter().map(|s| format!("analytic_sigma_{s:?}")));
        cols.extend(["radius", "diss_residual", "drift"].iter().map(|s| s.to_string()));
        cols.extend(self.extra_names.iter().cloned());
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for r in &self.records {
            let mut vals = vec![r.t, r.l2_sq, r.grad_l2_sq, r.htilde_d_sq];
            vals.extend(&r.analytic);
            vals.extend([r.radius, r.diss_residual, r.drift]);
            vals.extend(&r.extra);
            let line: Vec<String> = vals.iter().map(|v| format!("{v:.17e}")).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let header = self.header();
        let idx = header.split(',').position(|c| c == name)?;
        Some(
            self.records
                .iter()
                .map(|r| {
                    let mut vals = vec![r.t, r.l2_sq, r.grad_l2_sq, r.htilde_d_sq];
                    vals.extend(&r.analytic);
                    vals.extend([r.radius, r.diss_residual, r.drift]);
                    vals.extend(&r.extra);
                    vals[idx]
                })
                .collect(),
        )
    }
}
