//! CSV and JSON result export with a fixed column order.

use serde::Serialize;

use crate::solver::{SweepRowStatus, SweepTable};
use crate::workflow::SolveReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (csv or json)")),
        }
    }
}

fn csv_bytes(rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

/// Rows `variable,unit,value`: system variables first, then component
/// quantities as `component.quantity`, then engine metrics.
pub fn solve_rows(report: &SolveReport) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["variable".into(), "unit".into(), "value".into()]];
    for v in &report.variables {
        rows.push(vec![v.name.clone(), v.unit.symbol().into(), num(v.value)]);
    }
    for q in &report.quantities {
        rows.push(vec![format!("{}.{}", q.component, q.name), q.unit.symbol().into(), num(q.value)]);
    }
    if let Some(m) = &report.metrics {
        rows.push(vec!["metrics.thrust".into(), "N".into(), num(m.thrust)]);
        rows.push(vec!["metrics.isp".into(), "s".into(), num(m.isp)]);
        rows.push(vec!["metrics.mdot_total".into(), "kg/s".into(), num(m.mdot_total)]);
    }
    rows
}

pub fn export_solve(report: &SolveReport, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => csv_bytes(solve_rows(report)),
        Format::Json => json_bytes(report),
    }
}

/// Columns: swept value, status, thrust, isp, mdot_total, then every
/// variable in system order. Failed rows leave the values empty.
pub fn export_sweep(table: &SweepTable, format: Format) -> Vec<u8> {
    match format {
        Format::Json => json_bytes(table),
        Format::Csv => {
            let names: Vec<String> = table
                .rows
                .iter()
                .find_map(|r| r.report.as_ref())
                .map(|rep| rep.variables.iter().map(|v| v.name.clone()).collect())
                .unwrap_or_default();
            let mut header = vec![table.parameter.clone(), "status".into(), "thrust".into(), "isp".into(), "mdot_total".into()];
            header.extend(names.iter().cloned());
            let mut rows = vec![header];
            for r in &table.rows {
                let status = match r.status {
                    SweepRowStatus::Converged => "converged",
                    SweepRowStatus::Failed => "failed",
                };
                let mut row = vec![num(r.value), status.to_string()];
                match &r.report {
                    Some(rep) => {
                        let m = rep.metrics;
                        row.extend([m.map(|m| m.thrust), m.map(|m| m.isp), m.map(|m| m.mdot_total)].map(|v| v.map(num).unwrap_or_default()));
                        row.extend(names.iter().map(|n| rep.variable(n).map(num).unwrap_or_default()));
                    }
                    None => row.extend(std::iter::repeat_n(String::new(), 3 + names.len())),
                }
                rows.push(row);
            }
            csv_bytes(rows)
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("results serialize");
    v.push(b'\n');
    v
}
