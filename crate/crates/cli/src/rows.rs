//! The CSV product: one row per (snr_db, metric, method).

use serde::Serialize;
use std::io::Write;
use tasim_core::Method;

/// Field order is the stable schema `snr_db,metric,method,value,stderr,trials`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub metric: String,
    pub method: &'static str,
    /// NaN marks a point that failed numerically.
    pub value: f64,
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
}

impl SweepRow {
    pub fn point(snr_db: f64, metric: impl Into<String>, method: Method, value: f64) -> Self {
        SweepRow { snr_db, metric: metric.into(), method: method.tag(), value, stderr: None, trials: None }
    }

    pub fn failed(snr_db: f64, metric: impl Into<String>, method: Method) -> Self {
        SweepRow::point(snr_db, metric, method, f64::NAN)
    }

    pub fn is_failed(&self) -> bool {
        self.value.is_nan()
    }
}

/// Canonical method order within one SNR point.
pub fn method_rank(tag: &str) -> u8 {
    match tag {
        "closed" => 0,
        "asymptotic" => 1,
        "oracle" => 2,
        _ => 3,
    }
}

/// Sorts by (snr_db, metric position, method); the sort is stable so metrics
/// keep their emission order.
pub fn order_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db).then(method_rank(a.method).cmp(&method_rank(b.method))));
}

pub fn write_rows<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["snr_db", "metric", "method", "value", "stderr", "trials"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_output_still_has_header() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "snr_db,metric,method,value,stderr,trials\n");
    }

    #[test]
    fn rows_sort_by_snr_then_method() {
        let mut rows = vec![
            SweepRow::point(10.0, "outage", Method::MonteCarlo, 0.1),
            SweepRow::point(0.0, "outage", Method::Oracle, 0.5),
            SweepRow::point(10.0, "outage", Method::Closed, 0.1),
            SweepRow::point(0.0, "outage", Method::Closed, 0.5),
        ];
        order_rows(&mut rows);
        let got: Vec<(f64, &str)> = rows.iter().map(|r| (r.snr_db, r.method)).collect();
        assert_eq!(got, [(0.0, "closed"), (0.0, "oracle"), (10.0, "closed"), (10.0, "mc")]);
    }

    #[test]
    fn failed_rows_serialize_as_nan() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[SweepRow::failed(5.0, "sep", Method::Oracle)]).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("5.0,sep,oracle,NaN,,\n"));
    }
}
