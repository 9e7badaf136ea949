//! Daily factor return series in the Kenneth-French wide-CSV convention.
//!
//! Format: header `date,MKT,SMB,HML,RMW,CMA,MOM,RF`. The units flag says
//! whether file values are percent (divided by 100 on load) or decimal.

use std::path::Path;

use chrono::NaiveDate;
use ndarray::Array2;

use crate::calendar::TradingCalendar;
use crate::error::{Error, Result};

/// Default six-factor set.
pub const DEFAULT_FACTOR_NAMES: [&str; 6] = ["MKT", "SMB", "HML", "RMW", "CMA", "MOM"];

/// Units of the values stored in a factor CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Decimal,
    Percent,
}

impl std::str::FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "decimal" => Ok(Units::Decimal),
            "percent" => Ok(Units::Percent),
            _ => Err(Error::InvalidInput(format!(
                "invalid units {s:?}, expected decimal or percent"
            ))),
        }
    }
}

/// Daily returns of K factors plus the risk-free rate, no missing values.
#[derive(Debug, Clone)]
pub struct FactorSeries {
    calendar: TradingCalendar,
    names: Vec<String>,
    values: Array2<f64>,
    rf: Vec<f64>,
}

impl FactorSeries {
    pub fn from_parts(
        calendar: TradingCalendar,
        names: Vec<String>,
        values: Array2<f64>,
        rf: Vec<f64>,
    ) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidInput("need at least one factor".into()));
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::InvalidInput("duplicate factor names".into()));
        }
        if values.nrows() != calendar.len()
            || values.ncols() != names.len()
            || rf.len() != calendar.len()
        {
            return Err(Error::InvalidInput("factor series shape mismatch".into()));
        }
        if values.iter().chain(rf.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite factor value".into()));
        }
        Ok(FactorSeries {
            calendar,
            names,
            values,
            rf,
        })
    }

    pub fn calendar(&self) -> &TradingCalendar {
        &self.calendar
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of factors K.
    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn value(&self, date_idx: usize, factor_idx: usize) -> f64 {
        self.values[[date_idx, factor_idx]]
    }

    pub fn rf(&self) -> &[f64] {
        &self.rf
    }

    /// Writes the wide CSV in decimal units.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
        let mut header = vec!["date".to_string()];
        header.extend(self.names.iter().cloned());
        header.push("RF".into());
        w.write_record(&header).map_err(|e| io_err(path, e))?;
        for (di, date) in self.calendar.dates().iter().enumerate() {
            let mut rec = vec![date.to_string()];
            for fi in 0..self.k() {
                rec.push(self.values[[di, fi]].to_string());
            }
            rec.push(self.rf[di].to_string());
            w.write_record(&rec).map_err(|e| io_err(path, e))?;
        }
        w.flush().map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Ok(())
    }
}

fn io_err(path: &Path, e: csv::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::Other, e),
    }
}

/// Loads a wide factor CSV, normalizing values to decimal returns.
pub fn load_factors(path: &Path, units: Units) -> Result<FactorSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;

    let headers = reader.headers().map_err(|e| io_err(path, e))?.clone();
    let mut required: Vec<String> = vec!["date".into()];
    required.extend(DEFAULT_FACTOR_NAMES.iter().map(|s| s.to_string()));
    required.push("RF".into());
    let mut col_of = Vec::with_capacity(required.len());
    for name in &required {
        match headers.iter().position(|h| h.trim() == name) {
            Some(i) => col_of.push(i),
            None => {
                return Err(Error::MissingColumn {
                    path: path.to_path_buf(),
                    column: name.clone(),
                })
            }
        }
    }

    let scale = match units {
        Units::Decimal => 1.0,
        Units::Percent => 0.01,
    };

    let mut dates = Vec::new();
    let mut rows: Vec<[f64; 7]> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let date: NaiveDate =
            rec[col_of[0]].trim().parse().map_err(|_| Error::MalformedRow {
                path: path.to_path_buf(),
                line,
                reason: format!("unparseable date {:?}", &rec[col_of[0]]),
            })?;
        let mut row = [0.0f64; 7];
        for (slot, &ci) in col_of[1..].iter().enumerate() {
            let cell = rec.get(ci).map(str::trim).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    path: path.to_path_buf(),
                    line,
                    column: required[slot + 1].clone(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| Error::MalformedRow {
                path: path.to_path_buf(),
                line,
                reason: format!("unparseable value {cell:?} in column {}", required[slot + 1]),
            })?;
            row[slot] = v * scale;
        }
        dates.push(date);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }

    // Sort rows by date to canonicalize input ordering.
    let mut order: Vec<usize> = (0..dates.len()).collect();
    order.sort_by_key(|&i| dates[i]);
    let sorted_dates: Vec<NaiveDate> = order.iter().map(|&i| dates[i]).collect();
    let calendar = TradingCalendar::new(sorted_dates)?;

    let k = DEFAULT_FACTOR_NAMES.len();
    let mut values = Array2::zeros((calendar.len(), k));
    let mut rf = vec![0.0; calendar.len()];
    for (ri, &src) in order.iter().enumerate() {
        for fi in 0..k {
            values[[ri, fi]] = rows[src][fi];
        }
        rf[ri] = rows[src][k];
    }
    FactorSeries::from_parts(
        calendar,
        DEFAULT_FACTOR_NAMES.iter().map(|s| s.to_string()).collect(),
        values,
        rf,
    )
}
