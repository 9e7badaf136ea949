//! Daily stock return panel and its long-CSV format.
//!
//! Format: header `date,stock_id,ret`, ISO-8601 dates, decimal simple
//! returns. Missing (stock, date) cells are simply absent rows.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use ndarray::Array2;

use crate::calendar::TradingCalendar;
use crate::error::{Error, Result};

/// Panel of daily simple returns, dates on rows and stocks on columns.
/// Missing cells are stored as NaN; every present value is finite.
#[derive(Debug, Clone)]
pub struct ReturnPanel {
    calendar: TradingCalendar,
    stocks: Vec<String>,
    values: Array2<f64>,
}

impl ReturnPanel {
    /// Builds a panel from parts, validating shape and cell contents.
    pub fn from_parts(
        calendar: TradingCalendar,
        stocks: Vec<String>,
        values: Array2<f64>,
    ) -> Result<Self> {
        if values.nrows() != calendar.len() || values.ncols() != stocks.len() {
            return Err(Error::InvalidInput(format!(
                "panel shape {:?} does not match {} dates x {} stocks",
                values.dim(),
                calendar.len(),
                stocks.len()
            )));
        }
        let mut sorted = stocks.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != stocks.len() {
            return Err(Error::InvalidInput("duplicate stock identifiers".into()));
        }
        if values.iter().any(|v| v.is_infinite()) {
            return Err(Error::InvalidInput("non-finite return value".into()));
        }
        Ok(ReturnPanel {
            calendar,
            stocks,
            values,
        })
    }

    pub fn calendar(&self) -> &TradingCalendar {
        &self.calendar
    }

    pub fn stocks(&self) -> &[String] {
        &self.stocks
    }

    pub fn n_stocks(&self) -> usize {
        self.stocks.len()
    }

    pub fn stock_index(&self, id: &str) -> Option<usize> {
        self.stocks.iter().position(|s| s == id)
    }

    /// Return for (date index, stock index); NaN marks a missing cell.
    pub fn value(&self, date_idx: usize, stock_idx: usize) -> f64 {
        self.values[[date_idx, stock_idx]]
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn n_missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }

    /// Writes the long-CSV form in canonical order (date, then stock id).
    /// Missing cells produce no row.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
        w.write_record(["date", "stock_id", "ret"])
            .map_err(|e| io_err(path, e))?;
        for (di, date) in self.calendar.dates().iter().enumerate() {
            for (si, stock) in self.stocks.iter().enumerate() {
                let v = self.values[[di, si]];
                if v.is_nan() {
                    continue;
                }
                w.write_record([date.to_string(), stock.clone(), v.to_string()])
                    .map_err(|e| io_err(path, e))?;
            }
        }
        w.flush()
            .map_err(|e| Error::Io {
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

/// Loads a long-format returns CSV into a panel indexed on the union of
/// dates. Duplicate rows with identical values are collapsed; duplicates
/// with conflicting values are an error.
pub fn load_returns(path: &Path) -> Result<ReturnPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io {
                path: path.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()),
            },
            _ => io_err(path, e),
        })?;

    // (date, stock) -> return, deduplicated as we go
    let mut cells: BTreeMap<(NaiveDate, String), f64> = BTreeMap::new();
    let mut n_rows = 0u64;
    for rec in reader.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != 3 {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line,
                reason: format!("expected 3 fields, got {}", rec.len()),
            });
        }
        let date: NaiveDate = rec[0].trim().parse().map_err(|_| Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason: format!("unparseable date {:?}", &rec[0]),
        })?;
        let stock = rec[1].trim().to_string();
        if stock.is_empty() {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line,
                reason: "empty stock_id".into(),
            });
        }
        let ret: f64 = rec[2].trim().parse().map_err(|_| Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason: format!("unparseable return {:?}", &rec[2]),
        })?;
        if !ret.is_finite() {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line,
                reason: format!("non-finite return {ret}"),
            });
        }
        n_rows += 1;
        if let Some(&prev) = cells.get(&(date, stock.clone())) {
            if prev != ret {
                return Err(Error::ConflictingDuplicate {
                    key: format!("({date}, {stock})"),
                    first: prev,
                    second: ret,
                });
            }
        } else {
            cells.insert((date, stock), ret);
        }
    }
    if n_rows == 0 {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }

    let mut dates: Vec<NaiveDate> = cells.keys().map(|(d, _)| *d).collect();
    dates.sort();
    dates.dedup();
    let mut stocks: Vec<String> = cells.keys().map(|(_, s)| s.clone()).collect();
    stocks.sort();
    stocks.dedup();

    let calendar = TradingCalendar::new(dates)?;
    let mut values = Array2::from_elem((calendar.len(), stocks.len()), f64::NAN);
    for ((date, stock), ret) in &cells {
        let di = calendar.index_of(*date).unwrap();
        let si = stocks.binary_search(stock).unwrap();
        values[[di, si]] = *ret;
    }
    ReturnPanel::from_parts(calendar, stocks, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_complete_panel() {
        let f = write_tmp(
            "date,stock_id,ret\n\
             2020-01-02,AAA,0.01\n2020-01-02,BBB,-0.02\n\
             2020-01-03,AAA,0.00\n2020-01-03,BBB,0.03\n\
             2020-01-06,AAA,0.02\n2020-01-06,BBB,0.01\n",
        );
        let panel = load_returns(f.path()).unwrap();
        assert_eq!(panel.calendar().len(), 3);
        assert_eq!(panel.stocks(), &["AAA".to_string(), "BBB".to_string()]);
        assert_eq!(panel.n_missing(), 0);
        assert_eq!(panel.value(0, 1), -0.02);
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let f = write_tmp("date,stock_id,ret\n2020-01-02,AAA,notanumber\n");
        match load_returns(f.path()) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn omitted_cell_becomes_missing() {
        let f = write_tmp(
            "date,stock_id,ret\n\
             2020-01-02,AAA,0.01\n2020-01-02,BBB,0.02\n\
             2020-01-03,AAA,0.00\n\
             2020-01-06,AAA,0.02\n2020-01-06,BBB,0.01\n",
        );
        let panel = load_returns(f.path()).unwrap();
        assert_eq!(panel.n_missing(), 1);
        let bbb = panel.stock_index("BBB").unwrap();
        assert!(panel.value(1, bbb).is_nan());
    }

    #[test]
    fn conflicting_duplicate_is_rejected_but_identical_duplicate_is_not() {
        let ok = write_tmp(
            "date,stock_id,ret\n2020-01-02,AAA,0.01\n2020-01-02,AAA,0.01\n",
        );
        assert!(load_returns(ok.path()).is_ok());

        let bad = write_tmp(
            "date,stock_id,ret\n2020-01-02,AAA,0.01\n2020-01-02,AAA,0.02\n",
        );
        assert!(matches!(
            load_returns(bad.path()),
            Err(Error::ConflictingDuplicate { .. })
        ));
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_tmp("date,stock_id,ret\n");
        assert!(matches!(
            load_returns(f.path()),
            Err(Error::EmptyFile { .. })
        ));
    }

    #[test]
    fn csv_round_trip_is_identical() {
        let f = write_tmp(
            "date,stock_id,ret\n\
             2020-01-02,AAA,0.012345678901234567\n2020-01-02,BBB,-0.02\n\
             2020-01-03,BBB,0.03\n",
        );
        let panel = load_returns(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        panel.write_csv(out.path()).unwrap();
        let reloaded = load_returns(out.path()).unwrap();
        assert_eq!(panel.stocks(), reloaded.stocks());
        assert_eq!(panel.calendar(), reloaded.calendar());
        for di in 0..panel.calendar().len() {
            for si in 0..panel.n_stocks() {
                let a = panel.value(di, si);
                let b = reloaded.value(di, si);
                assert!(a == b || (a.is_nan() && b.is_nan()));
            }
        }
    }
}
