//! Per-firm greenhouse-gas intensity reports keyed by fiscal year.
//!
//! Intensity is CO2-equivalent emissions divided by revenue. Input rows
//! either carry the intensity directly (`firm_id,fiscal_year,intensity`)
//! or the raw pieces (`firm_id,fiscal_year,co2e_tonnes,revenue`).

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

/// GHG intensity history, at most one record per (firm, fiscal year).
#[derive(Debug, Clone, Default)]
pub struct GhgHistory {
    records: BTreeMap<(String, i32), f64>,
}

impl GhgHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a record; rejects duplicates and negative intensities.
    pub fn insert(&mut self, firm: &str, fiscal_year: i32, intensity: f64) -> Result<()> {
        if !(intensity >= 0.0) || !intensity.is_finite() {
            return Err(Error::InvalidInput(format!(
                "intensity {intensity} for firm {firm} must be finite and nonnegative"
            )));
        }
        let key = (firm.to_string(), fiscal_year);
        if self.records.contains_key(&key) {
            return Err(Error::DuplicateGhgRecord {
                firm: firm.to_string(),
                fiscal_year,
            });
        }
        self.records.insert(key, intensity);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, firm: &str, fiscal_year: i32) -> Option<f64> {
        self.records.get(&(firm.to_string(), fiscal_year)).copied()
    }

    /// Records of one firm, ordered by fiscal year.
    pub fn firm_records(&self, firm: &str) -> impl Iterator<Item = (i32, f64)> + '_ {
        let lo = (firm.to_string(), i32::MIN);
        let hi = (firm.to_string(), i32::MAX);
        self.records.range(lo..=hi).map(|((_, fy), v)| (*fy, *v))
    }

    pub fn firms(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.records.keys().map(|(f, _)| f.as_str()).collect();
        out.dedup();
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i32, f64)> + '_ {
        self.records.iter().map(|((f, fy), v)| (f.as_str(), *fy, *v))
    }

    /// Writes the intensity-form CSV.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
        w.write_record(["firm_id", "fiscal_year", "intensity"])
            .map_err(|e| io_err(path, e))?;
        for ((firm, fy), v) in &self.records {
            w.write_record([firm.clone(), fy.to_string(), v.to_string()])
                .map_err(|e| io_err(path, e))?;
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

/// Loads a GHG CSV in either the raw or intensity form, detected from the
/// header.
pub fn load_ghg(path: &Path) -> Result<GhgHistory> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;

    let headers = reader.headers().map_err(|e| io_err(path, e))?.clone();
    let cols: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
    let raw_form = ["firm_id", "fiscal_year", "co2e_tonnes", "revenue"];
    let intensity_form = ["firm_id", "fiscal_year", "intensity"];
    let is_raw = raw_form.iter().all(|c| cols.iter().any(|h| h == c));
    let is_intensity = intensity_form.iter().all(|c| cols.iter().any(|h| h == c));
    if !is_raw && !is_intensity {
        return Err(Error::MissingColumn {
            path: path.to_path_buf(),
            column: "co2e_tonnes+revenue or intensity".into(),
        });
    }
    let idx = |name: &str| cols.iter().position(|h| h == name).unwrap();

    let mut history = GhgHistory::new();
    let mut n_rows = 0u64;
    for rec in reader.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let malformed = |reason: String| Error::MalformedRow {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let firm = rec[idx("firm_id")].trim().to_string();
        if firm.is_empty() {
            return Err(malformed("empty firm_id".into()));
        }
        let fy: i32 = rec[idx("fiscal_year")]
            .trim()
            .parse()
            .map_err(|_| malformed(format!("unparseable fiscal_year {:?}", &rec[idx("fiscal_year")])))?;

        let intensity = if is_raw {
            let co2e: f64 = rec[idx("co2e_tonnes")]
                .trim()
                .parse()
                .map_err(|_| malformed("unparseable co2e_tonnes".into()))?;
            let revenue: f64 = rec[idx("revenue")]
                .trim()
                .parse()
                .map_err(|_| malformed("unparseable revenue".into()))?;
            if revenue <= 0.0 {
                return Err(Error::NonpositiveRevenue {
                    firm,
                    fiscal_year: fy,
                    revenue,
                });
            }
            if co2e < 0.0 {
                return Err(Error::NegativeEmissions {
                    firm,
                    fiscal_year: fy,
                    emissions: co2e,
                });
            }
            co2e / revenue
        } else {
            rec[idx("intensity")]
                .trim()
                .parse()
                .map_err(|_| malformed("unparseable intensity".into()))?
        };
        history.insert(&firm, fy, intensity)?;
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(history)
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
    fn raw_form_computes_intensity() {
        let f = write_tmp("firm_id,fiscal_year,co2e_tonnes,revenue\nAAA,2015,1000,500\n");
        let h = load_ghg(f.path()).unwrap();
        assert_eq!(h.get("AAA", 2015), Some(2.0));
    }

    #[test]
    fn nonpositive_revenue_is_rejected() {
        let f = write_tmp("firm_id,fiscal_year,co2e_tonnes,revenue\nAAA,2015,1000,0\n");
        assert!(matches!(
            load_ghg(f.path()),
            Err(Error::NonpositiveRevenue { .. })
        ));
    }

    #[test]
    fn negative_emissions_are_rejected() {
        let f = write_tmp("firm_id,fiscal_year,co2e_tonnes,revenue\nAAA,2015,-1,500\n");
        assert!(matches!(
            load_ghg(f.path()),
            Err(Error::NegativeEmissions { .. })
        ));
    }

    #[test]
    fn duplicate_record_is_rejected() {
        let f = write_tmp(
            "firm_id,fiscal_year,intensity\nAAA,2015,2.0\nAAA,2015,2.0\n",
        );
        assert!(matches!(
            load_ghg(f.path()),
            Err(Error::DuplicateGhgRecord { .. })
        ));
    }

    #[test]
    fn intensity_form_loads_directly() {
        let f = write_tmp("firm_id,fiscal_year,intensity\nAAA,2015,2.5\nAAA,2017,1.5\n");
        let h = load_ghg(f.path()).unwrap();
        let recs: Vec<_> = h.firm_records("AAA").collect();
        assert_eq!(recs, vec![(2015, 2.5), (2017, 1.5)]);
    }
}
