//! Parsing and validation of the national COVID tracking CSV schema, plus
//! extraction of modeling series from it.

use std::collections::HashMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// The 18 columns of the national dataset, in canonical order.
pub const COLUMNS: [&str; 18] = [
    "date",
    "death",
    "deathIncrease",
    "inIcuCumulative",
    "inIcuCurrently",
    "hospitalizedIncrease",
    "hospitalizedCurrently",
    "hospitalizedCumulative",
    "negative",
    "negativeIncrease",
    "onVentilatorCumulative",
    "onVentilatorCurrently",
    "positive",
    "positiveIncrease",
    "states",
    "totalTestResults",
    "totalTestResultsIncrease",
    "recovered",
];

/// Cumulative columns expected to be non-decreasing over consecutive dates.
const CUMULATIVE: [&str; 6] = [
    "death",
    "positive",
    "negative",
    "totalTestResults",
    "recovered",
    "hospitalizedCumulative",
];

/// One row of the national dataset. Empty cells are explicit `None`s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovidRecord {
    pub date: NaiveDate,
    pub values: HashMap<String, Option<f64>>,
}

impl CovidRecord {
    pub fn get(&self, column: &str) -> Option<f64> {
        self.values.get(column).copied().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub row_count: usize,
}

/// A parsed, date-ordered national dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<CovidRecord>,
    pub provenance: Provenance,
    /// Cumulative-column monotonicity violations noticed at parse time,
    /// recorded but not fatal (real feeds contain revision days).
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Parse the 18-column national CSV. Column order is irrelevant; names are
/// matched case-sensitively. Empty cells become missing values.
pub fn parse_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path.display().to_string(), std::io::Error::other(e.to_string())),
            _ => Error::Integrity(e.to_string()),
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Integrity(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    for required in COLUMNS {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::MissingColumn(required.to_string()));
        }
    }

    let mut records: Vec<CovidRecord> = Vec::new();
    let mut warnings = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            row: i + 2,
            column: String::new(),
            message: e.to_string(),
        })?;
        let cell = |name: &str| -> &str {
            let idx = headers.iter().position(|h| h == name).unwrap();
            row.get(idx).unwrap_or("")
        };
        let date_str = cell("date");
        let date = NaiveDate::parse_from_str(date_str, "%Y-%m-%d").map_err(|_| Error::Parse {
            row: i + 2,
            column: "date".into(),
            message: format!("`{date_str}` is not an ISO-8601 date"),
        })?;
        let mut values = HashMap::new();
        for name in COLUMNS.iter().skip(1) {
            let raw = cell(name);
            let v = if raw.is_empty() {
                None
            } else {
                Some(raw.parse::<f64>().map_err(|_| Error::Parse {
                    row: i + 2,
                    column: (*name).into(),
                    message: format!("`{raw}` is not numeric"),
                })?)
            };
            values.insert((*name).to_string(), v);
        }
        if let Some(prev) = records.last() {
            if date <= prev.date {
                return Err(Error::Integrity(format!(
                    "dates must be strictly increasing: {} after {}",
                    date, prev.date
                )));
            }
            if (date - prev.date).num_days() != 1 {
                return Err(Error::Integrity(format!(
                    "dates must be 1 day apart: gap between {} and {}",
                    prev.date, date
                )));
            }
            for col in CUMULATIVE {
                if let (Some(a), Some(b)) = (prev.get(col), values[col]) {
                    if b < a {
                        warnings.push(format!("{col} decreases on {date}: {a} -> {b}"));
                    }
                }
            }
        }
        records.push(CovidRecord { date, values });
    }

    Ok(Dataset {
        provenance: Provenance {
            source: path.display().to_string(),
            row_count: records.len(),
        },
        records,
        warnings,
    })
}

/// Write a dataset back out in canonical column order; `parse_csv(write_csv(ds))`
/// round-trips the dataset.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e.to_string())))?;
    w.write_record(COLUMNS)
        .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e.to_string())))?;
    for r in &ds.records {
        let mut row: Vec<String> = vec![r.date.format("%Y-%m-%d").to_string()];
        for name in COLUMNS.iter().skip(1) {
            row.push(match r.get(name) {
                Some(v) => {
                    if v.fract() == 0.0 && v.abs() < 1e15 {
                        format!("{}", v as i64)
                    } else {
                        format!("{v}")
                    }
                }
                None => String::new(),
            });
        }
        w.write_record(&row)
            .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e.to_string())))?;
    }
    w.flush()
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Extract one column as a series after dropping the first `trim_head` records.
/// Missing values inside the retained range are rejected.
pub fn extract_series(ds: &Dataset, column: &str, trim_head: usize) -> Result<TimeSeries> {
    if !COLUMNS.contains(&column) || column == "date" {
        return Err(Error::MissingColumn(column.to_string()));
    }
    if trim_head >= ds.len() {
        return Err(Error::InsufficientData {
            needed: trim_head + 1,
            have: ds.len(),
        });
    }
    let retained = &ds.records[trim_head..];
    let mut values = Vec::with_capacity(retained.len());
    for r in retained {
        match r.get(column) {
            Some(v) => values.push(v),
            None => {
                return Err(Error::DataGap {
                    date: r.date.to_string(),
                    column: column.to_string(),
                })
            }
        }
    }
    Ok(TimeSeries::new(retained[0].date, values))
}

/// Derive the infected series: I_t = C_t - H_t and I^H_t = H_t - R_t - D_t,
/// from the positive, hospitalizedCumulative, recovered, and death columns.
pub fn derive_infection_series(ds: &Dataset, trim_head: usize) -> Result<(TimeSeries, TimeSeries)> {
    let c = extract_series(ds, "positive", trim_head)?;
    let h = extract_series(ds, "hospitalizedCumulative", trim_head)?;
    let r = extract_series(ds, "recovered", trim_head)?;
    let d = extract_series(ds, "death", trim_head)?;
    let i: Vec<f64> = c.values.iter().zip(&h.values).map(|(c, h)| c - h).collect();
    let ih: Vec<f64> = h
        .values
        .iter()
        .zip(r.values.iter().zip(&d.values))
        .map(|(h, (r, d))| h - r - d)
        .collect();
    Ok((
        TimeSeries::new(c.start_date, i),
        TimeSeries::new(c.start_date, ih),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn header() -> String {
        COLUMNS.join(",")
    }

    fn row(date: &str, death: f64, increase: f64) -> String {
        // date,death,deathIncrease then 15 constant columns
        format!(
            "{date},{death},{increase},1,1,1,1,{h},1,1,1,1,{c},1,50,1,1,{r}",
            h = death * 3.0,
            c = death * 10.0,
            r = death * 2.0
        )
    }

    #[test]
    fn identity_parse_single_row() {
        let f = write_file(&format!("{}\n{}\n", header(), row("2020-03-01", 10.0, 1000.0)));
        let ds = parse_csv(f.path()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.records[0].get("deathIncrease"), Some(1000.0));
    }

    #[test]
    fn missing_column_named() {
        let cols: Vec<&str> = COLUMNS.iter().copied().filter(|c| *c != "recovered").collect();
        let f = write_file(&format!("{}\n", cols.join(",")));
        match parse_csv(f.path()) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "recovered"),
            other => panic!("expected missing-column error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_row_and_column() {
        let f = write_file(&format!(
            "{}\n2020-03-01,abc,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1\n",
            header()
        ));
        match parse_csv(f.path()) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "death");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_order_dates_rejected() {
        let f = write_file(&format!(
            "{}\n{}\n{}\n",
            header(),
            row("2020-03-02", 10.0, 1.0),
            row("2020-03-01", 11.0, 1.0)
        ));
        assert!(matches!(parse_csv(f.path()), Err(Error::Integrity(_))));
    }

    #[test]
    fn date_gap_rejected() {
        let f = write_file(&format!(
            "{}\n{}\n{}\n",
            header(),
            row("2020-03-01", 10.0, 1.0),
            row("2020-03-03", 11.0, 1.0)
        ));
        assert!(matches!(parse_csv(f.path()), Err(Error::Integrity(_))));
    }

    #[test]
    fn empty_cells_are_missing() {
        let f = write_file(&format!(
            "{}\n2020-03-01,5,1,,1,1,1,1,1,1,1,1,1,1,1,1,1,1\n",
            header()
        ));
        let ds = parse_csv(f.path()).unwrap();
        assert_eq!(ds.records[0].get("inIcuCumulative"), None);
    }

    #[test]
    fn roundtrip_write_parse() {
        let f = write_file(&format!(
            "{}\n{}\n{}\n{}\n",
            header(),
            row("2020-03-01", 10.0, 1.0),
            row("2020-03-02", 12.0, 2.0),
            row("2020-03-03", 15.0, 3.0)
        ));
        let ds = parse_csv(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_csv(&ds, out.path()).unwrap();
        let ds2 = parse_csv(out.path()).unwrap();
        assert_eq!(ds.records, ds2.records);
    }

    fn dataset(n: usize) -> Dataset {
        let rows: Vec<String> = (0..n)
            .map(|i| {
                let date = NaiveDate::from_ymd_opt(2020, 1, 13).unwrap()
                    + chrono::Duration::days(i as i64);
                row(&date.to_string(), 10.0 + i as f64, i as f64)
            })
            .collect();
        let f = write_file(&format!("{}\n{}\n", header(), rows.join("\n")));
        parse_csv(f.path()).unwrap()
    }

    #[test]
    fn extract_with_trim() {
        let ds = dataset(420);
        let s = extract_series(&ds, "deathIncrease", 44).unwrap();
        assert_eq!(s.len(), 376);
        assert_eq!(s.values[0], 44.0);
    }

    #[test]
    fn extract_full_length_and_length_identity() {
        let ds = dataset(30);
        for k in [0usize, 5, 29] {
            let s = extract_series(&ds, "death", k).unwrap();
            assert_eq!(s.len(), ds.len() - k);
        }
    }

    #[test]
    fn extract_trim_too_large() {
        let ds = dataset(10);
        assert!(extract_series(&ds, "death", 10).is_err());
    }

    #[test]
    fn extract_unknown_column() {
        let ds = dataset(5);
        assert!(matches!(
            extract_series(&ds, "nosuch", 0),
            Err(Error::MissingColumn(_))
        ));
    }

    #[test]
    fn infection_series_formula() {
        // C=100, H=30, R=10, D=5 -> I=70, IH=15
        let f = write_file(&format!(
            "{}\n2020-03-01,5,1,1,1,1,1,30,1,1,1,1,100,1,1,1,1,10\n",
            header()
        ));
        let ds = parse_csv(f.path()).unwrap();
        let (i, ih) = derive_infection_series(&ds, 0).unwrap();
        assert_eq!(i.values, vec![70.0]);
        assert_eq!(ih.values, vec![15.0]);
    }

    #[test]
    fn infection_series_additivity_identity() {
        // I_t + I^H_t = C_t - R_t - D_t for every row, recomputed by brute force.
        let ds = dataset(50);
        let (i, ih) = derive_infection_series(&ds, 0).unwrap();
        for (t, r) in ds.records.iter().enumerate() {
            let lhs = i.values[t] + ih.values[t];
            let rhs = r.get("positive").unwrap() - r.get("recovered").unwrap() - r.get("death").unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
