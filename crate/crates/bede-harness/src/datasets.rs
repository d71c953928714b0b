//! Bundled datasets and CSV loading.
//!
//! Two small datasets are embedded verbatim; the two regression datasets are
//! bundled as CSV files whose `#` headers record their provenance. Arbitrary
//! user CSVs load through the same parser.

use crate::error::{Error, Result};
use bede::regression::RegressionData;

/// Differences between observed and forecast telephone line faults over 14
/// consecutive periods; the first difference is a gross negative outlier.
pub const TELEPHONE_FAULT: [f64; 14] = [
    -988.0, -135.0, -78.0, 3.0, 59.0, 83.0, 93.0, 110.0, 189.0, 197.0, 204.0, 229.0, 269.0, 310.0,
];

/// Counts of Drosophila offspring carrying a recessive lethal mutation after
/// chemical exposure: 23 zeros, 7 ones, 3 twos, and one extreme count of 91.
pub fn drosophila() -> Vec<f64> {
    let mut xs = vec![0.0; 23];
    xs.extend(vec![1.0; 7]);
    xs.extend(vec![2.0; 3]);
    xs.push(91.0);
    xs
}

/// The Drosophila sample with the extreme count removed (33 observations);
/// the usual benchmark for outlier-deleted likelihood fits.
pub fn drosophila_deleted() -> Vec<f64> {
    let mut xs = drosophila();
    xs.pop();
    xs
}

const BELGIUM_CSV: &str = include_str!("../data/belgium-calls.csv");
const SALINITY_CSV: &str = include_str!("../data/salinity.csv");

/// A named dataset: either a univariate sample or a regression design.
#[derive(Debug, Clone)]
pub enum DatasetKind {
    Univariate(Vec<f64>),
    Regression(RegressionData),
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    /// Where the values come from (embedded table or bundled CSV header).
    pub provenance: String,
    pub kind: DatasetKind,
}

/// Load a bundled dataset by name, or any CSV by path.
///
/// Bundled names: `telephone-fault`, `drosophila`, `drosophila-deleted`,
/// `belgium-calls`, `salinity`. A path is treated as a CSV with a header
/// row: one column loads as a univariate sample; with several columns the
/// last is the response and the rest are predictors (intercept added).
pub fn load_dataset(name: &str) -> Result<Dataset> {
    match name {
        "telephone-fault" => Ok(Dataset {
            name: name.to_string(),
            provenance: "embedded: differences of observed and forecast line faults".to_string(),
            kind: DatasetKind::Univariate(TELEPHONE_FAULT.to_vec()),
        }),
        "drosophila" => Ok(Dataset {
            name: name.to_string(),
            provenance: "embedded: recessive lethal counts, 34 flies".to_string(),
            kind: DatasetKind::Univariate(drosophila()),
        }),
        "drosophila-deleted" => Ok(Dataset {
            name: name.to_string(),
            provenance: "embedded: recessive lethal counts with the count of 91 removed"
                .to_string(),
            kind: DatasetKind::Univariate(drosophila_deleted()),
        }),
        "belgium-calls" => parse_csv_text(BELGIUM_CSV, name),
        "salinity" => parse_csv_text(SALINITY_CSV, name),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Dataset {
                name: path.to_string(),
                detail: e.to_string(),
            })?;
            parse_csv_text(&text, path)
        }
    }
}

/// Parse CSV text: `#` lines are provenance comments, the first remaining
/// line is the header, every later line is one numeric row.
fn parse_csv_text(text: &str, name: &str) -> Result<Dataset> {
    let mut provenance = String::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(note) = line.strip_prefix('#') {
            provenance.push_str(note.trim());
            provenance.push(' ');
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match &header {
            None => header = Some(fields.iter().map(|s| s.to_string()).collect()),
            Some(cols) => {
                if fields.len() != cols.len() {
                    return Err(Error::Dataset {
                        name: name.to_string(),
                        detail: format!(
                            "line {}: {} fields, header has {}",
                            lineno + 1,
                            fields.len(),
                            cols.len()
                        ),
                    });
                }
                let mut row = Vec::with_capacity(fields.len());
                for f in &fields {
                    row.push(f.parse::<f64>().map_err(|_| Error::Dataset {
                        name: name.to_string(),
                        detail: format!("line {}: non-numeric field {f:?}", lineno + 1),
                    })?);
                }
                rows.push(row);
            }
        }
    }
    let header = header.ok_or_else(|| Error::Dataset {
        name: name.to_string(),
        detail: "missing header row".to_string(),
    })?;
    if rows.is_empty() {
        return Err(Error::Dataset {
            name: name.to_string(),
            detail: "no data rows".to_string(),
        });
    }
    let kind = if header.len() == 1 {
        DatasetKind::Univariate(rows.into_iter().map(|r| r[0]).collect())
    } else {
        let q = header.len() - 1;
        let predictors: Vec<Vec<f64>> = rows.iter().map(|r| r[..q].to_vec()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[q]).collect();
        DatasetKind::Regression(RegressionData::with_intercept(predictors, y).map_err(|e| {
            Error::Dataset {
                name: name.to_string(),
                detail: e.to_string(),
            }
        })?)
    };
    Ok(Dataset {
        name: name.to_string(),
        provenance: provenance.trim().to_string(),
        kind,
    })
}

/// Expected cell counts n·P(X = k) for k = 0..4 plus a final ≥5 cell chosen
/// so the six entries sum to n exactly.
pub fn poisson_expected_frequencies(lambda: f64, n: f64) -> Result<[f64; 6]> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Dataset {
            name: "poisson_expected_frequencies".to_string(),
            detail: format!("rate must be positive, got {lambda}"),
        });
    }
    let mut out = [0.0; 6];
    let mut pmf = (-lambda).exp();
    let mut head = 0.0;
    for (k, slot) in out.iter_mut().take(5).enumerate() {
        if k > 0 {
            pmf *= lambda / k as f64;
        }
        *slot = n * pmf;
        head += n * pmf;
    }
    out[5] = n - head;
    Ok(out)
}
