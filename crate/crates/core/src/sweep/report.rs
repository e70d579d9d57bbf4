//! Sweep CSV (schema v1) and the plain-text summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use thiserror::Error;

use super::SweepRow;

/// Bumped whenever [`CSV_COLUMNS`] or a column's formatting changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 12] = [
    "phy",
    "cfo_hz",
    "power_delta_db",
    "snr_db",
    "beating_class",
    "voting",
    "num_packets",
    "per",
    "pdr",
    "corrections",
    "false_accepts",
    "seed",
];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("header column {index}: expected '{expected}', found '{found}'")]
    Header {
        index: usize,
        expected: &'static str,
        found: String,
    },
    #[error("row {row}, column '{column}': cannot parse '{value}'")]
    Field {
        row: usize,
        column: &'static str,
        value: String,
    },
    #[error("empty CSV: no data rows")]
    Empty,
}

fn voting_label(on: bool) -> &'static str {
    if on {
        "on"
    } else {
        "off"
    }
}

/// Writes the header and rows. Output depends only on the rows.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.phy.as_str().to_owned(),
            r.cfo_hz.to_string(),
            r.power_delta_db.to_string(),
            r.snr_db.to_string(),
            r.beating_class.as_str().to_owned(),
            voting_label(r.voting).to_owned(),
            r.num_packets.to_string(),
            format!("{:.6}", r.per),
            format!("{:.6}", r.pdr),
            r.corrections.to_string(),
            r.false_accepts.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a sweep CSV, rejecting any header that is not exactly schema v1.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>, CsvError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = reader.headers()?.clone();
    for (index, expected) in CSV_COLUMNS.iter().enumerate() {
        let found = header.get(index).unwrap_or("");
        if found != *expected {
            return Err(CsvError::Header {
                index,
                expected,
                found: found.to_owned(),
            });
        }
    }
    if let Some(extra) = header.get(CSV_COLUMNS.len()) {
        return Err(CsvError::Header {
            index: CSV_COLUMNS.len(),
            expected: "<end of header>",
            found: extra.to_owned(),
        });
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let field = |col: usize| record.get(col).unwrap_or("");
        fn parse<T: FromStr>(row: usize, col: usize, value: &str) -> Result<T, CsvError> {
            value.parse().map_err(|_| CsvError::Field {
                row,
                column: CSV_COLUMNS[col],
                value: value.to_owned(),
            })
        }
        let voting = match field(5) {
            "on" => true,
            "off" => false,
            other => {
                return Err(CsvError::Field {
                    row,
                    column: CSV_COLUMNS[5],
                    value: other.to_owned(),
                })
            }
        };
        rows.push(SweepRow {
            phy: parse(row, 0, field(0))?,
            cfo_hz: parse(row, 1, field(1))?,
            power_delta_db: parse(row, 2, field(2))?,
            snr_db: parse(row, 3, field(3))?,
            beating_class: parse(row, 4, field(4))?,
            voting,
            num_packets: parse(row, 6, field(6))?,
            per: parse(row, 7, field(7))?,
            pdr: parse(row, 8, field(8))?,
            corrections: parse(row, 9, field(9))?,
            false_accepts: parse(row, 10, field(10))?,
            seed: parse(row, 11, field(11))?,
        });
    }
    if rows.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(rows)
}

/// Mean PER per PHY with voting off and on, averaged over all of its cells.
pub fn summarize(rows: &[SweepRow]) -> String {
    // phy -> [off, on] -> (sum of PER, cells)
    let mut acc: BTreeMap<_, [(f64, usize); 2]> = BTreeMap::new();
    let mut corrections: BTreeMap<_, usize> = BTreeMap::new();
    let mut false_accepts = 0;
    for r in rows {
        let slot = &mut acc.entry(r.phy).or_default()[usize::from(r.voting)];
        slot.0 += r.per;
        slot.1 += 1;
        *corrections.entry(r.phy).or_default() += r.corrections;
        false_accepts += r.false_accepts;
    }
    let mean = |(sum, n): (f64, usize)| {
        if n == 0 {
            "-".to_owned()
        } else {
            format!("{:.2}%", 100.0 * sum / n as f64)
        }
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>12} {:>12} {:>12}",
        "phy", "PER off", "PER on", "corrections"
    );
    for (phy, [off, on]) in &acc {
        let _ = writeln!(
            out,
            "{:<12} {:>12} {:>12} {:>12}",
            phy.as_str(),
            mean(*off),
            mean(*on),
            corrections[phy]
        );
    }
    let _ = writeln!(out, "{} cells, {} false accepts", rows.len(), false_accepts);
    out
}
