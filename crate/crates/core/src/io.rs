//! CSV input and output.

use crate::error::{Error, Result};
use crate::nn::PointCloud;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

/// Formats a number with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

fn parse_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads one point per row. A first row that does not parse as numbers is
/// taken as a header. `dim`, when given, is enforced on every row.
pub fn read_point_cloud<R: Read>(input: R, dim: Option<usize>) -> Result<PointCloud> {
    let mut coords = Vec::new();
    let mut width = dim;
    let mut first = true;
    for record in reader(input).records() {
        let record = record.map_err(parse_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(e) => {
                return Err(Error::Parse {
                    line,
                    message: format!("non-numeric field: {e}"),
                })
            }
        };
        first = false;
        let expected = *width.get_or_insert(row.len());
        if row.len() != expected {
            return Err(Error::Parse {
                line,
                message: format!("expected {expected} columns, found {}", row.len()),
            });
        }
        if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
            return Err(Error::Parse {
                line,
                message: format!("non-finite value {bad}"),
            });
        }
        coords.extend(row);
    }
    let width = width.unwrap_or(1);
    PointCloud::new(coords, width)
}

pub fn read_point_cloud_file(path: &Path, dim: Option<usize>) -> Result<PointCloud> {
    read_point_cloud(open(path)?, dim)
}

/// Which column of a price file holds the closing price.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PriceColumn {
    /// The last column of each row.
    #[default]
    Last,
    /// Zero-based column index.
    Index(usize),
    /// Header name, matched case-insensitively.
    Name(String),
}

impl std::str::FromStr for PriceColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => PriceColumn::Index(i),
            Err(_) => PriceColumn::Name(s.to_string()),
        })
    }
}

/// Reads positive closing prices in file order.
///
/// With `skip_header` the first row is always dropped; otherwise it is dropped
/// only when its price field is not numeric. A named column requires a header.
pub fn load_prices<R: Read>(input: R, column: &PriceColumn, skip_header: bool) -> Result<Vec<f64>> {
    let mut records = reader(input).into_records();
    let mut prices = Vec::new();
    let mut col: Option<usize> = match column {
        PriceColumn::Index(i) => Some(*i),
        _ => None,
    };

    let mut pending_first = None;
    if let Some(first) = records.next() {
        let first = first.map_err(parse_error)?;
        match column {
            PriceColumn::Name(name) => {
                let idx = first
                    .iter()
                    .position(|h| h.eq_ignore_ascii_case(name))
                    .ok_or_else(|| Error::Parse {
                        line: 1,
                        message: format!("no column named '{name}' in header"),
                    })?;
                col = Some(idx);
            }
            _ => {
                let idx = col.unwrap_or(first.len().saturating_sub(1));
                let numeric = first.get(idx).is_some_and(|f| f.parse::<f64>().is_ok());
                if !skip_header && numeric {
                    pending_first = Some(first);
                }
            }
        }
    }

    for record in pending_first.into_iter().map(Ok).chain(records) {
        let record = record.map_err(parse_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let idx = col.unwrap_or(record.len() - 1);
        let field = record.get(idx).ok_or_else(|| Error::Parse {
            line,
            message: format!("missing price column {idx}"),
        })?;
        let value: f64 = field.parse().map_err(|_| Error::Parse {
            line,
            message: format!("price '{field}' is not a number"),
        })?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositivePrice { line, value });
        }
        prices.push(value);
    }
    Ok(prices)
}

pub fn load_prices_file(path: &Path, column: &PriceColumn, skip_header: bool) -> Result<Vec<f64>> {
    load_prices(open(path)?, column, skip_header)
}

/// Writes a cloud as headerless CSV, one point per row.
pub fn write_point_cloud<W: Write>(out: W, pc: &PointCloud) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in pc.points() {
        w.write_record(p.iter().map(|&x| fmt_num(x)))
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
