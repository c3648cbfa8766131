//! Reading and writing spherical datasets as CSV/whitespace tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use axial::{Error, Result, SphericalSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Comma,
    Whitespace,
}

#[derive(Debug, Clone)]
pub struct DataFileSpec {
    pub path: PathBuf,
    pub delimiter: Delimiter,
    pub has_header: bool,
    pub renormalize: bool,
}

pub fn load_dataset(spec: &DataFileSpec) -> Result<SphericalSample> {
    let text = std::fs::read_to_string(&spec.path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && spec.has_header {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = match spec.delimiter {
            Delimiter::Comma => line.split(',').map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        };
        let row: Vec<f64> = fields
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Error::InvalidData(format!("line {}: cannot parse '{f}'", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        match width {
            None => {
                if row.len() < 2 {
                    return Err(Error::InvalidData(format!(
                        "line {}: need at least 2 columns, got {}",
                        lineno + 1,
                        row.len()
                    )));
                }
                width = Some(row.len());
            }
            Some(w) if w != row.len() => {
                return Err(Error::InvalidData(format!(
                    "line {}: ragged row ({} columns, expected {w})",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        rows.push(row);
    }
    let p = width.ok_or_else(|| Error::InvalidData("no observations".into()))?;
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    if spec.renormalize {
        SphericalSample::new_renormalized(p, data)
    } else {
        SphericalSample::new(p, data)
    }
}

pub fn write_dataset(sample: &SphericalSample, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for row in sample.rows() {
        let line: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}
