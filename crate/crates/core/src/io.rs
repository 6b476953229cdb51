//! File formats.
//!
//! * CSV samples: one observation per row, no header unless requested.
//! * RSPM binary matrices: the bytes `RSPM`, `u32` rows, `u32` columns, then
//!   `rows * cols` `f64` values in row-major order, all little-endian.
//! * Estimate JSON: `{q, g_hat, net_meta, params, per_direction}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundParams;
use crate::error::{Error, Result};
use crate::gram_estimator::{NetMeta, RobustGramEstimate};
use crate::matrix::{Sample, SymMatrix};

pub const RSPM_MAGIC: &[u8; 4] = b"RSPM";

pub fn read_csv_matrix<R: Read>(reader: R, skip_header: bool) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(skip_header)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    Error::Format(format!("row {}: cannot parse `{field}` as a number", i + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    let cols = rows[0].len();
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        cols,
        rows.into_iter().flatten(),
    ))
}

pub fn read_rspm<R: Read>(mut reader: R) -> Result<DMatrix<f64>> {
    let mut header = [0u8; 12];
    reader
        .read_exact(&mut header)
        .map_err(|_| Error::Format("truncated RSPM header".into()))?;
    if &header[..4] != RSPM_MAGIC {
        return Err(Error::Format("missing RSPM magic bytes".into()));
    }
    let rows = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes")) as usize;
    let cols = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes")) as usize;
    let mut payload = Vec::new();
    reader.read_to_end(&mut payload)?;
    if payload.len() != rows * cols * 8 {
        return Err(Error::Format(format!(
            "RSPM payload has {} bytes, expected {} for a {rows}x{cols} matrix",
            payload.len(),
            rows * cols * 8
        )));
    }
    let values = payload
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")));
    Ok(DMatrix::from_row_iterator(rows, cols, values))
}

pub fn write_rspm<W: Write>(mut writer: W, m: &DMatrix<f64>) -> Result<()> {
    let dim = |x: usize| {
        u32::try_from(x).map_err(|_| Error::Format(format!("dimension {x} exceeds u32")))
    };
    writer.write_all(RSPM_MAGIC)?;
    writer.write_all(&dim(m.nrows())?.to_le_bytes())?;
    writer.write_all(&dim(m.ncols())?.to_le_bytes())?;
    for row in m.row_iter() {
        for v in row.iter() {
            writer.write_all(&v.to_le_bytes())?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    Ok(bytes)
}

/// Reads an RSPM file (detected by its magic bytes), a JSON array of rows,
/// or CSV.
pub fn read_matrix_file(path: &Path, skip_header: bool) -> Result<DMatrix<f64>> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(RSPM_MAGIC) {
        return read_rspm(bytes.as_slice());
    }
    if bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'[') {
        let rows: Vec<Vec<f64>> = serde_json::from_slice(&bytes)?;
        let sample = Sample::from_rows(&rows)?;
        return Ok(sample.as_matrix().clone());
    }
    read_csv_matrix(bytes.as_slice(), skip_header)
}

pub fn read_sample(path: &Path, skip_header: bool) -> Result<Sample> {
    Sample::new(read_matrix_file(path, skip_header)?)
}

pub fn read_symmetric(path: &Path) -> Result<SymMatrix> {
    SymMatrix::new(read_matrix_file(path, false)?)
}

/// Serialized form of a [`RobustGramEstimate`]; the net is reduced to its
/// metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateFile {
    pub q: SymMatrix,
    pub g_hat: SymMatrix,
    pub net_meta: NetMeta,
    pub params: BoundParams,
    pub per_direction: Vec<f64>,
}

impl From<&RobustGramEstimate> for EstimateFile {
    fn from(est: &RobustGramEstimate) -> Self {
        EstimateFile {
            q: est.q_matrix.clone(),
            g_hat: est.g_hat.clone(),
            net_meta: est.net.meta(),
            params: est.params,
            per_direction: est.per_direction.clone(),
        }
    }
}

impl EstimateFile {
    pub fn read(path: &Path) -> Result<Self> {
        let file: EstimateFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        file.params.validate()?;
        file.q.check_same_dim(&file.g_hat)?;
        Ok(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One row per observation, columns `score_1..score_r`.
pub fn write_scores_csv<W: Write>(writer: W, scores: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record((1..=scores.ncols()).map(|j| format!("score_{j}")))?;
    for row in scores.row_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(contents.as_bytes())?;
    w.flush()?;
    Ok(())
}
