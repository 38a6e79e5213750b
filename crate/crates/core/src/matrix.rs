//! Citation matrices: labels, file formats and cell-wise transforms.
//!
//! Orientation is fixed: `cell(i, j)` holds the citations *from* citing
//! journal `j` *to* cited journal `i`. Row `i` is therefore the cited-profile
//! of journal `i`, the unit of every downstream analysis.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::pajek::{self, PajekNetwork, PajekVertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalLabel {
    pub id: String,
    pub name: String,
    /// Free-text classification annotation; never used in computation.
    pub class_tag: Option<String>,
}

impl JournalLabel {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        JournalLabel {
            name: id.clone(),
            id,
            class_tag: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_class(mut self, tag: impl Into<String>) -> Self {
        self.class_tag = Some(tag.into());
        self
    }
}

pub(crate) fn validate_labels(labels: &[JournalLabel]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if label.id.trim().is_empty() {
            return Err(Error::InvalidLabel("journal id must be non-empty".into()));
        }
        if !seen.insert(label.id.as_str()) {
            return Err(Error::DuplicateLabel(label.id.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Csv,
    Tsv,
    PajekNet,
}

impl Format {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "tsv" | "tab" => Some(Format::Tsv),
            "net" => Some(Format::PajekNet),
            _ => None,
        }
    }

    fn delimiter(self) -> u8 {
        match self {
            Format::Tsv => b'\t',
            _ => b',',
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            "pajek" | "net" | "pajek_net" | "pajek-net" => Ok(Format::PajekNet),
            other => Err(Error::Parameter(format!("unknown matrix format `{other}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Tsv => "tsv",
            Format::PajekNet => "pajek_net",
        })
    }
}

/// Which profile of a journal is the analysed variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Axis {
    /// Rows: citations received (the default, Q-mode).
    #[default]
    Cited,
    /// Columns: citations given.
    Citing,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cited" | "rows" | "row" => Ok(Axis::Cited),
            "citing" | "columns" | "cols" | "column" => Ok(Axis::Citing),
            other => Err(Error::Parameter(format!("unknown axis `{other}`"))),
        }
    }
}

/// Cell-wise transform applied before analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Transform {
    None,
    /// `log_base(x + offset)`; `offset: None` picks 1 when any cell is zero, else 0.
    Log {
        base: f64,
        offset: Option<f64>,
    },
    Arcsinh,
}

impl Transform {
    pub fn is_none(&self) -> bool {
        matches!(self, Transform::None)
    }

    pub fn apply(&self, m: &CitationMatrix) -> Result<CitationMatrix> {
        match *self {
            Transform::None => Ok(m.clone()),
            Transform::Log { base, offset } => {
                let offset = offset.unwrap_or_else(|| m.default_log_offset());
                m.log_transform(base, offset)
            }
            Transform::Arcsinh => Ok(m.arcsinh_transform()),
        }
    }

    /// Short name used in report file names.
    pub fn tag(&self) -> &'static str {
        match self {
            Transform::None => "raw",
            Transform::Log { .. } => "log",
            Transform::Arcsinh => "arcsinh",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationMatrix {
    labels: Vec<JournalLabel>,
    cells: Mat,
}

impl CitationMatrix {
    pub fn new(labels: Vec<JournalLabel>, cells: Mat) -> Result<Self> {
        if !cells.is_square() || cells.rows() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} labels for a {}x{} body",
                labels.len(),
                cells.rows(),
                cells.cols()
            )));
        }
        validate_labels(&labels)?;
        let n = labels.len();
        for i in 0..n {
            for j in 0..n {
                let v = cells[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::parse(
                        i + 1,
                        j + 1,
                        format!("cell value {v} must be finite and non-negative"),
                    ));
                }
            }
        }
        Ok(CitationMatrix { labels, cells })
    }

    pub fn from_rows(ids: &[&str], rows: &[Vec<f64>]) -> Result<Self> {
        let labels = ids.iter().map(|id| JournalLabel::new(*id)).collect();
        CitationMatrix::new(labels, Mat::from_rows(rows)?)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[JournalLabel] {
        &self.labels
    }

    pub fn cells(&self) -> &Mat {
        &self.cells
    }

    /// Citations from journal `citing` to journal `cited`.
    pub fn get(&self, cited: usize, citing: usize) -> f64 {
        self.cells[(cited, citing)]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.id == id)
    }

    /// Replaces the labels, keeping cells and their order.
    pub fn relabel(mut self, labels: Vec<JournalLabel>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::Dimension("label count changed".into()));
        }
        validate_labels(&labels)?;
        self.labels = labels;
        Ok(self)
    }

    /// Row `i`: citations received by journal `i` from each citing journal.
    pub fn cited_profile(&self, i: usize) -> Result<&[f64]> {
        if i >= self.len() {
            return Err(Error::Index {
                index: i,
                len: self.len(),
            });
        }
        Ok(self.cells.row(i))
    }

    /// Column `j`: citations given by journal `j` to each cited journal.
    pub fn citing_profile(&self, j: usize) -> Result<Vec<f64>> {
        if j >= self.len() {
            return Err(Error::Index {
                index: j,
                len: self.len(),
            });
        }
        Ok(self.cells.col(j))
    }

    pub fn profiles(&self, axis: Axis) -> Vec<Vec<f64>> {
        match axis {
            Axis::Cited => self.cells.to_rows(),
            Axis::Citing => self.cells.transpose().to_rows(),
        }
    }

    pub fn has_zero(&self) -> bool {
        self.cells.as_slice().contains(&0.0)
    }

    pub fn default_log_offset(&self) -> f64 {
        if self.has_zero() {
            1.0
        } else {
            0.0
        }
    }

    /// `log_base(cell + offset)` for every cell; the offset is added to all cells alike.
    pub fn log_transform(&self, base: f64, offset: f64) -> Result<CitationMatrix> {
        if !(base > 1.0 && base.is_finite()) {
            return Err(Error::Parameter(format!(
                "log base must exceed 1, got {base}"
            )));
        }
        if !(offset >= 0.0 && offset.is_finite()) {
            return Err(Error::Parameter(format!(
                "log offset must be non-negative, got {offset}"
            )));
        }
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                let shifted = self.cells[(i, j)] + offset;
                if shifted <= 0.0 {
                    return Err(Error::Domain(format!(
                        "cell ({}, {}) + offset = {shifted} has no logarithm",
                        self.labels[i].id, self.labels[j].id
                    )));
                }
            }
        }
        let ln_base = base.ln();
        // log10 is exact on powers of ten; keep that path for the common base.
        let cells = if base == 10.0 {
            self.cells.map(|v| (v + offset).log10())
        } else {
            self.cells.map(|v| (v + offset).ln() / ln_base)
        };
        Ok(CitationMatrix {
            labels: self.labels.clone(),
            cells,
        })
    }

    pub fn arcsinh_transform(&self) -> CitationMatrix {
        CitationMatrix {
            labels: self.labels.clone(),
            cells: self.cells.map(f64::asinh),
        }
    }

    pub fn load(path: impl AsRef<Path>, format: Format) -> Result<CitationMatrix> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, format)
    }

    pub fn parse(text: &str, format: Format) -> Result<CitationMatrix> {
        match format {
            Format::Csv | Format::Tsv => {
                let (row_ids, col_ids, cells) = read_grid(text, format.delimiter(), true)?;
                if row_ids != col_ids {
                    let pos = row_ids
                        .iter()
                        .zip(&col_ids)
                        .position(|(a, b)| a != b)
                        .unwrap_or(0);
                    return Err(Error::parse(
                        pos + 2,
                        1,
                        format!(
                            "row id `{}` does not match column id `{}`",
                            row_ids[pos], col_ids[pos]
                        ),
                    ));
                }
                let labels = row_ids.into_iter().map(JournalLabel::new).collect();
                CitationMatrix::new(labels, cells)
            }
            Format::PajekNet => {
                let net = pajek::parse(text)?;
                let n = net.vertices.len();
                let mut cells = Mat::zeros(n, n);
                for &(citing, cited, w) in &net.arcs {
                    cells[(cited, citing)] += w;
                }
                for &(a, b, w) in &net.edges {
                    cells[(a, b)] += w;
                    if a != b {
                        cells[(b, a)] += w;
                    }
                }
                let labels = net
                    .vertices
                    .into_iter()
                    .map(|v| JournalLabel::new(v.name))
                    .collect();
                CitationMatrix::new(labels, cells)
            }
        }
    }

    pub fn save(&self, path: impl AsRef<Path>, format: Format) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.render(format)).map_err(|e| Error::io(path, e))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv | Format::Tsv => {
                let ids: Vec<&str> = self.labels.iter().map(|l| l.id.as_str()).collect();
                write_grid(&ids, &self.cells, format.delimiter() as char)
            }
            Format::PajekNet => {
                let n = self.len();
                let mut net = PajekNetwork {
                    vertices: self
                        .labels
                        .iter()
                        .map(|l| PajekVertex {
                            name: l.id.clone(),
                            position: None,
                        })
                        .collect(),
                    ..Default::default()
                };
                for citing in 0..n {
                    for cited in 0..n {
                        let w = self.cells[(cited, citing)];
                        if w != 0.0 {
                            net.arcs.push((citing, cited, w));
                        }
                    }
                }
                pajek::render(&net)
            }
        }
    }
}

fn quote_field(s: &str, delimiter: char) -> String {
    if s.contains(delimiter) || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes a labelled square grid: header row of column ids, then one row per id.
/// Values use the shortest representation that round-trips exactly.
pub(crate) fn write_grid(ids: &[&str], cells: &Mat, delimiter: char) -> String {
    let mut out = String::new();
    out.push_str(&quote_field("", delimiter));
    for id in ids {
        out.push(delimiter);
        out.push_str(&quote_field(id, delimiter));
    }
    out.push('\n');
    for (i, id) in ids.iter().enumerate() {
        out.push_str(&quote_field(id, delimiter));
        for v in cells.row(i) {
            out.push(delimiter);
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Reads a labelled grid; returns (row ids, column ids, body).
/// Error positions are 1-based file line and field numbers.
pub(crate) fn read_grid(
    text: &str,
    delimiter: u8,
    non_negative: bool,
) -> Result<(Vec<String>, Vec<String>, Mat)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, 0, e.to_string())
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec);
    }
    let header = records
        .first()
        .ok_or_else(|| Error::EmptyInput("matrix file has no header row".into()))?;
    let col_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = col_ids.len();
    let body = &records[1..];
    if body.len() != n {
        return Err(Error::Dimension(format!(
            "header lists {n} column ids but the body has {} rows",
            body.len()
        )));
    }
    let mut row_ids = Vec::with_capacity(n);
    let mut cells = Mat::zeros(n, n);
    for (i, rec) in body.iter().enumerate() {
        if rec.len() != n + 1 {
            return Err(Error::Dimension(format!(
                "row {} (`{}`) has {} cells, expected {n}",
                i + 2,
                rec.get(0).unwrap_or(""),
                rec.len().saturating_sub(1)
            )));
        }
        row_ids.push(rec[0].to_string());
        for j in 0..n {
            let tok = &rec[j + 1];
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(i + 2, j + 2, format!("`{tok}` is not a number")))?;
            if !v.is_finite() || (non_negative && v < 0.0) {
                return Err(Error::parse(
                    i + 2,
                    j + 2,
                    format!("`{tok}` is not a valid count"),
                ));
            }
            cells[(i, j)] = v;
        }
    }
    Ok((row_ids, col_ids, cells))
}
