//! Pearson and cosine similarity between profiles, full similarity matrices
//! and the thresholded graphs drawn by the layout module.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::matrix::{write_grid, Axis, CitationMatrix, JournalLabel};
use crate::pajek::{self, PajekNetwork, PajekVertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    #[default]
    Pearson,
    Cosine,
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" | "r" => Ok(Measure::Pearson),
            "cosine" | "cos" => Ok(Measure::Cosine),
            other => Err(Error::Parameter(format!("unknown measure `{other}`"))),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Pearson => "pearson",
            Measure::Cosine => "cosine",
        })
    }
}

impl Measure {
    pub fn apply(self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            Measure::Pearson => pearson(x, y),
            Measure::Cosine => cosine(x, y),
        }
    }
}

fn check_lengths(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min {
        return Err(Error::Dimension(format!(
            "need at least {min} observations, got {}",
            x.len()
        )));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Product-moment correlation. Summation runs in index order so repeated
/// calls are bit-identical.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y, 2)?;
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput(
            "pearson correlation of a constant vector".into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Cosine of the angle between the two vectors; no centering.
pub fn cosine(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y, 1)?;
    let (mut dot, mut xx, mut yy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        dot += a * b;
        xx += a * a;
        yy += b * b;
    }
    if xx == 0.0 || yy == 0.0 {
        return Err(Error::DegenerateInput("cosine of a zero vector".into()));
    }
    Ok((dot / (xx.sqrt() * yy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub labels: Vec<JournalLabel>,
    pub values: Mat,
    pub measure: Measure,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// CSV in the same layout as a citation matrix.
    pub fn to_csv(&self) -> String {
        let ids: Vec<&str> = self.labels.iter().map(|l| l.id.as_str()).collect();
        write_grid(&ids, &self.values, ',')
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn parse_csv(text: &str, measure: Measure) -> Result<SimilarityMatrix> {
        let (rows, cols, values) = crate::matrix::read_grid(text, b',', false)?;
        if rows != cols {
            return Err(Error::Dimension("row and column ids differ".into()));
        }
        values.check_symmetric(1e-9)?;
        let labels: Vec<JournalLabel> = rows.into_iter().map(JournalLabel::new).collect();
        crate::matrix::validate_labels(&labels)?;
        Ok(SimilarityMatrix {
            labels,
            values,
            measure,
        })
    }
}

/// Similarity between the profiles of every pair of journals along `axis`.
pub fn similarity_matrix(m: &CitationMatrix, measure: Measure) -> Result<SimilarityMatrix> {
    similarity_matrix_along(m, measure, Axis::Cited)
}

pub fn similarity_matrix_along(
    m: &CitationMatrix,
    measure: Measure,
    axis: Axis,
) -> Result<SimilarityMatrix> {
    let n = m.len();
    if n < 2 {
        return Err(Error::Dimension(format!(
            "similarity needs at least 2 journals, got {n}"
        )));
    }
    let profiles = m.profiles(axis);
    for (i, p) in profiles.iter().enumerate() {
        let degenerate = match measure {
            Measure::Pearson => p.iter().all(|&v| v == p[0]),
            Measure::Cosine => p.iter().all(|&v| v == 0.0),
        };
        if degenerate {
            let what = match measure {
                Measure::Pearson => "constant",
                Measure::Cosine => "all-zero",
            };
            return Err(Error::DegenerateInput(format!(
                "journal `{}` has a {what} profile",
                m.labels()[i].id
            )));
        }
    }
    let mut values = Mat::identity(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let s = measure.apply(&profiles[i], &profiles[j])?;
            values[(i, j)] = s;
            values[(j, i)] = s;
        }
    }
    Ok(SimilarityMatrix {
        labels: m.labels().to_vec(),
        values,
        measure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityGraph {
    pub nodes: Vec<JournalLabel>,
    /// `(i, j, weight)` with `i < j`.
    pub edges: Vec<(usize, usize, f64)>,
    pub threshold: f64,
}

impl SimilarityGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn neighbours(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(i, j, w) in &self.edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }

    /// Pajek `.net` with an `*Edges` section; weights written as given.
    pub fn to_pajek(&self) -> String {
        pajek::render(&PajekNetwork {
            vertices: self
                .nodes
                .iter()
                .map(|l| PajekVertex {
                    name: l.id.clone(),
                    position: None,
                })
                .collect(),
            arcs: Vec::new(),
            edges: self.edges.clone(),
        })
    }
}

/// Keeps every off-diagonal pair whose similarity is at least `min_value`.
pub fn threshold_graph(s: &SimilarityMatrix, min_value: f64) -> SimilarityGraph {
    let n = s.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = s.values[(i, j)];
            if w >= min_value {
                edges.push((i, j, w));
            }
        }
    }
    SimilarityGraph {
        nodes: s.labels.clone(),
        edges,
        threshold: min_value,
    }
}
