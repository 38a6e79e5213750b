//! Classification and mapping of journal citation matrices.
//!
//! A [`CitationMatrix`] holds aggregated journal-journal citation counts. The
//! modules below summarise the skew of its profiles, compare profiles with
//! Pearson or cosine similarity, extract and rotate principal-component
//! factors, fit rank-size power laws, and lay out the similarity graph with
//! a Kamada-Kawai spring embedder.

pub mod error;
pub mod export;
pub mod factors;
pub mod layout;
pub mod linalg;
pub mod matrix;
pub mod pajek;
pub mod powerlaw;
pub mod similarity;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use export::ExportFormat;
pub use factors::{EigenSolution, LoadingMatrix, LoadingTable, VarimaxOptions};
pub use layout::{DistanceMatrix, GraphLayout, LayoutOptions, LayoutResult, Point};
pub use linalg::Mat;
pub use matrix::{Axis, CitationMatrix, Format, JournalLabel, Transform};
pub use powerlaw::{HeadReport, PowerlawFit, RankSizeSeries};
pub use similarity::{Measure, SimilarityGraph, SimilarityMatrix};
pub use stats::{DistributionLabel, DistributionSummary, Histogram};
