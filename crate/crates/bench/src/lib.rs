//! Fixtures shared by the benchmarks.

use citeclass::factors::{eigendecompose, loadings_from_eigen};
use citeclass::layout::{build_distances, DistanceMatrix};
use citeclass::similarity::{similarity_matrix, threshold_graph};
use citeclass::synth::{self, ClusterSpec};
use citeclass::{CitationMatrix, LoadingMatrix, Measure, SimilarityMatrix};

/// The demo matrix after the default log transform.
pub fn demo_log() -> CitationMatrix {
    synth::demo_matrix(synth::DEMO_SEED)
        .and_then(|m| m.log_transform(10.0, 1.0))
        .expect("demo matrix is valid")
}

/// A clustered matrix with `blocks` groups of `size` journals.
pub fn clustered(blocks: usize, size: usize, seed: u64) -> CitationMatrix {
    let spec = ClusterSpec {
        sizes: vec![size; blocks],
        ..ClusterSpec::default()
    };
    synth::clustered_matrix(&spec, seed).expect("valid spec")
}

pub fn correlation(m: &CitationMatrix) -> SimilarityMatrix {
    similarity_matrix(m, Measure::Pearson).expect("non-degenerate rows")
}

pub fn unrotated(m: &CitationMatrix, k: usize) -> LoadingMatrix {
    let s = correlation(m);
    let e = eigendecompose(&s.values).expect("symmetric");
    loadings_from_eigen(&s.labels, &e, k).expect("k within range")
}

pub fn distances(m: &CitationMatrix) -> DistanceMatrix {
    build_distances(&threshold_graph(&correlation(m), 0.0))
}
