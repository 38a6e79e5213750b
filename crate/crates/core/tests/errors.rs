use citeclass::export::{export, ExportFormat};
use citeclass::factors::{eigendecompose, extract_loadings};
use citeclass::layout::{build_distances, kamada_kawai, kk_energy, DistanceMatrix};
use citeclass::powerlaw::{fit_loglog, rank_size};
use citeclass::similarity::{pearson, similarity_matrix};
use citeclass::stats::{decile_histogram, summarize};
use citeclass::{
    CitationMatrix, Error, Format, JournalLabel, LayoutOptions, Mat, Measure, SimilarityGraph,
};

fn two() -> CitationMatrix {
    CitationMatrix::from_rows(&["A", "B"], &[vec![1.0, 2.0], vec![3.0, 5.0]]).unwrap()
}

#[test]
fn missing_file_reports_its_path() {
    let err = CitationMatrix::load("/definitely/not/here.csv", Format::Csv).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/definitely/not/here.csv"));
}

#[test]
fn unwritable_targets_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("no_such_dir").join("m.csv");
    assert!(matches!(
        two().save(&target, Format::Csv),
        Err(Error::Io { .. })
    ));

    let g = SimilarityGraph {
        nodes: vec![JournalLabel::new("A"), JournalLabel::new("B")],
        edges: vec![(0, 1, 0.5)],
        threshold: 0.0,
    };
    let coords = [[0.0, 0.0], [1.0, 0.0]];
    for format in [ExportFormat::Svg, ExportFormat::Dot, ExportFormat::PajekNet] {
        let err = export(&coords, &g, format, dir.path()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }), "{format:?}: {err}");
    }
}

#[test]
fn malformed_matrices_are_rejected() {
    let non_numeric = "id,A,B\nA,1,x\nB,2,3\n";
    assert!(matches!(
        CitationMatrix::parse(non_numeric, Format::Csv),
        Err(Error::Parse { .. })
    ));
    let mismatched = "id,A,B\nA,1,2\nC,2,3\n";
    assert!(matches!(
        CitationMatrix::parse(mismatched, Format::Csv),
        Err(Error::Parse { .. })
    ));
    assert!(CitationMatrix::parse("id,A,B\nA,1,2\n", Format::Csv).is_err());
    assert!(matches!(
        CitationMatrix::from_rows(&["A", "A"], &[vec![1.0, 2.0], vec![3.0, 4.0]]),
        Err(Error::DuplicateLabel(_))
    ));
    assert!(CitationMatrix::from_rows(&["A", "B"], &[vec![1.0, -2.0], vec![3.0, 4.0]]).is_err());
    assert!(
        CitationMatrix::parse("*Vertices 2\n1 \"A\"\n*Arcs\n1 3 1\n", Format::PajekNet).is_err()
    );
}

#[test]
fn transform_domain_is_checked() {
    assert!(matches!(
        two().log_transform(1.0, 1.0),
        Err(Error::Parameter(_) | Error::Domain(_))
    ));
    let zero = CitationMatrix::from_rows(&["A", "B"], &[vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
    assert!(matches!(
        zero.log_transform(10.0, 0.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn statistics_need_data() {
    assert!(matches!(summarize(&[]), Err(Error::EmptyInput(_))));
    assert!(decile_histogram(&[]).is_err());
    assert!(matches!(rank_size(&[0.0, 0.0]), Err(Error::EmptyInput(_))));
    let s = rank_size(&[5.0]).unwrap();
    assert!(matches!(
        fit_loglog(&s, 10.0, 0),
        Err(Error::InsufficientData(_))
    ));
    let s = rank_size(&[5.0, 3.0, 1.0]).unwrap();
    assert!(fit_loglog(&s, 1.0, 0).is_err());
    assert!(fit_loglog(&s, 10.0, 2).is_err());
}

#[test]
fn similarity_preconditions() {
    assert!(matches!(
        pearson(&[1.0, 2.0], &[1.0]),
        Err(Error::Dimension(_))
    ));
    assert!(matches!(
        pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
        Err(Error::DegenerateInput(_))
    ));
    let one = CitationMatrix::from_rows(&["A"], &[vec![1.0]]).unwrap();
    assert!(matches!(
        similarity_matrix(&one, Measure::Pearson),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn factor_preconditions() {
    let asym = Mat::from_rows(&[vec![1.0, 0.5], vec![0.2, 1.0]]).unwrap();
    assert!(matches!(eigendecompose(&asym), Err(Error::Symmetry { .. })));
    let s = similarity_matrix(&two(), Measure::Pearson).unwrap();
    assert!(matches!(extract_loadings(&s, 3), Err(Error::Parameter(_))));
    assert!(matches!(extract_loadings(&s, 0), Err(Error::Parameter(_))));
}

#[test]
fn layout_rejects_disconnected_metrics() {
    let g = SimilarityGraph {
        nodes: ["A", "B", "C"].map(JournalLabel::new).to_vec(),
        edges: vec![(0, 1, 0.5)],
        threshold: 0.0,
    };
    let d = build_distances(&g);
    assert!(matches!(
        kamada_kawai(&d, LayoutOptions::default()),
        Err(Error::Component(_))
    ));
    assert!(matches!(
        kk_energy(&[[0.0; 2]; 3], &d),
        Err(Error::Component(_))
    ));
    assert!(matches!(
        kk_energy(&[[0.0; 2]; 2], &d),
        Err(Error::Dimension(_))
    ));
    let bad = Mat::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
    assert!(DistanceMatrix::new(bad).is_err());
}
