//! Principal-component extraction, the Kaiser retention rule, scree data and
//! varimax rotation with optional Kaiser normalization.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::matrix::JournalLabel;
use crate::similarity::SimilarityMatrix;

pub const SYMMETRY_TOL: f64 = 1e-9;
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns aligned with `eigenvalues`; the largest-magnitude
    /// component of every column is positive.
    pub eigenvectors: Mat,
    pub sweeps: usize,
}

impl EigenSolution {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.col(k)
    }

    /// `Q diag(lambda) Q^T`.
    pub fn reconstruct(&self) -> Mat {
        let n = self.eigenvalues.len();
        let q = &self.eigenvectors;
        Mat::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| q[(i, k)] * self.eigenvalues[k] * q[(j, k)])
                .sum()
        })
    }
}

fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Makes the largest-magnitude entry of column `k` positive (first wins on ties).
fn orient_column(m: &mut Mat, k: usize) {
    let mut best = 0usize;
    for i in 1..m.rows() {
        if m[(i, k)].abs() > m[(best, k)].abs() {
            best = i;
        }
    }
    if m[(best, k)] < 0.0 {
        for i in 0..m.rows() {
            m[(i, k)] = -m[(i, k)];
        }
    }
}

/// Full symmetric eigendecomposition by cyclic Jacobi sweeps.
pub fn eigendecompose(a: &Mat) -> Result<EigenSolution> {
    a.check_symmetric(SYMMETRY_TOL)?;
    let n = a.rows();
    // Work on the exactly symmetrised copy.
    let mut w = Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = Mat::identity(n);
    let scale = w
        .as_slice()
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    while sweeps < JACOBI_MAX_SWEEPS && off_diagonal_norm(&w) > JACOBI_TOL * scale {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = w[(p, p)];
                let aqq = w[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = w[(k, p)];
                    let akq = w[(k, q)];
                    w[(k, p)] = c * akp - s * akq;
                    w[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = w[(p, k)];
                    let aqk = w[(q, k)];
                    w[(p, k)] = c * apk - s * aqk;
                    w[(q, k)] = s * apk + c * aqk;
                }
                w[(p, q)] = 0.0;
                w[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].total_cmp(&w[(i, i)]));
    let eigenvalues = order.iter().map(|&i| w[(i, i)]).collect();
    let mut eigenvectors = Mat::from_fn(n, n, |i, k| v[(i, order[k])]);
    for k in 0..n {
        orient_column(&mut eigenvectors, k);
    }
    Ok(EigenSolution {
        eigenvalues,
        eigenvectors,
        sweeps,
    })
}

/// Number of eigenvalues strictly greater than one.
pub fn kaiser_count(eigenvalues: &[f64]) -> usize {
    eigenvalues.iter().filter(|&&l| l > 1.0).count()
}

/// `(1-based index, eigenvalue)` pairs in descending order.
pub fn scree(e: &EigenSolution) -> Vec<(usize, f64)> {
    e.eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (i + 1, l))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadingMatrix {
    pub labels: Vec<JournalLabel>,
    /// Variables x factors.
    pub loadings: Mat,
    pub rotated: bool,
    /// Fraction of total variance per factor.
    pub explained_variance: Vec<f64>,
    /// Rotation sweeps (0 when unrotated).
    pub iterations: usize,
    /// False when rotation hit its iteration cap before the criterion settled.
    pub converged: bool,
    /// Varimax criterion before rotation and after each sweep.
    pub criterion_trace: Vec<f64>,
    /// Trace of the decomposed matrix; `n` for a correlation matrix.
    pub total_variance: f64,
}

impl LoadingMatrix {
    pub fn factors(&self) -> usize {
        self.loadings.cols()
    }

    pub fn variables(&self) -> usize {
        self.loadings.rows()
    }

    pub fn communalities(&self) -> Vec<f64> {
        (0..self.variables())
            .map(|i| self.loadings.row(i).iter().map(|x| x * x).sum())
            .collect()
    }

    pub fn column_sums_of_squares(&self) -> Vec<f64> {
        column_ss(&self.loadings)
    }

    pub fn total_explained(&self) -> f64 {
        self.explained_variance.iter().sum()
    }

    /// `L L^T`, the correlation reproduced by the retained factors.
    pub fn fitted(&self) -> Mat {
        self.loadings.matmul(&self.loadings.transpose())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for k in 0..self.factors() {
            let _ = write!(out, ",factor{}", k + 1);
        }
        out.push_str(",communality\n");
        let h = self.communalities();
        for (i, label) in self.labels.iter().enumerate() {
            out.push_str(&label.id);
            for v in self.loadings.row(i) {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{}", h[i]);
        }
        out
    }
}

fn column_ss(m: &Mat) -> Vec<f64> {
    (0..m.cols())
        .map(|k| (0..m.rows()).map(|i| m[(i, k)] * m[(i, k)]).sum())
        .collect()
}

/// Principal-component loadings of the first `k` components of a
/// correlation matrix.
pub fn extract_loadings(corr: &SimilarityMatrix, k: usize) -> Result<LoadingMatrix> {
    let eig = eigendecompose(&corr.values)?;
    loadings_from_eigen(&corr.labels, &eig, k)
}

pub fn loadings_from_eigen(
    labels: &[JournalLabel],
    eig: &EigenSolution,
    k: usize,
) -> Result<LoadingMatrix> {
    let n = eig.eigenvalues.len();
    if labels.len() != n {
        return Err(Error::Dimension(format!(
            "{} labels for {n} variables",
            labels.len()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "factor count {k} outside 1..={n}"
        )));
    }
    let total: f64 = eig.eigenvalues.iter().sum();
    let tol = 1e-9 * total.abs().max(1.0);
    for (j, &l) in eig.eigenvalues.iter().enumerate().take(k) {
        if l < -tol {
            return Err(Error::NotPositiveSemidefinite { index: j, value: l });
        }
    }
    let mut loadings = Mat::zeros(n, k);
    for j in 0..k {
        let root = eig.eigenvalues[j].max(0.0).sqrt();
        for i in 0..n {
            loadings[(i, j)] = eig.eigenvectors[(i, j)] * root;
        }
    }
    Ok(LoadingMatrix {
        labels: labels.to_vec(),
        loadings,
        rotated: false,
        explained_variance: eig.eigenvalues[..k].iter().map(|l| l / total).collect(),
        iterations: 0,
        converged: true,
        criterion_trace: Vec::new(),
        total_variance: total,
    })
}

/// Sum over factors of the variance of the squared loadings.
pub fn varimax_criterion(l: &Mat) -> f64 {
    let p = l.rows() as f64;
    (0..l.cols())
        .map(|k| {
            let (mut s2, mut s4) = (0.0, 0.0);
            for i in 0..l.rows() {
                let sq = l[(i, k)] * l[(i, k)];
                s2 += sq;
                s4 += sq * sq;
            }
            s4 / p - (s2 / p) * (s2 / p)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarimaxOptions {
    pub kaiser_normalize: bool,
    /// Relative criterion change that ends the iteration.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for VarimaxOptions {
    fn default() -> Self {
        VarimaxOptions {
            kaiser_normalize: true,
            tol: 1e-7,
            max_iter: 100,
        }
    }
}

fn pair_criterion(x: &[f64], y: &[f64]) -> f64 {
    let p = x.len() as f64;
    let col = |v: &[f64]| {
        let s2: f64 = v.iter().map(|a| a * a).sum();
        let s4: f64 = v.iter().map(|a| a.powi(4)).sum();
        s4 / p - (s2 / p).powi(2)
    };
    col(x) + col(y)
}

/// Rotates columns `a` and `b` by the planar angle that maximises their
/// joint varimax criterion. Returns the angle applied.
fn rotate_pair(l: &mut Mat, a: usize, b: usize) -> f64 {
    let p = l.rows();
    let x = l.col(a);
    let y = l.col(b);
    let (mut sa, mut sb, mut sc, mut sd) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..p {
        let u = x[i] * x[i] - y[i] * y[i];
        let v = 2.0 * x[i] * y[i];
        sa += u;
        sb += v;
        sc += u * u - v * v;
        sd += 2.0 * u * v;
    }
    let pf = p as f64;
    let num = sd - 2.0 * sa * sb / pf;
    let den = sc - (sa * sa - sb * sb) / pf;
    let phi = 0.25 * num.atan2(den);
    if phi == 0.0 {
        return 0.0;
    }
    let (s, c) = phi.sin_cos();
    let nx: Vec<f64> = (0..p).map(|i| c * x[i] + s * y[i]).collect();
    let ny: Vec<f64> = (0..p).map(|i| -s * x[i] + c * y[i]).collect();
    // Guard against rounding turning a no-op into a tiny decrease.
    if pair_criterion(&nx, &ny) < pair_criterion(&x, &y) {
        return 0.0;
    }
    for i in 0..p {
        l[(i, a)] = nx[i];
        l[(i, b)] = ny[i];
    }
    phi
}

/// Orthogonal varimax rotation by successive pairwise planar rotations.
///
/// With `kaiser_normalize`, rows are scaled to unit communality during the
/// rotation and restored afterwards. Output columns are ordered by decreasing
/// sum of squared loadings and each column's largest-magnitude loading is
/// made positive. A single factor is returned unchanged.
pub fn varimax(l: &LoadingMatrix, opts: VarimaxOptions) -> LoadingMatrix {
    let k = l.factors();
    if k < 2 {
        return l.clone();
    }
    let p = l.variables();
    let norms: Vec<f64> = l.communalities().iter().map(|h| h.sqrt()).collect();
    let mut work = l.loadings.clone();
    if opts.kaiser_normalize {
        for i in 0..p {
            if norms[i] > 0.0 {
                for j in 0..k {
                    work[(i, j)] /= norms[i];
                }
            }
        }
    }

    let mut trace = vec![varimax_criterion(&work)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        for a in 0..k {
            for b in (a + 1)..k {
                rotate_pair(&mut work, a, b);
            }
        }
        let prev = *trace.last().unwrap();
        let cur = varimax_criterion(&work);
        trace.push(cur);
        if (cur - prev).abs() <= opts.tol * prev.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    if opts.kaiser_normalize {
        for i in 0..p {
            for j in 0..k {
                work[(i, j)] *= norms[i];
            }
        }
    }

    let ss = column_ss(&work);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| ss[b].total_cmp(&ss[a]));
    let mut loadings = Mat::from_fn(p, k, |i, j| work[(i, order[j])]);
    for j in 0..k {
        orient_column(&mut loadings, j);
    }
    let explained = order.iter().map(|&j| ss[j] / l.total_variance).collect();
    LoadingMatrix {
        labels: l.labels.clone(),
        loadings,
        rotated: true,
        explained_variance: explained,
        iterations,
        converged,
        criterion_trace: trace,
        total_variance: l.total_variance,
    }
}

/// Loadings rendered in the rotated-component-matrix style: small loadings
/// blanked, leading zero dropped (`.874`, `-.150`).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingTable {
    pub ids: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
    pub threshold: f64,
    pub decimals: usize,
}

pub fn suppress_small(l: &LoadingMatrix, threshold: f64) -> LoadingTable {
    let cells = (0..l.variables())
        .map(|i| {
            l.loadings
                .row(i)
                .iter()
                .map(|&v| (v.abs() >= threshold).then_some(v))
                .collect()
        })
        .collect();
    LoadingTable {
        ids: l.labels.iter().map(|x| x.id.clone()).collect(),
        cells,
        threshold,
        decimals: 3,
    }
}

pub fn format_loading(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else {
        s
    }
}

impl LoadingTable {
    pub fn with_decimals(mut self, decimals: usize) -> Self {
        self.decimals = decimals;
        self
    }

    pub fn cell_text(&self, i: usize, k: usize) -> String {
        self.cells[i][k]
            .map(|v| format_loading(v, self.decimals))
            .unwrap_or_default()
    }
}

impl fmt::Display for LoadingTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.cells.first().map_or(0, Vec::len);
        let id_w = self.ids.iter().map(String::len).max().unwrap_or(0).max(7);
        let cell_w = self.decimals + 4;
        write!(f, "{:<id_w$}", "journal")?;
        for j in 0..k {
            write!(f, " {:>cell_w$}", j + 1)?;
        }
        writeln!(f)?;
        for (i, id) in self.ids.iter().enumerate() {
            write!(f, "{id:<id_w$}")?;
            for j in 0..k {
                write!(f, " {:>cell_w$}", self.cell_text(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[Vec<f64>]) -> Mat {
        Mat::from_rows(rows).unwrap()
    }

    fn labels(n: usize) -> Vec<JournalLabel> {
        (0..n).map(|i| JournalLabel::new(format!("v{i}"))).collect()
    }

    fn corr(rows: &[Vec<f64>]) -> SimilarityMatrix {
        SimilarityMatrix {
            labels: labels(rows.len()),
            values: sym(rows),
            measure: crate::similarity::Measure::Pearson,
        }
    }

    #[test]
    fn identity_spectrum() {
        let e = eigendecompose(&Mat::identity(4)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0; 4]);
        assert_eq!(kaiser_count(&e.eigenvalues), 0);
        assert_eq!(scree(&e), vec![(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)]);
    }

    #[test]
    fn two_by_two_correlation() {
        let e = eigendecompose(&sym(&[vec![1.0, 0.5], vec![0.5, 1.0]])).unwrap();
        assert!((e.eigenvalues[0] - 1.5).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 0.5).abs() < 1e-14);
        // Sign convention: largest-magnitude component positive.
        for k in 0..2 {
            let v = e.eigenvector(k);
            let big = v
                .iter()
                .copied()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn asymmetric_rejected() {
        let err = eigendecompose(&sym(&[vec![1.0, 0.5], vec![0.4, 1.0]])).unwrap_err();
        assert!(matches!(err, Error::Symmetry { .. }));
    }

    #[test]
    fn kaiser_counts() {
        assert_eq!(kaiser_count(&[2.5, 1.3, 0.9, 0.3]), 2);
        assert_eq!(kaiser_count(&[1.0, 1.0]), 0);
    }

    #[test]
    fn scree_pass_through() {
        let e = EigenSolution {
            eigenvalues: vec![3.0, 2.0, 1.0],
            eigenvectors: Mat::identity(3),
            sweeps: 0,
        };
        assert_eq!(scree(&e), vec![(1, 3.0), (2, 2.0), (3, 1.0)]);
    }

    #[test]
    fn rank_one_loadings() {
        let l = extract_loadings(&corr(&[vec![1.0, 1.0], vec![1.0, 1.0]]), 1).unwrap();
        assert!((l.loadings[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((l.loadings[(1, 0)] - 1.0).abs() < 1e-12);
        assert!((l.explained_variance[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncorrelated_loadings_are_a_permutation_of_identity() {
        let l = extract_loadings(&corr(&[vec![1.0, 0.0], vec![0.0, 1.0]]), 2).unwrap();
        let mut rows: Vec<Vec<f64>> = l.loadings.to_rows();
        rows.sort_by(|a, b| b[0].total_cmp(&a[0]));
        assert_eq!(rows, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn factor_count_out_of_range() {
        let c = corr(&[vec![1.0, 0.2], vec![0.2, 1.0]]);
        assert!(matches!(extract_loadings(&c, 0), Err(Error::Parameter(_))));
        assert!(matches!(extract_loadings(&c, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn indefinite_matrix_rejected() {
        // Eigenvalues 3 and -1.
        let c = corr(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(extract_loadings(&c, 1).is_ok());
        assert!(matches!(
            extract_loadings(&c, 2),
            Err(Error::NotPositiveSemidefinite { index: 1, .. })
        ));
    }

    fn simple_structure() -> LoadingMatrix {
        let loadings = sym(&[vec![0.9, 0.0], vec![0.0, 0.8], vec![0.85, 0.0]]);
        LoadingMatrix {
            labels: labels(3),
            explained_variance: column_ss(&loadings).iter().map(|s| s / 3.0).collect(),
            loadings,
            rotated: false,
            iterations: 0,
            converged: true,
            criterion_trace: vec![],
            total_variance: 3.0,
        }
    }

    #[test]
    fn simple_structure_is_a_fixed_point() {
        for normalize in [false, true] {
            let l = simple_structure();
            let opts = VarimaxOptions {
                kaiser_normalize: normalize,
                ..Default::default()
            };
            let r = varimax(&l, opts);
            assert!(r.converged);
            assert!(r.loadings.max_abs_diff(&l.loadings) < 1e-12);
            assert!(
                (varimax_criterion(&r.loadings) - varimax_criterion(&l.loadings)).abs() < 1e-12
            );
        }
    }

    #[test]
    fn single_factor_is_untouched() {
        let mut l = simple_structure();
        l.loadings = sym(&[vec![0.9], vec![0.4], vec![0.7]]);
        l.explained_variance.truncate(1);
        let r = varimax(&l, VarimaxOptions::default());
        assert_eq!(r, l);
    }

    #[test]
    fn loading_rendering() {
        assert_eq!(format_loading(0.874, 3), ".874");
        assert_eq!(format_loading(-0.15, 2), "-.15");
        assert_eq!(format_loading(-0.15, 3), "-.150");
        assert_eq!(format_loading(1.0, 3), "1.000");
    }

    #[test]
    fn suppression() {
        let mut l = simple_structure();
        l.loadings = sym(&[vec![0.05, -0.15], vec![0.0, 0.8], vec![0.85, 0.0]]);
        let t = suppress_small(&l, 0.1).with_decimals(2);
        assert_eq!(t.cell_text(0, 0), "");
        assert_eq!(t.cell_text(0, 1), "-.15");
        // Underlying data untouched.
        assert_eq!(l.loadings[(0, 0)], 0.05);
        let none = suppress_small(&l, 0.0);
        assert!(none.cells.iter().flatten().all(Option::is_some));
        let text = t.to_string();
        assert!(text.contains("-.15"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn loading_csv_has_communality() {
        let csv = simple_structure().to_csv();
        assert!(csv.starts_with("id,factor1,factor2,communality\n"));
        assert!(csv.contains("v0,0.9,0,"));
    }
}
