//! Distribution diagnostics for a single profile: moments, variance-to-mean
//! ratio, a coarse distribution-type label and the decile histogram.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum VarianceKind {
    /// `n - 1` denominator.
    #[default]
    Sample,
    /// `n` denominator.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionLabel {
    CompoundPoissonContagious,
    LognormalLike,
    Indeterminate,
}

impl DistributionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistributionLabel::CompoundPoissonContagious => "compound_poisson_contagious",
            DistributionLabel::LognormalLike => "lognormal_like",
            DistributionLabel::Indeterminate => "indeterminate",
        }
    }
}

/// VMR cut-offs for [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VmrThresholds {
    pub high: f64,
    pub low: f64,
}

impl Default for VmrThresholds {
    fn default() -> Self {
        VmrThresholds {
            high: 10.0,
            low: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// `variance / mean`; `None` when the mean is zero or a sample variance
    /// is taken from a single observation.
    pub vmr: Option<f64>,
    /// Antilog of the mean log; `None` unless every observation is positive.
    pub geometric_mean: Option<f64>,
    /// Sample skewness (adjusted Fisher-Pearson); `None` for fewer than 3
    /// observations or zero variance.
    pub skewness: Option<f64>,
    pub label: DistributionLabel,
}

pub fn summarize(v: &[f64]) -> Result<DistributionSummary> {
    summarize_with(v, VarianceKind::Sample, VmrThresholds::default())
}

pub fn summarize_with(
    v: &[f64],
    kind: VarianceKind,
    thresholds: VmrThresholds,
) -> Result<DistributionSummary> {
    if v.is_empty() {
        return Err(Error::EmptyInput("cannot summarize an empty vector".into()));
    }
    let n = v.len();
    let nf = n as f64;
    let mean = v.iter().sum::<f64>() / nf;
    let ss: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
    let variance = match kind {
        VarianceKind::Sample if n > 1 => ss / (nf - 1.0),
        VarianceKind::Sample => 0.0,
        VarianceKind::Population => ss / nf,
    };
    // A sample variance needs two observations.
    let defined = n > 1 || kind == VarianceKind::Population;
    let vmr = (mean > 0.0 && defined).then(|| variance / mean);
    let geometric_mean = v
        .iter()
        .all(|&x| x > 0.0)
        .then(|| (v.iter().map(|x| x.ln()).sum::<f64>() / nf).exp());
    let skewness = if n >= 3 && ss > 0.0 {
        let m2 = ss / nf;
        let m3 = v.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / nf;
        let g1 = m3 / m2.powf(1.5);
        Some(g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0))
    } else {
        None
    };
    let mut summary = DistributionSummary {
        n,
        mean,
        variance,
        vmr,
        geometric_mean,
        skewness,
        label: DistributionLabel::Indeterminate,
    };
    summary.label = classify_with(&summary, thresholds);
    Ok(summary)
}

pub fn classify(s: &DistributionSummary) -> DistributionLabel {
    classify_with(s, VmrThresholds::default())
}

/// Overdispersed above `high`, lognormal-like below `low`, else indeterminate.
/// An undefined VMR (zero mean) is indeterminate.
pub fn classify_with(s: &DistributionSummary, t: VmrThresholds) -> DistributionLabel {
    match s.vmr {
        Some(r) if r > t.high => DistributionLabel::CompoundPoissonContagious,
        Some(r) if r < t.low => DistributionLabel::LognormalLike,
        _ => DistributionLabel::Indeterminate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// 11 ascending edges, or `[min, max]` for a degenerate histogram.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// All observations share one value; a single bin holds them all.
    pub degenerate: bool,
}

pub const DECILE_BINS: usize = 10;

/// Ten equal-width bins spanning `[min, max]`. A value on an internal edge
/// belongs to the upper bin; the maximum lands in the last bin.
pub fn decile_histogram(v: &[f64]) -> Result<Histogram> {
    if v.is_empty() {
        return Err(Error::EmptyInput("cannot bin an empty vector".into()));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("non-finite observation {x}")));
    }
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max <= min {
        return Ok(Histogram {
            bin_edges: vec![min, max],
            counts: vec![v.len()],
            degenerate: true,
        });
    }
    let width = (max - min) / DECILE_BINS as f64;
    let mut edges: Vec<f64> = (0..=DECILE_BINS).map(|k| min + k as f64 * width).collect();
    edges[DECILE_BINS] = max;

    let mut counts = vec![0usize; DECILE_BINS];
    for &x in v {
        let mut bin = (((x - min) / width).floor() as usize).min(DECILE_BINS - 1);
        // Settle rounding near edges against the stored edge values.
        while bin + 1 < DECILE_BINS && x >= edges[bin + 1] {
            bin += 1;
        }
        while bin > 0 && x < edges[bin] {
            bin -= 1;
        }
        counts[bin] += 1;
    }
    Ok(Histogram {
        bin_edges: edges,
        counts,
        degenerate: false,
    })
}

/// Header for [`summary_csv_row`].
pub const SUMMARY_CSV_HEADER: &str = "id,n,mean,variance,vmr,geometric_mean,skewness,label";

pub fn summary_csv_row(id: &str, s: &DistributionSummary) -> String {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{}",
        id,
        s.n,
        s.mean,
        s.variance,
        opt(s.vmr),
        opt(s.geometric_mean),
        opt(s.skewness),
        s.label.as_str()
    )
}

pub const HISTOGRAM_CSV_HEADER: &str = "id,bin,lower,upper,count";

pub fn histogram_csv_rows(id: &str, h: &Histogram) -> String {
    let mut out = String::new();
    for (k, count) in h.counts.iter().enumerate() {
        let lower = h.bin_edges[k];
        let upper = h.bin_edges[(k + 1).min(h.bin_edges.len() - 1)];
        let _ = writeln!(out, "{id},{},{lower},{upper},{count}", k + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_vector() {
        let s = summarize(&[5.0, 5.0, 5.0, 5.0]).unwrap();
        assert_eq!((s.mean, s.variance, s.vmr), (5.0, 0.0, Some(0.0)));
        assert_eq!(s.skewness, None);
        assert_eq!(s.label, DistributionLabel::LognormalLike);
    }

    #[test]
    fn one_ten_hundred() {
        // Deviations (-36, -27, 63); squares sum to 5994; sample variance 2997.
        let s = summarize(&[1.0, 10.0, 100.0]).unwrap();
        assert_eq!(s.mean, 37.0);
        assert!((s.variance - 2997.0).abs() < 1e-9);
        assert!((s.vmr.unwrap() - 81.0).abs() < 1e-9);
        assert!((s.geometric_mean.unwrap() - 10.0).abs() < 1e-12);
        let p = summarize_with(
            &[1.0, 10.0, 100.0],
            VarianceKind::Population,
            Default::default(),
        )
        .unwrap();
        assert!((p.variance - 1998.0).abs() < 1e-9);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(summarize(&[]), Err(Error::EmptyInput(_))));
        assert!(matches!(decile_histogram(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn zero_mean_and_geometric_mean_absence() {
        let s = summarize(&[0.0, 0.0]).unwrap();
        assert_eq!(s.vmr, None);
        assert_eq!(s.label, DistributionLabel::Indeterminate);
        assert_eq!(summarize(&[0.0, 4.0]).unwrap().geometric_mean, None);
    }

    #[test]
    fn single_observation() {
        let s = summarize(&[3.0]).unwrap();
        assert_eq!((s.n, s.variance), (1, 0.0));
        assert_eq!(s.vmr, None);
        assert_eq!(s.label, DistributionLabel::Indeterminate);
        let p = summarize_with(&[3.0], VarianceKind::Population, VmrThresholds::default()).unwrap();
        assert_eq!(p.vmr, Some(0.0));
    }

    fn with_vmr(vmr: f64) -> DistributionSummary {
        DistributionSummary {
            n: 10,
            mean: 1.0,
            variance: vmr,
            vmr: Some(vmr),
            geometric_mean: None,
            skewness: None,
            label: DistributionLabel::Indeterminate,
        }
    }

    #[test]
    fn classification_thresholds() {
        assert_eq!(
            classify(&with_vmr(3429.46)),
            DistributionLabel::CompoundPoissonContagious
        );
        assert_eq!(classify(&with_vmr(0.03)), DistributionLabel::LognormalLike);
        assert_eq!(classify(&with_vmr(5.0)), DistributionLabel::Indeterminate);
        let strict = VmrThresholds {
            high: 4.0,
            low: 1.0,
        };
        assert_eq!(
            classify_with(&with_vmr(5.0), strict),
            DistributionLabel::CompoundPoissonContagious
        );
    }

    #[test]
    fn uniform_grid_histogram() {
        let v: Vec<f64> = (0..10).map(f64::from).collect();
        let h = decile_histogram(&v).unwrap();
        assert_eq!(h.counts, vec![1; 10]);
        assert_eq!(h.bin_edges.len(), 11);
    }

    #[test]
    fn endpoint_histogram() {
        let h = decile_histogram(&[0.0, 10.0]).unwrap();
        assert_eq!(h.counts, vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn degenerate_histogram() {
        let h = decile_histogram(&[2.0, 2.0, 2.0]).unwrap();
        assert!(h.degenerate);
        assert_eq!(h.counts, vec![3]);
    }

    #[test]
    fn csv_rows() {
        let s = summarize(&[1.0, 10.0, 100.0]).unwrap();
        let row = summary_csv_row("JACS", &s);
        assert!(row.starts_with("JACS,3,37,"));
        assert_eq!(
            row.split(',').count(),
            SUMMARY_CSV_HEADER.split(',').count()
        );
        let h = decile_histogram(&[0.0, 10.0]).unwrap();
        assert_eq!(histogram_csv_rows("J", &h).lines().count(), 10);
    }
}
