//! Rank-size series, ordinary least-squares fits on log-log axes and the
//! "hooked head" deviation of the top ranks from the fitted line.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSizeSeries {
    /// `(rank, count)`, ranks `1..=n_nonzero`, counts non-increasing.
    pub pairs: Vec<(usize, f64)>,
    pub n_nonzero: usize,
}

/// Positive counts sorted in descending order; ties keep input order.
pub fn rank_size(v: &[f64]) -> Result<RankSizeSeries> {
    if v.is_empty() {
        return Err(Error::EmptyInput("rank-size of an empty vector".into()));
    }
    let mut counts: Vec<f64> = v.iter().copied().filter(|&x| x > 0.0).collect();
    if counts.is_empty() {
        return Err(Error::EmptyInput("no positive counts to rank".into()));
    }
    // `sort_by` is stable.
    counts.sort_by(|a, b| b.total_cmp(a));
    let pairs: Vec<(usize, f64)> = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c))
        .collect();
    Ok(RankSizeSeries {
        n_nonzero: pairs.len(),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerlawFit {
    pub slope: f64,
    pub intercept: f64,
    /// `None` when the response is constant over the fit range.
    pub r_squared: Option<f64>,
    pub base: f64,
    /// Inclusive rank range used by the regression.
    pub fit_range: (usize, usize),
}

impl PowerlawFit {
    pub fn predict_log(&self, rank: usize) -> f64 {
        self.intercept + self.slope * log_base(rank as f64, self.base)
    }

    pub fn is_degenerate(&self) -> bool {
        self.r_squared.is_none()
    }
}

fn log_base(x: f64, base: f64) -> f64 {
    if base == 10.0 {
        x.log10()
    } else {
        x.ln() / base.ln()
    }
}

/// OLS of `log(count)` on `log(rank)` over ranks `exclude_head + 1 ..= n_nonzero`.
pub fn fit_loglog(s: &RankSizeSeries, base: f64, exclude_head: usize) -> Result<PowerlawFit> {
    if !(base > 1.0 && base.is_finite()) {
        return Err(Error::Parameter(format!(
            "log base must exceed 1, got {base}"
        )));
    }
    let pts = s.pairs.get(exclude_head..).unwrap_or(&[]);
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} points left after excluding {exclude_head} head ranks, need 3",
            pts.len()
        )));
    }
    let xs: Vec<f64> = pts.iter().map(|&(r, _)| log_base(r as f64, base)).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, c)| log_base(c, base)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let fit_range = (pts[0].0, pts[pts.len() - 1].0);
    if ys.iter().all(|&y| y == ys[0]) {
        return Ok(PowerlawFit {
            slope: 0.0,
            intercept: ys[0],
            r_squared: None,
            base,
            fit_range,
        });
    }
    let slope = sxy / sxx;
    let r_squared = (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0);
    Ok(PowerlawFit {
        slope,
        intercept: my - slope * mx,
        r_squared: Some(r_squared),
        base,
        fit_range,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadReport {
    pub head_size: usize,
    /// `(rank, observed log count - fitted log count)` for every rank.
    pub residuals: Vec<(usize, f64)>,
    pub threshold: f64,
}

pub const DEFAULT_HEAD_THRESHOLD: f64 = 0.1;

/// Length of the leading run of ranks whose log residual exceeds `threshold`
/// in absolute value.
pub fn head_deviation(s: &RankSizeSeries, f: &PowerlawFit, threshold: f64) -> HeadReport {
    let residuals: Vec<(usize, f64)> = s
        .pairs
        .iter()
        .map(|&(r, c)| (r, log_base(c, f.base) - f.predict_log(r)))
        .collect();
    let head_size = residuals
        .iter()
        .take_while(|(_, res)| res.abs() > threshold)
        .count();
    HeadReport {
        head_size,
        residuals,
        threshold,
    }
}

pub const FIT_CSV_HEADER: &str = "id,n_nonzero,slope,intercept,r_squared,head_size";

pub fn fit_csv_row(id: &str, s: &RankSizeSeries, f: &PowerlawFit, head: &HeadReport) -> String {
    format!(
        "{id},{},{},{},{},{}",
        s.n_nonzero,
        f.slope,
        f.intercept,
        f.r_squared.map(|r| r.to_string()).unwrap_or_default(),
        head.head_size
    )
}

/// Log-log scatter of the series with the fitted line; head ranks drawn in red.
pub fn render_svg(title: &str, s: &RankSizeSeries, f: &PowerlawFit, head: &HeadReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 56.0;
    let lx: Vec<f64> = s
        .pairs
        .iter()
        .map(|&(r, _)| log_base(r as f64, f.base))
        .collect();
    let ly: Vec<f64> = s.pairs.iter().map(|&(_, c)| log_base(c, f.base)).collect();
    let fit_lo = f.predict_log(1);
    let fit_hi = f.predict_log(s.n_nonzero);
    let x_max = lx.iter().copied().fold(0.0, f64::max).max(1e-9);
    let y_min = ly
        .iter()
        .copied()
        .chain([fit_lo, fit_hi])
        .fold(f64::INFINITY, f64::min);
    let y_max = ly
        .iter()
        .copied()
        .chain([fit_lo, fit_hi])
        .fold(f64::NEG_INFINITY, f64::max);
    let y_span = (y_max - y_min).max(1e-9);
    let px = |x: f64| M + x / x_max * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y_min) / y_span * (H - 2.0 * M);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        W / 2.0,
        xml_escape(title)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{M}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        H - M,
        W - M,
        H - M
    );
    let _ = writeln!(
        out,
        r#"<line x1="{M}" y1="{M}" x2="{M}" y2="{}" stroke="black"/>"#,
        H - M
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log rank</text>"#,
        W / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})" text-anchor="middle">log count</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (i, (&x, &y)) in lx.iter().zip(&ly).enumerate() {
        let color = if i < head.head_size {
            "red"
        } else {
            "steelblue"
        };
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{color}"/>"#,
            px(x),
            py(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-dasharray="6 3"/>"#,
        px(0.0),
        py(fit_lo),
        px(x_max),
        py(fit_hi)
    );
    let r2 = f
        .r_squared
        .map(|r| format!("{r:.3}"))
        .unwrap_or_else(|| "undefined".into());
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">log(y) = {:.2} log(x) + {:.2}, r² = {r2}, head = {}</text>"#,
        W - M,
        M,
        f.slope,
        f.intercept,
        head.head_size
    );
    out.push_str("</svg>\n");
    out
}

pub(crate) fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
