//! Subcommand bodies. Each writes its artifacts under the configured output
//! directory and returns the paths written, in a fixed order.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use citeclass::export::{self, ExportFormat};
use citeclass::factors::{
    eigendecompose, kaiser_count, loadings_from_eigen, scree, suppress_small, varimax,
};
use citeclass::layout::{build_distances, layout_components};
use citeclass::powerlaw::{self, fit_loglog, head_deviation, rank_size, FIT_CSV_HEADER};
use citeclass::similarity::{cosine, pearson, similarity_matrix, threshold_graph};
use citeclass::stats::{
    self, decile_histogram, summarize, HISTOGRAM_CSV_HEADER, SUMMARY_CSV_HEADER,
};
use citeclass::synth;
use citeclass::{CitationMatrix, Format, Transform, VarimaxOptions};
use serde_json::json;

use crate::config::{FactorCount, PipelineConfig};

pub fn warn(msg: impl AsRef<str>) {
    eprintln!("warning: {}", msg.as_ref());
}

pub fn note(msg: impl AsRef<str>) {
    eprintln!("note: {}", msg.as_ref());
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create directory {}", parent.display()))?;
    }
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// File-name-safe form of a journal id.
fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn load_matrix(cfg: &PipelineConfig) -> Result<CitationMatrix> {
    let Some(path) = cfg.input.as_deref() else {
        bail!("no input matrix; pass --input FILE or generate one with `citeclass demo`");
    };
    let format = cfg.input_format(path)?;
    let m = CitationMatrix::load(path, format)
        .with_context(|| format!("cannot load {}", path.display()))?;
    if m.is_empty() {
        bail!("{} holds no journals", path.display());
    }
    Ok(m)
}

fn transformed(m: &CitationMatrix, t: &Transform) -> Result<CitationMatrix> {
    t.apply(m)
        .with_context(|| format!("{} transform failed", t.tag()))
}

pub fn cmd_stats(cfg: &PipelineConfig, m: &CitationMatrix) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut variants = Vec::new();
    for t in cfg.variants() {
        let tm = transformed(m, &t)?;
        let mut summary_csv = format!("{SUMMARY_CSV_HEADER}\n");
        let mut hist_csv = format!("{HISTOGRAM_CSV_HEADER}\n");
        let mut journals = Vec::new();
        for (i, label) in tm.labels().iter().enumerate() {
            let row = tm.cited_profile(i)?;
            let s = summarize(row).with_context(|| format!("journal `{}`", label.id))?;
            let h = decile_histogram(row).with_context(|| format!("journal `{}`", label.id))?;
            if h.degenerate {
                warn(format!(
                    "journal `{}` ({}): all values equal, single-bin histogram",
                    label.id,
                    t.tag()
                ));
            }
            summary_csv.push_str(&stats::summary_csv_row(&label.id, &s));
            summary_csv.push('\n');
            hist_csv.push_str(&stats::histogram_csv_rows(&label.id, &h));
            journals.push(json!({ "id": label.id, "summary": s, "histogram": h }));
        }
        written.push(write_out(
            &cfg.out_dir,
            &format!("stats_{}.csv", t.tag()),
            &summary_csv,
        )?);
        written.push(write_out(
            &cfg.out_dir,
            &format!("histogram_{}.csv", t.tag()),
            &hist_csv,
        )?);
        variants.push(json!({ "variant": t.tag(), "journals": journals }));
    }
    written.push(write_out(
        &cfg.out_dir,
        "stats.json",
        &to_json(&json!(variants)),
    )?);
    Ok(written)
}

pub fn cmd_classify(cfg: &PipelineConfig, m: &CitationMatrix) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut summary = Vec::new();
    for t in cfg.variants() {
        let tag = t.tag();
        let tm = transformed(m, &t)?;
        let corr = similarity_matrix(&tm, cfg.measure)
            .with_context(|| format!("cannot correlate the {tag} matrix"))?;
        written.push(write_out(
            &cfg.out_dir,
            &format!("correlation_{tag}.csv"),
            &corr.to_csv(),
        )?);

        let eig = eigendecompose(&corr.values)
            .with_context(|| format!("eigendecomposition of the {tag} matrix"))?;
        let mut scree_csv = String::from("factor,eigenvalue\n");
        for (k, l) in scree(&eig) {
            let _ = writeln!(scree_csv, "{k},{l}");
        }
        written.push(write_out(
            &cfg.out_dir,
            &format!("scree_{tag}.csv"),
            &scree_csv,
        )?);

        let kaiser = kaiser_count(&eig.eigenvalues);
        let n = corr.len();
        let k = match cfg.factors {
            FactorCount::Kaiser => kaiser,
            FactorCount::Fixed(k) if k > n => {
                bail!("cannot extract {k} factors from {n} journals")
            }
            FactorCount::Fixed(k) => k,
        };

        let mut report = String::new();
        let _ = writeln!(report, "variant: {tag}");
        let _ = writeln!(report, "measure: {}", cfg.measure);
        let _ = writeln!(report, "journals: {n}");
        let _ = writeln!(report, "kaiser count: {kaiser}");
        let forced = matches!(cfg.factors, FactorCount::Fixed(_));
        if forced {
            let msg = format!(
                "{k} factors forced (--factors {k}); the Kaiser criterion retains {kaiser}"
            );
            note(format!("{tag}: {msg}"));
            let _ = writeln!(report, "note: {msg}");
        }

        let mut entry = json!({
            "variant": tag,
            "measure": cfg.measure.to_string(),
            "journals": n,
            "kaiser_count": kaiser,
            "factors": k,
            "forced": forced,
            "eigenvalues": eig.eigenvalues,
        });

        if k == 0 {
            let _ = writeln!(report, "no retained factors: no eigenvalue exceeds 1");
            note(format!("{tag}: no retained factors"));
        } else {
            let unrotated = loadings_from_eigen(&corr.labels, &eig, k)?;
            let l = if cfg.rotate && k > 1 {
                let r = varimax(&unrotated, VarimaxOptions::default());
                if !r.converged {
                    warn(format!(
                        "{tag}: varimax stopped after {} sweeps without settling",
                        r.iterations
                    ));
                }
                r
            } else {
                unrotated
            };
            let table = suppress_small(&l, cfg.suppress).with_decimals(cfg.decimals);
            let _ = writeln!(
                report,
                "rotation: {}",
                if l.rotated { "varimax" } else { "none" }
            );
            let _ = writeln!(report, "loadings below {} suppressed", cfg.suppress);
            let _ = writeln!(report);
            report.push_str(&table.to_string());
            let _ = writeln!(report);
            let _ = write!(report, "explained variance:");
            for v in &l.explained_variance {
                let _ = write!(report, " {:.1}%", 100.0 * v);
            }
            let _ = writeln!(report);
            let _ = writeln!(
                report,
                "total explained: {:.1}%",
                100.0 * l.total_explained()
            );
            written.push(write_out(
                &cfg.out_dir,
                &format!("loadings_{tag}.csv"),
                &l.to_csv(),
            )?);
            entry["rotated"] = json!(l.rotated);
            entry["rotation_converged"] = json!(l.converged);
            entry["explained_variance"] = json!(l.explained_variance);
            entry["total_explained"] = json!(l.total_explained());
        }
        written.push(write_out(
            &cfg.out_dir,
            &format!("classify_{tag}.txt"),
            &report,
        )?);
        summary.push(entry);
    }
    written.push(write_out(
        &cfg.out_dir,
        "classify.json",
        &to_json(&json!(summary)),
    )?);
    Ok(written)
}

pub fn cmd_powerlaw(cfg: &PipelineConfig, m: &CitationMatrix) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut csv = format!("{FIT_CSV_HEADER}\n");
    for (i, label) in m.labels().iter().enumerate() {
        let id = &label.id;
        let series = match rank_size(m.cited_profile(i)?) {
            Ok(s) => s,
            Err(e) => {
                warn(format!("journal `{id}` skipped: {e}"));
                let _ = writeln!(csv, "{id},0,,,,");
                continue;
            }
        };
        let fit = match fit_loglog(&series, cfg.powerlaw_base, cfg.exclude_head) {
            Ok(f) => f,
            Err(e) => {
                warn(format!("journal `{id}` not fitted: {e}"));
                let _ = writeln!(csv, "{id},{},,,,", series.n_nonzero);
                continue;
            }
        };
        if fit.is_degenerate() {
            warn(format!("journal `{id}`: constant counts, r² undefined"));
        }
        let head = head_deviation(&series, &fit, cfg.head_threshold);
        csv.push_str(&powerlaw::fit_csv_row(id, &series, &fit, &head));
        csv.push('\n');
        let svg = powerlaw::render_svg(id, &series, &fit, &head);
        let name = format!("powerlaw/{:02}_{}.svg", i + 1, file_stem(id));
        written.push(write_out(&cfg.out_dir, &name, &svg)?);
    }
    written.insert(0, write_out(&cfg.out_dir, "powerlaw.csv", &csv)?);
    Ok(written)
}

pub fn cmd_map(cfg: &PipelineConfig, m: &CitationMatrix) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for t in cfg.variants() {
        let tag = t.tag();
        let tm = transformed(m, &t)?;
        let sim = similarity_matrix(&tm, cfg.measure)
            .with_context(|| format!("cannot correlate the {tag} matrix"))?;
        let graph = threshold_graph(&sim, cfg.threshold);
        let layout = layout_components(&build_distances(&graph), cfg.layout_options());
        for &i in &layout.isolated {
            warn(format!(
                "{tag}: journal `{}` has no edge at threshold {}; placed on the packing grid",
                graph.nodes[i].id, cfg.threshold
            ));
        }
        if !layout.converged() {
            warn(format!("{tag}: layout stopped before every node settled"));
        }
        for format in [ExportFormat::Svg, ExportFormat::Dot, ExportFormat::PajekNet] {
            let text = export::render(&layout.coordinates, &graph, format)?;
            let name = format!("map_{tag}.{}", format.extension());
            written.push(write_out(&cfg.out_dir, &name, &text)?);
        }
    }
    Ok(written)
}

/// The two-variable table contrasting Pearson and cosine before and after
/// the log transform. The log vectors are `log10(v) + 1`, i.e. 1 2 3 4 and
/// 1 2 4 3.
pub fn table5() -> String {
    let v1 = [1.0, 10.0, 100.0, 1000.0];
    let v2 = [1.0, 10.0, 1000.0, 100.0];
    let lg = |v: &[f64; 4]| v.map(|x: f64| x.log10() + 1.0);
    let (l1, l2) = (lg(&v1), lg(&v2));
    let cell = |r: citeclass::Result<f64>| r.expect("fixed vectors are valid");
    let mut out = String::new();
    let _ = writeln!(out, "v1 = 1, 10, 100, 1000; v2 = 1, 10, 1000, 100");
    let _ = writeln!(out, "{:<8} {:>7} {:>7}", "", "raw", "log");
    let _ = writeln!(
        out,
        "{:<8} {:>+7.3} {:>+7.3}",
        "pearson",
        cell(pearson(&v1, &v2)),
        cell(pearson(&l1, &l2))
    );
    let _ = writeln!(
        out,
        "{:<8} {:>+7.3} {:>+7.3}",
        "cosine",
        cell(cosine(&v1, &v2)),
        cell(cosine(&l1, &l2))
    );
    let _ = writeln!(
        out,
        "note: log columns use log10(v) + 1 (1 2 3 4 and 1 2 4 3); plain log10 leaves pearson unchanged but gives cosine {:+.3}",
        cell(cosine(&v1.map(f64::log10), &v2.map(f64::log10)))
    );
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the synthetic 21-journal matrix and its journal list.
pub fn cmd_demo(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let seed = cfg.seed.unwrap_or(synth::DEMO_SEED);
    let m = synth::demo_matrix(seed)?;
    let format = cfg.format.unwrap_or(Format::Csv);
    let ext = match format {
        Format::Csv => "csv",
        Format::Tsv => "tsv",
        Format::PajekNet => "net",
    };
    let matrix = write_out(&cfg.out_dir, &format!("demo.{ext}"), &m.render(format))?;
    let mut journals = String::from("id,name,class\n");
    for l in m.labels() {
        let _ = writeln!(
            journals,
            "{},{},{}",
            csv_field(&l.id),
            csv_field(&l.name),
            csv_field(l.class_tag.as_deref().unwrap_or(""))
        );
    }
    let list = write_out(&cfg.out_dir, "demo_journals.csv", &journals)?;
    Ok(vec![matrix, list])
}

/// Every step in sequence. Without an input the demo matrix is generated
/// first and analysed.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut cfg = cfg.clone();
    if cfg.input.is_none() {
        let demo = cmd_demo(&cfg)?;
        cfg.input = Some(demo[0].clone());
        written.extend(demo);
    }
    let m = load_matrix(&cfg)?;
    written.push(write_out(&cfg.out_dir, "table5.txt", &table5())?);
    written.extend(cmd_stats(&cfg, &m)?);
    written.extend(cmd_classify(&cfg, &m)?);
    written.extend(cmd_powerlaw(&cfg, &m)?);
    written.extend(cmd_map(&cfg, &m)?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table5_values() {
        let t = table5();
        let pearson = t.lines().find(|l| l.starts_with("pearson")).unwrap();
        let cosine = t.lines().find(|l| l.starts_with("cosine")).unwrap();
        assert!(
            pearson.contains("-0.155") && pearson.contains("+0.800"),
            "{t}"
        );
        assert!(cosine.contains("+0.967"), "{t}");
    }

    #[test]
    fn stems() {
        assert_eq!(file_stem("J. Chem/Phys"), "J__Chem_Phys");
    }
}
