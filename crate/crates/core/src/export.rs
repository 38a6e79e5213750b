//! Writers for laid-out similarity graphs: SVG, Graphviz DOT and Pajek `.net`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::layout::{bounds, Point};
use crate::pajek::{self, PajekNetwork, PajekVertex};
use crate::powerlaw::xml_escape;
use crate::similarity::SimilarityGraph;

pub const SVG_SIZE: f64 = 1000.0;
pub const SVG_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Svg,
    Dot,
    PajekNet,
}

impl ExportFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ExportFormat::Svg => "svg",
            ExportFormat::Dot => "dot",
            ExportFormat::PajekNet => "net",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(ExportFormat::Svg),
            "dot" | "gv" => Ok(ExportFormat::Dot),
            "net" | "pajek" | "pajek_net" => Ok(ExportFormat::PajekNet),
            other => Err(Error::Parameter(format!("unknown export format `{other}`"))),
        }
    }
}

fn check(coords: &[Point], g: &SimilarityGraph) -> Result<()> {
    if coords.len() != g.len() {
        return Err(Error::Dimension(format!(
            "{} coordinates for {} nodes",
            coords.len(),
            g.len()
        )));
    }
    if coords.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("layout has non-finite coordinates".into()));
    }
    Ok(())
}

/// Uniform affine map of `coords` into `[lo, lo + span]^2`, centred on the
/// shorter axis. A single point (or all-coincident points) maps to the centre.
fn fit_square(coords: &[Point], lo: f64, span: f64) -> Vec<Point> {
    let (min, max) = bounds(coords);
    let w = max[0] - min[0];
    let h = max[1] - min[1];
    let extent = w.max(h);
    if extent <= 0.0 {
        return vec![[lo + span / 2.0; 2]; coords.len()];
    }
    let s = span / extent;
    let ox = lo + (span - w * s) / 2.0;
    let oy = lo + (span - h * s) / 2.0;
    coords
        .iter()
        .map(|p| [ox + (p[0] - min[0]) * s, oy + (p[1] - min[1]) * s])
        .collect()
}

/// Coordinates scaled into the unit square, aspect ratio kept.
pub fn normalize_unit(coords: &[Point]) -> Vec<Point> {
    fit_square(coords, 0.0, 1.0)
}

fn svg_coords(coords: &[Point]) -> Vec<Point> {
    let margin = SVG_SIZE * SVG_MARGIN;
    fit_square(coords, margin, SVG_SIZE - 2.0 * margin)
        .into_iter()
        // SVG y grows downwards.
        .map(|[x, y]| [x, SVG_SIZE - y])
        .collect()
}

pub fn stroke_width(weight: f64) -> f64 {
    4.0 * weight.clamp(0.0, 1.0) + 0.25
}

pub fn render_svg(coords: &[Point], g: &SimilarityGraph) -> Result<String> {
    check(coords, g)?;
    let p = svg_coords(coords);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SVG_SIZE
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for &(i, j, w) in &g.edges {
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-width="{:.3}"/>"#,
            p[i][0],
            p[i][1],
            p[j][0],
            p[j][1],
            stroke_width(w)
        );
    }
    for (node, q) in g.nodes.iter().zip(&p) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="7" fill="steelblue"><title>{}</title></circle>"#,
            q[0],
            q[1],
            xml_escape(&node.name)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="13">{}</text>"#,
            q[0] + 9.0,
            q[1] - 9.0,
            xml_escape(&node.id)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected Graphviz graph with pinned `pos` attributes in points.
pub fn render_dot(coords: &[Point], g: &SimilarityGraph) -> Result<String> {
    check(coords, g)?;
    let margin = SVG_SIZE * SVG_MARGIN;
    let p = fit_square(coords, margin, SVG_SIZE - 2.0 * margin);
    let mut out = String::from("graph similarity {\n");
    out.push_str("  node [shape=circle];\n");
    for (node, q) in g.nodes.iter().zip(&p) {
        let _ = writeln!(
            out,
            "  {} [label={}, pos=\"{:.3},{:.3}!\"];",
            dot_quote(&node.id),
            dot_quote(&node.name),
            q[0],
            q[1]
        );
    }
    for &(i, j, w) in &g.edges {
        let _ = writeln!(
            out,
            "  {} -- {} [weight={}, penwidth={:.3}];",
            dot_quote(&g.nodes[i].id),
            dot_quote(&g.nodes[j].id),
            w,
            stroke_width(w)
        );
    }
    out.push_str("}\n");
    Ok(out)
}

/// Pajek network with unit-square coordinates in the `*Vertices` section.
pub fn render_pajek(coords: &[Point], g: &SimilarityGraph) -> Result<String> {
    check(coords, g)?;
    let unit = normalize_unit(coords);
    Ok(pajek::render(&PajekNetwork {
        vertices: g
            .nodes
            .iter()
            .zip(&unit)
            .map(|(l, q)| PajekVertex {
                name: l.id.clone(),
                position: Some((q[0], q[1])),
            })
            .collect(),
        arcs: Vec::new(),
        edges: g.edges.clone(),
    }))
}

/// Vertex names and coordinates from a Pajek file written by [`render_pajek`].
pub fn read_pajek_layout(text: &str) -> Result<(Vec<String>, Vec<Point>)> {
    let net = pajek::parse(text)?;
    let mut names = Vec::with_capacity(net.vertices.len());
    let mut coords = Vec::with_capacity(net.vertices.len());
    for v in net.vertices {
        let (x, y) = v.position.ok_or_else(|| {
            Error::InvalidLabel(format!("vertex `{}` has no coordinates", v.name))
        })?;
        names.push(v.name);
        coords.push([x, y]);
    }
    Ok((names, coords))
}

pub fn render(coords: &[Point], g: &SimilarityGraph, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Svg => render_svg(coords, g),
        ExportFormat::Dot => render_dot(coords, g),
        ExportFormat::PajekNet => render_pajek(coords, g),
    }
}

pub fn export(
    coords: &[Point],
    g: &SimilarityGraph,
    format: ExportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = render(coords, g, format)?;
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
