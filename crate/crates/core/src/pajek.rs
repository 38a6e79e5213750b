//! Reader and writer helpers for the Pajek `.net` text format.
//!
//! Only the subset used here is supported: a `*Vertices n` section with
//! optional 2-D coordinates, followed by `*Arcs` and/or `*Edges` sections
//! carrying 1-based `from to weight` triples.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PajekVertex {
    pub name: String,
    pub position: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PajekNetwork {
    pub vertices: Vec<PajekVertex>,
    /// Directed `(from, to, weight)`, zero-based.
    pub arcs: Vec<(usize, usize, f64)>,
    /// Undirected `(a, b, weight)`, zero-based.
    pub edges: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Vertices,
    Arcs,
    Edges,
}

/// Splits a line on whitespace, keeping double-quoted runs together.
fn tokens(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut tok = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => tok.push(ch),
                    None => return Err("unterminated quoted name".into()),
                }
            }
            out.push(tok);
        } else {
            let mut tok = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() {
                    break;
                }
                tok.push(ch);
                chars.next();
            }
            out.push(tok);
        }
    }
    Ok(out)
}

fn parse_num(tok: &str, row: usize, column: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| Error::parse(row, column, format!("`{tok}` is not a number")))
}

fn parse_index(tok: &str, n: usize, row: usize, column: usize) -> Result<usize> {
    let idx: usize = tok
        .parse()
        .map_err(|_| Error::parse(row, column, format!("`{tok}` is not a vertex index")))?;
    if idx == 0 || idx > n {
        return Err(Error::parse(
            row,
            column,
            format!("vertex index {idx} outside 1..={n}"),
        ));
    }
    Ok(idx - 1)
}

pub fn parse(text: &str) -> Result<PajekNetwork> {
    let mut net = PajekNetwork::default();
    let mut section = Section::None;
    let mut declared = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let row = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('*') {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let head = toks[0].to_ascii_lowercase();
            section = match head.as_str() {
                "*vertices" => {
                    let n = toks
                        .get(1)
                        .ok_or_else(|| Error::parse(row, 2, "missing vertex count"))?;
                    declared = n
                        .parse()
                        .map_err(|_| Error::parse(row, 2, format!("bad vertex count `{n}`")))?;
                    Section::Vertices
                }
                "*arcs" => Section::Arcs,
                "*edges" => Section::Edges,
                _ => {
                    return Err(Error::parse(
                        row,
                        1,
                        format!("unknown section `{}`", toks[0]),
                    ))
                }
            };
            continue;
        }
        let toks = tokens(line).map_err(|m| Error::parse(row, 1, m))?;
        match section {
            Section::None => return Err(Error::parse(row, 1, "data before *Vertices")),
            Section::Vertices => {
                if net.vertices.len() == declared {
                    return Err(Error::Dimension(format!(
                        "more than the {declared} declared vertices"
                    )));
                }
                let idx = parse_index(&toks[0], declared, row, 1)?;
                if idx != net.vertices.len() {
                    return Err(Error::parse(row, 1, "vertices must be listed in order"));
                }
                let name = toks
                    .get(1)
                    .cloned()
                    .unwrap_or_else(|| (idx + 1).to_string());
                let position = match (toks.get(2), toks.get(3)) {
                    (Some(x), Some(y)) => Some((parse_num(x, row, 3)?, parse_num(y, row, 4)?)),
                    _ => None,
                };
                net.vertices.push(PajekVertex { name, position });
            }
            Section::Arcs | Section::Edges => {
                if toks.len() < 2 {
                    return Err(Error::parse(row, 1, "expected `from to [weight]`"));
                }
                let a = parse_index(&toks[0], declared, row, 1)?;
                let b = parse_index(&toks[1], declared, row, 2)?;
                let w = match toks.get(2) {
                    Some(t) => parse_num(t, row, 3)?,
                    None => 1.0,
                };
                if section == Section::Arcs {
                    net.arcs.push((a, b, w));
                } else {
                    net.edges.push((a, b, w));
                }
            }
        }
    }
    if net.vertices.len() != declared {
        return Err(Error::Dimension(format!(
            "*Vertices declares {declared} vertices but {} are listed",
            net.vertices.len()
        )));
    }
    Ok(net)
}

pub fn render(net: &PajekNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {}", net.vertices.len());
    for (i, v) in net.vertices.iter().enumerate() {
        let name = v.name.replace('"', "'");
        match v.position {
            Some((x, y)) => {
                let _ = writeln!(out, "{} \"{}\" {} {} 0.5", i + 1, name, x, y);
            }
            None => {
                let _ = writeln!(out, "{} \"{}\"", i + 1, name);
            }
        }
    }
    if !net.arcs.is_empty() {
        out.push_str("*Arcs\n");
        for &(a, b, w) in &net.arcs {
            let _ = writeln!(out, "{} {} {}", a + 1, b + 1, w);
        }
    }
    if !net.edges.is_empty() {
        out.push_str("*Edges\n");
        for &(a, b, w) in &net.edges {
            let _ = writeln!(out, "{} {} {}", a + 1, b + 1, w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_names_with_spaces() {
        let net =
            parse("*Vertices 2\n1 \"J Am Chem Soc\" 0.1 0.2 0.5\n2 \"Science\"\n*Arcs\n2 1 304\n")
                .unwrap();
        assert_eq!(net.vertices[0].name, "J Am Chem Soc");
        assert_eq!(net.vertices[0].position, Some((0.1, 0.2)));
        assert_eq!(net.vertices[1].position, None);
        assert_eq!(net.arcs, vec![(1, 0, 304.0)]);
    }

    #[test]
    fn out_of_range_vertex() {
        let err = parse("*Vertices 1\n1 \"A\"\n*Arcs\n1 2 3\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                row: 4,
                column: 2,
                ..
            }
        ));
    }

    #[test]
    fn count_mismatch() {
        assert!(matches!(
            parse("*Vertices 3\n1 \"A\"\n").unwrap_err(),
            Error::Dimension(_)
        ));
    }
}
