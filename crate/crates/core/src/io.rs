//! Text formats. Vertex labels in files are 1-based; `#` starts a comment
//! and blank lines are ignored.
//!
//! * edge list: header `n <count>`, then one `i j w` line per edge;
//! * matrix: `n` rows of `n` comma-separated decimals;
//! * Kuramoto: header `N <count>` (or a bare count), a line
//!   `omega: w_1 ... w_N`, then `i j B_ij` coupling lines;
//! * phases: `N` decimals separated by whitespace or commas.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::kuramoto::{KuramotoSystem, PhaseState};
use crate::matrix::SymmetricMatrix;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_error(line, format!("'{token}' is not a number")))?;
    if !value.is_finite() {
        return Err(parse_error(line, format!("non-finite value '{token}'")));
    }
    Ok(value)
}

fn parse_count(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_error(line, format!("'{token}' is not a vertex count")))
}

fn parse_label(token: &str, n: usize, line: usize) -> Result<usize> {
    let label: usize = token
        .parse()
        .map_err(|_| parse_error(line, format!("'{token}' is not a vertex label")))?;
    if label == 0 || label > n {
        return Err(parse_error(line, format!("vertex {label} outside 1..={n}")));
    }
    Ok(label - 1)
}

fn parse_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    keyword: &str,
    bare_allowed: bool,
) -> Result<usize> {
    let (no, line) = lines.next().ok_or_else(|| parse_error(1, "missing header"))?;
    let tokens: Vec<&str> = line.split_whitespace().collect();
    match tokens.as_slice() {
        [k, count] if k.eq_ignore_ascii_case(keyword) => parse_count(count, no),
        [count] if bare_allowed => parse_count(count, no),
        _ => Err(parse_error(no, format!("expected header '{keyword} <count>'"))),
    }
}

/// `(line, i, j, w)` triples with 0-based labels.
fn parse_triples<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    n: usize,
) -> Result<Vec<(usize, usize, usize, f64)>> {
    lines
        .map(|(no, line)| {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [i, j, w] = tokens.as_slice() else {
                return Err(parse_error(no, "expected 'i j w'"));
            };
            Ok((no, parse_label(i, n, no)?, parse_label(j, n, no)?, parse_number(w, no)?))
        })
        .collect()
}

fn with_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => parse_error(line, other.to_string()),
    })
}

pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut lines = content_lines(text);
    let n = parse_header(&mut lines, "n", false)?;
    let triples = parse_triples(lines, n)?;
    build_located(&triples, |edges| WeightedGraph::new(n, edges.iter().copied()))
}

/// Builds from all triples; on failure, rebuilds prefixes to find the line
/// that introduced the error.
fn build_located<T>(
    triples: &[(usize, usize, usize, f64)],
    build: impl Fn(&[(usize, usize, f64)]) -> Result<T>,
) -> Result<T> {
    let edges: Vec<(usize, usize, f64)> = triples.iter().map(|&(_, i, j, w)| (i, j, w)).collect();
    match build(&edges) {
        Ok(value) => Ok(value),
        Err(e) => {
            let line = (1..=edges.len())
                .find(|&k| build(&edges[..k]).is_err())
                .map_or(1, |k| triples[k - 1].0);
            with_line(line, Err(e))
        }
    }
}

pub fn parse_matrix_csv(text: &str) -> Result<SymmetricMatrix> {
    let mut rows = Vec::new();
    let mut last = 0;
    for (no, line) in content_lines(text) {
        let row = line
            .split(',')
            .map(|t| parse_number(t.trim(), no))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if row.len() != first.len() {
                return Err(parse_error(no, format!("row has {} entries, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
        last = no;
    }
    if rows.is_empty() {
        return Err(parse_error(1, "no matrix rows"));
    }
    with_line(last, SymmetricMatrix::from_rows(&rows))
}

pub fn parse_kuramoto(text: &str) -> Result<KuramotoSystem> {
    let mut lines = content_lines(text);
    let n = parse_header(&mut lines, "n", true)?;
    let (no, line) = lines.next().ok_or_else(|| parse_error(1, "missing 'omega:' line"))?;
    let rest = line
        .strip_prefix("omega:")
        .ok_or_else(|| parse_error(no, "expected 'omega: ...'"))?;
    let omega = parse_number_list(rest, no)?;
    if omega.len() != n {
        return Err(parse_error(no, format!("{} frequencies for {n} oscillators", omega.len())));
    }
    let triples = parse_triples(lines, n)?;
    build_located(&triples, |edges| KuramotoSystem::from_edges(omega.clone(), edges.iter().copied()))
}

fn parse_number_list(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_number(t, line))
        .collect()
}

pub fn parse_phases(text: &str) -> Result<PhaseState> {
    let mut theta = Vec::new();
    for (no, line) in content_lines(text) {
        theta.extend(parse_number_list(line, no)?);
    }
    if theta.is_empty() {
        return Err(parse_error(1, "no phases"));
    }
    Ok(PhaseState::new(theta))
}

pub fn write_edge_list(g: &WeightedGraph) -> String {
    let mut out = format!("n {}\n", g.vertex_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.weight);
    }
    out
}

pub fn write_matrix_csv(m: &SymmetricMatrix) -> String {
    m.rows()
        .iter()
        .map(|row| row.iter().map(f64::to_string).collect::<Vec<_>>().join(",") + "\n")
        .collect()
}

pub fn write_kuramoto(sys: &KuramotoSystem) -> String {
    let n = sys.len();
    let omega: Vec<String> = sys.omega().iter().map(f64::to_string).collect();
    let mut out = format!("N {n}\nomega: {}\n", omega.join(" "));
    for i in 0..n {
        for j in i + 1..n {
            let b = sys.coupling().get(i, j);
            if b != 0.0 {
                let _ = writeln!(out, "{} {} {}", i + 1, j + 1, b);
            }
        }
    }
    out
}
