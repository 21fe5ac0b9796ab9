// SPDX-License-Identifier: Apache-2.0

//! Graph and membership files.
//!
//! * MatrixMarket coordinate files (`pattern`, `real`, `integer` or `double`
//!   fields; `general` or `symmetric`). Ids are 1-based on disk.
//! * Whitespace-separated edge lists, one `u v [w]` per line, 0-based ids,
//!   `#` or `%` comments. A `# vertices N` comment fixes the vertex count,
//!   so trailing isolated vertices survive a round trip.
//! * Membership TSV: one `vertex<TAB>label` line per vertex.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use lpa_core::{Edge, EdgeList, VertexId};

use crate::error::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    Mtx,
    EdgeList,
}

impl GraphFormat {
    /// `.mtx` files are MatrixMarket, anything else an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => GraphFormat::Mtx,
            _ => GraphFormat::EdgeList,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphFormat::Mtx => "mtx",
            GraphFormat::EdgeList => "edge-list",
        }
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn open(path: &Path) -> Result<BufReader<File>, BenchError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| BenchError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, BenchError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| BenchError::io(path, e))
}

pub fn load_graph(path: &Path, format: Option<GraphFormat>) -> Result<EdgeList, BenchError> {
    let reader = open(path)?;
    match format.unwrap_or_else(|| GraphFormat::from_path(path)) {
        GraphFormat::Mtx => parse_mtx(reader, path),
        GraphFormat::EdgeList => parse_edge_list(reader, path),
    }
}

struct LineCtx<'a> {
    path: &'a Path,
    line: usize,
}

impl LineCtx<'_> {
    fn format(&self, msg: impl Into<String>) -> BenchError {
        BenchError::Format {
            path: self.path.to_path_buf(),
            line: self.line,
            msg: msg.into(),
        }
    }

    fn parse<T: FromStr>(&self, token: &str, what: &str) -> Result<T, BenchError> {
        token
            .parse()
            .map_err(|_| self.format(format!("cannot parse {what} `{token}`")))
    }

    fn weight(&self, token: &str) -> Result<f64, BenchError> {
        let w: f64 = self.parse(token, "weight")?;
        if !(w.is_finite() && w > 0.0) {
            return Err(BenchError::Validation {
                path: self.path.to_path_buf(),
                line: self.line,
                msg: format!("weight {token} must be finite and positive"),
            });
        }
        Ok(w)
    }
}

fn read_line(reader: &mut impl BufRead, buf: &mut String, path: &Path) -> Result<bool, BenchError> {
    buf.clear();
    let n = reader.read_line(buf).map_err(|e| BenchError::io(path, e))?;
    Ok(n > 0)
}

pub fn parse_edge_list(mut reader: impl BufRead, path: &Path) -> Result<EdgeList, BenchError> {
    let mut edges = Vec::new();
    let mut declared = None;
    let mut buf = String::new();
    let mut ctx = LineCtx { path, line: 0 };
    while read_line(&mut reader, &mut buf, path)? {
        ctx.line += 1;
        let text = buf.trim();
        if let Some(n) = text
            .strip_prefix('#')
            .map(str::trim)
            .and_then(|c| c.strip_prefix("vertices "))
        {
            declared = Some(ctx.parse::<usize>(n.trim(), "vertex count")?);
            continue;
        }
        if text.is_empty() || text.starts_with('#') || text.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let (u, v, w) = match tokens.as_slice() {
            [u, v] => (u, v, None),
            [u, v, w] => (u, v, Some(w)),
            _ => return Err(ctx.format(format!("expected `u v [w]`, got {} fields", tokens.len()))),
        };
        let u: VertexId = ctx.parse(u, "vertex id")?;
        let v: VertexId = ctx.parse(v, "vertex id")?;
        let w = w.map(|w| ctx.weight(w)).transpose()?.unwrap_or(1.0);
        edges.push(Edge::new(u, v, w));
    }
    Ok(EdgeList::new(edges, declared))
}

pub fn parse_mtx(mut reader: impl BufRead, path: &Path) -> Result<EdgeList, BenchError> {
    let mut buf = String::new();
    let mut ctx = LineCtx { path, line: 1 };
    if !read_line(&mut reader, &mut buf, path)? {
        return Err(ctx.format("empty file"));
    }
    let header: Vec<String> = buf
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    let pattern = match header.as_slice() {
        [banner, object, coord, field, symmetry]
            if banner == "%%matrixmarket" && object == "matrix" && coord == "coordinate" =>
        {
            if symmetry != "general" && symmetry != "symmetric" {
                return Err(ctx.format(format!("unsupported symmetry `{symmetry}`")));
            }
            match field.as_str() {
                "pattern" => true,
                "real" | "integer" | "double" => false,
                other => return Err(ctx.format(format!("unsupported field `{other}`"))),
            }
        }
        _ => {
            return Err(ctx.format("expected `%%MatrixMarket matrix coordinate <field> <symmetry>`"))
        }
    };

    let mut size: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    while read_line(&mut reader, &mut buf, path)? {
        ctx.line += 1;
        let text = buf.trim();
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let Some((n, nnz)) = size else {
            let [rows, cols, nnz] = tokens.as_slice() else {
                return Err(ctx.format("expected size line `rows cols entries`"));
            };
            let rows: usize = ctx.parse(rows, "row count")?;
            let cols: usize = ctx.parse(cols, "column count")?;
            let nnz: usize = ctx.parse(nnz, "entry count")?;
            size = Some((rows.max(cols), nnz));
            edges.reserve(nnz);
            continue;
        };
        let (i, j, w) = match (tokens.as_slice(), pattern) {
            ([i, j], true) | ([i, j, _], true) => (i, j, None),
            ([i, j, w], false) => (i, j, Some(w)),
            _ => return Err(ctx.format("malformed entry")),
        };
        let i: usize = ctx.parse(i, "row index")?;
        let j: usize = ctx.parse(j, "column index")?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(ctx.format(format!("index ({i}, {j}) outside 1..={n}")));
        }
        let w = w.map(|w| ctx.weight(w)).transpose()?.unwrap_or(1.0);
        edges.push(Edge::new((i - 1) as VertexId, (j - 1) as VertexId, w));
        if edges.len() > nnz {
            return Err(ctx.format(format!("more than the declared {nnz} entries")));
        }
    }
    let Some((n, nnz)) = size else {
        return Err(ctx.format("missing size line"));
    };
    if edges.len() != nnz {
        return Err(ctx.format(format!("expected {nnz} entries, found {}", edges.len())));
    }
    Ok(EdgeList::new(edges, Some(n)))
}

/// Writes `u v w` lines, preceded by a comment with the vertex count.
pub fn write_edge_list(path: &Path, el: &EdgeList) -> Result<(), BenchError> {
    let mut out = create(path)?;
    let io = |e| BenchError::io(path, e);
    writeln!(out, "# vertices {}", el.vertex_count()).map_err(io)?;
    for e in &el.edges {
        writeln!(out, "{} {} {}", e.u, e.v, e.w).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Writes a `real general` MatrixMarket file.
pub fn write_mtx(path: &Path, el: &EdgeList) -> Result<(), BenchError> {
    let mut out = create(path)?;
    let io = |e| BenchError::io(path, e);
    let n = el.vertex_count();
    writeln!(out, "%%MatrixMarket matrix coordinate real general").map_err(io)?;
    writeln!(out, "{n} {n} {}", el.edges.len()).map_err(io)?;
    for e in &el.edges {
        writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn write_graph(path: &Path, el: &EdgeList) -> Result<(), BenchError> {
    match GraphFormat::from_path(path) {
        GraphFormat::Mtx => write_mtx(path, el),
        GraphFormat::EdgeList => write_edge_list(path, el),
    }
}

pub fn write_membership(path: &Path, labels: &[VertexId]) -> Result<(), BenchError> {
    let mut out = create(path)?;
    let io = |e| BenchError::io(path, e);
    for (i, c) in labels.iter().enumerate() {
        writeln!(out, "{i}\t{c}").map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a membership file for `n` vertices. Every vertex needs exactly one
/// line; the first uncovered id is reported.
pub fn read_membership(path: &Path, n: usize) -> Result<Vec<VertexId>, BenchError> {
    let mut reader = open(path)?;
    let mut labels: Vec<Option<VertexId>> = vec![None; n];
    let mut buf = String::new();
    let mut ctx = LineCtx { path, line: 0 };
    while read_line(&mut reader, &mut buf, path)? {
        ctx.line += 1;
        let text = buf.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let [v, c] = tokens.as_slice() else {
            return Err(ctx.format("expected `vertex<TAB>label`"));
        };
        let v: usize = ctx.parse(v, "vertex id")?;
        let c: VertexId = ctx.parse(c, "label")?;
        let Some(slot) = labels.get_mut(v) else {
            return Err(ctx.format(format!("vertex {v} outside 0..{n}")));
        };
        if slot.replace(c).is_some() {
            return Err(ctx.format(format!("vertex {v} listed twice")));
        }
    }
    labels
        .iter()
        .enumerate()
        .map(|(id, c)| {
            c.ok_or_else(|| BenchError::MissingVertex {
                path: path.to_path_buf(),
                id,
            })
        })
        .collect()
}
