//! Text formats for graphs, matrices and sample summaries.
//!
//! Graphs use an edge list: a first line holding `p`, then one `i j` line per
//! edge with `1 <= i < j <= p`. Blank lines and `#` comments are ignored.
//!
//! Matrices are CSV without a header, one row per line, every value printed
//! with 17 significant digits so that they read back bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;
use crate::linalg::SymmetricMatrix;

/// Tolerance for the symmetry check when reading a matrix.
pub const READ_SYMMETRY_TOL: f64 = 1e-12;

pub const HISTOGRAM_BINS: usize = 100;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<UndirectedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first, header) = lines.next().ok_or_else(|| parse_err(1, "missing vertex count"))?;
    let p: usize = header
        .parse()
        .map_err(|_| parse_err(first, format!("expected vertex count, found {header:?}")))?;
    if p == 0 {
        return Err(parse_err(first, "vertex count must be positive"));
    }

    let mut g = UndirectedGraph::empty(p);
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(parse_err(line, format!("expected two vertices, found {content:?}")));
        };
        let vertex = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| parse_err(line, format!("invalid vertex {s:?}")))?;
            if v == 0 || v > p {
                return Err(parse_err(line, format!("vertex {v} out of range 1..={p}")));
            }
            Ok(v - 1)
        };
        let (i, j) = (vertex(a)?, vertex(b)?);
        if i == j {
            return Err(parse_err(line, format!("self-loop at vertex {}", i + 1)));
        }
        if !g.add_edge(i, j)? {
            return Err(parse_err(line, format!("duplicate edge {} {}", i + 1, j + 1)));
        }
    }
    Ok(g)
}

pub fn format_graph(g: &UndirectedGraph) -> String {
    let mut out = format!("{}\n", g.p());
    for (i, j) in g.edges() {
        let _ = writeln!(out, "{} {}", i + 1, j + 1);
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<UndirectedGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &UndirectedGraph) -> Result<()> {
    fs::write(path, format_graph(g))?;
    Ok(())
}

/// Formats a value with 17 significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let fields: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Parses a rectangular CSV block from `(line number, content)` pairs.
fn parse_rows<'a>(rows: impl Iterator<Item = (usize, &'a str)>) -> Result<DMatrix<f64>> {
    let mut values = Vec::new();
    let mut ncols = None;
    let mut nrows = 0;
    for (line, content) in rows {
        let before = values.len();
        for field in content.split(',') {
            let field = field.trim();
            let x: f64 = field
                .parse()
                .map_err(|_| parse_err(line, format!("non-numeric field {field:?}")))?;
            if !x.is_finite() {
                return Err(parse_err(line, format!("non-finite field {field:?}")));
            }
            values.push(x);
        }
        let width = values.len() - before;
        match ncols {
            None => ncols = Some(width),
            Some(c) if c != width => {
                return Err(parse_err(line, format!("ragged row: {width} fields, expected {c}")));
            }
            _ => {}
        }
        nrows += 1;
    }
    Ok(DMatrix::from_row_slice(nrows, ncols.unwrap_or(0), &values))
}

fn non_blank_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses an `n x p` data matrix.
pub fn parse_data_matrix(text: &str) -> Result<DMatrix<f64>> {
    parse_rows(non_blank_lines(text))
}

/// Parses a square matrix and checks symmetry to [`READ_SYMMETRY_TOL`]. Pairs
/// within tolerance are replaced by their mean.
pub fn parse_matrix(text: &str) -> Result<SymmetricMatrix> {
    to_symmetric(parse_rows(non_blank_lines(text))?, 1)
}

fn to_symmetric(mut m: DMatrix<f64>, first_line: usize) -> Result<SymmetricMatrix> {
    if !m.is_square() {
        return Err(parse_err(
            first_line,
            format!("matrix is {}x{}, expected square", m.nrows(), m.ncols()),
        ));
    }
    let p = m.nrows();
    for i in 0..p {
        for j in (i + 1)..p {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            if (a - b).abs() > READ_SYMMETRY_TOL {
                return Err(parse_err(
                    first_line + j,
                    format!("asymmetric entries ({}, {}) = {a} and ({}, {}) = {b}", i + 1, j + 1, j + 1, i + 1),
                ));
            }
            if a != b {
                let mean = 0.5 * (a + b);
                m[(i, j)] = mean;
                m[(j, i)] = mean;
            }
        }
    }
    SymmetricMatrix::new(m)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SymmetricMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &SymmetricMatrix) -> Result<()> {
    fs::write(path, format_matrix(m.as_matrix()))?;
    Ok(())
}

pub fn read_data_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    parse_data_matrix(&fs::read_to_string(path)?)
}

pub fn write_data_matrix(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    fs::write(path, format_matrix(m))?;
    Ok(())
}

/// Several matrices in one file, separated by blank lines.
pub fn format_stacked(matrices: &[SymmetricMatrix]) -> String {
    matrices
        .iter()
        .map(|m| format_matrix(m.as_matrix()))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn parse_stacked(text: &str) -> Result<Vec<SymmetricMatrix>> {
    let mut blocks: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            if !blocks.last().is_some_and(Vec::is_empty) {
                blocks.push(Vec::new());
            }
        } else {
            blocks.last_mut().expect("non-empty").push((k + 1, line));
        }
    }
    blocks
        .into_iter()
        .filter(|b| !b.is_empty())
        .map(|b| {
            let first = b[0].0;
            to_symmetric(parse_rows(b.into_iter())?, first)
        })
        .collect()
}

/// Fixed-range histogram over `[-1, 1]`, with values outside the range
/// counted separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` strictly increasing edges; the last bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub underflow: usize,
    pub overflow: usize,
}

impl Histogram {
    pub fn new(bins: usize) -> Self {
        let edges = (0..=bins).map(|k| -1.0 + 2.0 * k as f64 / bins as f64).collect();
        Self {
            edges,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        }
    }

    pub fn add(&mut self, x: f64) {
        let bins = self.counts.len();
        if x < -1.0 || x.is_nan() {
            self.underflow += 1;
            return;
        }
        if x > 1.0 {
            self.overflow += 1;
            return;
        }
        let mut k = (((x + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1);
        while k > 0 && x < self.edges[k] {
            k -= 1;
        }
        while k + 1 < bins && x >= self.edges[k + 1] {
            k += 1;
        }
        self.counts[k] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.underflow + self.overflow
    }
}

/// Samples of one matrix position.
#[derive(Debug, Clone, PartialEq)]
pub struct EntrySummary {
    /// 0-based `(row, column)`.
    pub position: (usize, usize),
    pub values: Vec<f64>,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleBatchSummary {
    pub entries: Vec<EntrySummary>,
    /// `(x, y)` pairs for the designated scatter positions.
    pub scatter: Vec<(f64, f64)>,
}

/// Collects the values at `positions` across `samples`, with a 100-bin
/// histogram per position, and the scatter of the `scatter` pair if given.
pub fn summarize_entries(
    samples: &[SymmetricMatrix],
    positions: &[(usize, usize)],
    scatter: Option<((usize, usize), (usize, usize))>,
) -> Result<SampleBatchSummary> {
    let Some(first) = samples.first() else {
        return Ok(SampleBatchSummary::default());
    };
    let p = first.dim();
    if let Some(m) = samples.iter().find(|m| m.dim() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: m.dim(),
        });
    }
    let check = |&(i, j): &(usize, usize)| {
        if i >= p || j >= p {
            Err(Error::InvalidParameter(format!(
                "position ({}, {}) out of range for dimension {p}",
                i + 1,
                j + 1
            )))
        } else {
            Ok(())
        }
    };
    positions.iter().try_for_each(check)?;
    if let Some((a, b)) = &scatter {
        check(a)?;
        check(b)?;
    }

    let entries = positions
        .iter()
        .map(|&(i, j)| {
            let values: Vec<f64> = samples.iter().map(|m| m.get(i, j)).collect();
            let mut histogram = Histogram::new(HISTOGRAM_BINS);
            values.iter().for_each(|&x| histogram.add(x));
            EntrySummary {
                position: (i, j),
                values,
                histogram,
            }
        })
        .collect();
    let scatter = scatter
        .map(|((ai, aj), (bi, bj))| samples.iter().map(|m| (m.get(ai, aj), m.get(bi, bj))).collect())
        .unwrap_or_default();
    Ok(SampleBatchSummary { entries, scatter })
}

/// 1-based `row:column` label used in summary files.
pub fn position_label((i, j): (usize, usize)) -> String {
    format!("{}:{}", i + 1, j + 1)
}

/// `position,value` rows for every entry.
pub fn format_values_csv(summary: &SampleBatchSummary) -> String {
    let mut out = String::from("position,value\n");
    for e in &summary.entries {
        let label = position_label(e.position);
        for &x in &e.values {
            let _ = writeln!(out, "{label},{}", format_value(x));
        }
    }
    out
}

/// `position,bin_low,bin_high,count` rows. Out-of-range counts appear as bins
/// `(-inf, -1)` and `(1, inf)`.
pub fn format_histogram_csv(summary: &SampleBatchSummary) -> String {
    let mut out = String::from("position,bin_low,bin_high,count\n");
    for e in &summary.entries {
        let label = position_label(e.position);
        let h = &e.histogram;
        let _ = writeln!(out, "{label},-inf,{},{}", format_value(-1.0), h.underflow);
        for (k, &c) in h.counts.iter().enumerate() {
            let _ = writeln!(out, "{label},{},{},{c}", format_value(h.edges[k]), format_value(h.edges[k + 1]));
        }
        let _ = writeln!(out, "{label},{},inf,{}", format_value(1.0), h.overflow);
    }
    out
}

pub fn format_scatter_csv(summary: &SampleBatchSummary) -> String {
    let mut out = String::from("x,y\n");
    for &(x, y) in &summary.scatter {
        let _ = writeln!(out, "{},{}", format_value(x), format_value(y));
    }
    out
}
