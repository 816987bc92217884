//! Text formats: matrix JSON and CSV, circulant generators, operator
//! families and tree edge lists.
//!
//! Numbers are written with 17 significant digits in scientific notation,
//! which round-trips every finite double exactly.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::circulant::Circulant;
use crate::error::{Error, Result};
use crate::graphdist::WeightedTree;
use crate::matrix::{Matrix, C64};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Fixed-width scientific rendering, 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_pairs(out: &mut String, values: &[C64]) {
    for (k, z) in values.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "[{}, {}]", format_f64(z.re), format_f64(z.im));
    }
}

/// `{"rows": m, "cols": n, "data": [[re, im], …]}`, one matrix row per line.
pub fn matrix_to_json(a: &Matrix) -> String {
    let mut out = format!("{{\"rows\": {}, \"cols\": {}, \"data\": [\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        out.push_str("  ");
        push_pairs(&mut out, a.row(i));
        out.push_str(if i + 1 < a.rows() { ",\n" } else { "\n" });
    }
    out.push_str("]}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl MatrixDoc {
    fn into_matrix(self) -> Result<Matrix> {
        let data = self.data.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        Matrix::new(self.rows, self.cols, data)
    }
}

pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| perr(format!("matrix JSON: {e}")))?;
    doc.into_matrix()
}

/// Renders `a+bi` / `a-bi`; the sign of a negative zero imaginary part is kept.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_f64(z.re), sign, format_f64(z.im.abs()))
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, `a+i`), with optional
/// exponents in either part.
pub fn parse_complex(s: &str) -> Result<C64> {
    let s = s.trim();
    let real = |t: &str| t.parse::<f64>().map_err(|_| perr(format!("bad number {t:?} in {s:?}")));
    let z = match s.strip_suffix('i') {
        Some(body) => parse_imaginary(body, real)?,
        None => C64::new(real(s)?, 0.0),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(perr(format!("non-finite literal {s:?}")));
    }
    Ok(z)
}

fn parse_imaginary(body: &str, real: impl Fn(&str) -> Result<f64>) -> Result<C64> {
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(t),
    };
    Ok(match split {
        Some(p) => C64::new(real(&body[..p])?, imag(&body[p..])?),
        None => C64::new(0.0, imag(body)?),
    })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Comma-separated complex literals.
pub fn parse_generator(s: &str) -> Result<Vec<C64>> {
    s.split(',').map(parse_complex).collect()
}

pub fn matrix_to_csv(a: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|&z| format_complex(z)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// One matrix row per line; blank lines and `#` comments are skipped.
pub fn matrix_from_csv(text: &str) -> Result<Matrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line_no, line) in content_lines(text) {
        let row = parse_generator(line).map_err(|e| perr(format!("line {line_no}: {e}")))?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(perr(format!("line {line_no}: {} entries, expected {c}", row.len())))
            }
            _ => {}
        }
        data.extend(row);
        rows += 1;
    }
    Matrix::new(rows, cols.unwrap_or(0), data)
}

/// Reads JSON when the text starts with `{`, CSV otherwise.
pub fn matrix_from_str(text: &str) -> Result<Matrix> {
    if text.trim_start().starts_with('{') {
        matrix_from_json(text)
    } else {
        matrix_from_csv(text)
    }
}

/// `{"n": n, "gen": [[re, im], …]}`.
pub fn circulant_to_json(gen: &[C64]) -> String {
    let mut out = format!("{{\"n\": {}, \"gen\": [", gen.len());
    push_pairs(&mut out, gen);
    out.push_str("]}\n");
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CirculantDoc {
    n: usize,
    gen: Vec<[f64; 2]>,
}

pub fn circulant_from_json(text: &str) -> Result<Circulant> {
    let doc: CirculantDoc = serde_json::from_str(text).map_err(|e| perr(format!("circulant JSON: {e}")))?;
    if doc.gen.len() != doc.n {
        return Err(perr(format!("circulant JSON: n = {} but {} entries", doc.n, doc.gen.len())));
    }
    Circulant::new(doc.gen.into_iter().map(|[re, im]| C64::new(re, im)).collect())
}

pub fn family_to_json(members: &[Matrix]) -> String {
    let parts: Vec<String> = members.iter().map(|m| matrix_to_json(m).trim_end().to_string()).collect();
    format!("[\n{}\n]\n", parts.join(",\n"))
}

pub fn family_from_json(text: &str) -> Result<Vec<Matrix>> {
    let docs: Vec<MatrixDoc> = serde_json::from_str(text).map_err(|e| perr(format!("family JSON: {e}")))?;
    docs.into_iter().map(MatrixDoc::into_matrix).collect()
}

/// Lines `i,j,w` with 1-based vertices. A leading header line such as
/// `i,j,w` is skipped.
pub fn tree_from_csv(text: &str) -> Result<WeightedTree> {
    let mut edges = Vec::new();
    for (k, (line_no, line)) in content_lines(text).enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if k == 0 && fields.first().is_some_and(|f| f.parse::<usize>().is_err()) {
            continue;
        }
        let [i, j, w] = fields[..] else {
            return Err(perr(format!("line {line_no}: expected i,j,w")));
        };
        let vertex = |t: &str| t.parse::<usize>().map_err(|_| perr(format!("line {line_no}: bad vertex {t:?}")));
        let w: f64 = w.parse().map_err(|_| perr(format!("line {line_no}: bad weight {w:?}")))?;
        edges.push((vertex(i)?, vertex(j)?, w));
    }
    WeightedTree::from_edges(edges)
}

pub fn tree_to_csv(tree: &WeightedTree) -> String {
    let mut out = String::from("i,j,w\n");
    for &(i, j, w) in tree.edges() {
        let _ = writeln!(out, "{i},{j},{}", format_f64(w));
    }
    out
}
