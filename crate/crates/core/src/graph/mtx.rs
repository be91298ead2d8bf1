//! Matrix Market coordinate-format ingestion and export.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::WeightedGraph;
use crate::{Error, Result, Scalar};

/// How off-diagonal matrix entries are turned into edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MtxMode {
    /// Weight `|a_ij|`, symmetrised as `(W + W^T) / 2`.
    #[default]
    Abs,
    /// The file already holds a Laplacian: weights are `-a_ij`, which must be
    /// non-negative, and every row must be diagonally dominant.
    LaplacianDirect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

pub fn load_matrix_market<T: Scalar>(path: impl AsRef<Path>, mode: MtxMode) -> Result<WeightedGraph<T>> {
    let file = File::open(path)?;
    read_matrix_market(BufReader::new(file), mode)
}

pub fn read_matrix_market<T: Scalar, R: Read>(reader: R, mode: MtxMode) -> Result<WeightedGraph<T>> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line_no, header) = match lines.next() {
        Some((no, l)) => (no, l?),
        None => return Err(parse_err(1, "empty file")),
    };
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(line_no, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(line_no, "only coordinate format is supported"));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(line_no, &format!("unsupported field type '{other}'"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(line_no, &format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    // (min, max) -> sum over directed entries; diagonal kept separately.
    let mut offdiag: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut diagonal: BTreeMap<usize, f64> = BTreeMap::new();
    let mut seen = 0usize;

    for (no, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let Some((rows, cols, _)) = size else {
            if fields.len() != 3 {
                return Err(parse_err(no, "expected 'rows cols nnz' size line"));
            }
            let parsed: Vec<usize> = fields
                .iter()
                .map(|f| {
                    f.parse::<usize>()
                        .map_err(|_| parse_err(no, &format!("bad size field '{f}'")))
                })
                .collect::<Result<_>>()?;
            if parsed[0] != parsed[1] {
                return Err(Error::NonSquare {
                    rows: parsed[0],
                    cols: parsed[1],
                });
            }
            size = Some((parsed[0], parsed[1], parsed[2]));
            continue;
        };
        let expected = if field == Field::Pattern { 2 } else { 3 };
        if fields.len() < expected {
            return Err(parse_err(no, "truncated entry"));
        }
        let i: usize = fields[0].parse().map_err(|_| parse_err(no, "bad row index"))?;
        let j: usize = fields[1].parse().map_err(|_| parse_err(no, "bad column index"))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(parse_err(no, &format!("index ({i}, {j}) out of range")));
        }
        let value = match field {
            Field::Pattern => 1.0,
            _ => fields[2]
                .parse::<f64>()
                .map_err(|_| parse_err(no, &format!("bad value '{}'", fields[2])))?,
        };
        if !value.is_finite() {
            return Err(parse_err(no, "non-finite value"));
        }
        seen += 1;
        let (i, j) = (i - 1, j - 1);
        if i == j {
            *diagonal.entry(i).or_default() += value;
            continue;
        }
        // A symmetric file lists each pair once; count it for both directions.
        let copies = if symmetric { 2.0 } else { 1.0 };
        *offdiag.entry((i.min(j), i.max(j))).or_default() += copies * value_for(mode, value, no)?;
    }

    let Some((n, _, nnz)) = size else {
        return Err(parse_err(1, "missing size line"));
    };
    if seen != nnz {
        return Err(parse_err(0, &format!("header announces {nnz} entries, found {seen}")));
    }
    if n == 0 || offdiag.values().all(|&w| w == 0.0) {
        return Err(Error::EmptyGraph);
    }

    if mode == MtxMode::LaplacianDirect {
        let mut row_sums = vec![0.0f64; n];
        for (&(i, j), &w) in &offdiag {
            row_sums[i] += w / 2.0;
            row_sums[j] += w / 2.0;
        }
        for (i, &s) in row_sums.iter().enumerate() {
            let d = diagonal.get(&i).copied().unwrap_or(0.0);
            if d + 1e-12 * d.abs().max(1.0) < s {
                return Err(Error::InvalidGraph(format!(
                    "row {} is not diagonally dominant ({d} < {s})",
                    i + 1
                )));
            }
        }
    }

    WeightedGraph::new(n, offdiag.into_iter().map(|((i, j), w)| (i, j, T::lit(w / 2.0))))
}

fn value_for(mode: MtxMode, value: f64, line: usize) -> Result<f64> {
    match mode {
        MtxMode::Abs => Ok(value.abs()),
        MtxMode::LaplacianDirect => {
            if value > 0.0 {
                Err(parse_err(line, "positive off-diagonal entry in a Laplacian"))
            } else {
                Ok(-value)
            }
        }
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

/// Writes the adjacency matrix `W` as a symmetric real coordinate file
/// (lower triangle, 1-based).
pub fn write_matrix_market<T: Scalar, W: Write>(graph: &WeightedGraph<T>, mut out: W) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{} {} {}", graph.n(), graph.n(), graph.edges().len())?;
    for &(i, j, w) in graph.edges() {
        writeln!(out, "{} {} {:e}", j + 1, i + 1, w.to_f64_lossy())?;
    }
    Ok(())
}
