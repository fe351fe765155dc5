//! Edge-list and Matrix Market import/export.
//!
//! Edge list: a header line `n <count>` followed by `src dst [weight]` lines
//! (0-indexed, whitespace separated, weight defaults to 1). Blank lines and
//! lines starting with `#` are skipped.
//!
//! Matrix Market: `coordinate` storage with `real`, `integer` or `pattern`
//! fields and `general` symmetry is read; `array real general` is read as
//! well. Writing always produces `coordinate real general`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::{adjacency, AdjacencyMatrix, DiGraph, Edge, GraphError};

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

pub fn read_edge_list<R: Read>(reader: R) -> Result<DiGraph, GraphError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 2 || fields[0] != "n" {
                    return Err(parse_err(lineno, "expected header `n <count>`"));
                }
                n = Some(fields[1].parse::<usize>().map_err(|e| parse_err(lineno, e.to_string()))?);
            }
            Some(_) => {
                if !(2..=3).contains(&fields.len()) {
                    return Err(parse_err(lineno, "expected `src dst [weight]`"));
                }
                let src = fields[0].parse().map_err(|_| parse_err(lineno, "bad source index"))?;
                let dst = fields[1].parse().map_err(|_| parse_err(lineno, "bad target index"))?;
                let weight = match fields.get(2) {
                    Some(w) => w.parse().map_err(|_| parse_err(lineno, "bad weight"))?,
                    None => 1.0,
                };
                edges.push(Edge { src, dst, weight });
            }
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing header"))?;
    DiGraph::new(n, edges)
}

pub fn write_edge_list<W: Write>(g: &DiGraph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "n {}", g.n())?;
    for e in g.edges() {
        if e.weight == 1.0 {
            writeln!(w, "{} {}", e.src, e.dst)?;
        } else {
            writeln!(w, "{} {} {:.16e}", e.src, e.dst, e.weight)?;
        }
    }
    Ok(())
}

pub fn read_matrix_market<R: Read>(reader: R) -> Result<AdjacencyMatrix, GraphError> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?.to_lowercase();
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "expected `%%MatrixMarket matrix <format> <field> <symmetry>`"));
    }
    let (format, field, symmetry) = (tokens[2], tokens[3], tokens[4]);
    if symmetry != "general" {
        return Err(parse_err(1, format!("unsupported symmetry `{symmetry}`")));
    }
    let pattern = match (format, field) {
        ("coordinate", "real" | "integer" | "double") => false,
        ("coordinate", "pattern") => true,
        ("array", "real" | "integer" | "double") => false,
        _ => return Err(parse_err(1, format!("unsupported format `{format} {field}`"))),
    };

    let mut data = lines.filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('%') => None,
        Ok(s) => Some(Ok((i + 1, s))),
        Err(e) => Some(Err(e)),
    });
    let (size_line, size) = data.next().ok_or_else(|| parse_err(0, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(size_line, "bad size line")))
        .collect::<Result<_, _>>()?;

    if format == "array" {
        let [rows, cols] = dims[..] else {
            return Err(parse_err(size_line, "array size line needs `rows cols`"));
        };
        if rows != cols {
            return Err(parse_err(size_line, "adjacency matrix must be square"));
        }
        let mut m = DMatrix::zeros(rows, cols);
        let mut k = 0;
        for item in data {
            let (lineno, s) = item?;
            for tok in s.split_whitespace() {
                if k >= rows * cols {
                    return Err(parse_err(lineno, "too many entries"));
                }
                m[(k % rows, k / rows)] = tok.parse().map_err(|_| parse_err(lineno, "bad value"))?;
                k += 1;
            }
        }
        if k != rows * cols {
            return Err(parse_err(0, "too few entries"));
        }
        return Ok(AdjacencyMatrix::new(m));
    }

    let [rows, cols, nnz] = dims[..] else {
        return Err(parse_err(size_line, "coordinate size line needs `rows cols nnz`"));
    };
    if rows != cols {
        return Err(parse_err(size_line, "adjacency matrix must be square"));
    }
    let mut m = DMatrix::zeros(rows, cols);
    let mut count = 0;
    for item in data {
        let (lineno, s) = item?;
        let f: Vec<&str> = s.split_whitespace().collect();
        let want = if pattern { 2 } else { 3 };
        if f.len() != want {
            return Err(parse_err(lineno, format!("expected {want} fields")));
        }
        let i: usize = f[0].parse().map_err(|_| parse_err(lineno, "bad row index"))?;
        let j: usize = f[1].parse().map_err(|_| parse_err(lineno, "bad column index"))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(parse_err(lineno, "index out of range"));
        }
        let v: f64 = if pattern { 1.0 } else { f[2].parse().map_err(|_| parse_err(lineno, "bad value"))? };
        m[(i - 1, j - 1)] += v;
        count += 1;
    }
    if count != nnz {
        return Err(parse_err(0, format!("expected {nnz} entries, found {count}")));
    }
    Ok(AdjacencyMatrix::new(m))
}

pub fn write_matrix_market<W: Write>(a: &AdjacencyMatrix, mut w: W) -> std::io::Result<()> {
    let m = a.matrix();
    let n = a.n();
    let entries: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter_map(|(i, j)| (m[(i, j)] != 0.0).then(|| (i, j, m[(i, j)])))
        .collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{n} {n} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Graph whose edges are the nonzero entries of `a` (weights must be positive).
pub fn graph_from_adjacency(a: &AdjacencyMatrix) -> Result<DiGraph, GraphError> {
    let m = a.matrix();
    let mut edges = Vec::new();
    for i in 0..a.n() {
        for j in 0..a.n() {
            if m[(i, j)] != 0.0 {
                edges.push(Edge { src: i, dst: j, weight: m[(i, j)] });
            }
        }
    }
    DiGraph::new(a.n(), edges)
}

fn is_matrix_market(path: &Path) -> Result<bool, GraphError> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        return Ok(true);
    }
    let mut first = String::new();
    BufReader::new(File::open(path)?).read_line(&mut first)?;
    Ok(first.trim_start().to_lowercase().starts_with("%%matrixmarket"))
}

/// Loads an adjacency matrix from an edge list or Matrix Market file.
pub fn load_adjacency(path: &Path) -> Result<AdjacencyMatrix, GraphError> {
    if is_matrix_market(path)? {
        read_matrix_market(File::open(path)?)
    } else {
        Ok(adjacency(&read_edge_list(File::open(path)?)?))
    }
}

/// Loads a graph from an edge list or Matrix Market file.
pub fn load_graph(path: &Path) -> Result<DiGraph, GraphError> {
    if is_matrix_market(path)? {
        graph_from_adjacency(&read_matrix_market(File::open(path)?)?)
    } else {
        read_edge_list(File::open(path)?)
    }
}

pub fn save_edge_list(g: &DiGraph, path: &Path) -> Result<(), GraphError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_edge_list(g, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn save_matrix_market(a: &AdjacencyMatrix, path: &Path) -> Result<(), GraphError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market(a, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi;

    #[test]
    fn edge_list_default_weight_and_comments() {
        let text = "# toy\nn 3\n0 1\n1 2 2.5\n\n2 0\n";
        let g = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.edges()[1].weight, 2.5);
        assert_eq!(g.edges()[0].weight, 1.0);
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        assert!(read_edge_list("0 1\n".as_bytes()).is_err());
        assert!(matches!(read_edge_list("n 2\n0 5\n".as_bytes()), Err(GraphError::NodeOutOfRange { .. })));
        assert!(matches!(read_edge_list("n 2\n0 1\n0 1\n".as_bytes()), Err(GraphError::DuplicateEdge { .. })));
        assert!(matches!(read_edge_list("n 2\n0 1 -1\n".as_bytes()), Err(GraphError::InvalidWeight { .. })));
    }

    #[test]
    fn formats_round_trip() {
        let g = erdos_renyi(15, 0.2, 42).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back.edges(), g.edges());

        let a = adjacency(&g);
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("%%MatrixMarket matrix coordinate real general"));
        assert_eq!(read_matrix_market(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn matrix_market_variants() {
        let pattern = "%%MatrixMarket matrix coordinate pattern general\n% c\n3 3 2\n1 2\n3 1\n";
        let a = read_matrix_market(pattern.as_bytes()).unwrap();
        assert_eq!(a.matrix()[(0, 1)], 1.0);
        assert_eq!(a.matrix()[(2, 0)], 1.0);
        let array = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n";
        let a = read_matrix_market(array.as_bytes()).unwrap();
        assert_eq!(a.matrix()[(1, 0)], 2.0);
        assert_eq!(a.matrix()[(0, 1)], 3.0);
        let sym = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1\n";
        assert!(read_matrix_market(sym.as_bytes()).is_err());
        let short = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n";
        assert!(read_matrix_market(short.as_bytes()).is_err());
    }
}
