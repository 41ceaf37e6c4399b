//! File formats: dense CSV matrices, whitespace edge lists, JSON reports.
//! Writes go through a temp-file-then-rename step so readers never observe
//! partial files.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::graph::{ShiftKind, ShiftOperator};
use crate::workbench::{Edge, WorkbenchError};
use crate::Mat64;

/// How to turn a loaded weight/graph file into a shift operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsoChoice {
    /// Use the matrix as the shift operator directly.
    Matrix,
    Adjacency,
    Laplacian,
    NormalizedLaplacian,
}

fn parse_err(path: &Path, message: impl Into<String>) -> WorkbenchError {
    WorkbenchError::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Reads a dense CSV matrix; a single leading header row is skipped when
/// its first field is not numeric.
pub fn read_matrix_csv(path: &Path) -> Result<Mat64, WorkbenchError> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        match parsed {
            Ok(vals) => rows.push(vals),
            Err(e) => {
                if idx == 0 {
                    continue; // header row
                }
                return Err(parse_err(path, format!("line {}: {e}", idx + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(parse_err(path, "no numeric rows"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(parse_err(path, "rows have inconsistent lengths"));
    }
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    Mat64::new(data.len() / cols, cols, data).map_err(|e| parse_err(path, e.to_string()))
}

pub fn write_matrix_csv(path: &Path, matrix: &Mat64) -> Result<(), WorkbenchError> {
    let mut out = String::new();
    for i in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// Reads a one-value-per-line (or single-row) CSV vector.
pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>, WorkbenchError> {
    let m = read_matrix_csv(path)?;
    if m.cols() == 1 {
        Ok(m.column(0))
    } else if m.rows() == 1 {
        Ok(m.row(0).to_vec())
    } else {
        Err(parse_err(path, format!("expected a vector, got {}x{}", m.rows(), m.cols())))
    }
}

pub fn write_vector_csv(path: &Path, values: &[f64]) -> Result<(), WorkbenchError> {
    let mut out = String::new();
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    write_atomic(path, &out)
}

/// Reads a whitespace-separated edge list (`u v weight`, 0-indexed) into a
/// symmetric weight matrix. Lines starting with `#` are comments.
pub fn read_edge_list(path: &Path) -> Result<Mat64, WorkbenchError> {
    let text = fs::read_to_string(path)?;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_node = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(
                path,
                format!("line {}: expected `u v weight`, got {} fields", idx + 1, toks.len()),
            ));
        }
        let u: usize = toks[0]
            .parse()
            .map_err(|e| parse_err(path, format!("line {}: {e}", idx + 1)))?;
        let v: usize = toks[1]
            .parse()
            .map_err(|e| parse_err(path, format!("line {}: {e}", idx + 1)))?;
        let w: f64 = toks[2]
            .parse()
            .map_err(|e| parse_err(path, format!("line {}: {e}", idx + 1)))?;
        max_node = max_node.max(u).max(v);
        edges.push((u, v, w));
    }
    if edges.is_empty() {
        return Err(parse_err(path, "no edges"));
    }
    let n = max_node + 1;
    let mut weights = Mat64::zeros(n, n);
    for (u, v, w) in edges {
        weights[(u, v)] = w;
        weights[(v, u)] = w;
    }
    Ok(weights)
}

/// Loads a graph file, dispatching on extension: `.edges` for edge lists
/// (adjacency shift by default), `.csv` for dense matrices (used verbatim
/// as the shift by default).
pub fn load_graph(path: &Path, choice: Option<GsoChoice>) -> Result<ShiftOperator<f64>, WorkbenchError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let (matrix, default_choice) = match ext.as_str() {
        "edges" => (read_edge_list(path)?, GsoChoice::Adjacency),
        "csv" => (read_matrix_csv(path)?, GsoChoice::Matrix),
        other => {
            return Err(parse_err(
                path,
                format!("unknown graph extension `{other}` (expected .edges or .csv)"),
            ))
        }
    };
    let shift = match choice.unwrap_or(default_choice) {
        GsoChoice::Matrix => ShiftOperator::from_matrix(matrix, ShiftKind::Custom)?,
        GsoChoice::Adjacency => ShiftOperator::from_adjacency(matrix)?,
        GsoChoice::Laplacian => ShiftOperator::laplacian(matrix)?,
        GsoChoice::NormalizedLaplacian => ShiftOperator::normalized_laplacian(matrix)?,
    };
    Ok(shift)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), WorkbenchError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| parse_err(path, format!("serialization failed: {e}")))?;
    write_atomic(path, &(text + "\n"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, WorkbenchError> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))
}

/// Writes a thresholded edge list as `u,v,weight` rows with a header.
pub fn write_edges_csv(path: &Path, edges: &[Edge]) -> Result<(), WorkbenchError> {
    let mut out = String::from("u,v,weight\n");
    for e in edges {
        out.push_str(&format!("{},{},{}\n", e.u, e.v, e.weight));
    }
    write_atomic(path, &out)
}

/// Write-then-rename so concurrent readers never see a torn file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), WorkbenchError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = Path::new(&tmp);
    fs::write(tmp_path, contents)?;
    fs::rename(tmp_path, path)?;
    Ok(())
}
