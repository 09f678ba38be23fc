//! CSV and OBJ reading and writing.
//!
//! Numbers are written with `{:.16e}` so that files round-trip exactly and
//! compare byte for byte across runs.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use subdiv_l1::{ControlPolygon, GridMesh, Topology};

use crate::{CliError, CliResult};

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Numeric rows of a CSV file. A first row that does not parse is taken as a
/// header; `#` starts a comment line.
fn read_rows(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(_) => {
                return Err(CliError::usage(format!(
                    "{}: record {} is not numeric",
                    path.display(),
                    line + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::usage(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

/// A control polygon from a CSV file with one point per row and one column
/// per component.
pub fn read_curve_csv(path: &Path) -> CliResult<ControlPolygon<f64>> {
    let rows = read_rows(path)?;
    let dim = rows[0].len();
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(ControlPolygon::from_points(dim, data)?)
}

/// A grid from a CSV file with rows `i, j, c0, c1, ...`; every cell of the
/// `(max i + 1) x (max j + 1)` grid must appear exactly once.
pub fn read_grid_csv(path: &Path) -> CliResult<GridMesh<f64>> {
    let rows = read_rows(path)?;
    let width = rows[0].len();
    if width < 3 {
        return Err(CliError::usage(format!("{}: expected columns i, j and at least one value", path.display())));
    }
    let index = |v: f64| -> CliResult<usize> {
        if v >= 0.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
            Ok(v as usize)
        } else {
            Err(CliError::usage(format!("{}: {v} is not a grid index", path.display())))
        }
    };
    let mut cells = Vec::with_capacity(rows.len());
    for row in &rows {
        cells.push((index(row[0])?, index(row[1])?, &row[2..]));
    }
    let nrows = cells.iter().map(|c| c.0).max().unwrap_or(0) + 1;
    let ncols = cells.iter().map(|c| c.1).max().unwrap_or(0) + 1;
    let dim = width - 2;
    if cells.len() != nrows * ncols {
        return Err(CliError::usage(format!(
            "{}: {} cells for a {nrows}x{ncols} grid",
            path.display(),
            cells.len()
        )));
    }
    let mut data = vec![f64::NAN; nrows * ncols * dim];
    let mut seen = vec![false; nrows * ncols];
    for (i, j, vals) in cells {
        let k = i * ncols + j;
        if std::mem::replace(&mut seen[k], true) {
            return Err(CliError::usage(format!("{}: cell ({i}, {j}) repeated", path.display())));
        }
        data[k * dim..(k + 1) * dim].copy_from_slice(vals);
    }
    Ok(GridMesh::new(nrows, ncols, dim, data)?)
}

fn component_names(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["value".into()]
    } else {
        (0..dim).map(|c| format!("c{c}")).collect()
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::usage(format!("write failed: {e}"))
}

/// `t, value` (or `t, c0, c1, ...`) per point.
pub fn write_curve_csv<W: Write>(out: W, polygon: &ControlPolygon<f64>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend(component_names(polygon.dim()));
    w.write_record(&header).map_err(csv_err)?;
    for (i, t) in polygon.params().into_iter().enumerate() {
        let mut rec = vec![num(t)];
        rec.extend(polygon.point(i).iter().map(|&v| num(v)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::usage(format!("write failed: {e}")))
}

/// `i, j, u, v, value` (or `c0, c1, ...`) per grid point.
pub fn write_grid_csv<W: Write>(out: W, mesh: &GridMesh<f64>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["i", "j", "u", "v"].iter().map(|s| s.to_string()).collect();
    header.extend(component_names(mesh.dim()));
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..mesh.rows() {
        for j in 0..mesh.cols() {
            let (u, v) = mesh.param(i, j);
            let mut rec = vec![i.to_string(), j.to_string(), num(u), num(v)];
            rec.extend(mesh.point(i, j).iter().map(|&x| num(x)));
            w.write_record(&rec).map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| CliError::usage(format!("write failed: {e}")))
}

/// Wavefront OBJ with one vertex per grid point and quad faces.
///
/// Three-component meshes are written as is; scalar meshes become the
/// height field `(u, v, value)` and two-component meshes get `z = 0`.
/// Closed axes wrap around so a torus comes out watertight.
pub fn write_obj<W: Write>(mut out: W, mesh: &GridMesh<f64>) -> io::Result<()> {
    let (rows, cols) = (mesh.rows(), mesh.cols());
    writeln!(out, "# {rows} x {cols} grid, level {}", mesh.level)?;
    for i in 0..rows {
        for j in 0..cols {
            let p = mesh.point(i, j);
            let (u, v) = mesh.param(i, j);
            let xyz = match *p {
                [x, y, z] => [x, y, z],
                [x, y] => [x, y, 0.0],
                [h] => [u, v, h],
                _ => [p[0], p[1], p[2]],
            };
            writeln!(out, "v {} {} {}", num(xyz[0]), num(xyz[1]), num(xyz[2]))?;
        }
    }
    let wrap_i = mesh.topology[0] == Topology::Closed;
    let wrap_j = mesh.topology[1] == Topology::Closed;
    let vid = |i: usize, j: usize| (i % rows) * cols + (j % cols) + 1;
    let fi = if wrap_i { rows } else { rows.saturating_sub(1) };
    let fj = if wrap_j { cols } else { cols.saturating_sub(1) };
    for i in 0..fi {
        for j in 0..fj {
            writeln!(out, "f {} {} {} {}", vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1))?;
        }
    }
    Ok(())
}
