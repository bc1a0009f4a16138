//! VTK XML unstructured-grid output (ASCII, float64 cell data).

use crate::partition::LocalDomain;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// VTK cell type of a linear tetrahedron.
const VTK_TETRA: u8 = 10;

/// A named cell-data array with `ncomp` values per inner cell.
#[derive(Debug, Clone, Copy)]
pub struct VtuField<'a> {
    pub name: &'a str,
    pub ncomp: usize,
    pub values: &'a [f64],
}

impl<'a> VtuField<'a> {
    pub fn scalar(name: &'a str, values: &'a [f64]) -> Self {
        VtuField {
            name,
            ncomp: 1,
            values,
        }
    }

    pub fn vector(name: &'a str, values: &'a [f64]) -> Self {
        VtuField {
            name,
            ncomp: 3,
            values,
        }
    }
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidInput, msg)
}

/// Writes the inner cells of `domain` with the given cell data. Besides the
/// named fields, every file carries `cell_id` (global id) and `part`.
pub fn write_vtu(domain: &LocalDomain, fields: &[VtuField<'_>], path: &Path) -> io::Result<()> {
    let n = domain.n_inner;
    for f in fields {
        if f.values.len() < n * f.ncomp {
            return Err(invalid(format!(
                "field '{}' has {} values, need {}",
                f.name,
                f.values.len(),
                n * f.ncomp
            )));
        }
    }
    // only nodes used by inner cells, renumbered densely
    let mut used = vec![usize::MAX; domain.num_nodes()];
    let mut points = Vec::new();
    for nodes in &domain.cell_nodes {
        for &v in nodes {
            if used[v] == usize::MAX {
                used[v] = points.len();
                points.push(v);
            }
        }
    }

    let mut s = String::with_capacity(64 * (n + points.len()));
    s.push_str("<?xml version=\"1.0\"?>\n");
    s.push_str(
        "<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\" header_type=\"UInt64\">\n",
    );
    s.push_str("  <UnstructuredGrid>\n");
    let _ = writeln!(
        s,
        "    <Piece NumberOfPoints=\"{}\" NumberOfCells=\"{}\">",
        points.len(),
        n
    );
    s.push_str("      <Points>\n");
    s.push_str("        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n");
    for &v in &points {
        let p = domain.node_positions[v];
        let _ = writeln!(s, "          {} {} {}", p[0], p[1], p[2]);
    }
    s.push_str("        </DataArray>\n      </Points>\n      <Cells>\n");
    s.push_str("        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n");
    for nodes in &domain.cell_nodes {
        let c = nodes.map(|v| used[v]);
        let _ = writeln!(s, "          {} {} {} {}", c[0], c[1], c[2], c[3]);
    }
    s.push_str("        </DataArray>\n");
    s.push_str("        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n");
    write_wrapped(&mut s, (1..=n).map(|i| (4 * i).to_string()));
    s.push_str("        </DataArray>\n");
    s.push_str("        <DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n");
    write_wrapped(&mut s, (0..n).map(|_| VTK_TETRA.to_string()));
    s.push_str("        </DataArray>\n      </Cells>\n      <CellData>\n");
    for f in fields {
        let _ = writeln!(
            s,
            "        <DataArray type=\"Float64\" Name=\"{}\" NumberOfComponents=\"{}\" format=\"ascii\">",
            f.name, f.ncomp
        );
        write_wrapped(&mut s, f.values[..n * f.ncomp].iter().map(|v| format_f64(*v)));
        s.push_str("        </DataArray>\n");
    }
    s.push_str("        <DataArray type=\"Int64\" Name=\"cell_id\" format=\"ascii\">\n");
    write_wrapped(&mut s, domain.cell_global[..n].iter().map(|g| g.to_string()));
    s.push_str("        </DataArray>\n");
    s.push_str("        <DataArray type=\"Int32\" Name=\"part\" format=\"ascii\">\n");
    write_wrapped(&mut s, (0..n).map(|_| domain.part.to_string()));
    s.push_str("        </DataArray>\n");
    s.push_str("      </CellData>\n    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n");
    fs::write(path, s)
}

/// Shortest representation that parses back to the same value; VTK readers
/// accept `nan`/`inf` spelled this way.
fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

fn write_wrapped(s: &mut String, items: impl Iterator<Item = String>) {
    let mut col = 0;
    for item in items {
        if col == 0 {
            s.push_str("          ");
        } else {
            s.push(' ');
        }
        s.push_str(&item);
        col += 1;
        if col == 6 {
            s.push('\n');
            col = 0;
        }
    }
    if col != 0 {
        s.push('\n');
    }
}

/// Writes a `.pvtu` index referencing the given piece files (relative to
/// the index) that all carry `fields`.
pub fn write_pvtu(path: &Path, pieces: &[String], fields: &[(&str, usize)]) -> io::Result<()> {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\"?>\n");
    s.push_str(
        "<VTKFile type=\"PUnstructuredGrid\" version=\"1.0\" byte_order=\"LittleEndian\" header_type=\"UInt64\">\n",
    );
    s.push_str("  <PUnstructuredGrid GhostLevel=\"0\">\n");
    s.push_str("    <PPoints>\n      <PDataArray type=\"Float64\" NumberOfComponents=\"3\"/>\n    </PPoints>\n");
    s.push_str("    <PCellData>\n");
    for (name, ncomp) in fields {
        let _ = writeln!(
            s,
            "      <PDataArray type=\"Float64\" Name=\"{name}\" NumberOfComponents=\"{ncomp}\"/>"
        );
    }
    s.push_str("      <PDataArray type=\"Int64\" Name=\"cell_id\"/>\n");
    s.push_str("      <PDataArray type=\"Int32\" Name=\"part\"/>\n");
    s.push_str("    </PCellData>\n");
    for p in pieces {
        let _ = writeln!(s, "    <Piece Source=\"{p}\"/>");
    }
    s.push_str("  </PUnstructuredGrid>\n</VTKFile>\n");
    let mut f = fs::File::create(path)?;
    f.write_all(s.as_bytes())
}

/// File name of partition `part`'s piece of snapshot `stem`.
pub fn piece_name(stem: &str, part: usize, num_parts: usize) -> String {
    if num_parts == 1 {
        format!("{stem}.vtu")
    } else {
        format!("{stem}_p{part}.vtu")
    }
}

/// Writes this partition's piece of snapshot `stem` into `dir`; partition 0
/// also writes `stem.pvtu` when there is more than one partition. Returns
/// the path a viewer should open.
pub fn write_snapshot(
    domain: &LocalDomain,
    fields: &[VtuField<'_>],
    dir: &Path,
    stem: &str,
) -> io::Result<PathBuf> {
    let k = domain.num_parts;
    write_vtu(domain, fields, &dir.join(piece_name(stem, domain.part, k)))?;
    if k == 1 {
        return Ok(dir.join(format!("{stem}.vtu")));
    }
    let index = dir.join(format!("{stem}.pvtu"));
    if domain.part == 0 {
        let pieces: Vec<String> = (0..k).map(|p| piece_name(stem, p, k)).collect();
        let names: Vec<(&str, usize)> = fields.iter().map(|f| (f.name, f.ncomp)).collect();
        write_pvtu(&index, &pieces, &names)?;
    }
    Ok(index)
}

/// A cell-data array read back from a `.vtu` file.
#[derive(Debug, Clone, PartialEq)]
pub struct CellArray {
    pub ncomp: usize,
    pub values: Vec<f64>,
}

/// Minimal reader for files written by [`write_vtu`]: returns the piece's
/// point and cell counts and every cell-data array by name.
pub fn read_vtu_cell_data(path: &Path) -> io::Result<(usize, usize, BTreeMap<String, CellArray>)> {
    let text = fs::read_to_string(path)?;
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {m}", path.display()));
    let piece = text.find("<Piece ").ok_or_else(|| bad("no Piece element"))?;
    let tag_end = piece + text[piece..].find('>').ok_or_else(|| bad("unterminated Piece"))?;
    let tag = &text[piece..tag_end];
    let points: usize = attribute(tag, "NumberOfPoints")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad("missing NumberOfPoints"))?;
    let cells: usize = attribute(tag, "NumberOfCells")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad("missing NumberOfCells"))?;
    let start = text.find("<CellData>").ok_or_else(|| bad("no CellData"))?;
    let end = text.find("</CellData>").ok_or_else(|| bad("unterminated CellData"))?;
    let mut rest = &text[start..end];
    let mut out = BTreeMap::new();
    while let Some(open) = rest.find("<DataArray") {
        let close_tag = open + rest[open..].find('>').ok_or_else(|| bad("unterminated DataArray"))?;
        let tag = &rest[open..close_tag];
        let name = attribute(tag, "Name").ok_or_else(|| bad("DataArray without Name"))?;
        let ncomp = attribute(tag, "NumberOfComponents")
            .map(|v| v.parse().map_err(|_| bad("bad NumberOfComponents")))
            .transpose()?
            .unwrap_or(1);
        let body_end = close_tag
            + rest[close_tag..]
                .find("</DataArray>")
                .ok_or_else(|| bad("unterminated DataArray"))?;
        let values = rest[close_tag + 1..body_end]
            .split_whitespace()
            .map(|w| w.parse::<f64>().map_err(|_| bad(&format!("bad number '{w}' in {name}"))))
            .collect::<io::Result<Vec<f64>>>()?;
        if values.len() != cells * ncomp {
            return Err(bad(&format!(
                "array {name} has {} values, expected {}",
                values.len(),
                cells * ncomp
            )));
        }
        out.insert(name.to_string(), CellArray { ncomp, values });
        rest = &rest[body_end..];
    }
    Ok((points, cells, out))
}

fn attribute<'a>(tag: &'a str, name: &str) -> Option<&'a str> {
    let key = format!(" {name}=\"");
    let at = tag.find(&key)? + key.len();
    let len = tag[at..].find('"')?;
    Some(&tag[at..at + len])
}
