//! gmsh MSH 2.2 ASCII reader and writer.

use super::{Mesh, MeshError};
use crate::vec3::Vec3;
use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

const TRIANGLE: usize = 2;
const TETRAHEDRON: usize = 4;
const LINE: usize = 1;
const POINT: usize = 15;

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<Option<String>, MeshError> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            let t = l.trim();
            if !t.is_empty() {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    }

    fn expect_line(&mut self, section: &str) -> Result<String, MeshError> {
        self.next_line()?
            .ok_or_else(|| self.error(section, "unexpected end of file"))
    }

    fn error(&self, section: &str, msg: impl Into<String>) -> MeshError {
        MeshError::Parse {
            section: section.to_string(),
            line: self.line,
            msg: msg.into(),
        }
    }

    fn expect_end(&mut self, section: &str) -> Result<(), MeshError> {
        let l = self.expect_line(section)?;
        let end = format!("$End{}", &section[1..]);
        if l != end {
            return Err(self.error(
                section,
                format!("expected `{end}`, found `{l}` (entry count mismatch?)"),
            ));
        }
        Ok(())
    }

    fn count(&mut self, section: &str) -> Result<usize, MeshError> {
        let l = self.expect_line(section)?;
        l.parse()
            .map_err(|_| self.error(section, format!("bad entry count `{l}`")))
    }
}

fn parse_num<T: std::str::FromStr>(
    lines: &Lines<impl BufRead>,
    section: &str,
    tok: Option<&str>,
) -> Result<T, MeshError> {
    let tok = tok.ok_or_else(|| lines.error(section, "truncated entry"))?;
    tok.parse()
        .map_err(|_| lines.error(section, format!("cannot parse `{tok}`")))
}

/// Reads a gmsh MSH 2.2 ASCII file. Nodes are re-indexed densely in file
/// order; tetrahedra become cells and triangles become tagged boundary
/// triangles named after their physical group. Points and lines are skipped,
/// any other element type is rejected.
///
/// The returned mesh has nodes and cells only; run
/// [`super::build_connectivity`], [`super::compute_geometry`] and
/// [`super::build_diamonds`] (or use [`Mesh::read_msh`]) to complete it.
pub fn parse_msh(source: impl BufRead) -> Result<Mesh, MeshError> {
    let mut lines = Lines {
        inner: source.lines(),
        line: 0,
    };
    let mut physical_names: BTreeMap<usize, String> = BTreeMap::new();
    let mut node_index: HashMap<usize, usize> = HashMap::new();
    let mut positions: Vec<Vec3> = Vec::new();
    let mut tets: Vec<[usize; 4]> = Vec::new();
    let mut tris: Vec<([usize; 3], usize)> = Vec::new();
    let mut seen_format = false;

    while let Some(header) = lines.next_line()? {
        match header.as_str() {
            "$MeshFormat" => {
                let sec = "$MeshFormat";
                let l = lines.expect_line(sec)?;
                let mut it = l.split_whitespace();
                let version = it.next().unwrap_or("");
                let file_type = it.next().unwrap_or("");
                if !version.starts_with("2.") {
                    return Err(MeshError::Unsupported(format!(
                        "MSH version {version}; only ASCII 2.2 is supported"
                    )));
                }
                if file_type != "0" {
                    return Err(MeshError::Unsupported(
                        "binary MSH; only ASCII 2.2 is supported".into(),
                    ));
                }
                lines.expect_end(sec)?;
                seen_format = true;
            }
            "$PhysicalNames" => {
                let sec = "$PhysicalNames";
                let n = lines.count(sec)?;
                for _ in 0..n {
                    let l = lines.expect_line(sec)?;
                    let mut it = l.splitn(3, char::is_whitespace);
                    let _dim: usize = parse_num(&lines, sec, it.next())?;
                    let tag: usize = parse_num(&lines, sec, it.next())?;
                    let name = it
                        .next()
                        .ok_or_else(|| lines.error(sec, "missing name"))?
                        .trim()
                        .trim_matches('"')
                        .to_string();
                    physical_names.insert(tag, name);
                }
                lines.expect_end(sec)?;
            }
            "$Nodes" => {
                let sec = "$Nodes";
                let n = lines.count(sec)?;
                positions.reserve(n);
                for _ in 0..n {
                    let l = lines.expect_line(sec)?;
                    let mut it = l.split_whitespace();
                    let id: usize = parse_num(&lines, sec, it.next())?;
                    let mut p = [0.0; 3];
                    for x in p.iter_mut() {
                        *x = parse_num(&lines, sec, it.next())?;
                    }
                    if p.iter().any(|x: &f64| !x.is_finite()) {
                        return Err(lines.error(sec, format!("non-finite node {id}")));
                    }
                    if node_index.insert(id, positions.len()).is_some() {
                        return Err(lines.error(sec, format!("duplicate node id {id}")));
                    }
                    positions.push(p);
                }
                lines.expect_end(sec)?;
            }
            "$Elements" => {
                let sec = "$Elements";
                let n = lines.count(sec)?;
                for _ in 0..n {
                    let l = lines.expect_line(sec)?;
                    if l.starts_with('$') {
                        return Err(lines.error(
                            sec,
                            format!("entry count mismatch: declared {n}, found `{l}` early"),
                        ));
                    }
                    let mut it = l.split_whitespace();
                    let id: usize = parse_num(&lines, sec, it.next())?;
                    let kind: usize = parse_num(&lines, sec, it.next())?;
                    let ntags: usize = parse_num(&lines, sec, it.next())?;
                    let mut tags = Vec::with_capacity(ntags);
                    for _ in 0..ntags {
                        tags.push(parse_num::<i64>(&lines, sec, it.next())?);
                    }
                    let nn = match kind {
                        TETRAHEDRON => 4,
                        TRIANGLE => 3,
                        LINE | POINT => continue,
                        _ => return Err(MeshError::UnknownElement { element: id, kind }),
                    };
                    let mut ids = [0usize; 4];
                    for slot in ids.iter_mut().take(nn) {
                        let raw: usize = parse_num(&lines, sec, it.next())?;
                        *slot = *node_index
                            .get(&raw)
                            .ok_or(MeshError::MissingNode { element: id, node: raw })?;
                    }
                    if kind == TETRAHEDRON {
                        tets.push(ids);
                    } else {
                        let phys = tags.first().copied().unwrap_or(0).max(0) as usize;
                        tris.push(([ids[0], ids[1], ids[2]], phys));
                    }
                }
                lines.expect_end(sec)?;
            }
            other if other.starts_with("$End") => {
                return Err(lines.error("file", format!("unexpected `{other}`")));
            }
            other if other.starts_with('$') => {
                // skip sections we do not interpret
                let end = format!("$End{}", &other[1..]);
                loop {
                    let l = lines.expect_line(other)?;
                    if l == end {
                        break;
                    }
                }
            }
            other => {
                return Err(lines.error("file", format!("expected section header, found `{other}`")));
            }
        }
    }
    if !seen_format {
        return Err(MeshError::Parse {
            section: "$MeshFormat".into(),
            line: lines.line,
            msg: "missing section".into(),
        });
    }

    // physical tags -> dense patch ids, ordered by tag
    let mut tags: Vec<usize> = tris.iter().map(|t| t.1).collect();
    tags.sort_unstable();
    tags.dedup();
    let patch_names: Vec<String> = tags
        .iter()
        .map(|t| physical_names.get(t).cloned().unwrap_or_else(|| t.to_string()))
        .collect();
    let tris = tris
        .into_iter()
        .map(|(n, t)| (n, tags.binary_search(&t).unwrap_or(0)))
        .collect();
    Mesh::from_raw(positions, tets, tris, patch_names)
}

impl Mesh {
    /// [`parse_msh`] followed by connectivity, geometry and diamonds.
    pub fn read_msh(source: impl BufRead) -> Result<Mesh, MeshError> {
        let mut mesh = parse_msh(source)?;
        mesh.finish()?;
        Ok(mesh)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Mesh, MeshError> {
        let f = std::fs::File::open(path.as_ref())?;
        Mesh::read_msh(std::io::BufReader::new(f))
    }
}

/// Writes the mesh as MSH 2.2 ASCII with one physical group per patch
/// (physical tags `1..`) and the cells in physical volume `patches + 1`.
pub fn write_msh(mesh: &Mesh, mut out: impl Write) -> Result<(), MeshError> {
    writeln!(out, "$MeshFormat\n2.2 0 8\n$EndMeshFormat")?;
    let vol_tag = mesh.patch_names.len() + 1;
    writeln!(out, "$PhysicalNames\n{}", mesh.patch_names.len() + 1)?;
    for (i, name) in mesh.patch_names.iter().enumerate() {
        writeln!(out, "2 {} \"{}\"", i + 1, name)?;
    }
    writeln!(out, "3 {vol_tag} \"domain\"\n$EndPhysicalNames")?;
    writeln!(out, "$Nodes\n{}", mesh.nodes.len())?;
    for n in &mesh.nodes {
        let p = n.position;
        writeln!(out, "{} {:?} {:?} {:?}", n.id + 1, p[0], p[1], p[2])?;
    }
    writeln!(out, "$EndNodes")?;
    let boundary: Vec<_> = mesh.faces.iter().filter(|f| f.is_boundary()).collect();
    let tris: Vec<([usize; 3], usize)> = if boundary.is_empty() {
        mesh.tagged_triangles.clone()
    } else {
        boundary
            .iter()
            .map(|f| (f.node_ids, f.patch.unwrap_or(0)))
            .collect()
    };
    writeln!(out, "$Elements\n{}", tris.len() + mesh.cells.len())?;
    let mut id = 1;
    for (n, p) in &tris {
        writeln!(out, "{id} 2 2 {} {} {} {} {}", p + 1, p + 1, n[0] + 1, n[1] + 1, n[2] + 1)?;
        id += 1;
    }
    for c in &mesh.cells {
        let n = c.node_ids;
        writeln!(
            out,
            "{id} 4 2 {vol_tag} {vol_tag} {} {} {} {}",
            n[0] + 1,
            n[1] + 1,
            n[2] + 1,
            n[3] + 1
        )?;
        id += 1;
    }
    writeln!(out, "$EndElements")?;
    Ok(())
}
