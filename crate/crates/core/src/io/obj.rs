//! Minimal Wavefront OBJ: `v` and `f` carry geometry; `o`, `g` and `usemtl`
//! become element group annotations. Normals, texture coordinates, lines
//! and every other directive are skipped.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{ElementGroup, GroupKind, LoadedMesh};
use crate::error::{Error, Result};
use crate::mesh::{ensure_valid, Mesh};

const DEFAULT_ARITY: usize = 3;
const MAX_FACE_ARITY: usize = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ObjOptions {
    /// Vertex dimension to produce: 2 drops `z`, 3 pads a missing `z` with
    /// zero. `None` picks 3 if any `v` line has a `z`, else 2.
    pub dim: Option<usize>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

#[derive(Default)]
struct Groups {
    open: HashMap<&'static str, Vec<(String, usize)>>,
    done: Vec<ElementGroup>,
}

impl Groups {
    fn kind_of(tag: &'static str) -> GroupKind {
        match tag {
            "o" => GroupKind::Object,
            "g" => GroupKind::Group,
            _ => GroupKind::Material,
        }
    }

    fn close(&mut self, tag: &'static str, at: usize) {
        for (name, start) in self.open.remove(tag).unwrap_or_default() {
            if start < at {
                self.done.push(ElementGroup { kind: Groups::kind_of(tag), name, elements: start..at });
            }
        }
    }

    fn start(&mut self, tag: &'static str, names: Vec<String>, at: usize) {
        self.close(tag, at);
        self.open.insert(tag, names.into_iter().map(|n| (n, at)).collect());
    }

    fn finish(mut self, at: usize) -> Vec<ElementGroup> {
        for tag in ["o", "g", "usemtl"] {
            self.close(tag, at);
        }
        self.done.sort_by_key(|g| g.elements.start);
        self.done
    }
}

fn resolve_index(token: &str, vertex_count: usize, line: usize) -> Result<u32> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head
        .parse()
        .map_err(|_| parse_err(line, format!("bad vertex reference {token:?}")))?;
    let resolved = match raw {
        0 => return Err(parse_err(line, "vertex index 0 is not valid in OBJ")),
        r if r > 0 => r - 1,
        r => vertex_count as i64 + r,
    };
    if resolved < 0 || resolved >= vertex_count as i64 {
        return Err(parse_err(
            line,
            format!("vertex reference {raw} out of range ({vertex_count} vertices so far)"),
        ));
    }
    Ok(resolved as u32)
}

/// Parses OBJ text.
pub fn parse_obj<R: BufRead>(reader: R, options: &ObjOptions) -> Result<LoadedMesh> {
    if let Some(d) = options.dim {
        if d != 2 && d != 3 {
            return Err(Error::ObjDimension(d));
        }
    }
    let mut points: Vec<[f32; 3]> = Vec::new();
    let mut any_z = false;
    let mut indices: Vec<u32> = Vec::new();
    let mut arity: Option<usize> = None;
    let mut groups = Groups::default();

    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let line = line.split('#').next().unwrap_or("");
        let mut tokens = line.split_whitespace();
        let Some(tag) = tokens.next() else { continue };
        let elements_so_far = arity.map_or(0, |k| indices.len() / k);
        match tag {
            "v" => {
                let mut p = [0.0f32; 3];
                let mut count = 0;
                for tok in tokens {
                    let value: f32 = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad coordinate {tok:?}")))?;
                    if count < 3 {
                        p[count] = value;
                    }
                    count += 1;
                }
                if count < 2 {
                    return Err(parse_err(line_no, "vertex needs at least two coordinates"));
                }
                any_z |= count >= 3;
                points.push(p);
            }
            "f" => {
                let refs: Vec<&str> = tokens.collect();
                if refs.len() < 3 {
                    return Err(parse_err(line_no, "face needs at least three vertices"));
                }
                if refs.len() > MAX_FACE_ARITY {
                    return Err(parse_err(
                        line_no,
                        format!("faces with {} vertices are not supported (max {MAX_FACE_ARITY})", refs.len()),
                    ));
                }
                match arity {
                    None => arity = Some(refs.len()),
                    Some(k) if k != refs.len() => {
                        return Err(parse_err(
                            line_no,
                            format!("face has {} vertices but earlier faces have {k}", refs.len()),
                        ))
                    }
                    _ => {}
                }
                for r in refs {
                    indices.push(resolve_index(r, points.len(), line_no)?);
                }
            }
            "o" | "g" | "usemtl" => {
                let tag = match tag {
                    "o" => "o",
                    "g" => "g",
                    _ => "usemtl",
                };
                let mut names: Vec<String> = tokens.map(str::to_owned).collect();
                if names.is_empty() {
                    names.push("default".to_owned());
                }
                groups.start(tag, names, elements_so_far);
            }
            _ => {}
        }
    }

    let dim = options.dim.unwrap_or(if any_z { 3 } else { 2 });
    let coords = points.iter().flat_map(|p| p[..dim].iter().copied()).collect();
    let arity = arity.unwrap_or(DEFAULT_ARITY);
    let mesh = Mesh::new(dim, arity, coords, indices)?;
    let groups = groups.finish(mesh.element_count());
    Ok(LoadedMesh { mesh, groups })
}

pub fn read_obj(path: &Path, options: &ObjOptions) -> Result<LoadedMesh> {
    parse_obj(super::open(path)?, options)
}

/// Writes `v` lines then 1-based `f` lines. Coordinates use the shortest
/// decimal that parses back to the same `f32`.
pub fn write_obj_to<W: Write>(mesh: &Mesh, mut out: W) -> Result<()> {
    if mesh.dim() != 2 && mesh.dim() != 3 {
        return Err(Error::ObjDimension(mesh.dim()));
    }
    ensure_valid(mesh)?;
    writeln!(out, "# {} vertices, {} elements", mesh.vertex_count(), mesh.element_count())?;
    for v in mesh.vertices() {
        write!(out, "v")?;
        for c in v {
            write!(out, " {c}")?;
        }
        writeln!(out)?;
    }
    for e in mesh.elements() {
        write!(out, "f")?;
        for i in e {
            write!(out, " {}", i + 1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_obj(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut w = super::create(path)?;
    write_obj_to(mesh, &mut w)?;
    super::finish(w, path.to_path_buf())
}
