//! Mesh files: Wavefront OBJ (text) and `.rmx` (little-endian binary).

mod bin;
mod obj;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

pub use bin::{decode_bin, encode_bin, read_bin, write_bin, BIN_HEADER_LEN, BIN_MAGIC};
pub use obj::{parse_obj, read_obj, write_obj, write_obj_to, ObjOptions};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFileFormat {
    Obj,
    Bin,
}

impl MeshFileFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("obj") => Ok(MeshFileFormat::Obj),
            Some("rmx") => Ok(MeshFileFormat::Bin),
            _ => Err(Error::UnknownFormat(path.to_path_buf())),
        }
    }

    /// `explicit` wins over the file extension.
    pub fn resolve(path: &Path, explicit: Option<MeshFileFormat>) -> Result<Self> {
        explicit.map_or_else(|| MeshFileFormat::from_path(path), Ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// `o name`
    Object,
    /// `g name ...`
    Group,
    /// `usemtl name`
    Material,
}

/// A run of consecutive elements tagged by an OBJ directive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementGroup {
    pub kind: GroupKind,
    pub name: String,
    pub elements: Range<usize>,
}

/// A mesh plus the element annotations its file carried.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedMesh {
    pub mesh: Mesh,
    pub groups: Vec<ElementGroup>,
}

impl LoadedMesh {
    /// Ascending positions of every element tagged `name` by any directive.
    pub fn elements_named(&self, name: &str) -> Vec<usize> {
        let mut keep = vec![false; self.mesh.element_count()];
        for g in self.groups.iter().filter(|g| g.name == name) {
            keep[g.elements.clone()].fill(true);
        }
        keep.iter().enumerate().filter_map(|(e, &k)| k.then_some(e)).collect()
    }
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::File { path: path.to_path_buf(), source })
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::File { path: path.to_path_buf(), source })
}

pub fn read_mesh(
    path: &Path,
    format: Option<MeshFileFormat>,
    obj: &ObjOptions,
) -> Result<LoadedMesh> {
    match MeshFileFormat::resolve(path, format)? {
        MeshFileFormat::Obj => read_obj(path, obj),
        MeshFileFormat::Bin => Ok(LoadedMesh { mesh: read_bin(path)?, groups: Vec::new() }),
    }
}

pub fn write_mesh(mesh: &Mesh, path: &Path, format: Option<MeshFileFormat>) -> Result<()> {
    match MeshFileFormat::resolve(path, format)? {
        MeshFileFormat::Obj => write_obj(mesh, path),
        MeshFileFormat::Bin => write_bin(mesh, path),
    }
}

fn finish(mut w: BufWriter<File>, path: PathBuf) -> Result<()> {
    w.flush().map_err(|source| Error::File { path, source })
}
