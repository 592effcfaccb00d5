use std::path::PathBuf;

use crate::mesh::Issue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vertex dimension must be at least 1")]
    ZeroDimension,
    #[error("element arity must be at least 1")]
    ZeroArity,
    #[error("coordinate buffer of length {len} is not a multiple of dimension {dim}")]
    RaggedCoordinates { len: usize, dim: usize },
    #[error("index buffer of length {len} is not a multiple of arity {arity}")]
    RaggedIndices { len: usize, arity: usize },
    #[error("{count} vertices exceed the 32-bit index range")]
    TooManyVertices { count: u64 },
    #[error("mesh is invalid: {} out-of-range index(es), first at element {} slot {} (index {})",
        .issues.len(), .issues[0].element, .issues[0].slot, .issues[0].index)]
    InvalidMesh { issues: Vec<Issue> },
    #[error("element {element} references vertex {index} but the mesh has {vertex_count} vertices")]
    DanglingIndex { element: usize, index: u32, vertex_count: usize },

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch { what: &'static str, left: usize, right: usize },
    #[error("scatter position {position} at input {input} is outside output of length {out_len}")]
    ScatterOutOfRange { input: usize, position: u32, out_len: usize },
    #[error("scatter left output slot {slot} unwritten")]
    ScatterUncovered { slot: usize },
    #[error("inclusive scan total {total} does not fit in 32 bits")]
    ScanOverflow { total: u64 },
    #[error("not a permutation of 0..{len}")]
    NotAPermutation { len: usize },
    #[error("first-occurrence flags must start with a set flag")]
    LeadingDuplicateFlag,
    #[error("index {index} at position {position} is outside a lookup table of length {len}")]
    IndexOutOfRange { position: usize, index: u32, len: usize },

    #[error("cannot combine meshes with different {what}: {left} vs {right}")]
    Incompatible { what: &'static str, left: usize, right: usize },
    #[error("merge needs at least one mesh")]
    NothingToMerge,
    #[error("soup element {element} has {found} vertices, expected {expected}")]
    RaggedSoup { element: usize, expected: usize, found: usize },
    #[error("soup vertex has {found} coordinates, expected {expected}")]
    SoupDimension { expected: usize, found: usize },
    #[error("subset selector: {0}")]
    BadSelector(String),

    #[error("grid size must be at least 1")]
    EmptyGrid,
    #[error("grid of {n}x{n} quads needs more than 2^32 vertices")]
    GridTooLarge { n: usize },
    #[error("repetition count must be at least 1")]
    NoRepetitions,
    #[error("benchmark verification failed for N={n}: {method} produced {found} vertices, expected {expected}")]
    BenchVerification { n: usize, method: &'static str, found: usize, expected: usize },

    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("OBJ output supports 2 or 3 dimensional vertices, not {0}")]
    ObjDimension(usize),
    #[error("bad magic {0:?}, expected \"RMX1\"")]
    BadMagic([u8; 4]),
    #[error("truncated file: needed {needed} bytes, found {found}")]
    Truncated { needed: u64, found: u64 },
    #[error("{0} trailing bytes after mesh data")]
    TrailingBytes(u64),
    #[error("cannot infer mesh format of {0}; use .obj or .rmx or pass a format")]
    UnknownFormat(PathBuf),
}
