//! Data-parallel re-indexing of indexed meshes.
//!
//! [`reindex`] removes bitwise-duplicate and unreferenced vertices from a
//! mesh of fixed-arity elements (triangles, quads, tetrahedra, ...) using
//! only maps, a stable key-value sort, an inclusive scan and a scatter. The
//! same result, up to vertex order, is produced by the map-based
//! [`reindex_serial`], which serves as reference and benchmark baseline.
//!
//! ```
//! use remeshx::{fixture, reindex};
//!
//! let (mesh, scratch) = reindex(&fixture::worked_mesh()).unwrap();
//! assert_eq!(mesh.vertex_count(), 6);
//! assert_eq!(scratch.new_idx, [0, 0, 0, 1, 2, 2, 3, 3, 4, 5]);
//! assert_eq!(mesh.indices(), [0, 1, 2, 0, 2, 3, 2, 4, 5, 2, 5, 3]);
//! ```
//!
//! With the default `parallel` feature all loops run on a rayon pool (sized
//! by `REMESHX_THREADS` or [`init_global_pool`]); without it they run
//! sequentially. Results are bit-identical either way.

pub mod bench;
pub mod check;
mod error;
mod exec;
pub mod fixture;
pub mod io;
pub mod mesh;
pub mod ops;
pub mod primitives;
mod radix;
pub mod reindex;
pub mod serial;

pub use error::{Error, Result};
pub use exec::{
    available_workers, current_workers, init_global_pool, with_workers, workers_from_env,
    THREADS_ENV,
};
pub use mesh::{dereference, validate, ElementSoup, Issue, Mesh, Vertex, VertexKey};
pub use ops::{merge, soup_to_mesh, subset, SubsetSelector};
pub use reindex::{reindex, reindex_mesh, ReindexScratch};
pub use serial::{equivalent, reindex_serial};
