//! Replicated-vertex quad grids and the serial-vs-parallel timing harness.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::mesh::{Mesh, MAX_VERTICES};
use crate::reindex::reindex_mesh;
use crate::serial::reindex_serial;

/// Vertices stored per generated quad: four corners and an unused center.
pub const VERTICES_PER_QUAD: usize = 5;

/// An `n` x `n` grid of quads that share no vertex storage.
///
/// Quad `(i, j)` sits at position `j * n + i` and owns the five vertices
/// `(i,j) (i+1,j) (i+1,j+1) (i,j+1)` plus the unreferenced center
/// `(i+0.5, j+0.5)`. Re-indexing leaves the `(n+1)^2` lattice points.
pub fn grid_quads(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::EmptyGrid);
    }
    let quads = n.checked_mul(n).ok_or(Error::GridTooLarge { n })?;
    let vertices = quads.checked_mul(VERTICES_PER_QUAD).ok_or(Error::GridTooLarge { n })?;
    if vertices as u64 > MAX_VERTICES {
        return Err(Error::GridTooLarge { n });
    }

    let mut coords = vec![0.0f32; vertices * 2];
    exec::for_each_chunk_mut(&mut coords, VERTICES_PER_QUAD * 2, |q, out| {
        let (x, y) = ((q % n) as f32, (q / n) as f32);
        out.copy_from_slice(&[x, y, x + 1.0, y, x + 1.0, y + 1.0, x, y + 1.0, x + 0.5, y + 0.5]);
    });
    let mut indices = vec![0u32; quads * 4];
    exec::for_each_chunk_mut(&mut indices, 4, |q, out| {
        let base = (q * VERTICES_PER_QUAD) as u32;
        out.copy_from_slice(&[base, base + 1, base + 2, base + 3]);
    });
    Mesh::new(2, 4, coords, indices)
}

/// Unique lattice points of an `n` x `n` grid.
pub fn expected_grid_vertices(n: usize) -> usize {
    (n + 1) * (n + 1)
}

/// One row of the benchmark report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub n: usize,
    pub quads_in: usize,
    pub vertices_in: usize,
    pub vertices_out: usize,
    pub t_serial_ms: f64,
    pub t_parallel_ms: f64,
    pub threads: usize,
}

impl BenchRecord {
    pub fn speedup(&self) -> f64 {
        self.t_serial_ms / self.t_parallel_ms
    }
}

pub const DEFAULT_REPS: usize = 5;

/// Median of `reps` timed calls after one untimed warm-up call.
pub fn median_time<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<(Duration, T)> {
    if reps == 0 {
        return Err(Error::NoRepetitions);
    }
    let mut last = f()?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        last = f()?;
        times.push(start.elapsed());
    }
    times.sort();
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 { times[mid] } else { (times[mid - 1] + times[mid]) / 2 };
    Ok((median, last))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn verify(n: usize, method: &'static str, mesh: &Mesh) -> Result<()> {
    let expected = expected_grid_vertices(n);
    if mesh.vertex_count() != expected || mesh.element_count() != n * n {
        return Err(Error::BenchVerification { n, method, found: mesh.vertex_count(), expected });
    }
    Ok(())
}

/// Benchmarks one grid size.
pub fn bench_size(n: usize, reps: usize) -> Result<BenchRecord> {
    let mesh = grid_quads(n)?;
    let (t_serial, serial) = median_time(reps, || reindex_serial(&mesh))?;
    verify(n, "serial", &serial)?;
    drop(serial);
    let (t_parallel, parallel) = median_time(reps, || reindex_mesh(&mesh))?;
    verify(n, "parallel", &parallel)?;
    Ok(BenchRecord {
        n,
        quads_in: mesh.element_count(),
        vertices_in: mesh.vertex_count(),
        vertices_out: parallel.vertex_count(),
        t_serial_ms: ms(t_serial),
        t_parallel_ms: ms(t_parallel),
        threads: exec::current_workers(),
    })
}

/// Times the serial map-based method against the parallel pipeline for each
/// grid size. Refuses to report a size whose output vertex count is wrong.
pub fn run_bench(sizes: &[usize], reps: usize) -> Result<Vec<BenchRecord>> {
    if reps == 0 {
        return Err(Error::NoRepetitions);
    }
    sizes.iter().map(|&n| bench_size(n, reps)).collect()
}

/// Header: `n,quads_in,vertices_in,vertices_out,t_serial_ms,t_parallel_ms,threads`.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["n", "quads_in", "vertices_in", "vertices_out", "t_serial_ms", "t_parallel_ms", "threads"])?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable table with the same columns as the CSV plus speedup.
pub fn write_table<W: Write>(records: &[BenchRecord], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{:>6} {:>10} {:>12} {:>12} {:>12} {:>12} {:>8} {:>8}",
        "N", "quads_in", "vertices_in", "vertices_out", "serial_ms", "parallel_ms", "speedup", "threads"
    )?;
    for r in records {
        writeln!(
            out,
            "{:>6} {:>10} {:>12} {:>12} {:>12.3} {:>12.3} {:>7.2}x {:>8}",
            r.n, r.quads_in, r.vertices_in, r.vertices_out, r.t_serial_ms, r.t_parallel_ms, r.speedup(), r.threads
        )?;
    }
    Ok(())
}
