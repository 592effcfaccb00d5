use std::collections::BTreeSet;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use remeshx::bench::{grid_quads, run_bench, write_csv, write_table, DEFAULT_REPS};
use remeshx::io::{read_mesh, write_mesh, LoadedMesh, MeshFileFormat, ObjOptions};
use remeshx::{
    dereference, init_global_pool, merge, reindex_mesh, soup_to_mesh, subset, validate, Error,
    Mesh, SubsetSelector, Vertex,
};

const EXIT_FAILURE: u8 = 1;

/// Remove duplicate and unused vertices from indexed meshes.
#[derive(Debug, Parser)]
#[command(name = "remeshx", version)]
struct Cli {
    /// Worker threads (default: REMESHX_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// File format for every path, overriding the .obj/.rmx extension.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Vertex dimension when reading OBJ (2 drops z).
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: Option<u8>,
    /// Suppress progress output.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Obj,
    Bin,
}

impl From<FormatArg> for MeshFileFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Obj => MeshFileFormat::Obj,
            FormatArg::Bin => MeshFileFormat::Bin,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Remove duplicate and unused vertices.
    Reindex { input: PathBuf, output: PathBuf },
    /// Concatenate meshes and weld shared vertices: merge <in>... <out>
    Merge {
        #[arg(num_args = 2.., required = true, value_name = "PATHS")]
        paths: Vec<PathBuf>,
    },
    /// Treat every face as an independent element and rebuild sharing.
    Soup { input: PathBuf, output: PathBuf },
    /// Keep a subset of elements and drop vertices they do not use.
    Subset {
        input: PathBuf,
        output: PathBuf,
        /// Element positions, e.g. `0-3,7` (0-based, ranges inclusive).
        #[arg(long, conflicts_with = "group", required_unless_present = "group")]
        keep: Option<String>,
        /// OBJ group, object or material name.
        #[arg(long)]
        group: Option<String>,
    },
    /// Write an N x N grid of quads with replicated corners and unused centers.
    Gen {
        #[arg(long)]
        n: usize,
        output: PathBuf,
    },
    /// Time the serial and parallel methods on generated grids.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "8,64,1024")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,
        /// Also write the records as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check that every index names a vertex.
    Validate { input: PathBuf },
    /// Print counts of vertices, elements, duplicates and unused vertices.
    Stats { input: PathBuf },
}

struct Ctx {
    format: Option<MeshFileFormat>,
    obj: ObjOptions,
    quiet: bool,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<LoadedMesh, Error> {
        read_mesh(path, self.format, &self.obj)
    }

    fn save(&self, mesh: &Mesh, path: &Path) -> Result<(), Error> {
        write_mesh(mesh, path, self.format)
    }

    fn note(&self, msg: std::fmt::Arguments<'_>) {
        if !self.quiet {
            println!("{msg}");
        }
    }
}

fn parse_keep(spec: &str) -> Result<Vec<usize>, Error> {
    let bad = |part: &str| Error::BadSelector(format!("cannot parse {part:?} in --keep"));
    let mut keep = BTreeSet::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad(part))?, b.trim().parse().map_err(|_| bad(part))?),
            None => {
                let v: usize = part.parse().map_err(|_| bad(part))?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(bad(part));
        }
        keep.extend(lo..=hi);
    }
    Ok(keep.into_iter().collect())
}

fn describe(mesh: &Mesh) -> String {
    format!("{} vertices, {} elements", mesh.vertex_count(), mesh.element_count())
}

fn stats(mesh: &Mesh, out: &mut impl Write) -> io::Result<()> {
    let n = mesh.vertex_count();
    let mut distinct: Vec<Vertex> = mesh.vertices().map(Vertex::new).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let mut used = vec![false; n];
    for &i in mesh.indices() {
        if let Some(u) = used.get_mut(i as usize) {
            *u = true;
        }
    }
    let rows = [
        ("dimension", mesh.dim()),
        ("arity", mesh.arity()),
        ("vertices", n),
        ("elements", mesh.element_count()),
        ("distinct vertices", distinct.len()),
        ("duplicate vertices", n - distinct.len()),
        ("unused vertices", used.iter().filter(|u| !**u).count()),
        ("invalid indices", validate(mesh).len()),
    ];
    for (label, value) in rows {
        writeln!(out, "{label:<20} {value:>12}")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let threads = init_global_pool(cli.threads);
    let ctx = Ctx {
        format: cli.format.map(Into::into),
        obj: ObjOptions { dim: cli.dim.map(usize::from) },
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Reindex { input, output } => {
            let mesh = ctx.load(&input)?.mesh;
            let out = reindex_mesh(&mesh)?;
            ctx.save(&out, &output)?;
            ctx.note(format_args!("{} -> {}", describe(&mesh), describe(&out)));
        }
        Command::Merge { mut paths } => {
            let output = paths.pop().expect("clap enforces two paths");
            let meshes = paths.iter().map(|p| ctx.load(p).map(|l| l.mesh)).collect::<Result<Vec<_>, _>>()?;
            let out = merge(&meshes)?;
            ctx.save(&out, &output)?;
            ctx.note(format_args!("merged {} meshes -> {}", meshes.len(), describe(&out)));
        }
        Command::Soup { input, output } => {
            let soup = dereference(&ctx.load(&input)?.mesh)?;
            let out = soup_to_mesh(&soup)?;
            ctx.save(&out, &output)?;
            ctx.note(format_args!("{} elements -> {}", soup.len(), describe(&out)));
        }
        Command::Subset { input, output, keep, group } => {
            let loaded = ctx.load(&input)?;
            let positions = match (keep, group) {
                (Some(k), _) => parse_keep(&k)?,
                (None, Some(g)) => {
                    let p = loaded.elements_named(&g);
                    if p.is_empty() {
                        return Err(Error::BadSelector(format!("no elements tagged {g:?}")));
                    }
                    p
                }
                (None, None) => unreachable!("clap requires --keep or --group"),
            };
            let out = subset(&loaded.mesh, &SubsetSelector::Positions(positions))?;
            ctx.save(&out, &output)?;
            ctx.note(format_args!("{} -> {}", describe(&loaded.mesh), describe(&out)));
        }
        Command::Gen { n, output } => {
            let mesh = grid_quads(n)?;
            ctx.save(&mesh, &output)?;
            ctx.note(format_args!("grid N={n}: {}", describe(&mesh)));
        }
        Command::Bench { sizes, reps, csv } => {
            let records = run_bench(&sizes, reps)?;
            if !ctx.quiet {
                write_table(&records, io::stdout().lock())?;
            }
            if let Some(path) = csv {
                let file = std::fs::File::create(&path).map_err(|source| Error::File { path, source })?;
                write_csv(&records, file)?;
            }
        }
        Command::Validate { input } => {
            let mesh = ctx.load(&input)?.mesh;
            let issues = validate(&mesh);
            if issues.is_empty() {
                ctx.note(format_args!("ok: {}", describe(&mesh)));
            } else {
                for issue in &issues {
                    println!("{issue}");
                }
                eprintln!("{}: {} invalid index(es)", input.display(), issues.len());
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
        }
        Command::Stats { input } => {
            let mesh = ctx.load(&input)?.mesh;
            stats(&mesh, &mut io::stdout().lock())?;
            ctx.note(format_args!("{:<20} {:>12}", "threads", threads));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("remeshx: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
