//! Benchmark graphs for the integration tests.
//!
//! Real G-set files are used when present, looked up as `<name>` or
//! `<name>.txt` under `$PBIT_GSET_DIR` and then under `data/gset/`. Otherwise a
//! seeded stand-in with the same node count, edge count, structure and weight
//! set is generated. Stand-ins are normalised by the registry value of the
//! graph they replace.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use pbit_anneal::{BestKnownRegistry, GsetFile, MaxCutGraph};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Random,
    Toroidal { rows: usize, cols: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct BenchmarkShape {
    pub name: &'static str,
    pub n: usize,
    pub m: usize,
    pub structure: Structure,
    pub signed: bool,
}

pub const BENCHMARKS: [BenchmarkShape; 9] = [
    BenchmarkShape { name: "G1", n: 800, m: 19176, structure: Structure::Random, signed: false },
    BenchmarkShape { name: "G22", n: 2000, m: 19990, structure: Structure::Random, signed: false },
    BenchmarkShape { name: "G47", n: 1000, m: 9990, structure: Structure::Random, signed: false },
    BenchmarkShape { name: "G48", n: 3000, m: 6000, structure: Structure::Toroidal { rows: 50, cols: 60 }, signed: true },
    BenchmarkShape { name: "G55", n: 5000, m: 12498, structure: Structure::Random, signed: false },
    BenchmarkShape { name: "G60", n: 7000, m: 17148, structure: Structure::Random, signed: false },
    BenchmarkShape { name: "G67", n: 10000, m: 20000, structure: Structure::Toroidal { rows: 100, cols: 100 }, signed: true },
    BenchmarkShape { name: "G77", n: 14000, m: 28000, structure: Structure::Toroidal { rows: 100, cols: 140 }, signed: true },
    BenchmarkShape { name: "G81", n: 20000, m: 40000, structure: Structure::Toroidal { rows: 100, cols: 200 }, signed: true },
];

pub fn shape(name: &str) -> BenchmarkShape {
    *BENCHMARKS.iter().find(|b| b.name == name).expect("known benchmark")
}

pub struct Benchmark {
    pub name: String,
    pub graph: MaxCutGraph,
    pub best_known: Option<u64>,
    /// False when the graph is a generated stand-in.
    pub real: bool,
}

impl Benchmark {
    pub fn origin(&self) -> &'static str {
        if self.real {
            "G-set file"
        } else {
            "generated stand-in"
        }
    }
}

pub fn registry() -> BestKnownRegistry {
    BestKnownRegistry::open(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/best_known.txt")).unwrap()
}

fn find_file(name: &str) -> Option<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(d) = std::env::var_os("PBIT_GSET_DIR") {
        dirs.push(PathBuf::from(d));
    }
    dirs.push(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/gset"));
    dirs.iter()
        .flat_map(|d| [d.join(name), d.join(format!("{name}.txt"))])
        .find(|p| p.is_file())
}

pub fn benchmark(name: &str) -> Benchmark {
    let best_known = registry().get(name);
    if let Some(path) = find_file(name) {
        let file = GsetFile::open(&path).unwrap();
        return Benchmark {
            name: name.to_string(),
            graph: file.to_graph().unwrap(),
            best_known,
            real: true,
        };
    }
    let s = shape(name);
    let seed = name.bytes().fold(0x00C0_FFEE_u64, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)));
    let mut rng = StdRng::seed_from_u64(seed);
    let graph = match s.structure {
        Structure::Random => random_graph(&mut rng, s.n, s.m, s.signed),
        Structure::Toroidal { rows, cols } => toroidal_grid(&mut rng, rows, cols, s.signed),
    };
    assert_eq!((graph.n(), graph.edges().len()), (s.n, s.m));
    Benchmark {
        name: name.to_string(),
        graph,
        best_known,
        real: false,
    }
}

fn weight(rng: &mut StdRng, signed: bool) -> i64 {
    if signed && rng.random_bool(0.5) {
        -1
    } else {
        1
    }
}

/// Exactly `m` distinct edges drawn uniformly from all node pairs.
pub fn random_graph(rng: &mut StdRng, n: usize, m: usize, signed: bool) -> MaxCutGraph {
    let pairs = n * (n - 1) / 2;
    let mut picked = rand::seq::index::sample(rng, pairs, m).into_vec();
    picked.sort_unstable();
    let mut edges = Vec::with_capacity(m);
    // walk the row-major upper triangle once, matching sorted pair indices
    let (mut i, mut row_start) = (0usize, 0usize);
    for k in picked {
        while k >= row_start + (n - 1 - i) {
            row_start += n - 1 - i;
            i += 1;
        }
        let j = i + 1 + (k - row_start);
        edges.push((i, j, 0));
    }
    for e in &mut edges {
        e.2 = weight(rng, signed);
    }
    MaxCutGraph::new(n, edges).unwrap()
}

/// Periodic `rows × cols` grid: every node links to its right and lower neighbour.
pub fn toroidal_grid(rng: &mut StdRng, rows: usize, cols: usize, signed: bool) -> MaxCutGraph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let a = id(r, c);
            for b in [id(r, (c + 1) % cols), id((r + 1) % rows, c)] {
                edges.push((a.min(b), a.max(b), weight(rng, signed)));
            }
        }
    }
    MaxCutGraph::new(rows * cols, edges).unwrap()
}
