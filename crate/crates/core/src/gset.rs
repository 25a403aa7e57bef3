//! G-set benchmark files and the best-known cut registry.
//!
//! On disk a G-set file is a header line `n m` followed by `m` lines `i j w`
//! with 1-based node indices. [`GsetFile`] keeps the indices exactly as read;
//! [`GsetFile::to_graph`] is the one place where they become 0-based.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::MaxCutGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GsetFile {
    pub name: String,
    pub n: usize,
    pub m: usize,
    /// `(i, j, w)` with 1-based indices as stored.
    pub edges: Vec<(usize, usize, i64)>,
}

impl GsetFile {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::Io {
            context: format!("opening {}", path.display()),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        parse_gset(BufReader::new(file), name)
    }

    /// Converts to a 0-based graph, rejecting duplicate undirected edges.
    pub fn to_graph(&self) -> Result<MaxCutGraph> {
        MaxCutGraph::new(self.n, self.edges.iter().map(|&(i, j, w)| (i - 1, j - 1, w)))
    }

    /// Writes the file back in G-set format.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.n, self.m)?;
        for (i, j, w) in &self.edges {
            writeln!(out, "{i} {j} {w}")?;
        }
        Ok(())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j, _) in &self.edges {
            deg[i - 1] += 1;
            deg[j - 1] += 1;
        }
        deg
    }
}

fn int_fields<T: std::str::FromStr>(line: &str, lineno: usize, expect: usize) -> Result<Vec<T>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != expect {
        return Err(Error::parse(
            lineno,
            format!("expected {expect} integers, found {} fields", fields.len()),
        ));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<T>()
                .map_err(|_| Error::parse(lineno, format!("`{f}` is not a valid integer")))
        })
        .collect()
}

/// Parses a G-set stream. Blank lines are ignored; every other line must be
/// the header or an edge.
pub fn parse_gset<R: BufRead>(reader: R, name: impl Into<String>) -> Result<GsetFile> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line.map_err(|source| Error::Io {
            context: format!("reading line {lineno}"),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        match header {
            None => {
                let v = int_fields::<usize>(&line, lineno, 2)?;
                if v[0] == 0 {
                    return Err(Error::parse(lineno, "node count must be positive"));
                }
                header = Some((v[0], v[1]));
                edges.reserve(v[1]);
            }
            Some((n, m)) => {
                let v = int_fields::<i64>(&line, lineno, 3)?;
                if edges.len() == m {
                    return Err(Error::parse(lineno, format!("more than the {m} edges declared in the header")));
                }
                let (i, j, w) = (v[0], v[1], v[2]);
                for k in [i, j] {
                    if k < 1 || k as usize > n {
                        return Err(Error::parse(lineno, format!("node index {k} outside 1..={n}")));
                    }
                }
                if i == j {
                    return Err(Error::parse(lineno, format!("self-loop on node {i}")));
                }
                edges.push((i as usize, j as usize, w));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| Error::parse(1, "missing `n m` header"))?;
    if edges.len() != m {
        return Err(Error::parse(
            last_line,
            format!("end of input: header declares {m} edges but {} were read", edges.len()),
        ));
    }
    Ok(GsetFile {
        name: name.into(),
        n,
        m,
        edges,
    })
}

/// Best-known cut values keyed by graph name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BestKnownRegistry {
    entries: BTreeMap<String, u64>,
}

impl BestKnownRegistry {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut text = String::new();
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|source| Error::Io {
                context: format!("reading {}", path.display()),
                source,
            })?;
        load_best_known(text.as_bytes())
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.entries.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Parses `name value` lines; `#` starts a comment.
pub fn load_best_known<R: BufRead>(reader: R) -> Result<BestKnownRegistry> {
    let mut entries = BTreeMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| Error::Io {
            context: format!("reading line {lineno}"),
            source,
        })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(lineno, "expected `name value`"));
        }
        let value: u64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("`{}` is not a non-negative integer", fields[1])))?;
        if value == 0 {
            return Err(Error::parse(lineno, "best-known values must be positive"));
        }
        if entries.insert(fields[0].to_string(), value).is_some() {
            return Err(Error::parse(lineno, format!("duplicate entry for `{}`", fields[0])));
        }
    }
    Ok(BestKnownRegistry { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<GsetFile> {
        parse_gset(text.as_bytes(), "toy")
    }

    #[test]
    fn toy_file() {
        let f = parse("3 2\n1 2 1\n2 3 -1\n").unwrap();
        assert_eq!((f.n, f.m), (3, 2));
        assert_eq!(f.edges, vec![(1, 2, 1), (2, 3, -1)]);
        let g = f.to_graph().unwrap();
        assert_eq!(g.edges(), &[(0, 1, 1), (1, 2, -1)]);
        assert_eq!(f.degrees().iter().sum::<usize>(), 2 * f.m);
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("3 2\n1 2 1\n2 x -1\n", 3),
            ("3 2\n1 2 1\n", 2),
            ("3 1\n1 2 1\n2 3 1\n", 3),
            ("3 1\n1 4 1\n", 2),
            ("3 1\n0 2 1\n", 2),
            ("3 1\n2 2 1\n", 2),
            ("3\n", 1),
            ("3 1\n1 2\n", 2),
        ];
        for (text, line) in cases {
            match parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(parse("").is_err());
    }

    #[test]
    fn duplicate_edges_fail_conversion() {
        let f = parse("3 2\n1 2 1\n2 1 1\n").unwrap();
        assert!(f.to_graph().is_err());
    }

    #[test]
    fn registry_basics() {
        let r = load_best_known("toy 10\n".as_bytes()).unwrap();
        assert_eq!(r.get("toy"), Some(10));
        let r = load_best_known("# comment\ntoy 10\n\nG1 11624 # trailing\n".as_bytes()).unwrap();
        assert_eq!(r.get("toy"), Some(10));
        assert_eq!(r.get("G1"), Some(11624));
        assert_eq!(r.get("G2"), None);
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn registry_errors() {
        assert!(load_best_known("toy ten\n".as_bytes()).is_err());
        assert!(load_best_known("toy 10\ntoy 11\n".as_bytes()).is_err());
        assert!(load_best_known("toy 0\n".as_bytes()).is_err());
        assert!(load_best_known("toy\n".as_bytes()).is_err());
    }

    #[test]
    fn shipped_registry_loads() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/best_known.txt");
        let r = BestKnownRegistry::open(path).unwrap();
        for name in ["G1", "G22", "G47", "G48", "G55", "G60", "G67", "G77", "G81"] {
            assert!(r.get(name).is_some(), "{name}");
        }
    }

    proptest! {
        #[test]
        fn write_then_parse_round_trips(
            n in 2usize..40,
            raw in proptest::collection::vec((0usize..1000, 0usize..1000, -3i64..=3), 0..60),
        ) {
            let edges: Vec<(usize, usize, i64)> = raw
                .into_iter()
                .map(|(a, b, w)| (a % n + 1, b % n + 1, w))
                .filter(|(a, b, _)| a != b)
                .collect();
            let f = GsetFile { name: "p".into(), n, m: edges.len(), edges };
            let mut buf = Vec::new();
            f.write(&mut buf).unwrap();
            let back = parse_gset(buf.as_slice(), "p").unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
