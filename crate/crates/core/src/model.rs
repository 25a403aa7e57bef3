//! Ising instances, spin configurations and MAX-CUT graphs.
//!
//! Couplings are stored sparsely: once as an edge list with `i < j` and once
//! as a CSR adjacency so that per-node local fields cost `O(deg i)`.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// One undirected coupling `J[i][j] = J[j][i] = weight` with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Ising problem `H(σ) = −Σ hᵢσᵢ − Σ_{i<j} Jᵢⱼσᵢσⱼ` with sparse symmetric `J`.
#[derive(Clone, Debug)]
pub struct IsingModel {
    h: Vec<f64>,
    edges: Vec<Coupling>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
}

impl IsingModel {
    /// Builds a model from biases and an undirected coupling list.
    ///
    /// Pairs may be given in either orientation. Zero weights are dropped so
    /// that the edge list and `J` share one nonzero structure. Self-couplings,
    /// out-of-range indices and repeated pairs are rejected.
    pub fn new(h: Vec<f64>, couplings: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let n = h.len();
        if n == 0 {
            return Err(Error::invalid("an Ising model needs at least one node"));
        }
        if n > u32::MAX as usize {
            return Err(Error::invalid("node count exceeds u32 range"));
        }
        if let Some(bad) = h.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("bias {bad} is not finite")));
        }

        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for (a, b, weight) in couplings {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("coupling ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-coupling on node {a}")));
            }
            if !weight.is_finite() {
                return Err(Error::invalid(format!("coupling ({a}, {b}) is not finite")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::invalid(format!("duplicate coupling ({i}, {j})")));
            }
            if weight != 0.0 {
                edges.push(Coupling { i, j, weight });
            }
        }
        edges.sort_by_key(|e| (e.i, e.j));

        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.i] += 1;
            degree[e.j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut neighbors = vec![0u32; total];
        let mut weights = vec![0.0; total];
        let mut cursor = offsets[..n].to_vec();
        for e in &edges {
            for (from, to) in [(e.i, e.j), (e.j, e.i)] {
                neighbors[cursor[from]] = to as u32;
                weights[cursor[from]] = e.weight;
                cursor[from] += 1;
            }
        }
        // rows are filled in edge order; sort each row by neighbour index
        for i in 0..n {
            let (lo, hi) = (offsets[i], offsets[i + 1]);
            let mut row: Vec<(u32, f64)> = neighbors[lo..hi]
                .iter()
                .copied()
                .zip(weights[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|&(k, _)| k);
            for (slot, (k, w)) in row.into_iter().enumerate() {
                neighbors[lo + slot] = k;
                weights[lo + slot] = w;
            }
        }

        Ok(Self {
            h,
            edges,
            offsets,
            neighbors,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Nonzero couplings, each listed once with `i < j`, sorted.
    pub fn edges(&self) -> &[Coupling] {
        &self.edges
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Neighbours of `i` with their coupling weights, in ascending index order.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[range.clone()]
            .iter()
            .zip(&self.weights[range])
            .map(|(&k, &w)| (k as usize, w))
    }

    /// `J[i][j]`; zero on the diagonal and for absent pairs.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        if i == j || i >= self.n() || j >= self.n() {
            return 0.0;
        }
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.neighbors[range.clone()].binary_search(&(j as u32)) {
            Ok(pos) => self.weights[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Local field `hᵢ + Σⱼ Jᵢⱼ σⱼ` read from a raw spin slice.
    #[inline]
    pub(crate) fn local_field(&self, spins: &[i8], i: usize) -> f64 {
        let range = self.offsets[i]..self.offsets[i + 1];
        let mut acc = self.h[i];
        for (&k, &w) in self.neighbors[range.clone()].iter().zip(&self.weights[range]) {
            acc += w * f64::from(spins[k as usize]);
        }
        acc
    }

    fn check_len(&self, state: &SpinState) -> Result<()> {
        if state.len() != self.n() {
            return Err(Error::invalid(format!(
                "state has {} spins but the model has {} nodes",
                state.len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Hamiltonian `H(σ) = −Σ hᵢσᵢ − Σ_{i<j} Jᵢⱼσᵢσⱼ`.
    pub fn energy(&self, state: &SpinState) -> Result<f64> {
        self.check_len(state)?;
        Ok(self.energy_unchecked(state.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, spins: &[i8]) -> f64 {
        let field: f64 = self
            .h
            .iter()
            .zip(spins)
            .map(|(&h, &s)| h * f64::from(s))
            .sum();
        let pair: f64 = self
            .edges
            .iter()
            .map(|e| e.weight * f64::from(spins[e.i] * spins[e.j]))
            .sum();
        -field - pair
    }

    /// Weight of the couplings crossing the partition, taking `w = −J`.
    ///
    /// For a model built by [`MaxCutGraph::to_ising`] this is exactly the
    /// graph's cut value.
    pub fn cut_weight(&self, state: &SpinState) -> Result<f64> {
        self.check_len(state)?;
        Ok(self.cut_weight_unchecked(state.as_slice()))
    }

    pub(crate) fn cut_weight_unchecked(&self, spins: &[i8]) -> f64 {
        self.edges
            .iter()
            .filter(|e| spins[e.i] != spins[e.j])
            .map(|e| -e.weight)
            .sum()
    }
}

/// Free-function form of [`IsingModel::energy`].
pub fn energy(model: &IsingModel, state: &SpinState) -> Result<f64> {
    model.energy(state)
}

/// A configuration of binary spins, each exactly `−1` or `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinState(Vec<i8>);

impl SpinState {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!(
                "spin {pos} is {} (expected -1 or +1)",
                spins[pos]
            )));
        }
        Ok(Self(spins))
    }

    /// All spins set to `value`, which must be ±1.
    pub fn uniform(n: usize, value: i8) -> Result<Self> {
        Self::new(vec![value; n])
    }

    /// Spin configuration whose bit `k` of `bits` set means `σₖ = +1`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self((0..n).map(|k| if bits >> k & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub(crate) fn from_raw(spins: Vec<i8>) -> Self {
        debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        Self(spins)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i8> {
        self.0
    }

    /// Global spin flip `σ → −σ`.
    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|&s| -s).collect())
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }
}

/// Undirected weighted graph for MAX-CUT, 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxCutGraph {
    n: usize,
    edges: Vec<(usize, usize, i64)>,
}

impl MaxCutGraph {
    /// Rejects self-loops, out-of-range endpoints and duplicate undirected edges.
    /// Edge orientation is normalised to `i < j`; input order is kept.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, i64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a graph needs at least one node"));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop on node {a}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((i, j)) {
                return Err(Error::invalid(format!("duplicate edge ({i}, {j})")));
            }
            out.push((i, j, w));
        }
        Ok(Self { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, i64)] {
        &self.edges
    }

    /// `W = Σ w` over all edges.
    pub fn total_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Distinct edge weights, ascending.
    pub fn weight_set(&self) -> Vec<i64> {
        let mut ws: Vec<i64> = self.edges.iter().map(|e| e.2).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    /// `Σ w·(1 − σᵢσⱼ)/2`: the signed weight of edges crossing the partition.
    pub fn cut_value(&self, state: &SpinState) -> Result<i64> {
        if state.len() != self.n {
            return Err(Error::invalid(format!(
                "state has {} spins but the graph has {} nodes",
                state.len(),
                self.n
            )));
        }
        let s = state.as_slice();
        Ok(self
            .edges
            .iter()
            .filter(|&&(i, j, _)| s[i] != s[j])
            .map(|e| e.2)
            .sum())
    }

    /// Ising form with `h = 0` and `Jᵢⱼ = −wᵢⱼ`, so `H(σ) = W − 2·cut(σ)`.
    pub fn to_ising(&self) -> IsingModel {
        IsingModel::new(
            vec![0.0; self.n],
            self.edges.iter().map(|&(i, j, w)| (i, j, -(w as f64))),
        )
        .expect("a validated graph maps to a valid model")
    }
}

/// Free-function form of [`MaxCutGraph::cut_value`].
pub fn cut_value(graph: &MaxCutGraph, state: &SpinState) -> Result<i64> {
    graph.cut_value(state)
}

/// Free-function form of [`MaxCutGraph::to_ising`].
pub fn maxcut_to_ising(graph: &MaxCutGraph) -> IsingModel {
    graph.to_ising()
}
