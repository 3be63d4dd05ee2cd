//! Complex-weighted undirected graphs.
//!
//! A [`ComplexGraph`] stores a dense symmetric weight matrix with a zero
//! diagonal. An edge is present exactly when its weight is nonzero, so the
//! adjacency bitsets are derived from the weights and never stored apart
//! from them.

use std::collections::BTreeSet;
use std::io::Read;

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing list of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    /// Builds a set from indices in any order; duplicates collapse.
    pub fn from_unsorted<I: IntoIterator<Item = usize>>(items: I) -> Self {
        let set: BTreeSet<usize> = items.into_iter().collect();
        VertexSet(set.into_iter().collect())
    }

    /// Accepts only a strictly increasing sequence.
    pub fn try_new(members: Vec<usize>) -> Result<Self> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "vertex set {members:?} is not strictly increasing"
            )));
        }
        Ok(VertexSet(members))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn with(&self, v: usize) -> Self {
        let mut out = self.0.clone();
        if let Err(pos) = out.binary_search(&v) {
            out.insert(pos, v);
        }
        VertexSet(out)
    }

    pub fn without(&self, v: usize) -> Self {
        VertexSet(self.0.iter().copied().filter(|&u| u != v).collect())
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        let (mut a, mut b, mut count) = (0, 0, 0);
        while a < self.0.len() && b < other.0.len() {
            match self.0[a].cmp(&other.0[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    a += 1;
                    b += 1;
                }
            }
        }
        count
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.intersection_len(other) == self.len()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(s: VertexSet) -> Self {
        s.0
    }
}

/// Direction of an edge-magnitude threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    /// Keep edges with `0 < |w| <= threshold`.
    KeepLeq,
    /// Keep edges with `|w| >= threshold`.
    KeepGeq,
}

/// Uniform magnitude ranges for the real and imaginary parts of edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightLaw {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
}

impl WeightLaw {
    pub fn uniform(re_range: (f64, f64), im_range: (f64, f64)) -> Self {
        WeightLaw { re_range, im_range }
    }

    fn validate(&self) -> Result<()> {
        for (lo, hi) in [self.re_range, self.im_range] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidArgument(format!("invalid weight range [{lo}, {hi}]")));
            }
        }
        if self.re_range == (0.0, 0.0) && self.im_range == (0.0, 0.0) {
            return Err(Error::InvalidArgument(
                "weight law can only produce zero weights".into(),
            ));
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Complex64 {
        let draw = |rng: &mut R, (lo, hi): (f64, f64)| {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo..=hi)
            }
        };
        let re = draw(rng, self.re_range);
        let im = draw(rng, self.im_range);
        Complex64::new(re, im)
    }
}

/// Undirected network with complex edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGraph {
    n: usize,
    weights: Vec<Complex64>,
    adjacency: Vec<FixedBitSet>,
}

impl ComplexGraph {
    pub fn edgeless(n: usize) -> Self {
        ComplexGraph {
            n,
            weights: vec![Complex64::new(0.0, 0.0); n * n],
            adjacency: (0..n).map(|_| FixedBitSet::with_capacity(n)).collect(),
        }
    }

    /// Builds a graph from `(i, j, weight)` triples. Each pair may appear once
    /// in either orientation; zero weights and loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut g = ComplexGraph::edgeless(n);
        for (i, j, w) in edges {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if i == j {
                return Err(Error::DiagonalEntry(i));
            }
            let (a, b) = (i.min(j), i.max(j));
            if w == Complex64::new(0.0, 0.0) {
                return Err(Error::ExplicitZeroEdge(a, b));
            }
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite weight on edge ({a}, {b})")));
            }
            if g.has_edge(a, b) {
                return Err(Error::DuplicateEdge(a, b));
            }
            g.set_weight(a, b, w);
        }
        Ok(g)
    }

    /// Builds a graph from a dense matrix given in row-major order. The upper
    /// triangle is authoritative and must agree with the lower one.
    pub fn from_dense(n: usize, weights: &[Complex64]) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: weights.len(),
            });
        }
        let mut g = ComplexGraph::edgeless(n);
        for i in 0..n {
            if weights[i * n + i] != Complex64::new(0.0, 0.0) {
                return Err(Error::DiagonalEntry(i));
            }
            for j in (i + 1)..n {
                let w = weights[i * n + j];
                if w != weights[j * n + i] {
                    return Err(Error::NotSymmetric((w - weights[j * n + i]).norm()));
                }
                if w != Complex64::new(0.0, 0.0) {
                    g.set_weight(i, j, w);
                }
            }
        }
        Ok(g)
    }

    fn set_weight(&mut self, i: usize, j: usize, w: Complex64) {
        let n = self.n;
        self.weights[i * n + j] = w;
        self.weights[j * n + i] = w;
        let present = w != Complex64::new(0.0, 0.0);
        self.adjacency[i].set(j, present);
        self.adjacency[j].set(i, present);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> Complex64 {
        self.weights[i * self.n + j]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(j)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count_ones(..)
    }

    /// Row-major dense weight matrix.
    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Edges as `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.adjacency[i]
                .ones()
                .filter(move |&j| j > i)
                .map(move |j| (i, j, self.weight(i, j)))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w.norm()).fold(0.0, f64::max)
    }

    /// Graph with the listed edges deleted; absent pairs are ignored.
    pub fn without_edges<I: IntoIterator<Item = (usize, usize)>>(&self, edges: I) -> Self {
        let mut g = self.clone();
        for (i, j) in edges {
            g.set_weight(i, j, Complex64::new(0.0, 0.0));
        }
        g
    }

    /// Keeps the edges for which `keep` returns true.
    pub fn retain_edges<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(usize, usize, Complex64) -> bool,
    {
        let kept: Vec<_> = self.edges().filter(|&(i, j, w)| keep(i, j, w)).collect();
        let mut g = ComplexGraph::edgeless(self.n);
        for (i, j, w) in kept {
            g.set_weight(i, j, w);
        }
        g
    }

    /// Multiplies every weight by `factor`. A zero factor yields an edgeless graph.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut g = ComplexGraph::edgeless(self.n);
        if factor == Complex64::new(0.0, 0.0) {
            return g;
        }
        for (i, j, w) in self.edges() {
            g.set_weight(i, j, w * factor);
        }
        g
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut g = ComplexGraph::edgeless(self.n);
        for (i, j, w) in self.edges() {
            g.set_weight(perm[i], perm[j], w);
        }
        Ok(g)
    }

    fn check_vertices(&self, s: &VertexSet) -> Result<()> {
        match s.iter().find(|&v| v >= self.n) {
            Some(index) => Err(Error::IndexOutOfRange { index, n: self.n }),
            None => Ok(()),
        }
    }

    /// Sum of `w_ij` over ordered pairs `i != j` of `s`.
    pub fn weight_sum(&self, s: &VertexSet) -> Complex64 {
        let members = s.as_slice();
        let mut sum = Complex64::new(0.0, 0.0);
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                sum += self.weight(i, j);
            }
        }
        sum * 2.0
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    i: usize,
    j: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<EdgeRecord>,
}

/// Reads the canonical edge-list JSON document.
pub fn load_graph<R: Read>(source: R) -> Result<ComplexGraph> {
    let file: GraphFile = serde_json::from_reader(source)?;
    if file.n == 0 {
        return Err(Error::InvalidArgument("graph must have at least one vertex".into()));
    }
    ComplexGraph::from_edges(
        file.n,
        file.edges.into_iter().map(|e| (e.i, e.j, Complex64::new(e.re, e.im))),
    )
}

/// Writes the canonical edge-list JSON document (edges with `i < j`, sorted).
pub fn save_graph(g: &ComplexGraph) -> Vec<u8> {
    let file = GraphFile {
        n: g.n(),
        edges: g
            .edges()
            .map(|(i, j, w)| EdgeRecord {
                i,
                j,
                re: w.re,
                im: w.im,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("graph serialization cannot fail");
    out.push(b'\n');
    out
}

/// Random network whose present edges carry weights `a + ib` drawn from `law`.
pub fn random_dual_layer(n: usize, edge_prob: f64, law: WeightLaw, seed: u64) -> Result<ComplexGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    law.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = ComplexGraph::edgeless(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < edge_prob {
                let w = law.draw(&mut rng);
                if w != Complex64::new(0.0, 0.0) {
                    g.set_weight(i, j, w);
                }
            }
        }
    }
    Ok(g)
}

/// `|sum of w_ij over ordered pairs| / (k (k - 1))` for the induced subgraph on `s`.
pub fn clique_density(g: &ComplexGraph, s: &VertexSet) -> Result<f64> {
    let k = s.len();
    if k < 2 {
        return Err(Error::TooSmall { size: k, min: 2 });
    }
    g.check_vertices(s)?;
    Ok(g.weight_sum(s).norm() / (k * (k - 1)) as f64)
}

pub fn edge_filter(g: &ComplexGraph, threshold: f64, mode: FilterMode) -> ComplexGraph {
    match mode {
        FilterMode::KeepLeq => g.retain_edges(|_, _, w| w.norm() <= threshold),
        FilterMode::KeepGeq => g.retain_edges(|_, _, w| w.norm() >= threshold),
    }
}

/// True when every pair in `s` is joined by an edge. Sets with fewer than two
/// vertices are cliques; out-of-range vertices make the answer false.
pub fn is_clique(g: &ComplexGraph, s: &VertexSet) -> bool {
    if s.iter().any(|v| v >= g.n()) {
        return false;
    }
    let members = s.as_slice();
    members
        .iter()
        .enumerate()
        .all(|(a, &i)| members[a + 1..].iter().all(|&j| g.has_edge(i, j)))
}
