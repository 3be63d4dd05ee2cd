//! k-clique percolation and targeted clique damage.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::cliques::k_cliques;
use crate::error::{Error, Result};
use crate::graph::{ComplexGraph, VertexSet};

/// Adjacency lists over clique indices; two `k`-cliques are adjacent when
/// they share exactly `k - 1` vertices.
pub fn clique_adjacency(cliques: &[VertexSet]) -> Result<Vec<Vec<usize>>> {
    let Some(first) = cliques.first() else {
        return Ok(Vec::new());
    };
    let k = first.len();
    if let Some(other) = cliques.iter().find(|c| c.len() != k) {
        return Err(Error::MixedCliqueSizes(k, other.len()));
    }
    let mut sorted: Vec<&VertexSet> = cliques.iter().collect();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateClique(w[0].as_slice().to_vec()));
    }
    let mut adj = vec![Vec::new(); cliques.len()];
    for a in 0..cliques.len() {
        for b in (a + 1)..cliques.len() {
            if k > 0 && cliques[a].intersection_len(&cliques[b]) == k - 1 {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    Ok(adj)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercolationReport {
    pub k: usize,
    pub n: usize,
    /// Node unions of each cluster, largest first, ties in lexicographic order.
    pub clusters: Vec<VertexSet>,
    /// Member cliques of each cluster, aligned with `clusters`.
    pub cluster_cliques: Vec<Vec<VertexSet>>,
    pub phi: f64,
    pub largest_nodes: usize,
}

/// Groups the `k`-cliques of `g` by chains of shared `(k-1)`-faces.
pub fn percolation_clusters(g: &ComplexGraph, k: usize) -> Result<PercolationReport> {
    if k < 2 {
        return Err(Error::TooSmall { size: k, min: 2 });
    }
    let cliques = k_cliques(g, k);
    let mut uf = UnionFind::<usize>::new(cliques.len());
    let mut faces: HashMap<Vec<usize>, usize> = HashMap::new();
    for (idx, c) in cliques.iter().enumerate() {
        for drop in 0..k {
            let face: Vec<usize> = c
                .iter()
                .enumerate()
                .filter(|&(pos, _)| pos != drop)
                .map(|(_, v)| v)
                .collect();
            match faces.get(&face) {
                Some(&owner) => {
                    uf.union(owner, idx);
                }
                None => {
                    faces.insert(face, idx);
                }
            }
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for idx in 0..cliques.len() {
        groups.entry(uf.find_mut(idx)).or_default().push(idx);
    }
    let mut clustered: Vec<(VertexSet, Vec<VertexSet>)> = groups
        .into_values()
        .map(|members| {
            let nodes = VertexSet::from_unsorted(members.iter().flat_map(|&i| cliques[i].iter()));
            let mut member_cliques: Vec<VertexSet> = members.iter().map(|&i| cliques[i].clone()).collect();
            member_cliques.sort();
            (nodes, member_cliques)
        })
        .collect();
    clustered.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));

    let largest_nodes = clustered.first().map_or(0, |c| c.0.len());
    let (clusters, cluster_cliques) = clustered.into_iter().unzip();
    Ok(PercolationReport {
        k,
        n: g.n(),
        clusters,
        cluster_cliques,
        phi: largest_nodes as f64 / g.n() as f64,
        largest_nodes,
    })
}

/// Removes every edge lying inside some `k`-clique that contains `node`.
pub fn damage(g: &ComplexGraph, node: usize, k: usize) -> Result<ComplexGraph> {
    if node >= g.n() {
        return Err(Error::IndexOutOfRange { index: node, n: g.n() });
    }
    if k < 2 {
        return Err(Error::TooSmall { size: k, min: 2 });
    }
    let mut doomed = Vec::new();
    for c in k_cliques(g, k).into_iter().filter(|c| c.contains(node)) {
        let members = c.as_slice();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                doomed.push((i, j));
            }
        }
    }
    Ok(g.without_edges(doomed))
}
