use serde::Serialize;

use crate::cliques::k_cliques;
use crate::error::{Error, Result};
use crate::graph::{ComplexGraph, VertexSet};

/// Lifetime of one `k`-clique under the growing filtration `|w| <= omega_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistencePair {
    pub clique: VertexSet,
    /// Threshold at which the last internal edge appears.
    pub birth: f64,
    /// Threshold at which the clique is absorbed into a `(k+1)`-clique;
    /// `+inf` if it never is.
    pub death: f64,
}

/// Birth is the largest internal edge magnitude. Death is the smallest, over
/// outside vertices adjacent to every member, of the largest edge magnitude
/// joining that vertex to the clique, clamped below by the birth.
pub fn clique_persistence(g: &ComplexGraph, k: usize) -> Result<Vec<PersistencePair>> {
    if k < 2 {
        return Err(Error::TooSmall { size: k, min: 2 });
    }
    let pairs = k_cliques(g, k)
        .into_iter()
        .map(|clique| {
            let members = clique.as_slice();
            let birth = members
                .iter()
                .enumerate()
                .flat_map(|(a, &i)| members[a + 1..].iter().map(move |&j| (i, j)))
                .map(|(i, j)| g.weight(i, j).norm())
                .fold(0.0, f64::max);
            let death = (0..g.n())
                .filter(|&v| !clique.contains(v) && members.iter().all(|&m| g.has_edge(v, m)))
                .map(|v| members.iter().map(|&m| g.weight(v, m).norm()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min)
                .max(birth);
            PersistencePair { clique, birth, death }
        })
        .collect();
    Ok(pairs)
}
