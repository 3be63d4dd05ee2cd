//! From sampled patterns to weighted k-cliques.
//!
//! Each shot is read as the set of modes that fired, shrunk greedily to a
//! clique and then grown by local search toward the target size. The score
//! throughout is the residual clique density, so complex phases that cancel
//! inside a subgraph count against it.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{clique_density, is_clique, ComplexGraph, VertexSet};
use crate::sampler::{Pattern, SampleBatch};
use crate::tda::CliqueComplex;

pub const DEFAULT_MAX_ITERS: usize = 50;
pub const DEFAULT_CLIQUE_BUDGET: u128 = 20_000_000;

const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clique {
    pub vertices: VertexSet,
    pub density: f64,
}

impl Clique {
    /// Scores `vertices` in `g`; sets below two vertices get density 0.
    pub fn scored(g: &ComplexGraph, vertices: VertexSet) -> Self {
        let density = score(g, &vertices);
        Clique { vertices, density }
    }

    pub fn k(&self) -> usize {
        self.vertices.len()
    }
}

fn score(g: &ComplexGraph, s: &VertexSet) -> f64 {
    if s.len() < 2 {
        0.0
    } else {
        clique_density(g, s).expect("vertices validated by caller")
    }
}

/// Modes with at least one photon, ascending.
pub fn pattern_to_subset(p: &Pattern) -> VertexSet {
    VertexSet::from_unsorted(p.counts().iter().enumerate().filter(|(_, &c)| c >= 1).map(|(i, _)| i))
}

/// Removes, one at a time, the vertex whose removal leaves the densest
/// residual set, until a clique remains. Ties go to the smallest index.
pub fn greedy_shrink(g: &ComplexGraph, s: &VertexSet) -> Result<Clique> {
    if s.is_empty() {
        return Err(Error::TooSmall { size: 0, min: 1 });
    }
    if let Some(index) = s.iter().find(|&v| v >= g.n()) {
        return Err(Error::IndexOutOfRange { index, n: g.n() });
    }
    let mut current = s.clone();
    while !is_clique(g, &current) {
        let mut best: Option<(usize, f64)> = None;
        for v in current.iter() {
            let value = score(g, &current.without(v));
            if best.is_none_or(|(_, b)| value > b + TIE_EPS) {
                best = Some((v, value));
            }
        }
        let (drop, _) = best.expect("non-clique has at least two vertices");
        current = current.without(drop);
    }
    Ok(Clique::scored(g, current))
}

/// Vertices outside `s` adjacent to every member of `s`.
fn common_neighbors(g: &ComplexGraph, s: &VertexSet) -> Vec<usize> {
    let mut acc = FixedBitSet::with_capacity(g.n());
    acc.insert_range(..);
    for v in s.iter() {
        acc.intersect_with(g.neighbors(v));
    }
    acc.ones().filter(|&w| !s.contains(w)).collect()
}

fn expand(g: &ComplexGraph, mut current: VertexSet, target_k: usize) -> VertexSet {
    while current.len() < target_k {
        let mut best: Option<(usize, f64)> = None;
        for w in common_neighbors(g, &current) {
            let value = score(g, &current.with(w));
            if best.is_none_or(|(_, b)| value > b + TIE_EPS) {
                best = Some((w, value));
            }
        }
        match best {
            Some((w, _)) => current = current.with(w),
            None => break,
        }
    }
    current
}

fn shrink_to(g: &ComplexGraph, mut current: VertexSet, target_k: usize) -> VertexSet {
    while current.len() > target_k {
        let mut best: Option<(usize, f64)> = None;
        for v in current.iter() {
            let value = score(g, &current.without(v));
            if best.is_none_or(|(_, b)| value > b + TIE_EPS) {
                best = Some((v, value));
            }
        }
        current = current.without(best.expect("non-empty").0);
    }
    current
}

/// Grows `c` to exactly `target_k` vertices; `None` when the target is not
/// reached within `max_iters` swap moves.
///
/// Expansion adds the common neighbour giving the densest clique. When no
/// common neighbour exists, a swap replaces one member by a common neighbour
/// of the others; swaps that open room for growth are preferred, otherwise a
/// swap must strictly raise the density.
pub fn local_search(g: &ComplexGraph, c: &Clique, target_k: usize, max_iters: usize) -> Option<Clique> {
    if !is_clique(g, &c.vertices) || target_k == 0 {
        return None;
    }
    if c.k() >= target_k {
        return Some(Clique::scored(g, shrink_to(g, c.vertices.clone(), target_k)));
    }
    let mut current = expand(g, c.vertices.clone(), target_k);
    let mut iters = 0;
    while current.len() < target_k {
        if iters == max_iters {
            return None;
        }
        iters += 1;
        let current_score = score(g, &current);
        let mut best_growth: Option<(VertexSet, f64)> = None;
        let mut best_plain: Option<(VertexSet, f64)> = None;
        for v in current.iter() {
            let rest = current.without(v);
            for w in common_neighbors(g, &rest) {
                if w == v {
                    continue;
                }
                let candidate = rest.with(w);
                let value = score(g, &candidate);
                let slot = if common_neighbors(g, &candidate).is_empty() {
                    &mut best_plain
                } else {
                    &mut best_growth
                };
                if slot.as_ref().is_none_or(|(_, b)| value > b + TIE_EPS) {
                    *slot = Some((candidate, value));
                }
            }
        }
        let next = match (best_growth, best_plain) {
            (Some((set, _)), _) => set,
            (None, Some((set, value))) if value > current_score + TIE_EPS => set,
            _ => return None,
        };
        current = expand(g, next, target_k);
    }
    Some(Clique::scored(g, current))
}

/// Outcome of post-processing a batch at one target size.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub target_k: usize,
    pub shots_in: usize,
    /// One entry per successful shot, in shot order.
    pub cliques_found: Vec<Clique>,
}

impl SearchReport {
    pub fn successes(&self) -> usize {
        self.cliques_found.len()
    }

    pub fn success_rate(&self) -> f64 {
        if self.shots_in == 0 {
            0.0
        } else {
            self.successes() as f64 / self.shots_in as f64
        }
    }

    /// Fraction of shots that ended on exactly this vertex set.
    pub fn rate_of(&self, s: &VertexSet) -> f64 {
        if self.shots_in == 0 {
            return 0.0;
        }
        let hits = self.cliques_found.iter().filter(|c| &c.vertices == s).count();
        hits as f64 / self.shots_in as f64
    }

    /// Distinct cliques with hit counts, densest first then lexicographic.
    pub fn distinct(&self) -> Vec<(Clique, usize)> {
        let mut map: BTreeMap<VertexSet, (f64, usize)> = BTreeMap::new();
        for c in &self.cliques_found {
            map.entry(c.vertices.clone()).or_insert((c.density, 0)).1 += 1;
        }
        let mut out: Vec<(Clique, usize)> = map
            .into_iter()
            .map(|(vertices, (density, hits))| (Clique { vertices, density }, hits))
            .collect();
        out.sort_by(|(a, _), (b, _)| {
            b.density
                .partial_cmp(&a.density)
                .unwrap()
                .then_with(|| a.vertices.cmp(&b.vertices))
        });
        out
    }

    /// Success counts over `bins` equal-width density bins on `[0, max density]`.
    pub fn density_histogram(&self, bins: usize) -> Vec<(f64, f64, usize)> {
        let top = self.cliques_found.iter().map(|c| c.density).fold(0.0, f64::max);
        if bins == 0 {
            return Vec::new();
        }
        let width = if top > 0.0 {
            top / bins as f64
        } else {
            1.0 / bins as f64
        };
        let mut counts = vec![0usize; bins];
        for c in &self.cliques_found {
            let idx = ((c.density / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, n)| (i as f64 * width, (i + 1) as f64 * width, n))
            .collect()
    }
}

/// pattern -> subset -> greedy shrink -> local search, for every shot.
/// Vacuum shots and unreachable targets count as failures.
pub fn find_cliques(g: &ComplexGraph, b: &SampleBatch, target_k: usize, max_iters: usize) -> Result<SearchReport> {
    if b.modes != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: b.modes,
        });
    }
    let outcomes: Vec<Option<Clique>> = b
        .patterns
        .par_iter()
        .map(|p| {
            let subset = pattern_to_subset(p);
            if subset.is_empty() {
                return None;
            }
            let shrunk = greedy_shrink(g, &subset).ok()?;
            local_search(g, &shrunk, target_k, max_iters).filter(|c| c.k() == target_k)
        })
        .collect();
    Ok(SearchReport {
        target_k,
        shots_in: b.patterns.len(),
        cliques_found: outcomes.into_iter().flatten().collect(),
    })
}

/// Ratio of two success rates.
pub fn enhancement(p_num: f64, p_den: f64) -> Result<f64> {
    if p_den <= 0.0 {
        return Err(Error::UndefinedRatio { num: p_num, den: p_den });
    }
    Ok(p_num / p_den)
}

/// Maximal cliques by Bron-Kerbosch with Tomita pivoting; each sorted, list sorted.
pub fn maximal_cliques(g: &ComplexGraph) -> Vec<VertexSet> {
    let n = g.n();
    let mut out = Vec::new();
    let mut p = FixedBitSet::with_capacity(n);
    p.insert_range(..);
    let x = FixedBitSet::with_capacity(n);
    bron_kerbosch(g, &mut Vec::new(), p, x, &mut out);
    out.sort();
    out
}

fn bron_kerbosch(
    g: &ComplexGraph,
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<VertexSet>,
) {
    if p.is_clear() && x.is_clear() {
        out.push(VertexSet::from_unsorted(r.iter().copied()));
        return;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| p.intersection_count(g.neighbors(u)))
        .expect("P or X non-empty");
    let mut candidates = p.clone();
    candidates.difference_with(g.neighbors(pivot));
    for v in candidates.ones() {
        let nv = g.neighbors(v);
        let mut p_next = p.clone();
        p_next.intersect_with(nv);
        let mut x_next = x.clone();
        x_next.intersect_with(nv);
        r.push(v);
        bron_kerbosch(g, r, p_next, x_next, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}

/// All `k`-cliques by ordered extension (each clique produced once,
/// lexicographic order).
pub fn k_cliques(g: &ComplexGraph, k: usize) -> Vec<VertexSet> {
    fn extend(g: &ComplexGraph, k: usize, current: &mut Vec<usize>, cand: FixedBitSet, out: &mut Vec<VertexSet>) {
        if current.len() == k {
            out.push(VertexSet::try_new(current.clone()).expect("ascending"));
            return;
        }
        for v in cand.ones() {
            let mut next = cand.clone();
            next.intersect_with(g.neighbors(v));
            // keep only larger indices
            next.remove_range(..v + 1);
            if next.count_ones(..) + current.len() + 1 < k {
                continue;
            }
            current.push(v);
            extend(g, k, current, next, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut all = FixedBitSet::with_capacity(g.n());
    all.insert_range(..);
    extend(g, k, &mut Vec::new(), all, &mut out);
    out
}

/// `k`-cliques with their densities.
pub fn scored_k_cliques(g: &ComplexGraph, k: usize) -> Vec<Clique> {
    k_cliques(g, k).into_iter().map(|s| Clique::scored(g, s)).collect()
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Every clique with 1..=k_max vertices, from maximal cliques and downward closure.
pub fn enumerate_cliques(g: &ComplexGraph, k_max: usize) -> Result<CliqueComplex> {
    enumerate_cliques_with_budget(g, k_max, DEFAULT_CLIQUE_BUDGET)
}

pub fn enumerate_cliques_with_budget(g: &ComplexGraph, k_max: usize, budget: u128) -> Result<CliqueComplex> {
    let maximal = maximal_cliques(g);
    let required: u128 = maximal
        .iter()
        .map(|m| {
            (1..=k_max.min(m.len()))
                .map(|j| binomial_u128(m.len(), j))
                .sum::<u128>()
        })
        .fold(0, u128::saturating_add);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let mut by_size: Vec<BTreeSet<VertexSet>> = vec![BTreeSet::new(); k_max];
    for m in &maximal {
        let members = m.as_slice();
        for size in 1..=k_max.min(members.len()) {
            for_each_subset(members, size, |sub| {
                by_size[size - 1].insert(VertexSet::try_new(sub.to_vec()).expect("ascending"));
            });
        }
    }
    let lists = by_size
        .into_iter()
        .map(|set| set.into_iter().map(|s| Clique::scored(g, s)).collect())
        .collect();
    Ok(CliqueComplex::from_sorted_lists(g.n(), k_max, lists))
}

fn for_each_subset<F: FnMut(&[usize])>(items: &[usize], size: usize, mut f: F) {
    fn go<F: FnMut(&[usize])>(items: &[usize], size: usize, start: usize, cur: &mut Vec<usize>, f: &mut F) {
        if cur.len() == size {
            f(cur);
            return;
        }
        let need = size - cur.len();
        for i in start..=items.len() - need {
            cur.push(items[i]);
            go(items, size, i + 1, cur, f);
            cur.pop();
        }
    }
    go(items, size, 0, &mut Vec::with_capacity(size), &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn unit(n: usize, edges: &[(usize, usize)]) -> ComplexGraph {
        ComplexGraph::from_edges(n, edges.iter().map(|&(i, j)| (i, j, Complex64::new(1.0, 0.0)))).unwrap()
    }

    fn complete(n: usize) -> ComplexGraph {
        let edges: Vec<_> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        unit(n, &edges)
    }

    fn vs(items: &[usize]) -> VertexSet {
        VertexSet::from_unsorted(items.iter().copied())
    }

    #[test]
    fn subsets_from_patterns() {
        assert_eq!(pattern_to_subset(&Pattern::new(vec![1, 0, 2, 0])), vs(&[0, 2]));
        assert!(pattern_to_subset(&Pattern::new(vec![0, 0, 0])).is_empty());
        assert_eq!(pattern_to_subset(&Pattern::new(vec![1, 1, 1])), vs(&[0, 1, 2]));
    }

    #[test]
    fn shrink_keeps_cliques() {
        let g = complete(4);
        let c = greedy_shrink(&g, &vs(&[0, 1, 3])).unwrap();
        assert_eq!(c.vertices, vs(&[0, 1, 3]));
        assert!((c.density - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shrink_drops_pendant() {
        let mut edges: Vec<_> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        edges.push((0, 4));
        let g = unit(5, &edges);
        // residual densities: dropping the pendant gives 12/12, dropping 0 gives 6/12,
        // dropping 1, 2 or 3 gives 8/12
        let all = vs(&[0, 1, 2, 3, 4]);
        let scores: Vec<f64> = all
            .iter()
            .map(|v| clique_density(&g, &all.without(v)).unwrap())
            .collect();
        assert_eq!(scores.iter().cloned().fold(f64::MIN, f64::max), scores[4]);
        assert_eq!(greedy_shrink(&g, &all).unwrap().vertices, vs(&[0, 1, 2, 3]));
    }

    #[test]
    fn shrink_tie_break() {
        let g = unit(3, &[(0, 1), (1, 2)]);
        assert_eq!(greedy_shrink(&g, &vs(&[0, 1, 2])).unwrap().vertices, vs(&[1, 2]));
        assert!(greedy_shrink(&g, &VertexSet::empty()).is_err());
    }

    #[test]
    fn expansion_in_complete_graph() {
        let g = complete(5);
        let start = Clique::scored(&g, vs(&[1, 3]));
        let out = local_search(&g, &start, 5, 0).unwrap();
        assert_eq!(out.vertices, vs(&[0, 1, 2, 3, 4]));
    }

    /// Triangle {0,1,2} has no common neighbour; the only 4-clique is {1,2,3,4}.
    fn swap_fixture() -> ComplexGraph {
        unit(
            6,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 4),
                (0, 5),
                (4, 5),
            ],
        )
    }

    #[test]
    fn swap_reaches_hidden_clique() {
        let g = swap_fixture();
        let fours = k_cliques(&g, 4);
        assert_eq!(fours, vec![vs(&[1, 2, 3, 4])]);
        assert!(common_neighbors(&g, &vs(&[0, 1, 2])).is_empty());
        let start = Clique::scored(&g, vs(&[0, 1, 2]));
        assert_eq!(local_search(&g, &start, 4, 0), None);
        assert_eq!(local_search(&g, &start, 4, 1).unwrap().vertices, vs(&[1, 2, 3, 4]));
    }

    #[test]
    fn unreachable_target_fails() {
        let g = swap_fixture();
        let start = Clique::scored(&g, vs(&[1, 2]));
        assert_eq!(local_search(&g, &start, 5, 50), None);
    }

    #[test]
    fn oversize_clique_is_trimmed() {
        let g = complete(6);
        let start = Clique::scored(&g, vs(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(local_search(&g, &start, 3, 0).unwrap().k(), 3);
    }

    #[test]
    fn ratio_rules() {
        assert!((enhancement(0.3, 0.1).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(enhancement(0.25, 0.25).unwrap(), 1.0);
        assert!(matches!(enhancement(0.2, 0.0), Err(Error::UndefinedRatio { .. })));
    }

    #[test]
    fn complex_counts() {
        assert_eq!(enumerate_cliques(&complete(4), 4).unwrap().counts(), vec![4, 6, 4, 1]);
        let c5 = unit(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        assert_eq!(enumerate_cliques(&c5, 3).unwrap().counts(), vec![5, 5, 0]);
        assert!(matches!(
            enumerate_cliques_with_budget(&complete(10), 10, 100),
            Err(Error::BudgetExceeded {
                required: 1023,
                budget: 100
            })
        ));
    }

    #[test]
    fn maximal_cliques_of_two_triangles() {
        let g = unit(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        assert_eq!(maximal_cliques(&g), vec![vs(&[0, 1, 2]), vs(&[2, 3, 4])]);
        assert_eq!(maximal_cliques(&ComplexGraph::edgeless(2)), vec![vs(&[0]), vs(&[1])]);
    }
}
