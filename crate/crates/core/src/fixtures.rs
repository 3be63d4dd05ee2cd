//! Deterministic benchmark graphs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{ComplexGraph, VertexSet};

pub const PLANTED_MODES: usize = 12;
pub const PLANTED_SIZE: usize = 5;

/// Twelve vertices: a strong, nearly phase-coherent 5-clique on `0..5`, a
/// weaker 4-clique on `5..9` and triangle on `9..12`, joined by sparse weak
/// edges of random phase. The planted set is the only 5-clique.
pub fn planted_clique() -> (ComplexGraph, VertexSet) {
    let group = |v: usize| match v {
        0..5 => 0,
        5..9 => 1,
        _ => 2,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut edges = Vec::new();
    for i in 0..PLANTED_MODES {
        for j in (i + 1)..PLANTED_MODES {
            let jitter: f64 = rng.random_range(-0.15..0.15);
            let u: f64 = rng.random();
            let phase: f64 = rng.random_range(-PI..PI);
            if group(i) == group(j) {
                let magnitude = if group(i) == 0 { 1.0 } else { 0.5 };
                edges.push((i, j, Complex64::from_polar(magnitude, jitter)));
            } else if u < 0.3 {
                edges.push((i, j, Complex64::from_polar(0.2, phase)));
            }
        }
    }
    let g = ComplexGraph::from_edges(PLANTED_MODES, edges).expect("fixture edges are valid");
    (g, VertexSet::from_unsorted(0..PLANTED_SIZE))
}

/// Ring of five triangles on ten vertices starting at `base`: hubs
/// `base..base+5` form a 5-cycle and tip `base+5+i` closes the triangle on
/// hubs `i, i+1`.
fn triangle_ring(base: usize, weight: Complex64, edges: &mut Vec<(usize, usize, Complex64)>) {
    for i in 0..5 {
        let (a, b, tip) = (base + i, base + (i + 1) % 5, base + 5 + i);
        edges.push((a.min(b), a.max(b), weight));
        edges.push((a, tip, weight));
        edges.push((b, tip, weight));
    }
}

/// Magnitudes of the three edge tiers of [`two_community`].
pub const COMMUNITY_A_WEIGHT: f64 = 0.3;
pub const COMMUNITY_B_WEIGHT: f64 = 0.8;
pub const BRIDGE_WEIGHT: f64 = 0.95;

/// Twenty vertices in two communities, each a ring of five triangles (so each
/// alone has `chi = 0`). Community A (`0..10`) has weak edges, community B
/// (`10..20`) strong ones. Two bridge triangles each join one A hub to a B
/// ring edge through the strongest edges, with phases that nearly cancel, so
/// they appear last in the magnitude filtration and first disappear under the
/// density filter.
pub fn two_community() -> ComplexGraph {
    let mut edges = Vec::new();
    triangle_ring(0, Complex64::new(COMMUNITY_A_WEIGHT, 0.0), &mut edges);
    triangle_ring(10, Complex64::new(COMMUNITY_B_WEIGHT, 0.0), &mut edges);
    // 0.8 + 0.95 (e^{i(pi - a)} + e^{i(pi + a)}) = 0.8 - 1.9 cos a
    let a = (0.9 * COMMUNITY_B_WEIGHT / (2.0 * BRIDGE_WEIGHT)).acos();
    let up = Complex64::from_polar(BRIDGE_WEIGHT, PI - a);
    let down = Complex64::from_polar(BRIDGE_WEIGHT, PI + a);
    for (hub_a, hub_b) in [(0usize, 10usize), (2, 12)] {
        edges.push((hub_a, hub_b, up));
        edges.push((hub_a, hub_b + 1, down));
    }
    ComplexGraph::from_edges(20, edges).expect("fixture edges are valid")
}

/// Band graph on `n` vertices with edges `|i - j| <= 3`, so its 4-cliques are
/// the windows `{i, .., i + 3}` chained through shared triangles. Magnitudes
/// peak in the middle of the chain and fall toward both ends; phases are
/// coherent, so window densities are graded the same way.
pub fn clique_chain(n: usize) -> ComplexGraph {
    let centre = (n as f64 - 1.0) / 2.0;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n.min(i + 4) {
            let mid = (i + j) as f64 / 2.0;
            let magnitude = 1.0 - 0.8 * ((mid - centre).abs() / centre.max(1.0));
            let phase = 0.05 * (i + 2 * j) as f64;
            edges.push((i, j, Complex64::from_polar(magnitude, phase)));
        }
    }
    ComplexGraph::from_edges(n, edges).expect("fixture edges are valid")
}
