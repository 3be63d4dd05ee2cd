use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use gbs_tda::cliques::{enumerate_cliques, greedy_shrink, k_cliques, local_search};
use gbs_tda::encoding::{encode, singular_values, takagi, CMatrix};
use gbs_tda::entropy::renyi_entropy;
use gbs_tda::graph::{
    clique_density, edge_filter, is_clique, load_graph, random_dual_layer, save_graph, ComplexGraph, FilterMode,
    VertexSet, WeightLaw,
};
use gbs_tda::hafnian::hafnian;
use gbs_tda::percolation::{damage, percolation_clusters};
use gbs_tda::sampler::{enumerate_distribution, pattern_probability, sample_gbs, sample_squashed, Pattern};
use gbs_tda::tda::{betti_numbers, boundary_matrix, euler_characteristic, filtration_surface, gf2_rank};

fn law() -> WeightLaw {
    WeightLaw::uniform((-1.0, 1.0), (-1.0, 1.0))
}

fn graph(max_n: usize) -> impl Strategy<Value = ComplexGraph> {
    (1..=max_n, 0.0..=1.0f64, any::<u64>()).prop_map(|(n, p, seed)| random_dual_layer(n, p, law(), seed).unwrap())
}

fn graph_with_perm(max_n: usize) -> impl Strategy<Value = (ComplexGraph, Vec<usize>)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn graph_with_subset(max_n: usize) -> impl Strategy<Value = (ComplexGraph, VertexSet)> {
    graph(max_n)
        .prop_flat_map(|g| {
            let n = g.n();
            (Just(g), proptest::collection::btree_set(0..n, 1..=n))
        })
        .prop_map(|(g, s)| (g, VertexSet::from_unsorted(s)))
}

fn relabel(s: &VertexSet, perm: &[usize]) -> VertexSet {
    VertexSet::from_unsorted(s.iter().map(|v| perm[v]))
}

fn complex_matrix(max_n: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
            let mut m = DMatrix::from_fn(n, n, |i, j| Complex64::new(v[i * n + j].0, v[i * n + j].1));
            m = &m + m.transpose();
            m
        })
    })
}

fn matching_sum(m: &CMatrix, free: &[usize]) -> Complex64 {
    match free {
        [] => Complex64::new(1.0, 0.0),
        [first, rest @ ..] => (0..rest.len())
            .map(|pos| {
                let mut others = rest.to_vec();
                let partner = others.remove(pos);
                m[(*first, partner)] * matching_sum(m, &others)
            })
            .sum(),
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Components of the plain graph by an explicit union-find on edges.
fn components(g: &ComplexGraph) -> usize {
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(g.n());
    for (i, j, _) in g.edges() {
        uf.union(i, j);
    }
    (0..g.n()).map(|v| uf.find(v)).collect::<BTreeSet<_>>().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_ignores_global_phase((g, s) in graph_with_subset(8), theta in 0.0..std::f64::consts::TAU) {
        prop_assume!(s.len() >= 2);
        let turned = g.scaled(Complex64::from_polar(1.0, theta));
        let a = clique_density(&g, &s).unwrap();
        let b = clique_density(&turned, &s).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn leq_filters_compose(g in graph(9), a in 0.0..1.5f64, b in 0.0..1.5f64) {
        let twice = edge_filter(&edge_filter(&g, a, FilterMode::KeepLeq), b, FilterMode::KeepLeq);
        prop_assert_eq!(twice, edge_filter(&g, a.min(b), FilterMode::KeepLeq));
    }

    #[test]
    fn relabeling_commutes_with_density((g, perm) in graph_with_perm(8), bits in any::<u16>()) {
        let s = VertexSet::from_unsorted((0..g.n()).filter(|v| bits >> v & 1 == 1));
        let h = g.permuted(&perm).unwrap();
        let t = relabel(&s, &perm);
        prop_assert_eq!(is_clique(&g, &s), is_clique(&h, &t));
        if s.len() >= 2 {
            prop_assert!((clique_density(&g, &s).unwrap() - clique_density(&h, &t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn load_inverts_save(g in graph(10)) {
        prop_assert_eq!(load_graph(save_graph(&g).as_slice()).unwrap(), g);
    }

    #[test]
    fn takagi_values_are_singular_values(a in complex_matrix(8)) {
        let (u, lambdas) = takagi(&a).unwrap();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            lambdas.len(),
            lambdas.iter().map(|&l| Complex64::new(l, 0.0)),
        ));
        prop_assert!(max_abs(&(&u * diag * u.transpose() - &a)) < 1e-10);
        let mut reference: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
        reference.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in reference.iter().zip(&lambdas) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert_eq!(singular_values(&a).len(), lambdas.len());
    }

    #[test]
    fn encode_is_scale_consistent(g in graph(7), scale in 0.01..50.0f64, target in 0.1..0.95f64) {
        prop_assume!(g.edge_count() > 0);
        let a = encode(&g, target, 0.0).unwrap();
        let b = encode(&g.scaled(Complex64::new(scale, 0.0)), target, 0.0).unwrap();
        prop_assert!(max_abs(&(a.kernel() - b.kernel())) < 1e-10);
        for (x, y) in a.lambdas().iter().zip(b.lambdas()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn relabeling_conjugates_encoding((g, perm) in graph_with_perm(7)) {
        prop_assume!(g.edge_count() > 0);
        let a = encode(&g, 0.7, 0.0).unwrap();
        let b = encode(&g.permuted(&perm).unwrap(), 0.7, 0.0).unwrap();
        let n = g.n();
        let moved = CMatrix::from_fn(n, n, |i, j| {
            let (pi, pj) = (perm.iter().position(|&x| x == i).unwrap(), perm.iter().position(|&x| x == j).unwrap());
            a.kernel()[(pi, pj)]
        });
        prop_assert!(max_abs(&(b.kernel() - moved)) < 1e-10);
    }

    #[test]
    fn hafnian_matches_matching_sum(a in complex_matrix(10)) {
        let got = hafnian(&a).unwrap();
        let n = a.nrows();
        if n % 2 == 1 {
            prop_assert_eq!(got, Complex64::new(0.0, 0.0));
        } else {
            let want = matching_sum(&a, &(0..n).collect::<Vec<_>>());
            prop_assert!((got - want).norm() <= 1e-9 * want.norm().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn greedy_shrink_returns_a_sub_clique((g, s) in graph_with_subset(9)) {
        let c = greedy_shrink(&g, &s).unwrap();
        prop_assert!(is_clique(&g, &c.vertices));
        prop_assert!(c.vertices.is_subset_of(&s));
        prop_assert!(!c.vertices.is_empty());
    }

    #[test]
    fn local_search_hits_are_cliques_of_target_size((g, s) in graph_with_subset(9), k in 1usize..6) {
        let start = greedy_shrink(&g, &s).unwrap();
        if let Some(c) = local_search(&g, &start, k, 50) {
            prop_assert_eq!(c.k(), k);
            prop_assert!(is_clique(&g, &c.vertices));
        }
    }

    #[test]
    fn cliques_are_downward_closed(g in graph(9)) {
        let c = enumerate_cliques(&g, g.n() + 1).unwrap();
        for k in 2..=c.max_size() {
            for q in c.cliques(k) {
                let faces: BTreeSet<VertexSet> = q.vertices.iter().map(|v| q.vertices.without(v)).collect();
                prop_assert_eq!(faces.len(), k);
                for f in &faces {
                    prop_assert!(c.index_of(f).is_some());
                }
            }
        }
    }

    #[test]
    fn relabeling_permutes_cliques((g, perm) in graph_with_perm(8), k in 1usize..5) {
        let mapped: BTreeSet<VertexSet> = k_cliques(&g, k).iter().map(|s| relabel(s, &perm)).collect();
        let direct: BTreeSet<VertexSet> = k_cliques(&g.permuted(&perm).unwrap(), k).into_iter().collect();
        prop_assert_eq!(mapped, direct);
    }

    #[test]
    fn homology_identities(g in graph(10)) {
        let c = enumerate_cliques(&g, g.n() + 1).unwrap();
        let top = c.max_size();
        let profile = betti_numbers(&c, top.saturating_sub(1)).unwrap();
        prop_assert_eq!(profile.euler_characteristic(), euler_characteristic(&c));
        prop_assert_eq!(profile.betti[0], components(&g));
        for k in 1..=top + 1 {
            let b = boundary_matrix(&c, k).unwrap();
            prop_assert!(gf2_rank(&b) <= b.rows.len().min(b.cols.len()));
            let next = boundary_matrix(&c, k + 1).unwrap();
            prop_assert!(b.bits.mul(&next.bits).unwrap().is_zero());
        }
        let incidence = boundary_matrix(&c, 2).unwrap();
        prop_assert_eq!(gf2_rank(&incidence), g.n() - components(&g));
    }

    #[test]
    fn betti_numbers_ignore_labels((g, perm) in graph_with_perm(8)) {
        let a = enumerate_cliques(&g, g.n() + 1).unwrap();
        let b = enumerate_cliques(&g.permuted(&perm).unwrap(), g.n() + 1).unwrap();
        let dmax = a.max_size().saturating_sub(1);
        prop_assert_eq!(betti_numbers(&a, dmax).unwrap(), betti_numbers(&b, dmax).unwrap());
    }

    #[test]
    fn edge_counts_grow_along_omega(g in graph(8)) {
        let omega = [0.2, 0.5, 0.8, 1.1, 1.5];
        let s = filtration_surface(&g, &omega, &[0.0], 3).unwrap();
        let m2: Vec<usize> = (0..omega.len()).map(|i| s.cell(i, 0).unwrap().counts.get(1).copied().unwrap_or(0)).collect();
        prop_assert!(m2.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn clusters_partition_cliques(g in graph(10), k in 2usize..5) {
        let r = percolation_clusters(&g, k).unwrap();
        let mut seen = BTreeSet::new();
        for (nodes, members) in r.clusters.iter().zip(&r.cluster_cliques) {
            let union: BTreeSet<usize> = members.iter().flat_map(|c| c.iter()).collect();
            prop_assert_eq!(union, nodes.iter().collect::<BTreeSet<_>>());
            for c in members {
                prop_assert!(seen.insert(c.clone()));
            }
        }
        prop_assert_eq!(seen, k_cliques(&g, k).into_iter().collect::<BTreeSet<_>>());
        prop_assert!((r.phi - r.largest_nodes as f64 / g.n() as f64).abs() < 1e-15);
    }

    #[test]
    fn phi_never_grows_as_edges_go(g in graph(10), k in 2usize..5) {
        let mut last = f64::INFINITY;
        for t in [0.0, 0.3, 0.6, 0.9, 1.2] {
            let phi = percolation_clusters(&edge_filter(&g, t, FilterMode::KeepGeq), k).unwrap().phi;
            prop_assert!(phi <= last);
            last = phi;
        }
    }

    #[test]
    fn damage_stays_inside_the_clique_union(g in graph(9), node in 0usize..9, k in 2usize..5) {
        prop_assume!(node < g.n());
        let hurt = damage(&g, node, k).unwrap();
        let mut union = BTreeSet::new();
        for c in k_cliques(&g, k).into_iter().filter(|c| c.contains(node)) {
            for (a, i) in c.iter().enumerate() {
                for j in c.iter().skip(a + 1) {
                    union.insert((i, j));
                }
            }
        }
        for (i, j, w) in g.edges() {
            prop_assert_eq!(hurt.has_edge(i, j), !union.contains(&(i.min(j), i.max(j))));
            if hurt.has_edge(i, j) {
                prop_assert_eq!(hurt.weight(i, j), w);
            }
        }
        prop_assert_eq!(hurt.edge_count() + union.len(), g.edge_count());
    }

    #[test]
    fn renyi_is_symmetric_and_falls_with_alpha(
        weights in proptest::collection::vec(0.01..1.0f64, 2..12),
        a1 in 0.1..5.0f64,
        gap in 0.1..5.0f64,
        rotate in 0usize..12,
    ) {
        let total: f64 = weights.iter().sum();
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut q = p.clone();
        q.rotate_left(rotate % p.len());
        let h = renyi_entropy(&p, a1).unwrap();
        prop_assert!((h - renyi_entropy(&q, a1).unwrap()).abs() < 1e-12);
        let h2 = renyi_entropy(&p, a1 + gap).unwrap();
        let spread = p.iter().cloned().fold(0.0, f64::max) - p.iter().cloned().fold(1.0, f64::min);
        if spread > 1e-3 {
            prop_assert!(h2 < h);
        } else {
            prop_assert!(h2 <= h + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mass_is_bounded_and_grows_with_cutoff(g in graph(4)) {
        prop_assume!(g.edge_count() > 0);
        let e = encode(&g, 0.6, 0.0).unwrap();
        let mut last = 0.0;
        for cutoff in [0u32, 2, 4, 6, 8] {
            let d = enumerate_distribution(&e, cutoff, cutoff).unwrap();
            prop_assert!(d.mass() <= 1.0 + 1e-12);
            prop_assert!(d.mass() >= last - 1e-15);
            for (p, w) in d.entries() {
                if p.total() % 2 == 1 {
                    prop_assert_eq!(*w, 0.0);
                }
            }
            last = d.mass();
        }
    }

    #[test]
    fn probabilities_follow_relabeling((g, perm) in graph_with_perm(4), counts in proptest::collection::vec(0u32..3, 4)) {
        prop_assume!(g.edge_count() > 0 && g.n() == 4);
        let a = encode(&g, 0.7, 0.0).unwrap();
        let b = encode(&g.permuted(&perm).unwrap(), 0.7, 0.0).unwrap();
        let mut moved = vec![0u32; 4];
        for (v, &c) in counts.iter().enumerate() {
            moved[perm[v]] = c;
        }
        let pa = pattern_probability(&a, &Pattern::new(counts)).unwrap();
        let pb = pattern_probability(&b, &Pattern::new(moved)).unwrap();
        prop_assert!((pa - pb).abs() < 1e-12);
    }

    #[test]
    fn samplers_ignore_thread_count(g in graph(5), seed in any::<u64>()) {
        prop_assume!(g.edge_count() > 0);
        let e = encode(&g, 0.7, 0.0).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                (sample_gbs(&e, 200, 6, 3, seed).unwrap(), sample_squashed(&e, 200, seed).unwrap())
            })
        };
        prop_assert_eq!(run(1), run(4));
    }
}
