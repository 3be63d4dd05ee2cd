//! Topological summaries of clique complexes.
//!
//! Counts and boundary matrices are indexed by clique size `k` (a `k`-clique
//! is a `(k-1)`-simplex). Betti numbers are reported by topological
//! dimension `d = k - 1`, with `r_1 = rank B_1 = 0`.

mod complex;
mod filtration;
mod gf2;
mod persistence;

pub use complex::CliqueComplex;
#[cfg(test)]
pub(crate) use filtration::surface_from_chi;
pub use filtration::{euler_entropy_path, filtration_surface, tpt_points, FiltrationSurface, SurfaceCell, TptPoint};
pub use gf2::Gf2Matrix;
pub use persistence::{clique_persistence, PersistencePair};

use serde::Serialize;

use crate::cliques::{enumerate_cliques, scored_k_cliques, Clique};
use crate::error::{Error, Result};
use crate::graph::{is_clique, ComplexGraph, VertexSet};

/// Incidence of `(k-1)`-cliques (rows) in `k`-cliques (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    pub k: usize,
    pub rows: Vec<VertexSet>,
    pub cols: Vec<VertexSet>,
    pub bits: Gf2Matrix,
}

/// `B_k` with rows and columns in lexicographic clique order. `B_1` has no
/// rows: the empty clique is not part of the complex.
pub fn boundary_matrix(c: &CliqueComplex, k: usize) -> Result<BoundaryMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("boundary index k must be at least 1".into()));
    }
    let rows: Vec<VertexSet> = if k == 1 {
        Vec::new()
    } else {
        c.cliques(k - 1).iter().map(|q| q.vertices.clone()).collect()
    };
    let cols: Vec<VertexSet> = c.cliques(k).iter().map(|q| q.vertices.clone()).collect();
    let mut bits = Gf2Matrix::zeros(rows.len(), cols.len());
    if k >= 2 {
        for (j, col) in cols.iter().enumerate() {
            for v in col.iter() {
                let face = col.without(v);
                let i = rows
                    .binary_search(&face)
                    .map_err(|_| Error::NonClosedComplex(format!("face {:?} missing", face.as_slice())))?;
                bits.set(i, j, true);
            }
        }
    }
    Ok(BoundaryMatrix { k, rows, cols, bits })
}

pub fn gf2_rank(b: &BoundaryMatrix) -> usize {
    b.bits.rank()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiProfile {
    /// `beta_0 ..= beta_dmax` by topological dimension.
    pub betti: Vec<usize>,
    /// `r_1 ..= r_{dmax+2}` by clique size.
    pub ranks: Vec<usize>,
    /// `m_1 ..= m_{dmax+2}` by clique size.
    pub counts: Vec<usize>,
}

impl BettiProfile {
    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

/// `beta_d = m_{d+1} - r_{d+1} - r_{d+2}` for `d = 0 ..= dmax`.
pub fn betti_numbers(c: &CliqueComplex, dmax: usize) -> Result<BettiProfile> {
    c.check_downward_closed()?;
    let top = dmax + 2;
    if c.size_limit() < top && c.is_truncated() {
        return Err(Error::InvalidArgument(format!(
            "complex enumerated only up to size {}; dimension {dmax} needs size {top}",
            c.size_limit()
        )));
    }
    let counts: Vec<usize> = (1..=top).map(|k| c.m(k)).collect();
    let mut ranks = vec![0usize; top];
    for k in 2..=top {
        ranks[k - 1] = gf2_rank(&boundary_matrix(c, k)?);
    }
    let betti = (0..=dmax)
        .map(|d| {
            let value = counts[d] as i64 - ranks[d] as i64 - ranks[d + 1] as i64;
            usize::try_from(value).map_err(|_| Error::Invariant(format!("negative Betti number at d = {d}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BettiProfile { betti, ranks, counts })
}

/// `V - E + T - ...` over every stored clique size.
pub fn euler_characteristic(c: &CliqueComplex) -> i64 {
    c.counts()
        .iter()
        .enumerate()
        .map(|(i, &m)| if i % 2 == 0 { m as i64 } else { -(m as i64) })
        .sum()
}

/// `ln |chi|`, with `-inf` marking `chi = 0`.
pub fn euler_entropy(chi: i64) -> f64 {
    if chi == 0 {
        f64::NEG_INFINITY
    } else {
        (chi.unsigned_abs() as f64).ln()
    }
}

/// Where the reference cliques come from.
#[derive(Debug, Clone, Copy)]
pub enum CliqueSource<'a> {
    Exhaustive,
    /// Cliques found elsewhere, e.g. by post-processing sampler output.
    List(&'a [VertexSet]),
}

/// Graph rebuilt from the edges of every `k_ref`-clique with density at least
/// `delta_t`. All vertices are kept.
pub fn density_filter_graph(
    g: &ComplexGraph,
    k_ref: usize,
    delta_t: f64,
    source: CliqueSource<'_>,
) -> Result<ComplexGraph> {
    if k_ref < 2 {
        return Err(Error::TooSmall { size: k_ref, min: 2 });
    }
    let candidates: Vec<Clique> = match source {
        CliqueSource::Exhaustive => scored_k_cliques(g, k_ref),
        CliqueSource::List(sets) => sets
            .iter()
            .map(|s| {
                if s.len() != k_ref {
                    return Err(Error::MixedCliqueSizes(k_ref, s.len()));
                }
                if !is_clique(g, s) {
                    return Err(Error::NotAClique(s.as_slice().to_vec()));
                }
                Ok(Clique::scored(g, s.clone()))
            })
            .collect::<Result<_>>()?,
    };
    let n = g.n();
    let mut keep = vec![false; n * n];
    for c in candidates.iter().filter(|c| c.density >= delta_t) {
        let m = c.vertices.as_slice();
        for (a, &i) in m.iter().enumerate() {
            for &j in &m[a + 1..] {
                keep[i * n + j] = true;
            }
        }
    }
    Ok(g.retain_edges(|i, j, _| keep[i * n + j]))
}

/// Full clique complex of [`density_filter_graph`].
pub fn density_filter_complex(
    g: &ComplexGraph,
    k_ref: usize,
    delta_t: f64,
    source: CliqueSource<'_>,
) -> Result<CliqueComplex> {
    let h = density_filter_graph(g, k_ref, delta_t, source)?;
    enumerate_cliques(&h, h.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn unit(n: usize, edges: &[(usize, usize)]) -> ComplexGraph {
        ComplexGraph::from_edges(n, edges.iter().map(|&(i, j)| (i, j, Complex64::new(1.0, 0.0)))).unwrap()
    }

    fn cycle4() -> ComplexGraph {
        unit(4, &[(0, 1), (1, 2), (2, 3), (0, 3)])
    }

    fn octahedron() -> ComplexGraph {
        // K_{2,2,2}: antipodal pairs (0,1), (2,3), (4,5) are the non-edges
        let mut edges = Vec::new();
        for i in 0..6 {
            for j in (i + 1)..6 {
                if j != i + 1 || i % 2 == 1 {
                    edges.push((i, j));
                }
            }
        }
        unit(6, &edges)
    }

    fn full_complex(g: &ComplexGraph) -> CliqueComplex {
        enumerate_cliques(g, g.n()).unwrap()
    }

    #[test]
    fn triangle_boundary() {
        let c = full_complex(&unit(3, &[(0, 1), (1, 2), (0, 2)]));
        let b = boundary_matrix(&c, 3).unwrap();
        assert_eq!((b.bits.rows(), b.bits.cols()), (3, 1));
        assert!((0..3).all(|i| b.bits.get(i, 0)));
    }

    #[test]
    fn cycle_incidence() {
        let c = full_complex(&cycle4());
        let b = boundary_matrix(&c, 2).unwrap();
        assert_eq!((b.bits.rows(), b.bits.cols()), (4, 4));
        assert!((0..4).all(|j| b.bits.col_weight(j) == 2));
        assert_eq!(gf2_rank(&b), 3);
        let empty = boundary_matrix(&c, 3).unwrap();
        assert_eq!(empty.bits.cols(), 0);
        assert_eq!(gf2_rank(&empty), 0);
    }

    #[test]
    fn betti_fixtures() {
        assert_eq!(betti_numbers(&full_complex(&cycle4()), 1).unwrap().betti, vec![1, 1]);
        let two = unit(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        assert_eq!(betti_numbers(&full_complex(&two), 1).unwrap().betti, vec![2, 0]);
        let oct = full_complex(&octahedron());
        assert_eq!(oct.counts()[..4], [6, 12, 8, 0]);
        assert_eq!(betti_numbers(&oct, 2).unwrap().betti, vec![1, 0, 1]);
    }

    #[test]
    fn euler_fixtures() {
        assert_eq!(euler_characteristic(&full_complex(&cycle4())), 0);
        let k4 = unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(euler_characteristic(&full_complex(&k4)), 1);
        assert_eq!(euler_characteristic(&full_complex(&octahedron())), 2);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(euler_entropy(1), 0.0);
        assert!((euler_entropy(-3) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(euler_entropy(0), f64::NEG_INFINITY);
    }

    #[test]
    fn open_complex_is_rejected() {
        let sets = [vec![0], vec![1], vec![0, 1], vec![0, 1, 2]]
            .into_iter()
            .map(|v| VertexSet::try_new(v).unwrap());
        let c = CliqueComplex::from_sets(3, 3, sets).unwrap();
        assert!(matches!(betti_numbers(&c, 0), Err(Error::NonClosedComplex(_))));
    }

    #[test]
    fn truncated_complex_is_rejected() {
        let k4 = unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let c = enumerate_cliques(&k4, 2).unwrap();
        assert!(betti_numbers(&c, 1).is_err());
        assert!(betti_numbers(&c, 0).is_ok());
    }

    fn two_k5() -> ComplexGraph {
        // block A on 0..5 with unit weights (density 1); block B on 5..10 with
        // six +0.3 and four -0.3i edges: |6*0.3 - 4*0.3i| * 2 / 20 = 0.3*sqrt(52)/10
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((i, j, Complex64::new(1.0, 0.0)));
            }
        }
        let mut count = 0;
        for i in 5..10 {
            for j in (i + 1)..10 {
                let w = if count < 6 {
                    Complex64::new(0.3, 0.0)
                } else {
                    Complex64::new(0.0, -0.3)
                };
                edges.push((i, j, w));
                count += 1;
            }
        }
        ComplexGraph::from_edges(10, edges).unwrap()
    }

    #[test]
    fn density_filter_cases() {
        let g = two_k5();
        let low = 0.3 * 52f64.sqrt() / 10.0;
        let dens: Vec<f64> = scored_k_cliques(&g, 5).iter().map(|c| c.density).collect();
        assert!((dens[0] - 1.0).abs() < 1e-12 && (dens[1] - low).abs() < 1e-12);

        let all = density_filter_complex(&g, 5, 0.0, CliqueSource::Exhaustive).unwrap();
        assert_eq!(all.counts()[..5], [10, 20, 20, 10, 2]);
        let strong = density_filter_complex(&g, 5, 0.5, CliqueSource::Exhaustive).unwrap();
        assert_eq!(strong.counts()[..5], [10, 10, 10, 5, 1]);
        assert!(strong.cliques(5)[0]
            .vertices
            .is_subset_of(&VertexSet::from_unsorted(0..5)));
        let none = density_filter_complex(&g, 5, 1.5, CliqueSource::Exhaustive).unwrap();
        assert_eq!(none.m(1), 10);
        assert!((2..=10).all(|k| none.m(k) == 0));

        let listed = [VertexSet::from_unsorted(5..10)];
        let from_list = density_filter_complex(&g, 5, 0.0, CliqueSource::List(&listed)).unwrap();
        assert_eq!(from_list.counts()[..5], [10, 10, 10, 5, 1]);
        let bad = [VertexSet::from_unsorted([0, 1, 2, 3, 9])];
        assert!(density_filter_complex(&g, 5, 0.0, CliqueSource::List(&bad)).is_err());
    }
}
