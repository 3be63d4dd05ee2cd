use std::collections::BTreeSet;

use crate::cliques::Clique;
use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// Cliques grouped by size. `lists[k - 1]` holds the `k`-cliques in
/// lexicographic order; sizes above `size_limit` were not enumerated.
#[derive(Debug, Clone, PartialEq)]
pub struct CliqueComplex {
    n: usize,
    size_limit: usize,
    lists: Vec<Vec<Clique>>,
}

impl CliqueComplex {
    pub(crate) fn from_sorted_lists(n: usize, size_limit: usize, lists: Vec<Vec<Clique>>) -> Self {
        debug_assert_eq!(lists.len(), size_limit);
        CliqueComplex { n, size_limit, lists }
    }

    /// Builds a complex from bare vertex sets (densities left at 0). Does not
    /// check closure; see [`CliqueComplex::check_downward_closed`].
    pub fn from_sets<I>(n: usize, size_limit: usize, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = VertexSet>,
    {
        let mut by_size: Vec<BTreeSet<VertexSet>> = vec![BTreeSet::new(); size_limit];
        for s in sets {
            if s.is_empty() || s.len() > size_limit {
                return Err(Error::InvalidArgument(format!(
                    "clique {:?} has size outside 1..={size_limit}",
                    s.as_slice()
                )));
            }
            if let Some(index) = s.iter().find(|&v| v >= n) {
                return Err(Error::IndexOutOfRange { index, n });
            }
            let bucket = &mut by_size[s.len() - 1];
            if bucket.contains(&s) {
                return Err(Error::DuplicateClique(s.into_vec()));
            }
            bucket.insert(s);
        }
        let lists = by_size
            .into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|vertices| Clique { vertices, density: 0.0 })
                    .collect()
            })
            .collect();
        Ok(CliqueComplex { n, size_limit, lists })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size_limit(&self) -> usize {
        self.size_limit
    }

    /// Number of `k`-cliques.
    pub fn m(&self, k: usize) -> usize {
        if k == 0 || k > self.size_limit {
            0
        } else {
            self.lists[k - 1].len()
        }
    }

    /// `m_1, ..., m_{size_limit}`.
    pub fn counts(&self) -> Vec<usize> {
        self.lists.iter().map(Vec::len).collect()
    }

    pub fn cliques(&self, k: usize) -> &[Clique] {
        if k == 0 || k > self.size_limit {
            &[]
        } else {
            &self.lists[k - 1]
        }
    }

    pub fn max_size(&self) -> usize {
        self.lists.iter().rposition(|l| !l.is_empty()).map_or(0, |i| i + 1)
    }

    /// True when the enumeration may have stopped short of larger cliques.
    pub fn is_truncated(&self) -> bool {
        self.m(self.size_limit) > 0
    }

    pub fn index_of(&self, s: &VertexSet) -> Option<usize> {
        self.cliques(s.len()).binary_search_by(|c| c.vertices.cmp(s)).ok()
    }

    pub fn check_downward_closed(&self) -> Result<()> {
        for k in 2..=self.size_limit {
            for c in self.cliques(k) {
                for v in c.vertices.iter() {
                    let face = c.vertices.without(v);
                    if self.index_of(&face).is_none() {
                        return Err(Error::NonClosedComplex(format!(
                            "face {:?} of {:?} is missing",
                            face.as_slice(),
                            c.vertices.as_slice()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
