use rayon::prelude::*;
use serde::Serialize;

use super::{density_filter_complex, euler_characteristic, euler_entropy, CliqueSource};
use crate::error::{Error, Result};
use crate::graph::{edge_filter, ComplexGraph, FilterMode};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceCell {
    pub omega_t: f64,
    pub delta_t: f64,
    /// `m_1, m_2, ...` up to the largest nonempty size.
    pub counts: Vec<usize>,
    pub chi: i64,
    pub s_chi: f64,
    /// Set when `chi = 0` or `chi` changes sign toward a grid neighbour.
    pub tpt: bool,
}

/// Grid over `(omega_t, delta_t)`; cell `(i, j)` uses `omega_axis[i]` and `delta_axis[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationSurface {
    pub omega_axis: Vec<f64>,
    pub delta_axis: Vec<f64>,
    pub k_ref: usize,
    cells: Vec<SurfaceCell>,
}

impl FiltrationSurface {
    pub fn shape(&self) -> (usize, usize) {
        (self.omega_axis.len(), self.delta_axis.len())
    }

    pub fn cell(&self, i: usize, j: usize) -> Result<&SurfaceCell> {
        let (rows, cols) = self.shape();
        if i >= rows || j >= cols {
            return Err(Error::OutOfGrid(i, j));
        }
        Ok(&self.cells[i * cols + j])
    }

    /// Cells in row-major order (omega index major).
    pub fn cells(&self) -> &[SurfaceCell] {
        &self.cells
    }

    pub fn chi(&self, i: usize, j: usize) -> i64 {
        self.cells[i * self.delta_axis.len() + j].chi
    }

    /// Largest clique size present in any cell.
    pub fn max_clique_size(&self) -> usize {
        self.cells.iter().map(|c| c.counts.len()).max().unwrap_or(0)
    }
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} axis is empty")));
    }
    if axis.iter().any(|x| !x.is_finite()) || axis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "{name} axis must be finite and ascending"
        )));
    }
    Ok(())
}

/// Edge-magnitude filter (keep `|w| <= omega_t`) followed by the
/// `k_ref`-clique density filter, evaluated on every grid cell.
pub fn filtration_surface(
    g: &ComplexGraph,
    omega_axis: &[f64],
    delta_axis: &[f64],
    k_ref: usize,
) -> Result<FiltrationSurface> {
    check_axis("omega", omega_axis)?;
    check_axis("delta", delta_axis)?;
    let cols = delta_axis.len();
    let cells: Vec<SurfaceCell> = (0..omega_axis.len() * cols)
        .into_par_iter()
        .map(|idx| {
            let (omega_t, delta_t) = (omega_axis[idx / cols], delta_axis[idx % cols]);
            let filtered = edge_filter(g, omega_t, FilterMode::KeepLeq);
            let complex = density_filter_complex(&filtered, k_ref, delta_t, CliqueSource::Exhaustive)?;
            let mut counts = complex.counts();
            counts.truncate(complex.max_size());
            let chi = euler_characteristic(&complex);
            Ok(SurfaceCell {
                omega_t,
                delta_t,
                counts,
                chi,
                s_chi: euler_entropy(chi),
                tpt: false,
            })
        })
        .collect::<Result<_>>()?;

    let mut surface = FiltrationSurface {
        omega_axis: omega_axis.to_vec(),
        delta_axis: delta_axis.to_vec(),
        k_ref,
        cells,
    };
    for p in tpt_points(&surface) {
        let marked = match p {
            TptPoint::Zero(i, j) => vec![(i, j)],
            TptPoint::SignChange(a, b) => vec![a, b],
        };
        for (i, j) in marked {
            surface.cells[i * cols + j].tpt = true;
        }
    }
    Ok(surface)
}

/// Topological transition marker on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TptPoint {
    /// A cell where `chi = 0`.
    Zero(usize, usize),
    /// Neighbouring cells (right or down) with `chi` of opposite sign.
    SignChange((usize, usize), (usize, usize)),
}

/// Zero cells in row-major order, then sign-change adjacencies in row-major
/// order of their first cell.
pub fn tpt_points(s: &FiltrationSurface) -> Vec<TptPoint> {
    let (rows, cols) = s.shape();
    let mut out = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if s.chi(i, j) == 0 {
                out.push(TptPoint::Zero(i, j));
            }
        }
    }
    for i in 0..rows {
        for j in 0..cols {
            let here = s.chi(i, j).signum();
            if j + 1 < cols && here * s.chi(i, j + 1).signum() < 0 {
                out.push(TptPoint::SignChange((i, j), (i, j + 1)));
            }
            if i + 1 < rows && here * s.chi(i + 1, j).signum() < 0 {
                out.push(TptPoint::SignChange((i, j), (i + 1, j)));
            }
        }
    }
    out
}

/// `S_chi` along `path`, in path order.
pub fn euler_entropy_path(s: &FiltrationSurface, path: &[(usize, usize)]) -> Result<Vec<f64>> {
    path.iter().map(|&(i, j)| s.cell(i, j).map(|c| c.s_chi)).collect()
}

#[cfg(test)]
pub(crate) fn surface_from_chi(chi: &[Vec<i64>]) -> FiltrationSurface {
    let rows = chi.len();
    let cols = chi[0].len();
    let cells = chi
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, &x)| SurfaceCell {
                omega_t: i as f64,
                delta_t: j as f64,
                counts: Vec::new(),
                chi: x,
                s_chi: euler_entropy(x),
                tpt: false,
            })
        })
        .collect();
    FiltrationSurface {
        omega_axis: (0..rows).map(|i| i as f64).collect(),
        delta_axis: (0..cols).map(|j| j as f64).collect(),
        k_ref: 3,
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tda::{betti_numbers, density_filter_complex};
    use num_complex::Complex64;

    #[test]
    fn tpt_definitions() {
        assert!(tpt_points(&surface_from_chi(&[vec![1, 1], vec![1, 1]])).is_empty());
        assert_eq!(tpt_points(&surface_from_chi(&[vec![0]])), vec![TptPoint::Zero(0, 0)]);
        assert_eq!(
            tpt_points(&surface_from_chi(&[vec![2, 1, -1]])),
            vec![TptPoint::SignChange((0, 1), (0, 2))]
        );
    }

    #[test]
    fn entropy_along_paths() {
        let flat = surface_from_chi(&[vec![1, 1, 1]]);
        assert_eq!(
            euler_entropy_path(&flat, &[(0, 0), (0, 1), (0, 2)]).unwrap(),
            vec![0.0; 3]
        );
        let crossing = surface_from_chi(&[vec![2, 0, -1]]);
        let values = euler_entropy_path(&crossing, &[(0, 0), (0, 1), (0, 2)]).unwrap();
        assert_eq!(values[1], f64::NEG_INFINITY);
        assert!(matches!(
            euler_entropy_path(&crossing, &[(1, 0)]),
            Err(Error::OutOfGrid(1, 0))
        ));
    }

    fn sample_graph() -> ComplexGraph {
        let mut edges = Vec::new();
        for i in 0..6 {
            for j in (i + 1)..6 {
                if (i + j) % 4 != 1 {
                    edges.push((i, j, Complex64::new(0.1 * (1 + i + j) as f64, 0.05 * j as f64)));
                }
            }
        }
        ComplexGraph::from_edges(6, edges).unwrap()
    }

    #[test]
    fn single_cell_matches_direct_analysis() {
        let g = sample_graph();
        let s = filtration_surface(&g, &[g.max_abs_weight()], &[0.0], 3).unwrap();
        let direct = density_filter_complex(&g, 3, 0.0, CliqueSource::Exhaustive).unwrap();
        let cell = s.cell(0, 0).unwrap();
        assert_eq!(cell.chi, euler_characteristic(&direct));
        assert_eq!(cell.counts[..], direct.counts()[..direct.max_size()]);
        let betti = betti_numbers(&direct, 2).unwrap();
        assert_eq!(betti.euler_characteristic(), cell.chi);
    }

    #[test]
    fn edgeless_row_counts_vertices() {
        let g = sample_graph();
        let s = filtration_surface(&g, &[0.0], &[0.0, 0.5], 3).unwrap();
        for c in s.cells() {
            assert_eq!(c.chi, 6);
            assert_eq!(c.counts, vec![6]);
        }
    }

    #[test]
    fn edges_grow_along_omega() {
        let g = sample_graph();
        let axis: Vec<f64> = (0..8).map(|i| 0.15 * i as f64).collect();
        let s = filtration_surface(&g, &axis, &[0.0], 3).unwrap();
        let m2: Vec<usize> = (0..axis.len())
            .map(|i| s.cell(i, 0).unwrap().counts.get(1).copied().unwrap_or(0))
            .collect();
        assert!(m2.windows(2).all(|w| w[0] <= w[1]), "{m2:?}");
    }

    #[test]
    fn rejects_bad_axes() {
        let g = sample_graph();
        assert!(filtration_surface(&g, &[], &[0.0], 3).is_err());
        assert!(filtration_surface(&g, &[0.2, 0.1], &[0.0], 3).is_err());
    }
}
