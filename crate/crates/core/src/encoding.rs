//! Graph-to-sampler encoding.
//!
//! The adjacency matrix is rescaled to `A' = cA + dI` so that its Takagi
//! values `tanh r_i` fall inside `[0, 1)`, then factored as
//! `A' = U diag(tanh r) U^T`. `U` programs the interferometer and `r` the
//! squeezers.
//!
//! The Takagi factorization uses the real symmetric embedding
//! `[[Re A, Im A], [Im A, -Re A]]`, whose spectrum is `{+s_i, -s_i}`. An
//! eigenvector `(p; q)` for `+s` gives a column `u = p + iq` with
//! `A conj(u) = s u`, and eigenvectors of distinct positive eigenvalues (or an
//! orthonormal basis of one positive eigenspace) map to orthonormal complex
//! columns. Columns for zero Takagi values are completed from the orthogonal
//! complement.

use std::io::Read;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ComplexGraph;

pub type CMatrix = DMatrix<Complex64>;

pub const DEFAULT_TARGET_SPECTRAL: f64 = 0.7;

/// Relative cutoff below which a Takagi value is treated as exactly zero.
const ZERO_TAKAGI_TOL: f64 = 1e-8;

/// Machine program for one graph: rescaling constants, interferometer and
/// squeezing parameters.
#[derive(Debug, Clone)]
pub struct GbsEncoding {
    pub c: f64,
    pub d: f64,
    u: CMatrix,
    lambdas: Vec<f64>,
    squeezings: Vec<f64>,
    kernel: CMatrix,
}

impl GbsEncoding {
    /// Validates and assembles an encoding from its parts.
    pub fn from_parts(c: f64, d: f64, u: CMatrix, lambdas: Vec<f64>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.ncols(),
            });
        }
        if lambdas.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: lambdas.len(),
            });
        }
        if let Some(bad) = lambdas.iter().find(|l| !(0.0..1.0).contains(*l)) {
            return Err(Error::InvalidArgument(format!("Takagi value {bad} outside [0, 1)")));
        }
        if lambdas.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("Takagi values must be sorted descending".into()));
        }
        let residual = unitarity_residual(&u);
        if residual > 1e-9 {
            return Err(Error::Invariant(format!("U is not unitary (residual {residual:e})")));
        }
        let squeezings = lambdas.iter().map(|l| l.atanh()).collect();
        let kernel = reconstruct(&u, &lambdas)?;
        Ok(GbsEncoding {
            c,
            d,
            u,
            lambdas,
            squeezings,
            kernel,
        })
    }

    /// All modes in vacuum: identity interferometer, no squeezing.
    pub fn vacuum(n: usize) -> Self {
        GbsEncoding::from_parts(0.0, 0.0, CMatrix::identity(n, n), vec![0.0; n]).expect("vacuum encoding is valid")
    }

    pub fn modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn squeezings(&self) -> &[f64] {
        &self.squeezings
    }

    /// `U diag(lambda) U^T`, the rescaled adjacency matrix the device samples from.
    pub fn kernel(&self) -> &CMatrix {
        &self.kernel
    }

    /// Probability of the all-vacuum outcome, `prod 1/cosh r_i`.
    pub fn vacuum_probability(&self) -> f64 {
        self.lambdas.iter().map(|l| (1.0 - l * l).sqrt()).product()
    }
}

pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let gram = u.adjoint() * u;
    max_abs_diff(&gram, &CMatrix::identity(n, n))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn adjacency_matrix(g: &ComplexGraph) -> CMatrix {
    let n = g.n();
    CMatrix::from_row_slice(n, n, g.weights())
}

/// Singular values of a complex matrix, descending (independent SVD route).
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

fn shifted(a: &CMatrix, c: f64, d: f64) -> CMatrix {
    let n = a.nrows();
    a * Complex64::new(c, 0.0) + CMatrix::identity(n, n) * Complex64::new(d, 0.0)
}

/// Finds `c` such that the largest singular value of `cA + dI` equals
/// `target_spectral`. With an all-zero `A` the shift alone defines the
/// program and `c` is fixed to 1.
pub fn rescale(g: &ComplexGraph, target_spectral: f64, d: f64) -> Result<(f64, CMatrix)> {
    if !(target_spectral > 0.0 && target_spectral < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target spectral value {target_spectral} outside (0, 1)"
        )));
    }
    if !d.is_finite() {
        return Err(Error::InvalidArgument("shift d must be finite".into()));
    }
    let a = adjacency_matrix(g);
    let sigma_a = spectral_norm(&a);
    if sigma_a == 0.0 {
        if d == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        if d.abs() >= 1.0 {
            return Err(Error::InvalidArgument(format!("|d| = {} must be below 1", d.abs())));
        }
        return Ok((1.0, shifted(&a, 1.0, d)));
    }
    if d == 0.0 {
        let c = target_spectral / sigma_a;
        return Ok((c, shifted(&a, c, 0.0)));
    }
    if d.abs() >= target_spectral {
        return Err(Error::InvalidArgument(format!(
            "|d| = {} leaves no room below the target {target_spectral}",
            d.abs()
        )));
    }
    // sigma_max(cA + dI) is convex in c and starts below the target, so the
    // crossing on c > 0 is unique.
    let f = |c: f64| spectral_norm(&shifted(&a, c, d));
    let (mut lo, mut hi) = (0.0, target_spectral / sigma_a);
    while f(hi) < target_spectral {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target_spectral {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let c = 0.5 * (lo + hi);
    Ok((c, shifted(&a, c, d)))
}

/// Takagi factorization `A = U diag(lambda) U^T` of a complex symmetric
/// matrix. `lambda` is returned in descending order.
pub fn takagi(a: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    let asym = max_abs_diff(a, &a.transpose());
    if asym > 1e-12 {
        return Err(Error::NotSymmetric(asym));
    }
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), Vec::new()));
    }

    let mut embed = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            // symmetrize exactly so the eigen solver sees a symmetric matrix
            let z = (a[(i, j)] + a[(j, i)]) * 0.5;
            embed[(i, j)] = z.re;
            embed[(i, n + j)] = z.im;
            embed[(n + i, j)] = z.im;
            embed[(n + i, n + j)] = -z.re;
        }
    }
    let eig = SymmetricEigen::new(embed);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).unwrap());

    let top = eig.eigenvalues[order[0]].max(0.0);
    let cutoff = ZERO_TAKAGI_TOL * top.max(f64::MIN_POSITIVE);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    for &idx in order.iter().take(n) {
        let value = eig.eigenvalues[idx];
        if value <= cutoff {
            break;
        }
        let v = eig.eigenvectors.column(idx);
        columns.push((0..n).map(|i| Complex64::new(v[i], v[n + i])).collect());
        lambdas.push(value);
    }

    // Null-space columns: any orthonormal completion satisfies A conj(u) = 0.
    let mut candidate = 0;
    while columns.len() < n && candidate < n {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[candidate] = Complex64::new(1.0, 0.0);
        candidate += 1;
        project_out(&mut v, &columns);
        project_out(&mut v, &columns);
        let norm = norm(&v);
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            columns.push(v);
            lambdas.push(0.0);
        }
    }
    if columns.len() < n {
        return Err(Error::Invariant("Takagi completion failed".into()));
    }

    // Final modified Gram-Schmidt pass in descending-lambda order.
    for j in 0..n {
        let (done, rest) = columns.split_at_mut(j);
        let col = &mut rest[0];
        project_out(col, done);
        let nrm = norm(col);
        col.iter_mut().for_each(|x| *x /= nrm);
    }

    let mut u = CMatrix::zeros(n, n);
    for (j, col) in columns.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, j)] = x;
        }
    }
    Ok((u, lambdas))
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let overlap: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
        for (x, y) in v.iter_mut().zip(b) {
            *x -= overlap * y;
        }
    }
}

/// `U diag(lambda) U^T`.
pub fn reconstruct(u: &CMatrix, lambdas: &[f64]) -> Result<CMatrix> {
    let n = u.nrows();
    if u.ncols() != lambdas.len() {
        return Err(Error::DimensionMismatch {
            expected: u.ncols(),
            got: lambdas.len(),
        });
    }
    let mut scaled = u.clone();
    for (j, &l) in lambdas.iter().enumerate() {
        scaled.column_mut(j).scale_mut(l);
    }
    let out = scaled * u.transpose();
    debug_assert_eq!(out.nrows(), n);
    Ok(out)
}

/// Rescale then factor; `squeezings[i] = atanh(lambdas[i])`.
pub fn encode(g: &ComplexGraph, target_spectral: f64, d: f64) -> Result<GbsEncoding> {
    let (c, a_prime) = rescale(g, target_spectral, d)?;
    let (u, mut lambdas) = takagi(&a_prime)?;
    // the eigen solver can land a hair above the exact target
    for l in lambdas.iter_mut() {
        if *l >= 1.0 {
            return Err(Error::Invariant(format!("Takagi value {l} not below 1")));
        }
        *l = l.max(0.0);
    }
    GbsEncoding::from_parts(c, d, u, lambdas)
}

/// `sum_i sinh^2 r_i = sum_i lambda_i^2 / (1 - lambda_i^2)`.
pub fn mean_photon_number(e: &GbsEncoding) -> f64 {
    e.lambdas().iter().map(|l| l * l / (1.0 - l * l)).sum()
}

#[derive(Debug, Serialize, Deserialize)]
struct ComplexRecord {
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EncodingFile {
    n: usize,
    c: f64,
    d: f64,
    lambdas: Vec<f64>,
    squeezings: Vec<f64>,
    /// Row-major entries of U.
    u: Vec<ComplexRecord>,
}

pub fn save_encoding(e: &GbsEncoding) -> Vec<u8> {
    let n = e.modes();
    let file = EncodingFile {
        n,
        c: e.c,
        d: e.d,
        lambdas: e.lambdas.clone(),
        squeezings: e.squeezings.clone(),
        u: (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| ComplexRecord {
                re: e.u[(i, j)].re,
                im: e.u[(i, j)].im,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("encoding serialization cannot fail");
    out.push(b'\n');
    out
}

pub fn load_encoding<R: Read>(source: R) -> Result<GbsEncoding> {
    let file: EncodingFile = serde_json::from_reader(source)?;
    let n = file.n;
    if file.u.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: file.u.len(),
        });
    }
    let entries: Vec<Complex64> = file.u.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    let u = CMatrix::from_row_slice(n, n, &entries);
    let e = GbsEncoding::from_parts(file.c, file.d, u, file.lambdas)?;
    if file.squeezings.len() != n
        || e.squeezings
            .iter()
            .zip(&file.squeezings)
            .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::Parse("squeezings disagree with atanh(lambdas)".into()));
    }
    Ok(e)
}
