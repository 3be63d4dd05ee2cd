//! Rényi entropy of photon patterns and its sweep against the percolation
//! order parameter.

use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::{encode, GbsEncoding, DEFAULT_TARGET_SPECTRAL};
use crate::error::{Error, Result};
use crate::graph::ComplexGraph;
use crate::percolation::percolation_clusters;
use crate::sampler::{
    conditional_pattern_histogram, conditional_slice, sample_gbs, CollisionPolicy, EmpiricalDistribution,
    DEFAULT_PATTERN_BUDGET,
};
use crate::tda::{density_filter_graph, CliqueSource};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Natural-log Rényi entropy of order `alpha`; `alpha = 1` is the Shannon limit.
pub fn renyi_entropy(p: &[f64], alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Rényi order {alpha} must be positive and finite"
        )));
    }
    if p.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::InvalidArgument(
            "probabilities must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Unnormalized(total));
    }
    let h = if alpha == 1.0 {
        -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
    } else {
        let s: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum();
        s.ln() / (1.0 - alpha)
    };
    Ok(h.max(0.0))
}

/// `ln C(modes, photons)`, or an error when the binomial is below 2.
pub fn log_pattern_ceiling(modes: usize, photons: usize) -> Result<f64> {
    if photons == 0 || photons >= modes {
        return Err(Error::NormalizationUndefined { modes, photons });
    }
    let k = photons.min(modes - photons);
    let ln_c: f64 = (0..k).map(|i| ((modes - i) as f64 / (i + 1) as f64).ln()).sum();
    Ok(ln_c)
}

/// Rényi entropy divided by `ln C(modes, photons)`, the entropy of the
/// uniform law on collision-free patterns with that photon number. Collapsed
/// outcomes with fewer clicks can exceed that ceiling, so the ratio is capped at 1.
pub fn normalized_renyi(hist: &EmpiricalDistribution, alpha: f64, modes: usize, photons: usize) -> Result<f64> {
    let ceiling = log_pattern_ceiling(modes, photons)?;
    Ok((renyi_entropy(&hist.values(), alpha)? / ceiling).min(1.0))
}

fn mid_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with mid-rank ties. A constant sequence carries
/// no rank information and yields 0.
pub fn curve_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 3 {
        return Err(Error::TooSmall { size: a.len(), min: 3 });
    }
    let (ra, rb) = (mid_ranks(a), mid_ranks(b));
    let mean = (a.len() + 1) as f64 / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - mean) * (y - mean);
        saa += (x - mean) * (x - mean);
        sbb += (y - mean) * (y - mean);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Ok(0.0);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyCurve {
    pub axis: Vec<f64>,
    pub values: Vec<f64>,
    pub alpha: f64,
    pub photon_total: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k_ref: usize,
    pub target_spectral: f64,
    pub d: f64,
    pub alpha: f64,
    pub photons: u32,
    pub policy: CollisionPolicy,
    /// Pattern budget for exact evaluation of the conditional slice.
    pub budget: u128,
    /// Force the sampled path even when exact evaluation fits the budget.
    pub force_sampled: bool,
    pub shots: usize,
    pub seed: u64,
    pub cutoff_total: u32,
    pub cutoff_per_mode: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            k_ref: 4,
            target_spectral: DEFAULT_TARGET_SPECTRAL,
            d: 0.0,
            alpha: 2.0,
            photons: 2,
            policy: CollisionPolicy::ThresholdCollapse,
            budget: DEFAULT_PATTERN_BUDGET,
            force_sampled: false,
            shots: 10_000,
            seed: 0,
            cutoff_total: 8,
            cutoff_per_mode: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepPath {
    Exact,
    Sampled,
    /// No outcome with the requested photon number; entropy sits at its floor.
    Empty,
}

impl std::fmt::Display for SweepPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepPath::Exact => "exact",
            SweepPath::Sampled => "sampled",
            SweepPath::Empty => "empty",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub delta_t: f64,
    pub phi: f64,
    pub n_star: usize,
    pub h_alpha: f64,
    pub h_norm: f64,
    /// Shots drawn; 0 on the exact path.
    pub shots: usize,
    pub backend: SweepPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub phi_curve: Vec<f64>,
    pub entropy: EntropyCurve,
    /// Spearman correlation of the two curves, when at least three points exist.
    pub correlation: Option<f64>,
}

fn conditional_law(
    e: &GbsEncoding,
    cfg: &SweepConfig,
    point_seed: u64,
) -> Result<(EmpiricalDistribution, SweepPath, usize)> {
    if !cfg.force_sampled {
        match conditional_slice(e, cfg.photons, cfg.policy, cfg.budget) {
            Ok(h) => return Ok((h, SweepPath::Exact, 0)),
            Err(Error::BudgetExceeded { .. }) => {}
            Err(other) => return Err(other),
        }
    }
    let batch = sample_gbs(e, cfg.shots, cfg.cutoff_total, cfg.cutoff_per_mode, point_seed)?;
    let h = conditional_pattern_histogram(&batch, cfg.photons, cfg.policy)?;
    Ok((h, SweepPath::Sampled, cfg.shots))
}

fn sweep_point(g: &ComplexGraph, delta_t: f64, cfg: &SweepConfig, point_seed: u64) -> Result<SweepPoint> {
    let h = density_filter_graph(g, cfg.k_ref, delta_t, CliqueSource::Exhaustive)?;
    let perc = percolation_clusters(&h, cfg.k_ref)?;
    let e = if h.edge_count() == 0 {
        GbsEncoding::vacuum(h.n())
    } else {
        encode(&h, cfg.target_spectral, cfg.d)?
    };
    let ceiling = log_pattern_ceiling(g.n(), cfg.photons as usize)?;
    let (h_alpha, backend, shots) = match conditional_law(&e, cfg, point_seed) {
        Ok((hist, path, shots)) => (renyi_entropy(&hist.values(), cfg.alpha)?, path, shots),
        Err(Error::EmptyDistribution) => (0.0, SweepPath::Empty, if cfg.force_sampled { cfg.shots } else { 0 }),
        Err(other) => return Err(other),
    };
    Ok(SweepPoint {
        delta_t,
        phi: perc.phi,
        n_star: perc.largest_nodes,
        h_alpha,
        h_norm: (h_alpha / ceiling).min(1.0),
        shots,
        backend,
    })
}

/// Filters `g` at each density threshold, then records the percolation order
/// parameter and the normalized entropy of the re-encoded sampler conditioned
/// on `cfg.photons` photons. Point `i` uses seed `cfg.seed + i`.
pub fn percolation_entropy_sweep(g: &ComplexGraph, thresholds: &[f64], cfg: &SweepConfig) -> Result<SweepResult> {
    if thresholds.is_empty()
        || thresholds
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidArgument(
            "thresholds must be nonempty and strictly ascending".into(),
        ));
    }
    let points: Vec<SweepPoint> = thresholds
        .par_iter()
        .enumerate()
        .map(|(i, &t)| sweep_point(g, t, cfg, cfg.seed.wrapping_add(i as u64)))
        .collect::<Result<_>>()?;
    let phi_curve: Vec<f64> = points.iter().map(|p| p.phi).collect();
    let values: Vec<f64> = points.iter().map(|p| p.h_norm).collect();
    let correlation = if points.len() >= 3 {
        Some(curve_correlation(&phi_curve, &values)?)
    } else {
        None
    };
    Ok(SweepResult {
        points,
        phi_curve,
        entropy: EntropyCurve {
            axis: thresholds.to_vec(),
            values,
            alpha: cfg.alpha,
            photon_total: cfg.photons,
        },
        correlation,
    })
}
