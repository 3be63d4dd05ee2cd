//! Exact desk-scale simulation of the photon-number output law.
//!
//! For a pure Gaussian state programmed with kernel `B = U diag(tanh r) U^T`
//! the probability of a photon pattern `p` is
//! `prod_i sech r_i * |haf(B_p)|^2 / prod_i p_i!`, where `B_p` repeats row and
//! column `i` exactly `p_i` times.

mod batch;

pub use batch::{
    apply_loss_batch, conditional_pattern_histogram, read_batch, sample_from_distribution,
    sample_from_distribution_postselected, sample_gbs, sample_gbs_postselected, sample_squashed,
    sample_squashed_postselected, sample_uniform, write_batch, Backend, BatchHeader, SampleBatch, MAX_REDRAWS,
};

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::GbsEncoding;
use crate::error::{Error, Result};
use crate::hafnian::hafnian_unchecked;

pub const DEFAULT_PATTERN_BUDGET: u128 = 5_000_000;

/// Photon counts per output mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern(Vec<u32>);

impl Pattern {
    pub fn new(counts: Vec<u32>) -> Self {
        Pattern(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Pattern(vec![0; modes])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// Threshold-detector view: every nonzero count becomes 1.
    pub fn collapsed(&self) -> Pattern {
        Pattern(self.0.iter().map(|&c| u32::from(c > 0)).collect())
    }
}

/// How multi-photon detections are treated when conditioning on a photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionPolicy {
    /// Drop any outcome with more than one photon in a mode.
    CollisionFreeOnly,
    /// Keep every outcome with the requested photon number, then collapse counts to clicks.
    ThresholdCollapse,
}

impl CollisionPolicy {
    fn admit(self, p: &Pattern, total: u32) -> Option<Pattern> {
        if p.total() != total {
            return None;
        }
        match self {
            CollisionPolicy::CollisionFreeOnly => p.is_collision_free().then(|| p.clone()),
            CollisionPolicy::ThresholdCollapse => Some(p.collapsed()),
        }
    }
}

/// Normalized distribution over patterns, in canonical pattern order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmpiricalDistribution {
    pub probabilities: BTreeMap<Pattern, f64>,
}

impl EmpiricalDistribution {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn get(&self, p: &Pattern) -> f64 {
        self.probabilities.get(p).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> Vec<f64> {
        self.probabilities.values().copied().collect()
    }

    fn from_weights(weights: BTreeMap<Pattern, f64>) -> Result<Self> {
        let total: f64 = weights.values().sum();
        if weights.is_empty() || total <= 0.0 {
            return Err(Error::EmptyDistribution);
        }
        let probabilities = weights
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(p, w)| (p, w / total))
            .collect();
        Ok(EmpiricalDistribution { probabilities })
    }
}

/// Truncated photon-number law with its cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternDistribution {
    modes: usize,
    cutoff_total: u32,
    cutoff_per_mode: u32,
    /// Every admissible pattern, sorted.
    entries: Vec<(Pattern, f64)>,
}

impl PatternDistribution {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff_total(&self) -> u32 {
        self.cutoff_total
    }

    pub fn cutoff_per_mode(&self) -> u32 {
        self.cutoff_per_mode
    }

    pub fn entries(&self) -> &[(Pattern, f64)] {
        &self.entries
    }

    pub fn mass(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn probability(&self, p: &Pattern) -> f64 {
        self.entries
            .binary_search_by(|(q, _)| q.cmp(p))
            .map(|idx| self.entries[idx].1)
            .unwrap_or(0.0)
    }

    pub fn mean_total(&self) -> f64 {
        self.entries.iter().map(|(p, w)| p.total() as f64 * w).sum()
    }

    /// Exact conditional law on photon number `total`, renormalized.
    pub fn conditional(&self, total: u32, policy: CollisionPolicy) -> Result<EmpiricalDistribution> {
        let mut weights = BTreeMap::new();
        for (p, w) in &self.entries {
            if let Some(key) = policy.admit(p, total) {
                *weights.entry(key).or_insert(0.0) += w;
            }
        }
        EmpiricalDistribution::from_weights(weights)
    }

    pub(crate) fn from_sorted(
        modes: usize,
        cutoff_total: u32,
        cutoff_per_mode: u32,
        entries: Vec<(Pattern, f64)>,
    ) -> Self {
        PatternDistribution {
            modes,
            cutoff_total,
            cutoff_per_mode,
            entries,
        }
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Exact probability of one pattern under the encoding's pure-state law.
pub fn pattern_probability(e: &GbsEncoding, p: &Pattern) -> Result<f64> {
    if p.modes() != e.modes() {
        return Err(Error::DimensionMismatch {
            expected: e.modes(),
            got: p.modes(),
        });
    }
    Ok(probability_unchecked(e, p))
}

fn probability_unchecked(e: &GbsEncoding, p: &Pattern) -> f64 {
    let total = p.total();
    if total % 2 == 1 {
        return 0.0;
    }
    let vacuum = e.vacuum_probability();
    if total == 0 {
        return vacuum;
    }
    let rows: Vec<usize> = p
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
        .collect();
    let kernel = e.kernel();
    let sub = DMatrix::from_fn(rows.len(), rows.len(), |a, b| kernel[(rows[a], rows[b])]);
    let haf: Complex64 = hafnian_unchecked(&sub);
    let denom: f64 = p.counts().iter().map(|&c| factorial(c)).product();
    vacuum * haf.norm_sqr() / denom
}

/// Number of patterns on `modes` modes with at most `cutoff_total` photons in
/// total and at most `cutoff_per_mode` in any mode.
pub fn admissible_pattern_count(modes: usize, cutoff_total: u32, cutoff_per_mode: u32) -> u128 {
    let t = cutoff_total as usize;
    // ways[s] = number of partial patterns with total s
    let mut ways = vec![0u128; t + 1];
    ways[0] = 1;
    for _ in 0..modes {
        let mut next = vec![0u128; t + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for c in 0..=(cutoff_per_mode as usize).min(t - s) {
                next[s + c] = next[s + c].saturating_add(w);
            }
        }
        ways = next;
    }
    ways.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Every admissible pattern in lexicographic order.
pub(crate) fn admissible_patterns(modes: usize, cutoff_total: u32, cutoff_per_mode: u32) -> Vec<Pattern> {
    fn recurse(mode: usize, remaining: u32, cap: u32, current: &mut Vec<u32>, out: &mut Vec<Pattern>) {
        if mode == current.len() {
            out.push(Pattern(current.clone()));
            return;
        }
        for c in 0..=cap.min(remaining) {
            current[mode] = c;
            recurse(mode + 1, remaining - c, cap, current, out);
        }
        current[mode] = 0;
    }
    let mut out = Vec::new();
    let mut current = vec![0; modes];
    recurse(0, cutoff_total, cutoff_per_mode, &mut current, &mut out);
    out
}

/// Enumerates the law within the cutoffs using the default pattern budget.
pub fn enumerate_distribution(e: &GbsEncoding, cutoff_total: u32, cutoff_per_mode: u32) -> Result<PatternDistribution> {
    enumerate_distribution_with_budget(e, cutoff_total, cutoff_per_mode, DEFAULT_PATTERN_BUDGET)
}

pub fn enumerate_distribution_with_budget(
    e: &GbsEncoding,
    cutoff_total: u32,
    cutoff_per_mode: u32,
    budget: u128,
) -> Result<PatternDistribution> {
    let required = admissible_pattern_count(e.modes(), cutoff_total, cutoff_per_mode);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let patterns = admissible_patterns(e.modes(), cutoff_total, cutoff_per_mode);
    let entries: Vec<(Pattern, f64)> = patterns
        .into_par_iter()
        .map(|p| {
            let w = probability_unchecked(e, &p);
            (p, w)
        })
        .collect();
    Ok(PatternDistribution::from_sorted(
        e.modes(),
        cutoff_total,
        cutoff_per_mode,
        entries,
    ))
}

/// Exact law conditioned on exactly `total` photons, without any cutoff
/// truncation: only the patterns of that photon number are evaluated.
pub fn conditional_slice(
    e: &GbsEncoding,
    total: u32,
    policy: CollisionPolicy,
    budget: u128,
) -> Result<EmpiricalDistribution> {
    let modes = e.modes();
    let cap = match policy {
        CollisionPolicy::CollisionFreeOnly => 1,
        CollisionPolicy::ThresholdCollapse => total,
    };
    let required = admissible_pattern_count(modes, total, cap);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let slice: Vec<Pattern> = admissible_patterns(modes, total, cap)
        .into_iter()
        .filter(|p| p.total() == total)
        .collect();
    let weighted: Vec<(Pattern, f64)> = slice
        .into_par_iter()
        .map(|p| {
            let w = probability_unchecked(e, &p);
            (p, w)
        })
        .collect();
    let mut weights = BTreeMap::new();
    for (p, w) in weighted {
        if let Some(key) = policy.admit(&p, total) {
            *weights.entry(key).or_insert(0.0) += w;
        }
    }
    EmpiricalDistribution::from_weights(weights)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Exact uniform loss: every photon survives independently with probability `eta`.
pub fn apply_loss_distribution(d: &PatternDistribution, eta: f64) -> Result<PatternDistribution> {
    check_eta(eta)?;
    let mut out: Vec<(Pattern, f64)> = d.entries.iter().map(|(p, _)| (p.clone(), 0.0)).collect();
    let index = |q: &Pattern, out: &Vec<(Pattern, f64)>| {
        out.binary_search_by(|(r, _)| r.cmp(q))
            .expect("thinned pattern is admissible")
    };
    for (p, w) in &d.entries {
        if *w == 0.0 {
            continue;
        }
        // walk every q <= p componentwise
        let counts = p.counts();
        let mut q = vec![0u32; counts.len()];
        loop {
            let factor: f64 = counts
                .iter()
                .zip(&q)
                .map(|(&n, &k)| binomial(n, k) * eta.powi(k as i32) * (1.0 - eta).powi((n - k) as i32))
                .product();
            if factor != 0.0 {
                let key = Pattern(q.clone());
                let idx = index(&key, &out);
                out[idx].1 += w * factor;
            }
            let mut m = 0;
            while m < q.len() && q[m] == counts[m] {
                q[m] = 0;
                m += 1;
            }
            if m == q.len() {
                break;
            }
            q[m] += 1;
        }
    }
    Ok(PatternDistribution::from_sorted(
        d.modes,
        d.cutoff_total,
        d.cutoff_per_mode,
        out,
    ))
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("transmission {eta} outside [0, 1]")))
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionEntry {
    pattern: Pattern,
    probability: f64,
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    modes: usize,
    cutoff_total: u32,
    cutoff_per_mode: u32,
    mass: f64,
    entries: Vec<DistributionEntry>,
}

pub fn save_distribution(d: &PatternDistribution) -> Vec<u8> {
    let file = DistributionFile {
        modes: d.modes,
        cutoff_total: d.cutoff_total,
        cutoff_per_mode: d.cutoff_per_mode,
        mass: d.mass(),
        entries: d
            .entries
            .iter()
            .map(|(p, w)| DistributionEntry {
                pattern: p.clone(),
                probability: *w,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("distribution serialization cannot fail");
    out.push(b'\n');
    out
}
