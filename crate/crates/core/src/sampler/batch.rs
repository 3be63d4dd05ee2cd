use std::collections::BTreeMap;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_eta, CollisionPolicy, EmpiricalDistribution, Pattern, PatternDistribution};
use crate::encoding::GbsEncoding;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Gbs,
    Uniform,
    Squashed,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Gbs => "gbs",
            Backend::Uniform => "uniform",
            Backend::Squashed => "squashed",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub modes: usize,
    pub patterns: Vec<Pattern>,
    pub seed: u64,
    pub backend: Backend,
    pub loss_eta: f64,
    pub cutoff_total: Option<u32>,
    pub cutoff_per_mode: Option<u32>,
    /// Shots below this photon number were discarded and redrawn.
    pub min_photons: u32,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// Independent generator for one shot, so results do not depend on the
/// order in which shots are drawn.
fn shot_rng(seed: u64, shot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot as u64);
    rng
}

/// I.i.d. draws from the enumerated law renormalized by its mass.
pub fn sample_from_distribution(d: &PatternDistribution, shots: usize, seed: u64) -> Result<SampleBatch> {
    sample_from_distribution_postselected(d, shots, 0, seed)
}

/// As [`sample_from_distribution`], restricted to patterns with at least
/// `min_photons` photons.
pub fn sample_from_distribution_postselected(
    d: &PatternDistribution,
    shots: usize,
    min_photons: u32,
    seed: u64,
) -> Result<SampleBatch> {
    let support: Vec<&(Pattern, f64)> = d
        .entries()
        .iter()
        .filter(|(p, w)| *w > 0.0 && p.total() >= min_photons)
        .collect();
    if support.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut cdf = Vec::with_capacity(support.len());
    let mut acc = 0.0;
    for (_, w) in &support {
        acc += w;
        cdf.push(acc);
    }
    let patterns = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let u = shot_rng(seed, shot).random::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(support.len() - 1);
            support[idx].0.clone()
        })
        .collect();
    Ok(SampleBatch {
        modes: d.modes(),
        patterns,
        seed,
        backend: Backend::Gbs,
        loss_eta: 1.0,
        cutoff_total: Some(d.cutoff_total()),
        cutoff_per_mode: Some(d.cutoff_per_mode()),
        min_photons,
    })
}

pub fn sample_gbs(
    e: &GbsEncoding,
    shots: usize,
    cutoff_total: u32,
    cutoff_per_mode: u32,
    seed: u64,
) -> Result<SampleBatch> {
    sample_gbs_postselected(e, shots, cutoff_total, cutoff_per_mode, 0, seed)
}

/// GBS shots conditioned on recording at least `min_photons` photons.
pub fn sample_gbs_postselected(
    e: &GbsEncoding,
    shots: usize,
    cutoff_total: u32,
    cutoff_per_mode: u32,
    min_photons: u32,
    seed: u64,
) -> Result<SampleBatch> {
    let d = super::enumerate_distribution(e, cutoff_total, cutoff_per_mode)?;
    sample_from_distribution_postselected(&d, shots, min_photons, seed)
}

/// Uniformly random `k`-subsets of the modes as 0/1 patterns.
pub fn sample_uniform(n_modes: usize, k: usize, shots: usize, seed: u64) -> Result<SampleBatch> {
    if k > n_modes {
        return Err(Error::InvalidArgument(format!(
            "subset size {k} exceeds {n_modes} modes"
        )));
    }
    let patterns = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, shot);
            let mut counts = vec![0u32; n_modes];
            for v in rand::seq::index::sample(&mut rng, n_modes, k) {
                counts[v] = 1;
            }
            Pattern::new(counts)
        })
        .collect();
    Ok(SampleBatch {
        modes: n_modes,
        patterns,
        seed,
        backend: Backend::Uniform,
        loss_eta: 1.0,
        cutoff_total: None,
        cutoff_per_mode: None,
        min_photons: 0,
    })
}

/// Classical surrogate: real Gaussian amplitudes with variance
/// `(e^{2r} - 1) / 4` per input, propagated through `U`, then Poisson counts.
pub fn sample_squashed(e: &GbsEncoding, shots: usize, seed: u64) -> Result<SampleBatch> {
    sample_squashed_postselected(e, shots, 0, seed)
}

/// Upper bound on redraws of one postselected squashed shot.
pub const MAX_REDRAWS: usize = 1_000_000;

/// Squashed shots redrawn until at least `min_photons` photons are recorded.
pub fn sample_squashed_postselected(e: &GbsEncoding, shots: usize, min_photons: u32, seed: u64) -> Result<SampleBatch> {
    let n = e.modes();
    if min_photons > 0 && e.squeezings().iter().all(|&r| r == 0.0) {
        return Err(Error::EmptyDistribution);
    }
    let amplitude: Vec<Normal<f64>> = e
        .squeezings()
        .iter()
        .map(|r| {
            let var = ((2.0 * r).exp() - 1.0) / 4.0;
            Normal::new(0.0, var.max(0.0).sqrt()).map_err(|err| Error::InvalidArgument(err.to_string()))
        })
        .collect::<Result<_>>()?;
    let u = e.u();
    let draw = |rng: &mut ChaCha8Rng| -> Pattern {
        let a: Vec<f64> = amplitude.iter().map(|dist| dist.sample(rng)).collect();
        let counts = (0..n)
            .map(|i| {
                let beta: num_complex::Complex64 = (0..n).map(|j| u[(i, j)] * a[j]).sum();
                let mean = beta.norm_sqr();
                if mean > 0.0 {
                    Poisson::new(mean).expect("positive finite mean").sample(rng) as u32
                } else {
                    0
                }
            })
            .collect();
        Pattern::new(counts)
    };
    let patterns = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = shot_rng(seed, shot);
            for _ in 0..MAX_REDRAWS {
                let p = draw(&mut rng);
                if p.total() >= min_photons {
                    return Ok(p);
                }
            }
            Err(Error::InvalidArgument(format!(
                "no squashed shot reached {min_photons} photons in {MAX_REDRAWS} draws"
            )))
        })
        .collect::<Result<_>>()?;
    Ok(SampleBatch {
        modes: n,
        patterns,
        seed,
        backend: Backend::Squashed,
        loss_eta: 1.0,
        cutoff_total: None,
        cutoff_per_mode: None,
        min_photons,
    })
}

/// Stochastic binomial thinning of every recorded photon.
pub fn apply_loss_batch(b: &SampleBatch, eta: f64, seed: u64) -> Result<SampleBatch> {
    check_eta(eta)?;
    let patterns = b
        .patterns
        .par_iter()
        .enumerate()
        .map(|(shot, p)| {
            let mut rng = shot_rng(seed, shot);
            Pattern::new(
                p.counts()
                    .iter()
                    .map(|&c| {
                        if c == 0 || eta == 1.0 {
                            c
                        } else if eta == 0.0 {
                            0
                        } else {
                            Binomial::new(u64::from(c), eta)
                                .expect("valid binomial")
                                .sample(&mut rng) as u32
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(SampleBatch {
        patterns,
        loss_eta: b.loss_eta * eta,
        ..b.clone()
    })
}

/// Empirical pattern law among shots that recorded exactly `total` photons.
/// With `ThresholdCollapse` the qualifying shots are collapsed to click patterns.
pub fn conditional_pattern_histogram(
    b: &SampleBatch,
    total: u32,
    policy: CollisionPolicy,
) -> Result<EmpiricalDistribution> {
    let mut counts: BTreeMap<Pattern, f64> = BTreeMap::new();
    for p in &b.patterns {
        if let Some(key) = policy.admit(p, total) {
            *counts.entry(key).or_insert(0.0) += 1.0;
        }
    }
    EmpiricalDistribution::from_weights(counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchHeader {
    pub backend: Backend,
    pub seed: u64,
    pub eta: f64,
    pub modes: usize,
    pub shots: usize,
    pub cutoff_total: Option<u32>,
    pub cutoff_per_mode: Option<u32>,
    #[serde(default)]
    pub min_photons: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    pattern: Pattern,
    total: u32,
}

/// Header line followed by one `{pattern, total}` record per line.
pub fn write_batch(b: &SampleBatch, provenance: Option<serde_json::Value>) -> Vec<u8> {
    let header = BatchHeader {
        backend: b.backend,
        seed: b.seed,
        eta: b.loss_eta,
        modes: b.modes,
        shots: b.patterns.len(),
        cutoff_total: b.cutoff_total,
        cutoff_per_mode: b.cutoff_per_mode,
        min_photons: b.min_photons,
        provenance,
    };
    let mut out = serde_json::to_vec(&header).expect("header serialization cannot fail");
    out.push(b'\n');
    for p in &b.patterns {
        let rec = SampleRecord {
            pattern: p.clone(),
            total: p.total(),
        };
        serde_json::to_writer(&mut out, &rec).expect("record serialization cannot fail");
        out.push(b'\n');
    }
    out
}

pub fn read_batch<R: BufRead>(source: R) -> Result<(BatchHeader, SampleBatch)> {
    let mut lines = source.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sample file".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let header: BatchHeader = serde_json::from_str(&first)?;
    let mut patterns = Vec::with_capacity(header.shots);
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SampleRecord = serde_json::from_str(&line)?;
        if rec.pattern.modes() != header.modes {
            return Err(Error::Parse(format!(
                "record {} has {} modes, header says {}",
                lineno + 1,
                rec.pattern.modes(),
                header.modes
            )));
        }
        if rec.pattern.total() != rec.total {
            return Err(Error::Parse(format!("record {} total mismatch", lineno + 1)));
        }
        patterns.push(rec.pattern);
    }
    if patterns.len() != header.shots {
        return Err(Error::Parse(format!(
            "header announces {} shots, file holds {}",
            header.shots,
            patterns.len()
        )));
    }
    let batch = SampleBatch {
        modes: header.modes,
        patterns,
        seed: header.seed,
        backend: header.backend,
        loss_eta: header.eta,
        cutoff_total: header.cutoff_total,
        cutoff_per_mode: header.cutoff_per_mode,
        min_photons: header.min_photons,
    };
    Ok((header, batch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::CMatrix;
    use num_complex::Complex64;

    fn tmsv(t: f64) -> GbsEncoding {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(0.0, s),
                Complex64::new(s, 0.0),
                Complex64::new(0.0, -s),
            ],
        );
        GbsEncoding::from_parts(1.0, 0.0, u, vec![t, t]).unwrap()
    }

    fn batch_of(patterns: Vec<Vec<u32>>) -> SampleBatch {
        SampleBatch {
            modes: patterns.first().map_or(0, Vec::len),
            patterns: patterns.into_iter().map(Pattern::new).collect(),
            seed: 0,
            backend: Backend::Gbs,
            loss_eta: 1.0,
            cutoff_total: None,
            cutoff_per_mode: None,
            min_photons: 0,
        }
    }

    #[test]
    fn vacuum_samples() {
        let b = sample_gbs(&GbsEncoding::vacuum(4), 50, 4, 4, 3).unwrap();
        assert!(b.patterns.iter().all(|p| p.total() == 0));
    }

    #[test]
    fn tmsv_ratio_matches_closed_form() {
        let t = 0.6;
        let b = sample_gbs(&tmsv(t), 10_000, 10, 10, 11).unwrap();
        let n00 = b.patterns.iter().filter(|p| p.counts() == [0, 0]).count() as f64;
        let n11 = b.patterns.iter().filter(|p| p.counts() == [1, 1]).count() as f64;
        // delta method on the ratio of two multinomial counts
        let ratio = n11 / n00;
        let sd = ratio * (1.0 / n11 + 1.0 / n00).sqrt();
        assert!((ratio - t * t).abs() < 3.0 * sd, "ratio {ratio}, sd {sd}");
        assert!(b.patterns.iter().all(|p| p.counts()[0] == p.counts()[1]));
    }

    #[test]
    fn seeds_reproduce() {
        let e = tmsv(0.5);
        assert_eq!(
            sample_gbs(&e, 200, 6, 6, 5).unwrap(),
            sample_gbs(&e, 200, 6, 6, 5).unwrap()
        );
        assert_ne!(
            sample_gbs(&e, 200, 6, 6, 5).unwrap().patterns,
            sample_gbs(&e, 200, 6, 6, 6).unwrap().patterns
        );
        assert_eq!(
            sample_squashed(&e, 100, 2).unwrap(),
            sample_squashed(&e, 100, 2).unwrap()
        );
        assert_eq!(
            sample_uniform(6, 3, 100, 2).unwrap(),
            sample_uniform(6, 3, 100, 2).unwrap()
        );
    }

    #[test]
    fn uniform_extremes() {
        assert!(sample_uniform(5, 5, 20, 1)
            .unwrap()
            .patterns
            .iter()
            .all(|p| p.counts() == [1; 5]));
        assert!(sample_uniform(5, 0, 20, 1)
            .unwrap()
            .patterns
            .iter()
            .all(|p| p.total() == 0));
        assert!(sample_uniform(3, 4, 1, 1).is_err());
    }

    #[test]
    fn uniform_subsets_are_equiprobable() {
        let shots = 100_000;
        let b = sample_uniform(6, 3, shots, 17).unwrap();
        let mut freq: BTreeMap<Pattern, usize> = BTreeMap::new();
        for p in &b.patterns {
            *freq.entry(p.clone()).or_default() += 1;
        }
        assert_eq!(freq.len(), 20);
        let sd = (shots as f64 * 0.05 * 0.95).sqrt();
        for (p, &count) in &freq {
            assert_eq!(p.total(), 3);
            assert!((count as f64 - 0.05 * shots as f64).abs() < 3.0 * sd, "{p:?}: {count}");
        }
    }

    #[test]
    fn postselection_drops_dark_shots() {
        let e = tmsv(0.5);
        let b = sample_gbs_postselected(&e, 500, 8, 8, 1, 4).unwrap();
        assert!(b.patterns.iter().all(|p| p.total() >= 2));
        assert_eq!(b.min_photons, 1);
        let s = sample_squashed_postselected(&e, 500, 3, 4).unwrap();
        assert!(s.patterns.iter().all(|p| p.total() >= 3));
        assert!(matches!(
            sample_squashed_postselected(&GbsEncoding::vacuum(2), 1, 1, 0),
            Err(Error::EmptyDistribution)
        ));
        let raw = sample_gbs(&e, 2000, 8, 8, 4).unwrap();
        let bright = raw.patterns.iter().filter(|p| p.total() > 0).count() as f64 / 2000.0;
        let mass = 1.0 - e.vacuum_probability();
        assert!((bright - mass).abs() < 4.0 * (mass * (1.0 - mass) / 2000.0).sqrt());
    }

    #[test]
    fn squashed_zero_squeezing_is_dark() {
        let b = sample_squashed(&GbsEncoding::vacuum(3), 100, 4).unwrap();
        assert!(b.patterns.iter().all(|p| p.total() == 0));
    }

    #[test]
    fn squashed_single_mode_mean() {
        let lambda = 0.6f64;
        let r = lambda.atanh();
        let e = GbsEncoding::from_parts(1.0, 0.0, CMatrix::identity(1, 1), vec![lambda]).unwrap();
        let shots = 100_000;
        let b = sample_squashed(&e, shots, 21).unwrap();
        let xs: Vec<f64> = b.patterns.iter().map(|p| p.total() as f64).collect();
        let mean = xs.iter().sum::<f64>() / shots as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (shots as f64 - 1.0);
        let expect = ((2.0 * r).exp() - 1.0) / 4.0;
        assert!(
            (mean - expect).abs() < 3.0 * (var / shots as f64).sqrt(),
            "{mean} vs {expect}"
        );
    }

    #[test]
    fn squashed_mean_is_unitary_invariant() {
        let lambdas = vec![0.6, 0.3];
        let id = GbsEncoding::from_parts(1.0, 0.0, CMatrix::identity(2, 2), lambdas.clone()).unwrap();
        let mixed = tmsv(0.6);
        let mixed = GbsEncoding::from_parts(1.0, 0.0, mixed.u().clone(), lambdas.clone()).unwrap();
        let shots = 100_000;
        let stats = |e: &GbsEncoding| {
            let xs: Vec<f64> = sample_squashed(e, shots, 8)
                .unwrap()
                .patterns
                .iter()
                .map(|p| p.total() as f64)
                .collect();
            let m = xs.iter().sum::<f64>() / shots as f64;
            let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (shots as f64 - 1.0);
            (m, v / shots as f64)
        };
        let (m1, v1) = stats(&id);
        let (m2, v2) = stats(&mixed);
        let expect: f64 = lambdas
            .iter()
            .map(|l: &f64| ((2.0 * l.atanh()).exp() - 1.0) / 4.0)
            .sum();
        assert!((m1 - m2).abs() < 3.0 * (v1 + v2).sqrt());
        assert!((m1 - expect).abs() < 3.0 * v1.sqrt());
    }

    #[test]
    fn loss_on_batches() {
        let b = sample_gbs(&tmsv(0.6), 500, 8, 8, 1).unwrap();
        assert_eq!(apply_loss_batch(&b, 1.0, 3).unwrap().patterns, b.patterns);
        let dark = apply_loss_batch(&b, 0.0, 3).unwrap();
        assert!(dark.patterns.iter().all(|p| p.total() == 0));
        assert_eq!(dark.loss_eta, 0.0);
        assert_eq!(
            apply_loss_batch(&b, 0.4, 3).unwrap(),
            apply_loss_batch(&b, 0.4, 3).unwrap()
        );
    }

    #[test]
    fn histogram_policies() {
        let b = batch_of(vec![vec![1, 1, 0], vec![1, 1, 0], vec![2, 0, 0]]);
        let free = conditional_pattern_histogram(&b, 2, CollisionPolicy::CollisionFreeOnly).unwrap();
        assert_eq!(free.len(), 1);
        assert_eq!(free.get(&Pattern::new(vec![1, 1, 0])), 1.0);
        let collapsed = conditional_pattern_histogram(&b, 2, CollisionPolicy::ThresholdCollapse).unwrap();
        assert!((collapsed.get(&Pattern::new(vec![1, 1, 0])) - 2.0 / 3.0).abs() < 1e-15);
        assert!((collapsed.get(&Pattern::new(vec![1, 0, 0])) - 1.0 / 3.0).abs() < 1e-15);
        let empty = batch_of(vec![]);
        assert!(matches!(
            conditional_pattern_histogram(&empty, 2, CollisionPolicy::CollisionFreeOnly),
            Err(Error::EmptyDistribution)
        ));
    }

    #[test]
    fn sample_file_round_trip() {
        let b = sample_gbs(&tmsv(0.5), 20, 6, 6, 9).unwrap();
        let bytes = write_batch(&b, Some(serde_json::json!({"cmd": "sample"})));
        let (header, back) = read_batch(bytes.as_slice()).unwrap();
        assert_eq!(back, b);
        assert_eq!(header.provenance.unwrap()["cmd"], "sample");
        assert!(read_batch("".as_bytes()).is_err());
    }
}
