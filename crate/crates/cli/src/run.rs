use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::Path;

use serde::Serialize;

use gbs_tda::cliques::{find_cliques, SearchReport};
use gbs_tda::encoding::{encode, load_encoding, save_encoding, GbsEncoding};
use gbs_tda::entropy::{percolation_entropy_sweep, SweepConfig};
use gbs_tda::fixtures::{clique_chain, planted_clique, two_community};
use gbs_tda::graph::{
    edge_filter, load_graph, random_dual_layer, save_graph, ComplexGraph, FilterMode, VertexSet, WeightLaw,
};
use gbs_tda::percolation::{damage, percolation_clusters};
use gbs_tda::report::{
    betti_json, percolation_json, persistence_tsv, search_report_json, surface_tsv, sweep_tsv, with_provenance_json,
    Provenance,
};
use gbs_tda::sampler::{
    apply_loss_batch, apply_loss_distribution, enumerate_distribution_with_budget, read_batch,
    sample_from_distribution_postselected, sample_squashed_postselected, sample_uniform, save_distribution,
    write_batch, CollisionPolicy, SampleBatch,
};
use gbs_tda::stats::{ratio_interval, wilson_interval, Interval, Z95};
use gbs_tda::tda::{betti_numbers, clique_persistence, density_filter_complex, filtration_surface, CliqueSource};

use crate::args::*;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Seed offset separating loss randomness from sampling randomness.
const LOSS_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

fn read_input(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn graph_from(path: &Path) -> Result<ComplexGraph> {
    load_graph(read_input(path)?.as_slice()).map_err(|e| CliError::format(format!("{}: {e}", path.display())))
}

fn encoding_from(graph: Option<&Path>, file: Option<&Path>, p: &EncodingParams) -> Result<GbsEncoding> {
    match (graph, file) {
        (Some(g), None) => Ok(encode(&graph_from(g)?, p.target_spectral, p.d)?),
        (None, Some(f)) => {
            load_encoding(read_input(f)?.as_slice()).map_err(|e| CliError::format(format!("{}: {e}", f.display())))
        }
        _ => Err(CliError::usage("exactly one of --graph and --encoding is required")),
    }
}

fn check_node(g: &ComplexGraph, node: usize) -> Result<()> {
    if node >= g.n() {
        return Err(CliError::usage(format!(
            "node {node} out of range for {} vertices",
            g.n()
        )));
    }
    Ok(())
}

fn damaged(g: ComplexGraph, node: Option<usize>, k: usize) -> Result<ComplexGraph> {
    match node {
        Some(v) => {
            check_node(&g, v)?;
            Ok(damage(&g, v, k)?)
        }
        None => Ok(g),
    }
}

fn provenance_value(prov: &Provenance) -> serde_json::Value {
    serde_json::to_value(prov).expect("string map serializes")
}

pub fn gen(a: &GenArgs) -> Result<Vec<u8>> {
    let g = match a.fixture {
        Some(Fixture::Planted) => planted_clique().0,
        Some(Fixture::TwoCommunity) => two_community(),
        Some(Fixture::Chain) => clique_chain(a.n.unwrap_or(12) as usize),
        None => {
            let n =
                a.n.ok_or_else(|| CliError::usage("--n is required unless --fixture is given"))?;
            let seed = a
                .seed
                .ok_or_else(|| CliError::usage("--seed is required for random graphs"))?;
            let law = WeightLaw::uniform((a.re_min, a.re_max), (a.im_min, a.im_max));
            random_dual_layer(n as usize, a.p, law, seed)?
        }
    };
    Ok(save_graph(&g))
}

pub fn encode_cmd(a: &EncodeArgs) -> Result<Vec<u8>> {
    let g = graph_from(&a.graph)?;
    Ok(save_encoding(&encode(&g, a.encoding.target_spectral, a.encoding.d)?))
}

pub fn sample(a: &SampleArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let e = encoding_from(a.graph.as_deref(), a.encoding_file.as_deref(), &a.encoding)?;
    let loss_seed = a.seed.wrapping_add(LOSS_SEED_OFFSET);
    let batch = match a.backend {
        BackendArg::Gbs => {
            let d = enumerate_distribution_with_budget(
                &e,
                a.cutoffs.cutoff_total,
                a.cutoffs.cutoff_per_mode,
                a.cutoffs.budget,
            )?;
            let d = if a.eta < 1.0 {
                apply_loss_distribution(&d, a.eta)?
            } else {
                d
            };
            SampleBatch {
                loss_eta: a.eta,
                ..sample_from_distribution_postselected(&d, a.shots, a.min_photons, a.seed)?
            }
        }
        BackendArg::Uniform => {
            let k =
                a.k.ok_or_else(|| CliError::usage("--k is required for the uniform backend"))?;
            if a.min_photons as usize > k {
                return Err(CliError::usage("--min-photons exceeds --k"));
            }
            let b = sample_uniform(e.modes(), k, a.shots, a.seed)?;
            if a.eta < 1.0 {
                apply_loss_batch(&b, a.eta, loss_seed)?
            } else {
                b
            }
        }
        BackendArg::Squashed => {
            if a.eta < 1.0 && a.min_photons > 0 {
                return Err(CliError::usage(
                    "--min-photons with --eta below 1 is only supported for the gbs backend",
                ));
            }
            let b = sample_squashed_postselected(&e, a.shots, a.min_photons, a.seed)?;
            if a.eta < 1.0 {
                apply_loss_batch(&b, a.eta, loss_seed)?
            } else {
                b
            }
        }
    };
    Ok(write_batch(&batch, Some(provenance_value(prov))))
}

pub fn distribution(a: &DistributionArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let e = encoding_from(a.graph.as_deref(), a.encoding_file.as_deref(), &a.encoding)?;
    let d =
        enumerate_distribution_with_budget(&e, a.cutoffs.cutoff_total, a.cutoffs.cutoff_per_mode, a.cutoffs.budget)?;
    let d = if a.eta < 1.0 {
        apply_loss_distribution(&d, a.eta)?
    } else {
        d
    };
    let mut value: serde_json::Value = serde_json::from_slice(&save_distribution(&d)).expect("own output parses");
    value["provenance"] = provenance_value(prov);
    let mut out = serde_json::to_vec_pretty(&value).expect("report serializes");
    out.push(b'\n');
    Ok(out)
}

pub fn cliques(a: &CliquesArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let g = graph_from(&a.graph)?;
    let bytes = read_input(&a.samples)?;
    let (_, batch) = read_batch(BufReader::new(bytes.as_slice()))
        .map_err(|e| CliError::format(format!("{}: {e}", a.samples.display())))?;
    let report = find_cliques(&g, &batch, a.k, a.max_iters)?;
    Ok(search_report_json(&report, a.bins, prov))
}

pub fn betti(a: &BettiArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let mut g = graph_from(&a.graph)?;
    if let Some(omega) = a.omega {
        g = edge_filter(&g, omega, FilterMode::KeepLeq);
    }
    let complex = density_filter_complex(&g, a.k_ref, a.delta, CliqueSource::Exhaustive)?;
    Ok(betti_json(&betti_numbers(&complex, a.dmax)?, prov))
}

pub fn surface(a: &SurfaceArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let g = graph_from(&a.graph)?;
    Ok(surface_tsv(&filtration_surface(&g, &a.omega, &a.delta, a.k_ref)?, prov))
}

pub fn percolation(a: &PercolationArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let g = damaged(graph_from(&a.graph)?, a.damage_node, a.k)?;
    Ok(percolation_json(&percolation_clusters(&g, a.k)?, prov))
}

pub fn entropy(a: &EntropyArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let g = damaged(graph_from(&a.graph)?, a.damage_node, a.k_ref)?;
    let cfg = SweepConfig {
        k_ref: a.k_ref,
        target_spectral: a.encoding.target_spectral,
        d: a.encoding.d,
        alpha: a.alpha,
        photons: a.photons,
        policy: match a.policy {
            PolicyArg::Collapse => CollisionPolicy::ThresholdCollapse,
            PolicyArg::CollisionFree => CollisionPolicy::CollisionFreeOnly,
        },
        budget: a.cutoffs.budget,
        force_sampled: a.sampled,
        shots: a.shots,
        seed: a.seed,
        cutoff_total: a.cutoffs.cutoff_total,
        cutoff_per_mode: a.cutoffs.cutoff_per_mode,
    };
    Ok(sweep_tsv(&percolation_entropy_sweep(&g, &a.thresholds, &cfg)?, prov))
}

#[derive(Serialize)]
struct BackendOutcome {
    backend: String,
    seed: u64,
    shots: usize,
    successes: usize,
    success_rate: f64,
    interval: Interval,
}

#[derive(Serialize)]
struct Enhancement {
    versus: String,
    /// `None` when either success count is zero.
    ratio: Option<f64>,
    interval: Option<Interval>,
    /// Whether the two rate intervals are disjoint.
    separated: bool,
}

#[derive(Serialize)]
struct CompareBody {
    target_k: usize,
    target: Option<VertexSet>,
    confidence: f64,
    backends: Vec<BackendOutcome>,
    enhancement: Vec<Enhancement>,
}

pub fn compare(a: &CompareArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let g = graph_from(&a.graph)?;
    let target = match &a.target {
        Some(v) => {
            let set = VertexSet::from_unsorted(v.iter().copied());
            if set.len() != a.k {
                return Err(CliError::usage(format!(
                    "--target has {} vertices, --k is {}",
                    set.len(),
                    a.k
                )));
            }
            for &node in set.as_slice() {
                check_node(&g, node)?;
            }
            Some(set)
        }
        None => None,
    };
    let e = encode(&g, a.encoding.target_spectral, a.encoding.d)?;
    let d = enumerate_distribution_with_budget(&e, a.cutoff_total, a.cutoff_per_mode, a.budget)?;
    let batches = [
        (
            "gbs",
            sample_from_distribution_postselected(&d, a.shots, a.min_photons, a.seed)?,
        ),
        ("uniform", sample_uniform(g.n(), a.k, a.shots, a.seed.wrapping_add(1))?),
        (
            "squashed",
            sample_squashed_postselected(&e, a.shots, a.min_photons, a.seed.wrapping_add(2))?,
        ),
    ];
    let hits = |r: &SearchReport| match &target {
        Some(t) => r.cliques_found.iter().filter(|c| &c.vertices == t).count(),
        None => r.successes(),
    };
    let mut outcomes = Vec::new();
    for (name, batch) in &batches {
        let report = find_cliques(&g, batch, a.k, a.max_iters)?;
        let successes = hits(&report);
        outcomes.push(BackendOutcome {
            backend: name.to_string(),
            seed: batch.seed,
            shots: batch.len(),
            successes,
            success_rate: successes as f64 / batch.len().max(1) as f64,
            interval: wilson_interval(successes, batch.len(), Z95),
        });
    }
    let enhancement = outcomes[1..]
        .iter()
        .map(|base| {
            let gbs = &outcomes[0];
            let ratio = ratio_interval(gbs.successes, gbs.shots, base.successes, base.shots, Z95);
            Enhancement {
                versus: base.backend.clone(),
                ratio: ratio.map(|r| r.0),
                interval: ratio.map(|r| r.1),
                separated: !gbs.interval.overlaps(&base.interval),
            }
        })
        .collect();
    let body = CompareBody {
        target_k: a.k,
        target,
        confidence: 0.95,
        backends: outcomes,
        enhancement,
    };
    Ok(with_provenance_json(&body, prov))
}

pub fn persistence(a: &PersistenceArgs, prov: &Provenance) -> Result<Vec<u8>> {
    let g = graph_from(&a.graph)?;
    let mut prov: BTreeMap<String, String> = prov.clone();
    prov.insert(
        "death-convention".into(),
        "absorption: min over common neighbours of the largest attaching magnitude, not below birth".into(),
    );
    Ok(persistence_tsv(&clique_persistence(&g, a.k)?, &prov))
}
