//! Plot-ready exports. Tabular reports start with `# key=value` provenance
//! lines; structured reports carry a `provenance` object.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::cliques::SearchReport;
use crate::entropy::SweepResult;
use crate::graph::VertexSet;
use crate::percolation::PercolationReport;
use crate::tda::{BettiProfile, FiltrationSurface, PersistencePair};

pub type Provenance = BTreeMap<String, String>;

fn header(prov: &Provenance) -> String {
    let mut out = String::new();
    for (k, v) in prov {
        writeln!(out, "# {k}={v}").unwrap();
    }
    out
}

fn join_vertices(s: &VertexSet) -> String {
    s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serialization cannot fail");
    out.push(b'\n');
    out
}

#[derive(Serialize)]
struct CliqueEntry {
    vertices: VertexSet,
    density: f64,
    hits: usize,
}

#[derive(Serialize)]
struct HistogramBin {
    low: f64,
    high: f64,
    count: usize,
}

#[derive(Serialize)]
struct SearchExport<'a> {
    provenance: &'a Provenance,
    target_k: usize,
    shots: usize,
    successes: usize,
    success_rate: f64,
    cliques: Vec<CliqueEntry>,
    density_histogram: Vec<HistogramBin>,
}

/// Search outcome with distinct cliques, densest first.
pub fn search_report_json(r: &SearchReport, bins: usize, prov: &Provenance) -> Vec<u8> {
    to_json(&SearchExport {
        provenance: prov,
        target_k: r.target_k,
        shots: r.shots_in,
        successes: r.successes(),
        success_rate: r.success_rate(),
        cliques: r
            .distinct()
            .into_iter()
            .map(|(c, hits)| CliqueEntry {
                vertices: c.vertices,
                density: c.density,
                hits,
            })
            .collect(),
        density_histogram: r
            .density_histogram(bins)
            .into_iter()
            .map(|(low, high, count)| HistogramBin { low, high, count })
            .collect(),
    })
}

/// One row per grid cell: `omega_t, delta_t, m1..mK, chi, s_chi, tpt`.
pub fn surface_tsv(s: &FiltrationSurface, prov: &Provenance) -> Vec<u8> {
    let kmax = s.max_clique_size().max(1);
    let mut out = header(prov);
    let mut cols = vec!["omega_t".to_string(), "delta_t".to_string()];
    cols.extend((1..=kmax).map(|k| format!("m{k}")));
    cols.extend(["chi", "s_chi", "tpt"].map(String::from));
    writeln!(out, "{}", cols.join("\t")).unwrap();
    for c in s.cells() {
        let mut row = vec![c.omega_t.to_string(), c.delta_t.to_string()];
        row.extend((0..kmax).map(|k| c.counts.get(k).copied().unwrap_or(0).to_string()));
        row.push(c.chi.to_string());
        row.push(c.s_chi.to_string());
        row.push(u8::from(c.tpt).to_string());
        writeln!(out, "{}", row.join("\t")).unwrap();
    }
    out.into_bytes()
}

/// Rows of `vertices, birth, death`; a clique never absorbed dies at `inf`.
pub fn persistence_tsv(pairs: &[PersistencePair], prov: &Provenance) -> Vec<u8> {
    let mut out = header(prov);
    writeln!(out, "vertices\tbirth\tdeath").unwrap();
    for p in pairs {
        writeln!(out, "{}\t{}\t{}", join_vertices(&p.clique), p.birth, p.death).unwrap();
    }
    out.into_bytes()
}

/// Columns `delta_t, phi, n_star, h_alpha, h_norm, shots, backend`, then a
/// `# spearman=` footer.
pub fn sweep_tsv(r: &SweepResult, prov: &Provenance) -> Vec<u8> {
    let mut prov = prov.clone();
    prov.insert("alpha".into(), r.entropy.alpha.to_string());
    prov.insert("photon_total".into(), r.entropy.photon_total.to_string());
    prov.insert("normalization".into(), "ln C(modes, photon_total)".into());
    let mut out = header(&prov);
    writeln!(out, "delta_t\tphi\tn_star\th_alpha\th_norm\tshots\tbackend").unwrap();
    for p in &r.points {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            p.delta_t, p.phi, p.n_star, p.h_alpha, p.h_norm, p.shots, p.backend
        )
        .unwrap();
    }
    match r.correlation {
        Some(rho) => writeln!(out, "# spearman={rho}").unwrap(),
        None => writeln!(out, "# spearman=undefined").unwrap(),
    }
    out.into_bytes()
}

#[derive(Serialize)]
struct BettiExport<'a> {
    provenance: &'a Provenance,
    /// `m_k`, number of cliques with `k` vertices, starting at `k = 1`.
    clique_counts: &'a [usize],
    /// `beta_d` indexed by simplex dimension `d`.
    betti_by_dimension: &'a [usize],
    /// The same numbers indexed by clique size `k = d + 1`.
    betti_by_clique_size: BTreeMap<usize, usize>,
    boundary_ranks: &'a [usize],
    euler_characteristic: i64,
}

pub fn betti_json(p: &BettiProfile, prov: &Provenance) -> Vec<u8> {
    to_json(&BettiExport {
        provenance: prov,
        clique_counts: &p.counts,
        betti_by_dimension: &p.betti,
        betti_by_clique_size: p.betti.iter().enumerate().map(|(d, &b)| (d + 1, b)).collect(),
        boundary_ranks: &p.ranks,
        euler_characteristic: p.euler_characteristic(),
    })
}

#[derive(Serialize)]
struct ClusterEntry<'a> {
    nodes: &'a VertexSet,
    cliques: &'a [VertexSet],
}

#[derive(Serialize)]
struct PercolationExport<'a> {
    provenance: &'a Provenance,
    k: usize,
    n: usize,
    phi: f64,
    largest_nodes: usize,
    clusters: Vec<ClusterEntry<'a>>,
}

pub fn percolation_json(r: &PercolationReport, prov: &Provenance) -> Vec<u8> {
    to_json(&PercolationExport {
        provenance: prov,
        k: r.k,
        n: r.n,
        phi: r.phi,
        largest_nodes: r.largest_nodes,
        clusters: r
            .clusters
            .iter()
            .zip(&r.cluster_cliques)
            .map(|(nodes, cliques)| ClusterEntry { nodes, cliques })
            .collect(),
    })
}

/// Any serializable report with a provenance object in front.
pub fn with_provenance_json<T: Serialize>(body: &T, prov: &Provenance) -> Vec<u8> {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        provenance: &'a Provenance,
        #[serde(flatten)]
        body: &'a T,
    }
    to_json(&Wrapped { provenance: prov, body })
}
