//! Random palette constructions and (d, eta, star)-density audits.
//!
//! Counting uses per-pair link bitsets, so sampled audits stay cheap even
//! at a few hundred vertices. Exhaustive audits enumerate the full witness
//! class (with the third argument optimized analytically) and therefore
//! prove the density bound for every subset in the class.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::palette::Palette;
use crate::satisfaction::{pair_key, SatisfactionCertificate};
use crate::weighting::{StarMode, Weighting};

/// SplitMix64 finalizer; derives independent stream seeds from a master
/// seed so batches replay bit-exactly regardless of scheduling.
pub fn split_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn require_3graph(h: &Hypergraph) -> Result<()> {
    if h.k() != 3 {
        return Err(Error::InvalidInput(format!("density counting needs a 3-graph, got k={}", h.k())));
    }
    Ok(())
}

fn check_vertices(h: &Hypergraph, vs: &[usize]) -> Result<()> {
    for &v in vs {
        if v < 1 || v > h.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
        }
    }
    Ok(())
}

fn dedup_sorted(vs: &[usize]) -> Vec<usize> {
    let mut out = vs.to_vec();
    out.sort_unstable();
    out.dedup();
    out
}

fn dedup_pairs(h: &Hypergraph, pairs: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(pairs.len());
    for &(u, v) in pairs {
        check_vertices(h, &[u, v])?;
        if u == v {
            return Err(Error::InvalidInput(format!("pair ({u},{v}) repeats a vertex")));
        }
        out.push(pair_key(u, v));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Per-pair link bitsets of a 3-graph: `link(u,v)` is the set of third
/// vertices completing an edge with the pair.
struct LinkTable {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl LinkTable {
    fn new(h: &Hypergraph) -> Self {
        let n = h.n();
        let words = n.div_ceil(64);
        let pair_total = n * (n - 1) / 2;
        let mut bits = vec![0u64; pair_total * words];
        for e in h.edges() {
            let (a, b, c) = (e[0], e[1], e[2]);
            for (u, v, w) in [(a, b, c), (a, c, b), (b, c, a)] {
                let pid = pair_id(n, u, v);
                bits[pid * words + (w - 1) / 64] |= 1 << ((w - 1) % 64);
            }
        }
        Self { n, words, bits }
    }

    fn link(&self, u: usize, v: usize) -> &[u64] {
        let pid = pair_id(self.n, u, v);
        &self.bits[pid * self.words..(pid + 1) * self.words]
    }
}

fn pair_id(n: usize, u: usize, v: usize) -> usize {
    let (u, v) = pair_key(u, v);
    (u - 1) * (2 * n - u) / 2 + (v - u - 1)
}

fn vertex_mask(n: usize, vs: &[usize]) -> Vec<u64> {
    let mut mask = vec![0u64; n.div_ceil(64)];
    for &v in vs {
        mask[(v - 1) / 64] |= 1 << ((v - 1) % 64);
    }
    mask
}

fn and_popcount(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

/// Number of ordered triples `(x,y,z)` in `X x Y x Z` forming an edge.
/// The sets need not be disjoint; tuples with repeated vertices never
/// count because edges have three distinct vertices.
pub fn count_evvv(h: &Hypergraph, x: &[usize], y: &[usize], z: &[usize]) -> Result<u64> {
    require_3graph(h)?;
    check_vertices(h, x)?;
    check_vertices(h, y)?;
    check_vertices(h, z)?;
    let (x, y, z) = (dedup_sorted(x), dedup_sorted(y), dedup_sorted(z));
    if x.is_empty() || y.is_empty() || z.is_empty() || h.edge_count() == 0 {
        return Ok(0);
    }
    let links = LinkTable::new(h);
    let zmask = vertex_mask(h.n(), &z);
    let mut total = 0u64;
    for &xv in &x {
        for &yv in &y {
            if xv == yv {
                continue;
            }
            total += and_popcount(links.link(xv, yv), &zmask);
        }
    }
    Ok(total)
}

/// Number of pairs `(x, {y,z})` with `x` in `X`, `{y,z}` in `pairs`, and
/// `{x,y,z}` an edge.
pub fn count_eev(h: &Hypergraph, x: &[usize], pairs: &[(usize, usize)]) -> Result<u64> {
    require_3graph(h)?;
    check_vertices(h, x)?;
    let pairs = dedup_pairs(h, pairs)?;
    let x = dedup_sorted(&x.to_vec());
    if x.is_empty() || pairs.is_empty() || h.edge_count() == 0 {
        return Ok(0);
    }
    let links = LinkTable::new(h);
    let xmask = vertex_mask(h.n(), &x);
    let mut total = 0u64;
    for &(u, v) in &pairs {
        total += and_popcount(links.link(u, v), &xmask);
    }
    Ok(total)
}

/// `(|K_ee|, |E_ee|)` for pair sets `P` and `Q`: hinge walks `(x,y,z)` with
/// `{x,y}` in `P` and `{y,z}` in `Q`, and the edge-supported subset.
/// Degenerate walks with `x = z` belong to `K_ee` but can never be edges.
pub fn count_kee_and_eee(h: &Hypergraph, pset: &[(usize, usize)], qset: &[(usize, usize)]) -> Result<(u64, u64)> {
    require_3graph(h)?;
    let pset = dedup_pairs(h, pset)?;
    let qset = dedup_pairs(h, qset)?;
    let n = h.n();
    let mut p_nbrs: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut q_deg = vec![0u64; n + 1];
    let mut q_mask: Vec<Vec<u64>> = vec![vec![0u64; n.div_ceil(64)]; n + 1];
    for &(u, v) in &pset {
        p_nbrs[u].push(v);
        p_nbrs[v].push(u);
    }
    for &(u, v) in &qset {
        q_deg[u] += 1;
        q_deg[v] += 1;
        q_mask[u][(v - 1) / 64] |= 1 << ((v - 1) % 64);
        q_mask[v][(u - 1) / 64] |= 1 << ((u - 1) % 64);
    }
    let mut kee = 0u64;
    for y in 1..=n {
        kee += p_nbrs[y].len() as u64 * q_deg[y];
    }
    let mut eee = 0u64;
    if h.edge_count() > 0 && !pset.is_empty() && !qset.is_empty() {
        let links = LinkTable::new(h);
        for y in 1..=n {
            for &x in &p_nbrs[y] {
                eee += and_popcount(links.link(x, y), &q_mask[y]);
            }
        }
    }
    Ok((kee, eee))
}

/// Transversal triangles across three disjoint classes whose pair colours
/// follow the pattern `(a, b, c)` on (V1V2, V2V3, V1V3).
pub fn count_colour_triangles(
    classes: &[Vec<usize>; 3],
    colouring: &BTreeMap<(usize, usize), u32>,
    pattern: (u32, u32, u32),
) -> Result<u64> {
    let mut seen = BTreeSet::new();
    for class in classes {
        for &v in class {
            if !seen.insert(v) {
                return Err(Error::ClassesNotDisjoint);
            }
        }
    }
    let (v1, v2, v3) = (&classes[0], &classes[1], &classes[2]);
    let (a, b, c) = pattern;
    let colour = |u: usize, v: usize| -> Result<u32> {
        colouring
            .get(&pair_key(u, v))
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("missing colour for pair {{{u},{v}}}")))
    };
    let words = v3.len().div_ceil(64).max(1);
    // Bitmasks over V3 positions: which z complete a b-pair with y / c-pair with x.
    let mut b_of_y: Vec<Vec<u64>> = Vec::with_capacity(v2.len());
    for &y in v2 {
        let mut mask = vec![0u64; words];
        for (zi, &z) in v3.iter().enumerate() {
            if colour(y, z)? == b {
                mask[zi / 64] |= 1 << (zi % 64);
            }
        }
        b_of_y.push(mask);
    }
    let mut c_of_x: Vec<Vec<u64>> = Vec::with_capacity(v1.len());
    for &x in v1 {
        let mut mask = vec![0u64; words];
        for (zi, &z) in v3.iter().enumerate() {
            if colour(x, z)? == c {
                mask[zi / 64] |= 1 << (zi % 64);
            }
        }
        c_of_x.push(mask);
    }
    let mut total = 0u64;
    for (xi, &x) in v1.iter().enumerate() {
        for (yi, &y) in v2.iter().enumerate() {
            if colour(x, y)? == a {
                total += and_popcount(&c_of_x[xi], &b_of_y[yi]);
            }
        }
    }
    Ok(total)
}

/// A palette-based random construction together with everything needed to
/// regenerate and certify it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PaletteConstruction {
    pub hypergraph: Hypergraph,
    pub ordering: Vec<usize>,
    pub colouring: BTreeMap<(usize, usize), u32>,
    pub weighting: Weighting,
    pub seed: u64,
}

impl PaletteConstruction {
    pub fn certificate(&self) -> SatisfactionCertificate {
        SatisfactionCertificate::new(self.ordering.clone(), self.colouring.clone())
    }
}

/// Rebuilds the edge set a pair colouring induces under a palette: the
/// triple `{i<j<k}` is an edge iff its ordered colour shadow lies in the
/// palette.
pub fn edges_from_colouring(p: &Palette, n: usize, colouring: &BTreeMap<(usize, usize), u32>) -> Result<Hypergraph> {
    let triple_set: BTreeSet<[u32; 3]> = p.triples().iter().copied().collect();
    let mut edges = Vec::new();
    if !p.is_empty() {
        let colour = |u: usize, v: usize| -> Result<u32> {
            colouring
                .get(&pair_key(u, v))
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("missing colour for pair {{{u},{v}}}")))
        };
        for i in 1..=n {
            for j in (i + 1)..=n {
                let cij = colour(i, j)?;
                for k in (j + 1)..=n {
                    let shadow = [cij, colour(j, k)?, colour(i, k)?];
                    if triple_set.contains(&shadow) {
                        edges.push(vec![i, j, k]);
                    }
                }
            }
        }
    }
    Hypergraph::new(3, n, edges)
}

/// Samples the iid pair colouring with distribution `x` over the palette's
/// colours and keeps exactly the triples whose shadow lies in the palette.
/// Deterministic for a fixed seed; the expected edge density is the vvv
/// polynomial at `x`.
pub fn generate_construction(p: &Palette, x: &Weighting, n: usize, seed: u64) -> Result<PaletteConstruction> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("construction needs n >= 3, got {n}")));
    }
    if x.dim() != p.colour_count() {
        return Err(Error::DimensionMismatch { expected: p.colour_count(), got: x.dim() });
    }
    let mut colouring = BTreeMap::new();
    if !p.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let colours = p.colours();
        let weights = x.as_slice();
        for u in 1..=n {
            for v in (u + 1)..=n {
                let r: f64 = rng.random();
                let mut acc = 0.0;
                let mut chosen = colours[colours.len() - 1];
                for (i, &c) in colours.iter().enumerate() {
                    acc += weights[i];
                    if r < acc {
                        chosen = c;
                        break;
                    }
                }
                colouring.insert((u, v), chosen);
            }
        }
    }
    let hypergraph = edges_from_colouring(p, n, &colouring)?;
    Ok(PaletteConstruction {
        hypergraph,
        ordering: (1..=n).collect(),
        colouring,
        weighting: x.clone(),
        seed,
    })
}

/// Seeded Erdos-Renyi style k-graph: every k-subset is an edge
/// independently with probability `edge_prob`.
pub fn random_hypergraph(k: usize, n: usize, edge_prob: f64, seed: u64) -> Result<Hypergraph> {
    use itertools::Itertools;
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Vec<usize>> = (1..=n)
        .combinations(k)
        .filter(|_| rng.random::<f64>() < edge_prob)
        .collect();
    Hypergraph::new(k, n, edges)
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditConfig {
    /// The eta of the density definition; folded into every witness ratio.
    pub eta: f64,
    /// Random witnesses drawn across the rho sweep (sampled mode).
    pub samples: usize,
    /// Densities of the random subsets; the definition's adversary is
    /// linear-sized, so these sweep a few linear fractions.
    pub rhos: Vec<f64>,
    pub seed: u64,
    pub exhaustive: bool,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            eta: 0.01,
            samples: 10_000,
            rhos: vec![0.1, 0.25, 0.5],
            seed: 0,
            exhaustive: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AuditMode {
    Exhaustive,
    Sampled,
}

/// The subsets achieving the reported minimum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Witness {
    Vvv { x: Vec<usize>, y: Vec<usize>, z: Vec<usize> },
    Ev { x: Vec<usize>, pairs: Vec<(usize, usize)> },
    Ee { pset: Vec<(usize, usize)>, qset: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityAudit {
    pub star: StarMode,
    pub d_estimate: f64,
    pub eta: f64,
    pub witness: Witness,
    pub mode: AuditMode,
    pub samples: usize,
    pub seed: u64,
}

/// Recounts a witness: `(count + eta n^3) / denominator`. The audit's
/// `d_estimate` is the minimum of this over everything it examined,
/// clamped to [0, 1].
pub fn witness_ratio(h: &Hypergraph, eta: f64, witness: &Witness) -> Result<f64> {
    let n3 = (h.n() as f64).powi(3);
    let (num, den) = match witness {
        Witness::Vvv { x, y, z } => {
            let e = count_evvv(h, x, y, z)? as f64;
            let den = (x.len() * y.len() * z.len()) as f64;
            (e + eta * n3, den)
        }
        Witness::Ev { x, pairs } => {
            let e = count_eev(h, x, pairs)? as f64;
            let den = (x.len() * pairs.len()) as f64;
            (e + eta * n3, den)
        }
        Witness::Ee { pset, qset } => {
            let (kee, eee) = count_kee_and_eee(h, pset, qset)?;
            (eee as f64 + eta * n3, kee as f64)
        }
    };
    if den == 0.0 {
        return Err(Error::InvalidInput("witness has an empty denominator".into()));
    }
    Ok(num / den)
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

struct MinTracker {
    ratio: f64,
    witness: Option<Witness>,
}

impl MinTracker {
    fn new() -> Self {
        Self { ratio: f64::INFINITY, witness: None }
    }

    fn offer(&mut self, ratio: f64, witness: impl FnOnce() -> Witness) {
        if ratio < self.ratio {
            self.ratio = ratio;
            self.witness = Some(witness());
        }
    }
}

fn interval(n: usize, from: usize, len: usize) -> Vec<usize> {
    (from..from + len).filter(|&v| v >= 1 && v <= n).collect()
}

/// Structured adversarial vertex sets: the full set, prefixes, suffixes,
/// and degree-extremal blocks.
fn structured_vertex_sets(h: &Hypergraph) -> Vec<Vec<usize>> {
    let n = h.n();
    let mut sets: Vec<Vec<usize>> = vec![(1..=n).collect()];
    for frac in [4, 2] {
        let len = n.div_ceil(frac);
        sets.push(interval(n, 1, len));
        sets.push(interval(n, n - len + 1, len));
    }
    sets.push(interval(n, 1, 3 * n.div_ceil(4)));
    let mut by_degree: Vec<usize> = (1..=n).collect();
    by_degree.sort_by_key(|&v| (h.degree(v), v));
    for frac in [4, 2] {
        let len = n.div_ceil(frac);
        sets.push(by_degree[..len].to_vec());
        sets.push(by_degree[n - len..].to_vec());
    }
    sets.retain(|s| !s.is_empty());
    sets.dedup();
    sets
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for u in 1..=n {
        for v in (u + 1)..=n {
            out.push((u, v));
        }
    }
    out
}

/// Pair classes of a greedy codegree colouring: pairs bucketed into
/// tertiles by how many edges they sit in.
fn codegree_pair_classes(h: &Hypergraph) -> Vec<Vec<(usize, usize)>> {
    let links = LinkTable::new(h);
    let mut pairs: Vec<((usize, usize), u64)> = all_pairs(h.n())
        .into_iter()
        .map(|(u, v)| {
            let deg: u64 = links.link(u, v).iter().map(|w| w.count_ones() as u64).sum();
            ((u, v), deg)
        })
        .collect();
    pairs.sort_by_key(|&(p, d)| (d, p));
    let third = pairs.len().div_ceil(3).max(1);
    pairs
        .chunks(third)
        .map(|chunk| chunk.iter().map(|&(p, _)| p).collect())
        .collect()
}

fn sample_vertices(n: usize, rho: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (1..=n).filter(|_| rng.random::<f64>() < rho).collect()
}

fn sample_pairs(pairs: &[(usize, usize)], rho: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    pairs.iter().copied().filter(|_| rng.random::<f64>() < rho).collect()
}

fn sampled_audit(h: &Hypergraph, star: StarMode, config: &AuditConfig) -> Result<DensityAudit> {
    let n = h.n();
    let eta = config.eta;
    let mut tracker = MinTracker::new();

    let vertex_sets = structured_vertex_sets(h);
    let pairs_universe = all_pairs(n);
    let pair_classes = codegree_pair_classes(h);

    match star {
        StarMode::Vvv => {
            for s in &vertex_sets {
                let w = Witness::Vvv { x: s.clone(), y: s.clone(), z: s.clone() };
                if let Ok(r) = witness_ratio(h, eta, &w) {
                    tracker.offer(r, || w.clone());
                }
            }
            // Disjoint thirds, by label and by degree.
            let third = n / 3;
            if third >= 1 {
                let w = Witness::Vvv {
                    x: interval(n, 1, third),
                    y: interval(n, third + 1, third),
                    z: interval(n, 2 * third + 1, n - 2 * third),
                };
                if let Ok(r) = witness_ratio(h, eta, &w) {
                    tracker.offer(r, || w.clone());
                }
            }
        }
        StarMode::Ev => {
            let mut pair_sets: Vec<Vec<(usize, usize)>> = vec![pairs_universe.clone()];
            pair_sets.extend(pair_classes.iter().cloned());
            for s in &vertex_sets {
                for ps in &pair_sets {
                    let w = Witness::Ev { x: s.clone(), pairs: ps.clone() };
                    if let Ok(r) = witness_ratio(h, eta, &w) {
                        tracker.offer(r, || w.clone());
                    }
                }
            }
        }
        StarMode::Ee => {
            let mut pair_sets: Vec<Vec<(usize, usize)>> = vec![pairs_universe.clone()];
            pair_sets.extend(pair_classes.iter().cloned());
            for ps in &pair_sets {
                for qs in &pair_sets {
                    let w = Witness::Ee { pset: ps.clone(), qset: qs.clone() };
                    if let Ok(r) = witness_ratio(h, eta, &w) {
                        tracker.offer(r, || w.clone());
                    }
                }
            }
        }
    }

    let batches = config.rhos.len().max(1);
    let per_batch = config.samples / batches;
    for (bi, &rho) in config.rhos.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed(config.seed, bi as u64));
        for _ in 0..per_batch {
            let w = match star {
                StarMode::Vvv => Witness::Vvv {
                    x: sample_vertices(n, rho, &mut rng),
                    y: sample_vertices(n, rho, &mut rng),
                    z: sample_vertices(n, rho, &mut rng),
                },
                StarMode::Ev => Witness::Ev {
                    x: sample_vertices(n, rho, &mut rng),
                    pairs: sample_pairs(&pairs_universe, rho, &mut rng),
                },
                StarMode::Ee => Witness::Ee {
                    pset: sample_pairs(&pairs_universe, rho, &mut rng),
                    qset: sample_pairs(&pairs_universe, rho, &mut rng),
                },
            };
            if let Ok(r) = witness_ratio(h, eta, &w) {
                tracker.offer(r, || w.clone());
            }
        }
    }

    let witness = tracker
        .witness
        .ok_or_else(|| Error::InvalidInput("no witness with a non-empty denominator".into()))?;
    Ok(DensityAudit {
        star,
        d_estimate: clamp01(tracker.ratio),
        eta,
        witness,
        mode: AuditMode::Sampled,
        samples: config.samples,
        seed: config.seed,
    })
}

const EXHAUSTIVE_CAP_VVV: usize = 12;
const EXHAUSTIVE_CAP_EV_EE: usize = 7;

fn mask_to_vertices(mask: u32, n: usize) -> Vec<usize> {
    (1..=n).filter(|v| mask >> (v - 1) & 1 == 1).collect()
}

/// Exhaustive vvv audit: enumerates all (X, Y) and optimizes Z
/// analytically — for fixed X and Y the count is additive over Z, so the
/// minimizing Z of each size is a prefix of the per-vertex counts sorted
/// ascending. Proves the bound for every (X, Y, Z).
fn exhaustive_vvv(h: &Hypergraph, eta: f64) -> Result<(f64, Witness)> {
    let n = h.n();
    let links = LinkTable::new(h);
    let n3 = (n as f64).powi(3);
    let mut best = f64::INFINITY;
    let mut best_witness = None;
    let full = 1u32 << n;
    let mut counts: Vec<(u64, usize)> = Vec::with_capacity(n);
    for xmask in 1..full {
        let xs = mask_to_vertices(xmask, n);
        for ymask in 1..full {
            let ymask_words = [ymask as u64];
            counts.clear();
            for z in 1..=n {
                let mut c = 0u64;
                for &x in &xs {
                    if x != z {
                        c += and_popcount(links.link(x, z), &ymask_words);
                    }
                }
                counts.push((c, z));
            }
            counts.sort_unstable();
            let xy = (xs.len() * (ymask.count_ones() as usize)) as f64;
            let mut prefix = 0u64;
            for (k, &(c, _)) in counts.iter().enumerate() {
                prefix += c;
                let ratio = (prefix as f64 + eta * n3) / (xy * (k + 1) as f64);
                if ratio < best {
                    best = ratio;
                    best_witness = Some((xmask, ymask, counts[..=k].iter().map(|&(_, z)| z).collect::<Vec<_>>()));
                }
            }
        }
    }
    let (xmask, ymask, z) = best_witness.unwrap();
    Ok((
        best,
        Witness::Vvv {
            x: mask_to_vertices(xmask, n),
            y: mask_to_vertices(ymask, n),
            z,
        },
    ))
}

/// Exhaustive ev audit: enumerates X; for fixed X the count is additive
/// over the pair set, so the optimal pair set of each size is a sorted
/// prefix.
fn exhaustive_ev(h: &Hypergraph, eta: f64) -> Result<(f64, Witness)> {
    let n = h.n();
    let links = LinkTable::new(h);
    let n3 = (n as f64).powi(3);
    let pairs = all_pairs(n);
    let mut best = f64::INFINITY;
    let mut best_witness = None;
    for xmask in 1u32..(1 << n) {
        let xs = mask_to_vertices(xmask, n);
        let xmask_words = vertex_mask(n, &xs);
        let mut weights: Vec<(u64, (usize, usize))> = pairs
            .iter()
            .map(|&(u, v)| (and_popcount(links.link(u, v), &xmask_words), (u, v)))
            .collect();
        weights.sort_unstable();
        let mut prefix = 0u64;
        for (k, &(w, _)) in weights.iter().enumerate() {
            prefix += w;
            let ratio = (prefix as f64 + eta * n3) / ((xs.len() * (k + 1)) as f64);
            if ratio < best {
                best = ratio;
                best_witness = Some((xmask, weights[..=k].iter().map(|&(_, p)| p).collect::<Vec<_>>()));
            }
        }
    }
    let (xmask, pairs) = best_witness.unwrap();
    Ok((best, Witness::Ev { x: mask_to_vertices(xmask, n), pairs }))
}

/// Exhaustive ee audit. P is enumerated in Gray-code order with the
/// per-pair walk/edge contributions maintained incrementally; the optimal
/// Q for each P is found by Dinkelbach iteration on the ratio
/// `(E(Q) + eta n^3) / K(Q)`, exact on a finite ground set.
fn exhaustive_ee(h: &Hypergraph, eta: f64) -> Result<(f64, Witness)> {
    let n = h.n();
    let pairs = all_pairs(n);
    let np = pairs.len();
    let n3 = (n as f64).powi(3);
    // Per ordered (p, q): walk multiplicity |p cap q| and edge support.
    let mut inter = vec![vec![0u8; np]; np];
    let mut edge = vec![vec![0u8; np]; np];
    for (pi, &(a, b)) in pairs.iter().enumerate() {
        for (qi, &(c, d)) in pairs.iter().enumerate() {
            let shared = [a, b].iter().filter(|v| [c, d].contains(v)).count();
            inter[pi][qi] = shared as u8;
            if shared == 1 {
                let mut verts = vec![a, b, c, d];
                verts.sort_unstable();
                verts.dedup();
                if verts.len() == 3 && h.has_edge(&verts) {
                    edge[pi][qi] = 1;
                }
            }
        }
    }
    let mut a_of_q = vec![0i64; np]; // edge-supported walks from current P through q
    let mut b_of_q = vec![0i64; np]; // all walks from current P through q
    let mut best = f64::INFINITY;
    let mut best_witness: Option<(u32, Vec<usize>)> = None;
    let mut pmask: u32 = 0;
    for i in 1u32..(1 << np) {
        let flip = i.trailing_zeros() as usize;
        pmask ^= 1 << flip;
        let sign: i64 = if pmask >> flip & 1 == 1 { 1 } else { -1 };
        for q in 0..np {
            a_of_q[q] += sign * edge[flip][q] as i64;
            b_of_q[q] += sign * inter[flip][q] as i64;
        }
        if pmask == 0 {
            continue;
        }
        // Dinkelbach: start from the all-walks Q, then re-select
        // q : a_q < r * b_q until the ratio stops improving.
        let mut qsel: Vec<usize> = (0..np).filter(|&q| b_of_q[q] > 0).collect();
        if qsel.is_empty() {
            continue;
        }
        let ratio_of = |qs: &[usize]| -> f64 {
            let a: i64 = qs.iter().map(|&q| a_of_q[q]).sum();
            let b: i64 = qs.iter().map(|&q| b_of_q[q]).sum();
            (a as f64 + eta * n3) / b as f64
        };
        let mut r = ratio_of(&qsel);
        for _ in 0..100 {
            let next: Vec<usize> = (0..np)
                .filter(|&q| (a_of_q[q] as f64) < r * b_of_q[q] as f64)
                .collect();
            if next.is_empty() {
                break;
            }
            let nr = ratio_of(&next);
            if nr >= r - 1e-15 {
                break;
            }
            r = nr;
            qsel = next;
        }
        if r < best {
            best = r;
            best_witness = Some((pmask, qsel));
        }
    }
    let (pmask, qsel) = best_witness.ok_or_else(|| Error::InvalidInput("no pair subset with walks".into()))?;
    Ok((
        best,
        Witness::Ee {
            pset: (0..np).filter(|&p| pmask >> p & 1 == 1).map(|p| pairs[p]).collect(),
            qset: qsel.into_iter().map(|q| pairs[q]).collect(),
        },
    ))
}

/// Audits the (d, eta, star)-density of a 3-graph: reports the largest `d`
/// consistent with every witness examined, together with the minimizing
/// witness. Exhaustive mode proves the bound over the whole witness class
/// and is capped (n <= 12 for vvv, n <= 7 for ev/ee).
pub fn audit_density(h: &Hypergraph, star: StarMode, config: &AuditConfig) -> Result<DensityAudit> {
    require_3graph(h)?;
    if h.n() < 3 {
        return Err(Error::InvalidInput(format!("density audit needs n >= 3, got {}", h.n())));
    }
    if !config.exhaustive {
        return sampled_audit(h, star, config);
    }
    let cap = match star {
        StarMode::Vvv => EXHAUSTIVE_CAP_VVV,
        StarMode::Ev | StarMode::Ee => EXHAUSTIVE_CAP_EV_EE,
    };
    if h.n() > cap {
        return Err(Error::ExhaustiveCap { n: h.n(), cap });
    }
    let (ratio, witness) = match star {
        StarMode::Vvv => exhaustive_vvv(h, config.eta)?,
        StarMode::Ev => exhaustive_ev(h, config.eta)?,
        StarMode::Ee => exhaustive_ee(h, config.eta)?,
    };
    Ok(DensityAudit {
        star,
        d_estimate: clamp01(ratio),
        eta: config.eta,
        witness,
        mode: AuditMode::Exhaustive,
        samples: 0,
        seed: config.seed,
    })
}
