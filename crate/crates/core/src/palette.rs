//! Palettes: finite sets of ordered colour triples, their vvv/ev/ee
//! Lagrangians, and the `p_t` palettes derived from a 3-graph.
//!
//! Palette text format: one ordered triple `a b c` of non-negative integers
//! per non-empty line, `#` for comments. Serialization is canonical
//! (triples in lexicographic order).

use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::lagrangian::{better_candidate, composition_count, for_each_composition, Method, DEFAULT_GRID_BUDGET};
use crate::opt::{self, AscentOptions};
use crate::weighting::{StarMode, Weighting, POSITIVITY_EPS};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Palette {
    triples: Vec<[u32; 3]>,
    colours: Vec<u32>,
}

impl Palette {
    /// Builds a palette from ordered triples. Triples are ordered
    /// ((1,2,3) differs from (2,1,3)) and may repeat a colour within a
    /// triple; duplicate triples are rejected.
    pub fn new(mut triples: Vec<[u32; 3]>) -> Result<Self> {
        triples.sort_unstable();
        if triples.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPalette("duplicate triple".into()));
        }
        let colours: BTreeSet<u32> = triples.iter().flatten().copied().collect();
        Ok(Self { triples, colours: colours.into_iter().collect() })
    }

    pub fn empty() -> Self {
        Self { triples: Vec::new(), colours: Vec::new() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut triples: Vec<[u32; 3]> = Vec::new();
        let mut seen: BTreeSet<[u32; 3]> = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 3 colour tokens, found {}", tokens.len()),
                });
            }
            let mut t = [0u32; 3];
            for (i, tok) in tokens.iter().enumerate() {
                t[i] = tok.parse::<u32>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid colour token '{tok}'"),
                })?;
            }
            if !seen.insert(t) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate triple {} {} {}", t[0], t[1], t[2]),
                });
            }
            triples.push(t);
        }
        Self::new(triples)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Triples in lexicographic order.
    pub fn triples(&self) -> &[[u32; 3]] {
        &self.triples
    }

    /// The derived colour set, sorted ascending. Weightings over the
    /// palette are indexed by position in this slice.
    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    pub fn colour_count(&self) -> usize {
        self.colours.len()
    }

    pub fn colour_index(&self, colour: u32) -> Option<usize> {
        self.colours.binary_search(&colour).ok()
    }

    pub fn contains(&self, triple: &[u32; 3]) -> bool {
        self.triples.binary_search(triple).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples with colours remapped to dense indices into `colours()`.
    pub(crate) fn indexed_triples(&self) -> Vec<[usize; 3]> {
        self.triples
            .iter()
            .map(|t| {
                [
                    self.colour_index(t[0]).unwrap(),
                    self.colour_index(t[1]).unwrap(),
                    self.colour_index(t[2]).unwrap(),
                ]
            })
            .collect()
    }
}

impl fmt::Display for Palette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.triples {
            writeln!(f, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

/// Builds the palette whose triples are, for each edge `{a<b<c}` of the
/// 3-graph, the first `t` of the six permutations of `(a,b,c)` listed in
/// lexicographic order. Its vvv polynomial is `t/6` times the Lagrange
/// polynomial of the graph.
pub fn build_pt(f: &Hypergraph, t: usize) -> Result<Palette> {
    if f.k() != 3 {
        return Err(Error::InvalidInput(format!("p_t palettes need a 3-graph, got k={}", f.k())));
    }
    if !(1..=6).contains(&t) {
        return Err(Error::InvalidInput(format!("t must be in 1..=6, got {t}")));
    }
    let mut triples: BTreeSet<[u32; 3]> = BTreeSet::new();
    for e in f.edges() {
        let (a, b, c) = (e[0] as u32, e[1] as u32, e[2] as u32);
        let mut perms = [
            [a, b, c],
            [a, c, b],
            [b, a, c],
            [b, c, a],
            [c, a, b],
            [c, b, a],
        ];
        perms.sort_unstable();
        for p in perms.iter().take(t) {
            triples.insert(*p);
        }
    }
    Palette::new(triples.into_iter().collect())
}

/// Seeded random palette over colours `1..=max_colours`: `triple_count`
/// draws with duplicates discarded, so the result may be smaller.
pub fn random_palette(max_colours: u32, triple_count: usize, seed: u64) -> Palette {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples: BTreeSet<[u32; 3]> = BTreeSet::new();
    for _ in 0..triple_count {
        let t = [
            rng.random_range(1..=max_colours),
            rng.random_range(1..=max_colours),
            rng.random_range(1..=max_colours),
        ];
        triples.insert(t);
    }
    Palette::new(triples.into_iter().collect()).expect("deduplicated triples are valid")
}

fn check_weighting(p: &Palette, x: &Weighting) -> Result<()> {
    if x.dim() != p.colour_count() {
        return Err(Error::DimensionMismatch { expected: p.colour_count(), got: x.dim() });
    }
    Ok(())
}

pub(crate) fn vvv_on_slice(triples: &[[usize; 3]], x: &[f64]) -> f64 {
    triples.iter().map(|t| x[t[0]] * x[t[1]] * x[t[2]]).sum()
}

fn vvv_grad_on_slice(triples: &[[usize; 3]], x: &[f64], g: &mut [f64]) {
    for v in g.iter_mut() {
        *v = 0.0;
    }
    for t in triples {
        g[t[0]] += x[t[1]] * x[t[2]];
        g[t[1]] += x[t[0]] * x[t[2]];
        g[t[2]] += x[t[0]] * x[t[1]];
    }
}

/// `sum over (a,b,c) in P of x_a x_b x_c`.
pub fn lambda_vvv(p: &Palette, x: &Weighting) -> Result<f64> {
    check_weighting(p, x)?;
    Ok(vvv_on_slice(&p.indexed_triples(), x.as_slice()))
}

fn degree_index(triples: &[[usize; 3]], a: usize, x: &[f64]) -> f64 {
    let mut s = [0.0f64; 3];
    for t in triples {
        if t[0] == a {
            s[0] += x[t[1]] * x[t[2]];
        }
        if t[1] == a {
            s[1] += x[t[0]] * x[t[2]];
        }
        if t[2] == a {
            s[2] += x[t[0]] * x[t[1]];
        }
    }
    s[0].min(s[1]).min(s[2])
}

fn codegree_index(triples: &[[usize; 3]], a: usize, b: usize, x: &[f64]) -> f64 {
    let mut s = [0.0f64; 6];
    for t in triples {
        if t[0] == a && t[1] == b {
            s[0] += x[t[2]];
        }
        if t[0] == b && t[1] == a {
            s[1] += x[t[2]];
        }
        if t[0] == a && t[2] == b {
            s[2] += x[t[1]];
        }
        if t[0] == b && t[2] == a {
            s[3] += x[t[1]];
        }
        if t[1] == a && t[2] == b {
            s[4] += x[t[0]];
        }
        if t[1] == b && t[2] == a {
            s[5] += x[t[0]];
        }
    }
    s.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Ordered degree Lagrangian: the minimum over the three coordinate
/// positions of the bilinear weight of triples carrying `a` there.
pub fn degree_lagrangian(p: &Palette, a: u32, x: &Weighting) -> Result<f64> {
    check_weighting(p, x)?;
    let ai = p.colour_index(a).ok_or(Error::UnknownColour(a))?;
    Ok(degree_index(&p.indexed_triples(), ai, x.as_slice()))
}

/// Ordered codegree Lagrangian: the minimum over the six position patterns
/// of the linear weight of triples carrying `a` and `b` there (`a = b`
/// allowed).
pub fn codegree_lagrangian(p: &Palette, a: u32, b: u32, x: &Weighting) -> Result<f64> {
    check_weighting(p, x)?;
    let ai = p.colour_index(a).ok_or(Error::UnknownColour(a))?;
    let bi = p.colour_index(b).ok_or(Error::UnknownColour(b))?;
    Ok(codegree_index(&p.indexed_triples(), ai, bi, x.as_slice()))
}

fn ev_on_slice(triples: &[[usize; 3]], x: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..x.len() {
        if x[a] > POSITIVITY_EPS {
            best = best.min(degree_index(triples, a, x));
        }
    }
    best
}

fn ee_on_slice(triples: &[[usize; 3]], x: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..x.len() {
        if x[a] <= POSITIVITY_EPS {
            continue;
        }
        for b in a..x.len() {
            if x[b] <= POSITIVITY_EPS {
                continue;
            }
            best = best.min(codegree_index(triples, a, b, x));
        }
    }
    best
}

/// Minimum of the degree Lagrangians over the colours with positive weight.
pub fn lambda_ev(p: &Palette, x: &Weighting) -> Result<f64> {
    check_weighting(p, x)?;
    if p.colour_count() == 0 {
        return Err(Error::InvalidInput("empty colour set".into()));
    }
    Ok(ev_on_slice(&p.indexed_triples(), x.as_slice()))
}

/// Minimum of the codegree Lagrangians over colour pairs with positive
/// weight.
pub fn lambda_ee(p: &Palette, x: &Weighting) -> Result<f64> {
    check_weighting(p, x)?;
    if p.colour_count() == 0 {
        return Err(Error::InvalidInput("empty colour set".into()));
    }
    Ok(ee_on_slice(&p.indexed_triples(), x.as_slice()))
}

fn star_on_slice(star: StarMode, triples: &[[usize; 3]], x: &[f64]) -> f64 {
    match star {
        StarMode::Vvv => vvv_on_slice(triples, x),
        StarMode::Ev => ev_on_slice(triples, x),
        StarMode::Ee => ee_on_slice(triples, x),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PaletteSolverConfig {
    /// Random restarts for the smooth vvv objective.
    pub starts: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Supports are enumerated exactly up to this many colours; beyond it
    /// the solver falls back to a single full-support heuristic pass.
    pub support_cap: usize,
    /// Restarts of the smoothed max-min ascent per support.
    pub minmax_restarts: usize,
    pub temp_initial: f64,
    pub temp_final: f64,
    pub temp_decay: f64,
    /// Grid-oracle cross-check cap on the number of colours.
    pub oracle_cap: usize,
    pub oracle_resolution: u32,
}

impl Default for PaletteSolverConfig {
    fn default() -> Self {
        Self {
            starts: 200,
            seed: 0,
            tolerance: 1e-9,
            grad_tol: 1e-10,
            max_iters: 1000,
            support_cap: 12,
            minmax_restarts: 50,
            temp_initial: 1.0,
            temp_final: 1e-4,
            temp_decay: 0.5,
            oracle_cap: 5,
            oracle_resolution: 12,
        }
    }
}

/// Per-colour detail of an ev/ee report, evaluated at the maximiser.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", content = "entries")]
pub enum PerColourReport {
    Vvv,
    Degrees(Vec<(u32, f64)>),
    Codegrees(Vec<(u32, u32, f64)>),
}

#[derive(Clone, Debug, Serialize)]
pub struct PaletteLagrangianReport {
    pub star: StarMode,
    pub value: f64,
    pub maximiser: Weighting,
    /// Colours with positive weight at the maximiser.
    pub support: Vec<u32>,
    pub per_colour: PerColourReport,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
    /// False when the support cap forced the heuristic fallback.
    pub exact_supports: bool,
    pub oracle_value: Option<f64>,
}

/// The min components of the ev/ee objectives, compiled once per palette.
/// Each component owns the colour (or colour pair) whose Lagrangian it
/// feeds; a component is active on a support iff its owners lie inside.
enum MinComponent {
    Bilinear { owner: usize, terms: Vec<(usize, usize)> },
    Linear { owner_a: usize, owner_b: usize, terms: Vec<usize> },
}

impl MinComponent {
    fn active(&self, mask: &[bool]) -> bool {
        match self {
            MinComponent::Bilinear { owner, .. } => mask[*owner],
            MinComponent::Linear { owner_a, owner_b, .. } => mask[*owner_a] && mask[*owner_b],
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            MinComponent::Bilinear { terms, .. } => terms.iter().map(|(i, j)| x[*i] * x[*j]).sum(),
            MinComponent::Linear { terms, .. } => terms.iter().map(|i| x[*i]).sum(),
        }
    }

    fn accumulate_grad(&self, x: &[f64], w: f64, g: &mut [f64]) {
        match self {
            MinComponent::Bilinear { terms, .. } => {
                for (i, j) in terms {
                    g[*i] += w * x[*j];
                    g[*j] += w * x[*i];
                }
            }
            MinComponent::Linear { terms, .. } => {
                for i in terms {
                    g[*i] += w;
                }
            }
        }
    }
}

fn compile_components(star: StarMode, triples: &[[usize; 3]], dim: usize) -> Vec<MinComponent> {
    let mut out = Vec::new();
    match star {
        StarMode::Vvv => {}
        StarMode::Ev => {
            for a in 0..dim {
                let mut pos: [Vec<(usize, usize)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
                for t in triples {
                    if t[0] == a {
                        pos[0].push((t[1], t[2]));
                    }
                    if t[1] == a {
                        pos[1].push((t[0], t[2]));
                    }
                    if t[2] == a {
                        pos[2].push((t[0], t[1]));
                    }
                }
                for terms in pos {
                    out.push(MinComponent::Bilinear { owner: a, terms });
                }
            }
        }
        StarMode::Ee => {
            for a in 0..dim {
                for b in a..dim {
                    let mut pats: [Vec<usize>; 6] = Default::default();
                    for t in triples {
                        if t[0] == a && t[1] == b {
                            pats[0].push(t[2]);
                        }
                        if t[0] == b && t[1] == a {
                            pats[1].push(t[2]);
                        }
                        if t[0] == a && t[2] == b {
                            pats[2].push(t[1]);
                        }
                        if t[0] == b && t[2] == a {
                            pats[3].push(t[1]);
                        }
                        if t[1] == a && t[2] == b {
                            pats[4].push(t[0]);
                        }
                        if t[1] == b && t[2] == a {
                            pats[5].push(t[0]);
                        }
                    }
                    for terms in pats {
                        out.push(MinComponent::Linear { owner_a: a, owner_b: b, terms });
                    }
                }
            }
        }
    }
    out
}

/// True max-min objective on a fixed support: the minimum over the active
/// components. Continuous on the closed face, and a lower bound for the
/// filtered ev/ee value of any point of that face.
fn support_objective(components: &[MinComponent], mask: &[bool], x: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for c in components {
        if c.active(mask) {
            best = best.min(c.value(x));
        }
    }
    best
}

/// One shrinking-step exchange pass on the true support objective.
fn pattern_refine(components: &[MinComponent], mask: &[bool], x: &mut Vec<f64>) {
    let idx: Vec<usize> = (0..x.len()).filter(|i| mask[*i]).collect();
    if idx.len() < 2 {
        return;
    }
    let mut best = support_objective(components, mask, x);
    let mut delta = 0.25;
    while delta > 1e-8 {
        let mut improved = true;
        while improved {
            improved = false;
            for &i in &idx {
                for &j in &idx {
                    if i == j || x[i] < delta {
                        continue;
                    }
                    x[i] -= delta;
                    x[j] += delta;
                    let v = support_objective(components, mask, x);
                    if v > best + 1e-15 {
                        best = v;
                        improved = true;
                    } else {
                        x[i] += delta;
                        x[j] -= delta;
                    }
                }
            }
        }
        delta *= 0.25;
    }
}

fn solve_vvv(p: &Palette, config: &PaletteSolverConfig) -> (Vec<f64>, usize, f64) {
    let dim = p.colour_count();
    let triples = p.indexed_triples();
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0 / dim as f64; dim]];
    for t in &triples {
        let distinct: BTreeSet<usize> = t.iter().copied().collect();
        let mut s = vec![0.0; dim];
        for &i in &distinct {
            s[i] = 1.0 / distinct.len() as f64;
        }
        starts.push(s);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.starts {
        starts.push(Weighting::random(dim, &mut rng).as_slice().to_vec());
    }
    let mask = vec![true; dim];
    let opts = AscentOptions { grad_tol: config.grad_tol, max_iters: config.max_iters };
    let obj = |x: &[f64]| vvv_on_slice(&triples, x);
    let grad = |x: &[f64], g: &mut [f64]| vvv_grad_on_slice(&triples, x, g);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0;
    for s in &starts {
        let res = opt::ascend(obj, grad, s, &mask, &opts);
        iterations += res.iterations;
        let cand = (res.value, res.x);
        match &best {
            None => best = Some(cand),
            Some(b) => {
                if better_candidate(b, &cand) {
                    best = Some(cand);
                }
            }
        }
    }
    let (_, x) = best.unwrap();
    let mut g = vec![0.0; dim];
    vvv_grad_on_slice(&triples, &x, &mut g);
    let residual = kkt_residual(&x, &g);
    (x, iterations, residual)
}

fn kkt_residual(x: &[f64], g: &[f64]) -> f64 {
    let mu: f64 = x.iter().zip(g).map(|(xi, gi)| xi * gi).sum();
    let mut res: f64 = 0.0;
    for (xi, gi) in x.iter().zip(g) {
        if *xi > 1e-12 {
            res = res.max((gi - mu).abs());
        } else {
            res = res.max((gi - mu).max(0.0));
        }
    }
    res
}

fn solve_minmax(
    p: &Palette,
    star: StarMode,
    config: &PaletteSolverConfig,
) -> (Vec<f64>, usize, f64, bool) {
    let dim = p.colour_count();
    let triples = p.indexed_triples();
    let components = compile_components(star, &triples, dim);
    let exact = dim <= config.support_cap;
    let masks: Vec<u64> = if exact {
        (1..(1u64 << dim)).collect()
    } else {
        vec![(1u64 << dim.min(63)) - 1]
    };

    let opts = AscentOptions { grad_tol: config.grad_tol, max_iters: 200 };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0usize;

    for &mask_bits in &masks {
        let mask: Vec<bool> = (0..dim).map(|i| mask_bits >> i & 1 == 1).collect();
        let active: Vec<usize> = (0..components.len()).filter(|&c| components[c].active(&mask)).collect();
        if active.is_empty() {
            continue;
        }
        let support_size = mask.iter().filter(|b| **b).count();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ mask_bits.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for restart in 0..config.minmax_restarts {
            let mut x: Vec<f64> = if restart == 0 {
                mask.iter().map(|&m| if m { 1.0 / support_size as f64 } else { 0.0 }).collect()
            } else {
                let r = Weighting::random(support_size, &mut rng);
                let mut full = vec![0.0; dim];
                let mut it = r.as_slice().iter();
                for (i, &m) in mask.iter().enumerate() {
                    if m {
                        full[i] = *it.next().unwrap();
                    }
                }
                full
            };
            let mut tau = config.temp_initial;
            while tau >= config.temp_final {
                let obj = |y: &[f64]| {
                    let vals: Vec<f64> = active.iter().map(|&c| components[c].value(y)).collect();
                    opt::softmin(&vals, tau)
                };
                let grad = |y: &[f64], g: &mut [f64]| {
                    let vals: Vec<f64> = active.iter().map(|&c| components[c].value(y)).collect();
                    let mut w = vec![0.0; active.len()];
                    opt::softmin_weights(&vals, tau, &mut w);
                    for v in g.iter_mut() {
                        *v = 0.0;
                    }
                    for (slot, &c) in active.iter().enumerate() {
                        components[c].accumulate_grad(y, w[slot], g);
                    }
                };
                let res = opt::ascend(obj, grad, &x, &mask, &opts);
                iterations += res.iterations;
                x = res.x;
                tau *= config.temp_decay;
            }
            pattern_refine(&components, &mask, &mut x);
            let value = star_on_slice(star, &triples, &x);
            let cand = (value, x);
            match &best {
                None => best = Some(cand),
                Some(b) => {
                    if better_candidate(b, &cand) {
                        best = Some(cand);
                    }
                }
            }
        }
    }

    let (_, x) = best.unwrap();
    // Residual from the softmin subgradient at the final temperature.
    let active: Vec<usize> = {
        let mask: Vec<bool> = x.iter().map(|&v| v > POSITIVITY_EPS).collect();
        (0..components.len()).filter(|&c| components[c].active(&mask)).collect()
    };
    let residual = if active.is_empty() {
        0.0
    } else {
        let vals: Vec<f64> = active.iter().map(|&c| components[c].value(&x)).collect();
        let mut w = vec![0.0; active.len()];
        opt::softmin_weights(&vals, config.temp_final, &mut w);
        let mut g = vec![0.0; x.len()];
        for (slot, &c) in active.iter().enumerate() {
            components[c].accumulate_grad(&x, w[slot], &mut g);
        }
        kkt_residual(&x, &g)
    };
    (x, iterations, residual, exact)
}

/// Maximizes the chosen palette Lagrangian over the simplex on the colour
/// set. The vvv objective uses multistart gradient ascent; the
/// discontinuous ev/ee objectives are maximized face by face over every
/// non-empty support (smoothed max-min ascent plus a local exchange
/// refinement), which reduces the discontinuity to a finite enumeration.
pub fn palette_lagrangian(p: &Palette, star: StarMode, config: &PaletteSolverConfig) -> Result<PaletteLagrangianReport> {
    if p.is_empty() {
        return Ok(PaletteLagrangianReport {
            star,
            value: 0.0,
            maximiser: Weighting::empty(),
            support: Vec::new(),
            per_colour: PerColourReport::Vvv,
            method: Method::SupportEnum,
            iterations: 0,
            residual: 0.0,
            exact_supports: true,
            oracle_value: None,
        });
    }
    let triples = p.indexed_triples();
    let (x, iterations, residual, exact_supports, method) = match star {
        StarMode::Vvv => {
            let (x, it, res) = solve_vvv(p, config);
            (x, it, res, true, Method::MultistartGradient)
        }
        StarMode::Ev | StarMode::Ee => {
            let (x, it, res, exact) = solve_minmax(p, star, config);
            (x, it, res, exact, Method::SupportEnum)
        }
    };
    let value = star_on_slice(star, &triples, &x);
    let support_idx: Vec<usize> = (0..x.len()).filter(|&i| x[i] > POSITIVITY_EPS).collect();
    let support: Vec<u32> = support_idx.iter().map(|&i| p.colours()[i]).collect();
    let per_colour = match star {
        StarMode::Vvv => PerColourReport::Vvv,
        StarMode::Ev => PerColourReport::Degrees(
            support_idx
                .iter()
                .map(|&i| (p.colours()[i], degree_index(&triples, i, &x)))
                .collect(),
        ),
        StarMode::Ee => {
            let mut entries = Vec::new();
            for (pos, &i) in support_idx.iter().enumerate() {
                for &j in &support_idx[pos..] {
                    entries.push((p.colours()[i], p.colours()[j], codegree_index(&triples, i, j, &x)));
                }
            }
            PerColourReport::Codegrees(entries)
        }
    };

    let oracle_value = if p.colour_count() <= config.oracle_cap {
        Some(palette_grid_oracle(p, star, config.oracle_resolution)?)
    } else {
        None
    };
    if let Some(oracle) = oracle_value {
        if value < oracle - config.tolerance {
            return Err(Error::Certification { value, oracle, resolution: config.oracle_resolution });
        }
    }

    Ok(PaletteLagrangianReport {
        star,
        value,
        maximiser: Weighting::from_projected(x),
        support,
        per_colour,
        method,
        iterations,
        residual,
        exact_supports,
        oracle_value,
    })
}

/// Exhaustive maximum of the chosen palette Lagrangian over rational
/// simplex points with the given denominator. Independent of the
/// gradient/support-enumeration solver path.
pub fn palette_grid_oracle(p: &Palette, star: StarMode, resolution: u32) -> Result<f64> {
    palette_grid_oracle_with_budget(p, star, resolution, DEFAULT_GRID_BUDGET)
}

pub fn palette_grid_oracle_with_budget(p: &Palette, star: StarMode, resolution: u32, budget: u128) -> Result<f64> {
    if resolution == 0 {
        return Err(Error::InvalidInput("grid resolution must be at least 1".into()));
    }
    if p.is_empty() {
        return Ok(0.0);
    }
    let dim = p.colour_count();
    let points = composition_count(resolution, dim);
    if points > budget {
        return Err(Error::OracleBudget { points, budget });
    }
    let triples = p.indexed_triples();
    let m = resolution as f64;
    let mut best = f64::NEG_INFINITY;
    let mut x = vec![0.0f64; dim];
    for_each_composition(resolution, dim, &mut |c| {
        for (i, &ci) in c.iter().enumerate() {
            x[i] = ci as f64 / m;
        }
        let v = star_on_slice(star, &triples, &x);
        if v > best {
            best = v;
        }
    });
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::lagrange_poly;

    fn all_perms_123() -> Palette {
        Palette::new(vec![
            [1, 2, 3],
            [1, 3, 2],
            [2, 1, 3],
            [2, 3, 1],
            [3, 1, 2],
            [3, 2, 1],
        ])
        .unwrap()
    }

    #[test]
    fn parse_single_triple() {
        let p = Palette::parse("1 2 3\n").unwrap();
        assert_eq!(p.triples(), &[[1, 2, 3]]);
        assert_eq!(p.colours(), &[1, 2, 3]);
    }

    #[test]
    fn parse_empty_palette() {
        let p = Palette::parse("").unwrap();
        assert!(p.is_empty());
        assert_eq!(p.colour_count(), 0);
    }

    #[test]
    fn parse_p3_palette() {
        let p = Palette::parse("1 2 3\n1 3 2\n2 1 3\n").unwrap();
        assert_eq!(p, build_pt(&Hypergraph::parse("3 3\n1 2 3\n").unwrap(), 3).unwrap());
    }

    #[test]
    fn parse_rejects_duplicates_and_bad_tokens() {
        assert!(matches!(
            Palette::parse("1 2 3\n1 2 3\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            Palette::parse("1 two 3\n").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn triples_are_ordered_objects() {
        let p = Palette::new(vec![[1, 2, 3], [2, 1, 3]]).unwrap();
        assert_eq!(p.triples().len(), 2);
        assert!(p.contains(&[2, 1, 3]));
        assert!(!p.contains(&[3, 2, 1]));
    }

    #[test]
    fn repeated_colours_within_triple_allowed() {
        let p = Palette::new(vec![[1, 1, 2]]).unwrap();
        assert_eq!(p.colours(), &[1, 2]);
    }

    #[test]
    fn build_pt_single_edge() {
        let f = Hypergraph::parse("3 3\n1 2 3\n").unwrap();
        assert_eq!(build_pt(&f, 1).unwrap().triples(), &[[1, 2, 3]]);
        assert_eq!(
            build_pt(&f, 3).unwrap().triples(),
            &[[1, 2, 3], [1, 3, 2], [2, 1, 3]]
        );
        assert_eq!(build_pt(&f, 6).unwrap(), all_perms_123());
    }

    #[test]
    fn build_pt_rejects_bad_inputs() {
        let f = Hypergraph::parse("3 3\n1 2 3\n").unwrap();
        assert!(build_pt(&f, 0).is_err());
        assert!(build_pt(&f, 7).is_err());
        let g2 = Hypergraph::complete(2, 4).unwrap();
        assert!(build_pt(&g2, 1).is_err());
    }

    #[test]
    fn lambda_vvv_examples() {
        let single = Palette::new(vec![[1, 1, 1]]).unwrap();
        let x1 = Weighting::new(vec![1.0]).unwrap();
        assert_eq!(lambda_vvv(&single, &x1).unwrap(), 1.0);

        let p = all_perms_123();
        let u = Weighting::uniform(3);
        assert!((lambda_vvv(&p, &u).unwrap() - 2.0 / 9.0).abs() < 1e-15);

        let empty = Palette::empty();
        assert_eq!(lambda_vvv(&empty, &Weighting::empty()).unwrap(), 0.0);
    }

    #[test]
    fn lambda_vvv_dimension_check() {
        let p = all_perms_123();
        assert!(matches!(
            lambda_vvv(&p, &Weighting::uniform(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn degree_lagrangian_examples() {
        let single = Palette::new(vec![[1, 2, 3]]).unwrap();
        let u = Weighting::uniform(3);
        // Colour 1 never sits in positions 2 or 3, so the min is 0.
        assert_eq!(degree_lagrangian(&single, 1, &u).unwrap(), 0.0);

        let p = all_perms_123();
        assert!((degree_lagrangian(&p, 1, &u).unwrap() - 2.0 / 9.0).abs() < 1e-15);

        assert!(matches!(
            degree_lagrangian(&p, 9, &u),
            Err(Error::UnknownColour(9))
        ));
    }

    #[test]
    fn codegree_lagrangian_examples() {
        let p = all_perms_123();
        let u = Weighting::uniform(3);
        assert!((codegree_lagrangian(&p, 1, 2, &u).unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let single = Palette::new(vec![[1, 2, 3]]).unwrap();
        assert_eq!(codegree_lagrangian(&single, 1, 2, &u).unwrap(), 0.0);

        let loops = Palette::new(vec![[1, 1, 1]]).unwrap();
        let x1 = Weighting::new(vec![1.0]).unwrap();
        assert_eq!(codegree_lagrangian(&loops, 1, 1, &x1).unwrap(), 1.0);
    }

    #[test]
    fn lambda_ev_ee_examples() {
        let p = all_perms_123();
        let u = Weighting::uniform(3);
        assert!((lambda_ev(&p, &u).unwrap() - 2.0 / 9.0).abs() < 1e-15);
        // The ee minimum ranges over colour pairs with a = b allowed; the
        // diagonal pair (1,1) has all six pattern sums empty here.
        assert_eq!(lambda_ee(&p, &u).unwrap(), 0.0);
        // Off-diagonal pairs alone would give 1/3.
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            assert!((codegree_lagrangian(&p, a, b, &u).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        }

        let single = Palette::new(vec![[1, 2, 3]]).unwrap();
        assert_eq!(lambda_ev(&single, &u).unwrap(), 0.0);
        assert_eq!(lambda_ee(&single, &u).unwrap(), 0.0);

        // Weight on a single colour c without (c,c,c) in the palette.
        let x = Weighting::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(lambda_ev(&single, &x).unwrap(), 0.0);

        assert!(lambda_ev(&Palette::empty(), &Weighting::empty()).is_err());
    }

    #[test]
    fn pt_identity_on_f32() {
        use rand::SeedableRng;
        let f = Hypergraph::parse("3 5\n1 2 3\n1 4 5\n2 4 5\n3 4 5\n").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for t in 1..=6 {
            let p = build_pt(&f, t).unwrap();
            assert_eq!(p.colour_count(), 5);
            for _ in 0..20 {
                let x = Weighting::random(5, &mut rng);
                let lhs = lambda_vvv(&p, &x).unwrap();
                let rhs = t as f64 / 6.0 * lagrange_poly(&f, &x).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "t={t}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn palette_lagrangian_p6_vvv() {
        let f = Hypergraph::parse("3 3\n1 2 3\n").unwrap();
        let p = build_pt(&f, 6).unwrap();
        let rep = palette_lagrangian(&p, StarMode::Vvv, &PaletteSolverConfig::default()).unwrap();
        assert!((rep.value - 2.0 / 9.0).abs() < 1e-9, "value {}", rep.value);
        assert!(rep.oracle_value.is_some());
    }

    #[test]
    fn palette_lagrangian_single_loop_all_stars() {
        let p = Palette::new(vec![[1, 1, 1]]).unwrap();
        for star in [StarMode::Vvv, StarMode::Ev, StarMode::Ee] {
            let rep = palette_lagrangian(&p, star, &PaletteSolverConfig::default()).unwrap();
            assert!((rep.value - 1.0).abs() < 1e-9, "{star}: {}", rep.value);
        }
    }

    #[test]
    fn palette_lagrangian_p1_k4_vvv() {
        let f = Hypergraph::complete(3, 4).unwrap();
        let p = build_pt(&f, 1).unwrap();
        let cfg = PaletteSolverConfig { starts: 100, ..PaletteSolverConfig::default() };
        let rep = palette_lagrangian(&p, StarMode::Vvv, &cfg).unwrap();
        assert!((rep.value - 1.0 / 16.0).abs() < 1e-9, "value {}", rep.value);
    }

    #[test]
    fn palette_lagrangian_empty() {
        for star in [StarMode::Vvv, StarMode::Ev, StarMode::Ee] {
            let rep = palette_lagrangian(&Palette::empty(), star, &PaletteSolverConfig::default()).unwrap();
            assert_eq!(rep.value, 0.0);
            assert!(rep.support.is_empty());
        }
    }

    #[test]
    fn minmax_matches_grid_oracle_small() {
        // All permutations of (1,2,3): by symmetry the ev optimum is at
        // the uniform point with value 2/9. Every support exposes a
        // diagonal colour pair with empty pattern sums, so the ee optimum
        // is 0; the grid oracle agrees.
        let p = all_perms_123();
        let cfg = PaletteSolverConfig { minmax_restarts: 10, ..PaletteSolverConfig::default() };
        let ev = palette_lagrangian(&p, StarMode::Ev, &cfg).unwrap();
        assert!((ev.value - 2.0 / 9.0).abs() < 1e-7, "ev {}", ev.value);
        let ee = palette_lagrangian(&p, StarMode::Ee, &cfg).unwrap();
        assert_eq!(ee.value, 0.0, "ee {}", ee.value);
        assert_eq!(palette_grid_oracle(&p, StarMode::Ee, 9).unwrap(), 0.0);

        // A palette closed under every pattern keeps all codegree sums at
        // the full simplex weight, so both max-min optima are 1.
        let mut full = Vec::new();
        for a in 1..=2u32 {
            for b in 1..=2 {
                for c in 1..=2 {
                    full.push([a, b, c]);
                }
            }
        }
        let full = Palette::new(full).unwrap();
        let ev = palette_lagrangian(&full, StarMode::Ev, &cfg).unwrap();
        assert!((ev.value - 1.0).abs() < 1e-9, "ev {}", ev.value);
        let ee = palette_lagrangian(&full, StarMode::Ee, &cfg).unwrap();
        assert!((ee.value - 1.0).abs() < 1e-9, "ee {}", ee.value);
    }

    #[test]
    fn report_value_consistency() {
        let p = all_perms_123();
        let cfg = PaletteSolverConfig { minmax_restarts: 8, ..PaletteSolverConfig::default() };
        for star in [StarMode::Vvv, StarMode::Ev, StarMode::Ee] {
            let rep = palette_lagrangian(&p, star, &cfg).unwrap();
            let again = star_on_slice(star, &p.indexed_triples(), rep.maximiser.as_slice());
            assert!((rep.value - again).abs() < 1e-12);
            match &rep.per_colour {
                PerColourReport::Vvv => assert_eq!(star, StarMode::Vvv),
                PerColourReport::Degrees(d) => {
                    let min = d.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
                    assert_eq!(min, rep.value);
                }
                PerColourReport::Codegrees(d) => {
                    let min = d.iter().map(|(_, _, v)| *v).fold(f64::INFINITY, f64::min);
                    assert_eq!(min, rep.value);
                }
            }
        }
    }
}
