//! Deciding whether a 3-graph satisfies a palette: certificates, the
//! complete ordering + pair-colouring search, and the minimum-deletion
//! distance at desk scale.
//!
//! The search is ordering-major: vertices are placed into the ordering one
//! at a time, and whenever an edge has all three vertices placed its
//! constraint joins a CSP over pair colours which is checked by forward
//! propagation. Orderings that only differ by swapping two vertices whose
//! transposition is an automorphism of the graph are explored once.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::palette::Palette;

/// Normalized unordered pair key.
pub fn pair_key(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Witness that a 3-graph satisfies a palette: a vertex ordering and a
/// total pair colouring. Checkable in time linear in the edge count.
///
/// Text format: line 1 is the ordering `v_1 .. v_n`; each following line is
/// `i j c` giving pair `{i,j}` colour `c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatisfactionCertificate {
    pub ordering: Vec<usize>,
    colouring: Vec<((usize, usize), u32)>,
}

impl SatisfactionCertificate {
    pub fn new(ordering: Vec<usize>, colouring: BTreeMap<(usize, usize), u32>) -> Self {
        let colouring = colouring
            .into_iter()
            .map(|((u, v), c)| (pair_key(u, v), c))
            .collect();
        Self { ordering, colouring }
    }

    pub fn colour(&self, u: usize, v: usize) -> Option<u32> {
        let key = pair_key(u, v);
        self.colouring
            .binary_search_by(|(k, _)| k.cmp(&key))
            .ok()
            .map(|i| self.colouring[i].1)
    }

    pub fn colouring(&self) -> &[((usize, usize), u32)] {
        &self.colouring
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let (first_no, first) = lines
            .next()
            .ok_or(Error::Parse { line: 1, msg: "missing ordering line".into() })?;
        let ordering: Vec<usize> = first
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line: first_no + 1,
                    msg: format!("invalid vertex token '{t}'"),
                })
            })
            .collect::<Result<_>>()?;
        let mut colouring = BTreeMap::new();
        for (idx, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected 'i j c', found {} tokens", toks.len()),
                });
            }
            let parse = |t: &str| -> Result<usize> {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("invalid integer token '{t}'"),
                })
            };
            let (u, v, c) = (parse(toks[0])?, parse(toks[1])?, parse(toks[2])?);
            colouring.insert(pair_key(u, v), c as u32);
        }
        Ok(Self::new(ordering, colouring))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(
            &self
                .ordering
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        out.push('\n');
        for ((u, v), c) in &self.colouring {
            out.push_str(&format!("{u} {v} {c}\n"));
        }
        out
    }
}

/// Checks a certificate. Structural defects (wrong ordering length, a
/// missing pair, a colour outside the palette) are errors, distinct from a
/// verdict of `false`.
pub fn verify_certificate(f: &Hypergraph, p: &Palette, cert: &SatisfactionCertificate) -> Result<bool> {
    let n = f.n();
    if cert.ordering.len() != n {
        return Err(Error::InvalidInput(format!(
            "ordering has {} entries, expected {}",
            cert.ordering.len(),
            n
        )));
    }
    let mut seen = vec![false; n + 1];
    for &v in &cert.ordering {
        if v < 1 || v > n || seen[v] {
            return Err(Error::InvalidInput(format!("ordering is not a permutation of 1..={n}")));
        }
        seen[v] = true;
    }
    if p.colour_count() == 0 {
        if !cert.colouring.is_empty() {
            return Err(Error::InvalidInput(
                "colouring must be empty when the palette has no colours".into(),
            ));
        }
        return Ok(f.edge_count() == 0);
    }
    for u in 1..=n {
        for v in (u + 1)..=n {
            match cert.colour(u, v) {
                None => {
                    return Err(Error::InvalidInput(format!("missing colour for pair {{{u},{v}}}")))
                }
                Some(c) => {
                    if p.colour_index(c).is_none() {
                        return Err(Error::InvalidInput(format!(
                            "pair {{{u},{v}}} uses colour {c} outside the palette"
                        )));
                    }
                }
            }
        }
    }
    let mut pos = vec![0usize; n + 1];
    for (i, &v) in cert.ordering.iter().enumerate() {
        pos[v] = i;
    }
    for e in f.edges() {
        let mut vs = [e[0], e[1], e[2]];
        vs.sort_by_key(|&v| pos[v]);
        let shadow = [
            cert.colour(vs[0], vs[1]).unwrap(),
            cert.colour(vs[1], vs[2]).unwrap(),
            cert.colour(vs[0], vs[2]).unwrap(),
        ];
        if !p.contains(&shadow) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchBudget {
    /// Complete search is attempted only up to this many vertices.
    pub max_n: usize,
    /// Node budget across the ordering DFS and the embedded CSPs.
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_n: 10, max_nodes: 50_000_000 }
    }
}

/// Outcome of the satisfaction search. `Indeterminate` (budget exhausted)
/// is a first-class result, never conflated with `Unsatisfied`.
#[derive(Clone, Debug, Serialize)]
pub enum Satisfaction {
    Satisfied(SatisfactionCertificate),
    Unsatisfied,
    Indeterminate,
}

impl Satisfaction {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Satisfaction::Satisfied(_))
    }
}

struct Exhausted;

/// A completed edge's constraint: the pair ids of (v_i v_j, v_j v_k, v_i v_k)
/// in ordering positions i < j < k.
type Constraint = [usize; 3];

struct SearchContext<'a> {
    n: usize,
    edges: Vec<[usize; 3]>,
    edges_with: Vec<Vec<usize>>,
    pid: Vec<Vec<usize>>,
    palette_triples: Vec<[usize; 3]>,
    colour_count: usize,
    auto_swap: Vec<Vec<bool>>,
    nodes: u64,
    max_nodes: u64,
    _palette: &'a Palette,
}

impl<'a> SearchContext<'a> {
    fn new(f: &Hypergraph, p: &'a Palette, max_nodes: u64) -> Self {
        let n = f.n();
        let edges: Vec<[usize; 3]> = f.edges().iter().map(|e| [e[0], e[1], e[2]]).collect();
        let mut edges_with = vec![Vec::new(); n + 1];
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                edges_with[v].push(i);
            }
        }
        let mut pid = vec![vec![usize::MAX; n + 1]; n + 1];
        let mut next = 0;
        for u in 1..=n {
            for v in (u + 1)..=n {
                pid[u][v] = next;
                pid[v][u] = next;
                next += 1;
            }
        }
        // Transpositions (u v) that are automorphisms: swapping equivalent
        // unplaced vertices yields isomorphic subtrees.
        let mut auto_swap = vec![vec![false; n + 1]; n + 1];
        for u in 1..=n {
            for v in (u + 1)..=n {
                let mut mapped: Vec<[usize; 3]> = edges
                    .iter()
                    .map(|e| {
                        let mut m = e.map(|w| if w == u { v } else if w == v { u } else { w });
                        m.sort_unstable();
                        m
                    })
                    .collect();
                mapped.sort_unstable();
                let mut orig = edges.clone();
                orig.sort_unstable();
                if mapped == orig {
                    auto_swap[u][v] = true;
                    auto_swap[v][u] = true;
                }
            }
        }
        Self {
            n,
            edges,
            edges_with,
            pid,
            palette_triples: p.indexed_triples(),
            colour_count: p.colour_count(),
            auto_swap,
            nodes: 0,
            max_nodes,
            _palette: p,
        }
    }

    fn tick(&mut self) -> std::result::Result<(), Exhausted> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            Err(Exhausted)
        } else {
            Ok(())
        }
    }

    fn full_domain(&self) -> u64 {
        if self.colour_count == 64 {
            u64::MAX
        } else {
            (1u64 << self.colour_count) - 1
        }
    }

    /// Generalized arc consistency over the ternary constraints; returns
    /// false when a domain empties. Var indices are pair ids.
    fn propagate(&mut self, constraints: &[Constraint], domains: &mut [u64]) -> std::result::Result<bool, Exhausted> {
        loop {
            self.tick()?;
            let mut changed = false;
            for cons in constraints {
                let mut slot_masks = [0u64; 3];
                for t in &self.palette_triples {
                    if domains[cons[0]] >> t[0] & 1 == 1
                        && domains[cons[1]] >> t[1] & 1 == 1
                        && domains[cons[2]] >> t[2] & 1 == 1
                    {
                        slot_masks[0] |= 1 << t[0];
                        slot_masks[1] |= 1 << t[1];
                        slot_masks[2] |= 1 << t[2];
                    }
                }
                for s in 0..3 {
                    let nd = domains[cons[s]] & slot_masks[s];
                    if nd == 0 {
                        return Ok(false);
                    }
                    if nd != domains[cons[s]] {
                        domains[cons[s]] = nd;
                        changed = true;
                    }
                }
            }
            if !changed {
                return Ok(true);
            }
        }
    }

    /// Solves the CSP over the pairs covered by `constraints`. Variable
    /// order is fail-first: pairs covered by the most edges first.
    fn solve_csp(&mut self, constraints: &[Constraint]) -> std::result::Result<Option<Vec<(usize, u32)>>, Exhausted> {
        let pair_total = self.n * (self.n - 1) / 2;
        let mut coverage = vec![0usize; pair_total];
        for c in constraints {
            for &pid in c {
                coverage[pid] += 1;
            }
        }
        let mut vars: Vec<usize> = (0..pair_total).filter(|&p| coverage[p] > 0).collect();
        vars.sort_by_key(|&p| std::cmp::Reverse(coverage[p]));
        let mut domains = vec![self.full_domain(); pair_total];
        if !self.propagate(constraints, &mut domains)? {
            return Ok(None);
        }
        self.search_csp(constraints, &vars, domains).map(|opt| {
            opt.map(|doms| {
                vars.iter()
                    .map(|&p| (p, doms[p].trailing_zeros()))
                    .collect()
            })
        })
    }

    fn search_csp(
        &mut self,
        constraints: &[Constraint],
        vars: &[usize],
        domains: Vec<u64>,
    ) -> std::result::Result<Option<Vec<u64>>, Exhausted> {
        let branch_var = vars.iter().find(|&&p| domains[p].count_ones() > 1);
        let Some(&var) = branch_var else {
            return Ok(Some(domains));
        };
        let mut mask = domains[var];
        while mask != 0 {
            self.tick()?;
            let colour = mask.trailing_zeros();
            mask &= mask - 1;
            let mut next = domains.clone();
            next[var] = 1u64 << colour;
            if self.propagate(constraints, &mut next)? {
                if let Some(sol) = self.search_csp(constraints, vars, next)? {
                    return Ok(Some(sol));
                }
            }
        }
        Ok(None)
    }

    /// Adds the constraints of edges completed by placing `v` at the end of
    /// the prefix. Returns how many were added.
    fn complete_edges(
        &mut self,
        v: usize,
        pos: &[usize],
        placed_of_edge: &mut [u8],
        constraints: &mut Vec<Constraint>,
    ) -> usize {
        let mut added = 0;
        for ei in self.edges_with[v].clone() {
            placed_of_edge[ei] += 1;
            if placed_of_edge[ei] == 3 {
                let e = self.edges[ei];
                let mut vs = e;
                vs.sort_by_key(|&w| pos[w]);
                constraints.push([
                    self.pid[vs[0]][vs[1]],
                    self.pid[vs[1]][vs[2]],
                    self.pid[vs[0]][vs[2]],
                ]);
                added += 1;
            }
        }
        added
    }

    fn uncomplete_edges(&mut self, v: usize, placed_of_edge: &mut [u8], constraints: &mut Vec<Constraint>, added: usize) {
        for _ in 0..added {
            constraints.pop();
        }
        for ei in self.edges_with[v].clone() {
            placed_of_edge[ei] -= 1;
        }
    }

    fn dfs(
        &mut self,
        placed: &mut Vec<usize>,
        pos: &mut Vec<usize>,
        placed_of_edge: &mut Vec<u8>,
        constraints: &mut Vec<Constraint>,
    ) -> std::result::Result<Option<(Vec<usize>, Vec<(usize, u32)>)>, Exhausted> {
        self.tick()?;
        if placed.len() == self.n {
            return Ok(self
                .solve_csp(constraints)?
                .map(|asg| (placed.clone(), asg)));
        }
        let mut tried: Vec<usize> = Vec::new();
        for v in 1..=self.n {
            if pos[v] != usize::MAX {
                continue;
            }
            if tried.iter().any(|&u| self.auto_swap[u][v]) {
                continue;
            }
            tried.push(v);
            pos[v] = placed.len();
            placed.push(v);
            let added = self.complete_edges(v, pos, placed_of_edge, constraints);
            let feasible = if added > 0 {
                self.solve_csp(constraints)?.is_some()
            } else {
                true
            };
            if feasible {
                if let Some(found) = self.dfs(placed, pos, placed_of_edge, constraints)? {
                    return Ok(Some(found));
                }
            }
            self.uncomplete_edges(v, placed_of_edge, constraints, added);
            placed.pop();
            pos[v] = usize::MAX;
        }
        Ok(None)
    }
}

fn trivial_certificate(f: &Hypergraph, p: &Palette) -> SatisfactionCertificate {
    let n = f.n();
    let ordering: Vec<usize> = (1..=n).collect();
    let mut colouring = BTreeMap::new();
    if let Some(&c) = p.colours().first() {
        for u in 1..=n {
            for v in (u + 1)..=n {
                colouring.insert((u, v), c);
            }
        }
    }
    SatisfactionCertificate::new(ordering, colouring)
}

/// Complete decision of "F satisfies P" within the given budget.
///
/// An edgeless graph satisfies every palette vacuously (with the empty
/// colouring when the palette has no colours). Budget exhaustion yields
/// `Indeterminate`.
pub fn satisfies(f: &Hypergraph, p: &Palette, budget: &SearchBudget) -> Result<Satisfaction> {
    if f.k() != 3 {
        return Err(Error::InvalidInput(format!("satisfaction search needs a 3-graph, got k={}", f.k())));
    }
    if f.edge_count() == 0 {
        return Ok(Satisfaction::Satisfied(trivial_certificate(f, p)));
    }
    if p.is_empty() {
        return Ok(Satisfaction::Unsatisfied);
    }
    if f.n() > budget.max_n {
        return Ok(Satisfaction::Indeterminate);
    }
    if p.colour_count() > 64 {
        return Err(Error::InvalidInput(format!(
            "palettes with more than 64 colours are not supported by the search (got {})",
            p.colour_count()
        )));
    }
    let mut ctx = SearchContext::new(f, p, budget.max_nodes);
    let n = f.n();
    let mut placed = Vec::with_capacity(n);
    let mut pos = vec![usize::MAX; n + 1];
    let mut placed_of_edge = vec![0u8; f.edge_count()];
    let mut constraints = Vec::new();
    match ctx.dfs(&mut placed, &mut pos, &mut placed_of_edge, &mut constraints) {
        Err(Exhausted) => Ok(Satisfaction::Indeterminate),
        Ok(None) => Ok(Satisfaction::Unsatisfied),
        Ok(Some((ordering, assignment))) => {
            let mut colouring = BTreeMap::new();
            let fallback = p.colours()[0];
            for u in 1..=n {
                for v in (u + 1)..=n {
                    colouring.insert((u, v), fallback);
                }
            }
            let mut pid_to_pair = vec![(0usize, 0usize); n * (n - 1) / 2];
            for u in 1..=n {
                for v in (u + 1)..=n {
                    pid_to_pair[ctx.pid[u][v]] = (u, v);
                }
            }
            for (pid, colour_idx) in assignment {
                let (u, v) = pid_to_pair[pid];
                colouring.insert((u, v), p.colours()[colour_idx as usize]);
            }
            let cert = SatisfactionCertificate::new(ordering, colouring);
            debug_assert_eq!(verify_certificate(f, p, &cert).ok(), Some(true));
            Ok(Satisfaction::Satisfied(cert))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceBudget {
    pub max_n: usize,
    pub max_nodes: u64,
}

impl Default for DistanceBudget {
    fn default() -> Self {
        Self { max_n: 8, max_nodes: 50_000_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub distance: usize,
    /// False when the budget ran out and `distance` is only an upper bound.
    pub optimal: bool,
}

impl<'a> SearchContext<'a> {
    /// Minimum number of violated constraints over all colourings, pruned
    /// at `bound`; returns `bound + 1` when every branch exceeds it.
    fn min_violations(&mut self, constraints: &[Constraint], bound: usize) -> std::result::Result<usize, Exhausted> {
        let pair_total = self.n * (self.n - 1) / 2;
        let mut coverage = vec![0usize; pair_total];
        for c in constraints {
            for &pid in c {
                coverage[pid] += 1;
            }
        }
        let mut vars: Vec<usize> = (0..pair_total).filter(|&p| coverage[p] > 0).collect();
        vars.sort_by_key(|&p| std::cmp::Reverse(coverage[p]));
        let domains = vec![self.full_domain(); pair_total];
        self.min_violations_rec(constraints, &vars, domains, bound)
    }

    fn dead_count(&self, constraints: &[Constraint], domains: &[u64]) -> usize {
        let mut dead = 0;
        'cons: for cons in constraints {
            for t in &self.palette_triples {
                if domains[cons[0]] >> t[0] & 1 == 1
                    && domains[cons[1]] >> t[1] & 1 == 1
                    && domains[cons[2]] >> t[2] & 1 == 1
                {
                    continue 'cons;
                }
            }
            dead += 1;
        }
        dead
    }

    fn min_violations_rec(
        &mut self,
        constraints: &[Constraint],
        vars: &[usize],
        domains: Vec<u64>,
        bound: usize,
    ) -> std::result::Result<usize, Exhausted> {
        self.tick()?;
        let dead = self.dead_count(constraints, &domains);
        if dead > bound {
            return Ok(bound + 1);
        }
        let branch_var = vars.iter().find(|&&p| domains[p].count_ones() > 1);
        let Some(&var) = branch_var else {
            return Ok(dead);
        };
        let mut best = bound + 1;
        let mut mask = domains[var];
        while mask != 0 {
            let colour = mask.trailing_zeros();
            mask &= mask - 1;
            let mut next = domains.clone();
            next[var] = 1u64 << colour;
            let sub = self.min_violations_rec(constraints, vars, next, best.saturating_sub(1).min(bound))?;
            best = best.min(sub);
            if best == dead {
                break;
            }
        }
        Ok(best)
    }

    /// Is there an ordering and colouring violating at most `allowed` edges?
    fn dfs_deletions(
        &mut self,
        allowed: usize,
        placed: &mut Vec<usize>,
        pos: &mut Vec<usize>,
        placed_of_edge: &mut Vec<u8>,
        constraints: &mut Vec<Constraint>,
        best_leaf: &mut usize,
    ) -> std::result::Result<bool, Exhausted> {
        self.tick()?;
        if placed.len() == self.n {
            let q = self.min_violations(constraints, allowed.max(*best_leaf))?;
            *best_leaf = (*best_leaf).min(q);
            return Ok(q <= allowed);
        }
        let mut tried: Vec<usize> = Vec::new();
        for v in 1..=self.n {
            if pos[v] != usize::MAX {
                continue;
            }
            if tried.iter().any(|&u| self.auto_swap[u][v]) {
                continue;
            }
            tried.push(v);
            pos[v] = placed.len();
            placed.push(v);
            let added = self.complete_edges(v, pos, placed_of_edge, constraints);
            let feasible = if added > 0 {
                self.min_violations(constraints, allowed)? <= allowed
            } else {
                true
            };
            if feasible
                && self.dfs_deletions(allowed, placed, pos, placed_of_edge, constraints, best_leaf)?
            {
                self.uncomplete_edges(v, placed_of_edge, constraints, added);
                placed.pop();
                pos[v] = usize::MAX;
                return Ok(true);
            }
            self.uncomplete_edges(v, placed_of_edge, constraints, added);
            placed.pop();
            pos[v] = usize::MAX;
        }
        Ok(false)
    }
}

/// Minimum number of edge deletions after which the graph satisfies the
/// palette, by iterative deepening on the deletion budget with the
/// deletions integrated into the colouring CSP as soft constraints.
pub fn almost_satisfies_distance(f: &Hypergraph, p: &Palette, budget: &DistanceBudget) -> Result<DistanceReport> {
    if f.k() != 3 {
        return Err(Error::InvalidInput(format!("distance search needs a 3-graph, got k={}", f.k())));
    }
    let m = f.edge_count();
    if m == 0 {
        return Ok(DistanceReport { distance: 0, optimal: true });
    }
    if p.is_empty() {
        // Every edge must go; the edgeless remainder satisfies vacuously.
        return Ok(DistanceReport { distance: m, optimal: true });
    }
    if f.n() > budget.max_n {
        return Ok(DistanceReport { distance: m, optimal: false });
    }
    if p.colour_count() > 64 {
        return Err(Error::InvalidInput(format!(
            "palettes with more than 64 colours are not supported by the search (got {})",
            p.colour_count()
        )));
    }
    let mut ctx = SearchContext::new(f, p, budget.max_nodes);
    let mut best_leaf = m;
    for d in 0..=m {
        let n = f.n();
        let mut placed = Vec::with_capacity(n);
        let mut pos = vec![usize::MAX; n + 1];
        let mut placed_of_edge = vec![0u8; m];
        let mut constraints = Vec::new();
        match ctx.dfs_deletions(d, &mut placed, &mut pos, &mut placed_of_edge, &mut constraints, &mut best_leaf) {
            Ok(true) => return Ok(DistanceReport { distance: d, optimal: true }),
            Ok(false) => continue,
            Err(Exhausted) => return Ok(DistanceReport { distance: best_leaf, optimal: false }),
        }
    }
    Ok(DistanceReport { distance: m, optimal: true })
}
