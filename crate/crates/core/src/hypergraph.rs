//! k-uniform hypergraphs with labelled vertices `1..=n` and their text format.
//!
//! The text format is line based: the first data line is `k n`, every
//! following non-empty line is one edge given as `k` vertex indices.
//! Lines starting with `#` are comments. Serialization is canonical
//! (edges sorted, vertices within an edge sorted), so equal hypergraphs
//! serialize to identical bytes.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a canonical hypergraph. Each edge must consist of `k`
    /// distinct vertices in `1..=n`; duplicate edges are rejected rather
    /// than silently merged.
    pub fn new(k: usize, n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidHypergraph("uniformity k must be positive".into()));
        }
        let mut canonical: Vec<Vec<usize>> = Vec::with_capacity(edges.len());
        for mut e in edges {
            if e.len() != k {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {:?} has {} vertices, expected {}",
                    e,
                    e.len(),
                    k
                )));
            }
            for &v in &e {
                if v < 1 || v > n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidHypergraph(format!("repeated vertex in edge {e:?}")));
            }
            canonical.push(e);
        }
        canonical.sort();
        if canonical.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidHypergraph("duplicate edge".into()));
        }
        Ok(Self { k, n, edges: canonical })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges in canonical order; every edge is sorted ascending.
    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, edge: &[usize]) -> bool {
        let mut probe = edge.to_vec();
        probe.sort_unstable();
        self.edges.binary_search(&probe).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.contains(&v)).count()
    }

    /// The same hypergraph with the edges at the given indices removed.
    pub fn without_edges(&self, remove: &BTreeSet<usize>) -> Self {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !remove.contains(i))
            .map(|(_, e)| e.clone())
            .collect();
        Self { k: self.k, n: self.n, edges }
    }

    /// Parses the `k n` + edge-per-line text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None; // (k, n, line)
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let numbers: Vec<usize> = tokens
                .iter()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid integer token '{t}'"),
                    })
                })
                .collect::<Result<_>>()?;
            match header {
                None => {
                    if numbers.len() != 2 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("expected header 'k n', found {} tokens", numbers.len()),
                        });
                    }
                    header = Some((numbers[0], numbers[1], line_no));
                }
                Some((k, n, _)) => {
                    if numbers.len() != k {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("expected {} vertices per edge, found {}", k, numbers.len()),
                        });
                    }
                    let mut e = numbers;
                    for &v in &e {
                        if v < 1 || v > n {
                            return Err(Error::Parse {
                                line: line_no,
                                msg: format!("vertex {v} out of range 1..={n}"),
                            });
                        }
                    }
                    e.sort_unstable();
                    if e.windows(2).any(|w| w[0] == w[1]) {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "repeated vertex in edge".into(),
                        });
                    }
                    if !seen.insert(e.clone()) {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("duplicate edge {}", e.iter().join(" ")),
                        });
                    }
                    edges.push(e);
                }
            }
        }
        let (k, n, line) = header.ok_or(Error::Parse { line: 1, msg: "missing 'k n' header".into() })?;
        if k == 0 {
            return Err(Error::Parse { line, msg: "uniformity k must be positive".into() });
        }
        Self::new(k, n, edges)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// The 3-uniform tight cycle on `l >= 3` vertices: edges are the
    /// windows `{i, i+1, i+2}` with indices mod `l`. For `l = 3` the
    /// windows coincide in a single edge; for `l = 4` they yield all four
    /// triples of `[4]`.
    pub fn tight_cycle(l: usize) -> Result<Self> {
        if l < 3 {
            return Err(Error::InvalidInput(format!("tight cycle needs l >= 3, got {l}")));
        }
        let mut edges: BTreeSet<Vec<usize>> = BTreeSet::new();
        for i in 0..l {
            let mut e = vec![i % l + 1, (i + 1) % l + 1, (i + 2) % l + 1];
            e.sort_unstable();
            edges.insert(e);
        }
        Self::new(3, l, edges.into_iter().collect())
    }

    /// The complete k-graph on n vertices.
    pub fn complete(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidInput(format!("complete graph needs 1 <= k <= n, got k={k}, n={n}")));
        }
        let edges = (1..=n).combinations(k).collect();
        Self::new(k, n, edges)
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.k, self.n)?;
        for e in &self.edges {
            writeln!(f, "{}", e.iter().join(" "))?;
        }
        Ok(())
    }
}
