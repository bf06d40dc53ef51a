//! The Lagrange polynomial of a k-graph and its maximum over the simplex,
//! computed by multistart projected gradient ascent and cross-checked by an
//! exhaustive rational grid oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::opt::{self, AscentOptions};
use crate::weighting::Weighting;

pub const DEFAULT_GRID_BUDGET: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    MultistartGradient,
    Grid,
    SupportEnum,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverConfig {
    /// Number of random restarts on top of the deterministic starts
    /// (uniform point and the uniform point on each edge's support).
    pub starts: usize,
    pub seed: u64,
    /// Certification slack against the grid oracle.
    pub tolerance: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Solutions on graphs with at most this many vertices are certified
    /// against the grid oracle.
    pub oracle_cap: usize,
    pub oracle_resolution: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            starts: 200,
            seed: 0,
            tolerance: 1e-9,
            grad_tol: 1e-10,
            max_iters: 1000,
            oracle_cap: 6,
            oracle_resolution: 12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LagrangianReport {
    pub value: f64,
    pub maximiser: Weighting,
    pub method: Method,
    pub iterations: usize,
    /// Maximum KKT-style violation at the returned point.
    pub residual: f64,
    /// Grid oracle value when the certification ran.
    pub oracle_value: Option<f64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub(crate) fn poly_on_slice(f: &Hypergraph, x: &[f64]) -> f64 {
    let fact = factorial(f.k());
    let mut sum = 0.0;
    for e in f.edges() {
        let mut prod = 1.0;
        for &v in e {
            prod *= x[v - 1];
        }
        sum += prod;
    }
    fact * sum
}

pub(crate) fn grad_on_slice(f: &Hypergraph, x: &[f64], g: &mut [f64]) {
    let fact = factorial(f.k());
    for v in g.iter_mut() {
        *v = 0.0;
    }
    for e in f.edges() {
        for (skip, &v) in e.iter().enumerate() {
            let mut prod = fact;
            for (j, &u) in e.iter().enumerate() {
                if j != skip {
                    prod *= x[u - 1];
                }
            }
            g[v - 1] += prod;
        }
    }
}

/// `k! * sum over edges of the product of vertex weights`.
pub fn lagrange_poly(f: &Hypergraph, x: &Weighting) -> Result<f64> {
    if x.dim() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: x.dim() });
    }
    Ok(poly_on_slice(f, x.as_slice()))
}

/// Gradient of the Lagrange polynomial; component `v` sums the products of
/// the other vertex weights over the edges through `v`.
pub fn lagrange_grad(f: &Hypergraph, x: &Weighting) -> Result<Vec<f64>> {
    if x.dim() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: x.dim() });
    }
    let mut g = vec![0.0; f.n()];
    grad_on_slice(f, x.as_slice(), &mut g);
    Ok(g)
}

/// KKT-style violation of `x` as a candidate simplex maximiser: on the
/// support the gradient must match its weighted mean, off the support it
/// must not exceed it.
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

fn rounded_key(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v * 1e9).round() as i64).collect()
}

/// Deterministic reduction over candidate maximisers: larger value wins;
/// values within 1e-12 tie-break on the lexicographically smallest rounded
/// point, so the result does not depend on evaluation order.
pub(crate) fn better_candidate(best: &(f64, Vec<f64>), cand: &(f64, Vec<f64>)) -> bool {
    if cand.0 > best.0 + 1e-12 {
        return true;
    }
    if (cand.0 - best.0).abs() <= 1e-12 {
        return rounded_key(&cand.1) < rounded_key(&best.1);
    }
    false
}

/// Maximizes the Lagrange polynomial over the simplex.
///
/// Starts are the uniform point, the uniform point on each edge's support,
/// and `config.starts` seeded random simplex points. When `f.n()` is at
/// most `config.oracle_cap` the result is certified against the grid
/// oracle at `config.oracle_resolution`.
pub fn lagrangian(f: &Hypergraph, config: &SolverConfig) -> Result<LagrangianReport> {
    let n = f.n();
    if n == 0 || f.edge_count() == 0 {
        return Ok(LagrangianReport {
            value: 0.0,
            maximiser: Weighting::uniform(n),
            method: Method::MultistartGradient,
            iterations: 0,
            residual: 0.0,
            oracle_value: None,
        });
    }

    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(config.starts + 1 + f.edge_count());
    starts.push(vec![1.0 / n as f64; n]);
    for e in f.edges() {
        let mut s = vec![0.0; n];
        for &v in e {
            s[v - 1] = 1.0 / f.k() as f64;
        }
        starts.push(s);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.starts {
        starts.push(Weighting::random(n, &mut rng).as_slice().to_vec());
    }

    let mask = vec![true; n];
    let opts = AscentOptions { grad_tol: config.grad_tol, max_iters: config.max_iters };
    let obj = |x: &[f64]| poly_on_slice(f, x);
    let grad = |x: &[f64], g: &mut [f64]| grad_on_slice(f, x, g);

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0usize;
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
    let value = poly_on_slice(f, &x);
    let mut g = vec![0.0; n];
    grad_on_slice(f, &x, &mut g);
    let residual = kkt_residual(&x, &g);

    let oracle_value = if n <= config.oracle_cap {
        Some(lagrangian_grid_oracle(f, config.oracle_resolution)?)
    } else {
        None
    };
    if let Some(oracle) = oracle_value {
        if value < oracle - config.tolerance {
            return Err(Error::Certification { value, oracle, resolution: config.oracle_resolution });
        }
    }

    Ok(LagrangianReport {
        value,
        maximiser: Weighting::from_projected(x),
        method: Method::MultistartGradient,
        iterations,
        residual,
        oracle_value,
    })
}

/// Number of weak compositions of `total` into `parts` parts,
/// `C(total + parts - 1, parts - 1)`.
pub(crate) fn composition_count(total: u32, parts: usize) -> u128 {
    let n = total as u128 + parts as u128 - 1;
    let k = (parts - 1) as u128;
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Visits every weak composition of `total` into `parts` parts.
pub(crate) fn for_each_composition<F: FnMut(&[u32])>(total: u32, parts: usize, f: &mut F) {
    fn rec<F: FnMut(&[u32])>(buf: &mut Vec<u32>, remaining: u32, left: usize, f: &mut F) {
        if left == 1 {
            buf.push(remaining);
            f(buf);
            buf.pop();
            return;
        }
        for v in 0..=remaining {
            buf.push(v);
            rec(buf, remaining - v, left - 1, f);
            buf.pop();
        }
    }
    if parts == 0 {
        return;
    }
    let mut buf = Vec::with_capacity(parts);
    rec(&mut buf, total, parts, f);
}

/// Exact maximum of the Lagrange polynomial over all rational simplex
/// points with denominator `resolution`, by exhaustive enumeration with
/// integer arithmetic. Monotone non-decreasing in the resolution.
pub fn lagrangian_grid_oracle(f: &Hypergraph, resolution: u32) -> Result<f64> {
    lagrangian_grid_oracle_with_budget(f, resolution, DEFAULT_GRID_BUDGET)
}

pub fn lagrangian_grid_oracle_with_budget(f: &Hypergraph, resolution: u32, budget: u128) -> Result<f64> {
    if resolution == 0 {
        return Err(Error::InvalidInput("grid resolution must be at least 1".into()));
    }
    let n = f.n();
    if n == 0 || f.edge_count() == 0 {
        return Ok(0.0);
    }
    let points = composition_count(resolution, n);
    if points > budget {
        return Err(Error::OracleBudget { points, budget });
    }
    let mut best_num: u128 = 0;
    for_each_composition(resolution, n, &mut |c| {
        let mut sum: u128 = 0;
        for e in f.edges() {
            let mut prod: u128 = 1;
            for &v in e {
                prod *= c[v - 1] as u128;
                if prod == 0 {
                    break;
                }
            }
            sum += prod;
        }
        if sum > best_num {
            best_num = sum;
        }
    });
    let fact = factorial(f.k());
    Ok(fact * best_num as f64 / (resolution as f64).powi(f.k() as i32))
}
