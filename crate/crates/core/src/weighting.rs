//! Points on the standard simplex, indexed by vertices or by palette colours.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the sum-to-one invariant of a weighting.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A weight counts as strictly positive iff it exceeds this threshold.
/// Used by the ev/ee minimum filters.
pub const POSITIVITY_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weighting {
    weights: Vec<f64>,
}

impl Weighting {
    /// All weights must be non-negative and sum to 1 within [`SIMPLEX_TOL`].
    /// The empty weighting (dimension 0) is allowed; it indexes the empty
    /// colour set of an empty palette.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Ok(Self { weights });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeighting(format!("weight {w} is not a non-negative finite number")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidWeighting(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(dim: usize) -> Self {
        if dim == 0 {
            return Self::empty();
        }
        Self { weights: vec![1.0 / dim as f64; dim] }
    }

    pub fn empty() -> Self {
        Self { weights: Vec::new() }
    }

    /// Uniformly distributed point on the simplex (normalized exponentials).
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        if dim == 0 {
            return Self::empty();
        }
        let mut w: Vec<f64> = (0..dim)
            .map(|_| {
                let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                -u.ln()
            })
            .collect();
        let sum: f64 = w.iter().sum();
        for v in &mut w {
            *v /= sum;
        }
        Self { weights: w }
    }

    /// Wraps a vector produced by a simplex projection without re-validating.
    pub(crate) fn from_projected(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Indices with weight above `eps`.
    pub fn support(&self, eps: f64) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > eps)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|w| format!("{w:.12}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Which of the three density variants an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarMode {
    Vvv,
    Ev,
    Ee,
}

impl fmt::Display for StarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarMode::Vvv => write!(f, "vvv"),
            StarMode::Ev => write!(f, "ev"),
            StarMode::Ee => write!(f, "ee"),
        }
    }
}

impl FromStr for StarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vvv" => Ok(StarMode::Vvv),
            "ev" => Ok(StarMode::Ev),
            "ee" => Ok(StarMode::Ee),
            other => Err(Error::InvalidInput(format!("unknown star mode '{other}' (expected vvv, ev, or ee)"))),
        }
    }
}
