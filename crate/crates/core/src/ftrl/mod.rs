//! Solvers for the regularized-leader subproblem
//! `argmin_{p in simplex} <L, p> + psi(p)` with separable regularizers.
//!
//! Tolerances are engineering defaults: the outer dual search stops once
//! `|sum(x) - 1| <= 1e-10` (usually far tighter), and every per-coordinate
//! inversion is exact or solved to machine precision.

mod entropy;
mod solver;

pub use entropy::{
    entropy_upper_bound, pair_entropy_sum, pair_entropy_term, pair_variance_sum, shannon_entropy,
};
pub use solver::{
    kkt_residual, solve_separable, solve_separable_with, solve_shannon, SolverOptions,
    COORD_EPS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `sum(p) = 1` for a valid simplex point.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Probability vector over the arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::BadParameter("empty probability vector".into()));
        }
        if let Some(i) = probs
            .iter()
            .position(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
        {
            return Err(Error::BadParameter(format!(
                "probability {} at coordinate {} outside [0, 1]",
                probs[i],
                i + 1
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::BadParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self(probs))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    /// Uniform distribution over `support`.
    pub fn uniform_on(k: usize, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::BadParameter("empty support".into()));
        }
        let mut probs = vec![0.0; k];
        for &i in support {
            probs[i] = 1.0 / support.len() as f64;
        }
        Self::new(probs)
    }

    /// `(1 - sum gamma) q + sum gamma_j mu_{U_j}` for mixing components
    /// `(gamma_j, U_j)`.
    pub fn mix(&self, components: &[(f64, &[usize])]) -> Result<Self> {
        let total: f64 = components.iter().map(|(g, _)| g).sum();
        if !(0.0..=1.0).contains(&total) || components.iter().any(|(g, _)| *g < 0.0) {
            return Err(Error::BadParameter(format!("invalid mixing weights (sum {total})")));
        }
        let mut probs: Vec<f64> = self.0.iter().map(|q| (1.0 - total) * q).collect();
        for (gamma, support) in components {
            if support.is_empty() {
                return Err(Error::BadParameter("empty mixing support".into()));
            }
            let w = gamma / support.len() as f64;
            for &i in *support {
                probs[i] += w;
            }
        }
        Ok(Self(probs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// True when every coordinate is strictly inside `(0, 1)`.
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&p| p > 0.0 && p < 1.0)
    }
}

impl std::ops::Index<usize> for SimplexPoint {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Convex per-coordinate regularizer term `f_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegularizerTerm {
    /// `beta * x ln x`; summed over all coordinates this is `-beta H(p)`.
    ShannonFull(f64),
    /// `beta * (x ln x + (1 - x) ln(1 - x))`.
    ShannonPair(f64),
    /// `w * (-2 sqrt(x) - 2 sqrt(1 - x))`.
    RootPair(f64),
}

impl RegularizerTerm {
    pub fn weight(&self) -> f64 {
        match *self {
            RegularizerTerm::ShannonFull(w)
            | RegularizerTerm::ShannonPair(w)
            | RegularizerTerm::RootPair(w) => w,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        use crate::numeric::xlogx;
        match *self {
            RegularizerTerm::ShannonFull(b) => b * xlogx(x),
            RegularizerTerm::ShannonPair(b) => b * (xlogx(x) + xlogx(1.0 - x)),
            RegularizerTerm::RootPair(w) => w * (-2.0 * x.sqrt() - 2.0 * (1.0 - x).sqrt()),
        }
    }

    /// First derivative `f_i'(x)`.
    pub fn grad(&self, x: f64) -> f64 {
        match *self {
            RegularizerTerm::ShannonFull(b) => b * (x.ln() + 1.0),
            RegularizerTerm::ShannonPair(b) => b * (x.ln() - (1.0 - x).ln()),
            RegularizerTerm::RootPair(w) => w * (-1.0 / x.sqrt() + 1.0 / (1.0 - x).sqrt()),
        }
    }

    /// Second derivative `f_i''(x)`.
    pub fn hess(&self, x: f64) -> f64 {
        match *self {
            RegularizerTerm::ShannonFull(b) => b / x,
            RegularizerTerm::ShannonPair(b) => b / (x * (1.0 - x)),
            RegularizerTerm::RootPair(w) => {
                0.5 * w * (x.powf(-1.5) + (1.0 - x).powf(-1.5))
            }
        }
    }
}

/// One regularizer term per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizerSpec {
    terms: Vec<RegularizerTerm>,
}

impl RegularizerSpec {
    pub fn new(terms: Vec<RegularizerTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::BadParameter("regularizer needs at least one term".into()));
        }
        if let Some(i) = terms
            .iter()
            .position(|t| !(t.weight() > 0.0 && t.weight().is_finite()))
        {
            return Err(Error::BadParameter(format!(
                "regularizer weight {} at coordinate {} must be positive",
                terms[i].weight(),
                i + 1
            )));
        }
        Ok(Self { terms })
    }

    /// `ShannonPair(beta)` on coordinates flagged in `pair_mask`,
    /// `RootPair(root_weight)` elsewhere.
    pub fn hybrid(pair_mask: &[bool], beta: f64, root_weight: f64) -> Result<Self> {
        Self::new(
            pair_mask
                .iter()
                .map(|&pair| {
                    if pair {
                        RegularizerTerm::ShannonPair(beta)
                    } else {
                        RegularizerTerm::RootPair(root_weight)
                    }
                })
                .collect(),
        )
    }

    pub fn terms(&self) -> &[RegularizerTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Objective `<L, p> + sum_i f_i(p_i)`.
    pub fn objective(&self, losses: &[f64], p: &[f64]) -> f64 {
        self.terms
            .iter()
            .zip(losses.iter().zip(p))
            .map(|(t, (l, x))| l * x + t.value(*x))
            .sum()
    }
}
