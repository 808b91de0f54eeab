use rand::Rng;
use serde::{Deserialize, Serialize};

use super::LossSource;
use crate::error::{Error, Result};
use crate::rng::{round_rng, Purpose};

/// Means closer than this to the smallest one count as tied.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossFamily {
    /// `l(i) ~ Bernoulli(mean_i)`.
    #[default]
    Bernoulli,
    /// `l(i) ~ Uniform[m - w, m + w]` with `w = min(m, 1 - m)`, which keeps
    /// the support inside `[0, 1]` and the mean exact.
    UniformAroundMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StochasticFields")]
pub struct StochasticSpec {
    means: Vec<f64>,
    family: LossFamily,
}

#[derive(Deserialize)]
struct StochasticFields {
    means: Vec<f64>,
    #[serde(default)]
    family: LossFamily,
}

impl TryFrom<StochasticFields> for StochasticSpec {
    type Error = Error;

    fn try_from(f: StochasticFields) -> Result<Self> {
        Self::new(f.means, f.family)
    }
}

impl StochasticSpec {
    /// Rejects means outside `[0, 1]` and ties for the smallest mean.
    pub fn new(means: Vec<f64>, family: LossFamily) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::BadParameter("need at least two arms".into()));
        }
        if let Some(i) = means.iter().position(|m| !(0.0..=1.0).contains(m)) {
            return Err(Error::BadParameter(format!(
                "mean {} of arm {} outside [0, 1]",
                means[i],
                i + 1
            )));
        }
        let best = means.iter().copied().fold(f64::INFINITY, f64::min);
        let ties = means.iter().filter(|&&m| m - best <= TIE_TOL).count();
        if ties > 1 {
            return Err(Error::BadParameter(format!(
                "the optimal arm must be unique, {ties} arms share mean {best}"
            )));
        }
        Ok(Self { means, family })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn family(&self) -> LossFamily {
        self.family
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    pub fn i_star(&self) -> usize {
        let best = self.means.iter().copied().fold(f64::INFINITY, f64::min);
        self.means.iter().position(|&m| m == best).expect("nonempty")
    }

    /// The arm with the second smallest mean, lowest index on ties.
    pub fn runner_up(&self) -> usize {
        let i_star = self.i_star();
        (0..self.means.len())
            .filter(|&i| i != i_star)
            .min_by(|&a, &b| self.means[a].total_cmp(&self.means[b]))
            .expect("at least two arms")
    }

    pub fn gaps(&self) -> Vec<f64> {
        let best = self.means[self.i_star()];
        self.means.iter().map(|m| m - best).collect()
    }

    pub fn delta_min(&self) -> f64 {
        let i_star = self.i_star();
        self.gaps()
            .into_iter()
            .enumerate()
            .filter(|&(i, _)| i != i_star)
            .map(|(_, g)| g)
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn draw(&self, seed: u64, t: u64) -> Vec<f64> {
        let mut rng = round_rng(seed, Purpose::Losses, t);
        self.means
            .iter()
            .map(|&m| {
                let u: f64 = rng.gen();
                match self.family {
                    LossFamily::Bernoulli => {
                        if u < m {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    LossFamily::UniformAroundMean => {
                        let w = m.min(1.0 - m);
                        (m + w * (2.0 * u - 1.0)).clamp(0.0, 1.0)
                    }
                }
            })
            .collect()
    }

    pub fn source(&self, seed: u64) -> StochasticSource {
        StochasticSource {
            spec: self.clone(),
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StochasticSource {
    spec: StochasticSpec,
    seed: u64,
}

impl LossSource for StochasticSource {
    fn num_arms(&self) -> usize {
        self.spec.num_arms()
    }

    fn losses(&mut self, t: u64) -> Result<Vec<f64>> {
        if t == 0 {
            return Err(Error::BadParameter("rounds are numbered from 1".into()));
        }
        Ok(self.spec.draw(self.seed, t))
    }
}
