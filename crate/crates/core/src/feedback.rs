//! Observation probabilities and the importance-weighted loss estimator.
//!
//! [`RoundObservation::reveal`] is the only place where a full loss vector
//! is sliced down to what the chosen arm actually reveals; policies only
//! ever see the resulting [`EstimatedLoss`].

use crate::error::{Error, Result};
use crate::ftrl::SimplexPoint;
use crate::graph::FeedbackGraph;

/// The chosen arm and the losses of its out-neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundObservation {
    chosen: usize,
    /// `(j, loss_j)` for every `j` in `N_out(chosen)`, ascending in `j`.
    observed: Vec<(usize, f64)>,
}

impl RoundObservation {
    /// Reveals exactly the `N_out(chosen)` slice of `losses`.
    pub fn reveal(g: &FeedbackGraph, chosen: usize, losses: &[f64]) -> Result<Self> {
        if losses.len() != g.num_arms() || chosen >= g.num_arms() {
            return Err(Error::BadParameter("observation dimension mismatch".into()));
        }
        let observed = g
            .out_neighbors(chosen)
            .iter()
            .map(|&j| {
                let l = losses[j];
                if (0.0..=1.0).contains(&l) {
                    Ok((j, l))
                } else {
                    Err(Error::BadParameter(format!(
                        "loss {l} of arm {} outside [0, 1]",
                        j + 1
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { chosen, observed })
    }

    pub fn chosen(&self) -> usize {
        self.chosen
    }

    pub fn observed(&self) -> &[(usize, f64)] {
        &self.observed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedLoss {
    pub values: Vec<f64>,
    pub obs_prob: Vec<f64>,
}

/// `P_t(i) = sum_{j in N_in(i)} p_t(j)`.
pub fn observation_probabilities(g: &FeedbackGraph, p: &SimplexPoint) -> Vec<f64> {
    (0..g.num_arms())
        .map(|i| g.in_neighbors(i).iter().map(|&j| p[j]).sum())
        .collect()
}

/// `hat l_t(i) = l_t(i) / P_t(i)` for observed `i`, zero elsewhere.
pub fn estimate_losses(
    g: &FeedbackGraph,
    p: &SimplexPoint,
    obs: &RoundObservation,
) -> Result<EstimatedLoss> {
    let obs_prob = observation_probabilities(g, p);
    let mut values = vec![0.0; g.num_arms()];
    for &(j, loss) in obs.observed() {
        if obs_prob[j] <= 0.0 {
            return Err(Error::ZeroObservationProbability(j + 1));
        }
        values[j] = loss / obs_prob[j];
    }
    Ok(EstimatedLoss { values, obs_prob })
}
