use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::permutation::Permutation;
use crate::ris::{beam_split_config, gain, symmetric_pair_config, Hardware, RisModel, SplitWeights};
use crate::rng;

/// Large-`M` limit of the evenly split and the shared-pair gain, `4 / pi^2`.
pub const SPLIT_LIMIT: f64 = 4.0 / (PI * PI);

/// Monte-Carlo estimate of a normalized gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub m_side: usize,
    pub samples: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_err: f64,
    /// `mean - 4 / pi^2`.
    pub distance_from_limit: f64,
    /// `10 log10(mean)`.
    pub mean_db: f64,
    /// Largest `|gain(k -> k~) - gain(k~ -> k)| / M^4` over the samples.
    pub max_reciprocity_gap: f64,
}

fn summarize(m_side: usize, seed: u64, draws: &[(f64, f64)]) -> MonteCarloEstimate {
    let n = draws.len() as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let var = if draws.len() > 1 {
        draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    MonteCarloEstimate {
        m_side,
        samples: draws.len(),
        seed,
        mean,
        std_err: (var / n).sqrt(),
        distance_from_limit: mean - SPLIT_LIMIT,
        mean_db: 10.0 * mean.log10(),
        max_reciprocity_gap: draws.iter().map(|d| d.1).fold(0.0, f64::max),
    }
}

fn check(m_side: usize, samples: usize) -> Result<()> {
    if m_side == 0 {
        return Err(Error::InvalidSize);
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    Ok(())
}

/// Mean `gain(k -> k~) / M^4` of the `alpha`-weighted split configuration,
/// over a fresh random permutation and random visible `(k, k~)` per sample.
/// Draws hitting an antipodal element are redrawn.
pub fn split_check(m_side: usize, alpha: f64, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check(m_side, samples)?;
    let w = SplitWeights::new(alpha)?;
    let draws = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let model = RisModel::per_element(Permutation::random(m_side, &mut r)?);
            loop {
                let (k, kt) = (Direction::random_visible(&mut r), Direction::random_visible(&mut r));
                let c = match beam_split_config(&model, k, kt, w) {
                    Err(Error::DegenerateSplit { .. }) => continue,
                    c => c?,
                };
                let fwd = gain(&model, k, kt, &c)? / model.full_gain();
                let rev = gain(&model, kt, k, &c)? / model.full_gain();
                return Ok((fwd, (fwd - rev).abs()));
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(m_side, seed, &draws))
}

/// Mean `gain(k -> k~) / M^4` of shared-pair hardware on a random symmetric
/// permutation, with the optimal pair phases for each random `(k, k~)`.
pub fn sym_check(m_side: usize, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check(m_side, samples)?;
    let draws = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let perm = Permutation::random_symmetric(m_side, &mut r)?;
            let model = RisModel::new(perm, Hardware::SharedPair)?;
            let (k, kt) = (Direction::random_visible(&mut r), Direction::random_visible(&mut r));
            let c = symmetric_pair_config(&model, k, kt)?;
            let fwd = gain(&model, k, kt, &c)? / model.full_gain();
            let rev = gain(&model, kt, k, &c)? / model.full_gain();
            Ok((fwd, (fwd - rev).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(m_side, seed, &draws))
}
