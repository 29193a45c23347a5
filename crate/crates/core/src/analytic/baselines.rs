//! Reference schemes the proposed placement is compared against.

use crate::error::{Error, Result};
use crate::model::{PlacementParams, PopularityDist, SystemConfig};

use super::average_rate;

/// LFU: the `M` most popular files are cached whole at every F-AP and every
/// other request is served by a unicast file.
pub fn lfu_rate(config: &SystemConfig, dist: &PopularityDist) -> Result<f64> {
    config.validate()?;
    let hit = dist.cached_mass(config.cache_size)?;
    Ok(config.faps as f64 * (1.0 - hit))
}

/// Decentralized coded caching: every file gets an `M/N` share of each cache
/// and no MDS expansion, i.e. the proposed scheme at `(N0, r) = (N, 1)`.
pub fn decentralized_rate(config: &SystemConfig, dist: &PopularityDist) -> Result<f64> {
    let params = PlacementParams::new(config.files, 1.0)?;
    Ok(average_rate(config, dist, params)?.average)
}

/// RLFU: two file groups with uncoded random placement. Returns the best
/// rate over `N0 in [M, N]` and the split point achieving it.
pub fn rlfu_rate(config: &SystemConfig, dist: &PopularityDist) -> Result<(f64, usize)> {
    rlfu_rate_over(config, dist, config.cache_size..=config.files)
}

/// [`rlfu_rate`] restricted to the given split points. Ties keep the
/// smallest split.
pub fn rlfu_rate_over(
    config: &SystemConfig,
    dist: &PopularityDist,
    splits: impl IntoIterator<Item = usize>,
) -> Result<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for split in splits {
        let rate = average_rate(config, dist, PlacementParams::new(split, 1.0)?)?.average;
        best = match best {
            Some((b, s)) if b < rate || (b == rate && s <= split) => Some((b, s)),
            _ => Some((rate, split)),
        };
    }
    best.ok_or_else(|| Error::invalid("RLFU split grid is empty"))
}
