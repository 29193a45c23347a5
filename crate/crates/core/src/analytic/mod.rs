//! Closed-form average fronthaul rate of the group coded caching scheme.
//!
//! For a placement `(N0, r)` each F-AP caches `M/N0` of every cached-group
//! file, drawn from its MDS-coded version of length `F/r`. A coded symbol is
//! therefore in a given cache with probability `p = M r / N0`, and the
//! symbols of a requested file split into classes by which of the `k`
//! requesting F-APs hold them. The class exclusively held by a given set of
//! `x - 1` F-APs has expected size `mu_k(x) F` (see [`subfile_fraction`]).
//!
//! Delivery to the `k` cached-group requesters sends XOR multicasts from the
//! largest classes down until every requester has `1 - M/N0` new file units,
//! which is where the [`quota`] solver cuts the schedule. The `K - k`
//! uncached-group requesters get whole files by unicast.

mod baselines;
mod oracle;
mod quota;

pub use baselines::{decentralized_rate, lfu_rate, rlfu_rate, rlfu_rate_over};
pub use oracle::{enumerate_average_rate, scheduled_cached_rate, DEFAULT_ENUMERATION_CAP};
pub use quota::{quota_residual, solve_quota, DeliveryQuota};

use crate::error::{Error, Result};
use crate::model::{binom, binomial_pmf, PlacementParams, PopularityDist, SystemConfig};

/// Tolerance used when deciding whether the full-set class alone covers the
/// residual demand. Ties go to the single-message branch.
pub(crate) const BRANCH_TOL: f64 = 1e-12;

/// Probability that a given coded symbol of a cached-group file sits in a
/// given F-AP's cache, `M r / N0`.
pub fn bit_cache_prob(params: PlacementParams, cache_size: usize) -> Result<f64> {
    let p = cache_size as f64 * params.code_rate / params.split as f64;
    if p > 1.0 {
        return Err(Error::invalid(format!(
            "over-caching: M r / N0 = {p} > 1 (M = {cache_size}, N0 = {}, r = {})",
            params.split, params.code_rate
        )));
    }
    Ok(p)
}

/// `mu_m(x) = (1/r) p^(x-1) (1-p)^(m-x+1)`: the expected size, in file
/// units, of the symbols of a requested file held by exactly one particular
/// set of `x - 1` F-APs out of `m`.
pub fn subfile_fraction(m: usize, x: usize, params: PlacementParams, cache_size: usize) -> Result<f64> {
    if x == 0 || x > m {
        return Err(Error::invalid(format!("class index x = {x} must lie in [1, {m}]")));
    }
    let p = bit_cache_prob(params, cache_size)?;
    Ok(mu(m, x, p, params.code_rate))
}

#[inline]
pub(crate) fn mu(m: usize, x: usize, p: f64, code_rate: f64) -> f64 {
    p.powi(x as i32 - 1) * (1.0 - p).powi((m - x + 1) as i32) / code_rate
}

/// Fronthaul rate (file units) spent on the `k` requests that hit the cached
/// group.
pub fn cached_group_rate(k: usize, cache_size: usize, params: PlacementParams) -> Result<f64> {
    if k == 0 || cache_size >= params.split {
        return Ok(0.0);
    }
    let target = 1.0 - cache_size as f64 / params.split as f64;
    let p = bit_cache_prob(params, cache_size)?;
    let r = params.code_rate;
    if mu(k, k, p, r) >= target - BRANCH_TOL {
        return Ok(target);
    }
    let quota = quota::solve_with(k, target, p, r)?;
    let mut rate = 0.0;
    for s in (quota.class + 1..k).rev() {
        rate += binom(k as u64, s as i64 + 1) * mu(k, s + 1, p, r);
    }
    rate += quota.fraction * binom(k as u64, quota.class as i64 + 1) * mu(k, quota.class + 1, p, r);
    Ok(rate)
}

/// Unicast rate for the `faps - k` requests outside the cached group.
pub fn uncached_group_rate(faps: usize, k: usize) -> Result<f64> {
    if k > faps {
        return Err(Error::invalid(format!("k = {k} exceeds K = {faps}")));
    }
    Ok((faps - k) as f64)
}

/// Per-k decomposition of the average rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown {
    /// `Pr{k1 = k}` for `k = 0..=K`.
    pub pmf: Vec<f64>,
    /// Cached-group rate for each k.
    pub cached: Vec<f64>,
    /// Uncached-group rate for each k, `K - k`.
    pub uncached: Vec<f64>,
    /// Probability that one request targets the cached group (p0).
    pub cached_mass: f64,
    pub average: f64,
}

/// Average fronthaul rate over the demand distribution for one placement.
///
/// When `N0 <= M` the cached group is fully stored everywhere and the average
/// is returned as the closed form `K (1 - p0)`.
pub fn average_rate(config: &SystemConfig, dist: &PopularityDist, params: PlacementParams) -> Result<RateBreakdown> {
    config.validate()?;
    params.validate_for(config)?;
    if dist.files() != config.files {
        return Err(Error::invalid(format!(
            "popularity covers {} files but N = {}",
            dist.files(),
            config.files
        )));
    }
    let faps = config.faps;
    let p0 = dist.cached_mass(params.split)?;
    let pmf = binomial_pmf(faps, p0);
    let cached = (0..=faps)
        .map(|k| cached_group_rate(k, config.cache_size, params))
        .collect::<Result<Vec<_>>>()?;
    let uncached: Vec<f64> = (0..=faps).map(|k| (faps - k) as f64).collect();
    let average = if params.split <= config.cache_size {
        faps as f64 * (1.0 - p0)
    } else {
        pmf.iter()
            .zip(cached.iter().zip(&uncached))
            .map(|(w, (c, u))| w * (c + u))
            .sum()
    };
    Ok(RateBreakdown {
        pmf,
        cached,
        uncached,
        cached_mass: p0,
        average,
    })
}
