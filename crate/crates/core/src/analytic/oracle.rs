//! Brute-force reference for the closed form: enumerate every demand vector
//! and cost it by running the delivery schedule directly.

use crate::error::{Error, Result};
use crate::model::{binom, PlacementParams, PopularityDist, SystemConfig};

/// Largest number of demand vectors [`enumerate_average_rate`] will visit by
/// default.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Cached-group rate obtained by stepping through the multicast schedule
/// with expected class sizes: class sizes from `k` down, a running per-F-AP
/// total, and a truncated `ratio` on the class that crosses the threshold.
///
/// Agrees with [`super::cached_group_rate`] without going through the quota
/// solver.
pub fn scheduled_cached_rate(k: usize, cache_size: usize, params: PlacementParams) -> Result<f64> {
    let threshold = 1.0 - cache_size as f64 / params.split as f64;
    if k == 0 || threshold <= 0.0 {
        return Ok(0.0);
    }
    let r = params.code_rate;
    let p = cache_size as f64 * r / params.split as f64;
    if p > 1.0 {
        return Err(Error::invalid(format!("over-caching: M r / N0 = {p} > 1")));
    }
    let mut sum = 0.0;
    let mut sent = 0.0;
    for j in (1..=k).rev() {
        let length = p.powi(j as i32 - 1) * (1.0 - p).powi((k - j + 1) as i32) / r;
        let per_fap_messages = binom(k as u64 - 1, j as i64 - 1);
        let increment = length * per_fap_messages;
        let sum_new = sum + increment;
        let ratio = if sum_new < threshold {
            length
        } else {
            (threshold - sum) / per_fap_messages
        };
        sent += ratio * binom(k as u64, j as i64);
        if sum_new >= threshold {
            break;
        }
        sum = sum_new;
    }
    Ok(sent)
}

/// Average rate as the popularity-weighted sum over all `N^K` demand
/// vectors. Refuses instances with more than `cap` vectors.
pub fn enumerate_average_rate(
    config: &SystemConfig,
    dist: &PopularityDist,
    params: PlacementParams,
    cap: u128,
) -> Result<f64> {
    config.validate()?;
    params.validate_for(config)?;
    if dist.files() != config.files {
        return Err(Error::invalid("popularity length does not match N"));
    }
    let (n, faps) = (config.files, config.faps);
    let vectors = (n as u128)
        .checked_pow(faps as u32)
        .filter(|v| *v <= cap)
        .ok_or(Error::TooLarge {
            what: "demand enumeration",
            needed: (n as u128).checked_pow(faps as u32).unwrap_or(u128::MAX),
            cap,
        })?;

    let per_k: Vec<f64> = (0..=faps)
        .map(|k| Ok(scheduled_cached_rate(k, config.cache_size, params)? + (faps - k) as f64))
        .collect::<Result<_>>()?;

    let probs = dist.probs();
    let mut demand = vec![0usize; faps];
    let mut total = 0.0;
    for _ in 0..vectors {
        let weight: f64 = demand.iter().map(|&d| probs[d]).product();
        let k1 = demand.iter().filter(|&&d| d < params.split).count();
        total += weight * per_k[k1];

        for digit in demand.iter_mut() {
            *digit += 1;
            if *digit < n {
                break;
            }
            *digit = 0;
        }
    }
    Ok(total)
}
