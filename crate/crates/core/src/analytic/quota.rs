use crate::error::{Error, Result};
use crate::model::{binom, PlacementParams};

use super::{bit_cache_prob, mu};

/// Where the multicast schedule stops for `k` cached-group requesters.
///
/// Classes `class + 1 ..= k - 1` are sent in full and class `class` is sent
/// at `fraction` of its size, which gives each requester exactly its
/// residual demand `1 - M/N0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeliveryQuota {
    /// s_k, in `[0, k - 1]`.
    pub class: usize,
    /// eta_k, in `(0, 1]`.
    pub fraction: f64,
}

/// Solves the delivery quota for `k >= 1` requesters and `M < N0`.
///
/// Scans classes from `s = k - 1` downward, accumulating what a single
/// requester receives from each class, `C(k-1, s) mu_k(s+1)`, and stops at
/// the first class that reaches the residual demand.
pub fn solve_quota(k: usize, cache_size: usize, params: PlacementParams) -> Result<DeliveryQuota> {
    if k == 0 {
        return Err(Error::invalid("quota needs at least one requester"));
    }
    if cache_size >= params.split {
        return Err(Error::invalid(format!(
            "quota is only defined for M < N0 (M = {cache_size}, N0 = {})",
            params.split
        )));
    }
    let p = bit_cache_prob(params, cache_size)?;
    let target = 1.0 - cache_size as f64 / params.split as f64;
    solve_with(k, target, p, params.code_rate)
}

pub(crate) fn solve_with(k: usize, target: f64, p: f64, code_rate: f64) -> Result<DeliveryQuota> {
    let mut received = 0.0;
    for s in (0..k).rev() {
        let class_share = binom(k as u64 - 1, s as i64) * mu(k, s + 1, p, code_rate);
        if received + class_share >= target {
            let fraction = ((target - received) / class_share).clamp(f64::MIN_POSITIVE, 1.0);
            return Ok(DeliveryQuota { class: s, fraction });
        }
        received += class_share;
    }
    // The classes carry (1 - p)/r >= 1 - M/N0 in total, with equality at
    // r = 1; running out here is rounding at that boundary.
    if target - received <= 1e-12 * target.max(1.0) {
        return Ok(DeliveryQuota {
            class: 0,
            fraction: 1.0,
        });
    }
    Err(Error::Internal(format!(
        "quota infeasible: classes carry {received}, demand is {target} (k = {k}, p = {p}, r = {code_rate})"
    )))
}

/// `|lhs - (1 - M/N0)|` where lhs is what one requester receives under
/// `quota`.
pub fn quota_residual(k: usize, cache_size: usize, params: PlacementParams, quota: DeliveryQuota) -> Result<f64> {
    let p = bit_cache_prob(params, cache_size)?;
    let r = params.code_rate;
    let mut received = 0.0;
    for s in (quota.class + 1..k).rev() {
        received += binom(k as u64 - 1, s as i64) * mu(k, s + 1, p, r);
    }
    received += quota.fraction * binom(k as u64 - 1, quota.class as i64) * mu(k, quota.class + 1, p, r);
    Ok((received - (1.0 - cache_size as f64 / params.split as f64)).abs())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(split: usize, rate: f64) -> PlacementParams {
        PlacementParams::new(split, rate).unwrap()
    }

    #[test]
    fn unit_rate_exhausts_every_class() {
        for k in 1..=20 {
            for (m, n0) in [(1, 2), (12, 100), (3, 4)] {
                let q = solve_quota(k, m, params(n0, 1.0)).unwrap();
                assert_eq!(q.class, 0, "k={k} M={m} N0={n0}");
                assert!((q.fraction - 1.0).abs() < 1e-9, "k={k}: {}", q.fraction);
            }
        }
    }

    #[test]
    fn single_requester() {
        let q = solve_quota(1, 1, params(2, 0.5)).unwrap();
        assert_eq!(q.class, 0);
        assert!((q.fraction - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn matches_extended_precision_scan() {
        // 50-digit oracle for k = 3, M = 12, N0 = 20, r = 0.7
        let q = solve_quota(3, 12, params(20, 0.7)).unwrap();
        assert_eq!(q.class, 1);
        assert!((q.fraction - 0.628_814_902_893_380_90).abs() < 1e-14, "{}", q.fraction);
    }

    #[test]
    fn rejects_outside_domain() {
        assert!(solve_quota(0, 1, params(2, 0.5)).is_err());
        assert!(solve_quota(3, 4, params(4, 0.5)).is_err());
    }

    proptest! {
        #[test]
        fn quota_is_feasible_and_exact(
            k in 1usize..=30,
            m in 1usize..=60,
            extra in 1usize..=60,
            rate in 0.001f64..=1.0,
        ) {
            let p = params(m + extra, rate);
            let q = solve_quota(k, m, p).unwrap();
            prop_assert!(q.class < k);
            prop_assert!(q.fraction > 0.0 && q.fraction <= 1.0);
            prop_assert!(quota_residual(k, m, p, q).unwrap() <= 1e-10);
        }
    }
}
