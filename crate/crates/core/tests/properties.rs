use proptest::prelude::*;

use fogcache::analytic::{
    average_rate, cached_group_rate, enumerate_average_rate, scheduled_cached_rate, DEFAULT_ENUMERATION_CAP,
};
use fogcache::model::{binomial_pmf, group_size_pmf};
use fogcache::sim::{deliver, draw_demands, place};
use fogcache::{PlacementParams, PopularityDist, SystemConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pmf_is_a_distribution(trials in 0usize..=60, p in 0.0f64..=1.0) {
        let pmf = binomial_pmf(trials, p);
        prop_assert_eq!(pmf.len(), trials + 1);
        prop_assert!(pmf.iter().all(|&x| x >= 0.0));
        prop_assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn group_pmf_matches_binomial(k in 1usize..=30, p0 in 0.0f64..=1.0) {
        let pmf = binomial_pmf(k, p0);
        for (x, want) in pmf.iter().enumerate() {
            prop_assert_eq!(group_size_pmf(k, p0, x).unwrap(), *want);
        }
    }

    #[test]
    fn enumeration_agrees_on_random_small_instances(
        files in 2usize..=5,
        faps in 1usize..=4,
        m_frac in 0.0f64..1.0,
        n0_frac in 0.0f64..=1.0,
        level in 1usize..=10,
        alpha in 0.0f64..=2.0,
    ) {
        let cache_size = 1 + (m_frac * (files - 1) as f64) as usize;
        let split = (cache_size + 1 + (n0_frac * (files - cache_size) as f64) as usize).min(files);
        prop_assume!(split > cache_size);
        let cfg = SystemConfig { faps, files, cache_size, alpha, ..SystemConfig::default() };
        let dist = PopularityDist::zipf(files, alpha).unwrap();
        let params = PlacementParams::new(split, level as f64 / 10.0).unwrap();
        let brute = enumerate_average_rate(&cfg, &dist, params, DEFAULT_ENUMERATION_CAP).unwrap();
        let closed = average_rate(&cfg, &dist, params).unwrap().average;
        prop_assert!((brute - closed).abs() <= 1e-12);
    }

    #[test]
    fn cached_rate_bounds(k in 0usize..=30, m in 1usize..=50, extra in 1usize..=50, r in 0.01f64..=1.0) {
        let params = PlacementParams::new(m + extra, r).unwrap();
        let rate = cached_group_rate(k, m, params).unwrap();
        let scheduled = scheduled_cached_rate(k, m, params).unwrap();
        prop_assert!((rate - scheduled).abs() <= 1e-9 * rate.max(1.0));
        // Never worse than unicasting the uncached remainder to everyone.
        prop_assert!(rate <= k as f64 * (1.0 - m as f64 / (m + extra) as f64) + 1e-12);
        prop_assert!(rate >= 0.0);
    }

    #[test]
    fn average_rate_is_within_unicast_bounds(alpha in 0.0f64..=2.0, split in 12usize..=100, level in 1usize..=20) {
        let cfg = SystemConfig::default();
        let dist = PopularityDist::zipf(cfg.files, alpha).unwrap();
        let b = average_rate(&cfg, &dist, PlacementParams::new(split, level as f64 / 20.0).unwrap()).unwrap();
        prop_assert!(b.average >= 0.0 && b.average <= cfg.faps as f64);
        prop_assert!((b.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_trial_decodes_and_conserves(seed in any::<u64>(), level in 2usize..=10, split in 3usize..=12) {
        let cfg = SystemConfig { faps: 6, files: 12, cache_size: 2, file_symbols: 600, ..SystemConfig::default() };
        let params = PlacementParams::new(split, level as f64 / 10.0).unwrap();
        let cache = place(&cfg, params, seed).unwrap();
        let dist = PopularityDist::zipf(12, 0.8).unwrap();
        let demand = draw_demands(&dist, 6, seed ^ 1).unwrap();
        let d = deliver(&cache, &demand, &cfg, params).unwrap();
        let t = &d.trial;
        prop_assert!(t.all_decoded());
        prop_assert_eq!(d.messages.iter().map(|m| m.payload_symbols).sum::<u64>(), t.multicast_symbols);
        prop_assert_eq!(d.repairs.iter().map(|m| m.payload_symbols).sum::<u64>(), t.patch_symbols);
        prop_assert_eq!((t.rate_file_units * 600.0).round() as u64, t.total_symbols());
        prop_assert!(t.rate_file_units >= (6 - t.k1) as f64);
    }
}
