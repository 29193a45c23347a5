//! System parameters, file popularity and the combinatorics shared by the
//! analysis, optimizer and simulator.

use std::path::Path;

use crate::error::{Error, Result};

/// Global parameters of the caching network.
///
/// `file_symbols` only matters to the simulator; the analytic side works in
/// file units and never looks at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Number of fog access points (K).
    pub faps: usize,
    /// Number of files in the library (N).
    pub files: usize,
    /// Per-F-AP cache capacity in files (M).
    pub cache_size: usize,
    /// File size in symbols, simulation only (F).
    pub file_symbols: usize,
    /// Zipf exponent.
    pub alpha: f64,
    /// Code-rate grid resolution: rates are searched over {1/L, ..., 1}.
    pub rate_levels: usize,
}

impl Default for SystemConfig {
    /// K = 15, N = 100, M = 12, alpha = 0.8, L = 100, with 10^5 symbols per
    /// file for simulation.
    fn default() -> Self {
        SystemConfig {
            faps: 15,
            files: 100,
            cache_size: 12,
            file_symbols: 100_000,
            alpha: 0.8,
            rate_levels: 100,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.faps == 0 {
            return Err(Error::invalid("K must be at least 1"));
        }
        if self.files == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        if self.cache_size == 0 || self.cache_size > self.files {
            return Err(Error::invalid(format!(
                "M must satisfy 1 <= M <= N (M = {}, N = {})",
                self.cache_size, self.files
            )));
        }
        if self.file_symbols == 0 {
            return Err(Error::invalid("F_symbols must be at least 1"));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid(format!(
                "alpha must be finite and nonnegative (got {})",
                self.alpha
            )));
        }
        if self.rate_levels == 0 {
            return Err(Error::invalid("L must be at least 1"));
        }
        Ok(())
    }

    /// The code-rate grid {1/L, 2/L, ..., 1}.
    pub fn rate_grid(&self) -> Vec<f64> {
        rate_grid(self.rate_levels)
    }
}

/// `{1/levels, 2/levels, ..., 1}`, each entry computed as `l / levels` so the
/// last one is exactly 1.
pub fn rate_grid(levels: usize) -> Vec<f64> {
    (1..=levels).map(|l| l as f64 / levels as f64).collect()
}

/// Request probabilities over the library, most popular file first.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityDist {
    probs: Vec<f64>,
}

impl PopularityDist {
    /// Zipf popularity: `p[j] = j^-alpha / sum_n n^-alpha` for `j = 1..=files`.
    pub fn zipf(files: usize, alpha: f64) -> Result<Self> {
        if files == 0 {
            return Err(Error::invalid("Zipf popularity needs at least one file"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::invalid(format!(
                "Zipf exponent must be finite and nonnegative (got {alpha})"
            )));
        }
        let weights: Vec<f64> = (1..=files).map(|j| (j as f64).powf(-alpha)).collect();
        // Summing smallest first keeps the normalizer accurate for long tails.
        let total: f64 = weights.iter().rev().sum();
        Ok(PopularityDist {
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(files: usize) -> Result<Self> {
        Self::zipf(files, 0.0)
    }

    /// Builds a distribution from arbitrary nonnegative weights that already
    /// sum to one (within 1e-6). The entries are renormalized and sorted so
    /// the most popular file comes first.
    pub fn from_probabilities(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("popularity vector is empty"));
        }
        if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::invalid(format!(
                "popularity entries must be finite and nonnegative (got {bad})"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!(
                "popularity entries must sum to 1 (sum is {total})"
            )));
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = probs.iter().rev().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(PopularityDist { probs })
    }

    /// Parses the plain-text popularity format: one probability per line,
    /// blank lines ignored, `#` starts a comment.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut probs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let value: f64 = content.parse().map_err(|e| Error::Parse {
                path: origin.to_path_buf(),
                line: lineno + 1,
                message: format!("bad probability {content:?}: {e}"),
            })?;
            probs.push(value);
        }
        Self::from_probabilities(probs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn files(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability that a single request targets one of the `split` most
    /// popular files (p0).
    pub fn cached_mass(&self, split: usize) -> Result<f64> {
        if split == 0 || split > self.probs.len() {
            return Err(Error::invalid(format!(
                "split point must lie in [1, {}] (got {split})",
                self.probs.len()
            )));
        }
        if split == self.probs.len() {
            return Ok(1.0);
        }
        Ok(self.probs[..split].iter().sum::<f64>().min(1.0))
    }
}

/// Placement strategy: the file split point N0 and the MDS code rate r.
///
/// Files `0..split` form the cached group, the rest are never cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementParams {
    pub split: usize,
    pub code_rate: f64,
}

impl PlacementParams {
    pub fn new(split: usize, code_rate: f64) -> Result<Self> {
        if split == 0 {
            return Err(Error::invalid("split point N0 must be at least 1"));
        }
        if !(code_rate > 0.0 && code_rate <= 1.0) {
            return Err(Error::invalid(format!(
                "code rate must lie in (0, 1] (got {code_rate})"
            )));
        }
        Ok(PlacementParams { split, code_rate })
    }

    /// Checks the parameters against a configuration (`N0 <= N`).
    pub fn validate_for(&self, config: &SystemConfig) -> Result<()> {
        PlacementParams::new(self.split, self.code_rate)?;
        if self.split > config.files {
            return Err(Error::invalid(format!(
                "split point N0 = {} exceeds N = {}",
                self.split, config.files
            )));
        }
        Ok(())
    }
}

/// Binomial coefficient as a float; zero when `k` is outside `[0, n]`.
///
/// Exact integer arithmetic is used while it fits in 128 bits (covers every
/// `n <= 120`), after which the multiplicative recurrence continues in f64.
pub fn binom(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return 0.0;
    }
    let k = (k as u64).min(n - k as u64);
    let mut exact: u128 = 1;
    for i in 1..=k {
        let factor = (n - k + i) as u128;
        match exact.checked_mul(factor) {
            // C(n-k+i-1, i-1) * (n-k+i) is divisible by i.
            Some(v) => exact = v / i as u128,
            None => {
                let mut approx = exact as f64;
                for j in i..=k {
                    approx *= (n - k + j) as f64 / j as f64;
                }
                return approx;
            }
        }
    }
    exact as f64
}

/// Full Binomial(trials, success) pmf over `0..=trials`.
///
/// Terms follow `t(k+1) = t(k) * (trials-k)/(k+1) * success/(1-success)`
/// seeded at `t(0) = (1-success)^trials`; the degenerate `success` values 0
/// and 1 are handled directly.
pub fn binomial_pmf(trials: usize, success: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; trials + 1];
    if success <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if success >= 1.0 {
        pmf[trials] = 1.0;
        return pmf;
    }
    let odds = success / (1.0 - success);
    let mut term = (1.0 - success).powi(trials as i32);
    for (k, slot) in pmf.iter_mut().enumerate() {
        *slot = term;
        term *= (trials - k) as f64 / (k + 1) as f64 * odds;
    }
    pmf
}

/// Pr{k1 = k} for `k1 ~ Binomial(faps, p0)`.
pub fn group_size_pmf(faps: usize, p0: f64, k: usize) -> Result<f64> {
    if k > faps {
        return Err(Error::invalid(format!("group size k = {k} exceeds K = {faps}")));
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::invalid(format!("p0 must lie in [0, 1] (got {p0})")));
    }
    Ok(binomial_pmf(faps, p0)[k])
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zipf_special_cases() {
        let uniform = PopularityDist::zipf(4, 0.0).unwrap();
        assert_eq!(uniform.probs(), &[0.25; 4]);

        let harmonic = PopularityDist::zipf(3, 1.0).unwrap();
        for (got, want) in harmonic.probs().iter().zip([6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0]) {
            assert!(close(*got, want, 1e-15), "{got} vs {want}");
        }
    }

    #[test]
    fn zipf_head_matches_extended_precision() {
        // 50-digit direct summation.
        let dist = PopularityDist::zipf(100, 0.8).unwrap();
        assert!(close(dist.probs()[0], 0.122_934_146_556_582_81, 1e-15));
        assert!(close(dist.cached_mass(12).unwrap(), 0.473_167_363_427_054_81, 1e-14));
    }

    #[test]
    fn zipf_rejects_empty_library() {
        assert!(matches!(PopularityDist::zipf(0, 1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn cached_mass_edges() {
        let dist = PopularityDist::zipf(37, 1.3).unwrap();
        assert_eq!(dist.cached_mass(37).unwrap(), 1.0);
        assert!(dist.cached_mass(0).is_err());
        assert!(dist.cached_mass(38).is_err());
        let uniform = PopularityDist::uniform(4).unwrap();
        assert_eq!(uniform.cached_mass(2).unwrap(), 0.5);
    }

    #[test]
    fn pmf_values() {
        assert_eq!(group_size_pmf(7, 1.0, 7).unwrap(), 1.0);
        assert_eq!(group_size_pmf(7, 0.0, 0).unwrap(), 1.0);
        assert_eq!(group_size_pmf(2, 0.5, 1).unwrap(), 0.5);
        assert!(group_size_pmf(2, 0.5, 3).is_err());

        // log-domain binomial in 50-digit precision, p0 = mass of 20 Zipf(0.8) heads
        let p0 = PopularityDist::zipf(100, 0.8).unwrap().cached_mass(20).unwrap();
        assert!(close(p0, 0.579_080_478_686_398_41, 1e-14));
        assert!(close(
            group_size_pmf(15, p0, 10).unwrap(),
            0.168_244_129_196_543_30,
            1e-13
        ));
    }

    #[test]
    fn binom_values() {
        assert_eq!(binom(5, 2), 10.0);
        assert_eq!(binom(9, 0), 1.0);
        assert_eq!(binom(4, 5), 0.0);
        assert_eq!(binom(4, -1), 0.0);
    }

    #[test]
    fn binom_matches_pascal_triangle() {
        let mut row: Vec<u128> = vec![1];
        for n in 1..=120u64 {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
            for (k, exact) in row.iter().enumerate() {
                assert_eq!(binom(n, k as i64), *exact as f64, "C({n},{k})");
            }
        }
        assert_eq!(binom(30, 15), 155_117_520.0);
    }

    #[test]
    fn binom_float_tail_is_accurate() {
        // C(200, 100) = 9.054851465610328e58
        let rel = (binom(200, 100) / 9.054_851_465_610_328e58 - 1.0).abs();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn popularity_file_is_sorted_and_validated() {
        let text = "# head\n0.2\n0.5  # trailing\n\n0.3\n";
        let dist = PopularityDist::parse(text, Path::new("p.txt")).unwrap();
        assert_eq!(dist.probs(), &[0.5, 0.3, 0.2]);

        let err = PopularityDist::parse("0.5\nabc\n", Path::new("p.txt")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(PopularityDist::parse("0.5\n0.4\n", Path::new("p.txt")).is_err());
        assert!(PopularityDist::parse("1.5\n-0.5\n", Path::new("p.txt")).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::default().validate().is_ok());
        let bad = SystemConfig {
            cache_size: 101,
            ..SystemConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SystemConfig {
            alpha: -0.1,
            ..SystemConfig::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(rate_grid(4), vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn placement_params_bounds() {
        assert!(PlacementParams::new(0, 0.5).is_err());
        assert!(PlacementParams::new(3, 0.0).is_err());
        assert!(PlacementParams::new(3, 1.01).is_err());
        let cfg = SystemConfig {
            files: 10,
            cache_size: 2,
            ..SystemConfig::default()
        };
        assert!(PlacementParams::new(11, 1.0).unwrap().validate_for(&cfg).is_err());
        assert!(PlacementParams::new(10, 1.0).unwrap().validate_for(&cfg).is_ok());
    }
}
