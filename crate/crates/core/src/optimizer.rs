//! Exhaustive search over the split point `N0 in [M, N]` and the code rate
//! grid `{1/L, ..., 1}`.
//!
//! Split points below `M` are never visited: with `N0 <= M` the cached group
//! is stored whole and the rate `K (1 - p0)` only falls as `N0` grows, so
//! `N0 = M` dominates them.

use crate::analytic::average_rate;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{PlacementParams, PopularityDist, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub split: usize,
    pub code_rate: f64,
    pub rate: f64,
}

impl GridPoint {
    /// Lower rate wins; ties go to the larger code rate, then the smaller
    /// split point.
    fn beats(&self, other: &GridPoint) -> bool {
        if self.rate != other.rate {
            return self.rate < other.rate;
        }
        if self.code_rate != other.code_rate {
            return self.code_rate > other.code_rate;
        }
        self.split < other.split
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best: GridPoint,
    /// Every evaluated point, split-major then by code rate.
    pub grid: Vec<GridPoint>,
}

impl OptimizationResult {
    pub fn params(&self) -> PlacementParams {
        PlacementParams {
            split: self.best.split,
            code_rate: self.best.code_rate,
        }
    }
}

/// Optimizes over the configuration's own rate grid.
pub fn optimize(config: &SystemConfig, dist: &PopularityDist, exec: Execution) -> Result<OptimizationResult> {
    optimize_over(config, dist, &config.rate_grid(), exec)
}

/// Optimizes over an explicit set of code rates.
pub fn optimize_over(
    config: &SystemConfig,
    dist: &PopularityDist,
    rates: &[f64],
    exec: Execution,
) -> Result<OptimizationResult> {
    config.validate()?;
    check_rates(rates)?;
    let points: Vec<(usize, f64)> = (config.cache_size..=config.files)
        .flat_map(|split| rates.iter().map(move |&r| (split, r)))
        .collect();
    let grid = exec
        .map(&points, |&(split, code_rate)| {
            let rate = average_rate(config, dist, PlacementParams::new(split, code_rate)?)?.average;
            Ok(GridPoint { split, code_rate, rate })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let best = *grid
        .iter()
        .reduce(|a, b| if b.beats(a) { b } else { a })
        .ok_or_else(|| Error::Internal("empty optimization grid".into()))?;
    Ok(OptimizationResult { best, grid })
}

/// For each code rate, the best split point in `[M, N]` and its rate.
/// Ties keep the smaller split.
pub fn sweep_rate_curve(
    config: &SystemConfig,
    dist: &PopularityDist,
    rates: &[f64],
    exec: Execution,
) -> Result<Vec<GridPoint>> {
    config.validate()?;
    check_rates(rates)?;
    exec.map(rates, |&code_rate| {
        let mut best: Option<GridPoint> = None;
        for split in config.cache_size..=config.files {
            let rate = average_rate(config, dist, PlacementParams::new(split, code_rate)?)?.average;
            if best.is_none_or(|b| rate < b.rate) {
                best = Some(GridPoint { split, code_rate, rate });
            }
        }
        best.ok_or_else(|| Error::Internal("empty split range".into()))
    })
    .into_iter()
    .collect()
}

fn check_rates(rates: &[f64]) -> Result<()> {
    if rates.is_empty() {
        return Err(Error::invalid("code-rate grid is empty"));
    }
    if let Some(bad) = rates.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(Error::invalid(format!("code rate {bad} outside (0, 1]")));
    }
    Ok(())
}
