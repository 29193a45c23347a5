//! Command-line front end.
//!
//! ```text
//! fogcache analyze  [system flags] --N0 <n> --r <rate> [--out breakdown.csv]
//! fogcache optimize [system flags] [--out grid.csv]
//! fogcache simulate [system flags] [--N0 <n> --r <rate>] [--trials 2000] [--seed 0] [--out trials.csv]
//! fogcache sweep    [system flags] --axis r|alpha|K|M [--grid ...] [--schemes ...] [--out sweep.csv]
//! ```
//!
//! System flags are `--K --N --M --alpha --L --F-symbols`, plus `--config`
//! (a TOML file with the same keys) and `--popularity` (one probability per
//! line). Flags override the file, the file overrides the defaults.
//!
//! Exit status: 0 on success, 1 for invalid arguments, 2 for instances that
//! are valid but exceed a size cap.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analytic::{average_rate, decentralized_rate, lfu_rate, rlfu_rate};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{rate_grid, PlacementParams, PopularityDist, SystemConfig};
use crate::optimizer::{optimize, sweep_rate_curve};
use crate::sim::{monte_carlo, write_trials_csv};

#[derive(Debug, Parser)]
#[command(
    name = "fogcache",
    version,
    about = "Fronthaul rate of MDS-coded group caching in F-RANs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average rate and per-k breakdown at a fixed (N0, r).
    Analyze {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "N0")]
        split: usize,
        #[arg(long = "r")]
        code_rate: f64,
        /// CSV of the breakdown: k,pmf,cached_rate,uncached_rate.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search over (N0, r).
    Optimize {
        #[command(flatten)]
        system: SystemArgs,
        /// CSV of every grid point: N0,r,rate.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo over random placements and demands.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        /// Defaults to the optimized split point.
        #[arg(long = "N0", requires = "code_rate")]
        split: Option<usize>,
        #[arg(long = "r", requires = "split")]
        code_rate: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-trial CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate of each scheme along one parameter axis.
    Sweep {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values or start:stop:step. Defaults depend on the axis.
        #[arg(long)]
        grid: Option<String>,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "proposed,lfu,decentralized,rlfu"
        )]
        schemes: Vec<Scheme>,
        /// Also simulate the proposed scheme at each point with this many trials.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sweep CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct SystemArgs {
    /// TOML file with any of K, N, M, alpha, L, F_symbols, popularity.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Popularity file, one probability per line; replaces the Zipf law.
    #[arg(long)]
    pub popularity: Option<PathBuf>,
    #[arg(long = "K")]
    pub faps: Option<usize>,
    #[arg(long = "N")]
    pub files: Option<usize>,
    #[arg(long = "M")]
    pub cache_size: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "L")]
    pub rate_levels: Option<usize>,
    #[arg(long = "F-symbols")]
    pub file_symbols: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "r")]
    Rate,
    Alpha,
    #[value(name = "K")]
    Faps,
    #[value(name = "M")]
    Cache,
}

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::Rate => "r",
            Axis::Alpha => "alpha",
            Axis::Faps => "K",
            Axis::Cache => "M",
        }
    }

    fn default_grid(self) -> Vec<f64> {
        match self {
            Axis::Rate => rate_grid(10),
            Axis::Alpha => vec![0.5, 0.8, 1.1, 1.4, 1.7, 2.0],
            Axis::Faps => vec![5.0, 10.0, 15.0, 20.0, 25.0],
            Axis::Cache => vec![4.0, 8.0, 12.0, 16.0, 20.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Proposed,
    Lfu,
    Decentralized,
    Rlfu,
}

impl Scheme {
    fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Lfu => "lfu",
            Scheme::Decentralized => "decentralized",
            Scheme::Rlfu => "rlfu",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(rename = "K")]
    faps: Option<usize>,
    #[serde(rename = "N")]
    files: Option<usize>,
    #[serde(rename = "M")]
    cache_size: Option<usize>,
    alpha: Option<f64>,
    #[serde(rename = "L")]
    rate_levels: Option<usize>,
    #[serde(rename = "F_symbols")]
    file_symbols: Option<usize>,
    /// Relative to the config file.
    popularity: Option<PathBuf>,
}

/// A resolved system: configuration plus the popularity law, which is either
/// Zipf(alpha) or loaded from a file.
struct System {
    config: SystemConfig,
    custom: Option<PopularityDist>,
    exec: Execution,
}

impl System {
    fn resolve(args: &SystemArgs) -> Result<System> {
        let file = match &args.config {
            Some(path) => load_config(path)?,
            None => ConfigFile::default(),
        };
        let popularity = match (&args.popularity, &file.popularity, &args.config) {
            (Some(path), _, _) => Some(path.clone()),
            (None, Some(rel), Some(cfg)) => Some(cfg.parent().unwrap_or(Path::new("")).join(rel)),
            _ => None,
        };
        let custom = popularity.map(|p| PopularityDist::load(&p)).transpose()?;

        let defaults = SystemConfig::default();
        let files = args
            .files
            .or(file.files)
            .or(custom.as_ref().map(PopularityDist::files))
            .unwrap_or(defaults.files);
        let config = SystemConfig {
            faps: args.faps.or(file.faps).unwrap_or(defaults.faps),
            files,
            cache_size: args.cache_size.or(file.cache_size).unwrap_or(defaults.cache_size),
            file_symbols: args.file_symbols.or(file.file_symbols).unwrap_or(defaults.file_symbols),
            alpha: args.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            rate_levels: args.rate_levels.or(file.rate_levels).unwrap_or(defaults.rate_levels),
        };
        config.validate()?;
        if let Some(dist) = &custom {
            if dist.files() != config.files {
                return Err(Error::invalid(format!(
                    "popularity file has {} entries but N = {}",
                    dist.files(),
                    config.files
                )));
            }
        }
        let exec = if args.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        };
        Ok(System { config, custom, exec })
    }

    fn dist(&self, config: &SystemConfig) -> Result<PopularityDist> {
        match &self.custom {
            Some(dist) => Ok(dist.clone()),
            None => PopularityDist::zipf(config.files, config.alpha),
        }
    }
}

fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.into(),
        line: e.span().map(|s| text[..s.start].lines().count().max(1)).unwrap_or(0),
        message: e.message().to_string(),
    })
}

/// Parses `a,b,c` or `start:stop:step` (inclusive of `stop` up to rounding).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::invalid(format!("bad grid value {s:?}")))
    };
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!(
                "range grid must be start:stop:step, got {text:?}"
            )));
        }
        let (start, stop, step) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
        if step <= 0.0 || stop < start {
            return Err(Error::invalid(format!("empty or unbounded range {text:?}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // Snap to 12 decimals so 0.1:1:0.1 yields 0.3 and 0.7, not their neighbours.
        (0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        text.split(',').map(number).collect::<Result<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(Error::invalid("grid is empty"));
    }
    Ok(values)
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TooLarge { .. } => 2,
        _ => 1,
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Analyze {
            system,
            split,
            code_rate,
            out: path,
        } => {
            let sys = System::resolve(&system)?;
            let dist = sys.dist(&sys.config)?;
            let b = average_rate(&sys.config, &dist, PlacementParams::new(split, code_rate)?)?;
            let cfg = sys.config;
            report(out, |w| {
                writeln!(
                    w,
                    "K = {}, N = {}, M = {}, alpha = {}",
                    cfg.faps, cfg.files, cfg.cache_size, cfg.alpha
                )?;
                writeln!(w, "N0 = {split}, r = {code_rate}")?;
                writeln!(w, "cached mass p0 = {}", b.cached_mass)?;
                writeln!(w, "average rate = {}", b.average)?;
                writeln!(w, "k\tpmf\tcached_rate\tuncached_rate")?;
                for k in 0..b.pmf.len() {
                    writeln!(w, "{k}\t{}\t{}\t{}", b.pmf[k], b.cached[k], b.uncached[k])?;
                }
                Ok(())
            })?;
            if let Some(path) = path {
                let mut csv = csv_writer(&path)?;
                csv.write_record(["k", "pmf", "cached_rate", "uncached_rate"])?;
                for k in 0..b.pmf.len() {
                    csv.write_record([
                        k.to_string(),
                        b.pmf[k].to_string(),
                        b.cached[k].to_string(),
                        b.uncached[k].to_string(),
                    ])?;
                }
                flush_csv(csv, &path)?;
            }
        }
        Command::Optimize { system, out: path } => {
            let sys = System::resolve(&system)?;
            let dist = sys.dist(&sys.config)?;
            let res = optimize(&sys.config, &dist, sys.exec)?;
            let best = res.best;
            report(out, |w| {
                writeln!(w, "N0* = {}", best.split)?;
                writeln!(w, "r* = {}", best.code_rate)?;
                writeln!(w, "rate = {}", best.rate)?;
                writeln!(w, "grid points = {}", res.grid.len())
            })?;
            if let Some(path) = path {
                let mut csv = csv_writer(&path)?;
                csv.write_record(["N0", "r", "rate"])?;
                for g in &res.grid {
                    csv.write_record([g.split.to_string(), g.code_rate.to_string(), g.rate.to_string()])?;
                }
                flush_csv(csv, &path)?;
            }
        }
        Command::Simulate {
            system,
            split,
            code_rate,
            trials,
            seed,
            out: path,
        } => {
            let sys = System::resolve(&system)?;
            let dist = sys.dist(&sys.config)?;
            let params = match (split, code_rate) {
                (Some(split), Some(rate)) => PlacementParams::new(split, rate)?,
                _ => optimize(&sys.config, &dist, sys.exec)?.params(),
            };
            let analytic = average_rate(&sys.config, &dist, params)?.average;
            let s = monte_carlo(&sys.config, &dist, params, trials, seed, sys.exec)?;
            let relative = if analytic == 0.0 {
                0.0
            } else {
                (s.mean_rate - analytic) / analytic
            };
            let mut csv = csv::Writer::from_writer(Vec::new());
            csv.write_record([
                "N0",
                "r",
                "trials",
                "seed",
                "F_symbols",
                "simulated_rate",
                "std_rate",
                "analytic_rate",
                "relative_error",
                "patch_fraction",
                "decode_successes",
            ])?;
            csv.write_record([
                params.split.to_string(),
                params.code_rate.to_string(),
                trials.to_string(),
                seed.to_string(),
                sys.config.file_symbols.to_string(),
                s.mean_rate.to_string(),
                s.std_rate.to_string(),
                analytic.to_string(),
                relative.to_string(),
                s.patch_fraction.to_string(),
                s.decode_successes.to_string(),
            ])?;
            let summary = csv.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
            report(out, |w| w.write_all(&summary))?;
            if let Some(path) = path {
                let file = File::create(&path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                write_trials_csv(io::BufWriter::new(file), &s.results)?;
            }
        }
        Command::Sweep {
            system,
            axis,
            grid,
            schemes,
            trials,
            seed,
            out: path,
        } => {
            let sys = System::resolve(&system)?;
            let grid = match grid {
                Some(text) => parse_grid(&text)?,
                None => axis.default_grid(),
            };
            if schemes.is_empty() {
                return Err(Error::invalid("no schemes requested"));
            }
            if trials == Some(0) {
                return Err(Error::invalid("at least one trial is required"));
            }
            if axis == Axis::Alpha && sys.custom.is_some() {
                return Err(Error::invalid(
                    "an alpha sweep needs the Zipf law, not a popularity file",
                ));
            }
            if axis == Axis::Rate {
                let _ = writeln!(err, "note: N0 is re-optimized at every r");
            }
            let rows = sweep(&sys, axis, &grid, &schemes, trials.map(|t| (t, seed)))?;
            let mut buf = csv::Writer::from_writer(Vec::new());
            buf.write_record(["axis_name", "axis_value", "scheme", "rate", "N0_used", "r_used"])?;
            for row in &rows {
                buf.write_record([
                    axis.name().to_string(),
                    row.value.to_string(),
                    row.scheme.to_string(),
                    row.rate.to_string(),
                    row.split.to_string(),
                    row.code_rate.to_string(),
                ])?;
            }
            let bytes = buf.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
            match path {
                Some(path) => std::fs::write(&path, &bytes).map_err(|source| Error::Io { path, source })?,
                None => report(out, |w| w.write_all(&bytes))?,
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
struct SweepRow {
    value: f64,
    scheme: &'static str,
    rate: f64,
    split: usize,
    code_rate: f64,
}

fn sweep(
    sys: &System,
    axis: Axis,
    grid: &[f64],
    schemes: &[Scheme],
    simulate: Option<(usize, u64)>,
) -> Result<Vec<SweepRow>> {
    let base = sys.config;
    let mut rows = Vec::new();
    let curve = if axis == Axis::Rate && schemes.contains(&Scheme::Proposed) {
        Some(sweep_rate_curve(&base, &sys.dist(&base)?, grid, sys.exec)?)
    } else {
        None
    };
    for (i, &value) in grid.iter().enumerate() {
        let config = match axis {
            Axis::Rate => base,
            Axis::Alpha => SystemConfig { alpha: value, ..base },
            Axis::Faps => SystemConfig {
                faps: whole(value, "K")?,
                ..base
            },
            Axis::Cache => SystemConfig {
                cache_size: whole(value, "M")?,
                ..base
            },
        };
        config.validate()?;
        let dist = sys.dist(&config)?;
        let mut proposed = None;
        for &scheme in schemes {
            let (rate, split, code_rate) = match scheme {
                Scheme::Proposed => {
                    let best = match &curve {
                        Some(curve) => curve[i],
                        None => optimize(&config, &dist, sys.exec)?.best,
                    };
                    proposed = Some(PlacementParams::new(best.split, best.code_rate)?);
                    (best.rate, best.split, best.code_rate)
                }
                Scheme::Lfu => (lfu_rate(&config, &dist)?, config.cache_size, 1.0),
                Scheme::Decentralized => (decentralized_rate(&config, &dist)?, config.files, 1.0),
                Scheme::Rlfu => {
                    let (rate, split) = rlfu_rate(&config, &dist)?;
                    (rate, split, 1.0)
                }
            };
            rows.push(SweepRow {
                value,
                scheme: scheme.name(),
                rate,
                split,
                code_rate,
            });
        }
        if let (Some((trials, seed)), Some(params)) = (simulate, proposed) {
            let s = monte_carlo(&config, &dist, params, trials, seed, sys.exec)?;
            rows.push(SweepRow {
                value,
                scheme: "proposed_simulated",
                rate: s.mean_rate,
                split: params.split,
                code_rate: params.code_rate,
            });
        }
    }
    Ok(rows)
}

fn whole(value: f64, name: &str) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(Error::invalid(format!(
            "{name} grid values must be whole numbers, got {value}"
        )))
    }
}

fn report(out: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    body(out).map_err(|source| Error::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    Ok(csv::Writer::from_writer(file))
}

fn flush_csv(mut csv: csv::Writer<File>, path: &Path) -> Result<()> {
    csv.flush().map_err(|source| Error::Io {
        path: path.into(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("fogcache").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("0.1:1.0:0.1").unwrap(), rate_grid(10));
        assert_eq!(parse_grid("5, 10,15").unwrap(), vec![5.0, 10.0, 15.0]);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn analyze_degenerate_split() {
        let (code, out, _) = run_str(&["analyze", "--N0", "12", "--r", "1"]);
        assert_eq!(code, 0);
        let p0 = PopularityDist::zipf(100, 0.8).unwrap().cached_mass(12).unwrap();
        assert!(out.contains(&format!("average rate = {}", 15.0 * (1.0 - p0))), "{out}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["--help"]).0, 0);
        assert_eq!(run_str(&["--version"]).0, 0);
        assert_eq!(run_str(&[]).0, 1);
        assert_eq!(run_str(&["analyze", "--N0", "12"]).0, 1);
        assert_eq!(run_str(&["analyze", "--N0", "12", "--r", "1.5"]).0, 1);
        assert_eq!(
            run_str(&["sweep", "--axis", "K", "--grid", "2.5", "--schemes", "lfu"]).0,
            1
        );
        let (code, _, err) = run_str(&["simulate", "--K", "70", "--N0", "20", "--r", "0.5", "--trials", "1"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn sweep_rows_are_scheme_major_within_each_point() {
        let (code, out, err) = run_str(&["sweep", "--axis", "M", "--grid", "8,12", "--schemes", "lfu,rlfu"]);
        assert_eq!(code, 0, "{err}");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "axis_name,axis_value,scheme,rate,N0_used,r_used");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("M,8,lfu,"));
        assert!(lines[1].ends_with(",8,1"));
        assert!(lines[4].starts_with("M,12,rlfu,"));
    }
}
