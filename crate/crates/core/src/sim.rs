//! Symbol-level Monte Carlo of placement and delivery.
//!
//! MDS codes are virtual here: the coded version of a file is the index set
//! `0..ceil(F/r)` and an F-AP can decode once it holds `F` distinct indices
//! of its requested file. Caches hold uniformly random index subsets; the
//! delivery schedule uses expected class sizes like the analysis does, but
//! caps every message by the symbols that actually exist, so finite-size
//! deviations show up as explicit patch traffic.

use std::borrow::Cow;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::hash::{BuildHasherDefault, Hasher};
use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{binom, PlacementParams, PopularityDist, SystemConfig};

/// Cached-group requesters are tracked as bits of a `u64`.
pub const MAX_SIM_FAPS: usize = 64;

const PLACEMENT_STREAM: u64 = 0x706c_6163;
const DEMAND_STREAM: u64 = 0x6465_6d64;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of substream `stream` under `seed`: `splitmix64(seed + splitmix64(stream))`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(stream)))
}

/// Symbol counts for one placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolLayout {
    /// F: symbols needed to decode a file.
    pub file_symbols: u32,
    /// ceil(F / r): length of a coded file.
    pub coded_symbols: u32,
    /// floor(M F / N0): coded symbols of each cached-group file per cache.
    pub cached_per_file: u32,
}

impl SymbolLayout {
    pub fn new(config: &SystemConfig, params: PlacementParams) -> Result<Self> {
        config.validate()?;
        params.validate_for(config)?;
        let f = config.file_symbols as u64;
        let exact = f as f64 / params.code_rate;
        // Shave representation error so e.g. 10^5 / 0.1 does not round up.
        let coded = ((exact * (1.0 - 1e-12)).ceil() as u64).max(f);
        let cached = config.cache_size as u64 * f / params.split as u64;
        if coded > u32::MAX as u64 {
            return Err(Error::TooLarge {
                what: "coded file length in symbols",
                needed: coded as u128,
                cap: u32::MAX as u128,
            });
        }
        if cached == 0 {
            return Err(Error::invalid(format!(
                "cache quota floor(M F / N0) is zero; F_symbols = {f} is too small"
            )));
        }
        if cached > coded {
            return Err(Error::invalid(format!(
                "over-caching: quota {cached} exceeds coded length {coded} (N0 < M r)"
            )));
        }
        Ok(SymbolLayout {
            file_symbols: f as u32,
            coded_symbols: coded as u32,
            cached_per_file: cached as u32,
        })
    }
}

/// Uniform `amount`-subset of `0..length`, ascending (Floyd's algorithm over
/// a bitset).
fn sample_sorted(rng: &mut impl Rng, length: u32, amount: u32) -> Vec<u32> {
    let mut words = vec![0u64; (length as usize).div_ceil(64)];
    for j in length - amount..length {
        let t = rng.random_range(0..=j);
        let pick = if words[(t >> 6) as usize] & (1 << (t & 63)) != 0 {
            j
        } else {
            t
        };
        words[(pick >> 6) as usize] |= 1 << (pick & 63);
    }
    let mut out = Vec::with_capacity(amount as usize);
    for (w, &word) in words.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            out.push((w as u32) << 6 | bits.trailing_zeros());
            bits &= bits - 1;
        }
    }
    out
}

/// Read access to cache contents. Symbol lists are sorted ascending.
pub trait CacheView {
    fn layout(&self) -> SymbolLayout;
    fn faps(&self) -> usize;
    fn split(&self) -> usize;
    fn cached_symbols(&self, fap: usize, file: usize) -> Cow<'_, [u32]>;
}

/// A placement drawn on demand: the set for `(fap, file)` comes from its own
/// RNG substream, so any subset of pairs can be generated in any order and
/// agrees with [`Placement::materialize`].
#[derive(Debug, Clone)]
pub struct Placement {
    layout: SymbolLayout,
    faps: usize,
    split: usize,
    seed: u64,
}

impl Placement {
    pub fn new(config: &SystemConfig, params: PlacementParams, seed: u64) -> Result<Self> {
        Ok(Placement {
            layout: SymbolLayout::new(config, params)?,
            faps: config.faps,
            split: params.split,
            seed,
        })
    }

    fn draw(&self, fap: usize, file: usize) -> Vec<u32> {
        let stream = derive_seed(derive_seed(self.seed, fap as u64), file as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        sample_sorted(&mut rng, self.layout.coded_symbols, self.layout.cached_per_file)
    }

    pub fn materialize(&self) -> CacheContents {
        let sets = (0..self.faps)
            .flat_map(|fap| (0..self.split).map(move |file| (fap, file)))
            .map(|(fap, file)| self.draw(fap, file))
            .collect();
        CacheContents {
            layout: self.layout,
            faps: self.faps,
            split: self.split,
            sets,
        }
    }
}

impl CacheView for Placement {
    fn layout(&self) -> SymbolLayout {
        self.layout
    }
    fn faps(&self) -> usize {
        self.faps
    }
    fn split(&self) -> usize {
        self.split
    }
    fn cached_symbols(&self, fap: usize, file: usize) -> Cow<'_, [u32]> {
        if file >= self.split || fap >= self.faps {
            return Cow::Borrowed(&[]);
        }
        Cow::Owned(self.draw(fap, file))
    }
}

/// Fully materialized caches, one sorted symbol set per (F-AP, cached file).
#[derive(Debug, Clone, PartialEq)]
pub struct CacheContents {
    layout: SymbolLayout,
    faps: usize,
    split: usize,
    sets: Vec<Vec<u32>>,
}

impl CacheView for CacheContents {
    fn layout(&self) -> SymbolLayout {
        self.layout
    }
    fn faps(&self) -> usize {
        self.faps
    }
    fn split(&self) -> usize {
        self.split
    }
    fn cached_symbols(&self, fap: usize, file: usize) -> Cow<'_, [u32]> {
        if file >= self.split || fap >= self.faps {
            return Cow::Borrowed(&[]);
        }
        Cow::Borrowed(&self.sets[fap * self.split + file])
    }
}

/// Fills every cache: each F-AP independently stores a uniformly random
/// `floor(M F / N0)`-subset of each cached-group coded file.
pub fn place(config: &SystemConfig, params: PlacementParams, seed: u64) -> Result<CacheContents> {
    Ok(Placement::new(config, params, seed)?.materialize())
}

/// `faps` independent requests (0-based file indices) drawn from `dist`.
pub fn draw_demands(dist: &PopularityDist, faps: usize, seed: u64) -> Result<Vec<usize>> {
    let weights =
        WeightedIndex::new(dist.probs()).map_err(|e| Error::invalid(format!("popularity cannot be sampled: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..faps).map(|_| weights.sample(&mut rng)).collect())
}

/// Splits F-APs into those requesting a cached-group file (`file < split`)
/// and the rest.
pub fn partition_groups(demand: &[usize], split: usize) -> (Vec<usize>, Vec<usize>) {
    (0..demand.len()).partition(|&fap| demand[fap] < split)
}

#[derive(Default, Clone, Copy)]
struct MixHasher(u64);

impl Hasher for MixHasher {
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }
    fn write_u64(&mut self, n: u64) {
        self.0 = (self.0.rotate_left(5) ^ n).wrapping_mul(0x517c_c1b7_2722_0a95);
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

type SignatureMap<V> = HashMap<u64, V, BuildHasherDefault<MixHasher>>;

/// How the symbols of one coded file are spread over a set of caches.
///
/// The signature of a symbol is the bitmask of member positions whose cache
/// holds it; symbols with equal signatures form one class.
#[derive(Debug, Clone)]
pub struct SignatureClasses {
    coded_symbols: u32,
    /// Nonempty classes, ascending by signature.
    counts: Vec<(u64, u32)>,
}

impl SignatureClasses {
    /// `members[b]` is the F-AP behind signature bit `b`.
    pub fn build(cache: &impl CacheView, members: &[usize], file: usize) -> Result<Self> {
        if members.len() > MAX_SIM_FAPS {
            return Err(Error::TooLarge {
                what: "cached-group requesters",
                needed: members.len() as u128,
                cap: MAX_SIM_FAPS as u128,
            });
        }
        let coded_symbols = cache.layout().coded_symbols;
        let mut signatures = vec![0u64; coded_symbols as usize];
        for (bit, &fap) in members.iter().enumerate() {
            for &symbol in cache.cached_symbols(fap, file).iter() {
                signatures[symbol as usize] |= 1 << bit;
            }
        }
        let mut tally: SignatureMap<u32> = SignatureMap::default();
        let mut uncovered = 0u32;
        for &signature in &signatures {
            if signature == 0 {
                uncovered += 1;
            } else {
                *tally.entry(signature).or_insert(0) += 1;
            }
        }
        let mut counts: Vec<(u64, u32)> = tally.into_iter().collect();
        if uncovered > 0 {
            counts.push((0, uncovered));
        }
        counts.sort_unstable();
        Ok(SignatureClasses { coded_symbols, counts })
    }

    /// Number of symbols held by exactly the members in `signature`.
    pub fn size(&self, signature: u64) -> u32 {
        self.counts
            .binary_search_by_key(&signature, |&(s, _)| s)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    /// Nonempty classes in signature order.
    pub fn classes(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.counts.iter().copied()
    }

    pub fn coded_symbols(&self) -> u32 {
        self.coded_symbols
    }
}

/// One coded multicast: the XOR of one subfile per target, each decodable by
/// its receiver from its own cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastMessage {
    /// F-AP indices, ascending.
    pub targets: Vec<usize>,
    pub payload_symbols: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_id: u64,
    pub demand: Vec<usize>,
    /// |K1|, requests that hit the cached group.
    pub k1: usize,
    pub multicast_symbols: u64,
    pub unicast_symbols: u64,
    pub patch_symbols: u64,
    pub decode_ok: Vec<bool>,
    /// Total transmitted symbols over F.
    pub rate_file_units: f64,
}

impl TrialResult {
    pub fn total_symbols(&self) -> u64 {
        self.multicast_symbols + self.unicast_symbols + self.patch_symbols
    }

    pub fn all_decoded(&self) -> bool {
        self.decode_ok.iter().all(|&ok| ok)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub messages: Vec<MulticastMessage>,
    /// Patch traffic: XOR top-ups, then unicast remainders (one target).
    pub repairs: Vec<MulticastMessage>,
    pub trial: TrialResult,
}

/// How many members beyond the exact class a slot may borrow from.
const SUPERSET_LEVELS: usize = 2;

/// Undelivered symbols of one requester's file that it does not cache,
/// grouped by signature over the other requesters.
struct Pool {
    remaining: SignatureMap<u32>,
    total: u64,
}

impl Pool {
    fn new(classes: &SignatureClasses, own_bit: u64) -> Self {
        let mut remaining = SignatureMap::default();
        let mut total = 0;
        for (signature, count) in classes.classes() {
            if signature & own_bit == 0 {
                remaining.insert(signature, count);
                total += count as u64;
            }
        }
        Pool { remaining, total }
    }
}

/// Signatures whose symbols can fill `b`'s slot in a message to `targets`:
/// held by every other target (a superset of `targets - b`) and not by `b`,
/// at most [`SUPERSET_LEVELS`] members beyond the exact class.
fn slot_sources(targets: u64, own_bit: u64, everyone: u64, out: &mut Vec<u64>) {
    out.clear();
    let exact = targets & !own_bit;
    out.push(exact);
    let outside: Vec<u64> = bits(everyone & !targets).into_iter().map(|m| 1u64 << m).collect();
    out.extend(outside.iter().map(|m| exact | m));
    for (i, a) in outside.iter().enumerate() {
        out.extend(outside[i + 1..].iter().map(|b| exact | a | b));
    }
}

/// Serves one demand vector against `cache`.
///
/// Cached-group requesters get XOR multicasts class by class, from the set
/// of all of them down, following the expected-size schedule with the same
/// `threshold` / `ratio` truncation as the analysis (ratio rounded up to
/// whole symbols). A message's payload is the rounded ratio capped by the
/// largest subfile it actually carries. A slot whose exact subfile ran short
/// is filled with symbols that every other target also caches, i.e. from
/// classes up to two members larger, which the receivers can still cancel.
/// Messages that would carry nothing are not emitted.
///
/// Whoever is still short of `F` symbols afterwards is repaired: first by
/// XOR top-ups over the scheduled classes, sized by the second largest
/// remaining need among the targets, then by unicast. All repair traffic is
/// counted as patch symbols. Uncached-group requesters get `F` symbols by
/// unicast.
pub fn deliver(
    cache: &impl CacheView,
    demand: &[usize],
    config: &SystemConfig,
    params: PlacementParams,
) -> Result<Delivery> {
    let layout = SymbolLayout::new(config, params)?;
    if cache.layout() != layout || cache.split() != params.split || cache.faps() != config.faps {
        return Err(Error::invalid(
            "cache contents do not match configuration and placement",
        ));
    }
    if demand.len() != config.faps {
        return Err(Error::invalid(format!(
            "demand has {} entries, expected K = {}",
            demand.len(),
            config.faps
        )));
    }
    if let Some(bad) = demand.iter().find(|&&d| d >= config.files) {
        return Err(Error::invalid(format!(
            "demand for file {bad} outside library of {}",
            config.files
        )));
    }

    let (requesters, unicast_group) = partition_groups(demand, params.split);
    let k = requesters.len();
    let f = layout.file_symbols as u64;
    let cached = layout.cached_per_file as u64;
    let mut files: BTreeMap<usize, SignatureClasses> = BTreeMap::new();
    for &fap in &requesters {
        if let Entry::Vacant(slot) = files.entry(demand[fap]) {
            slot.insert(SignatureClasses::build(cache, &requesters, demand[fap])?);
        }
    }

    let mut messages = Vec::new();
    let mut repairs = Vec::new();
    let mut multicast = 0u64;
    let mut delivered = vec![0u64; k];
    let threshold = f.saturating_sub(cached) as f64;

    if k > 0 && threshold > 0.0 {
        let mut state = Schedule {
            pools: requesters
                .iter()
                .enumerate()
                .map(|(b, &fap)| Pool::new(&files[&demand[fap]], 1 << b))
                .collect(),
            everyone: if k == 64 { u64::MAX } else { (1u64 << k) - 1 },
            delivered: &mut delivered,
            sources: Vec::new(),
            slots: Vec::new(),
        };
        let target_of = |members: &[usize]| members.iter().map(|&b| requesters[b]).collect::<Vec<_>>();

        let coded = layout.coded_symbols as f64;
        let p = cached as f64 / coded;
        let mut sum = 0.0;
        let mut last = 1;
        for j in (1..=k).rev() {
            let length = coded * p.powi(j as i32 - 1) * (1.0 - p).powi((k - j + 1) as i32);
            let per_fap_messages = binom(k as u64 - 1, j as i64 - 1);
            let sum_new = sum + length * per_fap_messages;
            let ratio = if sum_new < threshold {
                length
            } else {
                (threshold - sum) / per_fap_messages
            };
            let ratio_symbols = (ratio - 1e-9).ceil().max(0.0) as u64;
            if ratio_symbols > 0 {
                for targets in level_targets(&state.pools, j) {
                    let members = bits(targets);
                    state.fill_slots(targets, &members, None);
                    let payload = ratio_symbols.min(state.slots.iter().copied().max().unwrap_or(0));
                    if payload > 0 {
                        state.send(targets, &members, payload);
                        multicast += payload;
                        messages.push(MulticastMessage {
                            targets: target_of(&members),
                            payload_symbols: payload,
                        });
                    }
                }
            }
            last = j;
            if sum_new >= threshold {
                break;
            }
            sum = sum_new;
        }

        // Repair: XOR top-ups over the classes already scheduled, each sized
        // so that at least two targets use every symbol.
        let need = f - cached;
        if state.delivered.iter().any(|&d| d < need) {
            for j in (last.max(2)..=k).rev() {
                for targets in level_targets(&state.pools, j) {
                    let members = bits(targets);
                    if members.iter().filter(|&&b| state.delivered[b] < need).count() < 2 {
                        continue;
                    }
                    state.fill_slots(targets, &members, Some(need));
                    let mut useful = state.slots.clone();
                    useful.sort_unstable_by(|a, b| b.cmp(a));
                    let payload = useful[1];
                    if payload > 0 {
                        state.send(targets, &members, payload);
                        repairs.push(MulticastMessage {
                            targets: target_of(&members),
                            payload_symbols: payload,
                        });
                    }
                }
            }
        }
    }

    let mut decode_ok = vec![false; config.faps];
    let mut patch: u64 = repairs.iter().map(|m| m.payload_symbols).sum();
    for (b, &fap) in requesters.iter().enumerate() {
        let short = f.saturating_sub(cached + delivered[b]);
        if short > 0 {
            patch += short;
            repairs.push(MulticastMessage {
                targets: vec![fap],
                payload_symbols: short,
            });
        }
        decode_ok[fap] = cached + delivered[b] + short >= f;
    }
    let unicast = unicast_group.len() as u64 * f;
    for &fap in &unicast_group {
        decode_ok[fap] = true;
    }

    let total = multicast + unicast + patch;
    Ok(Delivery {
        messages,
        repairs,
        trial: TrialResult {
            trial_id: 0,
            demand: demand.to_vec(),
            k1: k,
            multicast_symbols: multicast,
            unicast_symbols: unicast,
            patch_symbols: patch,
            decode_ok,
            rate_file_units: total as f64 / f as f64,
        },
    })
}

/// Mutable state of one delivery: what each requester still lacks and how
/// much it has received.
struct Schedule<'a> {
    pools: Vec<Pool>,
    everyone: u64,
    delivered: &'a mut [u64],
    sources: Vec<u64>,
    /// Per-member symbols available for the message being built.
    slots: Vec<u64>,
}

impl Schedule<'_> {
    fn fill_slots(&mut self, targets: u64, members: &[usize], need: Option<u64>) {
        self.slots.clear();
        for &b in members {
            let pool = &self.pools[b];
            let mut avail = if members.len() == 1 {
                pool.total
            } else {
                slot_sources(targets, 1 << b, self.everyone, &mut self.sources);
                self.sources
                    .iter()
                    .map(|s| pool.remaining.get(s).copied().unwrap_or(0) as u64)
                    .sum()
            };
            if let Some(need) = need {
                avail = avail.min(need.saturating_sub(self.delivered[b]));
            }
            self.slots.push(avail);
        }
    }

    /// Sends `payload` symbols to `targets`; slot sizes come from the last
    /// [`Schedule::fill_slots`].
    fn send(&mut self, targets: u64, members: &[usize], payload: u64) {
        for (i, &b) in members.iter().enumerate() {
            let take = payload.min(self.slots[i]);
            self.delivered[b] += take;
            let pool = &mut self.pools[b];
            pool.total -= take;
            if members.len() == 1 {
                // Unicast slots draw from any signature.
                let mut left = take;
                pool.remaining.retain(|_, count| {
                    let used = left.min(*count as u64);
                    *count -= used as u32;
                    left -= used;
                    *count > 0
                });
                continue;
            }
            slot_sources(targets, 1 << b, self.everyone, &mut self.sources);
            let mut left = take;
            for s in &self.sources {
                if left == 0 {
                    break;
                }
                if let Some(count) = pool.remaining.get_mut(s) {
                    let used = left.min(*count as u64);
                    *count -= used as u32;
                    left -= used;
                    if *count == 0 {
                        pool.remaining.remove(s);
                    }
                }
            }
        }
    }
}

/// Target sets of size `j` for which some member still has a symbol that
/// could fill its slot, ascending.
fn level_targets(pools: &[Pool], j: usize) -> Vec<u64> {
    if j == 1 {
        return (0..pools.len())
            .filter(|&b| pools[b].total > 0)
            .map(|b| 1u64 << b)
            .collect();
    }
    let mut seen: SignatureMap<()> = SignatureMap::default();
    for (b, pool) in pools.iter().enumerate() {
        let own = 1u64 << b;
        for &signature in pool.remaining.keys() {
            let size = signature.count_ones() as usize;
            if size + 1 < j || size + 1 > j + SUPERSET_LEVELS {
                continue;
            }
            let members = bits(signature);
            match size + 1 - j {
                0 => {
                    seen.insert(signature | own, ());
                }
                1 => {
                    for &m in &members {
                        seen.insert((signature & !(1 << m)) | own, ());
                    }
                }
                _ => {
                    for (i, &m) in members.iter().enumerate() {
                        for &n in &members[i + 1..] {
                            seen.insert((signature & !(1 << m) & !(1 << n)) | own, ());
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<u64> = seen.into_keys().collect();
    out.sort_unstable();
    out
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask & (1 << b) != 0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub trials: usize,
    pub mean_rate: f64,
    /// Sample standard deviation of the per-trial rate (0 for one trial).
    pub std_rate: f64,
    /// Patch symbols over all transmitted symbols.
    pub patch_fraction: f64,
    /// Trials in which every F-AP decoded.
    pub decode_successes: usize,
    pub results: Vec<TrialResult>,
}

/// Runs `trials` independent timeslots. Trial `t` places caches and draws
/// demands from substreams of `derive_seed(master_seed, t)`, so the outcome
/// does not depend on execution order.
pub fn monte_carlo(
    config: &SystemConfig,
    dist: &PopularityDist,
    params: PlacementParams,
    trials: usize,
    master_seed: u64,
    exec: Execution,
) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    if config.faps > MAX_SIM_FAPS {
        return Err(Error::TooLarge {
            what: "simulated F-APs",
            needed: config.faps as u128,
            cap: MAX_SIM_FAPS as u128,
        });
    }
    SymbolLayout::new(config, params)?;
    if dist.files() != config.files {
        return Err(Error::invalid("popularity length does not match N"));
    }

    let results = exec
        .map_range(0..trials, |t| {
            let seed = derive_seed(master_seed, t as u64);
            let placement = Placement::new(config, params, derive_seed(seed, PLACEMENT_STREAM))?;
            let demand = draw_demands(dist, config.faps, derive_seed(seed, DEMAND_STREAM))?;
            let mut trial = deliver(&placement, &demand, config, params)?.trial;
            trial.trial_id = t as u64;
            Ok(trial)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let n = results.len() as f64;
    let mean_rate = results.iter().map(|r| r.rate_file_units).sum::<f64>() / n;
    let std_rate = if results.len() > 1 {
        let ss: f64 = results.iter().map(|r| (r.rate_file_units - mean_rate).powi(2)).sum();
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let patch: u64 = results.iter().map(|r| r.patch_symbols).sum();
    let total: u64 = results.iter().map(TrialResult::total_symbols).sum();
    Ok(MonteCarloSummary {
        trials,
        mean_rate,
        std_rate,
        patch_fraction: if total == 0 { 0.0 } else { patch as f64 / total as f64 },
        decode_successes: results.iter().filter(|r| r.all_decoded()).count(),
        results,
    })
}

/// Per-trial CSV: `trial_id,k1,multicast_symbols,unicast_symbols,patch_symbols,rate_file_units,decode_ok`.
pub fn write_trials_csv<W: Write>(out: W, results: &[TrialResult]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "trial_id",
        "k1",
        "multicast_symbols",
        "unicast_symbols",
        "patch_symbols",
        "rate_file_units",
        "decode_ok",
    ])?;
    for r in results {
        writer.write_record([
            r.trial_id.to_string(),
            r.k1.to_string(),
            r.multicast_symbols.to_string(),
            r.unicast_symbols.to_string(),
            r.patch_symbols.to_string(),
            r.rate_file_units.to_string(),
            r.all_decoded().to_string(),
        ])?;
    }
    writer.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
