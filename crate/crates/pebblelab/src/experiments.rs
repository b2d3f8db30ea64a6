use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind};
use crate::multichoose::{binomial, multichoose};
use crate::multiset::{enumerate_level, Multiset};
use crate::pebbling::{is_solvable_bruteforce, solvable, Distribution, DEFAULT_STATE_CAP};

/// z for the 95% Wilson score interval.
pub const WILSON_Z: f64 = 1.959963984540054;

/// Samples per RNG substream: sample i is always drawn from substream
/// floor(i / SAMPLE_CHUNK), so worker count changes wall time only.
pub const SAMPLE_CHUNK: u64 = 1024;

/// Default cap on level size for exact probability enumeration.
pub const DEFAULT_EXACT_CAP: u64 = 1_000_000;

/// Level size under which brute-force estimates precompute a solvability
/// table instead of re-solving per sample.
const LOOKUP_TABLE_CAP: u64 = 4096;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// A named, forkable RNG stream: (seed, stream) pins the exact sample
/// sequence, and substreams are independent without sharing state.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> RngStream {
        RngStream { seed, stream_id: 0 }
    }

    /// Child stream k; children of distinct parents collide only by
    /// splitmix64 accident.
    pub fn substream(self, k: u64) -> RngStream {
        RngStream {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id).wrapping_add(k),
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Uniform member of the level M_n(t) by stars and bars: a uniform t-subset
/// of n+t-1 slot positions read back as star offsets.
pub fn sample_uniform_multiset<R: Rng + ?Sized>(n: usize, t: u64, rng: &mut R) -> Result<Multiset> {
    if n == 0 {
        return Err(Error::domain("ground set must be non-empty"));
    }
    let slots: usize = (n as u128 + t as u128 - 1)
        .try_into()
        .map_err(|_| Error::domain("level too large to sample"))?;
    let amount = t as usize;
    let mut stars = rand::seq::index::sample(rng, slots, amount).into_vec();
    stars.sort_unstable();
    let mut counts = vec![0u64; n];
    for (k, s) in stars.into_iter().enumerate() {
        counts[s - k] += 1;
    }
    Multiset::from_counts(counts)
}

/// A Bernoulli estimate with its 95% Wilson score interval.
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub samples: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, samples: u64) -> Estimate {
        assert!(samples >= 1 && successes <= samples);
        let (ci_low, ci_high) = wilson_interval(successes, samples);
        Estimate {
            p_hat: successes as f64 / samples as f64,
            ci_low,
            ci_high,
            successes,
            samples,
        }
    }
}

/// 95% Wilson score interval; always contains p_hat.
pub fn wilson_interval(successes: u64, samples: u64) -> (f64, f64) {
    assert!(samples >= 1 && successes <= samples);
    let n = samples as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundary counts the score equation pins the endpoint exactly;
    // computing it would leak rounding residue into reports.
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == samples {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

fn build_lookup(g: &Graph, t: u64, max_states: u64) -> Result<Option<HashMap<Vec<u64>, bool>>> {
    // Paths and complete graphs already decide in linear time.
    if matches!(g.kind(), GraphKind::Path | GraphKind::Complete) {
        return Ok(None);
    }
    if multichoose(g.n() as u64, t)? > BigUint::from(LOOKUP_TABLE_CAP) {
        return Ok(None);
    }
    let mut table = HashMap::new();
    for m in enumerate_level(g.n(), t)? {
        let d = Distribution::from_multiset(&m);
        let ok = is_solvable_bruteforce(g, &d, max_states)?;
        table.insert(d.counts().to_vec(), ok);
    }
    Ok(Some(table))
}

/// Monte Carlo estimate of Pr[uniform level-t distribution on g is solvable].
/// Deterministic in (g, t, samples, stream): sample i comes from substream
/// floor(i / SAMPLE_CHUNK) regardless of worker count.
pub fn estimate_solvable_prob(
    g: &Graph,
    t: u64,
    samples: u64,
    stream: RngStream,
    max_states: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let lookup = build_lookup(g, t, max_states)?;
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let successes = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<u64> {
            let mut rng = stream.substream(c).rng();
            let in_chunk = (samples - c * SAMPLE_CHUNK).min(SAMPLE_CHUNK);
            let mut wins = 0u64;
            for _ in 0..in_chunk {
                let m = sample_uniform_multiset(g.n(), t, &mut rng)?;
                let d = Distribution::from_multiset(&m);
                let ok = match &lookup {
                    Some(table) => table[d.counts()],
                    None => solvable(g, &d, max_states)?,
                };
                wins += ok as u64;
            }
            Ok(wins)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate::from_counts(successes, samples))
}

/// Exact Pr[uniform level-t distribution on g is solvable] by enumerating
/// the level; levels above max_level are a resource error.
pub fn exact_solvable_prob(
    g: &Graph,
    t: u64,
    max_level: u64,
    max_states: u64,
) -> Result<BigRational> {
    let members = crate::multiset::enumerate_level_capped(g.n(), t, max_level)?;
    let total = members.len() as u64;
    let good = members
        .par_iter()
        .map(|m| -> Result<u64> {
            let d = Distribution::from_multiset(m);
            Ok(solvable(g, &d, max_states)? as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(BigRational::new(
        BigUint::from(good).into(),
        BigUint::from(total).into(),
    ))
}

/// Pr[a fixed vertex holds at least p pebbles] under a uniform level-t
/// distribution on n vertices; p > t has probability 0.
pub fn tail_prob(n: usize, t: u64, p: u64) -> Result<BigRational> {
    if p > t {
        multichoose(n as u64, t)?;
        return Ok(BigRational::zero());
    }
    Ok(BigRational::new(
        multichoose(n as u64, t - p)?.into(),
        multichoose(n as u64, t)?.into(),
    ))
}

/// Pr[a fixed block of m vertices is empty] under a uniform level-t
/// distribution on n vertices.
pub fn empty_block_prob(n: usize, t: u64, m: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::domain("ground set must be non-empty"));
    }
    if m < 1 || m > n {
        return Err(Error::domain(format!(
            "block size {m} out of range 1..={n}"
        )));
    }
    if t == 0 {
        return Ok(BigRational::one());
    }
    // multichoose(n - m, t) / multichoose(n, t), written with binomials so
    // the m = n corner stays in domain.
    let num = binomial(t + (n - m) as u64 - 1, t);
    let den = binomial(t + n as u64 - 1, t);
    Ok(BigRational::new(num.into(), den.into()))
}

/// Expected number of empty blocks among the floor(n/m) partition blocks,
/// counting every block at the size-m rate.
pub fn expected_empty_blocks(n: usize, t: u64, m: usize) -> Result<f64> {
    let per_block = empty_block_prob(n, t, m)?
        .to_f64()
        .ok_or_else(|| Error::domain("probability does not fit in f64"))?;
    Ok((n / m) as f64 * per_block)
}

/// Graph family for threshold experiments.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFamily {
    Path,
    Cycle,
    Complete,
}

impl GraphFamily {
    pub fn build(self, n: usize) -> Result<Graph> {
        match self {
            GraphFamily::Path => Graph::path(n),
            GraphFamily::Cycle => Graph::cycle(n),
            GraphFamily::Complete => Graph::complete(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphFamily::Path => "path",
            GraphFamily::Cycle => "cycle",
            GraphFamily::Complete => "complete",
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<GraphFamily> {
        match s {
            "path" => Ok(GraphFamily::Path),
            "cycle" => Ok(GraphFamily::Cycle),
            "complete" => Ok(GraphFamily::Complete),
            _ => Err(Error::domain(format!(
                "unknown family {s:?}, expected path, cycle or complete"
            ))),
        }
    }
}

/// Knobs for threshold estimation.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdConfig {
    pub samples_per_t: u64,
    pub max_t: u64,
    pub max_states: u64,
}

impl Default for ThresholdConfig {
    fn default() -> ThresholdConfig {
        ThresholdConfig {
            samples_per_t: 2000,
            max_t: 1 << 20,
            max_states: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThresholdPoint {
    pub t: u64,
    #[serde(flatten)]
    pub estimate: Estimate,
}

/// Result of a threshold scan: the evaluated grid, the estimated threshold
/// t_hat, and a bracketing pair (lo, hi) with p_hat(lo) < 1/2 <= p_hat(hi)
/// and hi = t_hat. t_hat is None when no scanned t reached 1/2; the bracket
/// is additionally None when t_hat = 0 leaves nothing below it.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdEstimate {
    pub n: usize,
    pub t_hat: Option<u64>,
    pub bracket: Option<(u64, u64)>,
    pub grid: Vec<ThresholdPoint>,
}

/// Estimates the solvability threshold of the family at size n: doubling
/// scan from t = 0 until the whole Wilson interval sits at or above 1/2,
/// then bisection down to the smallest such grid point, which becomes
/// t_hat. If the scan exhausts max_t first, t_hat falls back to the
/// smallest evaluated t with p_hat >= 1/2 (None when even that never
/// happened). Per-t samples come from substream t+1, so the result is a
/// pure function of (family, n, cfg, stream).
pub fn estimate_threshold(
    family: GraphFamily,
    n: usize,
    cfg: ThresholdConfig,
    stream: RngStream,
) -> Result<ThresholdEstimate> {
    let g = family.build(n)?;
    let mut grid: BTreeMap<u64, Estimate> = BTreeMap::new();
    let eval = |t: u64, grid: &mut BTreeMap<u64, Estimate>| -> Result<Estimate> {
        if let Some(e) = grid.get(&t) {
            return Ok(*e);
        }
        let e = estimate_solvable_prob(
            &g,
            t,
            cfg.samples_per_t,
            stream.substream(t + 1),
            cfg.max_states,
        )?;
        grid.insert(t, e);
        Ok(e)
    };
    let clear = |e: Estimate| e.ci_low >= 0.5;
    let mut hi = clear(eval(0, &mut grid)?).then_some(0);
    let mut t = 1;
    while hi.is_none() && t <= cfg.max_t {
        if clear(eval(t, &mut grid)?) {
            hi = Some(t);
        }
        t = t.saturating_mul(2);
    }
    let t_hat = match hi {
        Some(0) => Some(0),
        Some(mut b) => {
            // Every earlier point failed the interval test, so bisection
            // keeps "lo fails, hi passes" and lands on the smallest passer.
            let mut a = grid.range(..b).next_back().map(|(&t, _)| t).expect("0 < b");
            while b - a > 1 {
                let mid = a + (b - a) / 2;
                if clear(eval(mid, &mut grid)?) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            Some(b)
        }
        None => grid.iter().find(|(_, e)| e.p_hat >= 0.5).map(|(&t, _)| t),
    };
    let bracket = t_hat.and_then(|th| {
        grid.range(..th)
            .rev()
            .find(|(_, e)| e.p_hat < 0.5)
            .map(|(&lo, _)| (lo, th))
    });
    Ok(ThresholdEstimate {
        n,
        t_hat,
        bracket,
        grid: grid
            .into_iter()
            .map(|(t, estimate)| ThresholdPoint { t, estimate })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn streams_are_deterministic_and_forkable() {
        let s = RngStream::new(42);
        let a: Vec<u64> = (0..8).map(|_| s.rng().random::<u64>()).collect();
        let b: Vec<u64> = (0..8).map(|_| s.rng().random::<u64>()).collect();
        assert_eq!(a, b);
        assert_ne!(s.substream(0), s.substream(1));
        assert_ne!(
            s.substream(0).rng().random::<u64>(),
            s.rng().random::<u64>()
        );
        // Children of distinct parents land in distinct id spaces.
        assert_ne!(s.substream(0).substream(1), s.substream(1).substream(0));
    }

    #[test]
    fn sampler_hits_the_requested_level() {
        let mut rng = RngStream::new(7).rng();
        for _ in 0..100 {
            let m = sample_uniform_multiset(4, 7, &mut rng).unwrap();
            assert_eq!(m.ground_size(), 4);
            assert_eq!(m.size(), 7);
        }
        let z = sample_uniform_multiset(3, 0, &mut rng).unwrap();
        assert_eq!(z.counts(), &[0, 0, 0]);
        let one = sample_uniform_multiset(1, 5, &mut rng).unwrap();
        assert_eq!(one.counts(), &[5]);
        assert!(sample_uniform_multiset(0, 2, &mut rng).is_err());
    }

    // Upper 0.001 chi-square quantiles for the level sizes below.
    fn chi_square_uniform(n: usize, t: u64, crit: f64) {
        let samples = 60_000u64;
        let mut rng = RngStream::new(0xC0FFEE).substream(n as u64 * 100 + t).rng();
        let mut observed: HashMap<Vec<u64>, u64> = HashMap::new();
        for _ in 0..samples {
            let m = sample_uniform_multiset(n, t, &mut rng).unwrap();
            *observed.entry(m.counts().to_vec()).or_insert(0) += 1;
        }
        let level = enumerate_level(n, t).unwrap();
        let expected = samples as f64 / level.len() as f64;
        let chi2: f64 = level
            .iter()
            .map(|m| {
                let obs = *observed.get(m.counts()).unwrap_or(&0) as f64;
                (obs - expected) * (obs - expected) / expected
            })
            .sum();
        assert!(chi2 < crit, "chi2 = {chi2} for n = {n}, t = {t}");
    }

    #[test]
    fn sampler_is_uniform_3_2() {
        chi_square_uniform(3, 2, 20.515);
    }

    #[test]
    fn sampler_is_uniform_2_4() {
        chi_square_uniform(2, 4, 18.467);
    }

    #[test]
    fn sampler_is_uniform_4_3() {
        chi_square_uniform(4, 3, 43.820);
    }

    #[test]
    fn wilson_interval_frozen_and_contains_p_hat() {
        let (lo, hi) = wilson_interval(500, 1000);
        assert!((lo - 0.46906960036).abs() < 1e-9, "{lo}");
        assert!((hi - 0.53093039964).abs() < 1e-9, "{hi}");
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert!(wilson_interval(0, 50).0 < 1e-15);
        assert!(wilson_interval(50, 50).1 > 1.0 - 1e-15);
        for s in 0..=20 {
            let e = Estimate::from_counts(s, 20);
            assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
            assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
        }
    }

    #[test]
    fn exact_prob_frozen_examples() {
        let p2 = Graph::path(2).unwrap();
        let p3 = Graph::path(3).unwrap();
        let k3 = Graph::complete(3).unwrap();
        let exact = |g, t| exact_solvable_prob(g, t, DEFAULT_EXACT_CAP, DEFAULT_STATE_CAP);
        assert_eq!(exact(&p2, 2).unwrap(), rational(1, 1));
        assert_eq!(exact(&p3, 2).unwrap(), rational(1, 6));
        assert_eq!(exact(&k3, 2).unwrap(), rational(1, 2));
        assert_eq!(exact(&p2, 0).unwrap(), rational(0, 1));
        let err = exact_solvable_prob(&p3, 100, 1000, DEFAULT_STATE_CAP).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn estimate_matches_exact_on_tiny_cases() {
        let p2 = Graph::path(2).unwrap();
        let e = estimate_solvable_prob(&p2, 2, 2000, RngStream::new(1), DEFAULT_STATE_CAP).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.successes, 2000);

        let p3 = Graph::path(3).unwrap();
        let e =
            estimate_solvable_prob(&p3, 2, 20_000, RngStream::new(2), DEFAULT_STATE_CAP).unwrap();
        let exact = 1.0 / 6.0;
        assert!((e.p_hat - exact).abs() < 0.02, "{}", e.p_hat);
        assert!(e.ci_low <= exact && exact <= e.ci_high);

        // The cycle estimate exercises the lookup-table path.
        let c4 = Graph::cycle(4).unwrap();
        let exact = exact_solvable_prob(&c4, 3, DEFAULT_EXACT_CAP, DEFAULT_STATE_CAP)
            .unwrap()
            .to_f64()
            .unwrap();
        let e =
            estimate_solvable_prob(&c4, 3, 20_000, RngStream::new(3), DEFAULT_STATE_CAP).unwrap();
        assert!((e.p_hat - exact).abs() < 0.02, "{} vs {exact}", e.p_hat);
    }

    #[test]
    fn estimates_are_reproducible() {
        // Exact P(C_4, 3) = 12/20, far from both endpoints, so distinct
        // streams are visibly distinct.
        let c4 = Graph::cycle(4).unwrap();
        let s = RngStream::new(9).substream(4);
        let a = estimate_solvable_prob(&c4, 3, 3000, s, DEFAULT_STATE_CAP).unwrap();
        let b = estimate_solvable_prob(&c4, 3, 3000, s, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(a, b);
        let other = estimate_solvable_prob(
            &c4,
            3,
            3000,
            RngStream::new(9).substream(5),
            DEFAULT_STATE_CAP,
        )
        .unwrap();
        assert_ne!(a.successes, other.successes);
        assert!(estimate_solvable_prob(&c4, 3, 0, s, DEFAULT_STATE_CAP).is_err());
    }

    #[test]
    fn tail_prob_frozen_examples() {
        assert_eq!(tail_prob(2, 3, 2).unwrap(), rational(1, 2));
        assert_eq!(tail_prob(2, 3, 3).unwrap(), rational(1, 4));
        assert_eq!(tail_prob(2, 3, 4).unwrap(), rational(0, 1));
        assert_eq!(tail_prob(2, 3, 0).unwrap(), rational(1, 1));
        assert!(tail_prob(0, 3, 1).is_err());
    }

    #[test]
    fn tail_prob_matches_enumeration() {
        for n in 1..=5usize {
            for t in 0..=5u64 {
                let level = enumerate_level(n, t).unwrap();
                for p in 0..=(t + 1) {
                    let hits = level.iter().filter(|m| m.count(1) >= p).count();
                    assert_eq!(
                        tail_prob(n, t, p).unwrap(),
                        BigRational::new((hits as u64).into(), (level.len() as u64).into()),
                        "n={n} t={t} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn empty_block_prob_frozen_examples() {
        assert_eq!(empty_block_prob(2, 1, 1).unwrap(), rational(1, 2));
        assert_eq!(empty_block_prob(3, 2, 2).unwrap(), rational(1, 6));
        assert_eq!(empty_block_prob(4, 0, 2).unwrap(), rational(1, 1));
        assert_eq!(empty_block_prob(3, 1, 3).unwrap(), rational(0, 1));
        assert!(empty_block_prob(3, 1, 4).is_err());
        assert!(empty_block_prob(3, 1, 0).is_err());
        assert!((expected_empty_blocks(2, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((expected_empty_blocks(3, 2, 2).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn empty_block_prob_matches_enumeration() {
        for n in 1..=5usize {
            for t in 0..=5u64 {
                let level = enumerate_level(n, t).unwrap();
                for m in 1..=n {
                    let hits = level
                        .iter()
                        .filter(|ms| (1..=m).all(|v| ms.count(v) == 0))
                        .count();
                    assert_eq!(
                        empty_block_prob(n, t, m).unwrap(),
                        BigRational::new((hits as u64).into(), (level.len() as u64).into()),
                        "n={n} t={t} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn family_names_roundtrip() {
        for f in [GraphFamily::Path, GraphFamily::Cycle, GraphFamily::Complete] {
            assert_eq!(f.name().parse::<GraphFamily>().unwrap(), f);
        }
        assert!("grid".parse::<GraphFamily>().is_err());
        assert_eq!(GraphFamily::Cycle.build(5).unwrap().n(), 5);
        assert!(GraphFamily::Cycle.build(2).is_err());
    }

    fn tiny_threshold(family: GraphFamily, n: usize) -> ThresholdEstimate {
        let cfg = ThresholdConfig {
            samples_per_t: 400,
            ..ThresholdConfig::default()
        };
        estimate_threshold(family, n, cfg, RngStream::new(5)).unwrap()
    }

    #[test]
    fn threshold_frozen_tiny_cases() {
        let two = tiny_threshold(GraphFamily::Complete, 2);
        assert_eq!(two.t_hat, Some(2));
        assert_eq!(two.bracket, Some((1, 2)));
        let p2 = tiny_threshold(GraphFamily::Path, 2);
        assert_eq!(p2.t_hat, Some(2));
        let one = tiny_threshold(GraphFamily::Path, 1);
        assert_eq!(one.t_hat, Some(1));
        assert_eq!(one.bracket, Some((0, 1)));
    }

    #[test]
    fn threshold_brackets_the_crossing() {
        let est = tiny_threshold(GraphFamily::Cycle, 4);
        let (lo, hi) = est.bracket.unwrap();
        assert!(lo < hi);
        assert_eq!(est.t_hat, Some(hi));
        let at = |t: u64| {
            est.grid
                .iter()
                .find(|p| p.t == t)
                .expect("bracket endpoints are on the grid")
                .estimate
        };
        assert!(at(lo).p_hat < 0.5);
        assert!(at(hi).p_hat >= 0.5);
        // The scan converged, so the whole interval at t_hat cleared 1/2,
        // nothing below it did, and anything between the bracket endpoints
        // is a borderline point that kept p_hat at or above 1/2.
        assert!(at(hi).ci_low >= 0.5);
        for p in est.grid.iter().filter(|p| p.t < hi) {
            assert!(p.estimate.ci_low < 0.5);
            if p.t > lo {
                assert!(p.estimate.p_hat >= 0.5);
            }
        }
    }

    #[test]
    fn threshold_is_reproducible_and_bounded() {
        let a = tiny_threshold(GraphFamily::Path, 4);
        let b = tiny_threshold(GraphFamily::Path, 4);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        let cfg = ThresholdConfig {
            samples_per_t: 200,
            max_t: 1,
            ..ThresholdConfig::default()
        };
        let capped = estimate_threshold(GraphFamily::Path, 6, cfg, RngStream::new(5)).unwrap();
        assert_eq!(capped.t_hat, None);
        assert_eq!(capped.bracket, None);
        assert_eq!(capped.grid.len(), 2);
    }
}
