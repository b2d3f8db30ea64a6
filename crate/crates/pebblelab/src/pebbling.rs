use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphKind};
use crate::multiset::Multiset;

/// Default cap on visited states for the brute-force solvers.
pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

/// A pebble distribution on vertices 1..=n: counts[i] pebbles on vertex i+1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Distribution {
    counts: Vec<u64>,
}

impl Distribution {
    pub fn from_counts(counts: Vec<u64>) -> Result<Distribution> {
        if counts.is_empty() {
            return Err(Error::domain("distribution: need at least one vertex"));
        }
        let mut total: u64 = 0;
        for &c in &counts {
            total = total
                .checked_add(c)
                .ok_or_else(|| Error::domain("distribution: total overflows u64"))?;
        }
        Ok(Distribution { counts })
    }

    pub fn zeros(n: usize) -> Result<Distribution> {
        Distribution::from_counts(vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Pebbles on vertex v (1-based).
    pub fn count(&self, v: usize) -> u64 {
        assert!(v >= 1 && v <= self.counts.len(), "vertex out of range");
        self.counts[v - 1]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// The same counts read as a multiset over ground set [n].
    pub fn to_multiset(&self) -> Multiset {
        Multiset::from_counts(self.counts.clone()).expect("distribution invariants match")
    }

    pub fn from_multiset(m: &Multiset) -> Distribution {
        Distribution {
            counts: m.counts().to_vec(),
        }
    }

    /// A copy with one extra pebble on v.
    pub fn adding(&self, v: usize) -> Result<Distribution> {
        if v < 1 || v > self.counts.len() {
            return Err(Error::domain(format!("vertex {v} out of range")));
        }
        let mut counts = self.counts.clone();
        counts[v - 1] = counts[v - 1]
            .checked_add(1)
            .ok_or_else(|| Error::domain("distribution: count overflows u64"))?;
        Distribution::from_counts(counts)
    }
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Distribution{:?}", self.counts)
    }
}

/// Parses a comma-separated count list such as "3,0,0".
impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Distribution> {
        let counts = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::domain(format!("distribution: bad count {tok:?}: {e}")))
            })
            .collect::<Result<Vec<u64>>>()?;
        Distribution::from_counts(counts)
    }
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.counts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let counts = Vec::<u64>::deserialize(d)?;
        Distribution::from_counts(counts).map_err(D::Error::custom)
    }
}

/// A pebbling move sequence; each entry (v, w) removes two pebbles from v and
/// places one on the neighbor w.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct MoveSequence(pub Vec<(usize, usize)>);

impl MoveSequence {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Applies every move in order, validating each against g.
    pub fn replay(&self, g: &Graph, d: &Distribution) -> Result<Distribution> {
        let mut cur = d.clone();
        for &(v, w) in &self.0 {
            cur = apply_move(g, &cur, v, w)?;
        }
        Ok(cur)
    }
}

impl fmt::Display for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (v, w)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({v},{w})")?;
        }
        Ok(())
    }
}

fn check_same_ground(g: &Graph, d: &Distribution) -> Result<()> {
    if g.n() != d.n() {
        return Err(Error::domain(format!(
            "graph has {} vertices but distribution has {}",
            g.n(),
            d.n()
        )));
    }
    Ok(())
}

fn check_vertex(n: usize, z: usize) -> Result<()> {
    if z < 1 || z > n {
        return Err(Error::domain(format!("vertex {z} out of range 1..={n}")));
    }
    Ok(())
}

/// One pebbling move: removes two pebbles from v, adds one on the neighbor w.
pub fn apply_move(g: &Graph, d: &Distribution, v: usize, w: usize) -> Result<Distribution> {
    check_same_ground(g, d)?;
    check_vertex(g.n(), v)?;
    check_vertex(g.n(), w)?;
    if !g.has_edge(v, w) {
        return Err(Error::Move(format!("({v},{w}) is not an edge")));
    }
    if d.count(v) < 2 {
        return Err(Error::Move(format!(
            "vertex {v} has {} pebbles, need 2",
            d.count(v)
        )));
    }
    let mut counts = d.counts().to_vec();
    counts[v - 1] -= 2;
    counts[w - 1] += 1;
    Ok(Distribution { counts })
}

/// Exhaustive z-solvability with a witness: breadth-first search over
/// reachable distributions. Never wrong: exceeding max_states is a resource
/// error, not an answer.
pub fn is_z_solvable_bruteforce(
    g: &Graph,
    d: &Distribution,
    z: usize,
    max_states: u64,
) -> Result<Option<MoveSequence>> {
    check_same_ground(g, d)?;
    check_vertex(g.n(), z)?;
    if d.count(z) >= 1 {
        return Ok(Some(MoveSequence::default()));
    }
    let start = d.counts().to_vec();
    // parent[s] = (previous state, move that produced s); None marks the start.
    type Parent = Option<(Vec<u64>, (usize, usize))>;
    let mut parent: HashMap<Vec<u64>, Parent> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(s) = queue.pop_front() {
        for v in 1..=g.n() {
            if s[v - 1] < 2 {
                continue;
            }
            for &w in g.neighbors(v) {
                let mut t = s.clone();
                t[v - 1] -= 2;
                t[w - 1] += 1;
                if t[z - 1] >= 1 {
                    let mut moves = vec![(v, w)];
                    let mut cur = &s;
                    while let Some(Some((prev, mv))) = parent.get(cur) {
                        moves.push(*mv);
                        cur = prev;
                    }
                    moves.reverse();
                    return Ok(Some(MoveSequence(moves)));
                }
                if !parent.contains_key(&t) {
                    if parent.len() as u64 >= max_states {
                        return Err(Error::capacity(
                            "pebbling reachability search",
                            format!("more than {max_states}"),
                            max_states,
                        ));
                    }
                    parent.insert(t.clone(), Some((s.clone(), (v, w))));
                    queue.push_back(t);
                }
            }
        }
    }
    Ok(None)
}

/// Exhaustive solvability for every root at once: one reachability pass,
/// tracking which vertices ever hold a pebble.
pub fn is_solvable_bruteforce(g: &Graph, d: &Distribution, max_states: u64) -> Result<bool> {
    check_same_ground(g, d)?;
    let n = g.n();
    let mut covered = vec![false; n];
    let mut remaining = n;
    let cover = |counts: &[u64], covered: &mut Vec<bool>, remaining: &mut usize| {
        for (i, &c) in counts.iter().enumerate() {
            if c >= 1 && !covered[i] {
                covered[i] = true;
                *remaining -= 1;
            }
        }
    };
    cover(d.counts(), &mut covered, &mut remaining);
    if remaining == 0 {
        return Ok(true);
    }
    let start = d.counts().to_vec();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(s) = queue.pop_front() {
        for v in 1..=n {
            if s[v - 1] < 2 {
                continue;
            }
            for &w in g.neighbors(v) {
                let mut t = s.clone();
                t[v - 1] -= 2;
                t[w - 1] += 1;
                if !seen.contains(&t) {
                    if seen.len() as u64 >= max_states {
                        return Err(Error::capacity(
                            "pebbling reachability search",
                            format!("more than {max_states}"),
                            max_states,
                        ));
                    }
                    if !covered[w - 1] {
                        covered[w - 1] = true;
                        remaining -= 1;
                        if remaining == 0 {
                            return Ok(true);
                        }
                    }
                    seen.insert(t.clone());
                    queue.push_back(t);
                }
            }
        }
    }
    Ok(false)
}

/// Carry folded into z from vertices left of z (exclusive).
fn left_carry(counts: &[u64], z: usize) -> u128 {
    let mut carry: u128 = 0;
    for &c in counts.iter().take(z - 1) {
        carry = (carry + c as u128) / 2;
    }
    carry
}

/// Carry folded into z from vertices right of z (exclusive).
fn right_carry(counts: &[u64], z: usize) -> u128 {
    let mut carry: u128 = 0;
    for &c in counts.iter().skip(z).rev() {
        carry = (carry + c as u128) / 2;
    }
    carry
}

/// Exact z-solvability on the path 1 - 2 - ... - n in linear time: fold
/// carries toward z from both ends; each step keeps floor((carry + count)/2).
pub fn path_z_solvable_greedy(d: &Distribution, z: usize) -> Result<bool> {
    check_vertex(d.n(), z)?;
    let counts = d.counts();
    Ok(counts[z - 1] as u128 + left_carry(counts, z) + right_carry(counts, z) >= 1)
}

/// Exact all-roots solvability on the path in linear time via prefix and
/// suffix carries.
pub fn path_solvable_greedy(d: &Distribution) -> bool {
    let counts = d.counts();
    let n = counts.len();
    // left[z] = carry deliverable to z from vertices < z, and symmetrically.
    let mut left = vec![0u128; n + 1];
    for i in 1..n {
        left[i + 1] = (left[i] + counts[i - 1] as u128) / 2;
    }
    let mut right = vec![0u128; n + 2];
    for i in (2..=n).rev() {
        right[i - 1] = (right[i] + counts[i - 1] as u128) / 2;
    }
    (1..=n).all(|z| counts[z - 1] as u128 + left[z] + right[z] >= 1)
}

/// z-solvability on the complete graph: a pebble already on z, or two
/// anywhere, is exactly enough.
pub fn complete_z_solvable(d: &Distribution, z: usize) -> Result<bool> {
    check_vertex(d.n(), z)?;
    Ok(d.count(z) >= 1 || d.counts().iter().any(|&c| c >= 2))
}

/// All-roots solvability on the complete graph.
pub fn complete_solvable(d: &Distribution) -> bool {
    d.counts().iter().any(|&c| c >= 2) || d.counts().iter().all(|&c| c >= 1)
}

/// z-solvability, dispatching to the exact fast solver when the shape allows.
pub fn z_solvable(g: &Graph, d: &Distribution, z: usize, max_states: u64) -> Result<bool> {
    check_same_ground(g, d)?;
    match g.kind() {
        GraphKind::Path => path_z_solvable_greedy(d, z),
        GraphKind::Complete => complete_z_solvable(d, z),
        _ => Ok(is_z_solvable_bruteforce(g, d, z, max_states)?.is_some()),
    }
}

/// All-roots solvability, dispatching like `z_solvable`.
pub fn solvable(g: &Graph, d: &Distribution, max_states: u64) -> Result<bool> {
    check_same_ground(g, d)?;
    match g.kind() {
        GraphKind::Path => Ok(path_solvable_greedy(d)),
        GraphKind::Complete => Ok(complete_solvable(d)),
        _ => is_solvable_bruteforce(g, d, max_states),
    }
}

fn pow2(k: usize) -> BigUint {
    BigUint::one() << k
}

/// Exact rightward weight at i on the path: sum of D(l) / 2^(l-i) over l >= i.
pub fn weight_plus(d: &Distribution, i: usize) -> Result<BigRational> {
    check_vertex(d.n(), i)?;
    let n = d.n();
    let mut num = BigUint::zero();
    for l in i..=n {
        num += BigUint::from(d.count(l)) << (n - l);
    }
    Ok(BigRational::new(num.into(), pow2(n - i).into()))
}

/// Exact leftward weight at i on the path: sum of D(l) / 2^(i-l) over l <= i.
pub fn weight_minus(d: &Distribution, i: usize) -> Result<BigRational> {
    check_vertex(d.n(), i)?;
    let mut num = BigUint::zero();
    for l in 1..=i {
        num += BigUint::from(d.count(l)) << (l - 1);
    }
    Ok(BigRational::new(num.into(), pow2(i - 1).into()))
}

/// Total certificate weight at z: weight_plus + weight_minus counts D(z)
/// twice, so subtract it once.
pub fn certificate_weight(d: &Distribution, z: usize) -> Result<BigRational> {
    let w = weight_plus(d, z)? + weight_minus(d, z)?;
    Ok(w - BigRational::from_integer(BigUint::from(d.count(z)).into()))
}

/// Sound unsolvability certificate on the path: no move increases the weight
/// toward z, and reaching z needs weight at least 1.
pub fn weight_certificate_unsolvable(d: &Distribution, z: usize) -> Result<bool> {
    Ok(certificate_weight(d, z)? < BigRational::one())
}

/// A consecutive block of path vertices, both endpoints included.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Block {
    pub lo: usize,
    pub hi: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lower median vertex of the block.
    pub fn center(&self) -> usize {
        (self.lo + self.hi) / 2
    }
}

/// Splits [1..n] into floor(n/m) consecutive blocks of size m or m+1; the
/// last (n mod m) blocks take the extra vertex. Needs n mod m <= floor(n/m),
/// otherwise no such partition covers [n].
pub fn block_partition(n: usize, m: usize) -> Result<Vec<Block>> {
    if m < 1 || m > n {
        return Err(Error::domain(format!(
            "block size {m} out of range 1..={n}"
        )));
    }
    let k = n / m;
    let extras = n % m;
    if extras > k {
        return Err(Error::domain(format!(
            "no partition of [{n}] into {k} blocks of size {m} or {}",
            m + 1
        )));
    }
    let mut blocks = Vec::with_capacity(k);
    let mut lo = 1;
    for b in 0..k {
        let size = if b >= k - extras { m + 1 } else { m };
        blocks.push(Block {
            lo,
            hi: lo + size - 1,
        });
        lo += size;
    }
    Ok(blocks)
}

/// Sufficient condition for path solvability: every block of the partition
/// holds at least 2^m pebbles. One-sided; false just means "not decided".
pub fn block_sufficiency_solvable(d: &Distribution, m: usize) -> Result<bool> {
    let blocks = block_partition(d.n(), m)?;
    if m >= 128 {
        return Err(Error::domain(format!("block size {m} too large for 2^m")));
    }
    let need: u128 = 1u128 << m;
    Ok(blocks.iter().all(|b| {
        let total: u128 = (b.lo..=b.hi).map(|v| d.count(v) as u128).sum();
        total >= need
    }))
}

/// Looks for an empty block whose center carries an unsolvability
/// certificate. Any hit is a proof; None decides nothing.
pub fn unsolvability_witness_path(d: &Distribution, m: usize) -> Result<Option<(Block, usize)>> {
    let blocks = block_partition(d.n(), m)?;
    for b in blocks {
        let empty = (b.lo..=b.hi).all(|v| d.count(v) == 0);
        if !empty {
            continue;
        }
        let c = b.center();
        if weight_certificate_unsolvable(d, c)? {
            return Ok(Some((b, c)));
        }
    }
    Ok(None)
}
