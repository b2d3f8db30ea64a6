use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::multichoose::multichoose;

/// Default cap on the number of multisets any enumeration will materialize.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// A multiset over the ground set {1, ..., n}, stored as per-element counts.
/// `counts[i]` is the multiplicity of element i + 1; the ground size is the
/// length of the vector and is always at least 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Multiset {
    counts: Vec<u64>,
}

impl Multiset {
    /// Builds a multiset from counts. The vector length is the ground size.
    pub fn from_counts(counts: Vec<u64>) -> Result<Multiset> {
        if counts.is_empty() {
            return Err(Error::domain("multiset: ground set must be non-empty"));
        }
        let mut total: u64 = 0;
        for &c in &counts {
            total = total
                .checked_add(c)
                .ok_or_else(|| Error::domain("multiset: total size overflows u64"))?;
        }
        Ok(Multiset { counts })
    }

    /// The empty multiset over {1, ..., n}.
    pub fn empty(n: usize) -> Result<Multiset> {
        Multiset::from_counts(vec![0; n.max(1)]).and_then(|m| {
            if n == 0 {
                Err(Error::domain("multiset: ground set must be non-empty"))
            } else {
                Ok(m)
            }
        })
    }

    pub fn ground_size(&self) -> usize {
        self.counts.len()
    }

    /// Total number of elements counted with multiplicity.
    pub fn size(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Multiplicity of element `e` (1-based).
    pub fn count(&self, e: usize) -> u64 {
        assert!(e >= 1 && e <= self.counts.len(), "element out of range");
        self.counts[e - 1]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Copy with one occurrence of `e` removed. Errors if `e` is absent.
    pub fn removing(&self, e: usize) -> Result<Multiset> {
        if e < 1 || e > self.counts.len() {
            return Err(Error::domain(format!("element {e} out of range")));
        }
        if self.counts[e - 1] == 0 {
            return Err(Error::domain(format!("element {e} has multiplicity 0")));
        }
        let mut counts = self.counts.clone();
        counts[e - 1] -= 1;
        Ok(Multiset { counts })
    }

    /// Copy with one occurrence of `e` added.
    pub fn adding(&self, e: usize) -> Result<Multiset> {
        if e < 1 || e > self.counts.len() {
            return Err(Error::domain(format!("element {e} out of range")));
        }
        let mut counts = self.counts.clone();
        counts[e - 1] = counts[e - 1]
            .checked_add(1)
            .ok_or_else(|| Error::domain("multiset: count overflows u64"))?;
        Ok(Multiset { counts })
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiset{:?}", self.counts)
    }
}

/// Colex order: A < B iff at the highest element where they differ, A has the
/// smaller count. Requires the same ground size and the same total size.
pub fn colex_compare(a: &Multiset, b: &Multiset) -> Result<Ordering> {
    if a.ground_size() != b.ground_size() {
        return Err(Error::domain(format!(
            "colex_compare: ground sizes differ ({} vs {})",
            a.ground_size(),
            b.ground_size()
        )));
    }
    if a.size() != b.size() {
        return Err(Error::domain(format!(
            "colex_compare: sizes differ ({} vs {})",
            a.size(),
            b.size()
        )));
    }
    Ok(colex_cmp_raw(&a.counts, &b.counts))
}

fn colex_cmp_raw(a: &[u64], b: &[u64]) -> Ordering {
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

// Total order used by set containers: ground size first, then the colex scan.
// Within one level family this coincides with colex order.
impl Ord for Multiset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.counts
            .len()
            .cmp(&other.counts.len())
            .then_with(|| colex_cmp_raw(&self.counts, &other.counts))
    }
}

impl PartialOrd for Multiset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// On the wire a multiset is a bare count array: [2,0,1].
impl Serialize for Multiset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.counts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Multiset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let counts = Vec::<u64>::deserialize(d)?;
        Multiset::from_counts(counts).map_err(D::Error::custom)
    }
}

/// Iterates the multisets of a fixed level in increasing colex order.
struct ColexIter {
    next: Option<Vec<u64>>,
}

impl ColexIter {
    /// Starts at the colex-smallest multiset of level t over {1, ..., n}:
    /// all t occurrences on element 1.
    fn new(n: usize, t: u64) -> ColexIter {
        let mut counts = vec![0u64; n];
        counts[0] = t;
        ColexIter { next: Some(counts) }
    }
}

impl Iterator for ColexIter {
    type Item = Multiset;

    fn next(&mut self) -> Option<Multiset> {
        let current = self.next.take()?;
        // Successor: find the smallest index i >= 1 with a positive prefix
        // sum s below it, move one unit up to i, and reset the prefix to
        // s - 1 occurrences of element 1.
        let mut succ = current.clone();
        let mut prefix: u64 = 0;
        let mut advanced = false;
        for i in 1..succ.len() {
            prefix += succ[i - 1];
            if prefix > 0 {
                succ[i] += 1;
                for slot in succ.iter_mut().take(i) {
                    *slot = 0;
                }
                succ[0] = prefix - 1;
                advanced = true;
                break;
            }
        }
        self.next = advanced.then_some(succ);
        Some(Multiset { counts: current })
    }
}

fn check_level_args(n: usize, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(format!(
            "{what}: ground set must be non-empty"
        )));
    }
    Ok(())
}

fn check_enum_cap(n: usize, t: u64, cap: u64, what: &'static str) -> Result<BigUint> {
    let total = multichoose(n as u64, t)?;
    if total > BigUint::from(cap) {
        return Err(Error::capacity(what, &total, cap));
    }
    Ok(total)
}

/// All multisets of level t over {1, ..., n} in colex order, refusing levels
/// larger than the default cap.
pub fn enumerate_level(n: usize, t: u64) -> Result<Vec<Multiset>> {
    enumerate_level_capped(n, t, DEFAULT_ENUM_CAP)
}

pub fn enumerate_level_capped(n: usize, t: u64, cap: u64) -> Result<Vec<Multiset>> {
    check_level_args(n, "enumerate_level")?;
    let total = check_enum_cap(n, t, cap, "enumerate_level")?;
    let total = total.to_usize().expect("cap fits usize");
    let mut out = Vec::with_capacity(total);
    out.extend(ColexIter::new(n, t));
    debug_assert_eq!(out.len(), total);
    Ok(out)
}

/// Position of `m` in the colex order of its level, counting from 0.
pub fn colex_rank(m: &Multiset) -> BigUint {
    let n = m.ground_size();
    let mut rank = BigUint::zero();
    let mut remaining = m.size();
    for idx in (1..n).rev() {
        let c = m.counts[idx];
        for j in 0..c {
            rank += multichoose(idx as u64, remaining - j).expect("idx >= 1");
        }
        remaining -= c;
    }
    rank
}

/// The multiset of level t over {1, ..., n} at colex position `rank`.
pub fn colex_unrank(n: usize, t: u64, rank: &BigUint) -> Result<Multiset> {
    check_level_args(n, "colex_unrank")?;
    let total = multichoose(n as u64, t)?;
    if *rank >= total {
        return Err(Error::domain(format!(
            "colex_unrank: rank {rank} out of range for level of size {total}"
        )));
    }
    let mut rank = rank.clone();
    let mut counts = vec![0u64; n];
    let mut remaining = t;
    for idx in (1..n).rev() {
        let mut c = 0u64;
        loop {
            let block = multichoose(idx as u64, remaining - c).expect("idx >= 1");
            if rank < block {
                break;
            }
            rank -= block;
            c += 1;
        }
        counts[idx] = c;
        remaining -= c;
    }
    counts[0] = remaining;
    Ok(Multiset { counts })
}

/// A set of multisets all on the same ground set and level.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LevelFamily {
    n: usize,
    t: u64,
    members: BTreeSet<Multiset>,
}

impl LevelFamily {
    pub fn empty(n: usize, t: u64) -> Result<LevelFamily> {
        check_level_args(n, "level family")?;
        Ok(LevelFamily {
            n,
            t,
            members: BTreeSet::new(),
        })
    }

    pub fn from_members(
        n: usize,
        t: u64,
        members: impl IntoIterator<Item = Multiset>,
    ) -> Result<LevelFamily> {
        let mut fam = LevelFamily::empty(n, t)?;
        for m in members {
            if !fam.insert(m)? {
                return Err(Error::domain("level family: duplicate member"));
            }
        }
        Ok(fam)
    }

    /// The full level M_n(t), subject to the default enumeration cap.
    pub fn full_level(n: usize, t: u64) -> Result<LevelFamily> {
        let members = enumerate_level(n, t)?;
        Ok(LevelFamily {
            n,
            t,
            members: members.into_iter().collect(),
        })
    }

    /// Inserts a member, validating ground size and level. Returns false if
    /// it was already present.
    pub fn insert(&mut self, m: Multiset) -> Result<bool> {
        if m.ground_size() != self.n {
            return Err(Error::domain(format!(
                "level family: member ground size {} != {}",
                m.ground_size(),
                self.n
            )));
        }
        if m.size() != self.t {
            return Err(Error::domain(format!(
                "level family: member size {} != level {}",
                m.size(),
                self.t
            )));
        }
        Ok(self.members.insert(m))
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: &Multiset) -> bool {
        self.members.contains(m)
    }

    /// Members in colex order.
    pub fn iter(&self) -> impl Iterator<Item = &Multiset> {
        self.members.iter()
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyWire {
    n: u64,
    t: u64,
    members: Vec<Multiset>,
}

impl Serialize for LevelFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyWire {
            n: self.n as u64,
            t: self.t,
            members: self.members.iter().cloned().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LevelFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = FamilyWire::deserialize(d)?;
        let n = usize::try_from(wire.n).map_err(|_| D::Error::custom("n out of range"))?;
        LevelFamily::from_members(n, wire.t, wire.members).map_err(D::Error::custom)
    }
}

/// The first `s` multisets of level t over {1, ..., n} in colex order.
pub fn initial_segment(n: usize, t: u64, s: &BigUint) -> Result<LevelFamily> {
    check_level_args(n, "initial_segment")?;
    let total = multichoose(n as u64, t)?;
    if *s > total {
        return Err(Error::domain(format!(
            "initial_segment: requested {s} members from a level of size {total}"
        )));
    }
    if *s > BigUint::from(DEFAULT_ENUM_CAP) {
        return Err(Error::capacity("initial_segment", s, DEFAULT_ENUM_CAP));
    }
    let s = s.to_usize().expect("cap fits usize");
    let members: BTreeSet<Multiset> = ColexIter::new(n, t).take(s).collect();
    debug_assert_eq!(members.len(), s);
    Ok(LevelFamily { n, t, members })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(counts: &[u64]) -> Multiset {
        Multiset::from_counts(counts.to_vec()).unwrap()
    }

    /// Independent generator: all count vectors of length n summing to t, by
    /// recursion on the count of the last element, ascending.
    fn brute_level(n: usize, t: u64) -> Vec<Vec<u64>> {
        if n == 1 {
            return vec![vec![t]];
        }
        let mut out = Vec::new();
        for last in 0..=t {
            for mut head in brute_level(n - 1, t - last) {
                head.push(last);
                out.push(head);
            }
        }
        out
    }

    #[test]
    fn enumerate_level_3_2_frozen() {
        let got: Vec<Vec<u64>> = enumerate_level(3, 2)
            .unwrap()
            .iter()
            .map(|m| m.counts().to_vec())
            .collect();
        let want = vec![
            vec![2, 0, 0],
            vec![1, 1, 0],
            vec![0, 2, 0],
            vec![1, 0, 1],
            vec![0, 1, 1],
            vec![0, 0, 2],
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn enumerate_matches_independent_generator() {
        for n in 1..=5usize {
            for t in 0..=6u64 {
                let got = enumerate_level(n, t).unwrap();
                let want = brute_level(n, t);
                assert_eq!(got.len(), want.len(), "n={n} t={t}");
                let got_set: BTreeSet<Vec<u64>> = got.iter().map(|m| m.counts().to_vec()).collect();
                let want_set: BTreeSet<Vec<u64>> = want.into_iter().collect();
                assert_eq!(got_set, want_set, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn enumerate_is_strictly_colex_increasing() {
        for n in 1..=5usize {
            for t in 0..=5u64 {
                let level = enumerate_level(n, t).unwrap();
                for pair in level.windows(2) {
                    assert_eq!(colex_compare(&pair[0], &pair[1]).unwrap(), Ordering::Less);
                }
            }
        }
    }

    #[test]
    fn enumerate_respects_cap() {
        // |M_4(4)| = 35
        assert!(matches!(
            enumerate_level_capped(4, 4, 10),
            Err(Error::Capacity { .. })
        ));
        assert_eq!(enumerate_level_capped(4, 4, 35).unwrap().len(), 35);
    }

    #[test]
    fn rank_matches_enumeration_position() {
        for n in 1..=5usize {
            for t in 0..=5u64 {
                for (i, m) in enumerate_level(n, t).unwrap().iter().enumerate() {
                    assert_eq!(colex_rank(m), BigUint::from(i));
                    assert_eq!(&colex_unrank(n, t, &BigUint::from(i)).unwrap(), m);
                }
            }
        }
    }

    #[test]
    fn rank_frozen_examples() {
        assert_eq!(colex_rank(&ms(&[2, 0, 0])), BigUint::from(0u32));
        assert_eq!(colex_rank(&ms(&[0, 0, 2])), BigUint::from(5u32));
        assert_eq!(
            colex_unrank(3, 2, &BigUint::from(2u32)).unwrap(),
            ms(&[0, 2, 0])
        );
    }

    #[test]
    fn unrank_out_of_range() {
        assert!(colex_unrank(3, 2, &BigUint::from(6u32)).is_err());
    }

    #[test]
    fn colex_compare_requires_matching_shape() {
        assert!(colex_compare(&ms(&[1, 0]), &ms(&[1, 0, 0])).is_err());
        assert!(colex_compare(&ms(&[2, 0]), &ms(&[1, 0])).is_err());
        assert_eq!(
            colex_compare(&ms(&[1, 1, 0]), &ms(&[0, 0, 2])).unwrap(),
            Ordering::Less
        );
    }

    #[test]
    fn initial_segment_is_prefix() {
        let seg = initial_segment(3, 2, &BigUint::from(3u32)).unwrap();
        let want = vec![ms(&[2, 0, 0]), ms(&[1, 1, 0]), ms(&[0, 2, 0])];
        let got: Vec<Multiset> = seg.iter().cloned().collect();
        assert_eq!(got, want);
        assert!(initial_segment(3, 2, &BigUint::from(7u32)).is_err());
        assert_eq!(
            initial_segment(3, 2, &BigUint::from(0u32)).unwrap().len(),
            0
        );
    }

    #[test]
    fn initial_segment_skips_full_enumeration_guard() {
        // The level is astronomically large; a short prefix must still work.
        let seg = initial_segment(50, 40, &BigUint::from(10u32)).unwrap();
        assert_eq!(seg.len(), 10);
    }

    #[test]
    fn multiset_json_roundtrip() {
        let m = ms(&[2, 0, 1]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[2,0,1]");
        let back: Multiset = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn multiset_json_rejects_bad_input() {
        assert!(serde_json::from_str::<Multiset>("[]").is_err());
        assert!(serde_json::from_str::<Multiset>("[-1]").is_err());
        assert!(serde_json::from_str::<Multiset>("{\"a\":1}").is_err());
        // Total size overflows u64.
        assert!(serde_json::from_str::<Multiset>("[18446744073709551615,1]").is_err());
    }

    #[test]
    fn family_json_roundtrip() {
        let text = r#"{"n":3,"t":2,"members":[[2,0,0],[1,1,0]]}"#;
        let fam: LevelFamily = serde_json::from_str(text).unwrap();
        assert_eq!(fam.ground_size(), 3);
        assert_eq!(fam.level(), 2);
        assert_eq!(fam.len(), 2);
        let back = serde_json::to_string(&fam).unwrap();
        assert_eq!(back, text);
    }

    #[test]
    fn family_json_rejects_bad_input() {
        // member of the wrong level
        assert!(
            serde_json::from_str::<LevelFamily>(r#"{"n":3,"t":2,"members":[[3,0,0]]}"#).is_err()
        );
        // member on the wrong ground set
        assert!(serde_json::from_str::<LevelFamily>(r#"{"n":3,"t":2,"members":[[2,0]]}"#).is_err());
        // duplicate member
        assert!(serde_json::from_str::<LevelFamily>(
            r#"{"n":3,"t":2,"members":[[2,0,0],[2,0,0]]}"#
        )
        .is_err());
        // empty ground set
        assert!(serde_json::from_str::<LevelFamily>(r#"{"n":0,"t":0,"members":[]}"#).is_err());
    }

    #[test]
    fn family_serialization_is_colex_sorted() {
        let fam =
            LevelFamily::from_members(3, 2, vec![ms(&[0, 0, 2]), ms(&[2, 0, 0]), ms(&[1, 1, 0])])
                .unwrap();
        let s = serde_json::to_string(&fam).unwrap();
        assert_eq!(s, r#"{"n":3,"t":2,"members":[[2,0,0],[1,1,0],[0,0,2]]}"#);
    }
}
