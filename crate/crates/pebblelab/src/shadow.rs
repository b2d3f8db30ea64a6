use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::multiset::{colex_rank, initial_segment, LevelFamily, Multiset, DEFAULT_ENUM_CAP};

/// Slack allowed when comparing a shadow size against the real-argument
/// lower bound.
pub const LOVASZ_SLACK: f64 = 1e-9;

/// The set of all (t-1)-submultisets of members of `f`.
pub fn shadow(f: &LevelFamily) -> Result<LevelFamily> {
    if f.level() == 0 {
        return Err(Error::domain("shadow: level must be at least 1"));
    }
    let mut out = LevelFamily::empty(f.ground_size(), f.level() - 1)?;
    for a in f.iter() {
        for e in 1..=f.ground_size() {
            if a.count(e) > 0 {
                out.insert(a.removing(e)?)?;
            }
        }
    }
    Ok(out)
}

pub fn iterated_shadow(f: &LevelFamily, k: u64) -> Result<LevelFamily> {
    if k > f.level() {
        return Err(Error::domain(format!(
            "iterated_shadow: k={k} exceeds level {}",
            f.level()
        )));
    }
    let mut cur = f.clone();
    for _ in 0..k {
        cur = shadow(&cur)?;
    }
    Ok(cur)
}

/// Record of one pairwise compression: `moved` members ended up replaced by
/// multisets outside the original family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompressionStep {
    pub i: usize,
    pub j: usize,
    pub moved: u64,
}

/// Applies the (i, j)-compression: swaps of one j for one i (when the target
/// is absent) are applied until none applies. Equivalently, within each
/// class of members that agree outside {i, j}, the occupied values of the
/// j-count are packed down to 0, 1, ..., k-1.
///
/// A single sweep of swaps is not enough: it can leave a family whose shadow
/// grew (one j-heavy member sliding one notch opens fresh submultisets), and
/// only the fixed point satisfies the shadow bound |dF| >= |d q(F)|.
pub fn compress_pair(
    f: &LevelFamily,
    i: usize,
    j: usize,
) -> Result<(LevelFamily, CompressionStep)> {
    let n = f.ground_size();
    if i < 1 || j > n || i >= j {
        return Err(Error::domain(format!(
            "compress_pair: need 1 <= i < j <= {n}, got i={i} j={j}"
        )));
    }
    // Group by the counts outside {i, j} plus the total inside, then pack.
    let mut groups: std::collections::BTreeMap<Vec<u64>, u64> = std::collections::BTreeMap::new();
    for a in f.iter() {
        let mut key = a.counts().to_vec();
        key[i - 1] += key[j - 1];
        key[j - 1] = 0;
        *groups.entry(key).or_insert(0) += 1;
    }
    let mut out = LevelFamily::empty(n, f.level())?;
    for (key, k) in groups {
        let total = key[i - 1];
        for slot in 0..k {
            debug_assert!(slot <= total, "more members than chain slots");
            let mut counts = key.clone();
            counts[j - 1] = slot;
            counts[i - 1] = total - slot;
            let fresh = out.insert(Multiset::from_counts(counts)?)?;
            debug_assert!(fresh);
        }
    }
    debug_assert_eq!(out.len(), f.len());
    let moved = f.iter().filter(|a| !out.contains(a)).count() as u64;
    Ok((out, CompressionStep { i, j, moved }))
}

fn rank_potential(f: &LevelFamily) -> BigUint {
    f.iter().map(colex_rank).sum()
}

/// Applies pairwise compressions until no pair moves anything. Sweeps pairs
/// with j ascending and i ascending below it.
pub fn fully_compress(f: &LevelFamily) -> LevelFamily {
    let n = f.ground_size();
    let mut cur = f.clone();
    loop {
        let mut any_moved = false;
        for j in 2..=n {
            for i in 1..j {
                let before = cfg!(debug_assertions).then(|| rank_potential(&cur));
                let (next, step) = compress_pair(&cur, i, j).expect("valid pair");
                if step.moved > 0 {
                    any_moved = true;
                    if let Some(before) = before {
                        // Every effective step strictly lowers the summed
                        // colex rank, which is what grounds termination.
                        debug_assert!(rank_potential(&next) < before);
                    }
                }
                cur = next;
            }
        }
        if !any_moved {
            return cur;
        }
    }
}

/// True iff every pairwise compression fixes the family.
pub fn is_compressed(f: &LevelFamily) -> bool {
    let n = f.ground_size();
    for a in f.iter() {
        for j in 2..=n {
            if a.count(j) == 0 {
                continue;
            }
            for i in 1..j {
                let b = a.removing(j).and_then(|m| m.adding(i)).expect("in range");
                if !f.contains(&b) {
                    return false;
                }
            }
        }
    }
    true
}

/// Splits `f` by the count of element 1: entry l holds the members with
/// exactly l copies of element 1.
pub fn layer_partition(f: &LevelFamily) -> Result<Vec<LevelFamily>> {
    let t = f.level();
    if t + 1 > DEFAULT_ENUM_CAP {
        return Err(Error::capacity("layer_partition", t + 1, DEFAULT_ENUM_CAP));
    }
    let mut layers = Vec::with_capacity(t as usize + 1);
    for _ in 0..=t {
        layers.push(LevelFamily::empty(f.ground_size(), t)?);
    }
    for a in f.iter() {
        layers[a.count(1) as usize].insert(a.clone())?;
    }
    Ok(layers)
}

/// The members of `f` containing element 1 at least once.
pub fn first_column(f: &LevelFamily) -> LevelFamily {
    let mut out = LevelFamily::empty(f.ground_size(), f.level()).expect("same ground");
    for a in f.iter() {
        if a.count(1) >= 1 {
            out.insert(a.clone()).expect("same shape");
        }
    }
    out
}

/// Size of the k-fold shadow of the colex initial segment of size s in
/// M_n(t): the minimum possible k-shadow over all families of that size.
pub fn cl_min_shadow(n: usize, t: u64, s: &BigUint, k: u64) -> Result<BigUint> {
    if k > t {
        return Err(Error::domain(format!("cl_min_shadow: k={k} exceeds t={t}")));
    }
    if s.is_zero() {
        return Ok(BigUint::zero());
    }
    let seg = initial_segment(n, t, s)?;
    if k == 0 {
        return Ok(BigUint::from(seg.len()));
    }
    let shadowed = iterated_shadow(&seg, k)?;
    Ok(BigUint::from(shadowed.len()))
}

/// Natural logarithm of a big integer, stable for any number of digits.
fn ln_biguint(s: &BigUint) -> f64 {
    let bits = s.bits();
    if bits <= 52 {
        return s.to_f64().expect("small enough").ln();
    }
    let shift = bits - 52;
    let head = (s >> shift).to_f64().expect("52 bits");
    head.ln() + shift as f64 * std::f64::consts::LN_2
}

/// The real x >= 0 with <x over t> = s, found by bisection in log space.
pub fn lovasz_x(s: &BigUint, t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain("lovasz_x: t must be at least 1"));
    }
    if s.is_zero() {
        return Ok(0.0);
    }
    let ln_s = ln_biguint(s);
    let ln_tfact: f64 = (1..=t).map(|i| (i as f64).ln()).sum();
    // g(x) = ln <x over t> - ln s, increasing in x, -inf at x = 0.
    let g = |x: f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..t {
            acc += (x + i as f64).ln();
        }
        acc - ln_tfact - ln_s
    };
    // <x over t> >= x^t / t!, so x = (s * t!)^(1/t) brackets the root above.
    let mut hi = ((ln_s + ln_tfact) / t as f64).exp().max(1.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outcome of the real-argument shadow bound check: the shadow of a family
/// of size <x over t> has at least <x over t-1> members.
#[derive(Clone, Copy, Debug)]
pub struct LovaszCheck {
    pub ok: bool,
    pub x: f64,
    pub bound: f64,
    pub actual: u64,
}

pub fn lovasz_check(f: &LevelFamily) -> Result<LovaszCheck> {
    let t = f.level();
    if t == 0 {
        return Err(Error::domain("lovasz_check: level must be at least 1"));
    }
    if f.is_empty() {
        return Ok(LovaszCheck {
            ok: true,
            x: 0.0,
            bound: 0.0,
            actual: 0,
        });
    }
    let x = lovasz_x(&BigUint::from(f.len()), t)?;
    let bound = crate::multichoose::multichoose_real(x, t - 1)?;
    let actual = shadow(f)?.len() as u64;
    Ok(LovaszCheck {
        ok: actual as f64 >= bound - LOVASZ_SLACK,
        x,
        bound,
        actual,
    })
}
