use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut res = BigUint::one();
    for i in 1..=k {
        // Division is exact at each step: res holds C(n-k+i-1, i-1) * ... as
        // a running product of i consecutive integers over i!.
        res = res * BigUint::from(n - k + i) / BigUint::from(i);
    }
    res
}

/// Number of t-element multisets over a ground set of size n,
/// C(n + t - 1, t). Requires n >= 1 unless t == 0.
pub fn multichoose(n: u64, t: u64) -> Result<BigUint> {
    if t == 0 {
        return Ok(BigUint::one());
    }
    if n == 0 {
        return Err(Error::domain("multichoose: empty ground set with t > 0"));
    }
    Ok(binomial(n + t - 1, t))
}

/// Real-argument multichoose: x(x+1)...(x+t-1) / t! for x >= 0.
///
/// Evaluated as a product of per-factor quotients so no intermediate value
/// overflows even when the rising factorial alone would.
pub fn multichoose_real(x: f64, t: u64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!(
            "multichoose_real: x must be finite and non-negative, got {x}"
        )));
    }
    let mut res = 1.0f64;
    for i in 0..t {
        res *= (x + i as f64) / (i as f64 + 1.0);
    }
    Ok(res)
}
