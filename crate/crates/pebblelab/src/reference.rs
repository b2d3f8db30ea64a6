use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::multiset::{enumerate_level, LevelFamily};

fn check_m_args(n: usize, r: u64, b: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("reference M: ground set must be non-empty"));
    }
    if b == 0 || b > r {
        return Err(Error::domain(format!(
            "reference M: need 1 <= b <= r, got b={b} r={r}"
        )));
    }
    Ok(())
}

fn check_n_args(n: usize, b: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("reference N: need n >= 2"));
    }
    if b == 0 || b > n as u64 - 1 {
        return Err(Error::domain(format!(
            "reference N: need 1 <= b <= n-1, got b={b} n={n}"
        )));
    }
    Ok(())
}

/// The family of A in M_n(r) whose count of the top element n is below b.
pub fn reference_m(n: usize, r: u64, b: u64) -> Result<LevelFamily> {
    check_m_args(n, r, b)?;
    let members = enumerate_level(n, r)?
        .into_iter()
        .filter(|a| a.count(n) < b);
    LevelFamily::from_members(n, r, members)
}

/// The family of A in M_n(r) avoiding the top b elements entirely.
pub fn reference_n(n: usize, r: u64, b: u64) -> Result<LevelFamily> {
    check_n_args(n, b)?;
    let members = enumerate_level(n, r)?
        .into_iter()
        .filter(|a| (0..b as usize).all(|k| a.count(n - k) == 0));
    LevelFamily::from_members(n, r, members)
}

/// Probability that a uniform member of M_n(r) lies in the M-reference
/// family: 1 - prod_{j=0}^{b-1} (r-j) / (n+r-1-j), exactly.
pub fn prob_m(n: usize, r: u64, b: u64) -> Result<BigRational> {
    check_m_args(n, r, b)?;
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..b {
        num *= BigUint::from(r - j);
        den *= BigUint::from(n as u64 + r - 1 - j);
    }
    // Each factor is at most 1, so num <= den and the difference is exact.
    Ok(BigRational::new(
        BigInt::from(&den - &num),
        BigInt::from(den),
    ))
}

/// Probability that a uniform member of M_n(r) lies in the N-reference
/// family: prod_{j=1}^{b} (n-j) / (n+r-j), exactly.
pub fn prob_n(n: usize, r: u64, b: u64) -> Result<BigRational> {
    check_n_args(n, b)?;
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 1..=b {
        num *= BigUint::from(n as u64 - j);
        den *= BigUint::from(n as u64 + r - j);
    }
    Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Exponential sandwich for prob_m:
/// 1 - exp(-b(n-1)/(n+r-1)) <= prob_m <= 1 - exp(-b(n-1)/(r-b+1)).
pub fn prob_m_bounds(n: usize, r: u64, b: u64) -> Result<(f64, f64)> {
    check_m_args(n, r, b)?;
    let bn = b as f64 * (n as f64 - 1.0);
    let lb = 1.0 - (-bn / (n as f64 + r as f64 - 1.0)).exp();
    let ub = 1.0 - (-bn / (r as f64 - b as f64 + 1.0)).exp();
    Ok((lb, ub))
}

/// Exponential sandwich for prob_n:
/// exp(-rb/(n-b)) <= prob_n <= exp(-rb/(n+r-1)).
pub fn prob_n_bounds(n: usize, r: u64, b: u64) -> Result<(f64, f64)> {
    check_n_args(n, b)?;
    let rb = r as f64 * b as f64;
    let lb = (-rb / (n as f64 - b as f64)).exp();
    let ub = (-rb / (n as f64 + r as f64 - 1.0)).exp();
    Ok((lb, ub))
}
