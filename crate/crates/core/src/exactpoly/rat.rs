use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Parses `"num/den"` or a bare integer. Floating point notation is rejected.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected a rational \"num/den\", got {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// Canonical text form: `"num/den"`, or `"num"` when the denominator is 1.
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

/// Returns the integer value of `r`, or a `NonIntegral` error naming `what`.
pub fn rat_to_integer(r: &Rat, what: &str) -> Result<BigInt> {
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(Error::NonIntegral(format!("{what} = {r}")))
    }
}

pub fn rat_to_i64(r: &Rat, what: &str) -> Result<i64> {
    let v = rat_to_integer(r, what)?;
    i64::try_from(v).map_err(|_| Error::NonIntegral(format!("{what} overflows i64")))
}

/// Largest integer strictly below `r`.
pub fn floor_strict(r: &Rat) -> BigInt {
    if r.is_integer() {
        r.to_integer() - BigInt::one()
    } else {
        r.floor().to_integer()
    }
}

/// A prime number, validated at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(n: u32) -> Result<Self> {
        if is_prime(n as u64) {
            Ok(Prime(n))
        } else {
            Err(Error::NotPrime(n as u64))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Prime::new(n)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `base^exp` as a big integer.
pub fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Exact division; errors if `den` does not divide `num`.
pub fn exact_div(num: &BigInt, den: &BigInt, what: &str) -> Result<BigInt> {
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(Error::NonIntegral(format!("{what}: {num} / {den}")))
    }
}

pub(crate) fn is_nonnegative(r: &Rat) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_rat("3/10").unwrap(), rat(3, 10));
        assert_eq!(parse_rat(" 6/20 ").unwrap(), rat(3, 10));
        assert_eq!(parse_rat("-4").unwrap(), rat_int(-4));
        assert_eq!(rat_to_string(&rat(6, 4)), "3/2");
        assert_eq!(rat_to_string(&rat(4, 2)), "2");
        assert!(parse_rat("0.1").is_err());
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn primes() {
        let ps: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(Prime::new(4).is_err());
        assert_eq!(Prime::new(7).unwrap().get(), 7);
    }

    #[test]
    fn strict_floor() {
        assert_eq!(floor_strict(&rat(12, 5)), BigInt::from(2));
        assert_eq!(floor_strict(&rat_int(3)), BigInt::from(2));
        assert_eq!(floor_strict(&rat(-1, 2)), BigInt::from(-1));
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(2, 3), BigInt::zero());
    }
}
