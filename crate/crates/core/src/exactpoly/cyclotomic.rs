use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::bivar::BivarPoly;
use super::rat::Prime;
use crate::error::{Error, Result};

/// Element of `Z[xi]`, `xi` a primitive `n`-th root of unity for a prime `n`.
///
/// Stored in the basis `1, xi, ..., xi^(n-2)`; `xi^(n-1)` is rewritten as
/// `-(1 + xi + ... + xi^(n-2))`, so the representation is unique.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycInt {
    n: Prime,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(n: Prime) -> Self {
        Self {
            n,
            coeffs: vec![BigInt::zero(); n.as_usize() - 1],
        }
    }

    pub fn from_int(n: Prime, c: impl Into<BigInt>) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[0] = c.into();
        z
    }

    pub fn one(n: Prime) -> Self {
        Self::from_int(n, 1)
    }

    /// `xi^e` for any integer exponent.
    pub fn xi_pow(n: Prime, e: i64) -> Self {
        let nn = n.get() as i64;
        let r = e.rem_euclid(nn) as usize;
        let mut z = Self::zero(n);
        if r == n.as_usize() - 1 {
            z.coeffs.iter_mut().for_each(|c| *c = -BigInt::one());
        } else {
            z.coeffs[r] = BigInt::one();
        }
        z
    }

    /// Reduces a dense vector of coefficients of `1, xi, xi^2, ...` (any length).
    pub fn from_dense(n: Prime, dense: &[BigInt]) -> Self {
        let nn = n.as_usize();
        let mut folded = vec![BigInt::zero(); nn];
        for (e, c) in dense.iter().enumerate() {
            folded[e % nn] += c;
        }
        let top = folded.pop().unwrap_or_default();
        if !top.is_zero() {
            folded.iter_mut().for_each(|c| *c -= &top);
        }
        Self { n, coeffs: folded }
    }

    pub fn modulus(&self) -> Prime {
        self.n
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational integer this element equals, if any.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coeffs[0])
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!(self.n, other.n, "cyclotomic moduli differ");
    }
}

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&CycInt> for CycInt {
    fn add_assign(&mut self, rhs: &CycInt) {
        self.check_same_ring(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self + &(-rhs)
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.check_same_ring(rhs);
        let len = self.coeffs.len();
        let mut dense = vec![BigInt::zero(); 2 * len.max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                dense[i + j] += a * b;
            }
        }
        CycInt::from_dense(self.n, &dense)
    }
}

/// Sum of `xi^(l * nu)` over `l = 0..n`, evaluated in `Z[xi]`.
///
/// Returns `n` when `n | nu` and `0` otherwise; errors if the cyclotomic sum
/// fails to reduce to a rational integer.
pub fn root_of_unity_filter(n: Prime, nu: i64) -> Result<i64> {
    let mut acc = CycInt::zero(n);
    for l in 0..n.get() as i64 {
        acc += &CycInt::xi_pow(n, l * nu);
    }
    let value = acc
        .as_integer()
        .ok_or_else(|| Error::Inconsistent(format!("root-of-unity sum for nu = {nu} is not rational")))?;
    i64::try_from(value.clone()).map_err(|_| Error::Inconsistent("root-of-unity sum overflow".into()))
}

/// Bivariate polynomial with coefficients in `Z[xi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycBivarPoly {
    n: Prime,
    terms: BTreeMap<(u32, u32), CycInt>,
}

impl CycBivarPoly {
    pub fn zero(n: Prime) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: CycInt) -> Self {
        let mut p = Self::zero(c.modulus());
        p.add_term(0, 0, c);
        p
    }

    pub fn monomial(c: CycInt, i: u32, j: u32) -> Self {
        let mut p = Self::zero(c.modulus());
        p.add_term(i, j, c);
        p
    }

    pub fn from_integer_poly(n: Prime, p: &BivarPoly) -> Self {
        let mut out = Self::zero(n);
        for (i, j, c) in p.terms() {
            out.add_term(i, j, CycInt::from_int(n, c.clone()));
        }
        out
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: CycInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((i, j)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &CycInt)> + '_ {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn scale(&self, c: &CycInt) -> Self {
        let mut out = Self::zero(self.n);
        for (&(i, j), x) in &self.terms {
            out.add_term(i, j, x * c);
        }
        out
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(CycInt::one(self.n));
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl AddAssign<&CycBivarPoly> for CycBivarPoly {
    fn add_assign(&mut self, rhs: &CycBivarPoly) {
        for (&(i, j), c) in &rhs.terms {
            self.add_term(i, j, c.clone());
        }
    }
}

impl Add for &CycBivarPoly {
    type Output = CycBivarPoly;
    fn add(self, rhs: &CycBivarPoly) -> CycBivarPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Mul for &CycBivarPoly {
    type Output = CycBivarPoly;
    fn mul(self, rhs: &CycBivarPoly) -> CycBivarPoly {
        let mut out = CycBivarPoly::zero(self.n);
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, a * b);
            }
        }
        out
    }
}

/// Converts a polynomial whose coefficients all reduce to rational integers.
pub fn cyc_project(p: &CycBivarPoly) -> Result<BivarPoly> {
    let mut out = BivarPoly::zero();
    for (i, j, c) in p.terms() {
        let v = c
            .as_integer()
            .ok_or(Error::NonIntegralCoefficient { i, j })?;
        out.add_term(i, j, v.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn relation_sums_to_zero() {
        for n in [2, 3, 5, 7] {
            let p = prime(n);
            let mut s = CycInt::zero(p);
            for e in 0..n as i64 {
                s += &CycInt::xi_pow(p, e);
            }
            assert!(s.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn xi_has_order_n() {
        let p = prime(5);
        let xi = CycInt::xi_pow(p, 1);
        assert_eq!(xi.pow(5), CycInt::one(p));
        assert_ne!(xi.pow(2), CycInt::one(p));
        assert_eq!(CycInt::xi_pow(p, -1), xi.pow(4));
    }

    #[test]
    fn filter_values() {
        assert_eq!(root_of_unity_filter(prime(3), 6).unwrap(), 3);
        assert_eq!(root_of_unity_filter(prime(3), 4).unwrap(), 0);
        assert_eq!(root_of_unity_filter(prime(5), 0).unwrap(), 5);
        assert_eq!(root_of_unity_filter(prime(2), -3).unwrap(), 0);
    }

    #[test]
    fn projection() {
        let p3 = prime(3);
        let three = CycBivarPoly::constant(CycInt::from_int(p3, 3));
        assert_eq!(cyc_project(&three).unwrap(), BivarPoly::constant(3));

        let mut rel = CycInt::zero(p3);
        for e in 0..3 {
            rel += &CycInt::xi_pow(p3, e);
        }
        let q = CycBivarPoly::monomial(rel, 1, 0);
        assert!(cyc_project(&q).unwrap().is_zero());

        let bad = CycBivarPoly::monomial(CycInt::xi_pow(p3, 1), 1, 0);
        assert_eq!(
            cyc_project(&bad),
            Err(Error::NonIntegralCoefficient { i: 1, j: 0 })
        );
    }
}
