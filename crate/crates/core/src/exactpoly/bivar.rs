use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::rat::{binomial, Rat};

/// Sparse bivariate polynomial in `u`, `v` with arbitrary-precision integer
/// coefficients. Zero coefficients are never stored; the zero polynomial is
/// the empty map. Terms iterate in lexicographic `(i, j)` order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

/// Ring operation selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &BivarPoly, b: &BivarPoly, op: PolyOp) -> BivarPoly {
    match op {
        PolyOp::Add => a + b,
        PolyOp::Sub => a - b,
        PolyOp::Mul => a * b,
    }
}

pub fn poly_pow(a: &BivarPoly, k: u32) -> BivarPoly {
    a.pow(k)
}

pub fn poly_scale(a: &BivarPoly, c: &BigInt) -> BivarPoly {
    a.scale(c)
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c.into());
        p
    }

    pub fn u() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn v() -> Self {
        Self::monomial(1, 0, 1)
    }

    /// `(uv)^e`
    pub fn uv_pow(e: u32) -> Self {
        Self::monomial(1, e, e)
    }

    /// `(1 - u)(1 - v)`
    pub fn one_minus_u_one_minus_v() -> Self {
        &(&Self::one() - &Self::u()) * &(&Self::one() - &Self::v())
    }

    /// Builds a polynomial from `(i, j, c)` triples; repeated exponents are summed.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c.into());
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((i, j)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &BigInt)> + '_ {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
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

    /// Multiplies by `u^a v^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((i + a, j + b), c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, u0: &Rat, v0: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (&(i, j), c) in &self.terms {
            acc += Rat::from_integer(c.clone()) * num_traits::pow(u0.clone(), i as usize)
                * num_traits::pow(v0.clone(), j as usize);
        }
        acc
    }

    /// Exchanges the roles of `u` and `v`.
    pub fn swap_uv(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((j, i), c.clone()))
                .collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.swap_uv()
    }

    /// Total degree if every term has the same total degree; `None` for zero
    /// or mixed-degree polynomials.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|&(i, j)| i + j);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Coefficient of the lexicographically largest exponent pair.
    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.values().next_back()
    }

    /// Divides every coefficient by `d`, returning `None` unless all divisions are exact.
    pub fn exact_div(&self, d: &BigInt) -> Option<Self> {
        let mut out = BTreeMap::new();
        for (k, c) in &self.terms {
            if !(c % d).is_zero() {
                return None;
            }
            out.insert(*k, c / d);
        }
        Some(Self { terms: out })
    }

    /// Serialization triples `[i, j, "coefficient"]` in canonical order.
    pub fn to_triples(&self) -> Vec<(u32, u32, String)> {
        self.terms()
            .map(|(i, j, c)| (i, j, c.to_string()))
            .collect()
    }
}

/// Degree-`m` homogeneous slice of `((1-u)(1-v))^G`:
/// the sum over `p + q = m`, `0 <= p, q <= G` of `(-1)^(p+q) C(G,p) C(G,q) u^p v^q`.
pub fn binom_deg_slice(big_g: u32, m: u32) -> BivarPoly {
    let mut out = BivarPoly::zero();
    if m > 2 * big_g {
        return out;
    }
    let lo = m.saturating_sub(big_g);
    let hi = m.min(big_g);
    let sign = if m % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    for p in lo..=hi {
        let q = m - p;
        out.add_term(p, q, &sign * binomial(big_g, p) * binomial(big_g, q));
    }
    out
}

impl Add for &BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for BivarPoly {
    type Output = BivarPoly;
    fn add(mut self, rhs: BivarPoly) -> BivarPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&BivarPoly> for BivarPoly {
    fn add_assign(&mut self, rhs: &BivarPoly) {
        for (&(i, j), c) in &rhs.terms {
            self.add_term(i, j, c.clone());
        }
    }
}

impl Sub for &BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Sub for BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: BivarPoly) -> BivarPoly {
        &self - &rhs
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: BivarPoly) -> BivarPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for BivarPoly {
    fn sum<I: Iterator<Item = BivarPoly>>(iter: I) -> Self {
        iter.fold(BivarPoly::zero(), |mut acc, p| {
            acc += &p;
            acc
        })
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (&(i, j), c)) in self.terms.iter().enumerate() {
            let abs = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts = Vec::new();
            if !abs.is_one() || (i == 0 && j == 0) {
                parts.push(abs.to_string());
            }
            match i {
                0 => {}
                1 => parts.push("u".into()),
                _ => parts.push(format!("u^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push("v".into()),
                _ => parts.push(format!("v^{j}")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl Serialize for BivarPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (&(i, j), c) in &self.terms {
            seq.serialize_element(&(i, j, c.to_string()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BivarPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct TriplesVisitor;

        impl<'de> Visitor<'de> for TriplesVisitor {
            type Value = BivarPoly;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a sorted list of [i, j, \"coefficient\"] triples")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<BivarPoly, A::Error> {
                let mut terms = BTreeMap::new();
                let mut last: Option<(u32, u32)> = None;
                while let Some((i, j, c)) = seq.next_element::<(u32, u32, String)>()? {
                    let c: BigInt = c
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad coefficient {c:?}")))?;
                    if c.is_zero() {
                        return Err(de::Error::custom("zero coefficient in polynomial"));
                    }
                    if last.is_some_and(|l| l >= (i, j)) {
                        return Err(de::Error::custom("polynomial terms not in canonical order"));
                    }
                    last = Some((i, j));
                    terms.insert((i, j), c);
                }
                Ok(BivarPoly { terms })
            }
        }

        deserializer.deserialize_seq(TriplesVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat::{rat_int, Rat};

    fn p(terms: &[(u32, u32, i64)]) -> BivarPoly {
        BivarPoly::from_terms(terms.iter().map(|&(i, j, c)| (i, j, c)))
    }

    #[test]
    fn product_of_linear_factors() {
        let got = BivarPoly::one_minus_u_one_minus_v();
        assert_eq!(got, p(&[(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, 1)]));
    }

    #[test]
    fn square_by_hand() {
        let base = BivarPoly::one_minus_u_one_minus_v();
        let want = p(&[
            (0, 0, 1),
            (1, 0, -2),
            (0, 1, -2),
            (2, 0, 1),
            (1, 1, 4),
            (0, 2, 1),
            (2, 1, -2),
            (1, 2, -2),
            (2, 2, 1),
        ]);
        assert_eq!(poly_pow(&base, 2), want);
    }

    #[test]
    fn additive_identity() {
        let a = p(&[(3, 1, 7), (0, 0, -2)]);
        assert_eq!(poly_arith(&a, &BivarPoly::zero(), PolyOp::Add), a);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn evaluation() {
        let one = rat_int(1);
        assert_eq!(BivarPoly::one_minus_u_one_minus_v().eval(&one, &one), Rat::zero());
        assert_eq!(BivarPoly::monomial(1, 1, 1).eval(&rat_int(2), &rat_int(3)), rat_int(6));
        let q = &BivarPoly::uv_pow(4).scale(&BigInt::from(15)) * &BivarPoly::one_minus_u_one_minus_v();
        assert_eq!(q.eval(&one, &one), Rat::zero());
    }

    #[test]
    fn slices() {
        assert_eq!(binom_deg_slice(1, 1), p(&[(1, 0, -1), (0, 1, -1)]));
        assert_eq!(binom_deg_slice(1, 0), BivarPoly::one());
        assert_eq!(binom_deg_slice(1, 2), p(&[(1, 1, 1)]));
        assert!(binom_deg_slice(2, 5).is_zero());
    }

    #[test]
    fn display() {
        let q = p(&[(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, 1)]);
        assert_eq!(q.to_string(), "1 - v - u + u*v");
        assert_eq!(BivarPoly::zero().to_string(), "0");
        assert_eq!(p(&[(4, 4, 15)]).to_string(), "15*u^4*v^4");
    }

    #[test]
    fn json_shape() {
        let q = p(&[(1, 0, -1), (0, 1, -1)]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"[[0,1,"-1"],[1,0,"-1"]]"#);
        let back: BivarPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<BivarPoly>(r#"[[1,0,"1"],[0,1,"1"]]"#).is_err());
        assert!(serde_json::from_str::<BivarPoly>(r#"[[1,0,"0"]]"#).is_err());
    }

    #[test]
    fn leading_and_homogeneity() {
        let q = &BivarPoly::uv_pow(2) * &BivarPoly::one_minus_u_one_minus_v().scale(&BigInt::from(5));
        assert_eq!(q.leading_coeff(), Some(&BigInt::from(5)));
        assert_eq!(binom_deg_slice(3, 4).homogeneous_degree(), Some(4));
        assert_eq!(q.homogeneous_degree(), None);
    }
}
