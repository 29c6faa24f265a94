//! Loci fixed by a non-trivial torsion point and their contribution to the
//! stringy E-polynomial of the quotient.

use num_bigint::BigInt;
use serde::Serialize;

use crate::cstar_fixed::{all_words, nontrivial_torsion, PermWord};
use crate::error::{Error, Result};
use crate::exactpoly::{exact_div, factorial, BivarPoly, Prime};
use crate::moduli::{dim_moduli, prym_dim, ModuliParams};

/// Invariants of the fixed locus of one non-trivial torsion point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedLocusInvariants {
    pub dim: u64,
    pub fermionic_shift: u64,
    pub invariant_epoly: BivarPoly,
    #[serde(serialize_with = "as_decimal")]
    pub orbit_count: BigInt,
}

fn as_decimal<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn fixed_locus_invariants(p: &ModuliParams) -> FixedLocusInvariants {
    FixedLocusInvariants {
        dim: fixed_locus_dim(p),
        fermionic_shift: fermionic_shift(p),
        invariant_epoly: invariant_epoly_fixed_locus(p),
        orbit_count: quotient_count_formula(p.prime(), p.k()),
    }
}

/// `2(n-1)(g-1)`.
pub fn fixed_locus_dim(p: &ModuliParams) -> u64 {
    2 * prym_dim(p)
}

/// `n(n-1)(g-1+k/2)`.
pub fn fermionic_shift(p: &ModuliParams) -> u64 {
    p.twist_degree() as u64
}

/// Half the codimension of the fixed locus.
pub fn half_codimension(p: &ModuliParams) -> u64 {
    (dim_moduli(p) - fixed_locus_dim(p)) / 2
}

/// `((1-u)(1-v))^((n-1)(g-1))`.
pub fn prym_epoly(p: &ModuliParams) -> BivarPoly {
    BivarPoly::one_minus_u_one_minus_v().pow(prym_dim(p) as u32)
}

/// `(n!)^k / n`.
pub fn quotient_count_formula(n: Prime, k: u32) -> BigInt {
    let total = num_traits::pow(factorial(n.get()), k as usize);
    exact_div(&total, &BigInt::from(n.get()), "(n!)^k / n").expect("n divides n!")
}

const QUOTIENT_MAX_N: u32 = 5;
const QUOTIENT_MAX_K: u32 = 4;

/// Orbits of `Z_n` acting on `S_n^k` by cyclically relabelling every letter
/// of every word, counted by brute force; also checks that no non-trivial
/// rotation fixes a tuple.
pub fn sn_quotient_count(n: Prime, k: u32) -> Result<u64> {
    if n.get() > QUOTIENT_MAX_N || k > QUOTIENT_MAX_K || k == 0 {
        return Err(Error::Limit {
            what: format!("orbit enumeration on S_{n}^{k}"),
            limit: QUOTIENT_MAX_N as u64,
        });
    }
    let words = all_words(n.get());
    let index = |w: &PermWord| words.binary_search(w).expect("all words listed");
    let r = words.len() as u64;
    let nn = n.get();
    // rotation of each word index by each shift
    let rot: Vec<Vec<u64>> = (0..nn)
        .map(|t| words.iter().map(|w| index(&w.rotate_letters(t)) as u64).collect())
        .collect();
    let total = r.pow(k);
    let decode = |mut idx: u64| -> Vec<u64> {
        let mut out = vec![0; k as usize];
        for slot in out.iter_mut().rev() {
            *slot = idx % r;
            idx /= r;
        }
        out
    };
    let encode = |v: &[u64]| v.iter().fold(0u64, |acc, &x| acc * r + x);
    let mut orbits = 0u64;
    for idx in 0..total {
        let tuple = decode(idx);
        let images: Vec<u64> = (0..nn as usize)
            .map(|t| encode(&tuple.iter().map(|&w| rot[t][w as usize]).collect::<Vec<_>>()))
            .collect();
        if images[1..].contains(&idx) {
            return Err(Error::Inconsistent(format!("tuple {idx} is fixed by a non-trivial rotation")));
        }
        // count each orbit at its smallest element
        if images.iter().all(|&j| j >= idx) {
            orbits += 1;
        }
    }
    Ok(orbits)
}

/// Number of tuples fixed by rotation `t`, for the Burnside count.
pub fn rotation_fixed_points(n: Prime, k: u32, t: u32) -> u64 {
    let fixed_words = all_words(n.get())
        .iter()
        .filter(|w| w.rotate_letters(t) == **w)
        .count() as u64;
    fixed_words.pow(k)
}

/// `(uv)^((n-1)(g-1)) E(Prym) (n!)^k / n`.
pub fn invariant_epoly_fixed_locus(p: &ModuliParams) -> BivarPoly {
    let e = prym_dim(p) as u32;
    prym_epoly(p)
        .scale(&quotient_count_formula(p.prime(), p.k()))
        .shift(e, e)
}

/// Sum over the `n^(2g) - 1` non-trivial torsion points of the invariant
/// E-polynomial of the fixed locus shifted by `(uv)^F`.
pub fn stringy_gamma_sum(p: &ModuliParams) -> BivarPoly {
    let f = fermionic_shift(p) as u32;
    invariant_epoly_fixed_locus(p)
        .scale(&nontrivial_torsion(p))
        .shift(f, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::binomial;

    fn mp(n: u32, g: u32, k: u32) -> ModuliParams {
        ModuliParams::new(n, g, k, 0).unwrap()
    }

    fn prime(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn dims_and_shift() {
        assert_eq!(fixed_locus_dim(&mp(2, 2, 1)), 2);
        assert_eq!(fixed_locus_dim(&mp(3, 2, 1)), 4);
        assert_eq!(fermionic_shift(&mp(2, 2, 1)), 3);
        assert_eq!(fermionic_shift(&mp(3, 2, 1)), 9);
        assert_eq!(half_codimension(&mp(2, 2, 1)), 3);
    }

    #[test]
    fn prym() {
        assert_eq!(prym_epoly(&mp(2, 2, 1)), BivarPoly::one_minus_u_one_minus_v());
        let q = prym_epoly(&mp(3, 3, 1));
        for (i, j, c) in q.terms() {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            assert_eq!(*c, BigInt::from(sign) * binomial(4, i) * binomial(4, j));
        }
    }

    #[test]
    fn quotients() {
        assert_eq!(sn_quotient_count(prime(2), 1).unwrap(), 1);
        assert_eq!(sn_quotient_count(prime(3), 1).unwrap(), 2);
        assert_eq!(sn_quotient_count(prime(3), 2).unwrap(), 12);
        assert_eq!(rotation_fixed_points(prime(5), 2, 3), 0);
        assert!(sn_quotient_count(prime(7), 1).is_err());
    }

    #[test]
    fn polynomials() {
        let b = BivarPoly::one_minus_u_one_minus_v();
        assert_eq!(invariant_epoly_fixed_locus(&mp(2, 2, 1)), b.shift(1, 1));
        assert_eq!(
            invariant_epoly_fixed_locus(&mp(3, 2, 1)),
            b.pow(2).scale(&BigInt::from(2)).shift(2, 2)
        );
        assert_eq!(
            invariant_epoly_fixed_locus(&mp(2, 2, 2)),
            b.scale(&BigInt::from(2)).shift(1, 1)
        );
        assert_eq!(stringy_gamma_sum(&mp(2, 2, 1)), b.scale(&BigInt::from(15)).shift(4, 4));
        assert_eq!(
            stringy_gamma_sum(&mp(3, 2, 1)),
            b.pow(2).scale(&BigInt::from(160)).shift(11, 11)
        );
    }
}
