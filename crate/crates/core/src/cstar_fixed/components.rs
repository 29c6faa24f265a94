use std::io::Write;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::perm::{all_words, descent_stats, PermTuple, PermWord};
use crate::chambers::WeightSystem;
use crate::error::{Error, Result};
use crate::exactpoly::{
    big_pow, binom_deg_slice, exact_div, factorial, floor_strict, rat_int, BivarPoly, Rat,
};
use crate::moduli::{dim_moduli, ModuliParams};

/// A fixed component of type `(1, ..., 1)`: the weight distribution `perm`,
/// the degrees `m_j` of the Higgs field divisors, the descent counts `s_j`,
/// and the degree `d_n` of the last line bundle.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentType11 {
    pub perm: PermTuple,
    pub m: Vec<u32>,
    pub s: Vec<u32>,
    pub d_n: i64,
}

impl ComponentType11 {
    /// Degree in which the variant cohomology lives: `sum m_j`.
    pub fn degree(&self) -> u32 {
        self.m.iter().sum()
    }
}

/// `(n-l+1) sum_{j<l} j m_j + (l-1) sum_{j>=l} (n-j) m_j` with `m` 1-based in `j`.
pub(crate) fn stability_lhs(n: i64, l: i64, m: &[i64]) -> i64 {
    m.iter()
        .enumerate()
        .map(|(j0, &mj)| {
            let j = j0 as i64 + 1;
            if j < l {
                (n - l + 1) * j * mj
            } else {
                (l - 1) * (n - j) * mj
            }
        })
        .sum()
}

/// Calls `f` on every vector in `{0, top}^len`.
pub(crate) fn for_each_corner<F: FnMut(&[i64])>(len: usize, top: i64, mut f: F) {
    for mask in 0u64..(1u64 << len) {
        let m: Vec<i64> = (0..len).map(|j| if mask >> j & 1 == 1 { top } else { 0 }).collect();
        f(&m);
    }
}

/// `nu` such that the degree constraint reads `nu + sum_j j m_j = 0 mod n`.
fn constraint_base(p: &ModuliParams, s: &[u32]) -> i64 {
    if p.n() == 2 {
        p.d() + s[0] as i64 - p.k() as i64
    } else {
        p.d() + s.iter().enumerate().map(|(j, &x)| (j as i64 + 1) * x as i64).sum::<i64>()
    }
}

fn weighted_sum(m: &[u32]) -> i64 {
    m.iter().enumerate().map(|(j, &x)| (j as i64 + 1) * x as i64).sum()
}

fn check_shape(m: &[u32], t: &PermTuple, p: &ModuliParams) -> Result<()> {
    let n = p.n() as usize;
    if m.len() != n - 1 || t.rank() != n || t.num_points() != p.k() as usize {
        return Err(Error::DimensionMismatch(format!(
            "need {} degrees and {} words of length {n}",
            n - 1,
            p.k()
        )));
    }
    Ok(())
}

/// The congruence on `(m, s)` forced by the fixed determinant.
///
/// `n >= 3`: `d + sum_j j (m_j + s_j) = 0 mod n`;
/// `n = 2`: `d + m_1 + s_1 - k = 0 mod 2`.
pub fn degree_constraint(m: &[u32], t: &PermTuple, p: &ModuliParams) -> bool {
    let (s, _) = descent_stats(t);
    let n = p.n() as i64;
    if p.n() == 2 {
        (p.d() + m[0] as i64 + s[0] as i64 - p.k() as i64).rem_euclid(2) == 0
    } else {
        let total: i64 = (0..m.len())
            .map(|j| (j as i64 + 1) * (m[j] as i64 + s[j] as i64))
            .sum();
        (p.d() + total).rem_euclid(n) == 0
    }
}

/// Right-hand side of the stability inequality for `V_l`, exactly.
fn stability_rhs(l: i64, s: &[u32], t: &PermTuple, w: &WeightSystem, p: &ModuliParams) -> Rat {
    let n = p.n() as i64;
    let mut rhs = Rat::zero();
    for (pt, word) in t.words.iter().enumerate() {
        let total: Rat = w.point(pt).iter().cloned().sum();
        let tail: Rat = (l as usize..=n as usize)
            .map(|j| w.alpha(pt, word.letter(j) as usize).clone())
            .sum();
        rhs += rat_int(n - l + 1) * total - rat_int(n) * tail;
    }
    rhs += p.half_twist() * rat_int(n * (n - l + 1) * (l - 1));
    let s: Vec<i64> = s.iter().map(|&x| x as i64).collect();
    rhs - rat_int(stability_lhs(n, l, &s))
}

/// Strict stability of the fixed point with data `(m, t)` against every
/// invariant subbundle `V_l = L_l + ... + L_n`, `l = 2..n`.
pub fn stability_check(m: &[u32], t: &PermTuple, w: &WeightSystem, p: &ModuliParams) -> bool {
    let (s, _) = descent_stats(t);
    let n = p.n() as i64;
    let mi: Vec<i64> = m.iter().map(|&x| x as i64).collect();
    (2..=n).all(|l| rat_int(stability_lhs(n, l, &mi)) < stability_rhs(l, &s, t, w, p))
}

/// `d_n` from `n d_n = d + sum_j j (m_j + s_j) - n(n-1)(g-1+k/2)`.
pub fn component_dn(m: &[u32], t: &PermTuple, p: &ModuliParams) -> Result<i64> {
    check_shape(m, t, p)?;
    let (s, _) = descent_stats(t);
    let num = p.d() + weighted_sum(m) + weighted_sum(&s) - p.twist_degree();
    let q = exact_div(&BigInt::from(num), &BigInt::from(p.n()), "n * d_n")?;
    Ok(q.to_i64().expect("small"))
}

/// Per-tuple data for the integer fast path of the stability test.
struct TupleData {
    words: Vec<usize>,
    s: Vec<u32>,
    /// Largest admissible `LHS_l`, indexed by `l - 2`.
    thresholds: Vec<i64>,
    base: i64,
}

struct Enumerator<'a> {
    p: &'a ModuliParams,
    words: Vec<PermWord>,
    /// `weight_part[pt][word][l - 2]`
    weight_part: Vec<Vec<Vec<Rat>>>,
}

impl<'a> Enumerator<'a> {
    fn new(p: &'a ModuliParams, w: &WeightSystem) -> Self {
        let n = p.n() as i64;
        let words = all_words(p.n());
        let weight_part = (0..p.k() as usize)
            .map(|pt| {
                let total: Rat = w.point(pt).iter().cloned().sum();
                words
                    .iter()
                    .map(|word| {
                        (2..=n)
                            .map(|l| {
                                let tail: Rat = (l as usize..=n as usize)
                                    .map(|j| w.alpha(pt, word.letter(j) as usize).clone())
                                    .sum();
                                rat_int(n - l + 1) * &total - rat_int(n) * tail
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            p,
            words,
            weight_part,
        }
    }

    fn tuple_count(&self) -> usize {
        self.words.len().pow(self.p.k())
    }

    /// Mixed-radix decoding, first point most significant.
    fn word_indices(&self, mut idx: usize) -> Vec<usize> {
        let r = self.words.len();
        let k = self.p.k() as usize;
        let mut out = vec![0; k];
        for slot in out.iter_mut().rev() {
            *slot = idx % r;
            idx /= r;
        }
        out
    }

    fn tuple(&self, words: &[usize]) -> PermTuple {
        PermTuple {
            words: words.iter().map(|&i| self.words[i].clone()).collect(),
        }
    }

    fn tuple_data(&self, idx: usize) -> TupleData {
        let p = self.p;
        let n = p.n() as i64;
        let words = self.word_indices(idx);
        let mut s = vec![0u32; n as usize - 1];
        for &wi in &words {
            for (j, d) in self.words[wi].descents().into_iter().enumerate() {
                s[j] += d;
            }
        }
        let si: Vec<i64> = s.iter().map(|&x| x as i64).collect();
        let thresholds = (2..=n)
            .map(|l| {
                let mut r: Rat = words
                    .iter()
                    .enumerate()
                    .map(|(pt, &wi)| self.weight_part[pt][wi][l as usize - 2].clone())
                    .sum();
                r += p.half_twist() * rat_int(n * (n - l + 1) * (l - 1));
                r -= rat_int(stability_lhs(n, l, &si));
                floor_strict(&r).to_i64().expect("small threshold")
            })
            .collect();
        let base = constraint_base(p, &s);
        TupleData {
            words,
            s,
            thresholds,
            base,
        }
    }
}

impl TupleData {
    fn admissible(&self, n: i64, m: &[i64]) -> bool {
        let msum: i64 = m.iter().enumerate().map(|(j, &x)| (j as i64 + 1) * x).sum();
        if (self.base + msum).rem_euclid(n) != 0 {
            return false;
        }
        (2..=n).all(|l| stability_lhs(n, l, m) <= self.thresholds[l as usize - 2])
    }

    /// All stable `m` satisfying the degree constraint, in lexicographic order.
    /// The `l = 2` inequality has positive coefficients on every `m_j`, which bounds the search.
    fn for_each_admissible<F: FnMut(&[i64])>(&self, n: i64, mut f: F) {
        let len = n as usize - 1;
        let coef: Vec<i64> = (1..=len as i64).map(|j| if j < 2 { (n - 1) * j } else { n - j }).collect();
        let budget = self.thresholds[0];
        if budget < 0 {
            return;
        }
        let mut m = vec![0i64; len];
        fn rec<F: FnMut(&[i64])>(
            pos: usize,
            left: i64,
            coef: &[i64],
            m: &mut Vec<i64>,
            data: &TupleData,
            n: i64,
            f: &mut F,
        ) {
            if pos == m.len() {
                if data.admissible(n, m) {
                    f(m);
                }
                return;
            }
            let mut x = 0;
            while x * coef[pos] <= left {
                m[pos] = x;
                rec(pos + 1, left - x * coef[pos], coef, m, data, n, f);
                x += 1;
            }
            m[pos] = 0;
        }
        rec(0, budget, &coef, &mut m, self, n, &mut f);
    }
}

fn to_component(e: &Enumerator, data: &TupleData, m: &[i64]) -> ComponentType11 {
    let p = e.p;
    let perm = e.tuple(&data.words);
    let m: Vec<u32> = m.iter().map(|&x| x as u32).collect();
    let d_n = component_dn(&m, &perm, p).expect("degree constraint makes d_n integral");
    ComponentType11 {
        perm,
        m,
        s: data.s.clone(),
        d_n,
    }
}

/// Every fixed component of type `(1, ..., 1)` for the weights `w`, ordered
/// lexicographically by `(perm, m)`. Components with some `m_j > 2g - 2` are
/// included; their variant contribution vanishes.
pub fn enumerate_components(p: &ModuliParams, w: &WeightSystem) -> Vec<ComponentType11> {
    let e = Enumerator::new(p, w);
    let n = p.n() as i64;
    let chunks: Vec<Vec<ComponentType11>> = (0..e.tuple_count())
        .into_par_iter()
        .map(|idx| {
            let data = e.tuple_data(idx);
            let mut out = Vec::new();
            data.for_each_admissible(n, |m| out.push(to_component(&e, &data, m)));
            out
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// Number of components `enumerate_components` would return.
pub fn count_components(p: &ModuliParams, w: &WeightSystem) -> u64 {
    let e = Enumerator::new(p, w);
    let n = p.n() as i64;
    (0..e.tuple_count())
        .into_par_iter()
        .map(|idx| {
            let data = e.tuple_data(idx);
            let mut c = 0u64;
            data.for_each_admissible(n, |_| c += 1);
            c
        })
        .sum()
}

/// `n^(2g) - 1`: the number of non-trivial torsion points.
pub(crate) fn nontrivial_torsion(p: &ModuliParams) -> BigInt {
    big_pow(p.n() as u64, 2 * p.g()) - 1
}

fn slices_product(g: u32, m: &[u32]) -> BivarPoly {
    m.iter()
        .fold(BivarPoly::one(), |acc, &mj| &acc * &binom_deg_slice(g - 1, mj))
}

/// `(n^(2g) - 1) prod_j slice(g-1, m_j)`, the variant E-polynomial of one component.
pub fn component_variant_epoly(c: &ComponentType11, p: &ModuliParams) -> BivarPoly {
    slices_product(p.g(), &c.m).scale(&nontrivial_torsion(p))
}

fn half_dim(p: &ModuliParams) -> u32 {
    (dim_moduli(p) / 2) as u32
}

/// Sum of the variant E-polynomials of all components times `(uv)^(dim/2)`,
/// enumerating `m` over the box `[0, 2g-2]^(n-1)` outside which every
/// contribution vanishes.
pub fn variant_total_bruteforce(p: &ModuliParams, w: &WeightSystem) -> BivarPoly {
    let e = Enumerator::new(p, w);
    let n = p.n() as i64;
    let side = 2 * p.g() as usize - 1;
    let len = n as usize - 1;
    let cells = side.pow(len as u32);
    let decode = |mut c: usize| -> Vec<i64> {
        let mut m = vec![0i64; len];
        for slot in m.iter_mut().rev() {
            *slot = (c % side) as i64;
            c /= side;
        }
        m
    };
    let grid: Vec<Vec<i64>> = (0..cells).map(decode).collect();
    let counts = (0..e.tuple_count())
        .into_par_iter()
        .fold(
            || vec![0u64; cells],
            |mut acc, idx| {
                let data = e.tuple_data(idx);
                for (c, m) in grid.iter().enumerate() {
                    if data.admissible(n, m) {
                        acc[c] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut total = BivarPoly::zero();
    for (c, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let m: Vec<u32> = grid[c].iter().map(|&x| x as u32).collect();
        total += &slices_product(p.g(), &m).scale(&BigInt::from(count));
    }
    total.scale(&nontrivial_torsion(p)).shift(half_dim(p), half_dim(p))
}

/// Same total, summed over the full component census.
pub fn variant_total_census(p: &ModuliParams, w: &WeightSystem) -> BivarPoly {
    let comps = enumerate_components(p, w);
    let mut total = BivarPoly::zero();
    for c in &comps {
        total += &component_variant_epoly(c, p);
    }
    total.shift(half_dim(p), half_dim(p))
}

/// `((n^(2g)-1)/n) (n!)^k (uv)^((n^2-1)(g-1) + k n(n-1)/2) ((1-u)(1-v))^((n-1)(g-1))`.
pub fn variant_closed_form(p: &ModuliParams) -> BivarPoly {
    let n = p.n();
    let g = p.g();
    let k = p.k();
    let num = nontrivial_torsion(p) * num_traits::pow(factorial(n), k as usize);
    let lead = exact_div(&num, &BigInt::from(n), "leading coefficient").expect("n divides n!");
    let e = (n * n - 1) * (g - 1) + k * n * (n - 1) / 2;
    BivarPoly::one_minus_u_one_minus_v()
        .pow((n - 1) * (g - 1))
        .scale(&lead)
        .shift(e, e)
}

/// Writes one CSV row per component.
pub fn write_census_csv<W: Write>(comps: &[ComponentType11], out: W) -> Result<()> {
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
    let mut wtr = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    wtr.write_record(["perm", "m", "s", "d_n", "degree"]).map_err(io)?;
    for c in comps {
        wtr.write_record([
            c.perm.to_string(),
            join(&c.m),
            join(&c.s),
            c.d_n.to_string(),
            c.degree().to_string(),
        ])
        .map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chambers::{sample_generic_weights, small_weight_margin};
    use crate::exactpoly::rat;

    fn mp(n: u32, g: u32, k: u32, d: i64) -> ModuliParams {
        ModuliParams::new(n, g, k, d).unwrap()
    }

    fn tuple(ws: &[&str]) -> PermTuple {
        PermTuple::new(ws.iter().map(|w| w.parse().unwrap()).collect()).unwrap()
    }

    fn w2() -> WeightSystem {
        WeightSystem::new(vec![vec![rat(1, 10), rat(1, 2)]]).unwrap()
    }

    #[test]
    fn constraint() {
        let p = mp(2, 2, 1, 0);
        assert!(degree_constraint(&[1], &tuple(&["12"]), &p));
        assert!(!degree_constraint(&[0], &tuple(&["12"]), &p));
        assert!(degree_constraint(&[1, 1], &tuple(&["123"]), &mp(3, 2, 1, 0)));
    }

    #[test]
    fn stability() {
        let p = mp(2, 2, 1, 0);
        assert!(stability_check(&[2], &tuple(&["21"]), &w2(), &p));
        assert!(!stability_check(&[4], &tuple(&["21"]), &w2(), &p));
        assert!(stability_check(&[1], &tuple(&["12"]), &w2(), &p));
        assert_eq!(stability_rhs(2, &[1], &tuple(&["21"]), &w2(), &p), rat(12, 5));
        assert_eq!(stability_rhs(2, &[0], &tuple(&["12"]), &w2(), &p), rat(13, 5));
    }

    #[test]
    fn last_degree() {
        let p = mp(2, 2, 1, 0);
        assert_eq!(component_dn(&[1], &tuple(&["12"]), &p).unwrap(), -1);
        assert_eq!(component_dn(&[0], &tuple(&["21"]), &p).unwrap(), -1);
        assert_eq!(component_dn(&[1, 1], &tuple(&["123"]), &mp(3, 2, 1, 0)).unwrap(), -2);
        assert!(component_dn(&[0], &tuple(&["12"]), &p).is_err());
    }

    #[test]
    fn census_rank_two() {
        let p = mp(2, 2, 1, 0);
        let comps = enumerate_components(&p, &w2());
        let keys: Vec<(String, u32)> = comps.iter().map(|c| (c.perm.to_string(), c.m[0])).collect();
        assert_eq!(
            keys,
            vec![("12".into(), 1), ("21".into(), 0), ("21".into(), 2)]
        );
        let p1 = p.with_degree(1);
        let keys: Vec<(String, u32)> = enumerate_components(&p1, &w2())
            .iter()
            .map(|c| (c.perm.to_string(), c.m[0]))
            .collect();
        assert_eq!(keys, vec![("12".into(), 0), ("12".into(), 2), ("21".into(), 1)]);
        assert_eq!(count_components(&p, &w2()), 3);
    }

    #[test]
    fn component_polys() {
        let p = mp(2, 2, 1, 0);
        let c = |m: u32| ComponentType11 {
            perm: tuple(&["12"]),
            m: vec![m],
            s: vec![0],
            d_n: 0,
        };
        assert_eq!(
            component_variant_epoly(&c(1), &p),
            BivarPoly::from_terms([(1, 0, -15), (0, 1, -15)])
        );
        assert_eq!(component_variant_epoly(&c(0), &p), BivarPoly::constant(15));
        assert!(component_variant_epoly(&c(3), &p).is_zero());
    }

    #[test]
    fn totals_small() {
        let target = BivarPoly::one_minus_u_one_minus_v().scale(&BigInt::from(15)).shift(4, 4);
        for d in [0, 1] {
            let p = mp(2, 2, 1, d);
            assert_eq!(variant_total_bruteforce(&p, &w2()), target);
            assert_eq!(variant_total_census(&p, &w2()), target);
        }
        assert_eq!(variant_closed_form(&mp(2, 2, 1, 0)), target);
        let c3 = variant_closed_form(&mp(3, 2, 1, 0));
        assert_eq!(
            c3,
            BivarPoly::one_minus_u_one_minus_v().pow(2).scale(&BigInt::from(160)).shift(11, 11)
        );
        let c = variant_closed_form(&mp(2, 3, 2, 0));
        assert_eq!(
            c,
            BivarPoly::one_minus_u_one_minus_v().pow(2).scale(&BigInt::from(126)).shift(8, 8)
        );
        let p = mp(3, 2, 1, 0);
        let w = sample_generic_weights(&p, 3, &small_weight_margin(&p)).unwrap();
        assert_eq!(variant_total_bruteforce(&p, &w), c3);
        assert_eq!(variant_total_census(&p, &w), c3);
    }

    #[test]
    fn csv_rows() {
        let p = mp(2, 2, 1, 0);
        let mut buf = Vec::new();
        write_census_csv(&enumerate_components(&p, &w2()), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("perm,m,s,d_n,degree"));
        assert_eq!(text.lines().nth(1), Some("12,1,0,-1,1"));
    }
}
