//! Discrete instance data and the closed-form dimension and degree formulas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{is_nonnegative, rat, rat_int, rat_to_i64, Prime, Rat};

/// Rank `n` (prime), genus `g >= 2`, number of marked points `k >= 1`, and
/// the degree `d` of the fixed determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModuliParams {
    n: Prime,
    g: u32,
    k: u32,
    d: i64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct RawParams {
    n: u32,
    g: u32,
    marked: u32,
    deg: i64,
}

impl TryFrom<RawParams> for ModuliParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        ModuliParams::new(r.n, r.g, r.marked, r.deg)
    }
}

impl From<ModuliParams> for RawParams {
    fn from(p: ModuliParams) -> Self {
        RawParams {
            n: p.n(),
            g: p.g,
            marked: p.k,
            deg: p.d,
        }
    }
}

impl ModuliParams {
    pub fn new(n: u32, g: u32, k: u32, d: i64) -> Result<Self> {
        let n = Prime::new(n)?;
        if g < 2 {
            return Err(Error::InvalidParams(format!("genus must be at least 2, got {g}")));
        }
        if k < 1 {
            return Err(Error::InvalidParams("at least one marked point is required".into()));
        }
        Ok(Self { n, g, k, d })
    }

    pub fn n(&self) -> u32 {
        self.n.get()
    }

    pub fn prime(&self) -> Prime {
        self.n
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    /// Number of marked points.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn with_degree(&self, d: i64) -> Self {
        Self { d, ..*self }
    }

    /// `g - 1 + k/2` as an exact rational.
    pub(crate) fn half_twist(&self) -> Rat {
        rat_int(self.g as i64 - 1) + rat(self.k as i64, 2)
    }

    /// `n(n-1)(g-1+k/2)`, asserted integral.
    pub(crate) fn twist_degree(&self) -> i64 {
        let n = self.n() as i64;
        let r = rat_int(n * (n - 1)) * self.half_twist();
        rat_to_i64(&r, "n(n-1)(g-1+k/2)").expect("n(n-1) is even")
    }
}

pub fn dim_moduli(p: &ModuliParams) -> u64 {
    let n = p.n() as u64;
    let g = p.g() as u64;
    let k = p.k() as u64;
    2 * (n * n - 1) * (g - 1) + k * n * (n - 1)
}

pub fn dim_hitchin_base(p: &ModuliParams) -> u64 {
    let n = p.n() as i64;
    let r = rat_int((n * n - 1) * (p.g() as i64 - 1)) + rat(n * (n - 1) * p.k() as i64, 2);
    rat_to_i64(&r, "dim of the Hitchin base").expect("n(n-1) is even") as u64
}

/// Degree of the line bundles on the spectral curve: `d + n(n-1)(g-1+k/2)`.
pub fn spectral_fiber_degree(p: &ModuliParams) -> i64 {
    p.d() + p.twist_degree()
}

/// Genus of an unramified `n`-sheeted cover.
pub fn cover_genus(p: &ModuliParams) -> u64 {
    p.n() as u64 * (p.g() as u64 - 1) + 1
}

pub fn prym_dim(p: &ModuliParams) -> u64 {
    (p.n() as u64 - 1) * (p.g() as u64 - 1)
}

/// Rank, degree and total weight of a parabolic bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParabolicSummary {
    pub rank: u32,
    pub degree: i64,
    pub weight_total: Rat,
}

impl ParabolicSummary {
    pub fn new(rank: u32, degree: i64, weight_total: Rat) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidParams("rank must be positive".into()));
        }
        if !is_nonnegative(&weight_total) {
            return Err(Error::InvalidParams("total weight must be non-negative".into()));
        }
        Ok(Self {
            rank,
            degree,
            weight_total,
        })
    }
}

pub fn par_slope(s: &ParabolicSummary) -> Rat {
    (rat_int(s.degree) + &s.weight_total) / rat_int(s.rank as i64)
}

/// A line-bundle slot `K^a (bD)` of the Hitchin-section bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Twist {
    canonical: i64,
    divisor: i64,
}

impl Twist {
    fn degree(self, g: u32, k: u32) -> i64 {
        self.canonical * (2 * g as i64 - 2) + self.divisor * k as i64
    }
}

/// Non-zero entry of the Higgs field template: it maps `col` to `row`
/// and is a section of `section`.
#[derive(Clone, Copy, Debug)]
struct Entry {
    row: usize,
    col: usize,
    section: Twist,
}

/// Combinatorial model of the Hitchin-section Higgs bundle.
struct SectionTemplate {
    slots: Vec<Twist>,
    entries: Vec<Entry>,
    /// `flag[t]` lists the slots spanning the `t`-th flag step; step 0 is all of `V`.
    flag: Vec<Vec<usize>>,
}

impl SectionTemplate {
    fn new(n: usize, reversed_flag: bool) -> Self {
        // slot i (0-based) is K(D)^(i+1-n)
        let slots: Vec<Twist> = (0..n)
            .map(|i| {
                let e = i as i64 + 1 - n as i64;
                Twist {
                    canonical: e,
                    divisor: e,
                }
            })
            .collect();
        let mut entries = Vec::new();
        for i in 0..n - 1 {
            entries.push(Entry {
                row: i,
                col: i + 1,
                section: Twist {
                    canonical: 0,
                    divisor: 0,
                },
            });
        }
        // bottom row: s_i with i = n - col (0-based col), s_i in K^i((i-1)D)
        for col in 0..n - 1 {
            let i = (n - col) as i64;
            entries.push(Entry {
                row: n - 1,
                col,
                section: Twist {
                    canonical: i,
                    divisor: i - 1,
                },
            });
        }
        let flag = (0..n)
            .map(|t| {
                if reversed_flag {
                    (t..n).collect()
                } else {
                    (0..n - t).collect()
                }
            })
            .collect();
        Self {
            slots,
            entries,
            flag,
        }
    }

    fn hom_twist(&self, e: &Entry) -> Twist {
        // Hom(L_col, L_row ⊗ K(D))
        let (r, c) = (self.slots[e.row], self.slots[e.col]);
        Twist {
            canonical: r.canonical - c.canonical + 1,
            divisor: r.divisor - c.divisor + 1,
        }
    }

    fn check(&self, g: u32, k: u32) -> bool {
        let n = self.slots.len();
        for e in &self.entries {
            let target = self.hom_twist(e);
            if target.canonical != e.section.canonical || e.section.divisor > target.divisor {
                return false;
            }
            let residue_vanishes = e.section.divisor < target.divisor;
            for t in 0..n {
                let next: &[usize] = if t + 1 < n { &self.flag[t + 1] } else { &[] };
                if self.flag[t].contains(&e.col) && !next.contains(&e.row) && !residue_vanishes {
                    return false;
                }
            }
        }
        let det: i64 = self.slots.iter().map(|s| s.degree(g, k)).sum();
        let nn = n as i64;
        det == -(nn * (nn - 1) / 2) * (2 * g as i64 - 2 + k as i64)
    }
}

/// Checks that the Hitchin-section template is strongly parabolic: every
/// entry either lowers the flag or has vanishing residue at the marked points,
/// and the slot degrees add up to `deg K(D)^(-n(n-1)/2)`.
pub fn hitchin_section_check(p: &ModuliParams) -> bool {
    SectionTemplate::new(p.n() as usize, false).check(p.g(), p.k())
}

/// Same check with the flag read from the `O` end; expected to fail.
#[cfg(test)]
pub(crate) fn hitchin_section_check_reversed(p: &ModuliParams) -> bool {
    SectionTemplate::new(p.n() as usize, true).check(p.g(), p.k())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(n: u32, g: u32, k: u32, d: i64) -> ModuliParams {
        ModuliParams::new(n, g, k, d).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(ModuliParams::new(4, 2, 1, 0), Err(Error::NotPrime(4)));
        assert!(ModuliParams::new(2, 1, 1, 0).is_err());
        assert!(ModuliParams::new(2, 2, 0, 0).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_moduli(&mp(2, 2, 1, 0)), 8);
        assert_eq!(dim_moduli(&mp(3, 2, 1, 0)), 22);
        assert_eq!(dim_hitchin_base(&mp(2, 2, 1, 0)), 4);
        assert_eq!(dim_hitchin_base(&mp(3, 2, 1, 0)), 11);
    }

    #[test]
    fn fiber_degree() {
        assert_eq!(spectral_fiber_degree(&mp(2, 2, 1, 0)), 3);
        assert_eq!(spectral_fiber_degree(&mp(3, 2, 2, 1)), 13);
        assert_eq!(spectral_fiber_degree(&mp(2, 2, 2, -4)), 0);
    }

    #[test]
    fn cover_and_prym() {
        assert_eq!(cover_genus(&mp(2, 2, 1, 0)), 3);
        assert_eq!(cover_genus(&mp(3, 2, 1, 0)), 4);
        assert_eq!(prym_dim(&mp(2, 2, 1, 0)), 1);
        assert_eq!(prym_dim(&mp(3, 3, 1, 0)), 4);
        let p = mp(2, 2, 1, 0);
        assert_eq!(prym_dim(&p), cover_genus(&p) - p.g() as u64);
    }

    #[test]
    fn slopes() {
        let s = ParabolicSummary::new(2, 0, rat(1, 10) + rat(1, 2)).unwrap();
        assert_eq!(par_slope(&s), rat(3, 10));
        let s = ParabolicSummary::new(1, 3, rat_int(0)).unwrap();
        assert_eq!(par_slope(&s), rat_int(3));
        // pulling back along a degree-n cover multiplies degree and weights by n
        let (n, d, w) = (3u32, 5i64, rat(7, 4));
        let base = ParabolicSummary::new(n, d, w.clone()).unwrap();
        let pulled = ParabolicSummary::new(n, n as i64 * d, rat_int(n as i64) * w).unwrap();
        assert_eq!(par_slope(&pulled), rat_int(n as i64) * par_slope(&base));
        assert!(ParabolicSummary::new(0, 0, rat_int(0)).is_err());
    }

    #[test]
    fn hitchin_section() {
        assert!(hitchin_section_check(&mp(2, 2, 1, 0)));
        assert!(hitchin_section_check(&mp(3, 2, 1, 0)));
        assert!(!hitchin_section_check_reversed(&mp(2, 2, 1, 0)));
    }
}
