//! Walls in the space of full-flag parabolic weights, genericity, seeded
//! sampling of generic weights, and the weight rotation obtained by tensoring
//! with a parabolic line bundle.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{parse_rat, rat, rat_int, rat_to_string, Rat};
use crate::moduli::ModuliParams;

/// Increasing weights `alpha_1(p) < ... < alpha_n(p)` in `[0, 1)` at each marked point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    points: Vec<Vec<Rat>>,
}

impl WeightSystem {
    pub fn new(points: Vec<Vec<Rat>>) -> Result<Self> {
        let n = points.first().map(Vec::len).unwrap_or(0);
        if points.is_empty() || n < 2 {
            return Err(Error::InvalidWeights("need at least one point with two weights".into()));
        }
        for (i, pt) in points.iter().enumerate() {
            if pt.len() != n {
                return Err(Error::InvalidWeights(format!(
                    "point {i} has {} weights, expected {n}",
                    pt.len()
                )));
            }
            if pt.iter().any(|a| a.is_negative() || *a >= Rat::one()) {
                return Err(Error::InvalidWeights(format!("point {i} has a weight outside [0, 1)")));
            }
            if pt.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidWeights(format!("weights at point {i} are not strictly increasing")));
            }
        }
        Ok(Self { points })
    }

    /// Parses `[["1/10", "1/2"], ...]`-shaped string data.
    pub fn from_strings<S: AsRef<str>>(points: &[Vec<S>]) -> Result<Self> {
        let parsed = points
            .iter()
            .map(|pt| pt.iter().map(|s| parse_rat(s.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn rank(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, p: usize) -> &[Rat] {
        &self.points[p]
    }

    pub fn points(&self) -> &[Vec<Rat>] {
        &self.points
    }

    /// `alpha_i(p)` with `i` 1-based.
    pub fn alpha(&self, p: usize, i: usize) -> &Rat {
        &self.points[p][i - 1]
    }

    pub fn max_weight(&self) -> Rat {
        self.points
            .iter()
            .map(|pt| pt[pt.len() - 1].clone())
            .max()
            .expect("non-empty")
    }

    pub fn check_params(&self, p: &ModuliParams) -> Result<()> {
        if self.num_points() != p.k() as usize || self.rank() != p.n() as usize {
            return Err(Error::InvalidWeights(format!(
                "weights have shape {}x{}, parameters need {}x{}",
                self.num_points(),
                self.rank(),
                p.k(),
                p.n()
            )));
        }
        Ok(())
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|pt| pt.iter().map(rat_to_string).collect())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct WeightsJson {
    points: Vec<Vec<String>>,
}

impl Serialize for WeightSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeightsJson {
            points: self.to_strings(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = WeightsJson::deserialize(d)?;
        WeightSystem::from_strings(&raw.points).map_err(serde::de::Error::custom)
    }
}

/// Numerical wall datum: a rank `nprime` subbundle whose induced weights at
/// point `p` are those indexed by `subsets[p]` (1-based), and degree `dprime`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Wall {
    pub nprime: u32,
    pub subsets: Vec<Vec<u32>>,
    pub dprime: i64,
}

impl Wall {
    /// `n * sum_{i in J_p} alpha_i(p) - n' * sum_i alpha_i(p)`, summed over points.
    fn weight_side(&self, w: &WeightSystem) -> Rat {
        let n = rat_int(w.rank() as i64);
        let np = rat_int(self.nprime as i64);
        let mut acc = Rat::zero();
        for (p, sub) in self.subsets.iter().enumerate() {
            let inner: Rat = sub.iter().map(|&i| w.alpha(p, i as usize).clone()).sum();
            let total: Rat = w.point(p).iter().cloned().sum();
            acc += &n * inner - &np * total;
        }
        acc
    }

    /// Whether `w` satisfies `n(d' + sum_J alpha) = n'(d + sum alpha)`.
    pub fn contains(&self, w: &WeightSystem, d: i64) -> bool {
        let n = w.rank() as i64;
        self.weight_side(w) == rat_int(self.nprime as i64 * d - n * self.dprime)
    }
}

/// Size-`r` subsets of `1..=n` in lexicographic order.
fn subsets(n: u32, r: u32) -> Vec<Vec<u32>> {
    fn rec(start: u32, n: u32, r: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r as usize {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x);
            rec(x + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, r, &mut Vec::new(), &mut out);
    out
}

/// Range of `n |J cap top r| - n' r` over `r = 0..=n`: the values of the
/// per-point wall functional at the vertices of the ordered simplex.
fn vertex_range(n: u32, nprime: u32, sub: &[u32]) -> (i64, i64) {
    let mut lo = 0i64;
    let mut hi = 0i64;
    for r in 1..=n {
        let top = sub.iter().filter(|&&i| i > n - r).count() as i64;
        let v = n as i64 * top - nprime as i64 * r as i64;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn for_each_tuple<F: FnMut(&[usize])>(radix: usize, len: usize, mut f: F) {
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < radix {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// All numerical walls meeting the weight region `0 <= alpha_1 < ... < alpha_n < 1`.
///
/// The wall functional maps the region onto the open interval between the
/// sums of its per-point vertex minima and maxima, so a wall is kept iff
/// `n'd - nd'` lies strictly inside that interval.
pub fn enumerate_walls(p: &ModuliParams) -> Vec<Wall> {
    let n = p.n();
    let k = p.k() as usize;
    let mut walls = Vec::new();
    for nprime in 1..n {
        let subs = subsets(n, nprime);
        let ranges: Vec<(i64, i64)> = subs.iter().map(|s| vertex_range(n, nprime, s)).collect();
        for_each_tuple(subs.len(), k, |idx| {
            let lo: i64 = idx.iter().map(|&i| ranges[i].0).sum();
            let hi: i64 = idx.iter().map(|&i| ranges[i].1).sum();
            // lo < n'd - n d' < hi
            let target = nprime as i64 * p.d();
            let nn = n as i64;
            let dmin = Integer::div_floor(&(target - hi), &nn) + 1;
            let dmax = Integer::div_ceil(&(target - lo), &nn) - 1;
            for dprime in dmin..=dmax {
                let v = target - nn * dprime;
                if lo < v && v < hi {
                    walls.push(Wall {
                        nprime,
                        subsets: idx.iter().map(|&i| subs[i].clone()).collect(),
                        dprime,
                    });
                }
            }
        });
    }
    walls.sort();
    walls
}

/// True iff `w` lies on none of the walls of `enumerate_walls(p)`.
pub fn is_generic(w: &WeightSystem, p: &ModuliParams) -> bool {
    is_generic_against(w, p, &enumerate_walls(p))
}

pub fn is_generic_against(w: &WeightSystem, p: &ModuliParams, walls: &[Wall]) -> bool {
    let mut cache: HashMap<(u32, &[Vec<u32>]), Rat> = HashMap::new();
    let n = p.n() as i64;
    for wall in walls {
        let lhs = cache
            .entry((wall.nprime, wall.subsets.as_slice()))
            .or_insert_with(|| wall.weight_side(w));
        if *lhs == rat_int(wall.nprime as i64 * p.d() - n * wall.dprime) {
            return false;
        }
    }
    true
}

const SAMPLE_DENOMINATOR: u64 = 1_000_000;
const SAMPLE_ATTEMPTS: usize = 1000;

/// Deterministic generic weights below `scale`, with denominator `10^6`.
pub fn sample_generic_weights(p: &ModuliParams, seed: u64, scale: &Rat) -> Result<WeightSystem> {
    if !scale.is_positive() || *scale > Rat::one() {
        return Err(Error::InvalidParams(format!("scale must lie in (0, 1], got {scale}")));
    }
    let n = p.n() as usize;
    // numerators x with x / 10^6 < scale
    let bound = (scale * rat_int(SAMPLE_DENOMINATOR as i64)).ceil().to_integer();
    let bound = bound.to_usize().expect("bounded by 10^6");
    if bound < n {
        return Err(Error::InvalidParams(format!(
            "scale {scale} leaves fewer than {n} distinct weights at denominator {SAMPLE_DENOMINATOR}"
        )));
    }
    let walls = enumerate_walls(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLE_ATTEMPTS {
        let points = (0..p.k())
            .map(|_| {
                let mut xs = sample(&mut rng, bound, n).into_vec();
                xs.sort_unstable();
                xs.into_iter()
                    .map(|x| rat(x as i64, SAMPLE_DENOMINATOR as i64))
                    .collect()
            })
            .collect();
        let w = WeightSystem::new(points)?;
        if is_generic_against(&w, p, &walls) {
            return Ok(w);
        }
    }
    Err(Error::SamplingExhausted {
        attempts: SAMPLE_ATTEMPTS,
    })
}

/// Integer part of the stability slack contributed by a single point whose
/// word has descent indicators `desc` (0/1, length `n-1`), for the subbundle `l`.
pub(crate) fn point_integer_slack(n: i64, l: i64, desc: &[i64]) -> i64 {
    let mut e = n * (n - l + 1) * (l - 1) / 2;
    for (j0, &s) in desc.iter().enumerate() {
        let j = j0 as i64 + 1;
        if j < l {
            e -= (n - l + 1) * j * s;
        } else {
            e -= (l - 1) * (n - j) * s;
        }
    }
    e
}

/// Slack of the `m`-dependent part at `m_j = 2g-2`: zero, by construction,
/// and positive at every other box corner.
fn box_slack_ok(p: &ModuliParams) -> bool {
    let n = p.n() as i64;
    let top = 2 * p.g() as i64 - 2;
    let mut ok = true;
    for l in 2..=n {
        let bound = (p.g() as i64 - 1) * n * (n - l + 1) * (l - 1);
        crate::cstar_fixed::for_each_corner(n as usize - 1, top, |m| {
            let lhs = crate::cstar_fixed::stability_lhs(n, l, m);
            if lhs > bound {
                ok = false;
            }
        });
    }
    ok
}

/// Largest word length checked exhaustively by the margin certificate.
const MARGIN_EXHAUSTIVE_MAX: u32 = 7;

/// Checks that every generic weight system with all weights below `eps`
/// makes each `m` in `[0, 2g-2]^(n-1)` stable.
///
/// The `m` part is checked at the box corners. The remaining slack splits
/// over marked points; per word it is an integer `e >= 0`, zero only for the
/// decreasing word (whose weight contribution is strictly positive), plus a
/// weight term bounded below by `-n(n-l+1)eps`.
pub fn certify_margin(p: &ModuliParams, eps: &Rat) -> bool {
    if !eps.is_positive() || !box_slack_ok(p) {
        return false;
    }
    let n = p.n();
    if n > MARGIN_EXHAUSTIVE_MAX {
        let nn = n as i64;
        return *eps <= rat(1, nn * (nn - 1));
    }
    let nn = n as i64;
    let words = crate::cstar_fixed::all_words(n);
    for l in 2..=nn {
        let need = rat_int(nn * (nn - l + 1)) * eps;
        for w in &words {
            let desc: Vec<i64> = w.descents().iter().map(|&b| b as i64).collect();
            let e = point_integer_slack(nn, l, &desc);
            let decreasing = desc.iter().all(|&b| b == 1);
            if e < 0 || (e == 0 && !decreasing) || (e > 0 && rat_int(e) < need) {
                return false;
            }
        }
    }
    true
}

/// A certified small-weight bound: `1 / (n(n-1))`.
pub fn small_weight_margin(p: &ModuliParams) -> Rat {
    let n = p.n() as i64;
    let eps = rat(1, n * (n - 1));
    assert!(certify_margin(p, &eps), "margin certificate failed for {p:?}");
    eps
}

/// Reads a weight scale: `"margin"` for the certified bound, otherwise a rational.
pub fn resolve_scale(s: &str, p: &ModuliParams) -> Result<Rat> {
    if s.trim() == "margin" {
        Ok(small_weight_margin(p))
    } else {
        parse_rat(s)
    }
}

/// Adds `beta(p)` to every weight at `p`, reducing mod 1, and returns the
/// sorted new weights together with the number of wrapped weights per point.
pub fn tensor_transform(w: &WeightSystem, beta: &[Rat]) -> Result<(WeightSystem, Vec<u32>)> {
    if beta.len() != w.num_points() {
        return Err(Error::DimensionMismatch(format!(
            "{} shifts for {} points",
            beta.len(),
            w.num_points()
        )));
    }
    let one = Rat::one();
    let mut points = Vec::with_capacity(w.num_points());
    let mut wraps = Vec::with_capacity(w.num_points());
    for (p, b) in beta.iter().enumerate() {
        if b.is_negative() || *b >= one {
            return Err(Error::InvalidWeights(format!("shift at point {p} is outside [0, 1)")));
        }
        let mut shifted: Vec<(Rat, usize)> = w
            .point(p)
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let x = a + b;
                if x >= one {
                    (x - &one, i)
                } else {
                    (x, i)
                }
            })
            .collect();
        let wrapped = w.point(p).iter().filter(|a| *a + b >= one).count();
        shifted.sort();
        if shifted.windows(2).any(|s| s[0].0 == s[1].0) {
            return Err(Error::Collision { point: p });
        }
        let n = shifted.len();
        let start = shifted[0].1;
        if shifted.iter().enumerate().any(|(pos, (_, i))| *i != (start + pos) % n) {
            return Err(Error::Inconsistent(format!(
                "new ordering at point {p} is not a cyclic shift"
            )));
        }
        points.push(shifted.into_iter().map(|(x, _)| x).collect());
        wraps.push(wrapped as u32);
    }
    Ok((WeightSystem::new(points)?, wraps))
}

/// Degree of `V ⊗ L` for `deg L = ell` after the weight rotation: `d + n ell + wraps`.
pub fn tensor_degree(p: &ModuliParams, ell: i64, wrap_total: u64) -> i64 {
    p.d() + p.n() as i64 * ell + wrap_total as i64
}

/// Midpoint of the interval of shifts at `p0` that wrap exactly `kshift` weights.
pub fn solve_beta_for_degree(w: &WeightSystem, p0: usize, kshift: u32) -> Result<Rat> {
    let n = w.rank();
    if kshift as usize >= n {
        return Err(Error::InvalidParams(format!("shift count {kshift} must be below {n}")));
    }
    if p0 >= w.num_points() {
        return Err(Error::InvalidParams(format!("no marked point {p0}")));
    }
    let one = Rat::one();
    let (lo, hi) = if kshift == 0 {
        (Rat::zero(), &one - w.alpha(p0, n))
    } else {
        let j = n - kshift as usize;
        (&one - w.alpha(p0, j + 1), &one - w.alpha(p0, j))
    };
    Ok((lo + hi) / rat_int(2))
}

/// Shift vector with `b` at `p0` and zero elsewhere.
pub fn beta_at(num_points: usize, p0: usize, b: Rat) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); num_points];
    v[p0] = b;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(n: u32, g: u32, k: u32, d: i64) -> ModuliParams {
        ModuliParams::new(n, g, k, d).unwrap()
    }

    fn ws(points: &[&[(i64, i64)]]) -> WeightSystem {
        WeightSystem::new(
            points
                .iter()
                .map(|pt| pt.iter().map(|&(a, b)| rat(a, b)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn weight_validation() {
        assert!(WeightSystem::new(vec![vec![rat(1, 2), rat(1, 4)]]).is_err());
        assert!(WeightSystem::new(vec![vec![rat(0, 1), rat(1, 1)]]).is_err());
        assert!(WeightSystem::new(vec![vec![rat(1, 4), rat(1, 4)]]).is_err());
        assert!(WeightSystem::from_strings(&[vec!["0.1", "1/2"]]).is_err());
        let w = WeightSystem::from_strings(&[vec!["1/10", "1/2"]]).unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"points":[["1/10","1/2"]]}"#);
    }

    #[test]
    fn walls_small_cases() {
        assert!(enumerate_walls(&mp(2, 2, 1, 0)).is_empty());
        assert!(enumerate_walls(&mp(2, 2, 1, 1)).is_empty());
        let walls = enumerate_walls(&mp(2, 2, 2, 0));
        let w = Wall {
            nprime: 1,
            subsets: vec![vec![2], vec![1]],
            dprime: 0,
        };
        assert!(walls.contains(&w), "{walls:?}");
    }

    #[test]
    fn genericity() {
        let p = mp(2, 2, 1, 0);
        assert!(is_generic(&ws(&[&[(1, 10), (1, 2)]]), &p));
        let p = mp(2, 2, 2, 0);
        assert!(!is_generic(&ws(&[&[(0, 1), (1, 4)], &[(0, 1), (1, 4)]]), &p));
        assert!(is_generic(&ws(&[&[(0, 1), (1, 4)], &[(0, 1), (1, 3)]]), &p));
    }

    #[test]
    fn sampling() {
        let p = mp(3, 2, 1, 0);
        let s = rat(1, 100);
        let a = sample_generic_weights(&p, 1, &s).unwrap();
        assert_eq!(a, sample_generic_weights(&p, 1, &s).unwrap());
        assert!(a.max_weight() < s);
        assert!(is_generic(&a, &p));
        assert!(sample_generic_weights(&p, 1, &rat(0, 1)).is_err());
        assert!(sample_generic_weights(&p, 1, &rat(1, 1_000_000)).is_err());
    }

    #[test]
    fn margin() {
        for (n, g, k) in [(2, 2, 1), (3, 2, 2), (5, 2, 1), (7, 2, 1)] {
            let p = mp(n, g, k, 0);
            let eps = small_weight_margin(&p);
            assert!(certify_margin(&p, &(&eps / rat_int(2))));
        }
        // at n = 2 the per-point slack of the word "12" is 1 - (alpha_2 - alpha_1)
        let p = mp(2, 2, 1, 0);
        assert!(certify_margin(&p, &rat(1, 2)));
        assert!(!certify_margin(&p, &rat(2, 1)));
    }

    #[test]
    fn transform() {
        let w = ws(&[&[(1, 10), (1, 2)]]);
        let (t, wraps) = tensor_transform(&w, &[rat(3, 5)]).unwrap();
        assert_eq!(t, ws(&[&[(1, 10), (7, 10)]]));
        assert_eq!(wraps, vec![1]);
        let (t, wraps) = tensor_transform(&w, &[rat(0, 1)]).unwrap();
        assert_eq!((t, wraps), (w.clone(), vec![0]));

        let w = ws(&[&[(1, 4), (3, 4)]]);
        let (t, wraps) = tensor_transform(&w, &[rat(1, 2)]).unwrap();
        assert_eq!((t, wraps), (w, vec![1]));

        let (t, wraps) = tensor_transform(&ws(&[&[(0, 1), (1, 2)]]), &[rat(1, 2)]).unwrap();
        assert_eq!((t, wraps), (ws(&[&[(0, 1), (1, 2)]]), vec![1]));
        let w = ws(&[&[(0, 1), (1, 3), (2, 3)]]);
        assert!(tensor_transform(&w, &[rat(1, 1)]).is_err());
    }

    #[test]
    fn degrees_and_beta() {
        assert_eq!(tensor_degree(&mp(2, 2, 1, 0), 0, 1), 1);
        assert_eq!(tensor_degree(&mp(3, 2, 1, 3), 2, 0), 9);
        let w = ws(&[&[(1, 10), (1, 2)]]);
        assert_eq!(solve_beta_for_degree(&w, 0, 1).unwrap(), rat(7, 10));
        assert_eq!(solve_beta_for_degree(&w, 0, 0).unwrap(), rat(1, 4));
        let b = solve_beta_for_degree(&w, 0, 1).unwrap();
        let (t, wraps) = tensor_transform(&w, &[b.clone()]).unwrap();
        assert_eq!(wraps, vec![1]);
        let (back, wraps2) = tensor_transform(&t, &[Rat::one() - &b]).unwrap();
        assert_eq!(back, w);
        assert_eq!(wraps[0] + wraps2[0], 2);
        // inverse rotation: wrapping n - kshift more weights makes n in total
        let inv = solve_beta_for_degree(&t, 0, 1).unwrap();
        let (_, wraps3) = tensor_transform(&t, &[inv]).unwrap();
        assert_eq!(tensor_degree(&mp(2, 2, 1, 0), 0, (wraps[0] + wraps3[0]) as u64), 2);
    }
}
