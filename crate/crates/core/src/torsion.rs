//! Finite model of the `n`-torsion of the Jacobian, `Z_n^(2g)`, with its
//! alternating pairing, and the actions on the `n` components of a norm fiber.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactpoly::{big_pow, Prime};
use crate::moduli::ModuliParams;

/// Element of `Z_n^(2g)` in coordinates `(e_1..e_g, f_1..f_g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorsionVector {
    n: Prime,
    coords: Vec<u32>,
}

fn inverse_mod(a: u32, n: u32) -> Option<u32> {
    let e = (a as i64).extended_gcd(&(n as i64));
    (e.gcd == 1).then(|| e.x.rem_euclid(n as i64) as u32)
}

impl TorsionVector {
    pub fn new(n: Prime, coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "torsion vectors need an even, positive number of coordinates, got {}",
                coords.len()
            )));
        }
        let nn = n.get() as i64;
        Ok(Self {
            n,
            coords: coords.into_iter().map(|c| c.rem_euclid(nn) as u32).collect(),
        })
    }

    pub fn zero(n: Prime, g: u32) -> Self {
        Self {
            n,
            coords: vec![0; 2 * g as usize],
        }
    }

    /// `e_i`, `i` 1-based.
    pub fn e(n: Prime, g: u32, i: usize) -> Self {
        let mut v = Self::zero(n, g);
        v.coords[i - 1] = 1;
        v
    }

    /// `f_i`, `i` 1-based.
    pub fn f(n: Prime, g: u32, i: usize) -> Self {
        let mut v = Self::zero(n, g);
        v.coords[g as usize + i - 1] = 1;
        v
    }

    pub fn modulus(&self) -> Prime {
        self.n
    }

    pub fn genus(&self) -> u32 {
        (self.coords.len() / 2) as u32
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch("torsion vectors from different groups".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let n = self.n.get();
        Ok(Self {
            n: self.n,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| (a + b) % n).collect(),
        })
    }

    pub fn scale(&self, t: u32) -> Self {
        let n = self.n.get() as u64;
        Self {
            n: self.n,
            coords: self.coords.iter().map(|&a| ((a as u64 * t as u64) % n) as u32).collect(),
        }
    }

    /// Decodes `idx` in base `n`, first coordinate most significant.
    pub fn from_index(n: Prime, g: u32, mut idx: u64) -> Self {
        let nn = n.get() as u64;
        let mut coords = vec![0u32; 2 * g as usize];
        for c in coords.iter_mut().rev() {
            *c = (idx % nn) as u32;
            idx /= nn;
        }
        Self { n, coords }
    }
}

/// Alternating nondegenerate pairing on `Z_n^(2g)` given by a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    n: Prime,
    g: u32,
    matrix: Vec<Vec<u32>>,
}

impl SymplecticForm {
    /// `<a, b> = sum_i a_i b_(g+i) - a_(g+i) b_i`.
    pub fn standard(n: Prime, g: u32) -> Self {
        let dim = 2 * g as usize;
        let mut matrix = vec![vec![0u32; dim]; dim];
        for i in 0..g as usize {
            matrix[i][g as usize + i] = 1;
            matrix[g as usize + i][i] = n.get() - 1;
        }
        Self { n, g, matrix }
    }

    pub fn from_matrix(n: Prime, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let dim = matrix.len();
        if dim == 0 || dim % 2 != 0 || matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("pairing matrix must be square of even size".into()));
        }
        let nn = n.get() as i64;
        let m: Vec<Vec<u32>> = matrix
            .iter()
            .map(|r| r.iter().map(|&x| x.rem_euclid(nn) as u32).collect())
            .collect();
        for i in 0..dim {
            if m[i][i] != 0 || (0..dim).any(|j| (m[i][j] + m[j][i]) % n.get() != 0) {
                return Err(Error::InvalidParams("pairing matrix is not alternating".into()));
            }
        }
        if rank_mod(&m, n.get()) != dim {
            return Err(Error::InvalidParams("pairing matrix is degenerate".into()));
        }
        Ok(Self {
            n,
            g: (dim / 2) as u32,
            matrix: m,
        })
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn modulus(&self) -> Prime {
        self.n
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.matrix
    }

    fn check(&self, v: &TorsionVector) -> Result<()> {
        if v.n != self.n || v.coords.len() != self.matrix.len() {
            return Err(Error::DimensionMismatch(format!(
                "vector in Z_{}^{} paired with a form on Z_{}^{}",
                v.n,
                v.coords.len(),
                self.n,
                self.matrix.len()
            )));
        }
        Ok(())
    }

    /// Coefficient vector of the functional `x -> <x, b>`.
    fn functional(&self, b: &TorsionVector) -> Vec<u32> {
        let n = self.n.get() as u64;
        self.matrix
            .iter()
            .map(|row| {
                (row.iter().zip(&b.coords).map(|(&m, &x)| m as u64 * x as u64).sum::<u64>() % n) as u32
            })
            .collect()
    }
}

/// Rank over `Z_n` by Gaussian elimination.
fn rank_mod(rows: &[Vec<u32>], n: u32) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    let cols = m.first().map(Vec::len).unwrap_or(0);
    let n64 = n as u64;
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] % n64 != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = inverse_mod(m[rank][c] as u32, n).expect("n prime") as u64;
        for x in m[rank].iter_mut() {
            *x = *x * inv % n64;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for cc in 0..cols {
                    m[r][cc] = (m[r][cc] + n64 * n64 - f * m[rank][cc]) % n64;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exponent `e` with `<a, b> = xi^e`.
pub fn weil_pairing(a: &TorsionVector, b: &TorsionVector, f: &SymplecticForm) -> Result<u32> {
    f.check(a)?;
    f.check(b)?;
    let n = f.n.get() as u64;
    let c = f.functional(b);
    Ok((a.coords.iter().zip(&c).map(|(&x, &y)| x as u64 * y as u64).sum::<u64>() % n) as u32)
}

/// Whether the vectors form a basis of `Z_n^(2g)`.
pub fn is_basis(vectors: &[TorsionVector]) -> bool {
    let Some(first) = vectors.first() else {
        return false;
    };
    let dim = first.coords.len();
    vectors.len() == dim
        && vectors.iter().all(|v| v.same_group(first).is_ok())
        && rank_mod(&vectors.iter().map(|v| v.coords.clone()).collect::<Vec<_>>(), first.n.get()) == dim
}

/// Basis `(gamma, delta_0, delta_1, ..., delta_(2g-2))` with
/// `<delta_0, gamma> = l` and `<delta_i, gamma> = 0` for `i >= 1`.
pub fn complete_basis(gamma: &TorsionVector, f: &SymplecticForm, l: u32) -> Result<Vec<TorsionVector>> {
    f.check(gamma)?;
    if gamma.is_zero() {
        return Err(Error::ZeroGamma);
    }
    let n = f.n.get();
    let c = f.functional(gamma);
    let i = c.iter().position(|&x| x != 0).expect("nondegenerate form");
    let ci_inv = inverse_mod(c[i], n).expect("n prime");
    let mut delta0 = TorsionVector::zero(f.n, f.g);
    delta0.coords[i] = ((l as u64 % n as u64) * ci_inv as u64 % n as u64) as u32;

    // kernel basis v_j = e_j - c_j / c_i e_i, j != i; gamma = sum_j gamma_j v_j
    let dim = c.len();
    let kernel: Vec<(usize, TorsionVector)> = (0..dim)
        .filter(|&j| j != i)
        .map(|j| {
            let mut v = TorsionVector::zero(f.n, f.g);
            v.coords[j] = 1;
            v.coords[i] = ((n as u64 - c[j] as u64 * ci_inv as u64 % n as u64) % n as u64) as u32;
            (j, v)
        })
        .collect();
    let jstar = (0..dim)
        .find(|&j| j != i && gamma.coords[j] != 0)
        .expect("gamma pairs trivially with itself");
    let mut basis = vec![gamma.clone(), delta0];
    basis.extend(kernel.into_iter().filter(|(j, _)| *j != jstar).map(|(_, v)| v));
    if !is_basis(&basis) {
        return Err(Error::Inconsistent("completed vectors do not form a basis".into()));
    }
    Ok(basis)
}

/// The labels `Z_n` of the components of a norm fiber of degree `d`, with
/// the torsion point `gamma` defining the cover and the exponent `l_gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormFiberModel {
    pub n: Prime,
    pub d: i64,
    pub gamma: TorsionVector,
    pub l_gamma: u32,
}

impl NormFiberModel {
    pub fn new(d: i64, gamma: TorsionVector, l_gamma: u32) -> Result<Self> {
        let n = gamma.modulus();
        if gamma.is_zero() {
            return Err(Error::ZeroGamma);
        }
        if l_gamma == 0 || l_gamma >= n.get() {
            return Err(Error::InvalidParams(format!("l(gamma) must lie in [1, {}]", n.get() - 1)));
        }
        Ok(Self { n, d, gamma, l_gamma })
    }

    pub fn with_default_exponent(d: i64, gamma: TorsionVector) -> Result<Self> {
        Self::new(d, gamma, 1)
    }

    pub fn component_count(&self) -> u32 {
        self.n.get()
    }

    /// Image of component `i` under the Galois generator: `i + d mod n`.
    pub fn galois_step(&self, i: u32) -> u32 {
        (i as i64 + self.d).rem_euclid(self.n.get() as i64) as u32
    }

    pub fn galois_orbit(&self, start: u32) -> Vec<u32> {
        let mut orbit = vec![start];
        let mut cur = self.galois_step(start);
        while cur != start {
            orbit.push(cur);
            cur = self.galois_step(cur);
        }
        orbit
    }
}

/// `n / gcd(n, d)`.
pub fn galois_orbit_size(n: Prime, d: i64) -> u32 {
    let nn = n.get() as i64;
    (nn / nn.gcd(&d)) as u32
}

/// `x` with `l_gamma x = <delta, gamma> mod n`: the translation of component
/// labels induced by tensoring with `delta`.
pub fn gamma_component_shift(delta: &TorsionVector, model: &NormFiberModel, f: &SymplecticForm) -> Result<u32> {
    let e = weil_pairing(delta, &model.gamma, f)?;
    let n = model.n.get();
    let inv = inverse_mod(model.l_gamma, n).expect("l_gamma is a unit");
    Ok(((e as u64 * inv as u64) % n as u64) as u32)
}

const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Checks the component-level statements on the finite model: the shift map is a
/// homomorphism whose kernel has index `n` and contains `gamma`; `delta_0`
/// acts freely and transitively on the components; the remaining basis
/// vectors act trivially; the Galois generator shifts labels by `d`.
/// Exhaustive when `n^(2g) <= 10^6`, otherwise on the basis.
pub fn check_component_action(model: &NormFiberModel, f: &SymplecticForm) -> Result<bool> {
    let n = model.n.get();
    let g = f.genus();
    let basis = complete_basis(&model.gamma, f, model.l_gamma)?;
    let shift = |v: &TorsionVector| gamma_component_shift(v, model, f);

    if shift(&basis[0])? != 0 || shift(&basis[1])? != 1 % n {
        return Ok(false);
    }
    for b in &basis[2..] {
        if shift(b)? != 0 {
            return Ok(false);
        }
    }
    // <delta_0> moves component 0 through every label exactly once
    let mut seen = vec![false; n as usize];
    for t in 0..n {
        let label = shift(&basis[1].scale(t))? as usize;
        if seen[label] {
            return Ok(false);
        }
        seen[label] = true;
    }

    let total = n as u64;
    let size = (0..2 * g).try_fold(1u64, |acc, _| acc.checked_mul(total));
    if let Some(size) = size.filter(|&s| s <= EXHAUSTIVE_LIMIT) {
        let mut kernel = 0u64;
        for idx in 0..size {
            let a = TorsionVector::from_index(model.n, g, idx);
            let sa = shift(&a)?;
            if sa == 0 {
                kernel += 1;
            }
            for b in &basis {
                if shift(&a.add(b)?)? != (sa + shift(b)?) % n {
                    return Ok(false);
                }
            }
            // a = sa * delta_0 + (element of the kernel)
            let rest = a.add(&basis[1].scale((n - sa) % n))?;
            if shift(&rest)? != 0 {
                return Ok(false);
            }
        }
        if kernel * n as u64 != size {
            return Ok(false);
        }
    }

    for start in 0..n {
        let orbit = model.galois_orbit(start);
        if orbit.len() as u32 != galois_orbit_size(model.n, model.d) {
            return Ok(false);
        }
        if model.galois_step(start) != (start as i64 + model.d).rem_euclid(n as i64) as u32 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Galois-fixed points of the norm fiber: `|Z_n^(2g) / <gamma>| = n^(2g-1)`
/// when `n | d`, and none otherwise.
pub fn invariant_fiber_count(p: &ModuliParams) -> BigInt {
    let n = p.n() as i64;
    if p.d().rem_euclid(n) == 0 {
        big_pow(n as u64, 2 * p.g()) / BigInt::from(n)
    } else {
        BigInt::from(0)
    }
}

/// Number of connected components of the kernel of the norm map.
pub fn kernel_component_count(n: Prime) -> u32 {
    n.get()
}
