use num_bigint::BigInt;

use super::components::nontrivial_torsion;
use super::lemma::count_s;
use super::perm::all_words;
use crate::error::Result;
use crate::exactpoly::{cyc_project, exact_div, factorial, BivarPoly, CycBivarPoly, CycInt, Prime};
use crate::moduli::{dim_moduli, ModuliParams};

/// `(1 - c u)(1 - c v)` with `c` in `Z[xi]`.
fn twisted_factor(n: Prime, c: &CycInt) -> CycBivarPoly {
    let one = CycInt::one(n);
    let neg = -c;
    let mut f = CycBivarPoly::zero(n);
    f.add_term(0, 0, one);
    f.add_term(1, 0, neg.clone());
    f.add_term(0, 1, neg.clone());
    f.add_term(1, 1, c * c);
    f
}

/// The variant total evaluated by filtering the degree constraint with
/// `n`-th roots of unity: the box sum over `m` factors as
/// `prod_j (1 - xi^(jl) u)^(g-1) (1 - xi^(jl) v)^(g-1)` for each `l`.
pub fn variant_total_cyclotomic(p: &ModuliParams) -> Result<BivarPoly> {
    let n = p.prime();
    let nn = n.get() as i64;
    let words = all_words(n.get());
    // exponent of xi contributed by each word's descents
    let word_nu: Vec<i64> = words
        .iter()
        .map(|w| {
            let desc = w.descents();
            if nn == 2 {
                desc[0] as i64
            } else {
                w.major_index() as i64
            }
        })
        .collect();
    let shift = if nn == 2 { p.d() - p.k() as i64 } else { p.d() };

    let k = p.k();
    let tuples = words.len().pow(k);
    let mut total = CycBivarPoly::zero(n);
    for l in 0..nn {
        let mut coeff = CycInt::zero(n);
        for idx in 0..tuples {
            let mut nu = shift;
            let mut rest = idx;
            for _ in 0..k {
                nu += word_nu[rest % words.len()];
                rest /= words.len();
            }
            coeff += &CycInt::xi_pow(n, l * nu);
        }
        if coeff.is_zero() {
            continue;
        }
        let mut prod = CycBivarPoly::constant(CycInt::one(n));
        for j in 1..nn {
            let c = CycInt::xi_pow(n, j * l);
            prod = &prod * &twisted_factor(n, &c).pow(p.g() - 1);
        }
        total += &prod.scale(&coeff);
    }
    let projected = cyc_project(&total)?;
    let nb = BigInt::from(nn);
    let mut divided = BivarPoly::zero();
    for (i, j, c) in projected.terms() {
        divided.add_term(i, j, exact_div(c, &nb, "root-of-unity filter")?);
    }
    let half = (dim_moduli(p) / 2) as u32;
    Ok(divided.scale(&nontrivial_torsion(p)).shift(half, half))
}

/// The second term of the expanded filter sum,
/// `((n^(2g)-1)/n) ((1-u^n)(1-v^n)/((1-u)(1-v)))^(g-1) (n S(n) - n!)^k`.
pub fn discarded_term(p: &ModuliParams) -> Result<BivarPoly> {
    let n = p.n();
    let s = BigInt::from(count_s(p.prime())?);
    let inner = BigInt::from(n) * s - factorial(n);
    let scale = nontrivial_torsion(p) * num_traits::pow(inner, p.k() as usize);
    let scale = exact_div(&scale, &BigInt::from(n), "discarded term")?;
    let geometric = BivarPoly::from_terms((0..n).flat_map(|i| (0..n).map(move |j| (i, j, 1))));
    Ok(geometric.pow(p.g() - 1).scale(&scale))
}
