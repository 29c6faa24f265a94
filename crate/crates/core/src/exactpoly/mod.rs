//! Exact arithmetic: big rationals, sparse integer polynomials in `u`, `v`,
//! and the cyclotomic integers `Z[xi]` for prime-order roots of unity.

mod bivar;
mod cyclotomic;
mod rat;

pub use bivar::{binom_deg_slice, poly_arith, poly_pow, poly_scale, BivarPoly, PolyOp};
pub use cyclotomic::{cyc_project, root_of_unity_filter, CycBivarPoly, CycInt};
pub use rat::{
    big_pow, binomial, exact_div, factorial, floor_strict, is_prime, parse_rat, rat, rat_int,
    rat_to_i64, rat_to_integer, rat_to_string, Prime, Rat,
};

pub(crate) use rat::is_nonnegative;
