//! Fixed benchmark instances shared by the criterion benches.

use parmirror::chambers::{sample_generic_weights, small_weight_margin};
use parmirror::{ModuliParams, WeightSystem};

/// A parameter set with small generic weights sampled at a fixed seed.
pub fn instance(n: u32, g: u32, k: u32, d: i64) -> (ModuliParams, WeightSystem) {
    let p = ModuliParams::new(n, g, k, d).expect("valid parameters");
    let w = sample_generic_weights(&p, 1, &small_weight_margin(&p)).expect("generic weights");
    (p, w)
}
