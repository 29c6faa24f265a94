//! Fixed points of the `C*` action of type `(1, ..., 1)`: enumeration,
//! stability, and the variant E-polynomial computed three ways.

mod components;
mod cyclotomic_path;
mod lemma;
mod perm;

pub use components::{
    component_dn, component_variant_epoly, count_components, degree_constraint,
    enumerate_components, stability_check, variant_closed_form, variant_total_bruteforce,
    variant_total_census, write_census_csv, ComponentType11,
};
pub use cyclotomic_path::{discarded_term, variant_total_cyclotomic};
pub use lemma::{
    count_s, insertion_bijection_all, insertion_bijection_check, insertion_witness, InsertionCase,
};
pub use perm::{all_words, descent_stats, PermTuple, PermWord};

pub(crate) use components::{for_each_corner, nontrivial_torsion, stability_lhs};
