//! Exact computation of both sides of the topological mirror symmetry
//! identity for moduli of strongly parabolic `SL_n` / `PGL_n` Higgs bundles
//! of prime rank with full flags, and the combinatorics behind it.

pub mod chambers;
pub mod cstar_fixed;
pub mod error;
pub mod exactpoly;
pub mod moduli;
pub mod pgl_fixed;
pub mod tms;
pub mod torsion;

pub use chambers::{WeightSystem, Wall};
pub use cstar_fixed::{ComponentType11, PermTuple, PermWord};
pub use error::{Error, Result};
pub use exactpoly::{BivarPoly, CycBivarPoly, CycInt, Prime, Rat};
pub use moduli::{ModuliParams, ParabolicSummary};
pub use pgl_fixed::FixedLocusInvariants;
pub use tms::{SweepConfig, SweepRecord, TmsReport};
pub use torsion::{NormFiberModel, SymplecticForm, TorsionVector};
