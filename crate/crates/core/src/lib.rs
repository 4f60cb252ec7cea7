//! Core library behind the `cyclo-scan` tool.
//!
//! The pipeline: exact arithmetic in F_p and on truncated power series
//! ([`fp`]) feeds the Bernoulli engine ([`bernoulli`]), whose irregular
//! pairs drive the per-prime eligibility criterion ([`eigenspace`]).
//! Alongside sit a dimension calculator for local Galois cohomology of
//! cyclotomic character powers ([`cohomology`]) and finite models of
//! SL2(Z_p) congruence subgroups ([`sl2`]). The [`scan`] module runs the
//! pipeline over prime ranges in parallel and emits deterministic reports.

pub mod bernoulli;
pub mod cohomology;
pub mod eigenspace;
#[cfg(feature = "fast-series")]
mod fastconv;
pub mod fp;
pub mod primality;
pub mod scan;
pub mod sl2;

pub use bernoulli::{
    bernoulli_mod_p, index_of_irregularity, irregular_pairs, irregular_pairs_with,
    BernoulliMethod, BernoulliTable, IrregularPair,
};
pub use cohomology::{ad0_h0, balanced_check, local_h_dims, tangent_dim, CharPower, LocalDims};
pub use eigenspace::{
    admissible_indices, hr_conditions, scan_prime, AdmissibleIndex, PrimeReport, VandiverMode,
    VandiverPolicy, VandiverStatus,
};
pub use fp::{factorial_table, FieldElement, PrimeField, Series};
pub use scan::{emit, scan, verify_balanced, OutputFormat, ScanConfig, ScanOutput, ScanReport};
pub use sl2::{
    closure, contains_pcs, group_order, level_lift_check, pcs_elements, LevelLiftVerdict,
    Mat2ModPn, SubgroupClosure, DEFAULT_ELEMENT_BUDGET,
};
