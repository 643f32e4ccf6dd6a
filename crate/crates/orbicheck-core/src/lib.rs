//! Exact-arithmetic toolkit for 4-dimensional primitively symplectic orbifolds.
//!
//! The crate computes, over exact cyclotomic fields, the local Riemann–Roch
//! correction sums `S_p`, the Gauss–Bonnet defect `η`, and the Salamon
//! singularity score `s` attached to a finite symplectic quotient singularity
//! `C⁴/G`, and wires them into the global constraints on the Betti and Hodge
//! numbers of the ambient orbifold: the Salamon relation
//! `b4 + b3 − 10·b2 = 46 + s`, the Guan inequality, and the Hitchin–Sawon
//! inequality. On top sit a catalog of admissible singularity types, a
//! feasibility enumerator, and the example table with a consistency checker.
//!
//! Floating point is never a source of truth: a high-precision evaluation of
//! roots of unity exists only as a cross-check oracle (see [`approx`]).

pub mod approx;
pub mod bounds;
pub mod catalog;
pub mod config;
pub mod cyclotomic;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod group;
pub mod hodge;
pub mod invariants;
pub mod matrix;
pub mod rational;
pub mod table;

pub use catalog::{build_catalog, CatalogEntry, CatalogLimits, Family};
pub use config::{check_config, ConfigReport, SingularityConfig};
pub use cyclotomic::{cyclotomic_polynomial, CycloNum};
pub use error::Error;
pub use group::{
    diagonal_embed, extend_by_t, kleinian_group, Automorphism, KleinianFamily, MatrixGroup,
    SymplecticGroup, Theta,
};
pub use hodge::{
    characteristic_numbers, guan_budget, guan_feasible, hitchin_sawon_feasible,
    hitchin_sawon_identities, salamon_solve, verify_salamon_general, CharacteristicNumbers,
    GlobalSingularityData, HodgeDiamond, SalamonGeneralReport,
};
pub use invariants::{
    closed_form_s, index2_bound_check, index2_s_upper_bound, local_invariants,
    per_element_bound_check, LocalInvariants,
};
pub use matrix::{Mat2, Mat4};
pub use rational::Rat;

/// Invariants that hold across the crate, checked in the test suites:
/// `S_3 = S_1`, `S_4 = S_0`, `η = S_2 − 2S_1 + 2S_0`, and the three
/// expressions for `s` agree for every group the library can build.
pub type Result<T> = std::result::Result<T, Error>;
