//! Number-theoretic filters: sum profiles, column cases, residue profiles.

pub mod columns;
pub mod residue;
pub mod sums;

pub use columns::{column_cases, Column, ColumnCaseTable, PairCases, Side};
pub use residue::{
    check_profile, class_count, class_of, class_sums, periodic_signature, refine_halves,
    refine_halves_multi, refine_profiles, residue_halves, residue_profiles, ProfileHalf,
    ResidueProfile,
};
pub use sums::{
    admissible_sums, coupling_holds, mod4_laws_hold, ns_parity_obstruction, sum_class_key,
    sum_profiles, sum_quadruples,
};
