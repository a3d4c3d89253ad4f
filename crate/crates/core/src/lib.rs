//! Base sequences `BS(n+1, n)` and their normal / near-normal subclasses:
//! verification, equivalence, arithmetic and spectral filters, and a
//! resumable exhaustive search.

pub mod equiv;
pub mod error;
pub mod numfilter;
pub mod oracle;
pub mod quad;
pub mod record;
pub mod search;
pub mod seq;
pub mod specfilter;

pub use equiv::{apply, canonical, dedup, orbit, Transform, Which};
pub use error::{Error, Result};
pub use numfilter::{
    column_cases, ns_parity_obstruction, refine_profiles, residue_profiles, sum_profiles,
    ColumnCaseTable, ProfileHalf, ResidueProfile, Side,
};
pub use oracle::{brute_bs, brute_structured};
pub use quad::{parse_quads, row_sums, verify, Kind, SeqQuad, SumProfile, VerifyReport};
pub use record::ResultRecord;
pub use search::{
    backtrack_complete, expand_candidates, search, search_with, Mode, RunOptions, SearchConfig,
    SearchOutcome,
};
pub use seq::{PackedSeq, SignSeq};
pub use specfilter::{pair_filter, psd_vector, ThetaGrid};
