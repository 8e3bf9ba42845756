//! Simultaneous confidence bounds on the number of true and false null
//! hypotheses in arbitrary sets, derived from a closed testing procedure.
//!
//! Indices are zero-based positions in the input [`HypothesisFamily`].

pub mod bounds;
pub mod closure;
pub mod error;
pub mod family;
pub mod format;
pub mod hitting;
pub mod index_set;
pub mod local;
pub mod profile;
pub mod shortcut;
pub mod shortlist;
pub mod simulate;

pub use bounds::{
    adjusted_p_elementary, t_alpha_exact, t_alpha_shortcut, test_partial_conjunction,
    ConfidenceReport, Method, PartialConjunction,
};
pub use closure::{
    enumerate_closure, pairwise_congruence, partitioning_view, ClosureTable, CongruenceOracle,
    CongruenceOrigin, DefiningSets, PartitionCell, DEFAULT_EXACT_CAP,
};
pub use error::{Error, Result};
pub use family::{parse_family, resolve_set, AlphaLevel, HypothesisFamily};
pub use index_set::IndexSet;
pub use local::{chi2_even_sf, Capabilities, LocalTest};
pub use profile::{
    confidence_profile, confidence_profile_exact, emit_pmf, profile_summary, quick_summary,
    ConfidenceProfile, PmfRow, ProfileSummary,
};
pub use shortcut::WitnessView;
pub use shortlist::{minimal_transversals, transversals, Shortlist, DEFAULT_SHORTLIST_CAP};
pub use simulate::{
    run_coverage_check, run_power_study, standard_normal_tail, Coverage, SimConfig, SimResult,
    SimRow,
};
