//! Structural audits of queries: the server's posterior on each message
//! index, and whether every support the server must consider is decodable.

mod feasibility;
mod privacy;

pub use feasibility::{
    alignment_feasibility_sweep, kl_feasible, parity_shortening_sweep, shortened_code,
    trailing_feasibility_sweep, trailing_subset_count, SubsetOutcome, SweepReport,
};
pub use privacy::{
    audit_individual_privacy, audit_view, candidate_supports, posterior, AuditSummary,
    CandidateOrigin, PrivacyReport, SupportCandidate, MAX_ENUMERATED_CANDIDATES,
};
