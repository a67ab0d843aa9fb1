//! The client/server protocol: parameter derivation, query construction,
//! the server's answer and the client's recovery.
//!
//! The query matrix is block diagonal. Each of the first `n = floor(K/D) - 1`
//! blocks is `L x D`; the trailing block spans the last `D + R` permuted
//! positions. The demand is planted either verbatim in one leading block or
//! inside the trailing block, which is built so that every admissible support
//! inside it looks equally plausible to the server.

mod demand;
mod params;
mod query;
mod recover;

pub use demand::{shuffle_demand, Demand};
pub use params::{achieved_rate, derive_params, select_block, ProtocolCase, ProtocolParams};
pub(crate) use query::check_bijection;
pub use query::{
    alignment_coefficients, alignment_trailing_block, answer, assemble_query_matrix, build_query,
    planted_positions, solve_alignment, AlignmentChoice, AlignmentScaffold, Answer, ClientSecret,
    ParityChoice, Query, TrailingSecret, COMPLETION_RETRY_CAP,
};
pub use recover::{combine_row_blocks, recover};
