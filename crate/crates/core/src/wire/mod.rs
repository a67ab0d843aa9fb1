//! Persistence of the message matrix and a length-prefixed TCP transport.
//!
//! Store files: magic `PLTS`, version byte `0x01`, `q` (u64), `K` and `N`
//! (u32 each), then the `K x N` entries row-major as u64. Every integer is
//! little-endian.
//!
//! Frames: a u32 length (payload size plus one), a kind byte (`0x01` query,
//! `0x02` answer, `0xFF` error), then the payload. One request per
//! connection.
//!
//! The server half lives in [`server`] and sees only [`Query`](crate::protocol::Query)
//! and [`Answer`](crate::protocol::Answer).

mod client;
mod codec;
mod frame;
pub mod server;
mod store;

pub use client::fetch;
#[cfg(feature = "json")]
pub use codec::{answer_to_json, query_to_json};
pub use codec::{decode_answer, decode_query, encode_answer, encode_query, query_payload_len};
pub use frame::{read_frame, write_frame, Frame, FrameKind, MAX_FRAME_LEN};
pub use server::{serve, ServerHandle};
pub use store::{MessageStore, STORE_MAGIC, STORE_VERSION};
