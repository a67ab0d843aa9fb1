use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not a prime in [2, 2^31]")]
    NotPrime(u64),

    #[error("inversion of zero")]
    InversionOfZero,

    #[error("shape error: {0}")]
    Shape(String),

    #[error("index {index} out of range for {len} columns")]
    Index { index: usize, len: usize },

    #[error("Cauchy parameters are not pairwise distinct")]
    DegenerateCauchy,

    #[error("bad GRS parameters: {0}")]
    BadGrsParameters(String),

    #[error("MDS completion failed after {attempts} attempts")]
    CompletionFailed { attempts: usize },

    #[error("matrix is rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("field GF({q}) too small: need q >= D + R = {needed}")]
    FieldTooSmall { q: u64, needed: usize },

    #[error("bad parameters: {0}")]
    BadShape(String),

    #[error("alignment system is singular: {0}")]
    AlignmentSingular(String),

    #[error("answer is inconsistent with the query: {0}")]
    RecoveryInconsistent(String),

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("invalid demand: {0}")]
    InvalidDemand(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("bad magic {0:?}, expected \"PLTS\"")]
    BadMagic([u8; 4]),

    #[error("unsupported store version {0}")]
    VersionUnsupported(u8),

    #[error("truncated file: expected {expected} bytes, found {actual}")]
    TruncatedFile { expected: u64, actual: u64 },

    #[error("entry {index} has value {value}, not below q = {q}")]
    EntryOutOfRange { index: usize, value: u64, q: u64 },

    #[error("malformed payload at byte {offset}: {reason}")]
    MalformedPayload { offset: usize, reason: String },

    #[error("frame of {0} bytes exceeds the 64 MiB cap")]
    FrameTooLarge(u64),

    #[error("connection refused: {0}")]
    ConnectionRefused(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("server error: {0}")]
    Remote(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        match e.kind() {
            std::io::ErrorKind::ConnectionRefused => Error::ConnectionRefused(e.to_string()),
            _ => Error::Io(e.to_string()),
        }
    }
}
