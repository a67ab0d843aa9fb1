use std::fs;
use std::path::Path;

use rand::Rng;

use super::codec::Reader;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::FqMatrix;

pub const STORE_MAGIC: [u8; 4] = *b"PLTS";
pub const STORE_VERSION: u8 = 0x01;
const HEADER_LEN: usize = 4 + 1 + 8 + 4 + 4;

/// The server's `K` messages of length `N`, one per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageStore {
    x: FqMatrix,
}

impl MessageStore {
    pub fn new(x: FqMatrix) -> Self {
        MessageStore { x }
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, k: usize, n: usize, rng: &mut R) -> Self {
        MessageStore {
            x: FqMatrix::random(field, k, n, rng),
        }
    }

    pub fn x(&self) -> &FqMatrix {
        &self.x
    }

    pub fn field(&self) -> PrimeField {
        self.x.field()
    }

    pub fn k(&self) -> usize {
        self.x.rows()
    }

    pub fn n(&self) -> usize {
        self.x.cols()
    }

    pub fn encoded_len(k: usize, n: usize) -> usize {
        HEADER_LEN + 8 * k * n
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::encoded_len(self.k(), self.n()));
        out.extend_from_slice(&STORE_MAGIC);
        out.push(STORE_VERSION);
        out.extend_from_slice(&self.field().modulus().to_le_bytes());
        out.extend_from_slice(&(self.k() as u32).to_le_bytes());
        out.extend_from_slice(&(self.n() as u32).to_le_bytes());
        for e in self.x.data() {
            out.extend_from_slice(&e.value().to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let truncated = |expected: usize| Error::TruncatedFile {
            expected: expected as u64,
            actual: bytes.len() as u64,
        };
        if bytes.len() < HEADER_LEN {
            return Err(truncated(HEADER_LEN));
        }
        let mut r = Reader::new(bytes);
        let magic: [u8; 4] = r.take(4)?.try_into().expect("four bytes");
        if magic != STORE_MAGIC {
            return Err(Error::BadMagic(magic));
        }
        let version = r.u8()?;
        if version != STORE_VERSION {
            return Err(Error::VersionUnsupported(version));
        }
        let field = PrimeField::new(r.u64()?)?;
        let k = r.u32()? as usize;
        let n = r.u32()? as usize;
        let expected = Self::encoded_len(k, n);
        if bytes.len() < expected {
            return Err(truncated(expected));
        }
        if bytes.len() > expected {
            return Err(Error::MalformedPayload {
                offset: expected,
                reason: "trailing bytes after the last entry".into(),
            });
        }
        let q = field.modulus();
        let mut data = Vec::with_capacity(k * n);
        for index in 0..k * n {
            let value = r.u64()?;
            if value >= q {
                return Err(Error::EntryOutOfRange { index, value, q });
            }
            data.push(field.elem(value));
        }
        Ok(MessageStore {
            x: FqMatrix::new(field, k, n, data)?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(fs::write(path, self.to_bytes())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}
