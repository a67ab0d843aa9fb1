use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Largest accepted value of the length prefix.
pub const MAX_FRAME_LEN: u32 = 64 * 1024 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    Query,
    Answer,
    Error,
}

impl FrameKind {
    pub fn byte(self) -> u8 {
        match self {
            FrameKind::Query => 0x01,
            FrameKind::Answer => 0x02,
            FrameKind::Error => 0xFF,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(FrameKind::Query),
            0x02 => Some(FrameKind::Answer),
            0xFF => Some(FrameKind::Error),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub kind: FrameKind,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(kind: FrameKind, payload: Vec<u8>) -> Self {
        Frame { kind, payload }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + self.payload.len());
        out.extend_from_slice(&(self.payload.len() as u32 + 1).to_le_bytes());
        out.push(self.kind.byte());
        out.extend_from_slice(&self.payload);
        out
    }
}

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> Result<()> {
    if frame.payload.len() as u64 + 1 > MAX_FRAME_LEN as u64 {
        return Err(Error::FrameTooLarge(frame.payload.len() as u64 + 1));
    }
    w.write_all(&frame.to_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn read_frame<R: Read>(r: &mut R) -> Result<Frame> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_le_bytes(len);
    if len == 0 {
        return Err(Error::MalformedPayload {
            offset: 0,
            reason: "zero frame length".into(),
        });
    }
    if len > MAX_FRAME_LEN {
        return Err(Error::FrameTooLarge(len as u64));
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    let kind = FrameKind::from_byte(kind[0]).ok_or_else(|| Error::MalformedPayload {
        offset: 4,
        reason: format!("unknown frame kind {:#04x}", kind[0]),
    })?;
    let mut payload = vec![0u8; len as usize - 1];
    r.read_exact(&mut payload)?;
    Ok(Frame { kind, payload })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_frame() {
        let f = Frame::new(FrameKind::Answer, vec![7, 8, 9]);
        assert_eq!(f.to_bytes(), vec![4, 0, 0, 0, 0x02, 7, 8, 9]);
        let mut buf = Vec::new();
        write_frame(&mut buf, &f).unwrap();
        assert_eq!(read_frame(&mut buf.as_slice()).unwrap(), f);
    }

    #[test]
    fn rejects_oversized_zero_and_unknown() {
        let mut over = (MAX_FRAME_LEN + 1).to_le_bytes().to_vec();
        over.push(1);
        assert_eq!(
            read_frame(&mut over.as_slice()),
            Err(Error::FrameTooLarge(MAX_FRAME_LEN as u64 + 1))
        );
        let zero = [0u8, 0, 0, 0];
        assert!(matches!(
            read_frame(&mut zero.as_slice()),
            Err(Error::MalformedPayload { offset: 0, .. })
        ));
        let unknown = [1u8, 0, 0, 0, 0x03];
        assert!(matches!(
            read_frame(&mut unknown.as_slice()),
            Err(Error::MalformedPayload { offset: 4, .. })
        ));
        let short = [5u8, 0, 0, 0, 0x01, 1];
        assert!(matches!(
            read_frame(&mut short.as_slice()),
            Err(Error::Io(_))
        ));
    }
}
