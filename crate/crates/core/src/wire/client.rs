use std::io::{BufReader, BufWriter};
use std::net::{TcpStream, ToSocketAddrs};

use super::codec::{decode_answer, encode_query};
use super::frame::{read_frame, write_frame, Frame, FrameKind};
use crate::error::{Error, Result};
use crate::protocol::{Answer, Query};

/// Sends `query` to the server at `endpoint` and returns its answer.
///
/// An error frame whose text starts with `ShapeError:` becomes
/// [`Error::Shape`]; any other error frame becomes [`Error::Remote`].
pub fn fetch(endpoint: impl ToSocketAddrs, query: &Query) -> Result<Answer> {
    let stream = TcpStream::connect(endpoint)?;
    write_frame(
        &mut BufWriter::new(&stream),
        &Frame::new(FrameKind::Query, encode_query(query)),
    )?;
    let reply = read_frame(&mut BufReader::new(&stream))?;
    match reply.kind {
        FrameKind::Answer => decode_answer(&reply.payload, query.field()),
        FrameKind::Error => {
            let text = String::from_utf8_lossy(&reply.payload).into_owned();
            Err(match text.strip_prefix("ShapeError: ") {
                Some(msg) => Error::Shape(msg.to_string()),
                None => Error::Remote(text),
            })
        }
        FrameKind::Query => Err(Error::MalformedPayload {
            offset: 4,
            reason: "server replied with a query frame".into(),
        }),
    }
}
