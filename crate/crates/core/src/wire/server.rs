//! Server side of the transport. Deliberately limited to the query, the
//! answer computation and the store: nothing here can reach a demand or a
//! client secret.

use std::io::{BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use super::codec::{decode_query, encode_answer};
use super::frame::{read_frame, write_frame, Frame, FrameKind};
use super::store::MessageStore;
use crate::error::{Error, Result};
use crate::protocol::{answer, Answer, Query};

const READ_TIMEOUT: Duration = Duration::from_secs(30);

/// Text of an error frame: `<Kind>: <message>`.
pub(crate) fn error_text(e: &Error) -> String {
    match e {
        Error::Shape(msg) => format!("ShapeError: {msg}"),
        Error::MalformedPayload { .. } => format!("MalformedPayload: {e}"),
        Error::FrameTooLarge(_) => format!("FrameTooLarge: {e}"),
        other => format!("Error: {other}"),
    }
}

fn respond(store: &MessageStore, request: Result<Frame>) -> Frame {
    let result = request.and_then(|frame| {
        if frame.kind != FrameKind::Query {
            return Err(Error::MalformedPayload {
                offset: 4,
                reason: "expected a query frame".into(),
            });
        }
        let query: Query = decode_query(&frame.payload)?;
        if query.k() != store.k() {
            return Err(Error::Shape(format!(
                "query covers K = {} messages, store holds {}",
                query.k(),
                store.k()
            )));
        }
        let reply: Answer = answer(&query, store.x())?;
        Ok(encode_answer(&reply))
    });
    match result {
        Ok(payload) => Frame::new(FrameKind::Answer, payload),
        Err(e) => Frame::new(FrameKind::Error, error_text(&e).into_bytes()),
    }
}

/// Reads one request from `stream`, writes one reply, and returns.
pub fn handle_connection(stream: TcpStream, store: &MessageStore) -> Result<()> {
    stream.set_read_timeout(Some(READ_TIMEOUT))?;
    let request = read_frame(&mut BufReader::new(&stream));
    let reply = respond(store, request);
    write_frame(&mut BufWriter::new(&stream), &reply)
}

/// A running server; dropping the handle leaves it running, [`shutdown`](Self::shutdown) stops it.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // wake the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }

    /// Blocks until the accept loop exits.
    pub fn join(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Binds `endpoint` and answers queries against `store` on a background
/// thread, one thread per connection.
pub fn serve(store: MessageStore, endpoint: impl ToSocketAddrs) -> Result<ServerHandle> {
    let listener = TcpListener::bind(endpoint)?;
    let addr = listener.local_addr()?;
    let store = Arc::new(store);
    let stop = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&stop);
    let thread = thread::spawn(move || {
        for conn in listener.incoming() {
            if flag.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = conn else { continue };
            let store = Arc::clone(&store);
            thread::spawn(move || {
                let _ = handle_connection(stream, &store);
            });
        }
    });
    Ok(ServerHandle {
        addr,
        stop,
        thread: Some(thread),
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn server_code_never_names_client_types() {
        let src = include_str!("server.rs");
        let body = &src[..src.find("#[cfg(test)]").unwrap()];
        for forbidden in [
            "Demand",
            "ClientSecret",
            "recover",
            "build_query",
            "fixtures",
        ] {
            assert!(!body.contains(forbidden), "server.rs mentions {forbidden}");
        }
    }
}
