//! Connections between the master and its workers. Both transports move
//! encoded frames, so they differ only in how bytes travel.

use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::net::{Shutdown, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use thiserror::Error;

use crate::{decode, encode, Message, ProtocolError, MAX_FRAME};

enum Raw {
    Frame(Vec<u8>),
    Closed,
}

/// What a receiver sees next on a connection.
#[derive(Clone, Debug, PartialEq)]
pub enum Incoming {
    Msg(Message),
    /// The peer hung up or the stream failed.
    Closed,
    Error(ProtocolError),
}

impl Incoming {
    fn from_raw(r: Raw) -> Incoming {
        match r {
            Raw::Frame(f) => decode(&f).map_or_else(Incoming::Error, Incoming::Msg),
            Raw::Closed => Incoming::Closed,
        }
    }
}

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("connection closed")]
    Closed,
    #[error(transparent)]
    Io(#[from] io::Error),
}

trait Sink: Send {
    fn send_frame(&mut self, frame: Vec<u8>) -> Result<(), LinkError>;
}

struct ToMaster {
    index: usize,
    tx: Sender<(usize, Raw)>,
}

impl Sink for ToMaster {
    fn send_frame(&mut self, frame: Vec<u8>) -> Result<(), LinkError> {
        self.tx.send((self.index, Raw::Frame(frame))).map_err(|_| LinkError::Closed)
    }
}

impl Drop for ToMaster {
    fn drop(&mut self) {
        let _ = self.tx.send((self.index, Raw::Closed));
    }
}

struct ToWorker(Sender<Raw>);

impl Sink for ToWorker {
    fn send_frame(&mut self, frame: Vec<u8>) -> Result<(), LinkError> {
        self.0.send(Raw::Frame(frame)).map_err(|_| LinkError::Closed)
    }
}

impl Drop for ToWorker {
    fn drop(&mut self) {
        let _ = self.0.send(Raw::Closed);
    }
}

struct Tcp(BufWriter<TcpStream>);

impl Sink for Tcp {
    fn send_frame(&mut self, frame: Vec<u8>) -> Result<(), LinkError> {
        self.0.write_all(&frame)?;
        self.0.flush()?;
        Ok(())
    }
}

impl Drop for Tcp {
    fn drop(&mut self) {
        let _ = self.0.flush();
        let _ = self.0.get_ref().shutdown(Shutdown::Write);
    }
}

/// The master's side: one outgoing sink per worker and a merged inbox
/// tagged by worker index.
pub struct MasterLink {
    rx: Receiver<(usize, Raw)>,
    out: Vec<Mutex<Option<Box<dyn Sink>>>>,
}

impl MasterLink {
    pub fn workers(&self) -> usize {
        self.out.len()
    }

    pub fn send(&self, worker: usize, m: &Message) -> Result<(), LinkError> {
        match self.out[worker].lock().unwrap().as_mut() {
            Some(s) => s.send_frame(encode(m)),
            None => Err(LinkError::Closed),
        }
    }

    /// Hangs up on one worker.
    pub fn close(&self, worker: usize) {
        self.out[worker].lock().unwrap().take();
    }

    /// Next event from any worker; `None` once every connection is gone.
    pub fn recv(&self) -> Option<(usize, Incoming)> {
        self.rx.recv().ok().map(|(i, r)| (i, Incoming::from_raw(r)))
    }

    pub fn recv_timeout(&self, d: Duration) -> Option<(usize, Incoming)> {
        self.rx.recv_timeout(d).ok().map(|(i, r)| (i, Incoming::from_raw(r)))
    }
}

/// A worker's side of its connection. It may be shared between threads.
pub struct WorkerLink {
    rx: Mutex<Receiver<Raw>>,
    out: Mutex<Option<Box<dyn Sink>>>,
}

impl WorkerLink {
    pub fn send(&self, m: &Message) -> Result<(), LinkError> {
        match self.out.lock().unwrap().as_mut() {
            Some(s) => s.send_frame(encode(m)),
            None => Err(LinkError::Closed),
        }
    }

    /// Hangs up; the master sees the connection close.
    pub fn close(&self) {
        self.out.lock().unwrap().take();
    }

    pub fn recv(&self) -> Incoming {
        self.rx.lock().unwrap().recv().map_or(Incoming::Closed, Incoming::from_raw)
    }

    /// `None` if nothing arrived in time.
    pub fn recv_timeout(&self, d: Duration) -> Option<Incoming> {
        match self.rx.lock().unwrap().recv_timeout(d) {
            Ok(r) => Some(Incoming::from_raw(r)),
            Err(RecvTimeoutError::Timeout) => None,
            Err(RecvTimeoutError::Disconnected) => Some(Incoming::Closed),
        }
    }
}

/// A master connected to `n` workers through channels.
pub fn in_process(n: usize) -> (MasterLink, Vec<WorkerLink>) {
    let (tx, rx) = mpsc::channel();
    let mut out: Vec<Mutex<Option<Box<dyn Sink>>>> = Vec::with_capacity(n);
    let mut workers = Vec::with_capacity(n);
    for index in 0..n {
        let (wtx, wrx) = mpsc::channel();
        out.push(Mutex::new(Some(Box::new(ToWorker(wtx)))));
        workers.push(WorkerLink {
            rx: Mutex::new(wrx),
            out: Mutex::new(Some(Box::new(ToMaster { index, tx: tx.clone() }))),
        });
    }
    (MasterLink { rx, out }, workers)
}

/// Reads newline-terminated frames until the stream ends. A frame that
/// overflows [`MAX_FRAME`] or is cut off is still delivered, so the
/// receiver reports it; then the connection counts as closed.
fn read_frames(stream: TcpStream, mut push: impl FnMut(Raw) -> bool) {
    let mut reader = BufReader::new(stream);
    loop {
        let mut buf = Vec::new();
        let n = match (&mut reader).take(MAX_FRAME as u64 + 2).read_until(b'\n', &mut buf) {
            Ok(n) => n,
            Err(_) => break,
        };
        if n == 0 {
            break;
        }
        let complete = buf.last() == Some(&b'\n');
        if !push(Raw::Frame(buf)) || !complete {
            break;
        }
    }
    push(Raw::Closed);
}

/// A bound master endpoint.
pub struct Endpoint {
    listener: TcpListener,
}

impl Endpoint {
    pub fn bind(addr: impl ToSocketAddrs) -> io::Result<Endpoint> {
        Ok(Endpoint { listener: TcpListener::bind(addr)? })
    }

    pub fn local_addr(&self) -> io::Result<std::net::SocketAddr> {
        self.listener.local_addr()
    }

    /// Waits for `n` workers. Worker indices follow connection order.
    pub fn accept(&self, n: usize) -> io::Result<MasterLink> {
        let (tx, rx) = mpsc::channel();
        let mut out: Vec<Mutex<Option<Box<dyn Sink>>>> = Vec::with_capacity(n);
        for index in 0..n {
            let (stream, _) = self.listener.accept()?;
            stream.set_nodelay(true)?;
            let reader = stream.try_clone()?;
            let tx = tx.clone();
            thread::Builder::new()
                .name(format!("master-read-{index}"))
                .spawn(move || read_frames(reader, |r| tx.send((index, r)).is_ok()))?;
            out.push(Mutex::new(Some(Box::new(Tcp(BufWriter::new(stream))))));
        }
        Ok(MasterLink { rx, out })
    }
}

/// Connects to a master, trying `attempts` times with `delay` between
/// tries.
pub fn connect(addr: impl ToSocketAddrs + Clone, attempts: u32, delay: Duration) -> io::Result<WorkerLink> {
    let mut last = io::Error::new(io::ErrorKind::InvalidInput, "no connection attempts");
    for i in 0..attempts.max(1) {
        if i > 0 {
            thread::sleep(delay);
        }
        match TcpStream::connect(addr.clone()) {
            Ok(stream) => {
                stream.set_nodelay(true)?;
                let reader = stream.try_clone()?;
                let (tx, rx) = mpsc::channel();
                thread::Builder::new()
                    .name("worker-read".into())
                    .spawn(move || read_frames(reader, |r| tx.send(r).is_ok()))?;
                return Ok(WorkerLink { rx: Mutex::new(rx), out: Mutex::new(Some(Box::new(Tcp(BufWriter::new(stream))))) });
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}
