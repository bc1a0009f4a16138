use super::frame::{read_frame, write_frame, Frame};
use super::{tags, ExchangeError, Transport};
use crossbeam::channel::{unbounded, Receiver};
use std::collections::{HashMap, VecDeque};
use std::io::BufWriter;
use std::os::unix::net::{UnixListener, UnixStream};
use std::path::{Path, PathBuf};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

enum Incoming {
    Frame(Frame),
    Closed(usize),
}

/// Endpoint talking to the other ranks over local stream sockets.
///
/// Every rank listens on `<dir>/rank-<r>.sock`, connects to all lower ranks
/// and accepts the higher ones; each connection opens with a hello frame
/// carrying the sender rank. A reader thread per peer drains frames into one
/// queue, so sends never wait on the peer's reads.
pub struct SocketTransport {
    rank: usize,
    size: usize,
    writers: Vec<Option<BufWriter<UnixStream>>>,
    incoming: Receiver<Incoming>,
    pending: HashMap<(usize, u32), VecDeque<Vec<f64>>>,
    readers: Vec<JoinHandle<()>>,
    socket_path: PathBuf,
}

fn io_err(part: usize) -> impl Fn(std::io::Error) -> ExchangeError {
    move |source| ExchangeError::Io { part, source }
}

impl SocketTransport {
    pub fn socket_path(dir: &Path, rank: usize) -> PathBuf {
        dir.join(format!("rank-{rank}.sock"))
    }

    pub fn connect(
        dir: &Path,
        rank: usize,
        size: usize,
        timeout: Duration,
    ) -> Result<Self, ExchangeError> {
        let err = io_err(rank);
        let path = Self::socket_path(dir, rank);
        let _ = std::fs::remove_file(&path);
        let listener = UnixListener::bind(&path).map_err(&err)?;
        let mut streams: Vec<Option<UnixStream>> = (0..size).map(|_| None).collect();
        let deadline = Instant::now() + timeout;
        for peer in 0..rank {
            let peer_path = Self::socket_path(dir, peer);
            let stream = loop {
                match UnixStream::connect(&peer_path) {
                    Ok(s) => break s,
                    Err(e) if Instant::now() < deadline => {
                        let _ = e;
                        std::thread::sleep(Duration::from_millis(10));
                    }
                    Err(e) => return Err(err(e)),
                }
            };
            write_frame(
                &stream,
                &Frame {
                    sender: rank as u32,
                    tag: tags::HELLO,
                    payload: vec![],
                },
            )
            .map_err(&err)?;
            streams[peer] = Some(stream);
        }
        for _ in rank + 1..size {
            let (stream, _) = listener.accept().map_err(&err)?;
            let hello = read_frame(&stream).map_err(&err)?;
            let peer = hello.sender as usize;
            if hello.tag != tags::HELLO || peer <= rank || peer >= size || streams[peer].is_some() {
                return Err(ExchangeError::Frame {
                    part: rank,
                    msg: format!("unexpected hello from {peer} (tag {:#x})", hello.tag),
                });
            }
            streams[peer] = Some(stream);
        }

        let (tx, rx) = unbounded();
        let mut readers = Vec::new();
        let mut writers = Vec::with_capacity(size);
        for (peer, s) in streams.into_iter().enumerate() {
            match s {
                None => writers.push(None),
                Some(stream) => {
                    let read_half = stream.try_clone().map_err(&err)?;
                    let tx = tx.clone();
                    readers.push(std::thread::spawn(move || loop {
                        match read_frame(&read_half) {
                            Ok(f) => {
                                if tx.send(Incoming::Frame(f)).is_err() {
                                    break;
                                }
                            }
                            Err(_) => {
                                let _ = tx.send(Incoming::Closed(peer));
                                break;
                            }
                        }
                    }));
                    writers.push(Some(BufWriter::new(stream)));
                }
            }
        }
        Ok(SocketTransport {
            rank,
            size,
            writers,
            incoming: rx,
            pending: HashMap::new(),
            readers,
            socket_path: path,
        })
    }
}

impl Transport for SocketTransport {
    fn rank(&self) -> usize {
        self.rank
    }

    fn size(&self) -> usize {
        self.size
    }

    fn send(&mut self, to: usize, tag: u32, data: Vec<f64>) -> Result<(), ExchangeError> {
        let rank = self.rank;
        let w = self
            .writers
            .get_mut(to)
            .and_then(Option::as_mut)
            .ok_or(ExchangeError::Disconnected { part: rank, peer: to })?;
        write_frame(
            w,
            &Frame {
                sender: rank as u32,
                tag,
                payload: data,
            },
        )
        .map_err(io_err(rank))
    }

    fn recv(&mut self, from: usize, tag: u32) -> Result<Vec<f64>, ExchangeError> {
        if let Some(d) = self.pending.get_mut(&(from, tag)).and_then(VecDeque::pop_front) {
            return Ok(d);
        }
        loop {
            match self.incoming.recv() {
                Ok(Incoming::Frame(f)) => {
                    if f.sender as usize == from && f.tag == tag {
                        return Ok(f.payload);
                    }
                    self.pending
                        .entry((f.sender as usize, f.tag))
                        .or_default()
                        .push_back(f.payload);
                }
                Ok(Incoming::Closed(peer)) if peer == from => {
                    return Err(ExchangeError::Disconnected {
                        part: self.rank,
                        peer,
                    })
                }
                Ok(Incoming::Closed(_)) => {}
                Err(_) => {
                    return Err(ExchangeError::Disconnected {
                        part: self.rank,
                        peer: from,
                    })
                }
            }
        }
    }
}

impl Drop for SocketTransport {
    fn drop(&mut self) {
        for w in self.writers.iter_mut().flatten() {
            let _ = w.get_ref().shutdown(std::net::Shutdown::Both);
        }
        for r in self.readers.drain(..) {
            let _ = r.join();
        }
        let _ = std::fs::remove_file(&self.socket_path);
    }
}
