//! Moving field data between partitions.
//!
//! A [`Transport`] is one partition's endpoint: point-to-point sends and
//! matched receives keyed by `(sender, tag)`. Halo and haloghost exchanges,
//! reductions and the worker launcher are built on top of it.

mod collective;
mod frame;
mod halo;
mod inproc;
mod socket;
mod timing;

pub use collective::{allgather_inner, allreduce_max, allreduce_sum, barrier};
pub use frame::{decode_frame, encode_frame, read_frame, write_frame, Frame, FRAME_HEADER_LEN};
pub use halo::{exchange_halo, exchange_halo_overlapped, exchange_haloghost, SlotData};
pub use inproc::{run_workers, worker_count_from_env, InProcessTransport};
pub use socket::SocketTransport;
pub use timing::{barrier_time, ExchangeTiming, ExchangeVariant};

use thiserror::Error;

/// Message tags. Each collective uses its own tag so concurrent traffic from
/// one peer never matches the wrong receive.
pub mod tags {
    pub const HALO: u32 = 1;
    pub const HALOGHOST: u32 = 2;
    pub const REDUCE: u32 = 10;
    pub const BROADCAST: u32 = 11;
    pub const GATHER: u32 = 12;
    pub const BARRIER: u32 = 13;
    pub const ALL_TO_ALL: u32 = 20;
    pub const HELLO: u32 = 0xFFFF_0000;
}

#[derive(Debug, Error)]
pub enum ExchangeError {
    #[error("partition {part}: peer {peer} disconnected")]
    Disconnected { part: usize, peer: usize },
    #[error("partition {part}: run aborted by another worker")]
    Aborted { part: usize },
    #[error("partition {part}: {msg}")]
    Size { part: usize, msg: String },
    #[error("partition {part}: bad frame: {msg}")]
    Frame { part: usize, msg: String },
    #[error("partition {part}: worker panicked")]
    Panicked { part: usize },
    #[error("partition {part}: {source}")]
    Io {
        part: usize,
        #[source]
        source: std::io::Error,
    },
}

/// One partition's endpoint.
///
/// Messages between a given pair are delivered in the order they were sent.
/// `send` never blocks on the receiver draining its queue indefinitely, so a
/// collective that sends to all peers before receiving cannot deadlock.
pub trait Transport: Send {
    fn rank(&self) -> usize;
    fn size(&self) -> usize;
    fn send(&mut self, to: usize, tag: u32, data: Vec<f64>) -> Result<(), ExchangeError>;
    fn recv(&mut self, from: usize, tag: u32) -> Result<Vec<f64>, ExchangeError>;
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn rank(&self) -> usize {
        (**self).rank()
    }
    fn size(&self) -> usize {
        (**self).size()
    }
    fn send(&mut self, to: usize, tag: u32, data: Vec<f64>) -> Result<(), ExchangeError> {
        (**self).send(to, tag, data)
    }
    fn recv(&mut self, from: usize, tag: u32) -> Result<Vec<f64>, ExchangeError> {
        (**self).recv(from, tag)
    }
}

impl<T: Transport + ?Sized> Transport for &mut T {
    fn rank(&self) -> usize {
        (**self).rank()
    }
    fn size(&self) -> usize {
        (**self).size()
    }
    fn send(&mut self, to: usize, tag: u32, data: Vec<f64>) -> Result<(), ExchangeError> {
        (**self).send(to, tag, data)
    }
    fn recv(&mut self, from: usize, tag: u32) -> Result<Vec<f64>, ExchangeError> {
        (**self).recv(from, tag)
    }
}

/// Transport of a single partition; any send or receive is an error.
#[derive(Debug, Default, Clone, Copy)]
pub struct SoloTransport;

impl Transport for SoloTransport {
    fn rank(&self) -> usize {
        0
    }
    fn size(&self) -> usize {
        1
    }
    fn send(&mut self, to: usize, _tag: u32, _data: Vec<f64>) -> Result<(), ExchangeError> {
        Err(ExchangeError::Disconnected { part: 0, peer: to })
    }
    fn recv(&mut self, from: usize, _tag: u32) -> Result<Vec<f64>, ExchangeError> {
        Err(ExchangeError::Disconnected { part: 0, peer: from })
    }
}
