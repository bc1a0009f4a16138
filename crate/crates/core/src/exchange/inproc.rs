use super::{ExchangeError, Transport};
use crossbeam::channel::{bounded, Receiver, RecvTimeoutError, SendTimeoutError, Sender};
use std::collections::{HashMap, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

const POLL: Duration = Duration::from_millis(20);

struct Message {
    from: usize,
    tag: u32,
    data: Vec<f64>,
}

/// Endpoint of a worker running in this process; partitions talk through
/// bounded queues, one inbox per worker.
pub struct InProcessTransport {
    rank: usize,
    outboxes: Vec<Sender<Message>>,
    inbox: Receiver<Message>,
    pending: HashMap<(usize, u32), VecDeque<Vec<f64>>>,
    abort: Arc<AtomicBool>,
}

impl InProcessTransport {
    /// Creates `size` connected endpoints.
    pub fn group(size: usize) -> Vec<InProcessTransport> {
        let capacity = 64.max(8 * size);
        let (tx, rx): (Vec<_>, Vec<_>) = (0..size).map(|_| bounded(capacity)).unzip();
        let abort = Arc::new(AtomicBool::new(false));
        rx.into_iter()
            .enumerate()
            .map(|(rank, inbox)| InProcessTransport {
                rank,
                outboxes: tx.clone(),
                inbox,
                pending: HashMap::new(),
                abort: abort.clone(),
            })
            .collect()
    }

    /// Makes every blocked peer fail with [`ExchangeError::Aborted`].
    pub fn abort(&self) {
        self.abort.store(true, Ordering::SeqCst);
    }

    fn aborted(&self) -> bool {
        self.abort.load(Ordering::SeqCst)
    }
}

impl Transport for InProcessTransport {
    fn rank(&self) -> usize {
        self.rank
    }

    fn size(&self) -> usize {
        self.outboxes.len()
    }

    fn send(&mut self, to: usize, tag: u32, data: Vec<f64>) -> Result<(), ExchangeError> {
        let tx = self.outboxes.get(to).ok_or(ExchangeError::Disconnected {
            part: self.rank,
            peer: to,
        })?;
        let mut msg = Message {
            from: self.rank,
            tag,
            data,
        };
        loop {
            match tx.send_timeout(msg, POLL) {
                Ok(()) => return Ok(()),
                Err(SendTimeoutError::Timeout(m)) => {
                    if self.aborted() {
                        return Err(ExchangeError::Aborted { part: self.rank });
                    }
                    msg = m;
                }
                Err(SendTimeoutError::Disconnected(_)) => {
                    return Err(ExchangeError::Disconnected {
                        part: self.rank,
                        peer: to,
                    })
                }
            }
        }
    }

    fn recv(&mut self, from: usize, tag: u32) -> Result<Vec<f64>, ExchangeError> {
        if let Some(q) = self.pending.get_mut(&(from, tag)) {
            if let Some(d) = q.pop_front() {
                return Ok(d);
            }
        }
        loop {
            match self.inbox.recv_timeout(POLL) {
                Ok(m) if m.from == from && m.tag == tag => return Ok(m.data),
                Ok(m) => self.pending.entry((m.from, m.tag)).or_default().push_back(m.data),
                Err(RecvTimeoutError::Timeout) => {
                    if self.aborted() {
                        return Err(ExchangeError::Aborted { part: self.rank });
                    }
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(ExchangeError::Disconnected {
                        part: self.rank,
                        peer: from,
                    })
                }
            }
        }
    }
}

/// Runs `work` once per item on its own worker thread, each with a connected
/// in-process endpoint (rank = item index). When a worker fails the others
/// are aborted and the first failure is returned.
pub fn run_workers<D, T, E, F>(items: &[D], work: F) -> Result<Vec<T>, E>
where
    D: Sync,
    T: Send,
    E: Send + From<ExchangeError>,
    F: Fn(&D, &mut InProcessTransport) -> Result<T, E> + Sync,
{
    let mut endpoints = InProcessTransport::group(items.len());
    if items.len() == 1 {
        let mut t = endpoints.pop().unwrap();
        return work(&items[0], &mut t).map(|r| vec![r]);
    }
    let first_failure = AtomicUsize::new(usize::MAX);
    let results: Vec<Result<T, E>> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .iter()
            .zip(endpoints)
            .map(|(item, mut t)| {
                let work = &work;
                let first_failure = &first_failure;
                scope.spawn(move || {
                    let rank = t.rank;
                    let out = catch_unwind(AssertUnwindSafe(|| work(item, &mut t)))
                        .unwrap_or_else(|_| Err(ExchangeError::Panicked { part: rank }.into()));
                    if out.is_err() {
                        let _ = first_failure.compare_exchange(
                            usize::MAX,
                            rank,
                            Ordering::SeqCst,
                            Ordering::SeqCst,
                        );
                        t.abort();
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(rank, h)| {
                h.join()
                    .unwrap_or_else(|_| Err(ExchangeError::Panicked { part: rank }.into()))
            })
            .collect()
    });
    let failed = first_failure.load(Ordering::SeqCst);
    let mut out = Vec::with_capacity(results.len());
    let mut first_err = None;
    for (rank, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => out.push(v),
            Err(e) => {
                if rank == failed || first_err.is_none() {
                    if rank == failed {
                        return Err(e);
                    }
                    first_err = Some(e);
                }
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Worker count from `FVDOM_WORKERS`, defaulting to 1.
pub fn worker_count_from_env() -> usize {
    std::env::var("FVDOM_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&k| k >= 1)
        .unwrap_or(1)
}
