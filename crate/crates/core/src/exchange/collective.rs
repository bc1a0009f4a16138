use super::{tags, ExchangeError, Transport};

fn reduce_with(
    t: &mut impl Transport,
    values: &[f64],
    op: impl Fn(f64, f64) -> f64,
) -> Result<Vec<f64>, ExchangeError> {
    let size = t.size();
    if size == 1 {
        return Ok(values.to_vec());
    }
    if t.rank() == 0 {
        // fixed rank order keeps the result reproducible for a given size
        let mut acc = values.to_vec();
        for from in 1..size {
            let part = t.recv(from, tags::REDUCE)?;
            if part.len() != acc.len() {
                return Err(ExchangeError::Size {
                    part: 0,
                    msg: format!("reduction length {} from {from}, expected {}", part.len(), acc.len()),
                });
            }
            for (a, b) in acc.iter_mut().zip(part) {
                *a = op(*a, b);
            }
        }
        for to in 1..size {
            t.send(to, tags::BROADCAST, acc.clone())?;
        }
        Ok(acc)
    } else {
        t.send(0, tags::REDUCE, values.to_vec())?;
        t.recv(0, tags::BROADCAST)
    }
}

/// Element-wise sum over all ranks, accumulated in rank order.
pub fn allreduce_sum(t: &mut impl Transport, values: &[f64]) -> Result<Vec<f64>, ExchangeError> {
    reduce_with(t, values, |a, b| a + b)
}

pub fn allreduce_max(t: &mut impl Transport, values: &[f64]) -> Result<Vec<f64>, ExchangeError> {
    reduce_with(t, values, f64::max)
}

pub fn barrier(t: &mut impl Transport) -> Result<(), ExchangeError> {
    reduce_with(t, &[], |a, _| a).map(|_| ())
}

/// Every rank's `values`, indexed by rank, on every rank.
pub fn allgather_inner(
    t: &mut impl Transport,
    values: &[f64],
) -> Result<Vec<Vec<f64>>, ExchangeError> {
    let size = t.size();
    let rank = t.rank();
    let mut out = vec![Vec::new(); size];
    for to in (0..size).filter(|&q| q != rank) {
        t.send(to, tags::GATHER, values.to_vec())?;
    }
    for from in 0..size {
        out[from] = if from == rank {
            values.to_vec()
        } else {
            t.recv(from, tags::GATHER)?
        };
    }
    Ok(out)
}
