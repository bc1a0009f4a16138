use super::{tags, ExchangeError, Transport};
use crate::fv::CellField;
use crate::partition::LocalDomain;

/// Per-slot storage that can take part in an exchange.
pub trait SlotData {
    fn ncomp(&self) -> usize;
    fn num_slots(&self) -> usize;
    fn slot(&self, s: usize) -> &[f64];
    fn slot_mut(&mut self, s: usize) -> &mut [f64];
}

impl SlotData for CellField {
    fn ncomp(&self) -> usize {
        CellField::ncomp(self)
    }
    fn num_slots(&self) -> usize {
        CellField::num_slots(self)
    }
    fn slot(&self, s: usize) -> &[f64] {
        CellField::slot(self, s)
    }
    fn slot_mut(&mut self, s: usize) -> &mut [f64] {
        CellField::slot_mut(self, s)
    }
}

/// A scalar per slot; shorter than the full slot range is fine as long as
/// every slot the plan touches is covered.
impl SlotData for [f64] {
    fn ncomp(&self) -> usize {
        1
    }
    fn num_slots(&self) -> usize {
        self.len()
    }
    fn slot(&self, s: usize) -> &[f64] {
        std::slice::from_ref(&self[s])
    }
    fn slot_mut(&mut self, s: usize) -> &mut [f64] {
        std::slice::from_mut(&mut self[s])
    }
}

fn stride_of<F: SlotData + ?Sized>(
    domain: &LocalDomain,
    fields: &[&mut F],
    ghosts: bool,
) -> Result<usize, ExchangeError> {
    let slots = if ghosts {
        domain.num_slots()
    } else {
        domain.num_cell_slots()
    };
    for f in fields {
        if f.num_slots() < slots {
            return Err(ExchangeError::Size {
                part: domain.part,
                msg: format!("field has {} slots, exchange needs {slots}", f.num_slots()),
            });
        }
    }
    Ok(fields.iter().map(|f| f.ncomp()).sum())
}

fn pack<F: SlotData + ?Sized>(fields: &[&mut F], slots: &[usize], stride: usize) -> Vec<f64> {
    let mut buf = Vec::with_capacity(slots.len() * stride);
    for &s in slots {
        for f in fields {
            buf.extend_from_slice(f.slot(s));
        }
    }
    buf
}

fn unpack<F: SlotData + ?Sized>(
    domain: &LocalDomain,
    from: usize,
    fields: &mut [&mut F],
    slots: &[usize],
    stride: usize,
    buf: &[f64],
) -> Result<(), ExchangeError> {
    if buf.len() != slots.len() * stride {
        return Err(ExchangeError::Size {
            part: domain.part,
            msg: format!(
                "received {} values from {from}, plan expects {}",
                buf.len(),
                slots.len() * stride
            ),
        });
    }
    let mut at = 0;
    for &s in slots {
        for f in fields.iter_mut() {
            let n = f.ncomp();
            f.slot_mut(s).copy_from_slice(&buf[at..at + n]);
            at += n;
        }
    }
    Ok(())
}

fn send_all<F: SlotData + ?Sized>(
    domain: &LocalDomain,
    t: &mut impl Transport,
    fields: &[&mut F],
    stride: usize,
    ghosts: bool,
) -> Result<(), ExchangeError> {
    let plan = &domain.plan;
    let (lists, tag) = if ghosts {
        (&plan.send_ghosts, tags::HALOGHOST)
    } else {
        (&plan.send_cells, tags::HALO)
    };
    for (i, &q) in plan.neighbors.iter().enumerate() {
        t.send(q, tag, pack(fields, &lists[i], stride))?;
    }
    Ok(())
}

fn recv_all<F: SlotData + ?Sized>(
    domain: &LocalDomain,
    t: &mut impl Transport,
    fields: &mut [&mut F],
    stride: usize,
    ghosts: bool,
) -> Result<(), ExchangeError> {
    let plan = &domain.plan;
    let (lists, tag) = if ghosts {
        (&plan.recv_ghosts, tags::HALOGHOST)
    } else {
        (&plan.recv_cells, tags::HALO)
    };
    for (i, &q) in plan.neighbors.iter().enumerate() {
        let buf = t.recv(q, tag)?;
        unpack(domain, q, fields, &lists[i], stride, &buf)?;
    }
    Ok(())
}

/// Copies the owners' inner values into every halo slot of `fields`. All
/// fields travel in one message per neighbour, interleaved per cell. This is
/// a collective over the partitions of the plan.
pub fn exchange_halo<F: SlotData + ?Sized>(
    domain: &LocalDomain,
    t: &mut impl Transport,
    fields: &mut [&mut F],
) -> Result<(), ExchangeError> {
    let stride = stride_of(domain, fields, false)?;
    if domain.plan.is_empty() {
        return Ok(());
    }
    send_all(domain, t, fields, stride, false)?;
    recv_all(domain, t, fields, stride, false)
}

/// Like [`exchange_halo`] for ghost values: fills haloghost slots from the
/// ghost slots of the partitions owning the mirrored cells.
pub fn exchange_haloghost<F: SlotData + ?Sized>(
    domain: &LocalDomain,
    t: &mut impl Transport,
    fields: &mut [&mut F],
) -> Result<(), ExchangeError> {
    let stride = stride_of(domain, fields, true)?;
    if domain.plan.is_empty() {
        return Ok(());
    }
    send_all(domain, t, fields, stride, true)?;
    recv_all(domain, t, fields, stride, true)
}

/// Halo exchange overlapping `interior` with the transfer: sends go out,
/// `interior` runs, then receives complete.
pub fn exchange_halo_overlapped<F: SlotData + ?Sized, R>(
    domain: &LocalDomain,
    t: &mut impl Transport,
    fields: &mut [&mut F],
    interior: impl FnOnce() -> R,
) -> Result<R, ExchangeError> {
    let stride = stride_of(domain, fields, false)?;
    if domain.plan.is_empty() {
        return Ok(interior());
    }
    send_all(domain, t, fields, stride, false)?;
    let r = interior();
    recv_all(domain, t, fields, stride, false)?;
    Ok(r)
}
