//! Length-prefixed binary frame used by the socket transport:
//!
//! ```text
//! offset 0   u64 LE  payload length in bytes (a multiple of 8)
//! offset 8   u32 LE  sender rank
//! offset 12  u32 LE  tag
//! offset 16  f64 LE  payload values
//! ```

use std::io::{Read, Write};

pub const FRAME_HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub sender: u32,
    pub tag: u32,
    pub payload: Vec<f64>,
}

pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + 8 * frame.payload.len());
    out.extend_from_slice(&((8 * frame.payload.len()) as u64).to_le_bytes());
    out.extend_from_slice(&frame.sender.to_le_bytes());
    out.extend_from_slice(&frame.tag.to_le_bytes());
    for v in &frame.payload {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decodes one frame from the start of `bytes`; returns it with the number of
/// bytes consumed, or `None` if `bytes` holds less than a full frame.
pub fn decode_frame(bytes: &[u8]) -> Result<Option<(Frame, usize)>, String> {
    if bytes.len() < FRAME_HEADER_LEN {
        return Ok(None);
    }
    let len = u64::from_le_bytes(bytes[0..8].try_into().unwrap()) as usize;
    if !len.is_multiple_of(8) {
        return Err(format!("payload length {len} is not a multiple of 8"));
    }
    let sender = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let tag = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    let total = FRAME_HEADER_LEN + len;
    if bytes.len() < total {
        return Ok(None);
    }
    let payload = bytes[FRAME_HEADER_LEN..total]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Some((Frame { sender, tag, payload }, total)))
}

pub fn write_frame(mut w: impl Write, frame: &Frame) -> std::io::Result<()> {
    w.write_all(&encode_frame(frame))?;
    w.flush()
}

/// Blocking read of exactly one frame.
pub fn read_frame(mut r: impl Read) -> std::io::Result<Frame> {
    let mut header = [0u8; FRAME_HEADER_LEN];
    r.read_exact(&mut header)?;
    let len = u64::from_le_bytes(header[0..8].try_into().unwrap()) as usize;
    if !len.is_multiple_of(8) {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("payload length {len} is not a multiple of 8"),
        ));
    }
    let mut body = vec![0u8; len];
    r.read_exact(&mut body)?;
    Ok(Frame {
        sender: u32::from_le_bytes(header[8..12].try_into().unwrap()),
        tag: u32::from_le_bytes(header[12..16].try_into().unwrap()),
        payload: body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout_is_bit_exact() {
        let f = Frame {
            sender: 3,
            tag: 0x0102_0304,
            payload: vec![1.0, -2.5],
        };
        let b = encode_frame(&f);
        assert_eq!(b.len(), 32);
        assert_eq!(&b[0..8], &16u64.to_le_bytes());
        assert_eq!(&b[8..12], &[3, 0, 0, 0]);
        assert_eq!(&b[12..16], &[4, 3, 2, 1]);
        assert_eq!(&b[16..24], &1.0f64.to_le_bytes());
        assert_eq!(&b[24..32], &(-2.5f64).to_le_bytes());
        assert_eq!(decode_frame(&b).unwrap(), Some((f.clone(), 32)));
        assert_eq!(decode_frame(&b[..31]).unwrap(), None);
        assert_eq!(read_frame(&b[..]).unwrap(), f);
    }

    #[test]
    fn rejects_ragged_length() {
        let mut b = encode_frame(&Frame {
            sender: 0,
            tag: 0,
            payload: vec![0.0],
        });
        b[0] = 7;
        assert!(decode_frame(&b).is_err());
        assert!(read_frame(&b[..]).is_err());
    }
}
