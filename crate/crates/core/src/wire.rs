//! Binary encoding of canonical forms, handshake frames, and transcripts.
//!
//! All integers are fixed-width big-endian.
//!
//! ```text
//! BraidBlob  = n:u16 | delta_power:i32 | factor_count:u32 | factor_count × (n bytes)
//! Frame      = "BKEX" | version:u8 (0x01) | kind:u8 | length:u32 | payload
//! Params     = n:u16 | l:u32 | BraidBlob(N(w))
//! Subgroup   = count:u16 | count × BraidBlob
//! Transmission = BraidBlob
//! ```
//!
//! Factor byte `j` is the arrangement entry for position `j`, so `n` is
//! capped at 255.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::braid::{BraidError, CanonicalForm, Permutation};
use crate::protocol::{HandshakeMessage, MessageKind, ProtocolParams};

pub const MAGIC: [u8; 4] = *b"BKEX";
pub const VERSION: u8 = 0x01;
pub const FRAME_HEADER_LEN: usize = 10;
pub const MAX_WIRE_STRANDS: usize = 255;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("truncated input: needed {needed} bytes, {remaining} remaining")]
    Truncated { needed: usize, remaining: usize },
    #[error("bad frame magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported frame version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("unknown message kind {0:#04x}")]
    UnknownKind(u8),
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("strand count {0} cannot be encoded (must be 2..=255)")]
    UnencodableStrands(usize),
    #[error("value out of range for its field: {0}")]
    FieldOverflow(&'static str),
    #[error("invalid canonical form: {0}")]
    InvalidForm(#[from] BraidError),
    #[error("params strand count {header} disagrees with base element ({blob})")]
    ParamsMismatch { header: usize, blob: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8], WireError> {
        if self.remaining() < len {
            return Err(WireError::Truncated { needed: len, remaining: self.remaining() });
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], WireError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.array::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_be_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.array()?))
    }

    fn i32(&mut self) -> Result<i32, WireError> {
        Ok(i32::from_be_bytes(self.array()?))
    }

    fn finish(&self) -> Result<(), WireError> {
        match self.remaining() {
            0 => Ok(()),
            extra => Err(WireError::TrailingBytes(extra)),
        }
    }
}

fn put_braid(out: &mut Vec<u8>, form: &CanonicalForm) -> Result<(), WireError> {
    let n = form.strands();
    if !(2..=MAX_WIRE_STRANDS).contains(&n) {
        return Err(WireError::UnencodableStrands(n));
    }
    let count = u32::try_from(form.factors().len()).map_err(|_| WireError::FieldOverflow("factor_count"))?;
    out.extend_from_slice(&(n as u16).to_be_bytes());
    out.extend_from_slice(&form.delta_power().to_be_bytes());
    out.extend_from_slice(&count.to_be_bytes());
    for f in form.factors() {
        out.extend(f.permutation().image().iter().map(|&v| v as u8));
    }
    Ok(())
}

fn read_braid(r: &mut Reader<'_>) -> Result<CanonicalForm, WireError> {
    let n = r.u16()? as usize;
    if !(2..=MAX_WIRE_STRANDS).contains(&n) {
        return Err(WireError::UnencodableStrands(n));
    }
    let delta_power = r.i32()?;
    let count = r.u32()? as usize;
    let table_bytes = count.checked_mul(n).ok_or(WireError::FieldOverflow("factor_count"))?;
    if r.remaining() < table_bytes {
        return Err(WireError::Truncated { needed: table_bytes, remaining: r.remaining() });
    }
    let mut factors = Vec::with_capacity(count);
    for _ in 0..count {
        let table = r.take(n)?;
        factors.push(Permutation::from_image(table.iter().map(|&b| b as usize).collect())?);
    }
    Ok(CanonicalForm::from_parts(n, delta_power, factors)?)
}

pub fn encode_braid(form: &CanonicalForm) -> Result<Vec<u8>, WireError> {
    let mut out = Vec::with_capacity(10 + form.factors().len() * form.strands());
    put_braid(&mut out, form)?;
    Ok(out)
}

/// Decodes exactly one blob; extra bytes are an error.
pub fn decode_braid(bytes: &[u8]) -> Result<CanonicalForm, WireError> {
    let mut r = Reader::new(bytes);
    let form = read_braid(&mut r)?;
    r.finish()?;
    Ok(form)
}

fn kind_byte(kind: MessageKind) -> u8 {
    match kind {
        MessageKind::SubgroupA => 0x01,
        MessageKind::SubgroupB => 0x02,
        MessageKind::TransmissionA => 0x03,
        MessageKind::TransmissionB => 0x04,
        MessageKind::Params => 0x05,
    }
}

fn kind_from_byte(b: u8) -> Result<MessageKind, WireError> {
    Ok(match b {
        0x01 => MessageKind::SubgroupA,
        0x02 => MessageKind::SubgroupB,
        0x03 => MessageKind::TransmissionA,
        0x04 => MessageKind::TransmissionB,
        0x05 => MessageKind::Params,
        other => return Err(WireError::UnknownKind(other)),
    })
}

fn encode_payload(msg: &HandshakeMessage) -> Result<Vec<u8>, WireError> {
    let mut out = Vec::new();
    match msg {
        HandshakeMessage::Params(p) => {
            let n = u16::try_from(p.n).map_err(|_| WireError::UnencodableStrands(p.n))?;
            let l = u32::try_from(p.l).map_err(|_| WireError::FieldOverflow("l"))?;
            out.extend_from_slice(&n.to_be_bytes());
            out.extend_from_slice(&l.to_be_bytes());
            put_braid(&mut out, p.base_form())?;
        }
        HandshakeMessage::SubgroupA(gens) | HandshakeMessage::SubgroupB(gens) => {
            let count = u16::try_from(gens.len()).map_err(|_| WireError::FieldOverflow("generator count"))?;
            out.extend_from_slice(&count.to_be_bytes());
            for g in gens {
                put_braid(&mut out, g)?;
            }
        }
        HandshakeMessage::TransmissionA(f) | HandshakeMessage::TransmissionB(f) => put_braid(&mut out, f)?,
    }
    Ok(out)
}

fn decode_payload(kind: MessageKind, payload: &[u8]) -> Result<HandshakeMessage, WireError> {
    let mut r = Reader::new(payload);
    let msg = match kind {
        MessageKind::Params => {
            let n = r.u16()? as usize;
            let l = r.u32()? as usize;
            let w = read_braid(&mut r)?;
            if w.strands() != n {
                return Err(WireError::ParamsMismatch { header: n, blob: w.strands() });
            }
            HandshakeMessage::Params(ProtocolParams::from_base_form(l, w))
        }
        MessageKind::SubgroupA | MessageKind::SubgroupB => {
            let count = r.u16()? as usize;
            let gens = (0..count).map(|_| read_braid(&mut r)).collect::<Result<Vec<_>, _>>()?;
            if kind == MessageKind::SubgroupA {
                HandshakeMessage::SubgroupA(gens)
            } else {
                HandshakeMessage::SubgroupB(gens)
            }
        }
        MessageKind::TransmissionA => HandshakeMessage::TransmissionA(read_braid(&mut r)?),
        MessageKind::TransmissionB => HandshakeMessage::TransmissionB(read_braid(&mut r)?),
    };
    r.finish()?;
    Ok(msg)
}

pub fn encode_message(msg: &HandshakeMessage) -> Result<Vec<u8>, WireError> {
    let payload = encode_payload(msg)?;
    let len = u32::try_from(payload.len()).map_err(|_| WireError::FieldOverflow("frame length"))?;
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(kind_byte(msg.kind()));
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(&payload);
    Ok(out)
}

fn read_frame(r: &mut Reader<'_>) -> Result<HandshakeMessage, WireError> {
    let magic = r.array::<4>()?;
    if magic != MAGIC {
        return Err(WireError::BadMagic(magic));
    }
    let version = r.u8()?;
    if version != VERSION {
        return Err(WireError::UnsupportedVersion(version));
    }
    let kind = kind_from_byte(r.u8()?)?;
    let len = r.u32()? as usize;
    let payload = r.take(len)?;
    decode_payload(kind, payload)
}

/// Decodes exactly one frame.
pub fn decode_message(bytes: &[u8]) -> Result<HandshakeMessage, WireError> {
    let mut r = Reader::new(bytes);
    let msg = read_frame(&mut r)?;
    r.finish()?;
    Ok(msg)
}

pub fn encode_transcript(messages: &[HandshakeMessage]) -> Result<Vec<u8>, WireError> {
    let mut out = Vec::new();
    for m in messages {
        out.extend(encode_message(m)?);
    }
    Ok(out)
}

/// Decodes a concatenation of frames. Any malformed frame fails the whole
/// transcript.
pub fn decode_transcript(bytes: &[u8]) -> Result<Vec<HandshakeMessage>, WireError> {
    let mut r = Reader::new(bytes);
    let mut out = Vec::new();
    while r.remaining() > 0 {
        out.push(read_frame(&mut r)?);
    }
    Ok(out)
}

pub fn write_transcript(path: impl AsRef<Path>, messages: &[HandshakeMessage]) -> Result<(), WireError> {
    let bytes = encode_transcript(messages)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_transcript(path: impl AsRef<Path>) -> Result<Vec<HandshakeMessage>, WireError> {
    decode_transcript(&fs::read(path)?)
}
