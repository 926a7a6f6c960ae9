//! Server-visible protocol messages and their binary framing.
//!
//! Each frame is
//!
//! ```text
//! len: u16 LE   number of body bytes
//! body          kind tag (1 byte) + payload
//! 0x0A          frame terminator
//! ```
//!
//! | tag | kind                 | payload                                   |
//! |-----|----------------------|-------------------------------------------|
//! | 1   | `QubitPrep`          | `x: u16 LE, y: u16 LE`                    |
//! | 2   | `EntangleAck`        | none                                      |
//! | 3   | `MeasureInstruction` | `x: u16 LE, y: u16 LE, delta: f64 LE`     |
//! | 4   | `MeasureResult`      | `x: u16 LE, y: u16 LE, b: u8 (0 or 1)`    |
//! | 5   | `Done`               | none                                      |
//!
//! Angles are radians in `[0, 2π)`. A transcript file is a plain
//! concatenation of frames.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::mbqc::Site;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Message {
    QubitPrep { site: Site },
    EntangleAck,
    MeasureInstruction { site: Site, delta: f64 },
    MeasureResult { site: Site, b: u8 },
    Done,
}

/// Ordered messages as seen by the server.
pub type ProtocolTranscript = Vec<Message>;

impl Message {
    pub fn tag(&self) -> u8 {
        match self {
            Message::QubitPrep { .. } => 1,
            Message::EntangleAck => 2,
            Message::MeasureInstruction { .. } => 3,
            Message::MeasureResult { .. } => 4,
            Message::Done => 5,
        }
    }

    fn site_bytes(site: Site, body: &mut Vec<u8>) -> Result<()> {
        for v in [site.x, site.y] {
            let v = u16::try_from(v)
                .map_err(|_| Error::Protocol(format!("site coordinate {v} exceeds 16 bits")))?;
            body.extend_from_slice(&v.to_le_bytes());
        }
        Ok(())
    }

    /// Frame bytes of this message.
    pub fn encode(&self) -> Result<Vec<u8>> {
        let mut body = vec![self.tag()];
        match *self {
            Message::QubitPrep { site } => Self::site_bytes(site, &mut body)?,
            Message::MeasureInstruction { site, delta } => {
                Self::site_bytes(site, &mut body)?;
                body.extend_from_slice(&delta.to_le_bytes());
            }
            Message::MeasureResult { site, b } => {
                Self::site_bytes(site, &mut body)?;
                body.push(b);
            }
            Message::EntangleAck | Message::Done => {}
        }
        let mut frame = (body.len() as u16).to_le_bytes().to_vec();
        frame.extend_from_slice(&body);
        frame.push(b'\n');
        Ok(frame)
    }

    /// Parses one frame body (without length prefix and terminator).
    pub fn decode_body(body: &[u8]) -> Result<Message> {
        let bad = |what: &str| Error::Protocol(format!("malformed message: {what}"));
        let (&tag, rest) = body.split_first().ok_or_else(|| bad("empty body"))?;
        let site = |rest: &[u8]| -> Result<Site> {
            if rest.len() < 4 {
                return Err(bad("truncated site"));
            }
            Ok(Site::new(
                u16::from_le_bytes([rest[0], rest[1]]) as usize,
                u16::from_le_bytes([rest[2], rest[3]]) as usize,
            ))
        };
        let expect_len = |n: usize| {
            if rest.len() == n {
                Ok(())
            } else {
                Err(bad(&format!("tag {tag} expects {n} payload bytes, got {}", rest.len())))
            }
        };
        match tag {
            1 => {
                expect_len(4)?;
                Ok(Message::QubitPrep { site: site(rest)? })
            }
            2 => {
                expect_len(0)?;
                Ok(Message::EntangleAck)
            }
            3 => {
                expect_len(12)?;
                let mut d = [0u8; 8];
                d.copy_from_slice(&rest[4..12]);
                let delta = f64::from_le_bytes(d);
                if !(0.0..std::f64::consts::TAU).contains(&delta) {
                    return Err(bad(&format!("angle {delta} outside [0, 2π)")));
                }
                Ok(Message::MeasureInstruction { site: site(rest)?, delta })
            }
            4 => {
                expect_len(5)?;
                let b = rest[4];
                if b > 1 {
                    return Err(bad(&format!("outcome byte {b}")));
                }
                Ok(Message::MeasureResult { site: site(rest)?, b })
            }
            5 => {
                expect_len(0)?;
                Ok(Message::Done)
            }
            t => Err(bad(&format!("unknown tag {t}"))),
        }
    }
}

pub fn write_transcript(mut w: impl Write, transcript: &[Message]) -> Result<()> {
    for m in transcript {
        w.write_all(&m.encode()?)?;
    }
    Ok(())
}

pub fn read_transcript(mut r: impl Read) -> Result<ProtocolTranscript> {
    let mut out = Vec::new();
    loop {
        let mut len = [0u8; 2];
        match r.read_exact(&mut len[..1]) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        }
        r.read_exact(&mut len[1..])?;
        let n = u16::from_le_bytes(len) as usize;
        let mut body = vec![0u8; n + 1];
        r.read_exact(&mut body)?;
        if body[n] != b'\n' {
            return Err(Error::Protocol("frame is not newline-terminated".into()));
        }
        out.push(Message::decode_body(&body[..n])?);
    }
    Ok(out)
}
