//! Framed messages and session state machines for pepper agreement and
//! challenge-response.
//!
//! Wire format (all integers big-endian):
//!
//! ```text
//! +--------+---------+------+-------------+---------+
//! | "ASHP" | version | type | payload len | payload |
//! |   4    |    1    |  1   |      4      |   len   |
//! +--------+---------+------+-------------+---------+
//! ```
//!
//! Challenge-response runs as:
//!
//! ```text
//!   Challenger                         Responder
//!     | Challenge { fresh pepper }        |
//!     | --------------------------------> |
//!     |        Response { dynamic section }|
//!     | <-------------------------------- |
//!     | Verdict { accept | reject }        |
//!     | --------------------------------> |
//! ```
//!
//! The responder can only produce the dynamic section for an unseen pepper
//! by holding the data. Everything here is transport agnostic.

use std::fmt;
use std::io::{self, Read};

use rand::TryCryptoRng;
use subtle::ConstantTimeEq;
use thiserror::Error;

use crate::base_hash::Digest;
use crate::digest::compute_sections;
use crate::error::Result;
#[cfg(test)]
use crate::error::Error;
use crate::seasoning::{combine_shares, generate_pepper, Pepper, PepperShare};
use crate::variant::AshVariant;

pub const MAGIC: [u8; 4] = *b"ASHP";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum FrameType {
    PepperShare = 0x01,
    Challenge = 0x02,
    Response = 0x03,
    Verdict = 0x04,
}

impl TryFrom<u8> for FrameType {
    type Error = FrameError;

    fn try_from(b: u8) -> Result<Self, FrameError> {
        match b {
            0x01 => Ok(FrameType::PepperShare),
            0x02 => Ok(FrameType::Challenge),
            0x03 => Ok(FrameType::Response),
            0x04 => Ok(FrameType::Verdict),
            other => Err(FrameError::UnknownType(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("incomplete header: {available} of {HEADER_LEN} bytes")]
    IncompleteHeader { available: usize },
    #[error("bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0:#04x}")]
    UnsupportedVersion(u8),
    #[error("unknown frame type {0:#04x}")]
    UnknownType(u8),
    #[error("truncated payload: declared {declared} bytes, {available} available")]
    TruncatedPayload { declared: usize, available: usize },
    #[error("payload of {0} bytes exceeds the 32-bit length field")]
    PayloadTooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("unexpected {got:?} frame while {phase}")]
    UnexpectedFrame { phase: &'static str, got: FrameType },
    #[error("operation not allowed while {0}")]
    OutOfPhase(&'static str),
    #[error("{what} payload: expected {expected} bytes, got {actual}")]
    PayloadSize {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("invalid verdict byte {0:#04x}")]
    BadVerdict(u8),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    frame_type: FrameType,
    payload: Vec<u8>,
}

impl Frame {
    pub fn new(frame_type: FrameType, payload: Vec<u8>) -> Result<Self, FrameError> {
        if u32::try_from(payload.len()).is_err() {
            return Err(FrameError::PayloadTooLarge(payload.len()));
        }
        Ok(Frame {
            frame_type,
            payload,
        })
    }

    pub fn frame_type(&self) -> FrameType {
        self.frame_type
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.frame_type as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Decodes one frame and returns the unread remainder.
    pub fn decode(bytes: &[u8]) -> Result<(Frame, &[u8]), FrameError> {
        let (frame_type, declared) = parse_header(bytes)?;
        let body = &bytes[HEADER_LEN..];
        if body.len() < declared {
            return Err(FrameError::TruncatedPayload {
                declared,
                available: body.len(),
            });
        }
        let (payload, rest) = body.split_at(declared);
        Ok((
            Frame {
                frame_type,
                payload: payload.to_vec(),
            },
            rest,
        ))
    }

    /// Reads exactly one frame from a byte stream.
    pub fn read_from<R: Read + ?Sized>(reader: &mut R) -> Result<Frame> {
        let mut header = [0u8; HEADER_LEN];
        let got = read_full(reader, &mut header)?;
        let (frame_type, declared) = parse_header(&header[..got])?;
        let mut payload = Vec::new();
        Read::take(&mut *reader, declared as u64).read_to_end(&mut payload)?;
        if payload.len() < declared {
            return Err(FrameError::TruncatedPayload {
                declared,
                available: payload.len(),
            }
            .into());
        }
        Ok(Frame {
            frame_type,
            payload,
        })
    }
}

fn read_full<R: Read + ?Sized>(reader: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut n = 0;
    while n < buf.len() {
        match reader.read(&mut buf[n..]) {
            Ok(0) => break,
            Ok(k) => n += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(n)
}

fn parse_header(bytes: &[u8]) -> Result<(FrameType, usize), FrameError> {
    if bytes.len() < HEADER_LEN {
        return Err(FrameError::IncompleteHeader {
            available: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(FrameError::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(FrameError::UnsupportedVersion(bytes[4]));
    }
    let frame_type = FrameType::try_from(bytes[5])?;
    let declared = u32::from_be_bytes(bytes[6..10].try_into().unwrap()) as usize;
    Ok((frame_type, declared))
}

pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    frame.encode()
}

pub fn decode_frame(bytes: &[u8]) -> Result<(Frame, &[u8]), FrameError> {
    Frame::decode(bytes)
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Frame")
            .field("type", &self.frame_type)
            .field("payload_len", &self.payload.len())
            .finish()
    }
}

pub fn share_frame(share: &PepperShare) -> Frame {
    Frame {
        frame_type: FrameType::PepperShare,
        payload: share.as_bytes().to_vec(),
    }
}

pub fn share_from_frame(frame: &Frame, variant: AshVariant) -> Result<PepperShare> {
    expect_type(frame, FrameType::PepperShare, "agreeing on a pepper")?;
    expect_len(frame, "pepper share", variant.pepper_size())?;
    PepperShare::new(frame.payload.clone(), variant)
}

/// XOR of the local share and every received share.
pub fn run_pepper_agreement(local_share: &PepperShare, received: &[PepperShare]) -> Result<Pepper> {
    let expected = local_share.as_bytes().len();
    if let Some(bad) = received.iter().find(|s| s.as_bytes().len() != expected) {
        return Err(ProtocolError::PayloadSize {
            what: "pepper share",
            expected,
            actual: bad.as_bytes().len(),
        }
        .into());
    }
    let mut all = Vec::with_capacity(received.len() + 1);
    all.push(local_share.clone());
    all.extend_from_slice(received);
    combine_shares(&all)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    fn to_frame(self) -> Frame {
        let byte = match self {
            Verdict::Accept => 0x01,
            Verdict::Reject => 0x00,
        };
        Frame {
            frame_type: FrameType::Verdict,
            payload: vec![byte],
        }
    }

    pub fn from_frame(frame: &Frame) -> Result<Self> {
        expect_type(frame, FrameType::Verdict, "awaiting a verdict")?;
        match frame.payload.as_slice() {
            [0x01] => Ok(Verdict::Accept),
            [0x00] => Ok(Verdict::Reject),
            [b] => Err(ProtocolError::BadVerdict(*b).into()),
            other => Err(ProtocolError::PayloadSize {
                what: "verdict",
                expected: 1,
                actual: other.len(),
            }
            .into()),
        }
    }
}

fn expect_type(frame: &Frame, want: FrameType, phase: &'static str) -> Result<()> {
    if frame.frame_type != want {
        return Err(ProtocolError::UnexpectedFrame {
            phase,
            got: frame.frame_type,
        }
        .into());
    }
    Ok(())
}

fn expect_len(frame: &Frame, what: &'static str, expected: usize) -> Result<()> {
    if frame.payload.len() != expected {
        return Err(ProtocolError::PayloadSize {
            what,
            expected,
            actual: frame.payload.len(),
        }
        .into());
    }
    Ok(())
}

/// Dynamic section of an in-memory message under `pepper`.
pub fn dynamic_section(message: &[u8], variant: AshVariant, pepper: &Pepper) -> Result<Digest> {
    compute_sections(variant.base(), message, pepper).map(|(_, dy)| dy)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChallengerPhase {
    Idle,
    AwaitingResponse(Pepper),
    Done(Verdict),
}

impl ChallengerPhase {
    fn describe(&self) -> &'static str {
        match self {
            ChallengerPhase::Idle => "idle",
            ChallengerPhase::AwaitingResponse(_) => "awaiting response",
            ChallengerPhase::Done(_) => "done",
        }
    }
}

/// One challenge session. Each session issues exactly one pepper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Challenger {
    variant: AshVariant,
    phase: ChallengerPhase,
}

impl Challenger {
    pub fn new(variant: AshVariant) -> Self {
        Challenger {
            variant,
            phase: ChallengerPhase::Idle,
        }
    }

    pub fn phase(&self) -> &ChallengerPhase {
        &self.phase
    }

    pub fn verdict(&self) -> Option<Verdict> {
        match self.phase {
            ChallengerPhase::Done(v) => Some(v),
            _ => None,
        }
    }

    pub fn issue<R: TryCryptoRng + ?Sized>(&mut self, rng: &mut R) -> Result<Frame> {
        if self.phase != ChallengerPhase::Idle {
            return Err(ProtocolError::OutOfPhase(self.phase.describe()).into());
        }
        let pepper = generate_pepper(self.variant, rng)?;
        let frame = Frame {
            frame_type: FrameType::Challenge,
            payload: pepper.as_bytes().to_vec(),
        };
        self.phase = ChallengerPhase::AwaitingResponse(pepper);
        Ok(frame)
    }

    pub fn check(&mut self, response: &Frame, message: &[u8]) -> Result<Frame> {
        let variant = self.variant;
        self.check_with(response, |p| dynamic_section(message, variant, p))
    }

    /// Like [`check`](Self::check), with the local dynamic section computed
    /// by the caller (e.g. from a file).
    pub fn check_with<F>(&mut self, response: &Frame, local: F) -> Result<Frame>
    where
        F: FnOnce(&Pepper) -> Result<Digest>,
    {
        let ChallengerPhase::AwaitingResponse(pepper) = &self.phase else {
            return Err(ProtocolError::OutOfPhase(self.phase.describe()).into());
        };
        expect_type(response, FrameType::Response, self.phase.describe())?;
        expect_len(response, "response", self.variant.section_size())?;
        let expected = local(pepper)?;
        let verdict = if bool::from(expected.as_bytes().ct_eq(&response.payload)) {
            Verdict::Accept
        } else {
            Verdict::Reject
        };
        self.phase = ChallengerPhase::Done(verdict);
        Ok(verdict.to_frame())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponderPhase {
    AwaitingChallenge,
    AwaitingVerdict,
    Done(Verdict),
}

impl ResponderPhase {
    fn describe(&self) -> &'static str {
        match self {
            ResponderPhase::AwaitingChallenge => "awaiting challenge",
            ResponderPhase::AwaitingVerdict => "awaiting verdict",
            ResponderPhase::Done(_) => "done",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Responder {
    variant: AshVariant,
    phase: ResponderPhase,
}

impl Responder {
    pub fn new(variant: AshVariant) -> Self {
        Responder {
            variant,
            phase: ResponderPhase::AwaitingChallenge,
        }
    }

    pub fn phase(&self) -> ResponderPhase {
        self.phase
    }

    pub fn answer(&mut self, challenge: &Frame, message: &[u8]) -> Result<Frame> {
        let variant = self.variant;
        self.answer_with(challenge, |p| dynamic_section(message, variant, p))
    }

    pub fn answer_with<F>(&mut self, challenge: &Frame, compute: F) -> Result<Frame>
    where
        F: FnOnce(&Pepper) -> Result<Digest>,
    {
        if self.phase != ResponderPhase::AwaitingChallenge {
            return Err(ProtocolError::OutOfPhase(self.phase.describe()).into());
        }
        expect_type(challenge, FrameType::Challenge, self.phase.describe())?;
        expect_len(challenge, "challenge", self.variant.pepper_size())?;
        let pepper = Pepper::new(challenge.payload.clone(), self.variant)?;
        let dynamic = compute(&pepper)?;
        self.phase = ResponderPhase::AwaitingVerdict;
        Ok(Frame {
            frame_type: FrameType::Response,
            payload: dynamic.into_bytes(),
        })
    }

    pub fn conclude(&mut self, verdict: &Frame) -> Result<Verdict> {
        if self.phase != ResponderPhase::AwaitingVerdict {
            return Err(ProtocolError::OutOfPhase(self.phase.describe()).into());
        }
        let v = Verdict::from_frame(verdict)?;
        self.phase = ResponderPhase::Done(v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::OsRng;

    fn frame(t: FrameType, payload: &[u8]) -> Frame {
        Frame::new(t, payload.to_vec()).unwrap()
    }

    #[test]
    fn empty_payload_is_ten_bytes() {
        let f = frame(FrameType::Verdict, &[]);
        let enc = f.encode();
        assert_eq!(enc.len(), 10);
        assert_eq!(&enc[..6], b"ASHP\x01\x04");
        let (g, rest) = Frame::decode(&enc).unwrap();
        assert_eq!(g, f);
        assert!(rest.is_empty());
    }

    #[test]
    fn decode_returns_remainder() {
        let a = frame(FrameType::Challenge, b"abc");
        let b = frame(FrameType::Response, b"defg");
        let mut buf = a.encode();
        buf.extend(b.encode());
        let (x, rest) = decode_frame(&buf).unwrap();
        let (y, rest) = decode_frame(rest).unwrap();
        assert_eq!((x, y), (a, b));
        assert!(rest.is_empty());
    }

    #[test]
    fn decode_errors() {
        let good = frame(FrameType::Response, &[1, 2, 3, 4, 5]).encode();
        assert_eq!(
            Frame::decode(&good[..9]).unwrap_err(),
            FrameError::IncompleteHeader { available: 9 }
        );
        assert_eq!(
            Frame::decode(&good[..14]).unwrap_err(),
            FrameError::TruncatedPayload {
                declared: 5,
                available: 4
            }
        );
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(Frame::decode(&bad), Err(FrameError::BadMagic(_))));
        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(Frame::decode(&bad).unwrap_err(), FrameError::UnsupportedVersion(2));
        let mut bad = good;
        bad[5] = 9;
        assert_eq!(Frame::decode(&bad).unwrap_err(), FrameError::UnknownType(9));
    }

    #[test]
    fn read_from_stream() {
        let f = frame(FrameType::PepperShare, &[7; 64]);
        let enc = f.encode();
        assert_eq!(Frame::read_from(&mut &enc[..]).unwrap(), f);
        assert!(matches!(
            Frame::read_from(&mut &enc[..40]),
            Err(Error::Frame(FrameError::TruncatedPayload { declared: 64, available: 30 }))
        ));
        assert!(matches!(
            Frame::read_from(&mut &enc[..3]),
            Err(Error::Frame(FrameError::IncompleteHeader { available: 3 }))
        ));
    }

    #[test]
    fn agreement() {
        let v = AshVariant::Ash1;
        let a = PepperShare::generate(v, &mut OsRng).unwrap();
        let b = PepperShare::generate(v, &mut OsRng).unwrap();
        let left = run_pepper_agreement(&a, std::slice::from_ref(&b)).unwrap();
        let right = run_pepper_agreement(&b, std::slice::from_ref(&a)).unwrap();
        assert_eq!(left, right);
        let xor: Vec<u8> = a.as_bytes().iter().zip(b.as_bytes()).map(|(x, y)| x ^ y).collect();
        assert_eq!(left.as_bytes(), xor);
        assert_eq!(run_pepper_agreement(&a, &[]).unwrap().as_bytes(), a.as_bytes());

        let wide = PepperShare::generate(AshVariant::Ash2, &mut OsRng).unwrap();
        assert!(matches!(
            run_pepper_agreement(&a, &[wide]),
            Err(Error::Protocol(ProtocolError::PayloadSize { .. }))
        ));

        let f = share_frame(&a);
        assert_eq!(share_from_frame(&f, v).unwrap(), a);
        assert!(share_from_frame(&f, AshVariant::Ash2).is_err());
    }

    #[test]
    fn honest_exchange_accepts() {
        for v in AshVariant::ALL {
            let msg = b"the release tarball";
            let mut c = Challenger::new(v);
            let mut r = Responder::new(v);
            let ch = c.issue(&mut OsRng).unwrap();
            let resp = r.answer(&ch, msg).unwrap();
            let verdict = c.check(&resp, msg).unwrap();
            assert_eq!(c.verdict(), Some(Verdict::Accept));
            assert_eq!(r.conclude(&verdict).unwrap(), Verdict::Accept);
            assert_eq!(r.phase(), ResponderPhase::Done(Verdict::Accept));
        }
    }

    #[test]
    fn different_data_rejects() {
        let mut c = Challenger::new(AshVariant::Ash1);
        let mut r = Responder::new(AshVariant::Ash1);
        let ch = c.issue(&mut OsRng).unwrap();
        let resp = r.answer(&ch, b"copy B").unwrap();
        let verdict = c.check(&resp, b"copy A").unwrap();
        assert_eq!(r.conclude(&verdict).unwrap(), Verdict::Reject);
    }

    #[test]
    fn out_of_phase_leaves_state() {
        let v = AshVariant::Ash1;
        let mut c = Challenger::new(v);
        let before = c.clone();
        let bogus = frame(FrameType::Response, &[0; 32]);
        assert!(c.check(&bogus, b"m").is_err());
        assert_eq!(c, before);

        let ch = c.issue(&mut OsRng).unwrap();
        let before = c.clone();
        assert!(c.issue(&mut OsRng).is_err());
        assert!(c.check(&ch, b"m").is_err());
        assert!(c.check(&frame(FrameType::Response, &[0; 31]), b"m").is_err());
        assert_eq!(c, before);

        let mut r = Responder::new(v);
        let before = r.clone();
        assert!(r.conclude(&frame(FrameType::Verdict, &[1])).is_err());
        assert!(r.answer(&frame(FrameType::Challenge, &[0; 63]), b"m").is_err());
        assert!(r.answer(&bogus, b"m").is_err());
        assert_eq!(r, before);
        r.answer(&ch, b"m").unwrap();
        let before = r.clone();
        assert!(r.answer(&ch, b"m").is_err());
        assert!(r.conclude(&frame(FrameType::Verdict, &[7])).is_err());
        assert!(r.conclude(&frame(FrameType::Verdict, &[])).is_err());
        assert_eq!(r, before);
    }
}
