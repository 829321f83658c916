//! Pepper and salt material.
//!
//! A pepper is one block of random bytes XOR-tiled over every block of the
//! restructured stream. Several parties can agree on a pepper by each
//! contributing a share and XOR-ing them together; one honest random share
//! is enough to make the result uniform. A salt is one block appended to
//! the message itself, built from two half-block contributions.

use std::fmt;

use rand::TryCryptoRng;

use crate::error::{Error, Result};
use crate::restructure::{Layout, RestructuredStream};
use crate::variant::AshVariant;

/// One block of seasoning for the dynamic section.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pepper(Vec<u8>);

impl Pepper {
    pub fn new(bytes: Vec<u8>, variant: AshVariant) -> Result<Self> {
        Self::with_layout(bytes, variant.layout())
    }

    pub fn with_layout(bytes: Vec<u8>, layout: Layout) -> Result<Self> {
        check_len("pepper", layout.block_size, bytes.len())?;
        Ok(Pepper(bytes))
    }

    pub fn zero(variant: AshVariant) -> Self {
        Pepper(vec![0; variant.pepper_size()])
    }

    pub fn from_hex(s: &str, variant: AshVariant) -> Result<Self> {
        let bytes = hex::decode(s.trim()).map_err(|e| crate::error::FormatError::Invalid {
            field: "pepper",
            reason: e.to_string(),
        })?;
        Self::new(bytes, variant)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl fmt::Debug for Pepper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pepper({})", self.to_hex())
    }
}

/// One party's contribution to a jointly generated pepper.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PepperShare(Vec<u8>);

impl PepperShare {
    pub fn new(bytes: Vec<u8>, variant: AshVariant) -> Result<Self> {
        check_len("pepper share", variant.pepper_size(), bytes.len())?;
        Ok(PepperShare(bytes))
    }

    pub fn generate<R: TryCryptoRng + ?Sized>(variant: AshVariant, rng: &mut R) -> Result<Self> {
        generate_pepper(variant, rng).map(|p| PepperShare(p.0))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl From<Pepper> for PepperShare {
    fn from(p: Pepper) -> Self {
        PepperShare(p.0)
    }
}

/// A block appended to the message, formed from two half-block contributions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Salt(Vec<u8>);

impl Salt {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn halves(&self) -> (&[u8], &[u8]) {
        self.0.split_at(self.0.len() / 2)
    }
}

fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::SizeMismatch {
            what,
            expected,
            actual,
        });
    }
    Ok(())
}

/// Draws a fresh pepper. Pass `rand::rngs::OsRng` outside of tests.
pub fn generate_pepper<R: TryCryptoRng + ?Sized>(variant: AshVariant, rng: &mut R) -> Result<Pepper> {
    let mut bytes = vec![0u8; variant.pepper_size()];
    rng.try_fill_bytes(&mut bytes)
        .map_err(|e| Error::Entropy(e.to_string()))?;
    Ok(Pepper(bytes))
}

/// XORs `pepper` into `buf`, tiling it; `offset` is the position of `buf[0]`
/// in the full stream.
pub(crate) fn xor_tiled(buf: &mut [u8], pepper: &[u8], offset: usize) {
    let start = offset % pepper.len();
    let head = buf.len().min(pepper.len() - start);
    let (first, rest) = buf.split_at_mut(head);
    for (b, p) in first.iter_mut().zip(&pepper[start..]) {
        *b ^= p;
    }
    for chunk in rest.chunks_mut(pepper.len()) {
        for (b, p) in chunk.iter_mut().zip(pepper) {
            *b ^= p;
        }
    }
}

pub fn apply_pepper(stream: &RestructuredStream, pepper: &Pepper) -> Result<Vec<u8>> {
    let block = stream.layout().block_size;
    check_len("pepper", block, pepper.len())?;
    let mut out = stream.as_bytes().to_vec();
    for chunk in out.chunks_exact_mut(block) {
        for (b, p) in chunk.iter_mut().zip(pepper.as_bytes()) {
            *b ^= p;
        }
    }
    Ok(out)
}

/// XOR of all shares; the result does not depend on their order.
pub fn combine_shares(shares: &[PepperShare]) -> Result<Pepper> {
    let (first, rest) = shares.split_first().ok_or(Error::Empty("pepper share"))?;
    let mut acc = first.0.clone();
    for share in rest {
        check_len("pepper share", acc.len(), share.0.len())?;
        for (a, b) in acc.iter_mut().zip(&share.0) {
            *a ^= b;
        }
    }
    Ok(Pepper(acc))
}

pub fn make_salt(half_a: &[u8], half_b: &[u8], variant: AshVariant) -> Result<Salt> {
    check_len("salt half", variant.half_size(), half_a.len())?;
    check_len("salt half", variant.half_size(), half_b.len())?;
    let mut bytes = Vec::with_capacity(variant.block_size());
    bytes.extend_from_slice(half_a);
    bytes.extend_from_slice(half_b);
    Ok(Salt(bytes))
}

pub fn append_salt(message: &[u8], salt: &Salt) -> Vec<u8> {
    let mut out = Vec::with_capacity(message.len() + salt.0.len());
    out.extend_from_slice(message);
    out.extend_from_slice(&salt.0);
    out
}
