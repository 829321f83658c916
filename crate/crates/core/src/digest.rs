//! The composite ASH digest: `static ‖ dynamic ‖ pepper`.
//!
//! The static section hashes the restructured stream as is, so it is the
//! same for every digest of a given message. The dynamic section hashes the
//! same stream with the pepper XOR-tiled over it, which ties the digest to
//! the embedded pepper. Creating a digest draws a fresh pepper; verifying
//! one reuses the pepper it carries.

use std::fmt;
use std::thread;

use rand::rngs::OsRng;
use rand::TryCryptoRng;
use subtle::ConstantTimeEq;

use crate::base_hash::{BlockHashFunction, Digest};
use crate::error::{Error, FormatError, Result};
use crate::restructure::{restructure, Layout};
use crate::seasoning::{generate_pepper, xor_tiled, Pepper};
use crate::variant::AshVariant;

const XOR_CHUNK_BLOCKS: usize = 1024;
const PARALLEL_THRESHOLD: usize = 1 << 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AshDigest {
    variant: AshVariant,
    static_section: Digest,
    dynamic_section: Digest,
    pepper: Pepper,
}

/// Serialized forms of an [`AshDigest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `static ‖ dynamic ‖ pepper`, raw bytes.
    Binary,
    /// Lowercase hex of the binary form.
    Hex,
    /// `ash1:` or `ash2:` followed by the hex form.
    Tagged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Match,
    Mismatch,
}

impl Verification {
    pub fn is_match(self) -> bool {
        self == Verification::Match
    }
}

impl AshDigest {
    pub fn from_parts(
        variant: AshVariant,
        static_section: Digest,
        dynamic_section: Digest,
        pepper: Pepper,
    ) -> Result<Self> {
        for (what, len) in [
            ("static section", static_section.len()),
            ("dynamic section", dynamic_section.len()),
        ] {
            if len != variant.section_size() {
                return Err(Error::SizeMismatch {
                    what,
                    expected: variant.section_size(),
                    actual: len,
                });
            }
        }
        if pepper.len() != variant.pepper_size() {
            return Err(Error::SizeMismatch {
                what: "pepper",
                expected: variant.pepper_size(),
                actual: pepper.len(),
            });
        }
        Ok(AshDigest {
            variant,
            static_section,
            dynamic_section,
            pepper,
        })
    }

    pub fn variant(&self) -> AshVariant {
        self.variant
    }

    pub fn static_section(&self) -> &Digest {
        &self.static_section
    }

    pub fn dynamic_section(&self) -> &Digest {
        &self.dynamic_section
    }

    pub fn pepper(&self) -> &Pepper {
        &self.pepper
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.variant.total_size());
        out.extend_from_slice(self.static_section.as_bytes());
        out.extend_from_slice(self.dynamic_section.as_bytes());
        out.extend_from_slice(self.pepper.as_bytes());
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn to_tagged(&self) -> String {
        format!("{}:{}", self.variant.tag(), self.to_hex())
    }

    pub fn encode(&self, form: Form) -> Vec<u8> {
        match form {
            Form::Binary => self.to_bytes(),
            Form::Hex => self.to_hex().into_bytes(),
            Form::Tagged => self.to_tagged().into_bytes(),
        }
    }

    /// Parses any of the three forms.
    ///
    /// Untagged input is classified by length: 128 bytes is binary ASH-1,
    /// 512 is hex ASH-2, and 256 is hex ASH-1 when every byte is a hex digit
    /// and binary ASH-2 otherwise.
    pub fn decode(encoded: &[u8]) -> Result<Self, FormatError> {
        match encoded.len() {
            128 => return Self::decode_as(encoded, Form::Binary),
            256 if encoded.iter().all(u8::is_ascii_hexdigit) => {
                return Self::decode_as(encoded, Form::Hex)
            }
            256 => return Self::decode_as(encoded, Form::Binary),
            512 => return Self::decode_as(encoded, Form::Hex),
            _ => {}
        }
        if encoded.contains(&b':') {
            Self::decode_as(encoded, Form::Tagged)
        } else {
            Err(FormatError::BadLength {
                form: "binary or hex",
                actual: encoded.len(),
            })
        }
    }

    pub fn decode_as(encoded: &[u8], form: Form) -> Result<Self, FormatError> {
        match form {
            Form::Binary => {
                let variant =
                    AshVariant::from_total_size(encoded.len()).ok_or(FormatError::BadLength {
                        form: "binary",
                        actual: encoded.len(),
                    })?;
                Ok(Self::slice(encoded, variant))
            }
            Form::Hex => {
                let variant = AshVariant::from_total_size(encoded.len() / 2)
                    .filter(|_| encoded.len().is_multiple_of(2))
                    .ok_or(FormatError::BadLength {
                        form: "hex",
                        actual: encoded.len(),
                    })?;
                Ok(Self::slice(&decode_hex(encoded, 0)?, variant))
            }
            Form::Tagged => {
                let colon = encoded.iter().position(|&b| b == b':').ok_or_else(|| {
                    FormatError::UnknownTag(String::from_utf8_lossy(encoded).into_owned())
                })?;
                let tag = &encoded[..colon];
                let variant = std::str::from_utf8(tag)
                    .ok()
                    .and_then(AshVariant::from_tag)
                    .ok_or_else(|| {
                        FormatError::UnknownTag(String::from_utf8_lossy(tag).into_owned())
                    })?;
                let body = &encoded[colon + 1..];
                if body.len() != 2 * variant.total_size() {
                    return Err(FormatError::BadLength {
                        form: match variant {
                            AshVariant::Ash1 => "tagged ash1",
                            AshVariant::Ash2 => "tagged ash2",
                        },
                        actual: encoded.len(),
                    });
                }
                Ok(Self::slice(&decode_hex(body, colon + 1)?, variant))
            }
        }
    }

    fn slice(bytes: &[u8], variant: AshVariant) -> Self {
        let s = variant.section_size();
        AshDigest {
            variant,
            static_section: Digest::from_bytes(bytes[..s].to_vec()),
            dynamic_section: Digest::from_bytes(bytes[s..2 * s].to_vec()),
            pepper: Pepper::new(bytes[2 * s..].to_vec(), variant).expect("length checked"),
        }
    }
}

fn decode_hex(text: &[u8], base_offset: usize) -> Result<Vec<u8>, FormatError> {
    if let Some(i) = text.iter().position(|b| !b.is_ascii_hexdigit()) {
        return Err(FormatError::BadHex {
            offset: base_offset + i,
        });
    }
    hex::decode(text).map_err(|_| FormatError::BadLength {
        form: "hex",
        actual: text.len(),
    })
}

impl fmt::Debug for AshDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AshDigest")
            .field("variant", &self.variant)
            .field("static", &self.static_section.to_hex())
            .field("dynamic", &self.dynamic_section.to_hex())
            .field("pepper", &self.pepper.to_hex())
            .finish()
    }
}

impl fmt::Display for AshDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tagged())
    }
}

/// Static and dynamic sections of `message` over any base hash.
///
/// Large inputs hash the two sections on separate threads; the output does
/// not depend on whether that happens.
pub fn compute_sections(
    base: &dyn BlockHashFunction,
    message: &[u8],
    pepper: &Pepper,
) -> Result<(Digest, Digest)> {
    let layout = Layout::of(base);
    if pepper.len() != layout.block_size {
        return Err(Error::SizeMismatch {
            what: "pepper",
            expected: layout.block_size,
            actual: pepper.len(),
        });
    }
    let stream = restructure(message, layout)?;
    let bytes = stream.as_bytes();
    let dynamic = |bytes: &[u8]| {
        let mut h = base.start();
        let mut buf = vec![0u8; layout.block_size * XOR_CHUNK_BLOCKS];
        for chunk in bytes.chunks(buf.len()) {
            let buf = &mut buf[..chunk.len()];
            buf.copy_from_slice(chunk);
            // chunks start on block boundaries, so the tile phase is 0
            xor_tiled(buf, pepper.as_bytes(), 0);
            h.update(buf);
        }
        h.finish()
    };
    if bytes.len() >= PARALLEL_THRESHOLD {
        Ok(thread::scope(|s| {
            let st = s.spawn(|| base.compute(bytes));
            let dy = dynamic(bytes);
            (st.join().expect("static section worker panicked"), dy)
        }))
    } else {
        Ok((base.compute(bytes), dynamic(bytes)))
    }
}

/// Creates a digest. A fresh pepper is drawn from the OS when none is given.
pub fn create(message: &[u8], variant: AshVariant, pepper: Option<Pepper>) -> Result<AshDigest> {
    let pepper = match pepper {
        Some(p) => p,
        None => generate_pepper(variant, &mut OsRng)?,
    };
    create_with_pepper(message, variant, pepper)
}

pub fn create_with_rng<R: TryCryptoRng + ?Sized>(
    message: &[u8],
    variant: AshVariant,
    rng: &mut R,
) -> Result<AshDigest> {
    create_with_pepper(message, variant, generate_pepper(variant, rng)?)
}

fn create_with_pepper(message: &[u8], variant: AshVariant, pepper: Pepper) -> Result<AshDigest> {
    let (st, dy) = compute_sections(variant.base(), message, &pepper)?;
    AshDigest::from_parts(variant, st, dy, pepper)
}

/// Recomputes both sections with the claimed pepper and compares them in
/// constant time.
pub fn verify(message: &[u8], claimed: &AshDigest) -> Result<Verification> {
    let (st, dy) = compute_sections(claimed.variant.base(), message, &claimed.pepper)?;
    Ok(compare_sections(claimed, &st, &dy))
}

pub(crate) fn compare_sections(claimed: &AshDigest, st: &Digest, dy: &Digest) -> Verification {
    let same = claimed.static_section.as_bytes().ct_eq(st.as_bytes())
        & claimed.dynamic_section.as_bytes().ct_eq(dy.as_bytes());
    if bool::from(same) {
        Verification::Match
    } else {
        Verification::Mismatch
    }
}

/// A public digest for distribution and a secret one to keep back, each
/// with its own pepper.
pub fn create_pair(message: &[u8], variant: AshVariant) -> Result<(AshDigest, AshDigest)> {
    create_pair_with_rng(message, variant, &mut OsRng)
}

pub fn create_pair_with_rng<R: TryCryptoRng + ?Sized>(
    message: &[u8],
    variant: AshVariant,
    rng: &mut R,
) -> Result<(AshDigest, AshDigest)> {
    let public = generate_pepper(variant, rng)?;
    let secret = generate_pepper(variant, rng)?;
    Ok((
        create_with_pepper(message, variant, public)?,
        create_with_pepper(message, variant, secret)?,
    ))
}
