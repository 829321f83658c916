//! Padding, half-block splitting and the interleave permutation.
//!
//! A message is padded to whole base-hash blocks, cut into `2N` half-blocks
//! `h1..h2N`, and reassembled so that block `k` is `hk ‖ h(k+N)`:
//!
//! ```text
//! padded:        h1 h2 | h3 h4 | h5 h6 | h7 h8 | h9 h10
//! restructured:  h1 h6 | h2 h7 | h3 h8 | h4 h9 | h5 h10
//! ```
//!
//! Appending data changes `N`, which moves every pairing, so a colliding
//! prefix no longer lines up with the same block boundaries.

use crate::base_hash::BlockHashFunction;
use crate::error::{Error, Result};
use crate::variant::AshVariant;

/// Block geometry shared by the padding and permutation steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Layout {
    pub block_size: usize,
    /// Width in bytes of the big-endian bit-length suffix.
    pub length_field_size: usize,
}

impl Layout {
    pub fn of(base: &dyn BlockHashFunction) -> Self {
        Layout {
            block_size: base.block_size(),
            length_field_size: base.length_field_size(),
        }
    }

    pub fn half_size(&self) -> usize {
        self.block_size / 2
    }
}

impl From<AshVariant> for Layout {
    fn from(v: AshVariant) -> Self {
        v.layout()
    }
}

/// One half of a base-hash block, borrowed from a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfBlock<'a> {
    bytes: &'a [u8],
    layout: Layout,
}

impl<'a> HalfBlock<'a> {
    pub fn new(bytes: &'a [u8], layout: impl Into<Layout>) -> Result<Self> {
        let layout = layout.into();
        if bytes.len() != layout.half_size() {
            return Err(Error::SizeMismatch {
                what: "half-block",
                expected: layout.half_size(),
                actual: bytes.len(),
            });
        }
        Ok(HalfBlock { bytes, layout })
    }

    pub fn as_bytes(&self) -> &'a [u8] {
        self.bytes
    }
}

/// A padded message: a positive whole number of blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedStream {
    bytes: Vec<u8>,
    layout: Layout,
}

impl PaddedStream {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn block_count(&self) -> usize {
        self.bytes.len() / self.layout.block_size
    }
}

/// The permuted stream that is actually fed to the base hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestructuredStream {
    bytes: Vec<u8>,
    layout: Layout,
}

impl RestructuredStream {
    /// Wraps bytes that are already in restructured order.
    pub fn from_bytes(bytes: Vec<u8>, layout: impl Into<Layout>) -> Result<Self> {
        let layout = layout.into();
        if bytes.is_empty() || !bytes.len().is_multiple_of(layout.block_size) {
            return Err(Error::SizeMismatch {
                what: "restructured stream (positive multiple of block size)",
                expected: bytes.len().next_multiple_of(layout.block_size).max(layout.block_size),
                actual: bytes.len(),
            });
        }
        Ok(RestructuredStream { bytes, layout })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }
}

fn check_length(message_len: u64, layout: Layout) -> Result<u128> {
    let bits = u128::from(message_len) * 8;
    let field_bits = layout.length_field_size * 8;
    if field_bits < 128 && bits >> field_bits != 0 {
        return Err(Error::LengthOverflow {
            len: message_len,
            field_bytes: layout.length_field_size,
        });
    }
    Ok(bits)
}

/// Length of the padded stream for a message of `message_len` bytes.
pub fn padded_len(message_len: u64, layout: impl Into<Layout>) -> Result<u64> {
    let layout = layout.into();
    check_length(message_len, layout)?;
    let block = layout.block_size as u128;
    let min = u128::from(message_len) + 1 + layout.length_field_size as u128;
    let total = min.div_ceil(block) * block;
    u64::try_from(total).map_err(|_| Error::LengthOverflow {
        len: message_len,
        field_bytes: layout.length_field_size,
    })
}

/// The bytes appended after a message of `message_len` bytes:
/// `0x80 ‖ 0x00* ‖ bit-length`.
pub fn padding_tail(message_len: u64, layout: impl Into<Layout>) -> Result<Vec<u8>> {
    let layout = layout.into();
    let bits = check_length(message_len, layout)?;
    let tail_len = (padded_len(message_len, layout)? - message_len) as usize;
    let mut tail = vec![0u8; tail_len];
    tail[0] = 0x80;
    let field = &bits.to_be_bytes()[16 - layout.length_field_size..];
    tail[tail_len - layout.length_field_size..].copy_from_slice(field);
    Ok(tail)
}

pub fn pad_message(message: &[u8], layout: impl Into<Layout>) -> Result<PaddedStream> {
    let layout = layout.into();
    let tail = padding_tail(message.len() as u64, layout)?;
    let mut bytes = Vec::with_capacity(message.len() + tail.len());
    bytes.extend_from_slice(message);
    bytes.extend_from_slice(&tail);
    Ok(PaddedStream { bytes, layout })
}

/// Splits a padded stream into its `2N` half-blocks, in stream order.
pub fn split_halves(stream: &PaddedStream) -> Vec<HalfBlock<'_>> {
    stream
        .bytes
        .chunks_exact(stream.layout.half_size())
        .map(|bytes| HalfBlock {
            bytes,
            layout: stream.layout,
        })
        .collect()
}

/// Pairs half `k` with half `k + N`.
pub fn interleave(halves: &[HalfBlock<'_>]) -> Result<RestructuredStream> {
    let Some(first) = halves.first() else {
        return Err(Error::Empty("half-block"));
    };
    if !halves.len().is_multiple_of(2) {
        return Err(Error::OddHalfCount(halves.len()));
    }
    let layout = first.layout;
    let n = halves.len() / 2;
    let mut bytes = Vec::with_capacity(halves.len() * layout.half_size());
    for k in 0..n {
        for h in [&halves[k], &halves[k + n]] {
            if h.layout != layout {
                return Err(Error::SizeMismatch {
                    what: "half-block",
                    expected: layout.half_size(),
                    actual: h.bytes.len(),
                });
            }
            bytes.extend_from_slice(h.bytes);
        }
    }
    Ok(RestructuredStream { bytes, layout })
}

/// [`interleave`] applied to a whole padded stream without materialising
/// the half-block list.
pub fn interleave_stream(stream: &PaddedStream) -> RestructuredStream {
    let half = stream.layout.half_size();
    let n_bytes = stream.bytes.len() / 2;
    let (front, back) = stream.bytes.split_at(n_bytes);
    let mut bytes = Vec::with_capacity(stream.bytes.len());
    for (a, b) in front.chunks_exact(half).zip(back.chunks_exact(half)) {
        bytes.extend_from_slice(a);
        bytes.extend_from_slice(b);
    }
    RestructuredStream {
        bytes,
        layout: stream.layout,
    }
}

/// Inverse of [`interleave_stream`].
pub fn deinterleave(stream: &RestructuredStream) -> PaddedStream {
    let half = stream.layout.half_size();
    let mut front = Vec::with_capacity(stream.bytes.len());
    let mut back = Vec::with_capacity(stream.bytes.len() / 2);
    for block in stream.bytes.chunks_exact(2 * half) {
        front.extend_from_slice(&block[..half]);
        back.extend_from_slice(&block[half..]);
    }
    front.extend_from_slice(&back);
    PaddedStream {
        bytes: front,
        layout: stream.layout,
    }
}

/// Pads and interleaves in one pass, without an intermediate padded copy.
pub fn restructure(message: &[u8], layout: impl Into<Layout>) -> Result<RestructuredStream> {
    let layout = layout.into();
    let tail = padding_tail(message.len() as u64, layout)?;
    let total = message.len() + tail.len();
    let half = layout.half_size();
    let mut bytes = Vec::with_capacity(total);
    for k in 0..total / layout.block_size {
        for pos in [k * half, total / 2 + k * half] {
            copy_padded(message, &tail, pos, half, &mut bytes);
        }
    }
    Ok(RestructuredStream { bytes, layout })
}

// Appends `len` bytes of `message ‖ tail` starting at `pos`.
fn copy_padded(message: &[u8], tail: &[u8], pos: usize, len: usize, out: &mut Vec<u8>) {
    let end = pos + len;
    if pos < message.len() {
        out.extend_from_slice(&message[pos..end.min(message.len())]);
    }
    if end > message.len() {
        let from = pos.saturating_sub(message.len());
        out.extend_from_slice(&tail[from..end - message.len()]);
    }
}
