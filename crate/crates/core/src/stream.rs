//! Digests of inputs too large to hold in memory.
//!
//! The restructured stream pairs half `k` with half `k + N`, so a seekable
//! source is read through two cursors, one walking the front half of the
//! padded stream and one walking the back half. Only a fixed window of
//! blocks is buffered at any time.
//!
//! Non-seekable sources are buffered up to a memory budget and spilled to a
//! temporary file beyond it.

use std::fs::File;
use std::io::{self, Read, Seek, SeekFrom, Write};

use crate::base_hash::{BlockHashFunction, Digest};
use crate::digest::{compare_sections, compute_sections, AshDigest, Verification};
use crate::error::{Error, Result};
use crate::restructure::{padding_tail, Layout};
use crate::seasoning::{xor_tiled, Pepper};
use crate::variant::AshVariant;

/// Half-blocks read per cursor per step.
const WINDOW_HALVES: usize = 8192;

pub const DEFAULT_MEMORY_BUDGET: usize = 256 << 20;

/// `source ‖ padding tail`, addressable by absolute position.
struct PaddedSource<R> {
    inner: R,
    len: u64,
    tail: Vec<u8>,
}

impl<R: Read + Seek> PaddedSource<R> {
    fn read_at(&mut self, pos: u64, buf: &mut [u8]) -> io::Result<()> {
        let end = pos + buf.len() as u64;
        let from_source = end.min(self.len).saturating_sub(pos) as usize;
        if from_source > 0 {
            self.inner.seek(SeekFrom::Start(pos))?;
            self.inner.read_exact(&mut buf[..from_source])?;
        }
        if from_source < buf.len() {
            let t = (pos + from_source as u64 - self.len) as usize;
            let rest = &mut buf[from_source..];
            rest.copy_from_slice(&self.tail[t..t + rest.len()]);
        }
        Ok(())
    }
}

/// Static and dynamic sections of a seekable source, reading it from its
/// start to its end.
pub fn sections_from_seekable<R: Read + Seek>(
    mut reader: R,
    base: &dyn BlockHashFunction,
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
    let len = reader.seek(SeekFrom::End(0))?;
    let tail = padding_tail(len, layout)?;
    let total = len + tail.len() as u64;
    let mut src = PaddedSource {
        inner: reader,
        len,
        tail,
    };

    let half = layout.half_size();
    let n_halves = total / 2 / half as u64;
    let back_start = total / 2;
    let mut front = vec![0u8; WINDOW_HALVES * half];
    let mut back = vec![0u8; WINDOW_HALVES * half];
    let mut out = vec![0u8; 2 * WINDOW_HALVES * half];
    let mut st = base.start();
    let mut dy = base.start();

    let mut k = 0u64;
    while k < n_halves {
        let step = (n_halves - k).min(WINDOW_HALVES as u64) as usize;
        let bytes = step * half;
        src.read_at(k * half as u64, &mut front[..bytes])?;
        src.read_at(back_start + k * half as u64, &mut back[..bytes])?;
        let out = &mut out[..2 * bytes];
        for ((pair, a), b) in out
            .chunks_exact_mut(2 * half)
            .zip(front.chunks_exact(half))
            .zip(back.chunks_exact(half))
        {
            pair[..half].copy_from_slice(a);
            pair[half..].copy_from_slice(b);
        }
        st.update(out);
        // each window is whole blocks, so the pepper tile starts at phase 0
        xor_tiled(out, pepper.as_bytes(), 0);
        dy.update(out);
        k += step as u64;
    }
    Ok((st.finish(), dy.finish()))
}

pub fn create_from_seekable<R: Read + Seek>(
    reader: R,
    variant: AshVariant,
    pepper: Pepper,
) -> Result<AshDigest> {
    let (st, dy) = sections_from_seekable(reader, variant.base(), &pepper)?;
    AshDigest::from_parts(variant, st, dy, pepper)
}

pub fn verify_seekable<R: Read + Seek>(reader: R, claimed: &AshDigest) -> Result<Verification> {
    let (st, dy) = sections_from_seekable(reader, claimed.variant().base(), claimed.pepper())?;
    Ok(compare_sections(claimed, &st, &dy))
}

/// A fully read non-seekable input.
#[derive(Debug)]
pub enum BufferedInput {
    Memory(Vec<u8>),
    Spilled(File),
}

impl BufferedInput {
    /// Reads `reader` to the end, keeping at most `budget` bytes in memory.
    pub fn read_from<R: Read>(mut reader: R, budget: usize) -> io::Result<Self> {
        let mut buf = Vec::new();
        (&mut reader)
            .take(budget as u64 + 1)
            .read_to_end(&mut buf)?;
        if buf.len() <= budget {
            return Ok(BufferedInput::Memory(buf));
        }
        let mut file = tempfile::tempfile()?;
        file.write_all(&buf)?;
        drop(buf);
        io::copy(&mut reader, &mut file)?;
        file.flush()?;
        Ok(BufferedInput::Spilled(file))
    }

    pub fn sections(&mut self, base: &dyn BlockHashFunction, pepper: &Pepper) -> Result<(Digest, Digest)> {
        match self {
            BufferedInput::Memory(bytes) => compute_sections(base, bytes, pepper),
            BufferedInput::Spilled(file) => sections_from_seekable(&mut *file, base, pepper),
        }
    }

    pub fn create(&mut self, variant: AshVariant, pepper: Pepper) -> Result<AshDigest> {
        let (st, dy) = self.sections(variant.base(), &pepper)?;
        AshDigest::from_parts(variant, st, dy, pepper)
    }

    pub fn verify(&mut self, claimed: &AshDigest) -> Result<Verification> {
        let (st, dy) = self.sections(claimed.variant().base(), claimed.pepper())?;
        Ok(compare_sections(claimed, &st, &dy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digest::create;
    use std::io::Cursor;

    fn ramp(v: AshVariant) -> Pepper {
        Pepper::new((0..v.pepper_size()).map(|i| (i * 3) as u8).collect(), v).unwrap()
    }

    #[test]
    fn matches_in_memory_across_sizes() {
        let data: Vec<u8> = (0..70_000u32).map(|i| (i % 253) as u8).collect();
        for v in AshVariant::ALL {
            for len in [0, 1, 31, 55, 56, 64, 111, 112, 128, 1000, 65_535, 70_000] {
                let m = &data[..len];
                let want = create(m, v, Some(ramp(v))).unwrap();
                let got = create_from_seekable(Cursor::new(m), v, ramp(v)).unwrap();
                assert_eq!(got, want, "{v} len {len}");
            }
        }
    }

    #[test]
    fn window_boundaries() {
        // Spans several windows with a ragged final step.
        let len = WINDOW_HALVES * 32 * 5 + 4321;
        let data: Vec<u8> = (0..len).map(|i| (i * 7 % 256) as u8).collect();
        let v = AshVariant::Ash1;
        let want = create(&data, v, Some(ramp(v))).unwrap();
        assert_eq!(create_from_seekable(Cursor::new(&data), v, ramp(v)).unwrap(), want);
        assert!(verify_seekable(Cursor::new(&data), &want).unwrap().is_match());
        let mut bad = data.clone();
        bad[len - 1] ^= 1;
        assert!(!verify_seekable(Cursor::new(&bad), &want).unwrap().is_match());
    }

    #[test]
    fn spill_over_budget() {
        let data: Vec<u8> = (0..10_000u32).map(|i| (i % 199) as u8).collect();
        let v = AshVariant::Ash2;
        let want = create(&data, v, Some(ramp(v))).unwrap();

        let mut small = BufferedInput::read_from(&data[..], 100).unwrap();
        assert!(matches!(small, BufferedInput::Spilled(_)));
        assert_eq!(small.create(v, ramp(v)).unwrap(), want);

        let mut big = BufferedInput::read_from(&data[..], data.len()).unwrap();
        assert!(matches!(big, BufferedInput::Memory(_)));
        assert!(big.verify(&want).unwrap().is_match());
    }
}
