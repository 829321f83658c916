//! Cascade demonstration harness.
//!
//! Everything under [`insecure`] is deliberately broken and exists only to
//! show the appendable-cascade problem on a hash whose collisions can be
//! written down directly. Never use it to protect data.

pub mod insecure {
    use crate::base_hash::{BlockHashFunction, Digest, IncrementalHash};
    use crate::error::{Error, Result};
    use crate::restructure::{restructure, Layout};

    pub const TOY_BLOCK: usize = 8;
    pub type ToyBlock = [u8; TOY_BLOCK];

    const IV: u32 = 0x6a09_e667;

    /// An 8-byte-block, 32-bit iterated hash.
    ///
    /// Each block enters the chaining state only through the wrapping sum of
    /// its two big-endian 32-bit words, so any two blocks with the same word
    /// sum collide from every chaining state. The state update itself mixes
    /// well, so unrelated inputs behave like a 32-bit random function.
    #[derive(Debug, Clone, Copy, Default)]
    pub struct ToyHash;

    fn word_sum(block: &[u8]) -> u32 {
        let w0 = u32::from_be_bytes(block[..4].try_into().unwrap());
        let w1 = u32::from_be_bytes(block[4..8].try_into().unwrap());
        w0.wrapping_add(w1)
    }

    /// One compression step.
    pub fn compress(state: u32, block: &ToyBlock) -> u32 {
        let mut x = state ^ word_sum(block);
        x = x.wrapping_mul(0x9e37_79b1);
        x ^= x >> 15;
        x = x.wrapping_mul(0x85eb_ca77);
        x ^= x >> 13;
        x.rotate_left(7)
    }

    /// A second block that compresses identically to `block` from every
    /// state: one is added to the first word and subtracted from the second.
    pub fn collide(block: &ToyBlock) -> ToyBlock {
        let w0 = u32::from_be_bytes(block[..4].try_into().unwrap()).wrapping_add(1);
        let w1 = u32::from_be_bytes(block[4..].try_into().unwrap()).wrapping_sub(1);
        let mut out = [0u8; TOY_BLOCK];
        out[..4].copy_from_slice(&w0.to_be_bytes());
        out[4..].copy_from_slice(&w1.to_be_bytes());
        out
    }

    struct ToyState {
        state: u32,
        buf: Vec<u8>,
        len: u64,
    }

    impl ToyState {
        fn absorb_full_blocks(&mut self) {
            let whole = self.buf.len() / TOY_BLOCK * TOY_BLOCK;
            for b in self.buf[..whole].chunks_exact(TOY_BLOCK) {
                self.state = compress(self.state, b.try_into().unwrap());
            }
            self.buf.drain(..whole);
        }
    }

    impl IncrementalHash for ToyState {
        fn update(&mut self, data: &[u8]) {
            self.len = self.len.wrapping_add(data.len() as u64);
            self.buf.extend_from_slice(data);
            self.absorb_full_blocks();
        }

        fn finish(mut self: Box<Self>) -> Digest {
            let bits = (self.len as u32).wrapping_mul(8);
            self.buf.push(0x80);
            while !(self.buf.len() + 4).is_multiple_of(TOY_BLOCK) {
                self.buf.push(0);
            }
            self.buf.extend_from_slice(&bits.to_be_bytes());
            self.absorb_full_blocks();
            Digest::from_bytes(self.state.to_be_bytes().to_vec())
        }
    }

    impl BlockHashFunction for ToyHash {
        fn name(&self) -> &'static str {
            "toy-32 (insecure)"
        }
        fn block_size(&self) -> usize {
            TOY_BLOCK
        }
        fn digest_size(&self) -> usize {
            4
        }
        fn length_field_size(&self) -> usize {
            4
        }
        fn start(&self) -> Box<dyn IncrementalHash> {
            Box::new(ToyState {
                state: IV,
                buf: Vec::with_capacity(2 * TOY_BLOCK),
                len: 0,
            })
        }
    }

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub struct CascadeReport {
        /// Plain iterated hashing of the two messages agrees.
        pub naive_collides: bool,
        /// The restructured streams hash to the same value.
        pub ash_collides: bool,
    }

    fn join(blocks: &[ToyBlock]) -> Vec<u8> {
        blocks.iter().flatten().copied().collect()
    }

    /// Builds `prefix ‖ suffix` and the same message with the last prefix
    /// block swapped for its collision partner, then hashes both with
    /// [`ToyHash`] directly and through the restructuring pipeline.
    pub fn demonstrate_cascade(prefix: &[ToyBlock], suffix: &[ToyBlock]) -> Result<CascadeReport> {
        let Some((last, lead)) = prefix.split_last() else {
            return Err(Error::Empty("prefix block"));
        };
        let original = [prefix, suffix].concat();
        let forged = [lead, &[collide(last)], suffix].concat();
        let (original, forged) = (join(&original), join(&forged));

        let naive_collides = ToyHash.compute(&original) == ToyHash.compute(&forged);
        let layout = Layout::of(&ToyHash);
        let ash_collides = ToyHash.compute(restructure(&original, layout)?.as_bytes())
            == ToyHash.compute(restructure(&forged, layout)?.as_bytes());
        Ok(CascadeReport {
            naive_collides,
            ash_collides,
        })
    }

}
