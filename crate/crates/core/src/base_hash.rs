//! Black-box iterated hash functions.
//!
//! The seasoning layer never looks inside the compression function; it only
//! needs the input block size, the digest size, and a way to hash bytes. Any
//! Merkle–Damgård style hash can be plugged in through [`BlockHashFunction`].

use std::fmt;

use sha2::Digest as _;

/// Output of a [`BlockHashFunction`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digest(Vec<u8>);

impl Digest {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Digest(bytes)
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

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

/// Running state of one hash computation.
pub trait IncrementalHash: Send {
    fn update(&mut self, data: &[u8]);
    fn finish(self: Box<Self>) -> Digest;
}

/// An iterated hash treated as a black box.
///
/// `length_field_size` is the width of the big-endian bit-length suffix the
/// function's own padding uses; the restructuring layer mirrors it.
pub trait BlockHashFunction: Send + Sync {
    fn name(&self) -> &'static str;
    fn block_size(&self) -> usize;
    fn digest_size(&self) -> usize;
    fn length_field_size(&self) -> usize;
    fn start(&self) -> Box<dyn IncrementalHash>;

    fn compute(&self, data: &[u8]) -> Digest {
        let mut h = self.start();
        h.update(data);
        h.finish()
    }
}

impl fmt::Debug for dyn BlockHashFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlockHashFunction")
            .field("name", &self.name())
            .field("block_size", &self.block_size())
            .field("digest_size", &self.digest_size())
            .finish()
    }
}

struct Sha2State<D>(D);

impl<D> IncrementalHash for Sha2State<D>
where
    D: sha2::Digest + Send + 'static,
{
    fn update(&mut self, data: &[u8]) {
        self.0.update(data);
    }

    fn finish(self: Box<Self>) -> Digest {
        Digest(self.0.finalize().to_vec())
    }
}

/// SHA-256 (FIPS 180-2), the base of ASH-1.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sha256Hash;

/// SHA-512 (FIPS 180-2), the base of ASH-2.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sha512Hash;

impl BlockHashFunction for Sha256Hash {
    fn name(&self) -> &'static str {
        "SHA-256"
    }
    fn block_size(&self) -> usize {
        64
    }
    fn digest_size(&self) -> usize {
        32
    }
    fn length_field_size(&self) -> usize {
        8
    }
    fn start(&self) -> Box<dyn IncrementalHash> {
        Box::new(Sha2State(sha2::Sha256::new()))
    }
}

impl BlockHashFunction for Sha512Hash {
    fn name(&self) -> &'static str {
        "SHA-512"
    }
    fn block_size(&self) -> usize {
        128
    }
    fn digest_size(&self) -> usize {
        64
    }
    fn length_field_size(&self) -> usize {
        16
    }
    fn start(&self) -> Box<dyn IncrementalHash> {
        Box::new(Sha2State(sha2::Sha512::new()))
    }
}

pub fn sha256() -> Sha256Hash {
    Sha256Hash
}

pub fn sha512() -> Sha512Hash {
    Sha512Hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_vectors() {
        let h = sha256();
        assert_eq!(
            h.compute(b"").to_hex(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            h.compute(b"abc").to_hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(h.compute(&[7u8; 1000]).len(), 32);
    }

    #[test]
    fn sha512_empty() {
        let h = sha512();
        assert_eq!(
            h.compute(b"").to_hex(),
            "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce\
             47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e"
        );
        assert_eq!(h.compute(b"x").len(), 64);
        assert_eq!(h.compute(b"repeat"), h.compute(b"repeat"));
    }

    #[test]
    fn incremental_matches_one_shot() {
        let data: Vec<u8> = (0..1000u32).map(|i| (i * 7) as u8).collect();
        for base in [&Sha256Hash as &dyn BlockHashFunction, &Sha512Hash] {
            let mut h = base.start();
            for chunk in data.chunks(13) {
                h.update(chunk);
            }
            assert_eq!(h.finish(), base.compute(&data));
        }
    }
}
