//! Straight-line reference computation of an ASH digest.
//!
//! Written against the `sha2` crate directly and shares no code with the
//! library: explicit padding loop, explicit half-block list, explicit XOR.
//! `tests/oracle/ash_oracle.py` is the same procedure in Python.

use sha2::{Digest, Sha256, Sha512};

pub struct Params {
    pub block: usize,
    pub length_field: usize,
    pub sha512: bool,
}

pub const ASH1: Params = Params {
    block: 64,
    length_field: 8,
    sha512: false,
};

pub const ASH2: Params = Params {
    block: 128,
    length_field: 16,
    sha512: true,
};

pub fn pad(message: &[u8], p: &Params) -> Vec<u8> {
    let mut out = message.to_vec();
    out.push(0x80);
    while !(out.len() + p.length_field).is_multiple_of(p.block) {
        out.push(0);
    }
    let bits = (message.len() as u128) * 8;
    let be = bits.to_be_bytes();
    out.extend_from_slice(&be[16 - p.length_field..]);
    out
}

pub fn permute(padded: &[u8], p: &Params) -> Vec<u8> {
    let half = p.block / 2;
    let mut halves: Vec<Vec<u8>> = Vec::new();
    let mut i = 0;
    while i < padded.len() {
        halves.push(padded[i..i + half].to_vec());
        i += half;
    }
    let n = halves.len() / 2;
    let mut out = Vec::new();
    for k in 0..n {
        out.extend_from_slice(&halves[k]);
        out.extend_from_slice(&halves[k + n]);
    }
    out
}

pub fn hash(data: &[u8], p: &Params) -> Vec<u8> {
    if p.sha512 {
        Sha512::digest(data).to_vec()
    } else {
        Sha256::digest(data).to_vec()
    }
}

/// Returns (static section, dynamic section).
pub fn ash(message: &[u8], pepper: &[u8], p: &Params) -> (Vec<u8>, Vec<u8>) {
    assert_eq!(pepper.len(), p.block);
    let r = permute(&pad(message, p), p);
    let mut peppered = Vec::with_capacity(r.len());
    for (i, b) in r.iter().enumerate() {
        peppered.push(b ^ pepper[i % p.block]);
    }
    (hash(&r, p), hash(&peppered, p))
}
