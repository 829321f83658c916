//! ASH: seasoned hashing over a black-box iterated hash.
//!
//! A message is padded, split into half-blocks and interleaved so that half
//! `k` is paired with half `k + N` before it reaches the base hash. Two
//! hashes of that stream form the digest: a static section over the stream
//! itself and a dynamic section over the stream XOR-tiled with a random
//! one-block pepper. The pepper travels inside the digest.
//!
//! ```
//! use ash_core::{create, verify, AshVariant};
//!
//! let digest = create(b"release.tar", AshVariant::Ash1, None).unwrap();
//! assert!(verify(b"release.tar", &digest).unwrap().is_match());
//! assert!(digest.to_tagged().starts_with("ash1:"));
//! ```
//!
//! | variant | base    | digest bits (static + dynamic + pepper) |
//! |---------|---------|-----------------------------------------|
//! | ASH-1   | SHA-256 | 1024 (256 + 256 + 512)                  |
//! | ASH-2   | SHA-512 | 2048 (512 + 512 + 1024)                 |

pub mod base_hash;
pub mod cli;
pub mod digest;
pub mod error;
pub mod protocol;
pub mod restructure;
pub mod seasoning;
pub mod stream;
pub mod testkit;
pub mod variant;

pub use base_hash::{sha256, sha512, BlockHashFunction, Digest};
pub use digest::{
    compute_sections, create, create_pair, create_pair_with_rng, create_with_rng, verify,
    AshDigest, Form, Verification,
};
pub use error::{Error, FormatError, Result};
pub use restructure::{interleave, pad_message, restructure, split_halves, Layout};
pub use seasoning::{
    append_salt, apply_pepper, combine_shares, generate_pepper, make_salt, Pepper, PepperShare,
    Salt,
};
pub use variant::AshVariant;
