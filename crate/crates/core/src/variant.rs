use std::fmt;
use std::str::FromStr;

use crate::base_hash::{BlockHashFunction, Sha256Hash, Sha512Hash};
use crate::restructure::Layout;

/// Members of the ASH family.
///
/// | variant | base    | block | half | section | pepper | total |
/// |---------|---------|-------|------|---------|--------|-------|
/// | ASH-1   | SHA-256 | 64    | 32   | 32      | 64     | 128   |
/// | ASH-2   | SHA-512 | 128   | 64   | 64      | 128    | 256   |
///
/// All sizes in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AshVariant {
    Ash1,
    Ash2,
}

impl AshVariant {
    pub const ALL: [AshVariant; 2] = [AshVariant::Ash1, AshVariant::Ash2];

    pub fn base(self) -> &'static dyn BlockHashFunction {
        match self {
            AshVariant::Ash1 => &Sha256Hash,
            AshVariant::Ash2 => &Sha512Hash,
        }
    }

    pub fn layout(self) -> Layout {
        Layout::of(self.base())
    }

    pub fn block_size(self) -> usize {
        self.base().block_size()
    }

    pub fn half_size(self) -> usize {
        self.block_size() / 2
    }

    pub fn section_size(self) -> usize {
        self.base().digest_size()
    }

    pub fn pepper_size(self) -> usize {
        self.block_size()
    }

    pub fn total_size(self) -> usize {
        2 * self.section_size() + self.pepper_size()
    }

    /// Lowercase tag used by the tagged digest encoding and the CLI.
    pub fn tag(self) -> &'static str {
        match self {
            AshVariant::Ash1 => "ash1",
            AshVariant::Ash2 => "ash2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.tag() == tag)
    }

    pub fn from_total_size(len: usize) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.total_size() == len)
    }

    pub fn from_pepper_size(len: usize) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.pepper_size() == len)
    }
}

impl fmt::Display for AshVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AshVariant::Ash1 => f.write_str("ASH-1"),
            AshVariant::Ash2 => f.write_str("ASH-2"),
        }
    }
}

impl FromStr for AshVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ash1" | "ash-1" => Ok(AshVariant::Ash1),
            "ash2" | "ash-2" => Ok(AshVariant::Ash2),
            other => Err(format!("unknown variant {other:?} (expected ash1 or ash2)")),
        }
    }
}
