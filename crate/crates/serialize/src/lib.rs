//! Three-part code: model, string data and patch.
//!
//! Writing goes through a [`Sink`](sink::Sink) that tags every symbol with the part it
//! belongs to, so the same traversal serves the on-disk format, cost evaluation and tests.

pub mod container;
pub mod costs;
pub mod flush;
pub mod model;
pub mod patch;
pub mod sink;
pub mod stream;

use parselet_core::{CoreError, Dictionary, Id, Kind, RefKey, ALPHABET};
use parselet_entropy::EntropyError;

pub use container::{read_archive, write_archive, Archive, ArchiveReport, StringReport};
pub use costs::{write_costs, Costs};
pub use patch::{build_patch, Patch, RefPatch};
pub use sink::{Coded, Part, Sink, Token, Trace};
pub use stream::TopBits;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SerializeError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("lossy expansion has {lossy} letters, original has {lossless}")]
    LengthMismatch { lossy: usize, lossless: usize },
    #[error("malformed archive: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, SerializeError>;

/// What a string holds, recorded in its header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataType {
    #[default]
    Bytes,
    /// 8-bit samples, one block-transformed plane per channel; `length` counts frames.
    Signal { channels: u32, freq: u32, length: u32 },
    /// 8-bit block-transformed planes; three channels are luma and subsampled chroma.
    Image { channels: u32, width: u32, height: u32 },
}

/// Read access to parselet structure, for in-memory dictionaries and models as read.
pub trait Grammar {
    fn node(&self, id: Id) -> Result<(Kind, RefKey, RefKey)>;
}

impl Grammar for Dictionary {
    fn node(&self, id: Id) -> Result<(Kind, RefKey, RefKey)> {
        let p = self.try_get(id)?;
        Ok((p.kind, p.left, p.right))
    }
}

impl Grammar for model::RawModel {
    fn node(&self, id: Id) -> Result<(Kind, RefKey, RefKey)> {
        id.checked_sub(ALPHABET)
            .and_then(|i| self.entries.get(i as usize))
            .copied()
            .ok_or(SerializeError::Core(CoreError::UnknownId(id)))
    }
}
