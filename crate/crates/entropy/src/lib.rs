//! Entropy layer: MSB-first bit streams, Elias omega constants and Vitter's adaptive
//! Huffman code for integers and references.

pub mod bits;
pub mod coder;
pub mod omega;
pub mod vitter;

pub use bits::{BitCounter, BitReader, BitWrite, BitWriter};
pub use coder::{ref_width, Decoder, Encoder, INT_WIDTH};
pub use omega::{omega_len, read_omega, write_omega};
pub use vitter::Vitter;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EntropyError {
    #[error("unexpected end of bit stream")]
    UnexpectedEnd,
    #[error("malformed stream: {0}")]
    Malformed(&'static str),
}

pub type Result<T> = std::result::Result<T, EntropyError>;
