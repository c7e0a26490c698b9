//! Core data model: slots, string data, the pair index and parselet dictionaries.

pub mod canonical;
pub mod dict;
pub mod exec;
pub mod index;
pub mod letters;
pub mod slot;
pub mod string;

pub use dict::{Dictionary, Kind, Parselet};
pub use exec::Exec;
pub use letters::LetterSet;
pub use slot::{Id, Op, RefKey, Slot, SlotValue};
pub use string::{Loc, StringData, NIL};

/// Size of the atomic alphabet: ids `0..256` are bytes.
pub const ALPHABET: u32 = 256;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("corrupt string data: {0}")]
    Corrupt(String),
    #[error("unknown parselet id {0}")]
    UnknownId(u32),
}

pub type Result<T> = std::result::Result<T, CoreError>;
