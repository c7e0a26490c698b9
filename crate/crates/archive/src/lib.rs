//! Archiver: compresses every string on its own, then merges the models.
//!
//! Strings are never concatenated.  Each one goes through the rate-distortion search (at
//! most once per distinct input and parameter set, thanks to the cache), and the
//! resulting models are merged by set union with the strings transcoded to the merged
//! ids.

pub mod cache;
pub mod merge;

use std::fmt::Write as _;

use parselet_core::{Dictionary, Exec, StringData};
use parselet_deflate::expand;
use parselet_multimodal::detect_format;
use parselet_rd::RdParams;
use parselet_serialize::container::ArchiveString;
use parselet_serialize::{read_archive, write_archive, Archive, ArchiveReport, DataType, SerializeError};

pub use cache::Cache;
pub use merge::{merge, merge_transcode, union, union_transcode, IdMapping};

#[derive(Debug, thiserror::Error)]
pub enum ArchiveError {
    #[error(transparent)]
    Serialize(#[from] SerializeError),
    #[error(transparent)]
    Core(#[from] parselet_core::CoreError),
    #[error(transparent)]
    Multimodal(#[from] parselet_multimodal::MultimodalError),
    #[error("cache: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ArchiveError>;

/// A string to archive with its header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub dtype: DataType,
    pub data: Vec<u8>,
}

impl Item {
    pub fn bytes(data: impl Into<Vec<u8>>) -> Self {
        Item { dtype: DataType::Bytes, data: data.into() }
    }

    /// Detects the container format and codes recognised media through the block transform.
    pub fn from_file(bytes: &[u8], exec: Exec) -> Self {
        let (dtype, data) = parselet_multimodal::encode(&detect_format(bytes), exec);
        Item { dtype, data }
    }
}

/// One string compressed on its own.
#[derive(Debug, Clone)]
pub struct Compressed {
    pub dict: Dictionary,
    /// Lossy string data over `dict`.
    pub data: StringData,
    pub original: Vec<u8>,
    pub dtype: DataType,
}

impl Compressed {
    pub fn lossy(&self) -> Vec<u8> {
        expand(&self.data, &self.dict).expect("compressed string decodes").letters
    }
}

/// Sets entry counts to the number of times the string activates each entry.
fn recount(dict: &mut Dictionary, data: &StringData) -> Result<()> {
    let act = expand(data, dict)?.activations;
    for (i, c) in act.into_iter().enumerate() {
        dict.set_count(parselet_core::ALPHABET + i as u32, c);
    }
    Ok(())
}

fn from_archive_bytes(bytes: &[u8], dtype: DataType) -> Result<Compressed> {
    let mut a = read_archive(bytes)?;
    let s = a.strings.pop().ok_or_else(|| SerializeError::Format("empty cache entry".into()))?;
    recount(&mut a.dict, &s.data)?;
    Ok(Compressed { dict: a.dict, data: s.data, original: s.original, dtype })
}

/// Compresses one item, through the cache when given.  Returns whether it was a hit.
/// Results always go through the on-disk format so cold and warm runs agree exactly.
pub fn compress_one(item: &Item, params: &RdParams, cache: Option<&Cache>) -> Result<(Compressed, bool)> {
    let key = Cache::key(&item.data, item.dtype, params);
    if let Some(c) = cache {
        if let Some(bytes) = c.get(&key)? {
            if let Ok(found) = from_archive_bytes(&bytes, item.dtype) {
                if found.original == item.data {
                    return Ok((found, true));
                }
            }
        }
    }
    let (state, _) = parselet_rd::compress(&item.data, params)?;
    let a = Archive {
        dict: state.dict,
        strings: vec![ArchiveString { data: state.data, original: item.data.clone(), dtype: item.dtype }],
    };
    let (bytes, _) = write_archive(&a)?;
    if let Some(c) = cache {
        c.put(&key, &bytes)?;
    }
    Ok((from_archive_bytes(&bytes, item.dtype)?, false))
}

/// Models of many strings merged into one.
#[derive(Debug, Clone)]
pub struct Kompressed {
    pub dict: Dictionary,
    /// Each string over the merged dictionary.
    pub strings: Vec<StringData>,
    /// Each string with its own model.
    pub singles: Vec<Compressed>,
    pub cache_hits: usize,
    pub compressions: usize,
}

impl Kompressed {
    pub fn to_archive(&self) -> Archive {
        Archive {
            dict: self.dict.clone(),
            strings: self
                .strings
                .iter()
                .zip(&self.singles)
                .map(|(x, s)| ArchiveString { data: x.clone(), original: s.original.clone(), dtype: s.dtype })
                .collect(),
        }
    }
}

/// Compresses each distinct item once (in parallel), then unions the models.  Any
/// failure fails the whole call.
pub fn kompress(items: &[Item], params: &RdParams, cache: Option<&Cache>, exec: Exec) -> Result<Kompressed> {
    let keys: Vec<String> = items.iter().map(|i| Cache::key(&i.data, i.dtype, params)).collect();
    let mut unique: Vec<usize> = Vec::new();
    let mut slot = Vec::with_capacity(items.len());
    for (i, k) in keys.iter().enumerate() {
        match unique.iter().position(|&u| &keys[u] == k) {
            Some(p) => slot.push(p),
            None => {
                slot.push(unique.len());
                unique.push(i);
            }
        }
    }
    let done = exec.map(&unique, |&i| compress_one(&items[i], params, cache));
    let mut compressed = Vec::with_capacity(done.len());
    let mut hits = 0;
    for r in done {
        let (c, hit) = r?;
        hits += hit as usize;
        compressed.push(c);
    }
    let singles: Vec<Compressed> = slot.iter().map(|&s| compressed[s].clone()).collect();
    let models: Vec<Dictionary> = singles.iter().map(|c| c.dict.clone()).collect();
    let mut strings: Vec<StringData> = singles.iter().map(|c| c.data.clone()).collect();
    let dict = union_transcode(&models, &mut strings, exec);
    Ok(Kompressed { dict, strings, singles, cache_hits: hits, compressions: unique.len() - hits })
}

/// Files stored in an archive: the exact originals, or the denoised versions.
pub fn extract(bytes: &[u8], lossy: bool, exec: Exec) -> Result<Vec<Vec<u8>>> {
    let a = read_archive(bytes)?;
    a.strings
        .iter()
        .map(|s| {
            let letters = if lossy { expand(&s.data, &a.dict)?.letters } else { s.original.clone() };
            Ok(match s.dtype {
                DataType::Bytes => letters,
                t => parselet_multimodal::decode(t, &letters, exec)?.to_file()?,
            })
        })
        .collect()
}

fn bpl(bits: u64, letters: u64) -> String {
    if letters == 0 {
        "-".into()
    } else {
        format!("{:.2}", bits as f64 / letters as f64)
    }
}

/// Human-readable dump of an archive and its accounting.  Bits per letter (bpl) count the
/// string bits plus, for members of a common-string group, the shared stream.
pub fn describe(a: &Archive, r: &ArchiveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "<Model>\n");
    let _ = writeln!(s, "   K*  = {} parselets (flushed: +{})", r.entries, r.flushed_entries);
    let _ = writeln!(s, "   K_D = {} bits (flushed: +{} bits)", r.model_bits, r.flushed_bits);
    let (mut letters, mut bits, mut depth, mut patch) = (0, 0, 0, 0);
    let mut shared_seen = std::collections::BTreeSet::new();
    for (i, (x, sr)) in a.strings.iter().zip(&r.strings).enumerate() {
        let _ = writeln!(s, "\n <#{i}::String> {:?}\n", x.dtype);
        let _ = writeln!(s, "   Decompr. = {} bytes", sr.length);
        let own = sr.string_bits + sr.mcs_bits.unwrap_or(0);
        match sr.mcs_bits {
            Some(m) => {
                let _ = writeln!(s, "   K_2      = {} bits + {m} MCS bits -> {} bpl", sr.string_bits, bpl(own, sr.length));
                if shared_seen.insert(sr.mcs_group) {
                    bits += m;
                }
            }
            None => {
                let _ = writeln!(s, "   K_2      = {} bits -> {} bpl", sr.string_bits, bpl(own, sr.length));
            }
        }
        let _ = writeln!(s, "     LDepth = {} steps", sr.depth);
        let _ = writeln!(s, "   Patch    = {} bits", sr.patch_bits);
        letters += sr.length;
        bits += sr.string_bits;
        depth += sr.depth;
        patch += sr.patch_bits;
    }
    let total = bits + r.model_bits + r.flushed_bits;
    let _ = writeln!(s, "\n <Total>\n");
    let _ = writeln!(s, "   Decompr. = {letters} bytes");
    let _ = writeln!(s, "   K_2      = {total} bits -> {} bpl", bpl(total, letters));
    let _ = writeln!(s, "     LDepth = {depth} steps");
    let _ = writeln!(s, "   Patch    = {patch} bits");
    let _ = writeln!(s, "   File     = {} bytes ({} framing bits)", r.file_bytes, r.framing_bits);
    s
}

/// One line per model entry: id, count and structure with letters.
pub fn dump_model(d: &Dictionary) -> String {
    let mut s = String::new();
    for (id, p) in d.entries() {
        let _ = writeln!(s, "{id:#x} [{}] {}", p.count, d.expansion_string(id));
    }
    s
}
