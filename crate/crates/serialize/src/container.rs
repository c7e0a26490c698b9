//! Archive container.
//!
//! Layout: the bytes `PRSL`, a version byte, then one bitstream holding the string count,
//! the count of marginal common strings (MCS), per-string headers (data type, smallest
//! letter difference), per-MCS headers, the model, the MCS streams and the string streams.
//! Adaptive coders restart before the model and before every stream.  Nothing depends on
//! the order in which equal parts were produced, so identical inputs give identical files.
//!
//! An MCS is a string whose flushed form and patch equal another's.  Its stream is stored
//! once; members reference it.  A set of MCS is kept only if it makes the file smaller.

use std::collections::BTreeMap;

use parselet_core::{Dictionary, Exec, StringData, ALPHABET};
use parselet_deflate::expand;
use parselet_entropy::{BitCounter, BitReader, BitWriter, Decoder};

use crate::flush::{flush, unflush};
use crate::model::{read_model, write_model, Layout};
use crate::patch::{build_patch, Patch};
use crate::sink::{Coded, Part, Sink};
use crate::stream::{read_string, write_mcs_member, write_string, ReadString, TopBits};
use crate::{DataType, Result, SerializeError};

pub const MAGIC: &[u8; 4] = b"PRSL";
pub const VERSION: u8 = 1;

const TAG_BYTES: u64 = 0;
const TAG_SIGNAL: u64 = 100;
const TAG_IMAGE: u64 = 101;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveString {
    /// String data over the archive dictionary; it may decode to a lossy approximation.
    pub data: StringData,
    /// The exact letters.
    pub original: Vec<u8>,
    pub dtype: DataType,
}

#[derive(Debug, Clone, Default)]
pub struct Archive {
    pub dict: Dictionary,
    pub strings: Vec<ArchiveString>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StringReport {
    /// Rate of the string data.
    pub string_bits: u64,
    /// Patch bits, zero for a lossless string.
    pub patch_bits: u64,
    /// Bits of the shared MCS stream this string refers to, if any.
    pub mcs_bits: Option<u64>,
    /// Index of that shared stream.
    pub mcs_group: Option<usize>,
    /// Decode steps.
    pub depth: u64,
    pub length: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArchiveReport {
    pub model_bits: u64,
    pub flushed_bits: u64,
    pub entries: usize,
    /// Entries added at write time to carry top-level operators.
    pub flushed_entries: usize,
    pub n_mcs: usize,
    pub strings: Vec<StringReport>,
    pub file_bytes: u64,
    /// Headers, counts and alignment.
    pub framing_bits: u64,
}

struct Prepared {
    fd: Dictionary,
    layout: Layout,
    flushed: Vec<StringData>,
    patches: Vec<Patch>,
}

fn prepare(a: &Archive, exec: Exec) -> Result<Prepared> {
    let mut fd = a.dict.clone();
    let mut flushed: Vec<StringData> = a.strings.iter().map(|s| s.data.clone()).collect();
    flush(&mut fd, &mut flushed);
    let idx: Vec<usize> = (0..flushed.len()).collect();
    let patches = exec
        .map(&idx, |&i| build_patch(&flushed[i], &fd, &a.strings[i].original))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let layout = Layout::new(&fd);
    Ok(Prepared { fd, layout, flushed, patches })
}

fn write_min_delta<S: Sink>(sink: &mut S, v: i32) {
    sink.bit(v < 0, Part::Framing);
    sink.constant(v.unsigned_abs() as u64, Part::Framing);
}

fn read_min_delta(dec: &mut Decoder<'_>) -> Result<i32> {
    let neg = dec.read_bit()?;
    let m = dec.read_const()?;
    let m = i32::try_from(m).map_err(|_| SerializeError::Format("letter difference out of range".into()))?;
    Ok(if neg { -m } else { m })
}

fn write_header<S: Sink>(sink: &mut S, t: DataType) {
    match t {
        DataType::Bytes => sink.constant(TAG_BYTES, Part::Framing),
        DataType::Signal { channels, freq, length } => {
            sink.constant(TAG_SIGNAL, Part::Framing);
            for v in [channels.saturating_sub(1), freq, length] {
                sink.constant(v as u64, Part::Framing);
            }
        }
        DataType::Image { channels, width, height } => {
            sink.constant(TAG_IMAGE, Part::Framing);
            for v in [channels.saturating_sub(1), width, height] {
                sink.constant(v as u64, Part::Framing);
            }
        }
    }
}

fn read_u32(dec: &mut Decoder<'_>) -> Result<u32> {
    u32::try_from(dec.read_const()?).map_err(|_| SerializeError::Format("header field out of range".into()))
}

fn read_header(dec: &mut Decoder<'_>) -> Result<DataType> {
    Ok(match dec.read_const()? {
        TAG_BYTES => DataType::Bytes,
        TAG_SIGNAL => DataType::Signal { channels: read_u32(dec)? + 1, freq: read_u32(dec)?, length: read_u32(dec)? },
        TAG_IMAGE => DataType::Image { channels: read_u32(dec)? + 1, width: read_u32(dec)?, height: read_u32(dec)? },
        t => return Err(SerializeError::Format(format!("unknown data type tag {t}"))),
    })
}

type McsKey = (Vec<u32>, Patch);

/// Strings grouped by identical flushed form and patch, in key order; only groups with at
/// least two members.
fn mcs_candidates(p: &Prepared) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<McsKey, Vec<usize>> = BTreeMap::new();
    for (i, x) in p.flushed.iter().enumerate() {
        let key = (x.values().iter().map(|s| s.raw()).collect(), p.patches[i].clone());
        groups.entry(key).or_default().push(i);
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

/// Writes the bitstream for a fixed choice of MCS groups.
fn emit<S: Sink>(
    sink: &mut S,
    a: &Archive,
    p: &Prepared,
    mcs: &[Vec<usize>],
    tally: impl Fn(&S, Part) -> u64 + Copy,
    total: impl Fn(&S) -> u64,
) -> Result<ArchiveReport> {
    let n = a.strings.len();
    let mut member: Vec<Option<usize>> = vec![None; n];
    for (m, g) in mcs.iter().enumerate() {
        for &i in g {
            member[i] = Some(m);
        }
    }
    sink.constant(n as u64, Part::Framing);
    sink.constant(mcs.len() as u64, Part::Framing);
    for (i, s) in a.strings.iter().enumerate() {
        write_header(sink, s.dtype);
        write_min_delta(sink, if member[i].is_some() { 0 } else { p.patches[i].min_delta() });
    }
    for g in mcs {
        write_min_delta(sink, p.patches[g[0]].min_delta());
    }
    sink.reset(ALPHABET + 1);
    let (_, mb) = write_model(sink, &p.fd, tally);
    let model_bound = ALPHABET + p.fd.len() as u32;
    let eos = model_bound + mcs.len() as u32;
    let parts = |s: &S| (tally(s, Part::String), tally(s, Part::Patch));
    let mut mcs_bits = Vec::with_capacity(mcs.len());
    for g in mcs {
        let i = g[0];
        sink.reset(eos + 1);
        let before = total(sink);
        write_string(sink, &p.flushed[i], &p.fd, &p.layout, Some(&p.patches[i]), TopBits::Runs, p.patches[i].min_delta(), eos)?;
        mcs_bits.push(total(sink) - before);
    }
    let mut strings = Vec::with_capacity(n);
    for i in 0..n {
        sink.reset(eos + 1);
        let (s0, p0) = parts(sink);
        let mut r = StringReport::default();
        match member[i] {
            Some(m) => {
                write_mcs_member(sink, model_bound + m as u32, TopBits::Runs, eos);
                r.mcs_bits = Some(mcs_bits[m]);
                r.mcs_group = Some(m);
            }
            None => {
                let pi = &p.patches[i];
                write_string(sink, &p.flushed[i], &p.fd, &p.layout, Some(pi), TopBits::Runs, pi.min_delta(), eos)?;
            }
        }
        let (s1, p1) = parts(sink);
        r.string_bits = s1 - s0;
        r.patch_bits = p1 - p0;
        let e = expand(&a.strings[i].data, &a.dict)?;
        r.depth = e.depth;
        r.length = e.letters.len() as u64;
        strings.push(r);
    }
    Ok(ArchiveReport {
        model_bits: mb.regular,
        flushed_bits: mb.flushed,
        entries: a.dict.len(),
        flushed_entries: p.fd.len() - a.dict.len(),
        n_mcs: mcs.len(),
        strings,
        file_bytes: 0,
        framing_bits: 0,
    })
}

fn counted_size(a: &Archive, p: &Prepared, mcs: &[Vec<usize>]) -> Result<u64> {
    let mut s = Coded::new(BitCounter::new(), ALPHABET + 1);
    emit(&mut s, a, p, mcs, |s, part| s.bits(part), |s| s.written())?;
    Ok(s.written())
}

/// Chooses MCS groups greedily in key order, keeping each that shrinks the file.
fn choose_mcs(a: &Archive, p: &Prepared) -> Result<Vec<Vec<usize>>> {
    let mut chosen = Vec::new();
    let mut best = counted_size(a, p, &chosen)?;
    for g in mcs_candidates(p) {
        chosen.push(g);
        let size = counted_size(a, p, &chosen)?;
        if size < best {
            best = size;
        } else {
            chosen.pop();
        }
    }
    Ok(chosen)
}

/// Serializes an archive; returns the bytes and an accounting report.
pub fn write_archive(a: &Archive) -> Result<(Vec<u8>, ArchiveReport)> {
    write_archive_with(a, Exec::default())
}

pub fn write_archive_with(a: &Archive, exec: Exec) -> Result<(Vec<u8>, ArchiveReport)> {
    let p = prepare(a, exec)?;
    let mcs = choose_mcs(a, &p)?;
    let mut sink = Coded::new(BitWriter::new(), ALPHABET + 1);
    let mut report = emit(&mut sink, a, &p, &mcs, |s, part| s.bits(part), |s| s.written())?;
    report.framing_bits = sink.bits(Part::Framing);
    let mut w = sink.into_inner();
    w.align();
    let mut out = MAGIC.to_vec();
    out.push(VERSION);
    out.extend_from_slice(&w.into_bytes());
    report.file_bytes = out.len() as u64;
    Ok((out, report))
}

/// Reads an archive back; strings come out over the returned dictionary, in canonical
/// numbering.
pub fn read_archive(bytes: &[u8]) -> Result<Archive> {
    if bytes.len() < 5 || &bytes[..4] != MAGIC {
        return Err(SerializeError::Format("not an archive".into()));
    }
    if bytes[4] != VERSION {
        return Err(SerializeError::Format(format!("unsupported version {}", bytes[4])));
    }
    let mut dec = Decoder::new(BitReader::new(&bytes[5..]), ALPHABET + 1);
    let n = dec.read_const()? as usize;
    let n_mcs = dec.read_const()? as usize;
    // Every header takes at least two bits; reject absurd counts before allocating.
    if n.saturating_add(n_mcs) > bytes.len().saturating_mul(8) {
        return Err(SerializeError::Format("string count exceeds file size".into()));
    }
    let mut headers = Vec::with_capacity(n);
    for _ in 0..n {
        let t = read_header(&mut dec)?;
        headers.push((t, read_min_delta(&mut dec)?));
    }
    let mcs_deltas = (0..n_mcs).map(|_| read_min_delta(&mut dec)).collect::<Result<Vec<_>>>()?;
    dec.reset(ALPHABET + 1);
    let raw = read_model(&mut dec)?;
    let model_bound = raw.bound();
    let eos = model_bound + n_mcs as u32;
    let mut mcs = Vec::with_capacity(n_mcs);
    for &md in &mcs_deltas {
        dec.reset(eos + 1);
        match read_string(&mut dec, &raw, model_bound, TopBits::Runs, md, eos)? {
            ReadString::Content { slots, lossless, .. } => mcs.push((slots, lossless)),
            ReadString::Mcs(_) => return Err(SerializeError::Format("nested common string".into())),
        }
    }
    let mut contents = Vec::with_capacity(n);
    for &(_, md) in &headers {
        dec.reset(eos + 1);
        contents.push(match read_string(&mut dec, &raw, model_bound, TopBits::Runs, md, eos)? {
            ReadString::Content { slots, lossless, .. } => (slots, lossless),
            ReadString::Mcs(m) => mcs.get(m).cloned().ok_or_else(|| SerializeError::Format("unknown common string".into()))?,
        });
    }
    let (d2, map) = raw.into_dictionary()?;
    let mut data: Vec<StringData> = contents
        .iter()
        .map(|(slots, _)| {
            let mut x = slots.clone();
            x.transcode(|id| if id < ALPHABET { id } else { map[(id - ALPHABET) as usize] });
            x
        })
        .collect();
    let dict = unflush(&d2, &mut data)?;
    let strings = data
        .into_iter()
        .zip(contents)
        .zip(headers)
        .map(|((data, (_, original)), (dtype, _))| ArchiveString { data, original, dtype })
        .collect();
    Ok(Archive { dict, strings })
}

/// Convenience: an archive of one lossless string.
pub fn single(dict: Dictionary, data: StringData, original: Vec<u8>) -> Archive {
    Archive { dict, strings: vec![ArchiveString { data, original, dtype: DataType::Bytes }] }
}
