//! Front-end for signals and images.
//!
//! Well-known containers (8-bit PCM wav, 8-bit pgm/ppm) are detected and their samples
//! turned into strings of block-transformed coefficients that compress better than raw
//! samples; anything else is left untouched.  The header of each string records what it
//! holds so decompression can rebuild the container.

pub mod blocks;
pub mod color;
pub mod plhaar;

use std::io::Cursor;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};
use parselet_core::Exec;
use parselet_serialize::DataType;

pub use plhaar::{forward_pair, inverse_pair, BLOCK};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MultimodalError {
    #[error("{dtype:?} expects {expected} bytes, got {got}")]
    Length { dtype: DataType, expected: usize, got: usize },
    #[error("cannot write container: {0}")]
    Write(String),
}

pub type Result<T> = std::result::Result<T, MultimodalError>;

/// Decoded content of a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Media {
    Bytes(Vec<u8>),
    /// Interleaved unsigned 8-bit samples.
    Signal { channels: u32, freq: u32, samples: Vec<u8> },
    Gray { width: u32, height: u32, pixels: Vec<u8> },
    /// Interleaved RGB.
    Color { width: u32, height: u32, rgb: Vec<u8> },
}

fn detect_wav(bytes: &[u8]) -> Option<Media> {
    if bytes.len() < 12 || &bytes[..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return None;
    }
    let reader = hound::WavReader::new(Cursor::new(bytes)).ok()?;
    let spec = reader.spec();
    if spec.bits_per_sample != 8 || spec.sample_format != hound::SampleFormat::Int {
        return None;
    }
    let samples: std::result::Result<Vec<u8>, _> =
        reader.into_samples::<i8>().map(|s| s.map(|v| (v as i16 + 128) as u8)).collect();
    Some(Media::Signal { channels: spec.channels as u32, freq: spec.sample_rate, samples: samples.ok()? })
}

fn detect_pnm(bytes: &[u8]) -> Option<Media> {
    if bytes.len() < 2 || bytes[0] != b'P' || !matches!(bytes[1], b'2' | b'3' | b'5' | b'6') {
        return None;
    }
    match image::load_from_memory_with_format(bytes, ImageFormat::Pnm).ok()? {
        DynamicImage::ImageLuma8(img) => {
            Some(Media::Gray { width: img.width(), height: img.height(), pixels: img.into_raw() })
        }
        DynamicImage::ImageRgb8(img) => Some(Media::Color { width: img.width(), height: img.height(), rgb: img.into_raw() }),
        _ => None,
    }
}

/// Recognises 8-bit PCM wav and 8-bit pgm/ppm; everything else, including damaged
/// files, is plain bytes.
pub fn detect_format(bytes: &[u8]) -> Media {
    detect_wav(bytes).or_else(|| detect_pnm(bytes)).unwrap_or_else(|| Media::Bytes(bytes.to_vec()))
}

impl Media {
    pub fn data_type(&self) -> DataType {
        match self {
            Media::Bytes(_) => DataType::Bytes,
            Media::Signal { channels, freq, samples } => {
                DataType::Signal { channels: *channels, freq: *freq, length: samples.len() as u32 / channels.max(&1) }
            }
            Media::Gray { width, height, .. } => DataType::Image { channels: 1, width: *width, height: *height },
            Media::Color { width, height, .. } => DataType::Image { channels: 3, width: *width, height: *height },
        }
    }

    /// The file this media would be stored as.
    pub fn to_file(&self) -> Result<Vec<u8>> {
        let err = |e: &dyn std::fmt::Display| MultimodalError::Write(e.to_string());
        match self {
            Media::Bytes(b) => Ok(b.clone()),
            Media::Signal { channels, freq, samples } => {
                let spec = hound::WavSpec {
                    channels: *channels as u16,
                    sample_rate: *freq,
                    bits_per_sample: 8,
                    sample_format: hound::SampleFormat::Int,
                };
                let mut buf = Cursor::new(Vec::new());
                let mut w = hound::WavWriter::new(&mut buf, spec).map_err(|e| err(&e))?;
                for &s in samples {
                    w.write_sample((s as i16 - 128) as i8).map_err(|e| err(&e))?;
                }
                w.finalize().map_err(|e| err(&e))?;
                Ok(buf.into_inner())
            }
            Media::Gray { width, height, pixels } => {
                let mut out = Vec::new();
                PnmEncoder::new(&mut out)
                    .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
                    .write_image(pixels, *width, *height, ExtendedColorType::L8)
                    .map_err(|e| err(&e))?;
                Ok(out)
            }
            Media::Color { width, height, rgb } => {
                let mut out = Vec::new();
                PnmEncoder::new(&mut out)
                    .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
                    .write_image(rgb, *width, *height, ExtendedColorType::Rgb8)
                    .map_err(|e| err(&e))?;
                Ok(out)
            }
        }
    }
}

fn deinterleave(samples: &[u8], channels: usize) -> Vec<Vec<u8>> {
    (0..channels).map(|c| samples.iter().skip(c).step_by(channels).copied().collect()).collect()
}

/// Planes a media is coded as: one per signal channel, or luma and subsampled chroma.
pub fn planes(media: &Media) -> Vec<Vec<u8>> {
    match media {
        Media::Bytes(b) => vec![b.clone()],
        Media::Signal { channels, samples, .. } => deinterleave(samples, (*channels).max(1) as usize),
        Media::Gray { pixels, .. } => vec![pixels.clone()],
        Media::Color { width, height, rgb } => color::rgb_to_planes(rgb, *width as usize, *height as usize).to_vec(),
    }
}

fn plane_dims(dtype: DataType) -> Vec<(usize, usize)> {
    match dtype {
        DataType::Bytes => vec![],
        DataType::Signal { channels, length, .. } => vec![(length as usize, 1); channels as usize],
        DataType::Image { channels, width, height } => {
            let (w, h) = (width as usize, height as usize);
            let mut d = vec![(w, h)];
            if channels == 3 {
                let c = color::chroma_dims(w, h);
                d.extend([c, c]);
            }
            d
        }
    }
}

fn coded_len(dtype: DataType, (w, h): (usize, usize)) -> usize {
    match dtype {
        DataType::Signal { .. } => blocks::signal_len(w),
        _ => blocks::plane_len(w, h),
    }
}

/// Header and string to compress for a media.
pub fn encode(media: &Media, exec: Exec) -> (DataType, Vec<u8>) {
    let dtype = media.data_type();
    if let Media::Bytes(b) = media {
        return (dtype, b.clone());
    }
    let mut out = Vec::new();
    for (p, (w, h)) in planes(media).iter().zip(plane_dims(dtype)) {
        match dtype {
            DataType::Signal { .. } => out.extend(blocks::forward_signal(p, exec)),
            _ => out.extend(blocks::forward_plane(p, w, h, exec)),
        }
    }
    (dtype, out)
}

/// Planes of a coded string, inverse-transformed.
pub fn decode_planes(dtype: DataType, data: &[u8], exec: Exec) -> Result<Vec<Vec<u8>>> {
    if dtype == DataType::Bytes {
        return Ok(vec![data.to_vec()]);
    }
    let dims = plane_dims(dtype);
    let expected: usize = dims.iter().map(|&d| coded_len(dtype, d)).sum();
    if data.len() != expected {
        return Err(MultimodalError::Length { dtype, expected, got: data.len() });
    }
    let mut at = 0;
    Ok(dims
        .into_iter()
        .map(|(w, h)| {
            let n = coded_len(dtype, (w, h));
            let chunk = &data[at..at + n];
            at += n;
            match dtype {
                DataType::Signal { .. } => blocks::inverse_signal(chunk, w, exec),
                _ => blocks::inverse_plane(chunk, w, h, exec),
            }
        })
        .collect())
}

/// Rebuilds the media from its header and coded string.
pub fn decode(dtype: DataType, data: &[u8], exec: Exec) -> Result<Media> {
    let planes = decode_planes(dtype, data, exec)?;
    Ok(match dtype {
        DataType::Bytes => Media::Bytes(data.to_vec()),
        DataType::Signal { channels, freq, length } => {
            let mut samples = Vec::with_capacity((channels * length) as usize);
            for i in 0..length as usize {
                samples.extend(planes.iter().map(|p| p[i]));
            }
            Media::Signal { channels, freq, samples }
        }
        DataType::Image { channels: 1, width, height } => {
            Media::Gray { width, height, pixels: planes.into_iter().next().unwrap_or_default() }
        }
        DataType::Image { width, height, .. } => {
            let p: [Vec<u8>; 3] = planes.try_into().expect("three planes");
            Media::Color { width, height, rgb: color::planes_to_rgb(&p, width as usize, height as usize) }
        }
    })
}
