//! Block tiling, zero padding and coefficient layout.
//!
//! Samples are cut into zero-padded blocks of [`BLOCK`] samples per dimension, each block
//! is transformed, and the coarsest low-pass coefficients of all blocks are put first,
//! followed by the remaining coefficients block after block.

use parselet_core::Exec;

use crate::plhaar::{forward_1d, forward_2d, inverse_1d, inverse_2d, BLOCK};

fn blocks_for(n: usize) -> usize {
    n.div_ceil(BLOCK)
}

/// Bytes produced for a 1D signal of `n` samples.
pub fn signal_len(n: usize) -> usize {
    blocks_for(n) * BLOCK
}

/// Bytes produced for a `w x h` plane.
pub fn plane_len(w: usize, h: usize) -> usize {
    blocks_for(w) * blocks_for(h) * BLOCK * BLOCK
}

/// Groups block coefficients: first coefficient of every block, then the rest of each.
pub fn reorder(blocks: &[Vec<u8>]) -> Vec<u8> {
    let mut out: Vec<u8> = blocks.iter().map(|b| b[0]).collect();
    for b in blocks {
        out.extend_from_slice(&b[1..]);
    }
    out
}

/// Inverse of [`reorder`] for blocks of `size` coefficients.
pub fn inverse_reorder(data: &[u8], size: usize) -> Vec<Vec<u8>> {
    let n = data.len() / size;
    (0..n)
        .map(|i| {
            let mut b = Vec::with_capacity(size);
            b.push(data[i]);
            b.extend_from_slice(&data[n + i * (size - 1)..n + (i + 1) * (size - 1)]);
            b
        })
        .collect()
}

pub fn forward_signal(samples: &[u8], exec: Exec) -> Vec<u8> {
    let blocks = exec.map_range(blocks_for(samples.len()), |i| {
        let mut b = vec![0u8; BLOCK];
        let src = &samples[i * BLOCK..samples.len().min((i + 1) * BLOCK)];
        b[..src.len()].copy_from_slice(src);
        forward_1d(&mut b);
        b
    });
    reorder(&blocks)
}

/// Inverse of [`forward_signal`]; `n` is the unpadded length.
pub fn inverse_signal(data: &[u8], n: usize, exec: Exec) -> Vec<u8> {
    let blocks = inverse_reorder(data, BLOCK);
    let blocks = exec.map(&blocks, |b| {
        let mut b = b.clone();
        inverse_1d(&mut b);
        b
    });
    let mut out = blocks.concat();
    out.truncate(n);
    out
}

pub fn forward_plane(pixels: &[u8], w: usize, h: usize, exec: Exec) -> Vec<u8> {
    let bw = blocks_for(w);
    let blocks = exec.map_range(bw * blocks_for(h), |i| {
        let (bx, by) = (i % bw * BLOCK, i / bw * BLOCK);
        let mut b = vec![0u8; BLOCK * BLOCK];
        for r in 0..BLOCK.min(h.saturating_sub(by)) {
            let cols = BLOCK.min(w - bx);
            let src = (by + r) * w + bx;
            b[r * BLOCK..r * BLOCK + cols].copy_from_slice(&pixels[src..src + cols]);
        }
        forward_2d(&mut b, BLOCK);
        b
    });
    reorder(&blocks)
}

pub fn inverse_plane(data: &[u8], w: usize, h: usize, exec: Exec) -> Vec<u8> {
    let bw = blocks_for(w);
    let blocks = inverse_reorder(data, BLOCK * BLOCK);
    let blocks = exec.map(&blocks, |b| {
        let mut b = b.clone();
        inverse_2d(&mut b, BLOCK);
        b
    });
    let mut out = vec![0u8; w * h];
    for (i, b) in blocks.iter().enumerate() {
        let (bx, by) = (i % bw * BLOCK, i / bw * BLOCK);
        for r in 0..BLOCK.min(h.saturating_sub(by)) {
            let cols = BLOCK.min(w - bx);
            let dst = (by + r) * w + bx;
            out[dst..dst + cols].copy_from_slice(&b[r * BLOCK..r * BLOCK + cols]);
        }
    }
    out
}
