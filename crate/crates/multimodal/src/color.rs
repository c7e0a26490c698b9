//! Colour preprocessing: full-range YCbCr with chroma subsampled by two in both
//! directions (2x2 mean).  Subsampling is the only irreversible step of the front-end.

fn clamp(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn chroma_dims(w: usize, h: usize) -> (usize, usize) {
    (w.div_ceil(2), h.div_ceil(2))
}

/// Y, Cb and Cr planes of interleaved RGB pixels; chroma planes are subsampled.
pub fn rgb_to_planes(rgb: &[u8], w: usize, h: usize) -> [Vec<u8>; 3] {
    let n = w * h;
    let mut y = Vec::with_capacity(n);
    let mut cb = Vec::with_capacity(n);
    let mut cr = Vec::with_capacity(n);
    for p in rgb.chunks_exact(3) {
        let (r, g, b) = (p[0] as f64, p[1] as f64, p[2] as f64);
        y.push(clamp(0.299 * r + 0.587 * g + 0.114 * b));
        cb.push(128.0 - 0.168_736 * r - 0.331_264 * g + 0.5 * b);
        cr.push(128.0 + 0.5 * r - 0.418_688 * g - 0.081_312 * b);
    }
    let (cw, ch) = chroma_dims(w, h);
    let sub = |c: &[f64]| -> Vec<u8> {
        let mut out = Vec::with_capacity(cw * ch);
        for cy in 0..ch {
            for cx in 0..cw {
                let (mut s, mut k) = (0.0, 0.0);
                for yy in 2 * cy..(2 * cy + 2).min(h) {
                    for xx in 2 * cx..(2 * cx + 2).min(w) {
                        s += c[yy * w + xx];
                        k += 1.0;
                    }
                }
                out.push(clamp(s / k));
            }
        }
        out
    };
    [y, sub(&cb), sub(&cr)]
}

/// Interleaved RGB from luma and subsampled chroma (nearest-neighbour upsampling).
pub fn planes_to_rgb(planes: &[Vec<u8>; 3], w: usize, h: usize) -> Vec<u8> {
    let (cw, _) = chroma_dims(w, h);
    let mut out = Vec::with_capacity(3 * w * h);
    for yy in 0..h {
        for xx in 0..w {
            let y = planes[0][yy * w + xx] as f64;
            let c = (yy / 2) * cw + xx / 2;
            let cb = planes[1][c] as f64 - 128.0;
            let cr = planes[2][c] as f64 - 128.0;
            out.push(clamp(y + 1.402 * cr));
            out.push(clamp(y - 0.344_136 * cb - 0.714_136 * cr));
            out.push(clamp(y + 1.772 * cb));
        }
    }
    out
}
