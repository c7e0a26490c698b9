//! Reversible 8-bit to 8-bit Haar-like transform.
//!
//! The pair step is an integer S-transform computed modulo 256: `h = a - b` and
//! `l = b + floor(h / 2)`, with `h` stored offset by 128.  For pairs whose difference
//! fits in a signed byte this is exactly the integer Haar transform (`l` is the floored
//! mean, `h` the difference); larger differences wrap, which keeps the transform a
//! bijection on byte pairs.  Both directions are tabulated once.
//!
//! Blocks are transformed with the pyramid decomposition: each level splits the current
//! low band into low and high halves, until one low-pass coefficient remains.

use std::sync::OnceLock;

/// Block edge in samples.
pub const BLOCK: usize = 32;
/// Neutral high-pass value.
pub const NEUTRAL: u8 = 128;

#[inline]
fn forward_raw(a: u8, b: u8) -> (u8, u8) {
    let h = a.wrapping_sub(b) as i8;
    let l = b.wrapping_add((h >> 1) as u8);
    (l, (h as u8) ^ 0x80)
}

#[inline]
fn inverse_raw(l: u8, h: u8) -> (u8, u8) {
    let h = (h ^ 0x80) as i8;
    let b = l.wrapping_sub((h >> 1) as u8);
    (b.wrapping_add(h as u8), b)
}

struct Tables {
    fwd: Vec<(u8, u8)>,
    inv: Vec<(u8, u8)>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut fwd = Vec::with_capacity(1 << 16);
        let mut inv = Vec::with_capacity(1 << 16);
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                fwd.push(forward_raw(a, b));
                inv.push(inverse_raw(a, b));
            }
        }
        Tables { fwd, inv }
    })
}

/// `(a, b) -> (low, high)`.
#[inline]
pub fn forward_pair(a: u8, b: u8) -> (u8, u8) {
    tables().fwd[(a as usize) << 8 | b as usize]
}

/// `(low, high) -> (a, b)`.
#[inline]
pub fn inverse_pair(l: u8, h: u8) -> (u8, u8) {
    tables().inv[(l as usize) << 8 | h as usize]
}

/// One analysis level over `n` samples spaced `stride` apart: lows to the first half,
/// highs to the second.
fn split(x: &mut [u8], start: usize, stride: usize, n: usize, tmp: &mut Vec<u8>) {
    tmp.clear();
    tmp.resize(n, 0);
    for i in 0..n / 2 {
        let (l, h) = forward_pair(x[start + 2 * i * stride], x[start + (2 * i + 1) * stride]);
        tmp[i] = l;
        tmp[n / 2 + i] = h;
    }
    for (i, &v) in tmp.iter().enumerate() {
        x[start + i * stride] = v;
    }
}

fn merge(x: &mut [u8], start: usize, stride: usize, n: usize, tmp: &mut Vec<u8>) {
    tmp.clear();
    tmp.resize(n, 0);
    for i in 0..n / 2 {
        let (a, b) = inverse_pair(x[start + i * stride], x[start + (n / 2 + i) * stride]);
        tmp[2 * i] = a;
        tmp[2 * i + 1] = b;
    }
    for (i, &v) in tmp.iter().enumerate() {
        x[start + i * stride] = v;
    }
}

/// Full decomposition of a power-of-two length block; `x[0]` ends up as the coarsest
/// low-pass coefficient.
pub fn forward_1d(x: &mut [u8]) {
    debug_assert!(x.len().is_power_of_two());
    let mut tmp = Vec::new();
    let mut n = x.len();
    while n > 1 {
        split(x, 0, 1, n, &mut tmp);
        n /= 2;
    }
}

pub fn inverse_1d(x: &mut [u8]) {
    let mut tmp = Vec::new();
    let mut n = 2;
    while n <= x.len() {
        merge(x, 0, 1, n, &mut tmp);
        n *= 2;
    }
}

/// Separable decomposition of a square `edge x edge` block stored row-major: at every
/// level the rows of the current low band, then its columns.
pub fn forward_2d(x: &mut [u8], edge: usize) {
    debug_assert_eq!(x.len(), edge * edge);
    let mut tmp = Vec::new();
    let mut n = edge;
    while n > 1 {
        for r in 0..n {
            split(x, r * edge, 1, n, &mut tmp);
        }
        for c in 0..n {
            split(x, c, edge, n, &mut tmp);
        }
        n /= 2;
    }
}

pub fn inverse_2d(x: &mut [u8], edge: usize) {
    let mut tmp = Vec::new();
    let mut n = 2;
    while n <= edge {
        for c in 0..n {
            merge(x, c, edge, n, &mut tmp);
        }
        for r in 0..n {
            merge(x, r * edge, 1, n, &mut tmp);
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_on_small_differences() {
        assert_eq!(forward_pair(10, 4), (7, NEUTRAL + 6));
        assert_eq!(forward_pair(4, 11), (7, NEUTRAL - 7));
        assert_eq!(forward_pair(200, 200), (200, NEUTRAL));
    }

    #[test]
    fn constant_block() {
        let mut x = [77u8; BLOCK];
        forward_1d(&mut x);
        assert_eq!(x[0], 77);
        assert!(x[1..].iter().all(|&h| h == NEUTRAL));
        inverse_1d(&mut x);
        assert_eq!(x, [77u8; BLOCK]);
    }

    #[test]
    fn ramp_has_small_details() {
        let mut x: Vec<u8> = (0..BLOCK as u8).map(|i| 100 + i).collect();
        forward_1d(&mut x);
        assert!(x[1..].iter().all(|&h| h.abs_diff(NEUTRAL) <= 16));
    }
}
