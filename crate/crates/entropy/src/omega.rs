//! Elias omega code for nonnegative integers (`n` is coded as omega of `n + 1`).

use crate::bits::{BitReader, BitWrite};
use crate::{EntropyError, Result};

pub fn write_omega<W: BitWrite + ?Sized>(w: &mut W, n: u64) {
    assert!(n < u64::MAX, "omega code input out of range");
    let mut groups = [(0u64, 0u32); 8];
    let mut k = 0;
    let mut v = n + 1;
    while v > 1 {
        let len = 64 - v.leading_zeros();
        groups[k] = (v, len);
        k += 1;
        v = (len - 1) as u64;
    }
    for &(g, l) in groups[..k].iter().rev() {
        w.put_bits(g, l);
    }
    w.put_bit(false);
}

pub fn read_omega(r: &mut BitReader<'_>) -> Result<u64> {
    let mut v: u64 = 1;
    loop {
        if !r.read_bit()? {
            return Ok(v - 1);
        }
        if v >= 64 {
            return Err(EntropyError::Malformed("omega group too long"));
        }
        let mut x = 1u64;
        for _ in 0..v {
            x = x << 1 | r.read_bit()? as u64;
        }
        v = x;
    }
}

/// Length in bits of the omega code of `n`.
pub fn omega_len(n: u64) -> u64 {
    let mut bits = 1;
    let mut v = n + 1;
    while v > 1 {
        let len = 64 - v.leading_zeros();
        bits += len as u64;
        v = (len - 1) as u64;
    }
    bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{BitCounter, BitWriter};
    use proptest::prelude::*;

    fn code(n: u64) -> String {
        let mut w = BitWriter::new();
        write_omega(&mut w, n);
        let len = w.written() as usize;
        let bytes = w.into_bytes();
        (0..len).map(|i| if bytes[i / 8] >> (7 - i % 8) & 1 == 1 { '1' } else { '0' }).collect()
    }

    #[test]
    fn known_codewords() {
        // Textbook omega codewords of 1, 2, 3, 4, 7, 8, 16, 17.
        assert_eq!(code(0), "0");
        assert_eq!(code(1), "100");
        assert_eq!(code(2), "110");
        assert_eq!(code(3), "101000");
        assert_eq!(code(6), "101110");
        assert_eq!(code(7), "1110000");
        assert_eq!(code(15), "10100100000");
        assert_eq!(code(16), "10100100010");
    }

    proptest! {
        #[test]
        fn roundtrip_and_length(values in proptest::collection::vec(0u64..(1 << 40), 1..50)) {
            let mut w = BitWriter::new();
            let mut c = BitCounter::new();
            for &v in &values {
                write_omega(&mut w, v);
                write_omega(&mut c, v);
            }
            prop_assert_eq!(c.written(), values.iter().map(|&v| omega_len(v)).sum::<u64>());
            prop_assert_eq!(c.written(), w.written());
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            for &v in &values {
                prop_assert_eq!(read_omega(&mut r).unwrap(), v);
            }
        }
    }
}
