//! 256-bit letter sets (separator sets, parselet leaf sets).

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Debug)]
pub struct LetterSet([u64; 4]);

impl LetterSet {
    pub const EMPTY: LetterSet = LetterSet([0; 4]);

    pub fn single(c: u8) -> Self {
        let mut s = Self::EMPTY;
        s.insert(c);
        s
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut s = Self::EMPTY;
        for &b in bytes {
            s.insert(b);
        }
        s
    }

    /// Every byte that is not an ASCII letter or digit: the default tokenizer.
    pub fn non_alphanumeric() -> Self {
        let mut s = Self::EMPTY;
        for b in 0..=255u8 {
            if !b.is_ascii_alphanumeric() {
                s.insert(b);
            }
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, c: u8) {
        self.0[(c >> 6) as usize] |= 1 << (c & 63);
    }

    #[inline]
    pub fn contains(&self, c: u8) -> bool {
        self.0[(c >> 6) as usize] >> (c & 63) & 1 == 1
    }

    #[inline]
    pub fn union(&self, o: &LetterSet) -> LetterSet {
        LetterSet([self.0[0] | o.0[0], self.0[1] | o.0[1], self.0[2] | o.0[2], self.0[3] | o.0[3]])
    }

    #[inline]
    pub fn intersects(&self, o: &LetterSet) -> bool {
        (0..4).any(|i| self.0[i] & o.0[i] != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(move |&c| self.contains(c))
    }
}
