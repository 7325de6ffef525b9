//! Fixed-width 256-bit point sets.
//!
//! Every object in this crate that is indexed by cube points -- truth tables,
//! minterm sets, cover rows, parity residuals -- lives in `[0, 2^n)` with
//! `n <= 8`, so a single four-word bitset covers all of them.

use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, BitXor, BitXorAssign};

/// A set of points in `[0, 256)`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Bits256([u64; 4]);

impl Bits256 {
    pub const EMPTY: Bits256 = Bits256([0; 4]);

    /// The set `{0, 1, .., len-1}`.
    pub fn all_below(len: usize) -> Self {
        assert!(len <= 256, "point universe is capped at 256");
        let mut words = [0u64; 4];
        for (i, w) in words.iter_mut().enumerate() {
            let lo = i * 64;
            if len >= lo + 64 {
                *w = u64::MAX;
            } else if len > lo {
                *w = (1u64 << (len - lo)) - 1;
            }
        }
        Bits256(words)
    }

    pub fn singleton(point: usize) -> Self {
        let mut b = Self::EMPTY;
        b.insert(point);
        b
    }

    #[inline]
    pub fn get(&self, point: usize) -> bool {
        (self.0[point >> 6] >> (point & 63)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, point: usize) {
        self.0[point >> 6] |= 1 << (point & 63);
    }

    #[inline]
    pub fn toggle(&mut self, point: usize) {
        self.0[point >> 6] ^= 1 << (point & 63);
    }

    pub fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    /// Lowest member, if any.
    pub fn first(&self) -> Option<usize> {
        for (i, w) in self.0.iter().enumerate() {
            if *w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn intersects(&self, other: &Bits256) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &Bits256) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    /// Iterates members in ascending order.
    pub fn iter(&self) -> Ones {
        Ones { words: self.0, word: 0 }
    }

    pub fn words(&self) -> [u64; 4] {
        self.0
    }
}

pub struct Ones {
    words: [u64; 4],
    word: usize,
}

impl Iterator for Ones {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word < 4 {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] = w & (w - 1);
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}

macro_rules! impl_bitop {
    ($trait:ident, $method:ident, $assign_trait:ident, $assign_method:ident, $op:tt, $op_assign:tt) => {
        impl $trait for Bits256 {
            type Output = Bits256;
            fn $method(self, rhs: Bits256) -> Bits256 {
                let mut out = [0u64; 4];
                for i in 0..4 {
                    out[i] = self.0[i] $op rhs.0[i];
                }
                Bits256(out)
            }
        }
        impl $assign_trait for Bits256 {
            fn $assign_method(&mut self, rhs: Bits256) {
                for i in 0..4 {
                    self.0[i] $op_assign rhs.0[i];
                }
            }
        }
    };
}

impl_bitop!(BitAnd, bitand, BitAndAssign, bitand_assign, &, &=);
impl_bitop!(BitOr, bitor, BitOrAssign, bitor_assign, |, |=);
impl_bitop!(BitXor, bitxor, BitXorAssign, bitxor_assign, ^, ^=);

impl fmt::Debug for Bits256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
