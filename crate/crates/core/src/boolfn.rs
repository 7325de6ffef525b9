//! Truth tables of single-output Boolean functions with up to eight inputs.
//!
//! A function is stored as its truth-table bit string `f_{2^n-1}..f_1 f_0`
//! where bit `x` is `f(x)`. The hexadecimal value of that string is the
//! function's id, e.g. `0x46b9` for a particular 4-variable function.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::bits::Bits256;

/// Largest supported variable count.
pub const MAX_VARS: u8 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("variable count {0} out of range 1..=8")]
    VarCount(u8),
    #[error("malformed hex id {0:?}")]
    MalformedHex(String),
    #[error("id value does not fit a {0}-variable truth table")]
    IdOutOfRange(u8),
    #[error("bit string has length {got}, expected {want}")]
    BitLength { got: usize, want: usize },
    #[error("bit string may contain only '0' and '1'")]
    BadBitChar,
    #[error("bad minterm entry {0:?}")]
    BadMinterm(String),
    #[error("minterm {x} out of range for {n} variables")]
    MintermRange { x: u64, n: u8 },
}

/// Two objects indexed by different cube dimensions were combined.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("variable counts differ: {0} vs {1}")]
pub struct VarMismatch(pub u8, pub u8);

fn check_vars(n: u8) -> Result<(), ParseError> {
    if (1..=MAX_VARS).contains(&n) {
        Ok(())
    } else {
        Err(ParseError::VarCount(n))
    }
}

/// Truth table of `f: {0,1}^n -> {0,1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoolFn {
    n: u8,
    bits: Bits256,
}

impl BoolFn {
    /// Builds a function from raw truth bits; bits at or above `2^n` must be clear.
    pub fn new(n: u8, bits: Bits256) -> Result<Self, ParseError> {
        check_vars(n)?;
        if !bits.is_subset_of(&Bits256::all_below(1 << n)) {
            return Err(ParseError::IdOutOfRange(n));
        }
        Ok(BoolFn { n, bits })
    }

    pub fn constant_false(n: u8) -> Result<Self, ParseError> {
        Self::new(n, Bits256::EMPTY)
    }

    /// Parses a hex id (optional `0x` prefix, case-insensitive).
    pub fn from_hex_id(id: &str, n: u8) -> Result<Self, ParseError> {
        check_vars(n)?;
        let digits = id.strip_prefix("0x").or_else(|| id.strip_prefix("0X")).unwrap_or(id);
        if digits.is_empty() {
            return Err(ParseError::MalformedHex(id.to_string()));
        }
        let mut bits = Bits256::EMPTY;
        for (pos, ch) in digits.chars().rev().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(|| ParseError::MalformedHex(id.to_string()))? as u64;
            if nibble == 0 {
                continue;
            }
            if pos >= 64 {
                return Err(ParseError::IdOutOfRange(n));
            }
            for b in 0..4 {
                if nibble >> b & 1 == 1 {
                    bits.insert(pos * 4 + b);
                }
            }
        }
        Self::new(n, bits)
    }

    /// Parses a truth-table bit string of length `2^n`; the first character is
    /// the most significant bit `f_{2^n-1}`.
    pub fn from_bit_string(s: &str, n: u8) -> Result<Self, ParseError> {
        check_vars(n)?;
        let want = 1usize << n;
        let got = s.chars().count();
        if got != want {
            return Err(ParseError::BitLength { got, want });
        }
        let mut bits = Bits256::EMPTY;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits.insert(want - 1 - i),
                _ => return Err(ParseError::BadBitChar),
            }
        }
        Ok(BoolFn { n, bits })
    }

    /// Parses a newline-separated list of decimal minterms; blank lines are skipped.
    pub fn from_minterm_list(text: &str, n: u8) -> Result<Self, ParseError> {
        check_vars(n)?;
        let mut bits = Bits256::EMPTY;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let x: u64 = line.parse().map_err(|_| ParseError::BadMinterm(line.to_string()))?;
            if x >= 1 << n {
                return Err(ParseError::MintermRange { x, n });
            }
            bits.insert(x as usize);
        }
        Ok(BoolFn { n, bits })
    }

    /// Lowercase hex id with `0x` prefix and no leading zero digits.
    pub fn to_hex_id(&self) -> String {
        let nibbles = (1usize << self.n).div_ceil(4);
        let mut out = String::new();
        let mut seen_nonzero = false;
        for pos in (0..nibbles).rev() {
            let mut nibble = 0u32;
            for b in 0..4 {
                let idx = pos * 4 + b;
                if idx < 1 << self.n && self.bits.get(idx) {
                    nibble |= 1 << b;
                }
            }
            if nibble != 0 {
                seen_nonzero = true;
            }
            if seen_nonzero {
                out.push(char::from_digit(nibble, 16).unwrap());
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        format!("0x{out}")
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Number of input points, `2^n`.
    pub fn table_len(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn eval(&self, x: u16) -> bool {
        self.bits.get(x as usize)
    }

    /// Satisfaction count: number of minterms.
    pub fn weight(&self) -> u32 {
        self.bits.count()
    }

    pub fn bits(&self) -> &Bits256 {
        &self.bits
    }

    pub fn on_set(&self) -> MintermSet {
        MintermSet { n: self.n, members: self.bits }
    }

    pub fn off_set(&self) -> MintermSet {
        MintermSet {
            n: self.n,
            members: self.bits ^ Bits256::all_below(self.table_len()),
        }
    }
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFn(n={}, {})", self.n, self.to_hex_id())
    }
}

/// A set of input points of the `n`-cube.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MintermSet {
    n: u8,
    members: Bits256,
}

impl MintermSet {
    pub fn empty(n: u8) -> Self {
        MintermSet { n, members: Bits256::EMPTY }
    }

    pub fn from_bits(n: u8, members: Bits256) -> Self {
        debug_assert!(members.is_subset_of(&Bits256::all_below(1 << n)));
        MintermSet { n, members }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn insert(&mut self, x: u16) {
        debug_assert!((x as usize) < 1 << self.n);
        self.members.insert(x as usize);
    }

    pub fn contains(&self, x: u16) -> bool {
        self.members.get(x as usize)
    }

    pub fn len(&self) -> u32 {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u16> {
        self.members.iter().map(|p| p as u16)
    }

    pub fn bits(&self) -> &Bits256 {
        &self.members
    }

    /// Symmetric difference; the parity-residual update of the synthesizers.
    pub fn xor(&self, other: &MintermSet) -> Result<MintermSet, VarMismatch> {
        if self.n != other.n {
            return Err(VarMismatch(self.n, other.n));
        }
        Ok(MintermSet { n: self.n, members: self.members ^ other.members })
    }
}

impl fmt::Debug for MintermSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MintermSet(n={}, {:?})", self.n, self.members)
    }
}

/// Generates `count` random functions with satisfaction counts drawn uniformly
/// from `[1, 2^(n-1)]` and minterms drawn uniformly without replacement.
/// Deterministic in `seed`; duplicate functions are allowed.
pub fn random_corpus(n: u8, count: usize, seed: u64) -> Vec<BoolFn> {
    assert!((1..=MAX_VARS).contains(&n), "variable count out of range");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let table = 1usize << n;
    let half = 1u32 << (n - 1);
    let mut corpus = Vec::with_capacity(count);
    for _ in 0..count {
        let weight = rng.random_range(1..=half) as usize;
        let mut points: Vec<u16> = (0..table as u16).collect();
        let mut bits = Bits256::EMPTY;
        for i in 0..weight {
            let j = rng.random_range(i..table);
            points.swap(i, j);
            bits.insert(points[i] as usize);
        }
        corpus.push(BoolFn { n, bits });
    }
    corpus
}
