//! Parallelotopes embedded in the Boolean n-cube.
//!
//! A parallelotope is an anchor vertex together with `m` pairwise-disjoint
//! nonempty coordinate blocks; its vertex set is the coset
//! `{ anchor ^ xor(alpha_j, j in T) : T subseteq [m] }` where `alpha_j` is the
//! bitmask of block `j`. Disjoint supports keep every generated vertex inside
//! the cube, and the coset has exactly `2^m` vertices.
//!
//! Subcubes (ordinary product terms) are the special case where every block
//! is a single coordinate.

use std::fmt;

use thiserror::Error;

use crate::bits::Bits256;
use crate::boolfn::{MintermSet, MAX_VARS};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum PtopeError {
    #[error("variable count {0} out of range 1..=8")]
    VarCount(u8),
    #[error("anchor {anchor:#x} outside the {n}-cube")]
    AnchorRange { anchor: u16, n: u8 },
    #[error("empty coordinate block")]
    EmptyBlock,
    #[error("block {0:#b} outside the {1}-cube")]
    BlockRange(u16, u8),
    #[error("blocks are not pairwise disjoint")]
    OverlappingBlocks,
}

/// Index of the coordinate a block is identified by: its highest bit, which
/// sits on the lowest qubit line once coordinates map to qubits MSB-first.
pub fn block_rep(mask: u16) -> u8 {
    debug_assert!(mask != 0);
    15 - mask.leading_zeros() as u8
}

/// An `m`-dimensional parallelotope in the `n`-cube, in canonical form:
/// blocks sorted ascending by mask, anchor bit cleared at each block's
/// representative coordinate. Two parallelotopes have the same vertex set
/// exactly when their canonical forms are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Parallelotope {
    n: u8,
    anchor: u16,
    blocks: Vec<u16>,
}

impl Parallelotope {
    pub fn new(n: u8, anchor: u16, blocks: &[u16]) -> Result<Self, PtopeError> {
        if !(1..=MAX_VARS).contains(&n) {
            return Err(PtopeError::VarCount(n));
        }
        let cube = (1u32 << n) - 1;
        if u32::from(anchor) > cube {
            return Err(PtopeError::AnchorRange { anchor, n });
        }
        let mut support = 0u16;
        for &b in blocks {
            if b == 0 {
                return Err(PtopeError::EmptyBlock);
            }
            if u32::from(b) > cube {
                return Err(PtopeError::BlockRange(b, n));
            }
            if support & b != 0 {
                return Err(PtopeError::OverlappingBlocks);
            }
            support |= b;
        }
        let mut blocks = blocks.to_vec();
        blocks.sort_unstable();
        let mut anchor = anchor;
        for &b in &blocks {
            if anchor >> block_rep(b) & 1 == 1 {
                anchor ^= b;
            }
        }
        Ok(Parallelotope { n, anchor, blocks })
    }

    /// Convenience constructor from coordinate lists instead of masks.
    pub fn from_coords(n: u8, anchor: u16, blocks: &[&[u8]]) -> Result<Self, PtopeError> {
        let masks: Vec<u16> = blocks
            .iter()
            .map(|coords| coords.iter().fold(0u16, |m, &c| m | 1 << c))
            .collect();
        Self::new(n, anchor, &masks)
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn anchor(&self) -> u16 {
        self.anchor
    }

    pub fn blocks(&self) -> &[u16] {
        &self.blocks
    }

    /// Dimension `m`; the vertex count is `2^m`.
    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.dim()
    }

    /// Union of the block masks.
    pub fn support(&self) -> u16 {
        self.blocks.iter().fold(0, |s, b| s | b)
    }

    /// Total number of coordinates covered by blocks.
    pub fn support_size(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn vertices(&self) -> MintermSet {
        let mut set = MintermSet::empty(self.n);
        for t in 0..self.vertex_count() {
            let mut v = self.anchor;
            for (j, &b) in self.blocks.iter().enumerate() {
                if t >> j & 1 == 1 {
                    v ^= b;
                }
            }
            set.insert(v);
        }
        set
    }

    /// Membership test without materializing the vertex set: the offset from
    /// the anchor must be all-or-nothing on each block and zero elsewhere.
    pub fn contains(&self, x: u16) -> bool {
        debug_assert!(u32::from(x) < 1 << self.n);
        let d = x ^ self.anchor;
        if d & !self.support() != 0 {
            return false;
        }
        self.blocks.iter().all(|&b| {
            let db = d & b;
            db == 0 || db == b
        })
    }
}

impl fmt::Display for Parallelotope {
    /// Line format: `anchor_hex : {x0,x1},{x3}` with coordinates in ascending
    /// order; a bare `anchor_hex :` for single vertices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x} :", self.anchor)?;
        for (j, &b) in self.blocks.iter().enumerate() {
            f.write_str(if j == 0 { " {" } else { ",{" })?;
            let mut first = true;
            for c in 0..self.n {
                if b >> c & 1 == 1 {
                    if !first {
                        f.write_str(",")?;
                    }
                    write!(f, "x{c}")?;
                    first = false;
                }
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Parallelotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Parallelotope(n={}, {})", self.n, self)
    }
}

/// Which candidate family a synthesizer draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Every parallelotope, arbitrary block sizes.
    Full,
    /// Singleton blocks only: product-term cubes, including single vertices.
    Subcube,
    /// Single vertices only.
    Singleton,
}

/// All distinct parallelotopes of one kind in the `n`-cube, canonically
/// ordered: dimension descending, then blocks, then anchor.
#[derive(Clone, Debug)]
pub struct PtopeFamily {
    pub n: u8,
    pub kind: FamilyKind,
    pub members: Vec<Parallelotope>,
}

impl PtopeFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Vertex sets as bitset rows, aligned with `members`.
    pub fn incidence_rows(&self) -> Vec<Bits256> {
        self.members.iter().map(|p| *p.vertices().bits()).collect()
    }

    /// One member per line in the `Display` format.
    pub fn export_lines(&self) -> String {
        let mut out = String::new();
        for p in &self.members {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }
}

/// Enumerates every distinct parallelotope of the requested kind exactly once.
///
/// Block structures are generated by assigning each coordinate in ascending
/// order to "unused", an existing block, or a fresh block; anchors then range
/// over the `2^(n-m)` canonical values (zero at every representative bit), so
/// no deduplication pass is needed.
pub fn enumerate_all(n: u8, kind: FamilyKind) -> Result<PtopeFamily, PtopeError> {
    if !(1..=MAX_VARS).contains(&n) {
        return Err(PtopeError::VarCount(n));
    }
    let mut members = Vec::new();
    match kind {
        FamilyKind::Full => {
            let mut blocks = Vec::new();
            gen_structures(n, 0, &mut blocks, &mut members);
        }
        FamilyKind::Subcube => {
            let cube = (1u16 << n) - 1;
            for free in 0..=cube {
                let blocks: Vec<u16> = (0..n).filter(|c| free >> c & 1 == 1).map(|c| 1 << c).collect();
                push_anchors(n, &blocks, &mut members);
            }
        }
        FamilyKind::Singleton => push_anchors(n, &[], &mut members),
    }
    members.sort_by(|a, b| {
        b.dim()
            .cmp(&a.dim())
            .then_with(|| a.blocks.cmp(&b.blocks))
            .then_with(|| a.anchor.cmp(&b.anchor))
    });
    Ok(PtopeFamily { n, kind, members })
}

fn gen_structures(n: u8, coord: u8, blocks: &mut Vec<u16>, out: &mut Vec<Parallelotope>) {
    if coord == n {
        push_anchors(n, blocks, out);
        return;
    }
    let bit = 1u16 << coord;
    // coordinate unused
    gen_structures(n, coord + 1, blocks, out);
    // coordinate joins an existing block
    for i in 0..blocks.len() {
        blocks[i] |= bit;
        gen_structures(n, coord + 1, blocks, out);
        blocks[i] &= !bit;
    }
    // coordinate starts a new block
    blocks.push(bit);
    gen_structures(n, coord + 1, blocks, out);
    blocks.pop();
}

fn push_anchors(n: u8, blocks: &[u16], out: &mut Vec<Parallelotope>) {
    let cube = (1u16 << n) - 1;
    let reps = blocks.iter().fold(0u16, |r, &b| r | 1 << block_rep(b));
    let free = cube & !reps;
    let mut anchor = free;
    loop {
        let p = Parallelotope::new(n, anchor, blocks).expect("generated structure is valid");
        debug_assert_eq!(p.anchor(), anchor, "generated anchors are already canonical");
        out.push(p);
        if anchor == 0 {
            break;
        }
        anchor = (anchor - 1) & free;
    }
}

/// Closed-form count of the full family: sum over `m` of (number of ways to
/// partition a subset of the `n` coordinates into `m` nonempty blocks) times
/// `2^(n-m)` canonical anchors. Serves as an analytic cross-check of
/// `enumerate_all`.
pub fn count_formula(n: u8) -> u64 {
    let n = n as usize;
    // Stirling numbers of the second kind, s[j][m].
    let mut s = [[0u64; MAX_VARS as usize + 1]; MAX_VARS as usize + 1];
    s[0][0] = 1;
    for j in 1..=n {
        for m in 1..=j {
            s[j][m] = s[j - 1][m - 1] + m as u64 * s[j - 1][m];
        }
    }
    let mut binom = [[0u64; MAX_VARS as usize + 1]; MAX_VARS as usize + 1];
    for j in 0..=n {
        binom[j][0] = 1;
        for k in 1..=j {
            binom[j][k] = binom[j - 1][k - 1] + if k <= j - 1 { binom[j - 1][k] } else { 0 };
        }
    }
    let mut total = 0u64;
    for m in 0..=n {
        let mut structures = 0u64;
        for j in m..=n {
            structures += binom[n][j] * s[j][m];
        }
        total += structures << (n - m);
    }
    total
}
