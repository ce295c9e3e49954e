//! Bitboard primitives for the column/diagonal encoding.
//!
//! Bit `i` of a mask stands for column `i` of the row currently being
//! filled. `cur` holds occupied columns, `left` and `right` hold diagonal
//! threats already shifted onto the next open row.

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

use serde::{Deserialize, Serialize};

/// Largest board the 32-bit encoding supports.
pub const MAX_N: u32 = 32;

/// A 32-bit occupancy mask.
///
/// `cur` and valid-position masks only ever carry the low `n` bits. A
/// left-diagonal mask may carry threats above bit `n - 1`; they fall off the
/// board and are removed by [`valid_positions`].
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
#[repr(transparent)]
pub struct BitMask(pub u32);

impl BitMask {
    pub const EMPTY: BitMask = BitMask(0);

    /// The mask with the low `n` bits set.
    #[inline]
    pub const fn board(n: u32) -> BitMask {
        debug_assert!(n >= 1 && n <= MAX_N);
        BitMask(((1u64 << n) - 1) as u32)
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn count(self) -> u32 {
        self.0.count_ones()
    }

    /// True when no bit at or above position `n` is set.
    #[inline]
    pub const fn fits(self, n: u32) -> bool {
        self.0 & !BitMask::board(n).0 == 0
    }

    /// Iterate the set bits from least to most significant, each as a
    /// single-bit mask.
    pub fn singles(self) -> Singles {
        Singles(self.0)
    }
}

impl fmt::Debug for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMask({:#b})", self.0)
    }
}

impl fmt::LowerHex for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl BitOr for BitMask {
    type Output = BitMask;
    #[inline]
    fn bitor(self, rhs: BitMask) -> BitMask {
        BitMask(self.0 | rhs.0)
    }
}

impl BitAnd for BitMask {
    type Output = BitMask;
    #[inline]
    fn bitand(self, rhs: BitMask) -> BitMask {
        BitMask(self.0 & rhs.0)
    }
}

impl Not for BitMask {
    type Output = BitMask;
    #[inline]
    fn not(self) -> BitMask {
        BitMask(!self.0)
    }
}

/// Iterator returned by [`BitMask::singles`].
#[derive(Clone, Debug)]
pub struct Singles(u32);

impl Iterator for Singles {
    type Item = BitMask;

    #[inline]
    fn next(&mut self) -> Option<BitMask> {
        if self.0 == 0 {
            return None;
        }
        let p = lowest_set_bit(BitMask(self.0));
        self.0 ^= p.0;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Singles {}

/// Attack-free columns of the current row.
#[inline]
pub fn valid_positions(cur: BitMask, left: BitMask, right: BitMask, n: u32) -> BitMask {
    BitMask::board(n) & !(cur | left | right)
}

/// Isolate the least significant set bit (`mask & -mask`).
#[inline]
pub fn lowest_set_bit(mask: BitMask) -> BitMask {
    debug_assert!(!mask.is_empty(), "lowest_set_bit of an empty mask");
    BitMask(mask.0 & mask.0.wrapping_neg())
}

/// Place a queen at single-bit position `p` and advance the diagonal
/// threats to the next row. Bits shifted past bit 31 are discarded.
#[inline]
pub fn apply_placement(
    cur: BitMask,
    left: BitMask,
    right: BitMask,
    p: BitMask,
) -> (BitMask, BitMask, BitMask) {
    debug_assert!(p.count() == 1, "placement must be a single bit");
    debug_assert!((p & (cur | left | right)).is_empty(), "placement on an attacked square");
    (
        cur | p,
        BitMask((left.0 | p.0) << 1),
        BitMask((right.0 | p.0) >> 1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_positions_examples() {
        assert_eq!(valid_positions(BitMask(0), BitMask(0), BitMask(0), 5), BitMask(0b11111));
        assert_eq!(
            valid_positions(BitMask(0b00001), BitMask(0b00010), BitMask(0), 5),
            BitMask(0b11100)
        );
    }

    #[test]
    fn board_mask_extremes() {
        assert_eq!(BitMask::board(1), BitMask(1));
        assert_eq!(BitMask::board(32), BitMask(u32::MAX));
        assert!(BitMask(0b100).fits(3));
        assert!(!BitMask(0b1000).fits(3));
    }

    #[test]
    fn lowest_set_bit_examples() {
        assert_eq!(lowest_set_bit(BitMask(0b01100)), BitMask(0b00100));
        assert_eq!(lowest_set_bit(BitMask(0b00001)), BitMask(0b00001));
        assert_eq!(lowest_set_bit(BitMask(1 << 31)), BitMask(1 << 31));
    }

    #[test]
    fn lowest_set_bit_exhaustive_16_bit() {
        for m in 1u32..=0xFFFF {
            let p = lowest_set_bit(BitMask(m)).0;
            assert!(p.is_power_of_two());
            assert_eq!(m & p, p);
            // nothing below p
            assert_eq!(m & (p - 1), 0);
        }
    }

    #[test]
    #[cfg(debug_assertions)]
    #[should_panic(expected = "empty mask")]
    fn lowest_set_bit_rejects_zero_in_debug() {
        lowest_set_bit(BitMask(0));
    }

    #[test]
    fn apply_placement_examples() {
        let z = BitMask(0);
        assert_eq!(
            apply_placement(z, z, z, BitMask(0b00001)),
            (BitMask(0b00001), BitMask(0b00010), BitMask(0b00000))
        );
        assert_eq!(
            apply_placement(BitMask(0b00001), BitMask(0b00010), z, BitMask(0b00100)),
            (BitMask(0b00101), BitMask(0b01100), BitMask(0b00010))
        );
    }

    #[test]
    fn left_shift_truncates_at_32_bits() {
        let (_, left, _) = apply_placement(BitMask(0), BitMask(0), BitMask(0), BitMask(1 << 31));
        assert_eq!(left, BitMask(0));
    }

    #[test]
    fn singles_ascending() {
        let v: Vec<u32> = BitMask(0b1011_0100).singles().map(|b| b.0).collect();
        assert_eq!(v, vec![0b100, 0b1_0000, 0b10_0000, 0b1000_0000]);
    }

    /// Row-by-row attack check over explicit queen coordinates.
    fn brute_free_columns(queens: &[usize], n: usize) -> u32 {
        let row = queens.len();
        let mut free = 0u32;
        for col in 0..n {
            let ok = queens.iter().enumerate().all(|(r, &c)| {
                c != col && (row - r) != col.abs_diff(c)
            });
            if ok {
                free |= 1 << col;
            }
        }
        free
    }

    #[test]
    fn valid_positions_matches_attack_check_n8() {
        fn walk(
            queens: &mut Vec<usize>,
            masks: (BitMask, BitMask, BitMask),
            n: usize,
            visited: &mut usize,
        ) {
            let (cur, left, right) = masks;
            let valid = valid_positions(cur, left, right, n as u32);
            assert_eq!(valid.0, brute_free_columns(queens, n), "state {queens:?}");
            assert!((valid & (cur | left | right)).is_empty());
            *visited += 1;
            if queens.len() == n {
                return;
            }
            for p in valid.singles() {
                queens.push(p.0.trailing_zeros() as usize);
                walk(queens, apply_placement(cur, left, right, p), n, visited);
                queens.pop();
            }
        }
        let mut visited = 0;
        walk(&mut Vec::new(), (BitMask(0), BitMask(0), BitMask(0)), 8, &mut visited);
        // 1 + 8 + 42 + 140 + 344 + 568 + 550 + 312 + 92 reachable states
        assert_eq!(visited, 2057);
    }
}
