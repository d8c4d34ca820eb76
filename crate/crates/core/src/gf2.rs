//! Dense linear algebra over GF(2) on bit-vectors of at most 128 columns.
//!
//! Column `i` of a vector is bit `i` of the backing `u128` (little-end), and
//! column 0 always corresponds to the first pc generator of whatever
//! presentation the vector belongs to.

use std::fmt;

use crate::error::{Error, Result};

/// Maximum supported column count.
pub const MAX_WIDTH: usize = 128;

#[inline]
pub(crate) fn low_mask(width: usize) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

/// Iterator over the set bit positions of a `u128`, lowest first.
#[derive(Clone, Copy, Debug)]
pub struct Ones(u128);

impl Ones {
    #[inline]
    pub fn new(bits: u128) -> Self {
        Ones(bits)
    }
}

impl Iterator for Ones {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Ones {}

/// A fixed-width vector over GF(2). Bits at or beyond `width` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    bits: u128,
    width: u8,
}

impl BitVec {
    pub fn zero(width: usize) -> Self {
        assert!(width <= MAX_WIDTH, "width {width} exceeds {MAX_WIDTH}");
        BitVec {
            bits: 0,
            width: width as u8,
        }
    }

    pub fn unit(index: usize, width: usize) -> Self {
        assert!(index < width, "index {index} out of range for width {width}");
        let mut v = Self::zero(width);
        v.bits = 1u128 << index;
        v
    }

    /// Builds a vector from raw bits, rejecting bits outside the width.
    pub fn from_bits(bits: u128, width: usize) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width));
        }
        if bits & !low_mask(width) != 0 {
            return Err(Error::WidthMismatch {
                expected: width,
                found: 128 - bits.leading_zeros() as usize,
            });
        }
        Ok(BitVec {
            bits,
            width: width as u8,
        })
    }

    /// Parses a `0`/`1` string, column 0 first.
    pub fn parse01(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = 0u128;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1u128 << i,
                _ => return Err(Error::Parse(format!("bad bit character {ch:?} in {s:?}"))),
            }
        }
        Self::from_bits(bits, s.len())
    }

    /// Parses the little-end hex form written by [`BitVec::to_hex`].
    pub fn from_hex(s: &str, width: usize) -> Result<Self> {
        let bits = u128::from_str_radix(s, 16)
            .map_err(|e| Error::Parse(format!("bad hex {s:?}: {e}")))?;
        Self::from_bits(bits, width)
    }

    pub fn to_hex(&self) -> String {
        format!("{:x}", self.bits)
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.width() && (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.width(), "index {i} out of range for width {}", self.width);
        if value {
            self.bits |= 1u128 << i;
        } else {
            self.bits &= !(1u128 << i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.width(), "index {i} out of range for width {}", self.width);
        self.bits ^= 1u128 << i;
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Lowest set column, if any.
    pub fn leading(&self) -> Option<usize> {
        (self.bits != 0).then(|| self.bits.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> Ones {
        Ones(self.bits)
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        self.check_width(other)?;
        Ok(BitVec {
            bits: self.bits ^ other.bits,
            width: self.width,
        })
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> Result<bool> {
        self.check_width(other)?;
        Ok((self.bits & other.bits).count_ones() & 1 == 1)
    }

    fn check_width(&self, other: &BitVec) -> Result<()> {
        if self.width != other.width {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                found: other.width(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// An ordered list of rows sharing one width.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    width: usize,
    rows: Vec<u128>,
}

impl BitMatrix {
    pub fn new(width: usize) -> Self {
        assert!(width <= MAX_WIDTH);
        BitMatrix {
            width,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(width: usize, rows: impl IntoIterator<Item = BitVec>) -> Result<Self> {
        let mut m = Self::new(width);
        for r in rows {
            m.push(r)?;
        }
        Ok(m)
    }

    /// Rows given as raw bits; bits beyond `width` are an error.
    pub fn from_raw(width: usize, rows: impl IntoIterator<Item = u128>) -> Result<Self> {
        let mut m = Self::new(width);
        for bits in rows {
            m.push(BitVec::from_bits(bits, width)?)?;
        }
        Ok(m)
    }

    pub fn identity(width: usize) -> Self {
        BitMatrix {
            width,
            rows: (0..width).map(|i| 1u128 << i).collect(),
        }
    }

    pub fn push(&mut self, row: BitVec) -> Result<()> {
        if row.width() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: row.width(),
            });
        }
        self.rows.push(row.bits());
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec {
            bits: self.rows[i],
            width: self.width as u8,
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = BitVec> + '_ {
        (0..self.rows.len()).map(|i| self.row(i))
    }

    pub fn raw_rows(&self) -> &[u128] {
        &self.rows
    }

    /// Applies the matrix to a column vector given as bits: `y_i = <row_i, x>`.
    pub fn apply_raw(&self, x: u128) -> u128 {
        let mut y = 0u128;
        for (i, &r) in self.rows.iter().enumerate() {
            if (r & x).count_ones() & 1 == 1 {
                y |= 1u128 << i;
            }
        }
        y
    }

    /// Matrix product `self * other` (square-compatible shapes).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.width != other.len() {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: other.len(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|&r| Ones(r).fold(0u128, |acc, k| acc ^ other.rows[k]))
            .collect();
        Ok(BitMatrix {
            width: other.width,
            rows,
        })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Reduced row-echelon form of a row space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub basis: BitMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_mask(&self) -> u128 {
        self.pivots.iter().fold(0u128, |m, &p| m | 1u128 << p)
    }

    /// Reduces raw bits by the pivots; the result has no pivot columns set.
    #[inline]
    pub fn reduce_raw(&self, mut v: u128) -> u128 {
        for (&p, &row) in self.pivots.iter().zip(self.basis.raw_rows()) {
            if (v >> p) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }
}

/// Row rank over GF(2).
pub fn rank(m: &BitMatrix) -> usize {
    echelonize(m).rank()
}

/// Reduced row-echelon basis of the row space; pivots are the lowest set
/// column of each basis row and strictly increase.
pub fn echelonize(m: &BitMatrix) -> Echelon {
    let mut rows: Vec<u128> = m.rows.iter().copied().filter(|&r| r != 0).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m.width {
        let bit = 1u128 << col;
        let Some(found) = (r..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(r, found);
        let pivot_row = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Echelon {
        basis: BitMatrix {
            width: m.width,
            rows,
        },
        pivots,
    }
}

/// Tests `v` against an echelonized basis. Returns membership together with
/// the canonical residue (reduction of `v` by the pivots).
pub fn membership(v: &BitVec, basis: &Echelon) -> Result<(bool, BitVec)> {
    if v.width() != basis.basis.width() {
        return Err(Error::WidthMismatch {
            expected: basis.basis.width(),
            found: v.width(),
        });
    }
    let residue = basis.reduce_raw(v.bits());
    Ok((residue == 0, BitVec::from_bits(residue, v.width())?))
}

/// Standard unit vectors at the non-pivot columns of `sub`, which together
/// with `sub` span the ambient space.
pub fn complement_basis(sub: &Echelon, ambient_dim: usize) -> BitMatrix {
    let pivots = sub.pivot_mask();
    let rows = (0..ambient_dim)
        .filter(|&c| (pivots >> c) & 1 == 0)
        .map(|c| 1u128 << c)
        .collect();
    BitMatrix {
        width: ambient_dim,
        rows,
    }
}

/// All nonzero linear functionals on GF(2)^dim, in increasing numeric order.
pub fn hyperplane_enum(dim: usize) -> Result<Vec<BitVec>> {
    if !(1..=32).contains(&dim) {
        return Err(Error::DimensionOutOfRange(dim));
    }
    Ok((1u128..(1u128 << dim))
        .map(|bits| BitVec {
            bits,
            width: dim as u8,
        })
        .collect())
}
