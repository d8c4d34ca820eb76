//! Power-conjugate presentations of finite 2-groups and collection.
//!
//! Every generator has relative order 2. The presentation stores, for each
//! generator `g_i`, the normal form of `g_i^2` (supported on indices `> i`)
//! and for each pair `i < j` the normal form of the conjugate `g_j^{g_i}`
//! (supported on indices `> i`). Elements are exponent vectors packed into a
//! `u128`, bit `i` for `g_i`.

use std::fmt;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{low_mask, BitVec, Ones, MAX_WIDTH};

/// Exponent vector of a normal word, bit `i` set iff `g_i` occurs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupElement(pub u128);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(0);

    #[inline]
    pub fn bits(self) -> u128 {
        self.0
    }

    #[inline]
    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    /// Index of the first generator occurring in the normal word.
    #[inline]
    pub fn depth(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    #[inline]
    pub fn has(self, i: usize) -> bool {
        (self.0 >> i) & 1 == 1
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:x}>", self.0)
    }
}

/// One failed overlap test of the consistency sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Generator indices of the overlap, highest first (`k > j > i`, or
    /// repeated indices for the power overlaps).
    pub triple: (usize, usize, usize),
    pub left: String,
    pub right: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, j, i) = self.triple;
        write!(f, "overlap ({k},{j},{i}): {} != {}", self.left, self.right)
    }
}

#[derive(Clone)]
pub struct PcPresentation {
    n: usize,
    names: Vec<String>,
    power: Vec<u128>,
    /// `conj[j * n + i]` for `i < j`.
    conj: Vec<u128>,
    /// For each `k`, the generators `j > k` not commuting with `g_k`.
    noncomm: Vec<u128>,
    inv_gen: Vec<u128>,
}

impl PcPresentation {
    /// Builds a presentation with trivial relations (elementary abelian).
    pub fn elementary_abelian(names: Vec<String>) -> Result<Self> {
        let n = names.len();
        let conj = (0..n * n)
            .map(|idx| {
                let (j, i) = (idx / n, idx % n);
                if i < j {
                    1u128 << j
                } else {
                    0
                }
            })
            .collect();
        Self::from_parts(names, vec![0; n], conj)
    }

    /// `conj` is row-major `n * n` with entry `[j][i]` the normal form of
    /// `g_j^{g_i}` for `i < j`; other entries are ignored.
    pub fn from_parts(names: Vec<String>, power: Vec<u128>, mut conj: Vec<u128>) -> Result<Self> {
        let n = names.len();
        if n > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(n));
        }
        if power.len() != n || conj.len() != n * n {
            return Err(Error::InvalidPresentation("table sizes do not match generator count".into()));
        }
        let full = low_mask(n);
        for i in 0..n {
            if power[i] & !full != 0 || power[i] & low_mask(i + 1) != 0 {
                return Err(Error::InvalidPresentation(format!(
                    "power relation of g{i} must be supported above {i}"
                )));
            }
        }
        for j in 0..n {
            for i in 0..n {
                let w = &mut conj[j * n + i];
                if i >= j {
                    *w = 0;
                    continue;
                }
                if *w & !full != 0 || *w & low_mask(i + 1) != 0 || *w == 0 {
                    return Err(Error::InvalidPresentation(format!(
                        "conjugate of g{j} by g{i} must be nontrivial and supported above {i}"
                    )));
                }
            }
        }
        let noncomm = (0..n)
            .map(|k| {
                (k + 1..n)
                    .filter(|&j| conj[j * n + k] != 1u128 << j)
                    .fold(0u128, |m, j| m | 1u128 << j)
            })
            .collect();
        let mut p = PcPresentation {
            n,
            names,
            power,
            conj,
            noncomm,
            inv_gen: vec![0; n],
        };
        for k in (0..n).rev() {
            let inv_pow = p.inverse(GroupElement(p.power[k]));
            p.inv_gen[k] = p.mul_word(1u128 << k, inv_pow.0);
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn power(&self, i: usize) -> GroupElement {
        GroupElement(self.power[i])
    }

    /// Normal form of `g_j^{g_i}`, `i < j`.
    pub fn conjugate_gen(&self, j: usize, i: usize) -> GroupElement {
        assert!(i < j && j < self.n);
        GroupElement(self.conj[j * self.n + i])
    }

    /// Returns a copy with one power relation replaced.
    pub fn with_power(&self, i: usize, word: GroupElement) -> Result<Self> {
        let mut power = self.power.clone();
        power[i] = word.0;
        Self::from_parts(self.names.clone(), power, self.conj.clone())
    }

    /// Returns a copy with one conjugation relation replaced.
    pub fn with_conjugate(&self, j: usize, i: usize, word: GroupElement) -> Result<Self> {
        let mut conj = self.conj.clone();
        conj[j * self.n + i] = word.0;
        Self::from_parts(self.names.clone(), self.power.clone(), conj)
    }

    /// Validates raw bits as an element of this group.
    pub fn element(&self, bits: u128) -> Result<GroupElement> {
        if bits & !low_mask(self.n) != 0 {
            return Err(Error::WidthMismatch {
                expected: self.n,
                found: 128 - bits.leading_zeros() as usize,
            });
        }
        Ok(GroupElement(bits))
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        assert!(i < self.n);
        GroupElement(1u128 << i)
    }

    pub fn to_bitvec(&self, u: GroupElement) -> BitVec {
        BitVec::from_bits(u.0, self.n).expect("element within width")
    }

    /// Order of the group as a power of two.
    pub fn order_log2(&self) -> usize {
        self.n
    }

    // ------------------------------------------------------------------
    // Collection
    // ------------------------------------------------------------------

    /// Multiplies a normal word on the right by the generator `g_k`.
    fn mul_gen(&self, u: u128, k: usize) -> u128 {
        let bit = 1u128 << k;
        let above = u & !low_mask(k + 1);
        let has_k = u & bit != 0;
        if above & self.noncomm[k] == 0 {
            if !has_k {
                return u | bit;
            }
            let pw = self.power[k];
            if pw == 0 {
                return u ^ bit;
            }
            let below = u & low_mask(k);
            let w = self.mul_word(below, pw);
            return self.mul_word(w, above);
        }
        let below = u & low_mask(k);
        let mut w = if has_k {
            self.mul_word(below, self.power[k])
        } else {
            below | bit
        };
        let row = k;
        for j in Ones::new(above) {
            w = self.mul_word(w, self.conj[j * self.n + row]);
        }
        w
    }

    /// Multiplies `u` on the right by the normal word `w`, letter by letter.
    #[inline]
    fn mul_word(&self, mut u: u128, w: u128) -> u128 {
        let mut rest = w;
        while rest != 0 {
            let l = rest.trailing_zeros() as usize;
            if u & !low_mask(l) == 0 {
                return u | rest;
            }
            u = self.mul_gen(u, l);
            rest &= rest - 1;
        }
        u
    }

    #[inline]
    pub fn mul(&self, u: GroupElement, v: GroupElement) -> GroupElement {
        GroupElement(self.mul_word(u.0, v.0))
    }

    /// Checked multiplication: both operands must fit this presentation.
    pub fn multiply(&self, u: GroupElement, v: GroupElement) -> Result<GroupElement> {
        self.element(u.0)?;
        self.element(v.0)?;
        Ok(self.mul(u, v))
    }

    pub fn inverse(&self, u: GroupElement) -> GroupElement {
        let mut bits = u.0;
        let mut w = 0u128;
        while bits != 0 {
            let k = 127 - bits.leading_zeros() as usize;
            w = self.mul_word(w, self.inv_gen[k]);
            bits ^= 1u128 << k;
        }
        GroupElement(w)
    }

    /// `[u, v] = u^-1 v^-1 u v`.
    pub fn commutator(&self, u: GroupElement, v: GroupElement) -> GroupElement {
        let uv = self.mul(u, v);
        let vu = self.mul(v, u);
        // [u,v] = (vu)^-1 (uv)
        self.mul(self.inverse(vu), uv)
    }

    /// `v^-1 u v`.
    pub fn conjugate(&self, u: GroupElement, v: GroupElement) -> GroupElement {
        self.mul(self.inverse(v), self.mul(u, v))
    }

    pub fn pow(&self, u: GroupElement, mut e: u64) -> GroupElement {
        let mut acc = GroupElement::IDENTITY;
        let mut base = u;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Least power of two `k` with `u^k = 1`.
    pub fn element_order(&self, u: GroupElement) -> u128 {
        let mut k = 1u128;
        let mut w = u;
        while !w.is_identity() {
            w = self.mul(w, w);
            k <<= 1;
        }
        k
    }

    /// Product of a sequence of elements, left to right.
    pub fn product<I: IntoIterator<Item = GroupElement>>(&self, it: I) -> GroupElement {
        it.into_iter().fold(GroupElement::IDENTITY, |acc, g| self.mul(acc, g))
    }

    /// Writes an element as a word over the generator names.
    pub fn format(&self, u: GroupElement) -> String {
        if u.is_identity() {
            return "1".into();
        }
        Ones::new(u.0).map(|i| self.names[i].as_str()).collect::<Vec<_>>().join("*")
    }

    // ------------------------------------------------------------------
    // Consistency
    // ------------------------------------------------------------------

    /// Runs every overlap test; empty iff the presentation is consistent.
    pub fn consistency_check(&self) -> Vec<Violation> {
        use rayon::prelude::*;
        let n = self.n;
        let g = |i: usize| GroupElement(1u128 << i);
        let mut out: Vec<Violation> = (0..n)
            .into_par_iter()
            .flat_map_iter(|k| {
                let mut v = Vec::new();
                let mut check = |t: (usize, usize, usize), l: GroupElement, r: GroupElement| {
                    if l != r {
                        v.push(Violation {
                            triple: t,
                            left: self.format(l),
                            right: self.format(r),
                        });
                    }
                };
                // (g_k g_j) g_i = g_k (g_j g_i)
                for j in 0..k {
                    let kj = self.mul(g(k), g(j));
                    for i in 0..j {
                        let l = self.mul(kj, g(i));
                        let r = self.mul(g(k), self.mul(g(j), g(i)));
                        check((k, j, i), l, r);
                    }
                }
                // (g_k g_k) g_i = g_k (g_k g_i) and (g_k g_i) g_i = g_k (g_i g_i)
                for i in 0..k {
                    let l = self.mul(self.mul(g(k), g(k)), g(i));
                    let r = self.mul(g(k), self.mul(g(k), g(i)));
                    check((k, k, i), l, r);
                    let l = self.mul(self.mul(g(k), g(i)), g(i));
                    let r = self.mul(g(k), self.mul(g(i), g(i)));
                    check((k, i, i), l, r);
                }
                // (g_k g_k) g_k = g_k (g_k g_k)
                let l = self.mul(self.mul(g(k), g(k)), g(k));
                let r = self.mul(g(k), self.mul(g(k), g(k)));
                check((k, k, k), l, r);
                v
            })
            .collect();
        out.sort_by_key(|v| v.triple);
        out
    }

    pub fn ensure_consistent(&self) -> Result<()> {
        let v = self.consistency_check();
        match v.first() {
            None => Ok(()),
            Some(first) => Err(Error::Inconsistent {
                count: v.len(),
                first: first.to_string(),
            }),
        }
    }

    // ------------------------------------------------------------------
    // File format
    // ------------------------------------------------------------------

    /// Writes the `pc2 v1` text format. Conjugation lines appear only for
    /// pairs that do not commute; the hex payload is the normal form of the
    /// conjugate `g_j^{g_i}`, little-end (bit 0 = generator 0).
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "pc2 v1 n={}", self.n)?;
        for i in 0..self.n {
            writeln!(w, "pow {} {:x}", i, self.power[i])?;
        }
        for j in 0..self.n {
            for i in 0..j {
                let c = self.conj[j * self.n + i];
                if c != 1u128 << j {
                    writeln!(w, "conj {} {} {:x}", j, i, c)?;
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads the `pc2 v1` format. Generator names default to `g0, g1, ...`
    /// unless `names` is supplied.
    pub fn read_from<R: BufRead>(r: R, names: Option<Vec<String>>) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty presentation file".into()))??;
        let n: usize = header
            .strip_prefix("pc2 v1 n=")
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad generator count: {e}")))?;
        if n > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(n));
        }
        let names = match names {
            Some(v) if v.len() == n => v,
            Some(v) => {
                return Err(Error::Parse(format!("{} names for {} generators", v.len(), n)));
            }
            None => (0..n).map(|i| format!("g{i}")).collect(),
        };
        let mut power = vec![0u128; n];
        let mut seen_pow = vec![false; n];
        let mut conj: Vec<u128> = (0..n * n).map(|idx| 1u128 << (idx / n)).collect();
        let parse_idx = |s: Option<&str>| -> Result<usize> {
            let v: usize = s
                .ok_or_else(|| Error::Parse("missing index".into()))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad index: {e}")))?;
            if v >= n {
                return Err(Error::Parse(format!("index {v} out of range")));
            }
            Ok(v)
        };
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("pow") => {
                    let i = parse_idx(parts.next())?;
                    let hex = parts.next().ok_or_else(|| Error::Parse("missing payload".into()))?;
                    power[i] = BitVec::from_hex(hex, n)?.bits();
                    seen_pow[i] = true;
                }
                Some("conj") => {
                    let j = parse_idx(parts.next())?;
                    let i = parse_idx(parts.next())?;
                    if i >= j {
                        return Err(Error::Parse(format!("conj {j} {i}: need i < j")));
                    }
                    let hex = parts.next().ok_or_else(|| Error::Parse("missing payload".into()))?;
                    conj[j * n + i] = BitVec::from_hex(hex, n)?.bits();
                }
                _ => return Err(Error::Parse(format!("unrecognised line {line:?}"))),
            }
            if parts.next().is_some() {
                return Err(Error::Parse(format!("trailing data on {line:?}")));
            }
        }
        if let Some(i) = seen_pow.iter().position(|s| !s) {
            return Err(Error::Parse(format!("missing pow line for generator {i}")));
        }
        Self::from_parts(names, power, conj)
    }
}

impl fmt::Debug for PcPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PcPresentation").field("n", &self.n).finish_non_exhaustive()
    }
}

impl PartialEq for PcPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.power == other.power && self.conj == other.conj
    }
}

impl Eq for PcPresentation {}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dihedral group of order 8: a = rotation generator, b = a^2, s = reflection
    /// ordered (s, a, b): a^s = a b, a^2 = b.
    fn d8() -> PcPresentation {
        let names = vec!["s".into(), "a".into(), "b".into()];
        let n = 3;
        let mut conj = vec![0u128; 9];
        conj[n] = 0b110; // a^s = a*b
        conj[2 * n] = 0b100; // b^s = b
        conj[2 * n + 1] = 0b100; // b^a = b
        PcPresentation::from_parts(names, vec![0, 0b100, 0], conj).unwrap()
    }

    #[test]
    fn dihedral_order_8() {
        let p = d8();
        assert!(p.consistency_check().is_empty());
        let a = p.generator(1);
        let s = p.generator(0);
        assert_eq!(p.element_order(a), 4);
        assert_eq!(p.element_order(s), 2);
        // s a s = a^-1 = a^3
        assert_eq!(p.conjugate(a, s), p.pow(a, 3));
        // enumerate: all 8 elements distinct under multiplication table closure
        let all: Vec<GroupElement> = (0..8).map(GroupElement).collect();
        for &x in &all {
            assert_eq!(p.mul(x, p.inverse(x)), GroupElement::IDENTITY);
            for &y in &all {
                for &z in &all {
                    assert_eq!(p.mul(p.mul(x, y), z), p.mul(x, p.mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn corrupted_power_is_detected() {
        // s^2 = a, but s does not commute with a: the overlap (s s) s vs s (s s) breaks.
        let p = d8().with_power(0, GroupElement(0b010)).unwrap();
        assert!(!p.consistency_check().is_empty());
    }

    #[test]
    fn support_constraints_enforced() {
        let p = d8();
        assert!(p.with_power(1, GroupElement(0b010)).is_err());
        assert!(p.with_conjugate(2, 1, GroupElement(0b001)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = d8();
        let txt = p.to_text();
        assert!(txt.starts_with("pc2 v1 n=3\n"));
        let q = PcPresentation::read_from(txt.as_bytes(), None).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.to_text(), txt);
        assert!(PcPresentation::read_from("pc2 v2 n=3\n".as_bytes(), None).is_err());
        assert!(PcPresentation::read_from("pc2 v1 n=1\npow 0 0\nfoo\n".as_bytes(), None).is_err());
    }

    #[test]
    fn element_width_checked() {
        let p = d8();
        assert!(p.element(0b1000).is_err());
        assert!(p.multiply(GroupElement(0b1000), GroupElement(1)).is_err());
    }
}
