//! Subgroups as canonical induced generating sequences.
//!
//! The depth of a nontrivial element is the index of its lowest set bit.
//! Right multiplication by an element of depth `e` flips bit `e` and leaves
//! all lower bits alone, so sifting `u` through members sorted by depth
//! (right-multiplying whenever the member's lead bit is set) is a single
//! ascending pass.

use std::collections::VecDeque;

use serde::Serialize;

use super::{GroupElement, PcPresentation};
use crate::error::{Error, Result};
use crate::gf2::{hyperplane_enum, BitVec, Ones};

/// Largest subgroup `small_intersection_order` will enumerate.
pub const SMALL_LOG2_CAP: usize = 10;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Subgroup {
    rows: Vec<u128>,
}

impl std::fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subgroup(2^{}: leads {:?})", self.rows.len(), self.leads())
    }
}

struct Table {
    slot: [u128; 128],
    leads: u128,
}

impl Table {
    fn new() -> Self {
        Table {
            slot: [0; 128],
            leads: 0,
        }
    }

    fn from_rows(rows: &[u128]) -> Self {
        let mut t = Table::new();
        for &r in rows {
            let d = r.trailing_zeros() as usize;
            t.slot[d] = r;
            t.leads |= 1u128 << d;
        }
        t
    }

    fn sift(&self, pc: &PcPresentation, mut u: u128) -> u128 {
        loop {
            let hit = u & self.leads;
            if hit == 0 {
                return u;
            }
            let d = hit.trailing_zeros() as usize;
            u = pc.mul(GroupElement(u), GroupElement(self.slot[d])).0;
        }
    }

    fn members(&self) -> impl Iterator<Item = u128> + '_ {
        Ones::new(self.leads).map(move |d| self.slot[d])
    }

    /// Fully reduced rows: every member has zero bits at all other leads.
    fn canonical(&self, pc: &PcPresentation) -> Subgroup {
        let mut rows = Vec::with_capacity(self.leads.count_ones() as usize);
        for d in Ones::new(self.leads) {
            let mut u = self.slot[d];
            loop {
                let hit = u & self.leads & !(1u128 << d);
                if hit == 0 {
                    break;
                }
                let e = hit.trailing_zeros() as usize;
                u = pc.mul(GroupElement(u), GroupElement(self.slot[e])).0;
            }
            rows.push(u);
        }
        Subgroup { rows }
    }

    /// Worklist closure: new members bring their square, their commutators
    /// with every member, and their conjugates by `conjugators`.
    fn close(&mut self, pc: &PcPresentation, seed: impl IntoIterator<Item = u128>, conjugators: &[u128]) {
        let mut queue: VecDeque<u128> = seed.into_iter().collect();
        while let Some(g) = queue.pop_front() {
            let r = self.sift(pc, g);
            if r == 0 {
                continue;
            }
            let d = r.trailing_zeros() as usize;
            let re = GroupElement(r);
            queue.push_back(pc.mul(re, re).0);
            for m in self.members() {
                queue.push_back(pc.commutator(re, GroupElement(m)).0);
            }
            for &c in conjugators {
                queue.push_back(pc.conjugate(re, GroupElement(c)).0);
            }
            self.slot[d] = r;
            self.leads |= 1u128 << d;
        }
    }
}

impl Subgroup {
    pub fn trivial() -> Self {
        Subgroup { rows: Vec::new() }
    }

    /// The whole group.
    pub fn full(pc: &PcPresentation) -> Self {
        Subgroup {
            rows: (0..pc.len()).map(|i| 1u128 << i).collect(),
        }
    }

    /// Subgroup generated by `gens`, in canonical form.
    pub fn generated(pc: &PcPresentation, gens: &[GroupElement]) -> Self {
        let mut t = Table::new();
        t.close(pc, gens.iter().map(|g| g.0), &[]);
        t.canonical(pc)
    }

    /// Normal closure of `gens` under conjugation by `conjugators`.
    pub fn normal_closure(pc: &PcPresentation, gens: &[GroupElement], conjugators: &[GroupElement]) -> Self {
        let conj: Vec<u128> = conjugators.iter().map(|g| g.0).collect();
        let mut t = Table::new();
        t.close(pc, gens.iter().map(|g| g.0), &conj);
        t.canonical(pc)
    }

    /// Rebuilds a subgroup from stored canonical rows (checkpoint files).
    /// The rows are re-closed and re-canonicalized, so any IGS is accepted.
    pub fn from_rows(pc: &PcPresentation, rows: &[u128]) -> Self {
        let gens: Vec<GroupElement> = rows.iter().map(|&r| GroupElement(r)).collect();
        Self::generated(pc, &gens)
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn gens(&self) -> Vec<GroupElement> {
        self.rows.iter().map(|&r| GroupElement(r)).collect()
    }

    pub fn order_log2(&self) -> usize {
        self.rows.len()
    }

    /// Order as an integer; `None` for the full 2^128 case.
    pub fn order(&self) -> Option<u128> {
        1u128.checked_shl(self.rows.len() as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn leads(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.trailing_zeros() as usize).collect()
    }

    pub fn lead_mask(&self) -> u128 {
        self.rows.iter().fold(0, |m, r| m | 1u128 << r.trailing_zeros())
    }

    fn table(&self) -> Table {
        Table::from_rows(&self.rows)
    }

    /// Residue of right-sifting `u`; identity iff `u` is a member.
    pub fn sift(&self, pc: &PcPresentation, u: GroupElement) -> GroupElement {
        let mut u = u.0;
        for &r in &self.rows {
            if u >> r.trailing_zeros() & 1 == 1 {
                u = pc.mul(GroupElement(u), GroupElement(r)).0;
            }
        }
        GroupElement(u)
    }

    pub fn contains(&self, pc: &PcPresentation, u: GroupElement) -> bool {
        self.sift(pc, u).is_identity()
    }

    pub fn is_subgroup_of(&self, pc: &PcPresentation, other: &Subgroup) -> bool {
        self.rows.iter().all(|&r| other.contains(pc, GroupElement(r)))
    }

    /// True when every member is normalized by every conjugator.
    pub fn is_normalized_by(&self, pc: &PcPresentation, conjugators: &[GroupElement]) -> bool {
        conjugators.iter().all(|&c| {
            self.rows
                .iter()
                .all(|&r| self.contains(pc, pc.conjugate(GroupElement(r), c)))
        })
    }

    /// Canonical representative of the left coset `uS`.
    pub fn left_coset_rep(&self, pc: &PcPresentation, u: GroupElement) -> GroupElement {
        self.sift(pc, u)
    }

    /// Canonical representative of the right coset `Su`.
    pub fn coset_rep(&self, pc: &PcPresentation, u: GroupElement) -> GroupElement {
        pc.inverse(self.sift(pc, pc.inverse(u)))
    }

    /// All elements, for subgroups of order at most `2^SMALL_LOG2_CAP`.
    pub fn elements(&self, pc: &PcPresentation) -> Result<Vec<GroupElement>> {
        if self.rows.len() > SMALL_LOG2_CAP {
            return Err(Error::SmallTooLarge(self.rows.len()));
        }
        let mut out = vec![GroupElement::IDENTITY];
        for &r in self.rows.iter().rev() {
            let g = GroupElement(r);
            let more: Vec<GroupElement> = out.iter().map(|&e| pc.mul(g, e)).collect();
            out.extend(more);
        }
        Ok(out)
    }

    /// Derived subgroup: normal closure in `self` of member commutators.
    pub fn derived(&self, pc: &PcPresentation) -> Subgroup {
        let mut seed = Vec::new();
        for (a, &u) in self.rows.iter().enumerate() {
            for &v in &self.rows[a + 1..] {
                seed.push(pc.commutator(GroupElement(u), GroupElement(v)));
            }
        }
        Self::normal_closure(pc, &seed, &self.gens())
    }

    /// Frattini subgroup `S' S^2`.
    pub fn frattini(&self, pc: &PcPresentation) -> Subgroup {
        let mut seed = Vec::new();
        for (a, &u) in self.rows.iter().enumerate() {
            let g = GroupElement(u);
            seed.push(pc.mul(g, g));
            for &v in &self.rows[a + 1..] {
                seed.push(pc.commutator(g, GroupElement(v)));
            }
        }
        Self::normal_closure(pc, &seed, &self.gens())
    }

    /// Sifting table mixing `t`'s members at its leads with our members
    /// elsewhere; returns the table and the list of free leads.
    fn mixed(&self, t: &Subgroup) -> (Table, Vec<usize>) {
        let mut table = self.table();
        let t_leads = t.lead_mask();
        for &r in &t.rows {
            table.slot[r.trailing_zeros() as usize] = r;
        }
        let free = Ones::new(table.leads & !t_leads).collect();
        (table, free)
    }

    /// Coordinates of `u t` in `self / t`, indexed by the free leads in
    /// increasing order. `t` must be normal in `self` with elementary
    /// abelian quotient.
    pub fn quotient_coords(&self, pc: &PcPresentation, u: GroupElement, t: &Subgroup) -> Result<BitVec> {
        let (table, free) = self.mixed(t);
        let mut coords = 0u128;
        let mut w = u.0;
        loop {
            let hit = w & table.leads;
            if hit == 0 {
                break;
            }
            let d = hit.trailing_zeros() as usize;
            if let Ok(pos) = free.binary_search(&d) {
                coords |= 1u128 << pos;
            }
            w = pc.mul(GroupElement(w), GroupElement(table.slot[d])).0;
        }
        if w != 0 {
            return Err(Error::NotInSubgroup);
        }
        BitVec::from_bits(coords, free.len())
    }

    /// Rank of `self / frattini(self)`.
    pub fn frattini_rank(&self, pc: &PcPresentation) -> usize {
        self.order_log2() - self.frattini(pc).order_log2()
    }

    /// Kernel of the functional `f` on `self / phi`, where `phi` is the
    /// Frattini subgroup and `f` is indexed like `quotient_coords`.
    pub fn kernel_of(&self, pc: &PcPresentation, phi: &Subgroup, f: u128) -> Subgroup {
        let (table, free) = self.mixed(phi);
        let p = free
            .iter()
            .enumerate()
            .filter(|&(pos, _)| f >> pos & 1 == 1)
            .map(|(_, &d)| d)
            .last()
            .expect("nonzero functional");
        let mp = GroupElement(table.slot[p]);
        let mut out = Table::new();
        for d in Ones::new(table.leads) {
            if d == p {
                continue;
            }
            let mut m = table.slot[d];
            if let Ok(pos) = free.binary_search(&d) {
                if f >> pos & 1 == 1 {
                    m = pc.mul(GroupElement(m), mp).0;
                }
            }
            out.slot[d] = m;
            out.leads |= 1u128 << d;
        }
        out.canonical(pc)
    }

    /// All maximal subgroups, one per nonzero functional on `self / Φ`, in
    /// the order of `hyperplane_enum`.
    pub fn maximal_subgroups(&self, pc: &PcPresentation) -> Result<Vec<Subgroup>> {
        if self.is_trivial() {
            return Ok(Vec::new());
        }
        let phi = self.frattini(pc);
        let rank = self.order_log2() - phi.order_log2();
        Ok(hyperplane_enum(rank)?
            .into_iter()
            .map(|f| self.kernel_of(pc, &phi, f.bits()))
            .collect())
    }

    /// `|t ∩ small|` by enumerating `small`.
    pub fn small_intersection_order(pc: &PcPresentation, t: &Subgroup, small: &Subgroup) -> Result<usize> {
        Ok(small
            .elements(pc)?
            .into_iter()
            .filter(|&e| t.contains(pc, e))
            .count())
    }

    /// Whether `w ∈ A·B`. When `A` is generated by a prefix `g_0..g_{k-1}`
    /// of pc generators this is "clear the prefix bits, then test `B`";
    /// otherwise `A` is enumerated.
    pub fn in_product(pc: &PcPresentation, w: GroupElement, a: &Subgroup, b: &Subgroup) -> Result<bool> {
        let k = a.order_log2();
        let prefix = a.rows.iter().enumerate().all(|(i, &r)| r == 1u128 << i);
        if prefix {
            let mask = if k == 128 { u128::MAX } else { (1u128 << k) - 1 };
            return Ok(b.contains(pc, GroupElement(w.0 & !mask)));
        }
        Ok(a
            .elements(pc)?
            .into_iter()
            .any(|x| b.contains(pc, pc.mul(pc.inverse(x), w))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d8() -> PcPresentation {
        // s, a, b: a^s = ab, a^2 = b, b central
        let n = 3;
        let mut conj = vec![0u128; 9];
        conj[n] = 0b110;
        conj[2 * n] = 0b100;
        conj[2 * n + 1] = 0b100;
        PcPresentation::from_parts(vec!["s".into(), "a".into(), "b".into()], vec![0, 0b100, 0], conj).unwrap()
    }

    #[test]
    fn d8_subgroups() {
        let pc = d8();
        let g = |b| GroupElement(b);
        let full = Subgroup::full(&pc);
        assert_eq!(full.derived(&pc).order_log2(), 1);
        assert_eq!(full.frattini(&pc).order_log2(), 1);
        let max = full.maximal_subgroups(&pc).unwrap();
        assert_eq!(max.len(), 3);
        assert!(max.iter().all(|m| m.order_log2() == 2));
        assert_eq!(Subgroup::generated(&pc, &[g(0b010)]).order_log2(), 2);
        assert_eq!(Subgroup::generated(&pc, &[g(0b001), g(0b010)]), full);
        assert_eq!(Subgroup::generated(&pc, &[]), Subgroup::trivial());
    }

    #[test]
    fn cosets_partition() {
        let pc = d8();
        let s = Subgroup::generated(&pc, &[GroupElement(0b001)]);
        let mut reps: Vec<_> = (0..8u128).map(|u| s.coset_rep(&pc, GroupElement(u))).collect();
        reps.sort();
        reps.dedup();
        assert_eq!(reps.len(), 4);
        for u in 0..8u128 {
            let u = GroupElement(u);
            let rep = s.coset_rep(&pc, u);
            assert!(s.contains(&pc, pc.mul(u, pc.inverse(rep))));
            assert_eq!(s.coset_rep(&pc, rep), rep);
        }
    }
}
