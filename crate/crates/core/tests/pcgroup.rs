use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixdih_core::calculus::{build_h, build_p, build_toy, free_multiply, HGroup, LayeredWord, PGroup};
use mixdih_core::pcgroup::Subgroup;
use mixdih_core::search::stab_subgroup;
use mixdih_core::{Error, GroupElement, PcPresentation};

fn groups() -> &'static (HGroup, PGroup) {
    static G: std::sync::OnceLock<(HGroup, PGroup)> = std::sync::OnceLock::new();
    G.get_or_init(|| {
        let h = build_h().unwrap();
        let p = build_p(&h).unwrap();
        (h, p)
    })
}

fn random_element(pc: &PcPresentation, rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement(rng.gen::<u128>() & ((1u128 << pc.len()) - 1))
}

// toy element <-> F word: x1 x2 y1 y2 c11 c12 c21 c22 -> a, b, c_ij at 4i+j
fn toy_to_free(u: GroupElement) -> LayeredWord {
    let b = u.bits();
    let c = [(4, 0), (5, 1), (6, 4), (7, 5)].iter().fold(0u16, |m, &(bit, ij)| m | (((b >> bit) & 1) as u16) << ij);
    LayeredWord::new((b & 3) as u8, ((b >> 2) & 3) as u8, c, 0)
}

fn free_to_toy(w: &LayeredWord) -> GroupElement {
    let (a, b, c, _) = w.raw();
    assert_eq!(a >> 2, 0);
    assert_eq!(b >> 2, 0);
    let bits = [(4, 0), (5, 1), (6, 4), (7, 5)].iter().fold(0u128, |m, &(bit, ij)| m | (((c >> ij) & 1) as u128) << bit);
    GroupElement(a as u128 | (b as u128) << 2 | bits)
}

#[test]
fn toy_multiplication_matches_free_projection() {
    let toy = build_toy(2).unwrap();
    let pc = &toy.pc;
    for u in 0..256u128 {
        for v in 0..256u128 {
            let (u, v) = (GroupElement(u), GroupElement(v));
            let via_free = free_to_toy(&free_multiply(&toy_to_free(u), &toy_to_free(v)));
            assert_eq!(pc.mul(u, v), via_free);
        }
    }
    let (x1, y1) = (toy.x_elem(0), toy.y_elem(0));
    assert!(pc.mul(x1, x1).is_identity());
    assert_eq!(pc.mul(y1, x1).bits(), 0b1 | 0b100 | 1 << 4);
}

#[test]
fn element_orders() {
    let toy = build_toy(2).unwrap();
    let pc = &toy.pc;
    assert_eq!(pc.element_order(GroupElement::IDENTITY), 1);
    let xy = pc.mul(toy.x_elem(0), toy.y_elem(0));
    assert_eq!(pc.element_order(xy), 4);
    let (_, p) = groups();
    assert_eq!(p.pc.element_order(p.r()), 8);
    let r4 = p.pc.pow(p.r(), 4);
    assert!(p.pc.mul(r4, r4).is_identity());
}

#[test]
fn subgroup_examples() {
    let (h, p) = groups();
    let x = Subgroup::generated(&h.group.pc, &(0..4).map(|i| h.group.x_elem(i)).collect::<Vec<_>>());
    assert_eq!(x.order_log2(), 4);
    let stab = stab_subgroup(p, h);
    assert_eq!(stab.order_log2(), 6);
    assert!(Subgroup::generated(&p.pc, &[GroupElement::IDENTITY]).is_trivial());

    let hs = Subgroup::generated(&p.pc, &p.h_subgroup_gens(h));
    assert!(!hs.contains(&p.pc, p.r()));
    for &g in hs.rows() {
        assert!(hs.contains(&p.pc, GroupElement(g)));
    }
    assert_eq!(Subgroup::small_intersection_order(&p.pc, &Subgroup::full(&p.pc), &stab).unwrap(), 64);
    assert_eq!(Subgroup::small_intersection_order(&p.pc, &hs, &stab).unwrap(), 16);
    assert_eq!(Subgroup::small_intersection_order(&p.pc, &hs, &Subgroup::trivial()).unwrap(), 1);
    assert!(matches!(
        Subgroup::small_intersection_order(&p.pc, &stab, &hs),
        Err(Error::SmallTooLarge(_))
    ));
}

#[test]
fn membership_by_enumeration() {
    let toy = build_toy(2).unwrap();
    let pc = &toy.pc;
    let (x1, y1) = (toy.x_elem(0), toy.y_elem(0));
    let c11 = pc.commutator(x1, y1);
    let s = Subgroup::generated(pc, &[x1, y1, c11]);
    assert_eq!(s.order_log2(), 3);
    // oracle: close {1, x1, y1, c11} under multiplication
    let mut set: HashSet<GroupElement> = [GroupElement::IDENTITY, x1, y1, c11].into();
    loop {
        let more: Vec<_> = set.iter().flat_map(|&a| set.iter().map(move |&b| (a, b))).map(|(a, b)| pc.mul(a, b)).collect();
        let before = set.len();
        set.extend(more);
        if set.len() == before {
            break;
        }
    }
    assert_eq!(set.len(), 8);
    for u in 0..256u128 {
        let u = GroupElement(u);
        assert_eq!(s.contains(pc, u), set.contains(&u));
    }
    assert!(s.contains(pc, pc.mul(x1, y1)));
}

#[test]
fn derived_and_frattini() {
    let toy = build_toy(2).unwrap();
    let pc = &toy.pc;
    let full = Subgroup::full(pc);
    let derived = full.derived(pc);
    assert_eq!(derived.order_log2(), 4);
    assert_eq!(full.frattini(pc), derived);
    assert_eq!(full.frattini_rank(pc), 4);
    let x = Subgroup::generated(pc, &[toy.x_elem(0), toy.x_elem(1)]);
    assert!(x.derived(pc).is_trivial());
    assert!(x.frattini(pc).is_trivial());
    let (_, p) = groups();
    assert_eq!(Subgroup::full(&p.pc).frattini_rank(&p.pc), 2);
}

#[test]
fn maximal_subgroup_counts() {
    let (_, p) = groups();
    let full = Subgroup::full(&p.pc);
    let max = full.maximal_subgroups(&p.pc).unwrap();
    assert_eq!(max.len(), 3);
    let toy = build_toy(2).unwrap();
    let tmax = Subgroup::full(&toy.pc).maximal_subgroups(&toy.pc).unwrap();
    assert_eq!(tmax.len(), 15);
    assert!(tmax.iter().all(|m| m.order_log2() == 7));
    let c2 = Subgroup::generated(&toy.pc, &[toy.x_elem(0)]);
    assert_eq!(c2.maximal_subgroups(&toy.pc).unwrap(), vec![Subgroup::trivial()]);
}

#[test]
fn quotient_coordinates() {
    let (h, _) = groups();
    let pc = &h.group.pc;
    let full = Subgroup::full(pc);
    let derived = full.derived(pc);
    let x1 = h.group.x_elem(0);
    let y1 = h.group.y_elem(0);
    let e = full.quotient_coords(pc, x1, &derived).unwrap();
    assert_eq!(e.width(), 8);
    assert_eq!(e.count_ones(), 1);
    let f = full.quotient_coords(pc, y1, &derived).unwrap();
    let both = full.quotient_coords(pc, pc.mul(x1, y1), &derived).unwrap();
    assert_eq!(both, e.xor(&f).unwrap());
    assert_eq!(both.count_ones(), 2);
    let c = pc.commutator(x1, y1);
    assert!(full.quotient_coords(pc, c, &derived).unwrap().is_zero());
    let x = Subgroup::generated(pc, &[x1]);
    assert!(matches!(x.quotient_coords(pc, y1, &Subgroup::trivial()), Err(Error::NotInSubgroup)));
}

#[test]
fn coset_reps_partition_toy() {
    let toy = build_toy(2).unwrap();
    let pc = &toy.pc;
    for gens in [&toy.x, &toy.y] {
        let s = Subgroup::generated(pc, &gens.iter().map(|&i| pc.generator(i)).collect::<Vec<_>>());
        let elems = s.elements(pc).unwrap();
        let mut reps = HashSet::new();
        for u in 0..256u128 {
            let u = GroupElement(u);
            let rep = s.coset_rep(pc, u);
            assert_eq!(s.coset_rep(pc, rep), rep);
            // same right coset
            assert!(s.contains(pc, pc.mul(u, pc.inverse(rep))));
            for &e in &elems {
                assert_eq!(s.coset_rep(pc, pc.mul(e, u)), rep);
            }
            reps.insert(rep);
        }
        assert_eq!(reps.len() << s.order_log2(), 256);
        for &e in &elems {
            assert!(s.coset_rep(pc, e).is_identity());
        }
    }
}

#[test]
fn corrupted_presentations_are_caught() {
    let toy = build_toy(2).unwrap();
    let pc = &toy.pc;
    // y1^x1 = y1 c11 becomes y1 y2 c11
    let w = GroupElement(pc.conjugate_gen(2, 0).bits() ^ (1 << 3));
    let bad = pc.with_conjugate(2, 0, w).unwrap();
    assert!(!bad.consistency_check().is_empty());

    let (h, _) = groups();
    let hp = &h.group.pc;
    assert!(hp.consistency_check().is_empty());
    let w = GroupElement(hp.conjugate_gen(4, 0).bits() ^ (1 << 9));
    let bad = hp.with_conjugate(4, 0, w).unwrap();
    let v = bad.consistency_check();
    assert!(!v.is_empty());
    assert!(!v[0].to_string().is_empty());
}

#[test]
fn presentation_files_round_trip() {
    let (h, p) = groups();
    let toy = build_toy(2).unwrap();
    for pc in [&h.group.pc, &p.pc, &toy.pc] {
        let text = pc.to_text();
        let back = PcPresentation::read_from(text.as_bytes(), Some(pc.names().to_vec())).unwrap();
        assert_eq!(&back, pc);
        assert_eq!(back.to_text(), text);
    }
    assert_eq!(build_h().unwrap().group.pc.to_text(), h.group.pc.to_text());
    assert!(PcPresentation::read_from("pc2 v1 n=2\npow 0 0\n".as_bytes(), None).is_err());
    assert!(PcPresentation::read_from("pc2 v2 n=2\n".as_bytes(), None).is_err());
}

#[test]
fn collection_associativity_samples() {
    let (h, p) = groups();
    let toy = build_toy(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for pc in [&h.group.pc, &p.pc, &toy.pc] {
        for _ in 0..10_000 {
            let (a, b, c) = (random_element(pc, &mut rng), random_element(pc, &mut rng), random_element(pc, &mut rng));
            assert_eq!(pc.mul(pc.mul(a, b), c), pc.mul(a, pc.mul(b, c)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_is_order_insensitive(seed in any::<u64>(), count in 1usize..5) {
        let (_, p) = groups();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gens: Vec<_> = (0..count).map(|_| random_element(&p.pc, &mut rng)).collect();
        let a = Subgroup::generated(&p.pc, &gens);
        gens.reverse();
        gens.push(GroupElement::IDENTITY);
        let b = Subgroup::generated(&p.pc, &gens);
        prop_assert_eq!(a.rows(), b.rows());
        for g in &gens {
            prop_assert!(a.contains(&p.pc, *g));
        }
    }

    #[test]
    fn maximal_subgroups_of_random_subgroups(seed in any::<u64>()) {
        let (_, p) = groups();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<_> = (0..3).map(|_| random_element(&p.pc, &mut rng)).collect();
        let t = Subgroup::generated(&p.pc, &gens);
        let phi = t.frattini(&p.pc);
        let max = t.maximal_subgroups(&p.pc).unwrap();
        prop_assert_eq!(max.len(), (1usize << t.frattini_rank(&p.pc)) - 1);
        let distinct: HashSet<_> = max.iter().cloned().collect();
        prop_assert_eq!(distinct.len(), max.len());
        for m in &max {
            prop_assert_eq!(m.order_log2() + 1, t.order_log2());
            prop_assert!(phi.is_subgroup_of(&p.pc, m));
            prop_assert!(m.is_subgroup_of(&p.pc, &t));
            prop_assert!(m.is_normalized_by(&p.pc, &t.gens()));
        }
    }

    #[test]
    fn collection_associative_in_p(seed in any::<u64>()) {
        let (_, p) = groups();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (random_element(&p.pc, &mut rng), random_element(&p.pc, &mut rng), random_element(&p.pc, &mut rng));
        prop_assert_eq!(p.pc.mul(p.pc.mul(a, b), c), p.pc.mul(a, p.pc.mul(b, c)));
        prop_assert!(p.pc.mul(a, p.pc.inverse(a)).is_identity());
    }
}
