use std::collections::BTreeSet;

use mixdih_core::calculus::{build_h, build_p, HGroup, PGroup};
use mixdih_core::pcgroup::Subgroup;
use mixdih_core::search::*;
use mixdih_core::Error;

struct Fixture {
    h: HGroup,
    p: PGroup,
    stab: Subgroup,
    levels: Vec<SearchLevel>,
}

fn fixture() -> &'static Fixture {
    static F: std::sync::OnceLock<Fixture> = std::sync::OnceLock::new();
    F.get_or_init(|| {
        let h = build_h().unwrap();
        let p = build_p(&h).unwrap();
        let stab = stab_subgroup(&p, &h);
        let mut levels = vec![SearchLevel::root(&p.pc, &stab)];
        while levels.last().unwrap().depth < stab.order_log2() {
            let (next, _) = descend(&p.pc, &stab, levels.last().unwrap(), DEFAULT_MAX_SURVIVORS).unwrap();
            levels.push(next);
        }
        Fixture { h, p, stab, levels }
    })
}

#[test]
fn stab_facts() {
    let f = fixture();
    let pc = &f.p.pc;
    assert_eq!(f.stab.order_log2(), 6);
    assert!(f.stab.contains(pc, f.p.embed(f.h.group.x_elem(0))));
    assert!(!f.stab.contains(pc, f.p.r()));
    assert!(f.stab.contains(pc, pc.pow(f.p.r(), 2)));
    let hs = Subgroup::generated(pc, &f.p.h_subgroup_gens(&f.h));
    assert_eq!(Subgroup::small_intersection_order(pc, &hs, &f.stab).unwrap(), 16);
}

#[test]
fn level_shapes() {
    let f = fixture();
    let counts: Vec<usize> = f.levels.iter().map(|l| l.survivors.len()).collect();
    assert_eq!(counts, [1, 2, 2, 12, 48, 128, 0]);
    let meets: Vec<usize> = f.levels.iter().map(|l| l.required_meet).collect();
    assert_eq!(meets, [64, 32, 16, 8, 4, 2, 1]);
    let (_, candidates) = descend(&f.p.pc, &f.stab, &f.levels[0], DEFAULT_MAX_SURVIVORS).unwrap();
    assert_eq!(candidates, 3);
}

#[test]
fn survivors_satisfy_the_meet_and_product_count() {
    let f = fixture();
    let pc = &f.p.pc;
    for level in &f.levels {
        for t in &level.survivors {
            assert_eq!(t.order_log2(), 59 - level.depth);
            let meet = Subgroup::small_intersection_order(pc, t, &f.stab).unwrap();
            assert_eq!(meet, level.required_meet);
            // |T Stab| = |T| |Stab| / |T ∩ Stab| = |P|
            assert_eq!(t.order_log2() + 6 - meet.trailing_zeros() as usize, 59);
        }
    }
}

#[test]
fn children_contain_parent_frattini() {
    let f = fixture();
    let pc = &f.p.pc;
    for k in 0..f.levels.len() - 1 {
        let next: BTreeSet<&Subgroup> = f.levels[k + 1].survivors.iter().collect();
        let mut reached = BTreeSet::new();
        for parent in &f.levels[k].survivors {
            let phi = parent.frattini(pc);
            for m in parent.maximal_subgroups(pc).unwrap() {
                if Subgroup::small_intersection_order(pc, &m, &f.stab).unwrap() == f.levels[k + 1].required_meet {
                    assert!(phi.is_subgroup_of(pc, &m));
                    assert!(m.is_subgroup_of(pc, parent));
                    assert!(next.contains(&m));
                    reached.insert(m);
                }
            }
        }
        assert_eq!(reached.len(), next.len());
    }
}

#[test]
fn dedup_keys_are_sound() {
    let f = fixture();
    let pc = &f.p.pc;
    for level in &f.levels[1..] {
        for t in level.survivors.iter().take(8) {
            let again = Subgroup::generated(pc, &t.gens());
            assert_eq!(&again, t);
            assert!(again.is_subgroup_of(pc, t) && t.is_subgroup_of(pc, &again));
        }
        for pair in level.survivors.windows(2) {
            assert!(!(pair[0].is_subgroup_of(pc, &pair[1]) && pair[1].is_subgroup_of(pc, &pair[0])));
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let f = fixture();
    let config = SearchConfig {
        threads: Some(3),
        ..SearchConfig::default()
    };
    let a = run_search(&f.p.pc, &f.stab, &config, None).unwrap();
    let b = run_search(&f.p.pc, &f.stab, &SearchConfig::default(), None).unwrap();
    assert_eq!(a.levels, b.levels);
    assert!(!a.regular_subgroup_exists);
    assert_eq!(a.verdict, "no regular subgroup");
    assert_eq!(a.final_depth, 6);
    assert_eq!(a.final_survivors, 0);
    let counts: Vec<usize> = a.levels.iter().map(|l| l.survivors).collect();
    assert_eq!(counts, [2, 2, 12, 48, 128, 0]);
}

#[test]
fn trivial_filter_keeps_the_lattice() {
    let f = fixture();
    let trivial = Subgroup::trivial();
    let level = SearchLevel {
        depth: 0,
        required_meet: 2,
        survivors: vec![Subgroup::full(&f.p.pc)],
    };
    let (next, candidates) = descend(&f.p.pc, &trivial, &level, DEFAULT_MAX_SURVIVORS).unwrap();
    assert_eq!(candidates, 3);
    assert_eq!(next.survivors.len(), 3);
}

#[test]
fn budget_abort() {
    let f = fixture();
    let err = descend(&f.p.pc, &f.stab, &f.levels[2], 5).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { depth: 3, cap: 5, .. }));
}

#[test]
fn checkpoints_round_trip_and_resume() {
    let f = fixture();
    let pc = &f.p.pc;
    for level in &f.levels {
        let mut buf = Vec::new();
        level.write_checkpoint(&mut buf).unwrap();
        let back = SearchLevel::read_checkpoint(pc, &f.stab, buf.as_slice()).unwrap();
        assert_eq!(&back, level);
    }
    let dir = std::env::temp_dir().join(format!("mixdih-search-{}", std::process::id()));
    let config = SearchConfig {
        checkpoint_dir: Some(dir.clone()),
        ..SearchConfig::default()
    };
    let full = run_search(pc, &f.stab, &config, None).unwrap();
    let file = std::fs::File::open(checkpoint_path(&dir, 4)).unwrap();
    let start = SearchLevel::read_checkpoint(pc, &f.stab, std::io::BufReader::new(file)).unwrap();
    let resumed = run_search(pc, &f.stab, &SearchConfig::default(), Some(start)).unwrap();
    assert_eq!(resumed.start_depth, 4);
    assert_eq!(resumed.levels[..], full.levels[4..]);
    std::fs::remove_dir_all(&dir).unwrap();

    for bad in ["", "level x count 1\n", "level 1 count 2\n1\n", "level 9 count 0\n", "level 1 count 1\nzz\n"] {
        assert!(SearchLevel::read_checkpoint(pc, &f.stab, bad.as_bytes()).is_err(), "{bad:?}");
    }
}
