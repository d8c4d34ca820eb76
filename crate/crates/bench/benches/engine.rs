use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixdih_core::calculus::{build_h, build_p};
use mixdih_core::pcgroup::Subgroup;
use mixdih_core::search::stab_subgroup;
use mixdih_core::{GroupElement, PcPresentation};

fn random_pairs(pc: &PcPresentation, n: usize) -> Vec<(GroupElement, GroupElement)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mask = (1u128 << pc.len()) - 1;
    (0..n)
        .map(|_| (GroupElement(rng.gen::<u128>() & mask), GroupElement(rng.gen::<u128>() & mask)))
        .collect()
}

fn collection(c: &mut Criterion) {
    let h = build_h().unwrap();
    let p = build_p(&h).unwrap();
    for (name, pc) in [("collect_h56", &h.group.pc), ("collect_p59", &p.pc)] {
        let pairs = random_pairs(pc, 256);
        c.bench_function(name, |b| {
            b.iter(|| pairs.iter().fold(GroupElement(0), |acc, &(u, v)| pc.mul(acc, pc.mul(u, v))))
        });
    }
    let pairs = random_pairs(&h.group.pc, 256);
    c.bench_function("inverse_h56", |b| {
        b.iter(|| pairs.iter().map(|&(u, _)| h.group.pc.inverse(u).0).fold(0, |a, x| a ^ x))
    });
}

fn subgroups(c: &mut Criterion) {
    let h = build_h().unwrap();
    let p = build_p(&h).unwrap();
    let stab = stab_subgroup(&p, &h);
    c.bench_function("closure_stab", |b| {
        let gens = stab.gens();
        b.iter(|| Subgroup::generated(&p.pc, &gens).order_log2())
    });
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    c.bench_function("closure_random_pair_p59", |b| {
        b.iter_batched(
            || {
                let mask = (1u128 << p.pc.len()) - 1;
                [GroupElement(rng.gen::<u128>() & mask), GroupElement(rng.gen::<u128>() & mask)]
            },
            |gens| Subgroup::generated(&p.pc, &gens).order_log2(),
            BatchSize::SmallInput,
        )
    });
    let full = Subgroup::full(&p.pc);
    c.bench_function("maximal_subgroups_p59", |b| b.iter(|| full.maximal_subgroups(&p.pc).unwrap().len()));
    c.bench_function("frattini_p59", |b| b.iter(|| full.frattini(&p.pc).order_log2()));
}

criterion_group!(benches, collection, subgroups);
criterion_main!(benches);
