//! Named verification checks shared by the command line and the acceptance
//! test target.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{
    build_h, build_p, build_toy, free_multiply, relation_space, HGroup, LayeredWord, MixedDihedral, PGroup, SIGMA,
    TOY_DIM,
};
use crate::error::{Error, Result};
use crate::graphs::{
    coset_cliques, edge_regular_check, gamma_graph, line_graph, maximal_cliques, normal_quotient, phi_map,
    sigma_automorphism, sigma_graph, sigma_orbits, sigma_translations, two_arc_orbit_count,
    verify_phi_isomorphism, ActionGens,
};
use crate::morphisms::{
    automorphism_order, aut_hypotheses_report, closure, conj_relations_check, extend, inverse, named_maps,
    orbit_on_s, pointwise_stabilizer_of_x, power, toy_automorphism_maps, AutGroup, VerifiedAutomorphism, CLOSURE_CAP, GL42,
};
use crate::pcgroup::{GroupElement, PcPresentation, Subgroup};
use crate::search::{descend, run_search, stab_subgroup, SearchConfig, SearchLevel};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 0x5eed_2026;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
    pub claim: String,
}

impl Check {
    fn new(name: &str, claim: &str, expected: impl Into<String>, actual: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            expected: expected.into(),
            actual: actual.into(),
            claim: claim.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub engine_version: String,
    pub target: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub failed: usize,
    /// Seconds per check; the only field that varies between runs.
    pub timings: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub search: SearchConfig,
    pub assoc_samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: DEFAULT_SEED,
            search: SearchConfig::default(),
            assoc_samples: 10_000,
        }
    }
}

/// The three groups every check runs against.
pub struct Built {
    pub h: HGroup,
    pub p: PGroup,
    pub toy: MixedDihedral,
    k: OnceLock<std::result::Result<(Autos, AutGroup), String>>,
}

impl Built {
    pub fn new() -> Result<Self> {
        let h = build_h()?;
        let p = build_p(&h)?;
        Ok(Built {
            h,
            p,
            toy: build_toy(TOY_DIM)?,
            k: OnceLock::new(),
        })
    }

    fn hpc(&self) -> &PcPresentation {
        &self.h.group.pc
    }

    fn x_sub(&self) -> Subgroup {
        gens_sub(&self.h.group, &self.h.group.x)
    }

    fn y_sub(&self) -> Subgroup {
        gens_sub(&self.h.group, &self.h.group.y)
    }
}

fn gens_sub(g: &MixedDihedral, idx: &[usize]) -> Subgroup {
    Subgroup::generated(&g.pc, &idx.iter().map(|&i| g.pc.generator(i)).collect::<Vec<_>>())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// One acceptance criterion: a check plus its time budget.
pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub budget_secs: f64,
    pub run: fn(&Built, &Options) -> Result<Check>,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "group_orders", budget_secs: 5.0, run: check_orders },
        Criterion { id: 2, name: "structure", budget_secs: 5.0, run: check_structure },
        Criterion { id: 3, name: "consistency", budget_secs: 60.0, run: check_consistency },
        Criterion { id: 4, name: "automorphisms", budget_secs: 30.0, run: check_automorphisms },
        Criterion { id: 5, name: "non_extending_maps", budget_secs: 10.0, run: check_negative },
        Criterion { id: 6, name: "k_structure", budget_secs: 60.0, run: check_k },
        Criterion { id: 7, name: "aut_hypotheses", budget_secs: 1.0, run: check_hypotheses },
        Criterion { id: 8, name: "regular_subgroup_search", budget_secs: 1800.0, run: check_search },
        Criterion { id: 9, name: "toy_graph_suite", budget_secs: 30.0, run: check_toy_graphs },
        Criterion { id: 10, name: "property_suites", budget_secs: 60.0, run: check_properties },
    ]
}

fn run_one(name: &str, f: impl FnOnce() -> Result<Check>) -> (Check, f64) {
    let clock = Instant::now();
    let check = f().unwrap_or_else(|e| Check::new(name, "", "no error", format!("error: {e}"), false));
    (check, clock.elapsed().as_secs_f64())
}

/// Runs a list of checks into a report.
fn assemble(target: &str, opts: &Options, items: Vec<(Check, f64)>) -> VerificationReport {
    let mut timings = BTreeMap::new();
    let mut checks = Vec::new();
    for (c, t) in items {
        timings.insert(c.name.clone(), t);
        checks.push(c);
    }
    VerificationReport {
        engine_version: ENGINE_VERSION.into(),
        target: target.into(),
        seed: opts.seed,
        failed: checks.iter().filter(|c| !c.passed).count(),
        checks,
        timings,
    }
}

/// Full suite for the 4-dimensional groups: every acceptance criterion.
pub fn verify_full(built: &Built, target: &str, opts: &Options) -> VerificationReport {
    let items = criteria()
        .into_iter()
        .map(|c| run_one(c.name, || (c.run)(built, opts)))
        .collect();
    assemble(target, opts, items)
}

/// Suite for the toy group alone.
pub fn verify_toy(toy: &MixedDihedral, opts: &Options) -> VerificationReport {
    let items = vec![
        run_one("toy_order", || {
            let n = toy.pc.order_log2();
            Ok(Check::new("toy_order", "|toy| = 2^8", "8", n.to_string(), n == 8))
        }),
        run_one("toy_consistency", || {
            let v = toy.pc.consistency_check().len();
            Ok(Check::new("toy_consistency", "no overlap violations", "0", v.to_string(), v == 0))
        }),
        run_one("toy_structure", || toy_structure(toy)),
        run_one("toy_graph_suite", || toy_graph_suite(toy)),
        run_one("toy_properties", || {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let a = associativity(&toy.pc, opts.assoc_samples, &mut rng);
            let s = shuffle_canonical(&toy.pc, 20, &mut rng);
            let m = maximal_counts(&toy.pc, &[Subgroup::full(&toy.pc)]);
            let ok = a && s && m;
            Ok(Check::new(
                "toy_properties",
                "associativity, IGS canonicality, maximal subgroup counts",
                "all hold",
                format!("assoc {} shuffle {} maximal {}", yes(a), yes(s), yes(m)),
                ok,
            ))
        }),
    ];
    assemble("toy2", opts, items)
}

pub fn check_orders(b: &Built, _: &Options) -> Result<Check> {
    let rank = relation_space()?.rank();
    let h = b.hpc().order_log2();
    let p = b.p.pc.order_log2();
    let gh = Subgroup::generated(b.hpc(), &b.h.group.defining().iter().map(|&i| b.hpc().generator(i)).collect::<Vec<_>>());
    let mut pgens = b.p.h_subgroup_gens(&b.h);
    pgens.push(b.p.r());
    let gp = Subgroup::generated(&b.p.pc, &pgens);
    let ok = rank == 16 && h == 56 && p == 59 && gh.order_log2() == 56 && gp.order_log2() == 59;
    Ok(Check::new(
        "group_orders",
        "|H| = 2^56 and |P| = 8|H| = 2^59",
        "relation rank 16, |H| = 2^56, |P| = 2^59, both generated by their defining generators",
        format!(
            "relation rank {rank}, |H| = 2^{h}, |P| = 2^{p}, <X0,Y0> = 2^{}, <X0,Y0,r> = 2^{}",
            gh.order_log2(),
            gp.order_log2()
        ),
        ok,
    ))
}

fn is_elementary_abelian(pc: &PcPresentation, s: &Subgroup) -> bool {
    s.derived(pc).is_trivial() && s.gens().iter().all(|&g| pc.mul(g, g).is_identity())
}

pub fn check_structure(b: &Built, _: &Options) -> Result<Check> {
    let pc = b.hpc();
    let full = Subgroup::full(pc);
    let derived = full.derived(pc);
    let abelianization_rank = 56 - derived.order_log2();
    let elementary_quotient = full.frattini(pc) == derived;
    let derived_elem = is_elementary_abelian(pc, &derived);
    let (x, y) = (b.x_sub(), b.y_sub());
    let xy_ok = x.order_log2() == 4
        && y.order_log2() == 4
        && is_elementary_abelian(pc, &x)
        && is_elementary_abelian(pc, &y)
        && Subgroup::small_intersection_order(pc, &x, &y)? == 1;
    let ppc = &b.p.pc;
    let h_in_p = Subgroup::generated(ppc, &b.p.h_subgroup_gens(&b.h));
    let normal = h_in_p.order_log2() == 56 && h_in_p.is_normalized_by(ppc, &[b.p.r()]) && !h_in_p.contains(ppc, b.p.r());
    let r_order = ppc.element_order(b.p.r());
    let r2 = ppc.generator(1);
    let r2_action = (0..4).all(|i| {
        let xi = b.p.embed(b.h.group.x_elem(i));
        ppc.conjugate(xi, r2) == b.p.embed(b.h.group.x_elem(SIGMA[i]))
    });
    let ok = abelianization_rank == 8
        && elementary_quotient
        && derived.order_log2() == 48
        && derived_elem
        && xy_ok
        && normal
        && r_order == 8
        && r2_action;
    Ok(Check::new(
        "structure",
        "H/H' = C2^8, H' elementary abelian of order 2^48, X = Y = C2^4, H normal in P, |r| = 8, x_i^(r^2) = x_(i sigma)",
        "rank 8, |H'| = 2^48 elementary abelian, X and Y elementary abelian of order 16 meeting trivially, H normal, |r| = 8, r^2 acts as sigma",
        format!(
            "rank {abelianization_rank} (Phi = H': {}), |H'| = 2^{} elementary abelian: {}, X/Y ok: {}, H normal: {}, |r| = {r_order}, r^2 acts as sigma: {}",
            yes(elementary_quotient),
            derived.order_log2(),
            yes(derived_elem),
            yes(xy_ok),
            yes(normal),
            yes(r2_action)
        ),
        ok,
    ))
}

pub fn check_consistency(b: &Built, _: &Options) -> Result<Check> {
    let counts: Vec<usize> = [b.hpc(), &b.p.pc, &b.toy.pc]
        .iter()
        .map(|pc| pc.consistency_check().len())
        .collect();
    Ok(Check::new(
        "consistency",
        "every overlap of the pc presentations collects to a single normal form",
        "violations h56 0, p59 0, toy2 0",
        format!("violations h56 {}, p59 {}, toy2 {}", counts[0], counts[1], counts[2]),
        counts.iter().all(|&c| c == 0),
    ))
}

struct Autos {
    alpha1: VerifiedAutomorphism,
    alpha2: VerifiedAutomorphism,
    beta1: VerifiedAutomorphism,
    beta2: VerifiedAutomorphism,
    r: VerifiedAutomorphism,
}

fn autos(b: &Built) -> Result<Autos> {
    let g = &b.h.group;
    let m = named_maps(g);
    Ok(Autos {
        alpha1: extend(g, &m.alpha1)?,
        alpha2: extend(g, &m.alpha2)?,
        beta1: extend(g, &m.beta1)?,
        beta2: extend(g, &m.beta2)?,
        r: extend(g, &m.r)?,
    })
}

pub fn check_automorphisms(b: &Built, _: &Options) -> Result<Check> {
    let g = &b.h.group;
    let a = autos(b)?;
    let orders: Vec<usize> = [&a.alpha1, &a.alpha2, &a.beta1, &a.beta2, &a.r]
        .iter()
        .map(|f| automorphism_order(g, f, 1000).unwrap_or(0))
        .collect();
    let cubes = power(g, &a.alpha1, 3).full_images() == inverse(g, &a.beta1).full_images()
        && power(g, &a.alpha2, 3).full_images() == inverse(g, &a.beta2).full_images();
    let conj = conj_relations_check(g, &a.alpha1, &a.alpha2, &a.r);
    // the r-map must agree with conjugation by r inside P
    let ppc = &b.p.pc;
    let matches_p = (0..g.pc.len()).all(|i| {
        let u = b.p.embed(g.pc.generator(i));
        b.p.restrict(ppc.conjugate(u, b.p.r())) == Some(a.r.image_of_gen(i))
    });
    let ok = orders == [15, 15, 5, 5, 8] && cubes && conj && matches_p;
    Ok(Check::new(
        "automorphisms",
        "alpha1, alpha2, beta1, beta2 and conjugation by r extend to automorphisms; alpha_i^3 = beta_i^-1; alpha1^r = alpha2, alpha2^r = alpha1^2",
        "orders [15, 15, 5, 5, 8], cubes ok, conjugation relations ok",
        format!(
            "orders {orders:?}, cubes {}, conjugation relations {}, r-map equals conjugation in P {}",
            yes(cubes),
            yes(conj),
            yes(matches_p)
        ),
        ok,
    ))
}

pub fn check_negative(b: &Built, _: &Options) -> Result<Check> {
    let g = &b.h.group;
    let m = named_maps(g);
    let describe = |r: Result<VerifiedAutomorphism>| match r {
        Ok(_) => ("extends".to_string(), false),
        Err(e @ Error::NotHomomorphism { .. }) => (e.to_string(), true),
        Err(e) => (e.to_string(), false),
    };
    let (s, s_ok) = describe(extend(g, &m.sigma1));
    let (t, t_ok) = describe(extend(g, &m.r4_on_x));
    Ok(Check::new(
        "non_extending_maps",
        "sigma1 and (r^4)^X do not induce automorphisms",
        "both NotHomomorphism",
        format!("sigma1: {s}; (r^4)^X: {t}"),
        s_ok && t_ok,
    ))
}

/// `K = <α1, α2, r>`, computed once per `Built`.
fn k_group(b: &Built) -> Result<&(Autos, AutGroup)> {
    b.k.get_or_init(|| {
        let a = autos(b).map_err(|e| e.to_string())?;
        let k = closure(&b.h.group, &[a.alpha1.clone(), a.alpha2.clone(), a.r.clone()], CLOSURE_CAP)
            .map_err(|e| e.to_string())?;
        Ok((a, k))
    })
    .as_ref()
    .map_err(|e| Error::Config(e.clone()))
}

pub fn check_k(b: &Built, _: &Options) -> Result<Check> {
    let g = &b.h.group;
    let (a, k) = k_group(b)?;
    let orbits = orbit_on_s(g, &k.generators)?;
    let sizes: Vec<usize> = orbits.iter().map(Vec::len).collect();
    let stab = pointwise_stabilizer_of_x(g, k);
    let has_alpha2 = stab.elements.iter().any(|f| f.full_images() == a.alpha2.full_images());
    let ok = k.order() == 1800 && sizes == [30] && stab.order() == 15 && has_alpha2;
    Ok(Check::new(
        "k_structure",
        "K = <alpha1, alpha2, r> = (C15 x C15) : C8 is transitive on S with K_(X) = <alpha2>",
        "|K| = 1800, orbits on S [30], |K_(X)| = 15 containing alpha2",
        format!(
            "|K| = {}, orbits on S {sizes:?}, |K_(X)| = {}, contains alpha2 {}",
            k.order(),
            stab.order(),
            yes(has_alpha2)
        ),
        ok,
    ))
}

pub fn check_hypotheses(b: &Built, _: &Options) -> Result<Check> {
    let (_, k) = k_group(b)?;
    let r = aut_hypotheses_report(&b.h.group, k)?;
    Ok(Check::new(
        "aut_hypotheses",
        "K is transitive on S, K_(X) is nontrivial, and K does not contain Aut(X) x Aut(Y)",
        format!("all hold, |K| = 1800 < {}", GL42 * GL42),
        format!(
            "transitive {}, |K_(X)| = {}, |GL(4,2)|^2 does not divide |K| {}, |K| = {}",
            yes(r.transitive_on_s),
            r.pointwise_stabilizer_order,
            yes(r.excludes_full_linear),
            r.order
        ),
        r.all_hold() && (r.order as u128) < GL42 * GL42,
    ))
}

pub fn check_search(b: &Built, opts: &Options) -> Result<Check> {
    let stab = stab_subgroup(&b.p, &b.h);
    let report = run_search(&b.p.pc, &stab, &opts.search, None)?;
    let counts: Vec<usize> = report.levels.iter().map(|l| l.survivors).collect();
    Ok(Check::new(
        "regular_subgroup_search",
        "P has no subgroup of order 2^53 meeting X:<r^2> trivially, so Sigma is not a Cayley graph",
        "|Stab| = 2^6, zero survivors at depth 6",
        format!(
            "|Stab| = 2^{}, survivors per depth {counts:?}, verdict: {}",
            stab.order_log2(),
            report.verdict
        ),
        stab.order_log2() == 6 && report.final_depth == 6 && !report.regular_subgroup_exists,
    ))
}

pub fn check_toy_graphs(b: &Built, _: &Options) -> Result<Check> {
    toy_graph_suite(&b.toy)
}

fn toy_structure(toy: &MixedDihedral) -> Result<Check> {
    let pc = &toy.pc;
    let full = Subgroup::full(pc);
    let d = full.derived(pc);
    let phi = full.frattini(pc);
    let max = full.maximal_subgroups(pc)?.len();
    let ok = d.order_log2() == 4 && phi == d && max == 15;
    Ok(Check::new(
        "toy_structure",
        "toy H' = Phi(toy) of order 2^4 and 15 maximal subgroups",
        "|H'| = 2^4, Phi = H', 15 maximal",
        format!("|H'| = 2^{}, Phi = H' {}, {max} maximal", d.order_log2(), yes(phi == d)),
        ok,
    ))
}

/// All toy graph facts in one check.
pub fn toy_graph_suite(g: &MixedDihedral) -> Result<Check> {
    let pc = &g.pc;
    let gamma = gamma_graph(g)?;
    let gamma_ok = gamma.vertex_count() == 256 && gamma.regular_degree() == Some(6) && gamma.is_connected();
    let sigma = sigma_graph(g)?;
    let s = &sigma.graph;
    let sigma_ok = s.vertex_count() == 128
        && s.regular_degree() == Some(4)
        && s.respects_bipartition()
        && s.edge_count() == 256
        && !s.has_triangle();
    let translations = ActionGens::new(s, sigma_translations(g, &sigma))?;
    let edge_regular = edge_regular_check(s, &translations, 1 << pc.len());
    let line = line_graph(s)?;
    let phi = phi_map(g, &sigma)?;
    let phi_ok = verify_phi_isomorphism(&gamma, &line, &phi);
    let derived = Subgroup::full(pc).derived(pc);
    let (q, cover) = normal_quotient(s, &sigma_orbits(g, &sigma, &derived));
    let quotient_ok = q.vertex_count() == 8 && q.regular_degree() == Some(4) && q.is_complete_bipartite() && cover;
    let autos: Vec<VerifiedAutomorphism> = toy_automorphism_maps(g)
        .iter()
        .map(|m| extend(g, m))
        .collect::<Result<_>>()?;
    let all = translations.extended(s, autos.iter().map(|f| sigma_automorphism(g, &sigma, f)).collect())?;
    let arcs = two_arc_orbit_count(s, &all);
    let cliques_ok = maximal_cliques(&gamma)? == coset_cliques(g)?;
    let ok = gamma_ok && sigma_ok && edge_regular && phi_ok && quotient_ok && arcs == 1 && cliques_ok;
    Ok(Check::new(
        "toy_graph_suite",
        "Gamma(toy) = Cay(H, S) 6-regular; Sigma(toy) bipartite 4-regular with H regular on edges; Gamma = L(Sigma); Sigma/H' = K_{4,4} as a cover; 2-arc-transitive under H : A(H,X,Y)",
        "Gamma 256 6-regular connected; Sigma 128 4-regular bipartite |E| 256 edge-regular; phi iso; quotient K_{4,4} cover; 1 two-arc orbit; maximal cliques = cosets",
        format!(
            "Gamma {} vertices deg {:?} connected {}; Sigma {} vertices deg {:?} |E| {} bipartite {} edge-regular {}; phi iso {}; quotient {} vertices K44 {} cover {}; two-arc orbits {arcs}; cliques = cosets {}",
            gamma.vertex_count(),
            gamma.regular_degree(),
            yes(gamma.is_connected()),
            s.vertex_count(),
            s.regular_degree(),
            s.edge_count(),
            yes(s.respects_bipartition()),
            yes(edge_regular),
            yes(phi_ok),
            q.vertex_count(),
            yes(q.is_complete_bipartite()),
            yes(cover),
            yes(cliques_ok)
        ),
        ok,
    ))
}

fn random_element(pc: &PcPresentation, rng: &mut impl Rng) -> GroupElement {
    let n = pc.len();
    let mask = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    GroupElement(rng.gen::<u128>() & mask)
}

/// `(ab)c = a(bc)` on random triples.
pub fn associativity(pc: &PcPresentation, samples: usize, rng: &mut impl Rng) -> bool {
    (0..samples).all(|_| {
        let (a, b, c) = (random_element(pc, rng), random_element(pc, rng), random_element(pc, rng));
        pc.mul(pc.mul(a, b), c) == pc.mul(a, pc.mul(b, c))
    })
}

fn random_word(rng: &mut impl Rng) -> LayeredWord {
    LayeredWord::from_bits(rng.gen::<u128>() & ((1u128 << 72) - 1))
}

pub fn free_associativity(samples: usize, rng: &mut impl Rng) -> bool {
    (0..samples).all(|_| {
        let (a, b, c) = (random_word(rng), random_word(rng), random_word(rng));
        free_multiply(&free_multiply(&a, &b), &c) == free_multiply(&a, &free_multiply(&b, &c))
    })
}

/// Shuffled generator lists give identical canonical sequences.
pub fn shuffle_canonical(pc: &PcPresentation, trials: usize, rng: &mut impl Rng) -> bool {
    (0..trials).all(|_| {
        let k = rng.gen_range(1..=4);
        let mut gens: Vec<GroupElement> = (0..k).map(|_| random_element(pc, rng)).collect();
        let base = Subgroup::generated(pc, &gens);
        (0..4).all(|_| {
            gens.shuffle(rng);
            let mut more = gens.clone();
            // a redundant product must not change the answer either
            more.push(pc.mul(gens[0], *gens.last().unwrap()));
            Subgroup::generated(pc, &gens) == base && Subgroup::generated(pc, &more) == base
        })
    })
}

/// `2^rank - 1` maximal subgroups, each of index 2 and containing `Φ`.
pub fn maximal_counts(pc: &PcPresentation, subgroups: &[Subgroup]) -> bool {
    subgroups.iter().all(|s| {
        let phi = s.frattini(pc);
        let rank = s.order_log2() - phi.order_log2();
        let Ok(max) = s.maximal_subgroups(pc) else { return false };
        let mut distinct = max.clone();
        distinct.sort();
        distinct.dedup();
        max.len() == (1usize << rank) - 1
            && distinct.len() == max.len()
            && max
                .iter()
                .all(|m| m.order_log2() + 1 == s.order_log2() && phi.is_subgroup_of(pc, m) && m.is_subgroup_of(pc, s))
    })
}

/// Equal canonical rows iff mutual containment, on all pairs of a level.
pub fn dedup_sound(pc: &PcPresentation, subgroups: &[Subgroup]) -> bool {
    subgroups.iter().enumerate().all(|(i, a)| {
        subgroups[i..].iter().all(|b| {
            let same = a.is_subgroup_of(pc, b) && b.is_subgroup_of(pc, a);
            same == (a.rows() == b.rows())
        })
    })
}

pub fn check_properties(b: &Built, opts: &Options) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.assoc_samples;
    let assoc = [
        free_associativity(n, &mut rng),
        associativity(b.hpc(), n, &mut rng),
        associativity(&b.p.pc, n, &mut rng),
        associativity(&b.toy.pc, n, &mut rng),
    ];
    let shuffle = shuffle_canonical(&b.p.pc, 20, &mut rng) && shuffle_canonical(&b.toy.pc, 20, &mut rng);
    let ppc = &b.p.pc;
    let stab = stab_subgroup(&b.p, &b.h);
    let mut level = SearchLevel::root(ppc, &stab);
    let mut nodes = vec![Subgroup::full(ppc)];
    for _ in 0..3 {
        level = descend(ppc, &stab, &level, usize::MAX)?.0;
        nodes.extend(level.survivors.iter().take(4).cloned());
    }
    let random_subs: Vec<Subgroup> = (0..5)
        .map(|_| {
            let gens: Vec<GroupElement> = (0..2).map(|_| random_element(ppc, &mut rng)).collect();
            Subgroup::generated(ppc, &gens)
        })
        .collect();
    let maximal = maximal_counts(ppc, &nodes)
        && maximal_counts(ppc, &random_subs)
        && maximal_counts(&b.toy.pc, &[Subgroup::full(&b.toy.pc)]);
    let mut sample = level.survivors.clone();
    sample.extend(level.survivors.iter().map(|s| Subgroup::from_rows(ppc, &s.gens().iter().rev().map(|g| g.bits()).collect::<Vec<_>>())));
    let dedup = dedup_sound(ppc, &sample);
    let ok = assoc.iter().all(|&a| a) && shuffle && maximal && dedup;
    Ok(Check::new(
        "property_suites",
        "collection is associative; canonical IGS is order-insensitive; maximal subgroup counts are 2^rank - 1; canonical rows identify subgroups",
        format!("all hold at seed {:#x}", opts.seed),
        format!(
            "associativity F/h56/p59/toy2 {:?}, shuffle {}, maximal counts {}, dedup {}",
            assoc.map(yes),
            yes(shuffle),
            yes(maximal),
            yes(dedup)
        ),
        ok,
    ))
}
