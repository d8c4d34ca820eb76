//! Generator maps on `X0 ∪ Y0`, their extension to automorphisms of a mixed
//! dihedral group, and the automorphism group `K = <α1, α2, r>`.
//!
//! Maps act on the right: `x^(fg) = (x^f)^g`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::BufRead;

use serde::Serialize;

use crate::calculus::{MixedDihedral, SIGMA};
use crate::error::{Error, Result};
use crate::gf2::Ones;
use crate::pcgroup::{GroupElement, Subgroup};

/// Images of `x_1..x_n, y_1..y_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMap {
    pub label: String,
    pub images: Vec<GroupElement>,
}

impl GeneratorMap {
    pub fn new(label: impl Into<String>, images: Vec<GroupElement>) -> Self {
        GeneratorMap {
            label: label.into(),
            images,
        }
    }

    /// Builds a map from index lists: `x_i -> prod x_{xs[i]}`, `y_j -> prod y_{ys[j]}`.
    pub fn from_index_words(g: &MixedDihedral, label: &str, xs: &[&[usize]], ys: &[&[usize]]) -> Self {
        let word = |idx: &[usize], gens: &[usize]| {
            g.pc.product(idx.iter().map(|&k| g.pc.generator(gens[k])))
        };
        let mut images: Vec<GroupElement> = xs.iter().map(|w| word(w, &g.x)).collect();
        images.extend(ys.iter().map(|w| word(w, &g.y)));
        GeneratorMap::new(label, images)
    }
}

/// A map whose extension to all pc generators satisfies every pc relation
/// and whose image is the whole group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VerifiedAutomorphism {
    pub label: String,
    full: Vec<u128>,
}

impl VerifiedAutomorphism {
    pub fn identity(g: &MixedDihedral) -> Self {
        VerifiedAutomorphism {
            label: "id".into(),
            full: (0..g.pc.len()).map(|i| 1u128 << i).collect(),
        }
    }

    pub fn full_images(&self) -> &[u128] {
        &self.full
    }

    pub fn image_of_gen(&self, i: usize) -> GroupElement {
        GroupElement(self.full[i])
    }

    pub fn apply(&self, g: &MixedDihedral, u: GroupElement) -> GroupElement {
        apply_table(g, &self.full, u)
    }

    pub fn is_identity(&self) -> bool {
        self.full.iter().enumerate().all(|(i, &w)| w == 1u128 << i)
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn same_map(&self, other: &Self) -> bool {
        self.full == other.full
    }
}

fn apply_table(g: &MixedDihedral, table: &[u128], u: GroupElement) -> GroupElement {
    Ones::new(u.bits()).fold(GroupElement::IDENTITY, |acc, k| g.pc.mul(acc, GroupElement(table[k])))
}

/// Completes images of the defining generators to all pc generators.
fn derive_full(g: &MixedDihedral, defining: &[GroupElement]) -> Result<Vec<u128>> {
    let n = g.pc.len();
    let mut full: Vec<Option<u128>> = vec![None; n];
    for (k, &idx) in g.defining().iter().enumerate() {
        full[idx] = Some(defining[k].bits());
    }
    for i in 0..n {
        if full[i].is_some() {
            continue;
        }
        let (a, b) = g.definitions[i].ok_or_else(|| {
            Error::InvalidPresentation(format!("generator {} has no definition", g.pc.name(i)))
        })?;
        let (ia, ib) = match (full[a], full[b]) {
            (Some(x), Some(y)) => (x, y),
            _ => {
                return Err(Error::InvalidPresentation(format!(
                    "definition of {} refers to a later generator",
                    g.pc.name(i)
                )))
            }
        };
        full[i] = Some(g.pc.commutator(GroupElement(ia), GroupElement(ib)).bits());
    }
    Ok(full.into_iter().map(Option::unwrap).collect())
}

/// Extends `map` to all pc generators and checks every power and
/// conjugation relation, then surjectivity.
pub fn extend(g: &MixedDihedral, map: &GeneratorMap) -> Result<VerifiedAutomorphism> {
    let n = g.pc.len();
    if map.images.len() != 2 * g.dim {
        return Err(Error::InvalidPresentation(format!(
            "map {} has {} images, expected {}",
            map.label,
            map.images.len(),
            2 * g.dim
        )));
    }
    for &u in &map.images {
        g.pc.element(u.bits())?;
    }
    let full = derive_full(g, &map.images)?;
    let pc = &g.pc;
    let img = |i: usize| GroupElement(full[i]);
    let fail = |relation: String| Error::NotHomomorphism {
        label: map.label.clone(),
        relation,
    };
    for i in 0..n {
        let lhs = pc.mul(img(i), img(i));
        let rhs = apply_table(g, &full, pc.power(i));
        if lhs != rhs {
            return Err(fail(format!("{0}^2 = {1}", pc.name(i), pc.format(pc.power(i)))));
        }
    }
    for j in 0..n {
        for i in 0..j {
            let w = pc.conjugate_gen(j, i);
            let lhs = pc.conjugate(img(j), img(i));
            let rhs = apply_table(g, &full, w);
            if lhs != rhs {
                return Err(fail(format!("{}^{} = {}", pc.name(j), pc.name(i), pc.format(w))));
            }
        }
    }
    let image = Subgroup::generated(pc, &map.images);
    if image.order_log2() != n {
        return Err(Error::NotBijective {
            label: map.label.clone(),
            image_log2: image.order_log2(),
            expected_log2: n,
        });
    }
    Ok(VerifiedAutomorphism {
        label: map.label.clone(),
        full,
    })
}

/// `f` then `g`.
pub fn compose(grp: &MixedDihedral, f: &VerifiedAutomorphism, g: &VerifiedAutomorphism) -> VerifiedAutomorphism {
    let defining: Vec<GroupElement> = grp
        .defining()
        .into_iter()
        .map(|i| g.apply(grp, f.image_of_gen(i)))
        .collect();
    VerifiedAutomorphism {
        label: format!("{}*{}", f.label, g.label),
        full: derive_full(grp, &defining).expect("definitions are ordered"),
    }
}

pub fn power(grp: &MixedDihedral, f: &VerifiedAutomorphism, k: usize) -> VerifiedAutomorphism {
    let mut acc = VerifiedAutomorphism::identity(grp);
    for _ in 0..k {
        acc = compose(grp, &acc, f);
    }
    acc.relabel(format!("{}^{}", f.label, k))
}

/// Least `k >= 1` with `f^k = 1`, searching up to `cap`.
pub fn automorphism_order(grp: &MixedDihedral, f: &VerifiedAutomorphism, cap: usize) -> Option<usize> {
    let mut acc = f.clone();
    for k in 1..=cap {
        if acc.is_identity() {
            return Some(k);
        }
        acc = compose(grp, &acc, f);
    }
    None
}

pub fn inverse(grp: &MixedDihedral, f: &VerifiedAutomorphism) -> VerifiedAutomorphism {
    let k = automorphism_order(grp, f, 1 << 20).expect("finite order");
    power(grp, f, k - 1).relabel(format!("{}^-1", f.label))
}

/// `f^g = g^-1 f g`.
pub fn conjugate(grp: &MixedDihedral, f: &VerifiedAutomorphism, g: &VerifiedAutomorphism) -> VerifiedAutomorphism {
    let gi = inverse(grp, g);
    compose(grp, &compose(grp, &gi, f), g).relabel(format!("{}^{}", f.label, g.label))
}

/// Default cap on closure size.
pub const CLOSURE_CAP: usize = 100_000;

#[derive(Clone, Debug)]
pub struct AutGroup {
    pub generators: Vec<VerifiedAutomorphism>,
    pub elements: Vec<VerifiedAutomorphism>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

pub fn closure(grp: &MixedDihedral, gens: &[VerifiedAutomorphism], cap: usize) -> Result<AutGroup> {
    let id = VerifiedAutomorphism::identity(grp);
    let mut seen: HashSet<Vec<u128>> = HashSet::new();
    seen.insert(id.full.clone());
    let mut elements = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(f) = queue.pop_front() {
        for g in gens {
            let h = compose(grp, &f, g);
            if seen.insert(h.full.clone()) {
                if elements.len() >= cap {
                    return Err(Error::ClosureBudgetExceeded(cap));
                }
                elements.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(AutGroup {
        generators: gens.to_vec(),
        elements,
    })
}

/// The named maps on the 4-dimensional group.
pub struct NamedMaps {
    pub alpha1: GeneratorMap,
    pub alpha2: GeneratorMap,
    pub beta1: GeneratorMap,
    pub beta2: GeneratorMap,
    pub r: GeneratorMap,
    pub sigma1: GeneratorMap,
    pub r4_on_x: GeneratorMap,
}

pub fn named_maps(g: &MixedDihedral) -> NamedMaps {
    assert_eq!(g.dim, 4);
    let id: [&[usize]; 4] = [&[0], &[1], &[2], &[3]];
    let shift: [&[usize]; 4] = [&[0, 1], &[1, 2], &[2, 3], &[0, 1, 2]];
    let cycle: [&[usize]; 4] = [&[1], &[2], &[3], &[0, 1, 2, 3]];
    let r = {
        let mut images: Vec<GroupElement> = (0..4).map(|i| g.y_elem(i)).collect();
        images.extend((0..4).map(|i| g.x_elem(SIGMA[i])));
        GeneratorMap::new("r", images)
    };
    let sigma1: [&[usize]; 4] = [&[0], &[0, 2], &[1, 2], &[1, 3]];
    // σ² = (1,4)(2,3)
    let r4x: [&[usize]; 4] = [&[3], &[2], &[1], &[0]];
    NamedMaps {
        alpha1: GeneratorMap::from_index_words(g, "alpha1", &shift, &id),
        alpha2: GeneratorMap::from_index_words(g, "alpha2", &id, &shift),
        beta1: GeneratorMap::from_index_words(g, "beta1", &cycle, &id),
        beta2: GeneratorMap::from_index_words(g, "beta2", &id, &cycle),
        r,
        sigma1: GeneratorMap::from_index_words(g, "sigma1", &sigma1, &id),
        r4_on_x: GeneratorMap::from_index_words(g, "r4_on_X", &r4x, &id),
    }
}

/// Generators for the toy automorphisms used on `Σ`: on `X`, the cyclic
/// shift of the `x`'s and the transvection `x1 -> x1 x2`; the same on `Y`;
/// and the swap `x_i <-> y_i`. For `n = 2` the first two generate `GL(2,2)`.
fn refs(v: &[Vec<usize>]) -> Vec<&[usize]> {
    v.iter().map(Vec::as_slice).collect()
}

pub fn toy_automorphism_maps(g: &MixedDihedral) -> Vec<GeneratorMap> {
    let n = g.dim;
    let id: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let shift: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + 1) % n]).collect();
    let mut transvection = id.clone();
    transvection[0] = vec![0, 1];
    let mut swap: Vec<GroupElement> = (0..n).map(|i| g.y_elem(i)).collect();
    swap.extend((0..n).map(|i| g.x_elem(i)));
    vec![
        GeneratorMap::from_index_words(g, "shift_x", &refs(&shift), &refs(&id)),
        GeneratorMap::from_index_words(g, "transvect_x", &refs(&transvection), &refs(&id)),
        GeneratorMap::from_index_words(g, "shift_y", &refs(&id), &refs(&shift)),
        GeneratorMap::from_index_words(g, "transvect_y", &refs(&id), &refs(&transvection)),
        GeneratorMap::new("swap", swap),
    ]
}

/// `α1^r = α2` and `α2^r = α1^2`.
pub fn conj_relations_check(
    grp: &MixedDihedral,
    alpha1: &VerifiedAutomorphism,
    alpha2: &VerifiedAutomorphism,
    r: &VerifiedAutomorphism,
) -> bool {
    conjugate(grp, alpha1, r).same_map(alpha2) && conjugate(grp, alpha2, r).same_map(&power(grp, alpha1, 2))
}

/// `S = (X ∪ Y) \ {1}` in a fixed order: X's nonidentity elements by
/// exponent mask, then Y's.
pub fn s_set(g: &MixedDihedral) -> Vec<GroupElement> {
    let mut out = Vec::new();
    for gens in [&g.x, &g.y] {
        for mask in 1u32..(1 << g.dim) {
            out.push(g.pc.product(Ones::new(mask as u128).map(|k| g.pc.generator(gens[k]))));
        }
    }
    out
}

/// Orbits of `<gens>` on `S`, each sorted, ordered by least member index.
pub fn orbit_on_s(g: &MixedDihedral, gens: &[VerifiedAutomorphism]) -> Result<Vec<Vec<GroupElement>>> {
    let s = s_set(g);
    let index: HashMap<GroupElement, usize> = s.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut seen = vec![false; s.len()];
    let mut orbits = Vec::new();
    for start in 0..s.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut at = 0;
        while at < orbit.len() {
            let u = s[orbit[at]];
            at += 1;
            for f in gens {
                let v = f.apply(g, u);
                let &k = index.get(&v).ok_or_else(|| Error::NotHomomorphism {
                    label: f.label.clone(),
                    relation: "S is not invariant".into(),
                })?;
                if !seen[k] {
                    seen[k] = true;
                    orbit.push(k);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit.into_iter().map(|k| s[k]).collect());
    }
    Ok(orbits)
}

pub fn pointwise_stabilizer_of_x(g: &MixedDihedral, k: &AutGroup) -> AutGroup {
    let elements: Vec<VerifiedAutomorphism> = k
        .elements
        .iter()
        .filter(|f| g.x.iter().all(|&i| f.image_of_gen(i) == g.pc.generator(i)))
        .cloned()
        .collect();
    AutGroup {
        generators: elements.clone(),
        elements,
    }
}

/// `|GL(4,2)|`.
pub const GL42: u128 = 20160;

#[derive(Clone, Debug, Serialize)]
pub struct AutHypothesesReport {
    pub order: usize,
    pub transitive_on_s: bool,
    pub orbit_sizes: Vec<usize>,
    pub pointwise_stabilizer_order: usize,
    pub stabilizer_nontrivial: bool,
    /// `|GL(n,2)|^2` does not divide `|K|`, so `K` is not `Aut(X) × Aut(Y)`.
    pub excludes_full_linear: bool,
}

impl AutHypothesesReport {
    pub fn all_hold(&self) -> bool {
        self.transitive_on_s && self.stabilizer_nontrivial && self.excludes_full_linear
    }
}

fn gl_order(n: usize) -> u128 {
    (0..n).map(|i| (1u128 << n) - (1u128 << i)).product()
}

pub fn aut_hypotheses_report(g: &MixedDihedral, k: &AutGroup) -> Result<AutHypothesesReport> {
    let orbits = orbit_on_s(g, &k.elements)?;
    let stab = pointwise_stabilizer_of_x(g, k);
    let gl = gl_order(g.dim);
    Ok(AutHypothesesReport {
        order: k.order(),
        transitive_on_s: orbits.len() == 1,
        orbit_sizes: orbits.iter().map(Vec::len).collect(),
        pointwise_stabilizer_order: stab.order(),
        stabilizer_nontrivial: stab.order() > 1,
        excludes_full_linear: k.order() as u128 % (gl * gl) != 0,
    })
}

/// Parses a map file: one `name -> word` line per defining generator,
/// words are `*`-separated generator names of `X0 ∪ Y0` or `1`. Blank lines
/// and `#` comments are skipped.
pub fn parse_map<R: BufRead>(g: &MixedDihedral, label: &str, r: R) -> Result<GeneratorMap> {
    let defining = g.defining();
    let lookup = |name: &str| -> Result<usize> {
        defining
            .iter()
            .position(|&i| g.pc.name(i) == name)
            .ok_or_else(|| Error::Parse(format!("'{name}' is not one of the defining generators")))
    };
    let mut images: Vec<Option<GroupElement>> = vec![None; defining.len()];
    for line in r.lines() {
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("expected 'gen -> word': {line}")))?;
        let slot = lookup(lhs.trim())?;
        let mut w = GroupElement::IDENTITY;
        for letter in rhs.split('*').map(str::trim) {
            if letter == "1" {
                continue;
            }
            if letter.is_empty() {
                return Err(Error::Parse(format!("empty letter in: {line}")));
            }
            w = g.pc.mul(w, g.pc.generator(defining[lookup(letter)?]));
        }
        if images[slot].replace(w).is_some() {
            return Err(Error::Parse(format!("generator {} mapped twice", lhs.trim())));
        }
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(k, w)| w.ok_or_else(|| Error::Parse(format!("no image for {}", g.pc.name(defining[k])))))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorMap::new(label, images))
}
