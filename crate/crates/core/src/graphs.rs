//! Desk-scale graphs: the Cayley graph `Γ(H,X,Y) = Cay(H, S)`, the clique
//! graph `Σ(H,X,Y)` on the cosets `Xh` and `Yh`, line graphs, normal
//! quotients and orbit counts.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use rayon::prelude::*;

use crate::calculus::MixedDihedral;
use crate::error::{Error, Result};
use crate::morphisms::{s_set, VerifiedAutomorphism};
use crate::pcgroup::{GroupElement, PcPresentation, Subgroup};

/// Cap on materialized vertices and edges.
pub const GRAPH_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    /// Canonical label per vertex (group element or coset representative).
    pub labels: Vec<u128>,
    adj: Vec<Vec<usize>>,
    /// Side of each vertex when the graph is built bipartite.
    pub bipartition: Option<Vec<bool>>,
}

impl SimpleGraph {
    /// From an edge list; loops and duplicate edges are dropped.
    pub fn from_edges(labels: Vec<u128>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); labels.len()];
        for (u, v) in edges {
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        SimpleGraph {
            labels,
            adj,
            bipartition: None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Common valency, `None` when irregular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.adj.len()
    }

    /// Whether the recorded bipartition is proper.
    pub fn respects_bipartition(&self) -> bool {
        match &self.bipartition {
            None => false,
            Some(side) => self.edges().iter().all(|&(u, v)| side[u] != side[v]),
        }
    }

    pub fn has_triangle(&self) -> bool {
        self.edges().iter().any(|&(u, v)| {
            let (a, b) = (&self.adj[u], &self.adj[v]);
            a.iter().any(|w| b.binary_search(w).is_ok())
        })
    }

    pub fn is_complete_bipartite(&self) -> bool {
        let Some(side) = &self.bipartition else { return false };
        let left = side.iter().filter(|&&s| !s).count();
        let right = side.len() - left;
        self.respects_bipartition() && self.edge_count() == left * right
    }

    /// `"v_count e_count"` then one `"u v"` line per edge, vertices written
    /// as hex labels.
    pub fn write_adjacency<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.vertex_count(), self.edge_count())?;
        for (u, v) in self.edges() {
            writeln!(w, "{:x} {:x}", self.labels[u], self.labels[v])?;
        }
        Ok(())
    }

    /// Same graph with the edge `{u, v}` removed.
    pub fn without_edge(&self, u: usize, v: usize) -> SimpleGraph {
        let mut g = self.clone();
        g.adj[u].retain(|&w| w != v);
        g.adj[v].retain(|&w| w != u);
        g
    }
}

fn check_cap(what: &'static str, size: usize) -> Result<()> {
    if size > GRAPH_CAP {
        return Err(Error::TooLarge {
            what,
            size,
            cap: GRAPH_CAP,
        });
    }
    Ok(())
}

fn group_size(pc: &PcPresentation) -> Result<usize> {
    if pc.len() > 20 {
        return Err(Error::TooLarge {
            what: "group",
            size: usize::MAX,
            cap: GRAPH_CAP,
        });
    }
    Ok(1 << pc.len())
}

/// `Cay(G, S)`: vertices are the group elements, `g ~ s g`.
pub fn cayley_graph(pc: &PcPresentation, s: &[GroupElement]) -> Result<SimpleGraph> {
    let n = group_size(pc)?;
    let set: BTreeSet<GroupElement> = s.iter().copied().collect();
    if set.contains(&GroupElement::IDENTITY) || set.iter().any(|&u| !set.contains(&pc.inverse(u))) {
        return Err(Error::SNotInverseClosed);
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|g| {
            let ge = GroupElement(g as u128);
            set.iter().map(move |&x| (g, pc.mul(x, ge).bits() as usize))
        })
        .collect();
    Ok(SimpleGraph::from_edges((0..n as u128).collect(), edges))
}

/// Vertex bookkeeping for `Σ`: X-cosets first, then Y-cosets, each sorted
/// by canonical representative.
#[derive(Clone, Debug)]
pub struct SigmaGraph {
    pub graph: SimpleGraph,
    pub x: Subgroup,
    pub y: Subgroup,
    x_index: HashMap<GroupElement, usize>,
    y_index: HashMap<GroupElement, usize>,
}

impl SigmaGraph {
    pub fn x_vertex(&self, pc: &PcPresentation, h: GroupElement) -> usize {
        self.x_index[&self.x.coset_rep(pc, h)]
    }

    pub fn y_vertex(&self, pc: &PcPresentation, h: GroupElement) -> usize {
        self.y_index[&self.y.coset_rep(pc, h)]
    }

    pub fn x_count(&self) -> usize {
        self.x_index.len()
    }
}

fn coset_reps(pc: &PcPresentation, s: &Subgroup, n: usize) -> Vec<GroupElement> {
    let reps: BTreeSet<GroupElement> = (0..n as u128).map(|h| s.coset_rep(pc, GroupElement(h))).collect();
    reps.into_iter().collect()
}

/// `Σ(G, X, Y)`: `Xh ~ Yg` iff `h g^-1 ∈ XY`.
pub fn sigma_graph(g: &MixedDihedral) -> Result<SigmaGraph> {
    let pc = &g.pc;
    let n = group_size(pc)?;
    let x = Subgroup::generated(pc, &g.x.iter().map(|&i| pc.generator(i)).collect::<Vec<_>>());
    let y = Subgroup::generated(pc, &g.y.iter().map(|&i| pc.generator(i)).collect::<Vec<_>>());
    check_cap("coset set", 2 * (n >> x.order_log2()))?;
    let xr = coset_reps(pc, &x, n);
    let yr = coset_reps(pc, &y, n);
    let offset = xr.len();
    let edges: Vec<(usize, usize)> = xr
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, &h)| {
            let (x, y, yr) = (&x, &y, &yr);
            yr.iter().enumerate().filter_map(move |(b, &k)| {
                let w = pc.mul(h, pc.inverse(k));
                Subgroup::in_product(pc, w, x, y)
                    .unwrap_or(false)
                    .then_some((a, offset + b))
            })
        })
        .collect();
    let mut labels: Vec<u128> = xr.iter().map(|u| u.bits()).collect();
    labels.extend(yr.iter().map(|u| u.bits()));
    let mut graph = SimpleGraph::from_edges(labels, edges);
    graph.bipartition = Some((0..xr.len() + yr.len()).map(|v| v >= xr.len()).collect());
    Ok(SigmaGraph {
        graph,
        x_index: xr.iter().enumerate().map(|(i, &u)| (u, i)).collect(),
        y_index: yr.iter().enumerate().map(|(i, &u)| (u, xr.len() + i)).collect(),
        x,
        y,
    })
}

/// Line graph; vertex `i` is the `i`-th edge of `g.edges()`.
pub fn line_graph(g: &SimpleGraph) -> Result<SimpleGraph> {
    let edges = g.edges();
    check_cap("edge set", edges.len())?;
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (i, &(u, v)) in edges.iter().enumerate() {
        at[u].push(i);
        at[v].push(i);
    }
    let mut out = Vec::new();
    for list in &at {
        for (a, &e) in list.iter().enumerate() {
            out.extend(list[a + 1..].iter().map(|&f| (e, f)));
        }
    }
    Ok(SimpleGraph::from_edges((0..edges.len() as u128).collect(), out))
}

/// `φ(z) = {Xz, Yz}` as indices into `sigma.graph.edges()`.
pub fn phi_map(g: &MixedDihedral, sigma: &SigmaGraph) -> Result<Vec<usize>> {
    let pc = &g.pc;
    let n = group_size(pc)?;
    let index: HashMap<(usize, usize), usize> = sigma
        .graph
        .edges()
        .into_iter()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    (0..n as u128)
        .map(|z| {
            let z = GroupElement(z);
            let e = (sigma.x_vertex(pc, z), sigma.y_vertex(pc, z));
            index.get(&e).copied().ok_or(Error::NotInSubgroup)
        })
        .collect()
}

/// True iff `phi` is a bijection `V(Γ) → E(Σ)` carrying adjacency of `Γ`
/// exactly onto adjacency of the line graph.
pub fn verify_phi_isomorphism(gamma: &SimpleGraph, line: &SimpleGraph, phi: &[usize]) -> bool {
    if phi.len() != gamma.vertex_count() || line.vertex_count() != phi.len() {
        return false;
    }
    let mut hit = vec![false; phi.len()];
    for &e in phi {
        if e >= hit.len() || std::mem::replace(&mut hit[e], true) {
            return false;
        }
    }
    gamma.edge_count() == line.edge_count() && gamma.edges().iter().all(|&(u, v)| line.has_edge(phi[u], phi[v]))
}

/// Quotient by a vertex partition given as a block id per vertex, with the
/// cover flag: every vertex has its neighbors in distinct blocks other than
/// its own, and its block has the same valency in the quotient.
pub fn normal_quotient(g: &SimpleGraph, block: &[usize]) -> (SimpleGraph, bool) {
    let blocks = block.iter().copied().max().map_or(0, |m| m + 1);
    let mut labels = vec![u128::MAX; blocks];
    for (v, &b) in block.iter().enumerate() {
        labels[b] = labels[b].min(g.labels[v]);
    }
    let q = SimpleGraph::from_edges(labels, g.edges().into_iter().map(|(u, v)| (block[u], block[v])));
    let cover = (0..g.vertex_count()).all(|v| {
        let mut seen: Vec<usize> = g.adj[v].iter().map(|&w| block[w]).collect();
        let deg = seen.len();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == deg && !seen.contains(&block[v]) && q.adj[block[v]].len() == deg
    });
    if let Some(side) = &g.bipartition {
        let mut qs = vec![false; blocks];
        for (v, &b) in block.iter().enumerate() {
            qs[b] = side[v];
        }
        let mut q = q;
        q.bipartition = Some(qs);
        return (q, cover);
    }
    (q, cover)
}

/// Permutations of a vertex set, each checked to preserve adjacency.
#[derive(Clone, Debug, Default)]
pub struct ActionGens {
    pub perms: Vec<Vec<usize>>,
}

impl ActionGens {
    pub fn new(g: &SimpleGraph, perms: Vec<Vec<usize>>) -> Result<Self> {
        for p in &perms {
            let mut seen = vec![false; g.vertex_count()];
            let bijective = p.len() == g.vertex_count()
                && p.iter().all(|&v| v < seen.len() && !std::mem::replace(&mut seen[v], true));
            if !bijective || !g.edges().iter().all(|&(u, v)| g.has_edge(p[u], p[v])) {
                return Err(Error::InvalidPresentation("permutation is not a graph automorphism".into()));
            }
        }
        Ok(ActionGens { perms })
    }

    pub fn extended(&self, g: &SimpleGraph, more: Vec<Vec<usize>>) -> Result<Self> {
        let mut perms = self.perms.clone();
        perms.extend(more);
        Self::new(g, perms)
    }
}

/// Right translations `Ch -> Cht` of `Σ` by the defining generators.
pub fn sigma_translations(g: &MixedDihedral, sigma: &SigmaGraph) -> Vec<Vec<usize>> {
    let pc = &g.pc;
    g.defining()
        .into_iter()
        .map(|i| {
            let t = pc.generator(i);
            (0..sigma.graph.vertex_count())
                .map(|v| {
                    let h = GroupElement(sigma.graph.labels[v]);
                    if v < sigma.x_count() {
                        sigma.x_vertex(pc, pc.mul(h, t))
                    } else {
                        sigma.y_vertex(pc, pc.mul(h, t))
                    }
                })
                .collect()
        })
        .collect()
}

/// Action of an automorphism preserving `X ∪ Y` on `Σ`: `Ch -> C^f h^f`.
pub fn sigma_automorphism(g: &MixedDihedral, sigma: &SigmaGraph, f: &VerifiedAutomorphism) -> Vec<usize> {
    let pc = &g.pc;
    let swaps = !sigma.x.contains(pc, f.apply(g, pc.generator(g.x[0])));
    (0..sigma.graph.vertex_count())
        .map(|v| {
            let h = f.apply(g, GroupElement(sigma.graph.labels[v]));
            let on_x = (v < sigma.x_count()) != swaps;
            if on_x {
                sigma.x_vertex(pc, h)
            } else {
                sigma.y_vertex(pc, h)
            }
        })
        .collect()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn count_orbits(points: usize, images: impl Fn(usize, &mut dyn FnMut(usize))) -> usize {
    let mut parent: Vec<usize> = (0..points).collect();
    let mut roots = points;
    for p in 0..points {
        images(p, &mut |q| {
            let (a, b) = (find(&mut parent, p), find(&mut parent, q));
            if a != b {
                parent[a] = b;
                roots -= 1;
            }
        });
    }
    roots
}

/// Number of orbits of `<a>` on ordered 2-arcs `(u, v, w)`, `u != w`.
pub fn two_arc_orbit_count(g: &SimpleGraph, a: &ActionGens) -> usize {
    // arc (u, v, w) is indexed by v, then positions of u and w in adj[v]
    let mut base = Vec::with_capacity(g.vertex_count() + 1);
    let mut total = 0;
    for list in &g.adj {
        base.push(total);
        total += list.len() * list.len();
    }
    let pos = |v: usize, u: usize| g.adj[v].binary_search(&u).unwrap();
    let index = |u: usize, v: usize, w: usize| base[v] + pos(v, u) * g.adj[v].len() + pos(v, w);
    let mut arcs = Vec::new();
    let mut valid = vec![false; total];
    for v in 0..g.vertex_count() {
        for &u in &g.adj[v] {
            for &w in &g.adj[v] {
                if u != w {
                    let i = index(u, v, w);
                    valid[i] = true;
                    arcs.push((u, v, w));
                }
            }
        }
    }
    let arc_at: HashMap<usize, (usize, usize, usize)> = arcs.iter().map(|&(u, v, w)| (index(u, v, w), (u, v, w))).collect();
    let orbits = count_orbits(total, |p, link| {
        if let Some(&(u, v, w)) = arc_at.get(&p) {
            for perm in &a.perms {
                link(index(perm[u], perm[v], perm[w]));
            }
        }
    });
    orbits - valid.iter().filter(|&&b| !b).count()
}

/// True iff `<a>` is transitive on edges and `|E| = expected_order`.
pub fn edge_regular_check(g: &SimpleGraph, a: &ActionGens, expected_order: usize) -> bool {
    let edges = g.edges();
    let index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let orbits = count_orbits(edges.len(), |i, link| {
        let (u, v) = edges[i];
        for p in &a.perms {
            let (x, y) = (p[u].min(p[v]), p[u].max(p[v]));
            link(index[&(x, y)]);
        }
    });
    orbits == 1 && edges.len() == expected_order
}

/// Orbits of a subgroup `n` acting on the vertices of `Σ` by right
/// multiplication, as a block id per vertex.
pub fn sigma_orbits(g: &MixedDihedral, sigma: &SigmaGraph, n: &Subgroup) -> Vec<usize> {
    let pc = &g.pc;
    let count = sigma.graph.vertex_count();
    let mut parent: Vec<usize> = (0..count).collect();
    for t in n.gens() {
        for v in 0..count {
            let h = pc.mul(GroupElement(sigma.graph.labels[v]), t);
            let w = if v < sigma.x_count() {
                sigma.x_vertex(pc, h)
            } else {
                sigma.y_vertex(pc, h)
            };
            let (a, b) = (find(&mut parent, v), find(&mut parent, w));
            parent[a] = b;
        }
    }
    let mut id = HashMap::new();
    (0..count)
        .map(|v| {
            let r = find(&mut parent, v);
            let next = id.len();
            *id.entry(r).or_insert(next)
        })
        .collect()
}

pub const CLIQUE_CAP: usize = 1 << 12;

/// Maximal cliques (Bron–Kerbosch with pivoting), each sorted. Intended
/// for small graphs only.
pub fn maximal_cliques(g: &SimpleGraph) -> Result<Vec<Vec<usize>>> {
    if g.vertex_count() > CLIQUE_CAP {
        return Err(Error::TooLarge {
            what: "clique search",
            size: g.vertex_count(),
            cap: CLIQUE_CAP,
        });
    }
    let mut out = Vec::new();
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    bron_kerbosch(g, &mut Vec::new(), all, Vec::new(), &mut out);
    out.sort();
    Ok(out)
}

fn bron_kerbosch(g: &SimpleGraph, r: &mut Vec<usize>, p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        let mut c = r.clone();
        c.sort_unstable();
        out.push(c);
        return;
    }
    let pivot = p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&v| g.has_edge(u, v)).count());
    let Some(pivot) = pivot else { return };
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !g.has_edge(pivot, v)).collect();
    let mut p = p;
    for v in candidates {
        let np = p.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
        let nx = x.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
        r.push(v);
        bron_kerbosch(g, r, np, nx, out);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// The cosets `Xh` and `Yh` as vertex sets of `Γ`, sorted.
pub fn coset_cliques(g: &MixedDihedral) -> Result<Vec<Vec<usize>>> {
    let pc = &g.pc;
    let n = group_size(pc)?;
    let mut out = BTreeSet::new();
    for gens in [&g.x, &g.y] {
        let s = Subgroup::generated(pc, &gens.iter().map(|&i| pc.generator(i)).collect::<Vec<_>>());
        let elems = s.elements(pc)?;
        for h in 0..n as u128 {
            let mut c: Vec<usize> = elems.iter().map(|&e| pc.mul(e, GroupElement(h)).bits() as usize).collect();
            c.sort_unstable();
            out.insert(c);
        }
    }
    Ok(out.into_iter().collect())
}

/// `Γ(G, X, Y) = Cay(G, (X ∪ Y) \ {1})`.
pub fn gamma_graph(g: &MixedDihedral) -> Result<SimpleGraph> {
    cayley_graph(&g.pc, &s_set(g))
}
