//! Commutator calculus in the free class-3 object `F` on `x1..x4, y1..y4`,
//! and construction of the pc presentations of `H`, `P` and the toy group.
//!
//! `F` is the largest group generated by the eight involutions in which the
//! `x`'s commute, the `y`'s commute, every `[x_i, y_j]` and every triple
//! commutator is an involution, and triple commutators are central. Its
//! elements have the unique normal form
//!
//! ```text
//! x^a · y^b · ∏ c_ij^{C_ij} · ∏ d_t^{D_t}
//! ```
//!
//! with `c_ij = [x_i, y_j]` (16 of them) and `d_t` running over 48 basic
//! triple commutators: `[[x_i,y_j],x_k]` for `i < k` and `[[x_i,y_j],y_l]`
//! for `j < l`. The remaining triple commutators are either trivial
//! (`[[x_i,y_j],x_i] = [[x_i,y_j],y_j] = 1`, since the generators are
//! involutions) or equal to a basic one (`[[x_i,y_j],x_k] = [[x_k,y_j],x_i]`
//! by Hall–Witt in class 3).

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gf2::{complement_basis, echelonize, BitMatrix, BitVec, Echelon, Ones};
use crate::pcgroup::{GroupElement, PcPresentation};

/// Rank of `X` and `Y`.
pub const DIM: usize = 4;
pub const LAYER2: usize = DIM * DIM;
pub const LAYER3: usize = 48;

/// Zero-based form of the permutation `(1,2,4,3)`.
pub const SIGMA: [usize; DIM] = [1, 3, 0, 2];

/// A basic triple commutator of layer 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Triple {
    /// `[[x_i, y_j], x_k]` with `i < k`.
    X { i: usize, j: usize, k: usize },
    /// `[[x_i, y_j], y_l]` with `j < l`.
    Y { i: usize, j: usize, l: usize },
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Triple::X { i, j, k } => write!(f, "[[x{},y{}],x{}]", i + 1, j + 1, k + 1),
            Triple::Y { i, j, l } => write!(f, "[[x{},y{}],y{}]", i + 1, j + 1, l + 1),
        }
    }
}

struct Tables {
    basis: Vec<Triple>,
    /// `xt[k][4i+j]` = bit of `[[x_i,y_j],x_k]` (0 when `i == k`).
    xt: [[u64; LAYER2]; DIM],
    /// `yt[l][4i+j]` = bit of `[[x_i,y_j],y_l]` (0 when `j == l`).
    yt: [[u64; LAYER2]; DIM],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut basis = Vec::with_capacity(LAYER3);
        for i in 0..DIM {
            for j in 0..DIM {
                for k in i + 1..DIM {
                    basis.push(Triple::X { i, j, k });
                }
            }
        }
        for i in 0..DIM {
            for j in 0..DIM {
                for l in j + 1..DIM {
                    basis.push(Triple::Y { i, j, l });
                }
            }
        }
        debug_assert_eq!(basis.len(), LAYER3);
        let pos = |t: Triple| basis.iter().position(|&b| b == t).unwrap();
        let mut xt = [[0u64; LAYER2]; DIM];
        let mut yt = [[0u64; LAYER2]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    if k != i {
                        let t = Triple::X { i: i.min(k), j, k: i.max(k) };
                        xt[k][4 * i + j] = 1u64 << pos(t);
                    }
                    if k != j {
                        let t = Triple::Y { i, j: j.min(k), l: j.max(k) };
                        yt[k][4 * i + j] = 1u64 << pos(t);
                    }
                }
            }
        }
        Tables { basis, xt, yt }
    })
}

/// The 48 basic triple commutators in generator order.
pub fn layer3_basis() -> &'static [Triple] {
    &tables().basis
}

/// Layer-3 coordinate of `[[x_i,y_j],x_k]`, `None` when it is trivial.
pub fn triple_x(i: usize, j: usize, k: usize) -> Option<usize> {
    let b = tables().xt[k][4 * i + j];
    (b != 0).then(|| b.trailing_zeros() as usize)
}

/// Layer-3 coordinate of `[[x_i,y_j],y_l]`, `None` when it is trivial.
pub fn triple_y(i: usize, j: usize, l: usize) -> Option<usize> {
    let b = tables().yt[l][4 * i + j];
    (b != 0).then(|| b.trailing_zeros() as usize)
}

/// Element of `F` in normal form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LayeredWord {
    a: u8,
    b: u8,
    c: u16,
    d: u64,
}

impl LayeredWord {
    pub const IDENTITY: LayeredWord = LayeredWord { a: 0, b: 0, c: 0, d: 0 };

    pub fn new(a: u8, b: u8, c: u16, d: u64) -> Self {
        assert!(a < 16 && b < 16 && d < (1u64 << LAYER3));
        LayeredWord { a, b, c, d }
    }

    pub fn x(i: usize) -> Self {
        LayeredWord { a: 1 << i, ..Self::IDENTITY }
    }

    pub fn y(j: usize) -> Self {
        LayeredWord { b: 1 << j, ..Self::IDENTITY }
    }

    /// The basic commutator `[x_i, y_j]`.
    pub fn c(i: usize, j: usize) -> Self {
        LayeredWord { c: 1 << (4 * i + j), ..Self::IDENTITY }
    }

    /// The layer-3 basis element `t`.
    pub fn d(t: usize) -> Self {
        LayeredWord { d: 1 << t, ..Self::IDENTITY }
    }

    /// Product of the listed `x` generators (they commute).
    pub fn x_set(mask: u8) -> Self {
        LayeredWord { a: mask & 0xf, ..Self::IDENTITY }
    }

    pub fn y_set(mask: u8) -> Self {
        LayeredWord { b: mask & 0xf, ..Self::IDENTITY }
    }

    pub fn a(&self) -> BitVec {
        BitVec::from_bits(self.a as u128, DIM).unwrap()
    }

    pub fn b(&self) -> BitVec {
        BitVec::from_bits(self.b as u128, DIM).unwrap()
    }

    pub fn c_part(&self) -> BitVec {
        BitVec::from_bits(self.c as u128, LAYER2).unwrap()
    }

    pub fn d_part(&self) -> BitVec {
        BitVec::from_bits(self.d as u128, LAYER3).unwrap()
    }

    pub fn raw(&self) -> (u8, u8, u16, u64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// True when only layer 3 is populated.
    pub fn is_central(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0
    }

    /// Right multiplication by `x_k`.
    fn push_x(&mut self, k: usize) {
        let t = tables();
        for ij in Ones::new(self.c as u128) {
            self.d ^= t.xt[k][ij];
        }
        // y^b conjugated by x_k: each y_j picks up c_kj, and each c_kj moving
        // past a later y_j' leaves [[x_k,y_j],y_j'] behind.
        let mut seen = 0u8;
        for j in Ones::new(self.b as u128) {
            for jp in Ones::new(seen as u128) {
                self.d ^= t.yt[j][4 * k + jp];
            }
            seen |= 1 << j;
            self.c ^= 1 << (4 * k + j);
        }
        self.a ^= 1 << k;
    }

    /// Right multiplication by `y_l`.
    fn push_y(&mut self, l: usize) {
        let t = tables();
        for ij in Ones::new(self.c as u128) {
            self.d ^= t.yt[l][ij];
        }
        self.b ^= 1 << l;
    }

    /// Flattens into the 72-bit pc exponent vector `(a | b<<4 | c<<8 | d<<24)`.
    pub fn to_bits(&self) -> u128 {
        self.a as u128 | (self.b as u128) << 4 | (self.c as u128) << 8 | (self.d as u128) << 24
    }

    pub fn from_bits(bits: u128) -> Self {
        LayeredWord {
            a: (bits & 0xf) as u8,
            b: ((bits >> 4) & 0xf) as u8,
            c: ((bits >> 8) & 0xffff) as u16,
            d: ((bits >> 24) & ((1u128 << LAYER3) - 1)) as u64,
        }
    }
}

impl fmt::Debug for LayeredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F(a={:04b}, b={:04b}, c={:04x}, d={:012x})", self.a, self.b, self.c, self.d)
    }
}

/// Normal form of `u · v` in `F`.
pub fn free_multiply(u: &LayeredWord, v: &LayeredWord) -> LayeredWord {
    let mut w = *u;
    for k in Ones::new(v.a as u128) {
        w.push_x(k);
    }
    for l in Ones::new(v.b as u128) {
        w.push_y(l);
    }
    w.c ^= v.c;
    w.d ^= v.d;
    w
}

/// Inverse in `F`: the generators of each block are involutions and commute
/// within the block, so the inverse is `d^D c^C y^b x^a` collected.
pub fn free_inverse(u: &LayeredWord) -> LayeredWord {
    let mut w = LayeredWord { c: u.c, d: u.d, ..LayeredWord::IDENTITY };
    for l in Ones::new(u.b as u128) {
        w.push_y(l);
    }
    for k in Ones::new(u.a as u128) {
        w.push_x(k);
    }
    w
}

/// `[u, v] = u^-1 v^-1 u v` in `F`.
pub fn commutator_expand(u: &LayeredWord, v: &LayeredWord) -> LayeredWord {
    let ui = free_inverse(u);
    let vi = free_inverse(v);
    free_multiply(&free_multiply(&free_multiply(&ui, &vi), u), v)
}

fn comm(u: LayeredWord, v: LayeredWord) -> LayeredWord {
    commutator_expand(&u, &v)
}

fn prod(words: &[LayeredWord]) -> LayeredWord {
    words.iter().fold(LayeredWord::IDENTITY, |acc, w| free_multiply(&acc, w))
}

/// The words of the two defining relations among triple commutators.
#[derive(Clone, Copy, Debug)]
pub struct RelationWords {
    /// First relation, `left = right`.
    pub left: LayeredWord,
    pub right: LayeredWord,
    /// Second relation, `a · b = c`.
    pub a: LayeredWord,
    pub b: LayeredWord,
    pub c: LayeredWord,
}

pub fn relation_words() -> RelationWords {
    let x = LayeredWord::x;
    let y = LayeredWord::y;
    let xall = LayeredWord::x_set(0xf);
    let yall = LayeredWord::y_set(0xf);
    let (x1, x2, x3, x4) = (x(0), x(1), x(2), x(3));
    let (y1, y2, y3, y4) = (y(0), y(1), y(2), y(3));

    let left = prod(&[
        comm(comm(xall, y1), x1),
        comm(comm(y1, x1), y2),
        comm(comm(x1, y2), x3),
        comm(comm(y2, x3), y4),
        comm(comm(x3, y4), x2),
        comm(comm(y4, x2), y3),
    ]);
    let right = prod(&[comm(comm(x2, y3), xall), comm(comm(y3, xall), y1)]);
    let a = prod(&[
        comm(comm(x4, y2), xall),
        comm(comm(y2, xall), y3),
        comm(comm(xall, y3), x2),
        comm(comm(y3, x2), yall),
    ]);
    let b = comm(comm(x2, yall), x1);
    let c = prod(&[
        comm(comm(yall, x1), y4),
        comm(comm(x1, y4), x4),
        comm(comm(y4, x4), y2),
    ]);
    RelationWords { left, right, a, b, c }
}

fn central_rows(words: &[LayeredWord]) -> Result<BitMatrix> {
    let mut m = BitMatrix::new(LAYER3);
    for (index, w) in words.iter().enumerate() {
        if !w.is_central() {
            return Err(Error::NonCentralRelation { index });
        }
        m.push(w.d_part())?;
    }
    Ok(m)
}

/// The defining relations as layer-3 vectors: `left · right^-1` and
/// `a · b · c^-1`.
pub fn expand_relations() -> Result<BitMatrix> {
    let w = relation_words();
    central_rows(&[
        free_multiply(&w.left, &free_inverse(&w.right)),
        free_multiply(&free_multiply(&w.a, &w.b), &free_inverse(&w.c)),
    ])
}

/// The alternative reading of the second relation as a chain `a = b = c`,
/// giving three vectors. Its r-orbit span has rank 24, not 16.
pub fn expand_relations_chained() -> Result<BitMatrix> {
    let w = relation_words();
    central_rows(&[
        free_multiply(&w.left, &free_inverse(&w.right)),
        free_multiply(&w.a, &free_inverse(&w.b)),
        free_multiply(&w.b, &free_inverse(&w.c)),
    ])
}

/// An endomorphism of `F` given by the images of the eight generators.
#[derive(Clone, Debug)]
pub struct FreeEndomorphism {
    pub x_images: [LayeredWord; DIM],
    pub y_images: [LayeredWord; DIM],
    c_images: [LayeredWord; LAYER2],
    d_images: Vec<LayeredWord>,
}

impl FreeEndomorphism {
    pub fn new(x_images: [LayeredWord; DIM], y_images: [LayeredWord; DIM]) -> Self {
        let mut c_images = [LayeredWord::IDENTITY; LAYER2];
        for i in 0..DIM {
            for j in 0..DIM {
                c_images[4 * i + j] = comm(x_images[i], y_images[j]);
            }
        }
        let d_images = layer3_basis()
            .iter()
            .map(|t| match *t {
                Triple::X { i, j, k } => comm(c_images[4 * i + j], x_images[k]),
                Triple::Y { i, j, l } => comm(c_images[4 * i + j], y_images[l]),
            })
            .collect();
        FreeEndomorphism {
            x_images,
            y_images,
            c_images,
            d_images,
        }
    }

    pub fn apply(&self, u: &LayeredWord) -> LayeredWord {
        let mut w = LayeredWord::IDENTITY;
        for k in Ones::new(u.a as u128) {
            w = free_multiply(&w, &self.x_images[k]);
        }
        for l in Ones::new(u.b as u128) {
            w = free_multiply(&w, &self.y_images[l]);
        }
        for ij in Ones::new(u.c as u128) {
            w = free_multiply(&w, &self.c_images[ij]);
        }
        for t in Ones::new(u.d as u128) {
            w = free_multiply(&w, &self.d_images[t]);
        }
        w
    }
}

/// Conjugation by `r` on `F`: `x_i -> y_i`, `y_i -> x_{iσ}`.
#[derive(Clone, Debug)]
pub struct RAction {
    /// Image of each of the 8 generators as a generator index (x's 0..4, y's 4..8).
    pub perm1: [usize; 2 * DIM],
    /// Row `ij` is the layer-2 image of `c_ij`.
    pub mat2: BitMatrix,
    /// Row `t` is the layer-3 image of `d_t`.
    pub mat3: BitMatrix,
    pub endo: FreeEndomorphism,
}

pub fn r_action() -> RAction {
    let mut perm1 = [0usize; 2 * DIM];
    for i in 0..DIM {
        perm1[i] = DIM + i;
        perm1[DIM + i] = SIGMA[i];
    }
    let endo = FreeEndomorphism::new(
        std::array::from_fn(|i| LayeredWord::y(i)),
        std::array::from_fn(|i| LayeredWord::x(SIGMA[i])),
    );
    let mat2 = BitMatrix::from_rows(LAYER2, endo.c_images.iter().map(|w| w.c_part())).unwrap();
    let mat3 = BitMatrix::from_rows(LAYER3, endo.d_images.iter().map(|w| w.d_part())).unwrap();
    RAction {
        perm1,
        mat2,
        mat3,
        endo,
    }
}

/// The r-invariant subspace of layer 3 generated by the relation vectors.
#[derive(Clone, Debug)]
pub struct RelationSpace {
    pub vectors: BitMatrix,
    pub echelon: Echelon,
}

impl RelationSpace {
    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }
}

/// Span of `{ v · M3^t : t in 0..8, v a relation vector }`.
pub fn relation_space() -> Result<RelationSpace> {
    let rels = expand_relations()?;
    let act = r_action();
    relation_space_from(&rels, &act.mat3)
}

pub fn relation_space_from(rels: &BitMatrix, mat3: &BitMatrix) -> Result<RelationSpace> {
    let mut vectors = BitMatrix::new(LAYER3);
    for v in rels.rows() {
        let mut w = v.bits();
        for _ in 0..8 {
            vectors.push(BitVec::from_bits(w, LAYER3)?)?;
            w = image_row(mat3, w);
        }
    }
    let echelon = echelonize(&vectors);
    Ok(RelationSpace { vectors, echelon })
}

/// Row-vector product `v · M` where row `k` of `M` is the image of `e_k`.
pub(crate) fn image_row(m: &BitMatrix, v: u128) -> u128 {
    Ones::new(v).fold(0u128, |acc, k| acc ^ m.raw_rows()[k])
}

// ----------------------------------------------------------------------
// Presentations
// ----------------------------------------------------------------------

/// A mixed dihedral group with its pc presentation and the definitions of
/// the non-defining pc generators as commutators of earlier ones.
#[derive(Clone, Debug)]
pub struct MixedDihedral {
    pub pc: PcPresentation,
    /// Dimension `n` of `X` and `Y`.
    pub dim: usize,
    /// pc indices of `x_1..x_n`.
    pub x: Vec<usize>,
    /// pc indices of `y_1..y_n`.
    pub y: Vec<usize>,
    /// For each pc generator, `Some((a, b))` if it is defined as `[g_a, g_b]`.
    pub definitions: Vec<Option<(usize, usize)>>,
}

impl MixedDihedral {
    pub fn x_elem(&self, i: usize) -> GroupElement {
        self.pc.generator(self.x[i])
    }

    pub fn y_elem(&self, j: usize) -> GroupElement {
        self.pc.generator(self.y[j])
    }

    /// pc indices of the defining generators, `x`'s then `y`'s.
    pub fn defining(&self) -> Vec<usize> {
        self.x.iter().chain(&self.y).copied().collect()
    }
}

/// `H` together with the data linking it back to `F`.
#[derive(Clone, Debug)]
pub struct HGroup {
    pub group: MixedDihedral,
    pub relations: RelationSpace,
    /// Layer-3 columns (of 48) kept as pc generators, in order.
    pub kept: Vec<usize>,
}

impl HGroup {
    /// Maps an element of `F` to its image in `H`.
    pub fn reduce(&self, w: &LayeredWord) -> GroupElement {
        let d = self.relations.echelon.reduce_raw(w.d as u128);
        let mut bits = w.a as u128 | (w.b as u128) << 4 | (w.c as u128) << 8;
        for (pos, &col) in self.kept.iter().enumerate() {
            if (d >> col) & 1 == 1 {
                bits |= 1u128 << (24 + pos);
            }
        }
        GroupElement(bits)
    }

    /// Canonical lift of an element of `H` to `F`.
    pub fn lift(&self, u: GroupElement) -> LayeredWord {
        let bits = u.bits();
        let mut d = 0u64;
        for (pos, &col) in self.kept.iter().enumerate() {
            if (bits >> (24 + pos)) & 1 == 1 {
                d |= 1u64 << col;
            }
        }
        LayeredWord {
            a: (bits & 0xf) as u8,
            b: ((bits >> 4) & 0xf) as u8,
            c: ((bits >> 8) & 0xffff) as u16,
            d,
        }
    }

    /// Multiplication through `F`: lift, multiply, reduce.
    pub fn multiply_via_free(&self, u: GroupElement, v: GroupElement) -> GroupElement {
        self.reduce(&free_multiply(&self.lift(u), &self.lift(v)))
    }
}

fn h_names(kept: &[usize]) -> Vec<String> {
    let mut names = Vec::new();
    for i in 0..DIM {
        names.push(format!("x{}", i + 1));
    }
    for j in 0..DIM {
        names.push(format!("y{}", j + 1));
    }
    for i in 0..DIM {
        for j in 0..DIM {
            names.push(format!("c{}{}", i + 1, j + 1));
        }
    }
    for &col in kept {
        let t = layer3_basis()[col];
        names.push(match t {
            Triple::X { i, j, k } => format!("dx{}{}{}", i + 1, j + 1, k + 1),
            Triple::Y { i, j, l } => format!("dy{}{}{}", i + 1, j + 1, l + 1),
        });
    }
    names
}

/// Builds a pc presentation from a multiplication routine on exponent
/// vectors, where generator `j`'s conjugate by `i` and squares are read off
/// by multiplying generators.
fn presentation_from_mul(
    names: Vec<String>,
    mul: impl Fn(u128, u128) -> u128,
) -> Result<PcPresentation> {
    let n = names.len();
    let g = |i: usize| 1u128 << i;
    let power = (0..n).map(|i| mul(g(i), g(i))).collect();
    let mut conj = vec![0u128; n * n];
    for j in 0..n {
        for i in 0..j {
            // g_j^{g_i} = g_i^-1 g_j g_i; every generator here is an involution
            // modulo the square, so compute g_i^-1 as g_i * (g_i^2)^-1 via the
            // product g_i g_j g_i when g_i^2 = 1.
            let gi_sq = mul(g(i), g(i));
            assert_eq!(gi_sq, 0, "presentation_from_mul requires involutive generators");
            conj[j * n + i] = mul(mul(g(i), g(j)), g(i));
        }
    }
    PcPresentation::from_parts(names, power, conj)
}

fn h_definitions(kept: &[usize]) -> Vec<Option<(usize, usize)>> {
    let mut defs = vec![None; 2 * DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            defs.push(Some((i, DIM + j)));
        }
    }
    for &col in kept {
        let c = |i: usize, j: usize| 2 * DIM + 4 * i + j;
        defs.push(Some(match layer3_basis()[col] {
            Triple::X { i, j, k } => (c(i, j), k),
            Triple::Y { i, j, l } => (c(i, j), DIM + l),
        }));
    }
    defs
}

/// The mixed dihedral group `H` of order `2^56`.
pub fn build_h() -> Result<HGroup> {
    let relations = relation_space()?;
    let kept: Vec<usize> = complement_basis(&relations.echelon, LAYER3)
        .raw_rows()
        .iter()
        .map(|r| r.trailing_zeros() as usize)
        .collect();
    let names = h_names(&kept);
    let mut h = HGroup {
        group: MixedDihedral {
            pc: PcPresentation::elementary_abelian(vec!["tmp".into()])?,
            dim: DIM,
            x: (0..DIM).collect(),
            y: (DIM..2 * DIM).collect(),
            definitions: h_definitions(&kept),
        },
        relations,
        kept,
    };
    let pc = {
        let hh = &h;
        presentation_from_mul(names, |u, v| {
            hh.multiply_via_free(GroupElement(u), GroupElement(v)).bits()
        })?
    };
    h.group.pc = pc;
    Ok(h)
}

/// Dimension of the toy instance.
pub const TOY_DIM: usize = 2;

/// Class-2 mixed dihedral group on `x1,x2,y1,y2` of order `2^8`: involutive
/// generators, `X` and `Y` abelian, the four `[x_i,y_j]` central involutions.
pub fn build_toy(n: usize) -> Result<MixedDihedral> {
    if n != TOY_DIM {
        return Err(Error::InvalidPresentation(format!("toy instance is fixed at n = {TOY_DIM}")));
    }
    let mut names: Vec<String> = Vec::new();
    names.extend((1..=n).map(|i| format!("x{i}")));
    names.extend((1..=n).map(|j| format!("y{j}")));
    for i in 1..=n {
        for j in 1..=n {
            names.push(format!("c{i}{j}"));
        }
    }
    let total = names.len();
    let cidx = |i: usize, j: usize| 2 * n + n * i + j;
    let mut conj = vec![0u128; total * total];
    for j in 0..total {
        for i in 0..j {
            conj[j * total + i] = 1u128 << j;
        }
    }
    for i in 0..n {
        for j in 0..n {
            // y_j^{x_i} = y_j c_ij
            let yj = n + j;
            conj[yj * total + i] = 1u128 << yj | 1u128 << cidx(i, j);
        }
    }
    let pc = PcPresentation::from_parts(names, vec![0; total], conj)?;
    let mut definitions = vec![None; 2 * n];
    for i in 0..n {
        for j in 0..n {
            definitions.push(Some((i, n + j)));
        }
    }
    Ok(MixedDihedral {
        pc,
        dim: n,
        x: (0..n).collect(),
        y: (n..2 * n).collect(),
        definitions,
    })
}

/// `P = H ⋊ <r>` of order `2^59`.
#[derive(Clone, Debug)]
pub struct PGroup {
    pub pc: PcPresentation,
    /// Number of leading generators `r, r^2, r^4`.
    pub top: usize,
}

impl PGroup {
    pub fn r(&self) -> GroupElement {
        self.pc.generator(0)
    }

    /// Embeds an element of `H` (pc indices shifted by three).
    pub fn embed(&self, u: GroupElement) -> GroupElement {
        GroupElement(u.bits() << self.top)
    }

    /// The `H` part of an element lying in `H`.
    pub fn restrict(&self, u: GroupElement) -> Option<GroupElement> {
        (u.bits() & 0b111 == 0).then(|| GroupElement(u.bits() >> self.top))
    }

    pub fn h_subgroup_gens(&self, h: &HGroup) -> Vec<GroupElement> {
        h.group
            .defining()
            .into_iter()
            .map(|i| self.embed(h.group.pc.generator(i)))
            .collect()
    }
}

/// Applies the `r`-automorphism of `H` (through `F`) `times` times.
pub fn r_power_on_h(h: &HGroup, act: &RAction, u: GroupElement, times: usize) -> GroupElement {
    let mut w = h.lift(u);
    for _ in 0..times {
        w = act.endo.apply(&w);
    }
    h.reduce(&w)
}

pub fn build_p(h: &HGroup) -> Result<PGroup> {
    let act = r_action();
    let hn = h.group.pc.len();
    let n = hn + 3;
    let mut names = vec!["r".to_string(), "r2".to_string(), "r4".to_string()];
    names.extend(h.group.pc.names().iter().cloned());
    let mut power = vec![0u128; n];
    power[0] = 0b010;
    power[1] = 0b100;
    for i in 0..hn {
        power[3 + i] = h.group.pc.power(i).bits() << 3;
    }
    let mut conj = vec![0u128; n * n];
    // r, r^2, r^4 commute among themselves
    conj[n] = 0b010;
    conj[2 * n] = 0b100;
    conj[2 * n + 1] = 0b100;
    for j in 0..hn {
        let g = h.group.pc.generator(j);
        for (top, times) in [(0usize, 1usize), (1, 2), (2, 4)] {
            conj[(3 + j) * n + top] = r_power_on_h(h, &act, g, times).bits() << 3;
        }
        for i in 0..j {
            conj[(3 + j) * n + 3 + i] = h.group.pc.conjugate_gen(j, i).bits() << 3;
        }
    }
    let pc = PcPresentation::from_parts(names, power, conj)?;
    let violations = pc.consistency_check();
    if let Some(first) = violations.first() {
        return Err(Error::Inconsistent {
            count: violations.len(),
            first: first.to_string(),
        });
    }
    Ok(PGroup { pc, top: 3 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_indexing() {
        assert_eq!(layer3_basis().len(), 48);
        assert_eq!(triple_x(0, 0, 0), None);
        assert_eq!(triple_y(2, 1, 1), None);
        assert_eq!(triple_x(0, 2, 3), triple_x(3, 2, 0));
        assert!(triple_x(0, 2, 3).is_some());
    }

    #[test]
    fn small_products() {
        let x1 = LayeredWord::x(0);
        let y1 = LayeredWord::y(0);
        assert!(free_multiply(&x1, &x1).is_identity());
        let w = free_multiply(&y1, &x1);
        assert_eq!(w.raw(), (1, 1, 1, 0));
        let w = free_multiply(&LayeredWord::c(0, 0), &LayeredWord::x(1));
        let t = triple_x(0, 0, 1).unwrap();
        assert_eq!(w.raw(), (0b10, 0, 1, 1 << t));
    }

    #[test]
    fn commutator_examples() {
        let x = LayeredWord::x;
        let y = LayeredWord::y;
        assert!(commutator_expand(&x(0), &x(1)).is_identity());
        assert_eq!(commutator_expand(&x(0), &y(0)), LayeredWord::c(0, 0));
    }
}
