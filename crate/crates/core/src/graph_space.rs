//! Graph spaces: shape enumeration, labelled bases per weight block, IHX and
//! harmonic relations, β images and the rank-one loop normal form.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{beta_power_raw, loop_reading, GraphSum, HairyGraph, Slot, UNLABELED};
use crate::linalg::{Echelon, SparseVec};
use crate::scalar::Q;
use crate::symplectic::{letter_a, letter_b, partner, weight, words_of_weight, Letter, TensorVector, Weight};

/// Labelled trees on `n` vertices with maximum degree 3, as edge lists (Prüfer).
fn trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let total = n.pow(n as u32 - 2);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut c = code;
        for _ in 0..n - 2 {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1usize; n];
        for &x in &seq {
            degree[x] += 1;
        }
        if degree.iter().any(|&d| d > 3) {
            continue;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &x in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf, x));
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

/// Compositions of `d` into `k` positive parts.
fn compositions(d: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=d.saturating_sub(k - 1) {
        for mut rest in compositions(d - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Multisets of `e` unit pairs (i ≤ j) within the free-slot capacities.
fn multigraphs(cap: &mut [usize], e: usize, start: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
    if e == 0 {
        out.push(cur.clone());
        return;
    }
    let n = cap.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    for (idx, &(i, j)) in pairs.iter().enumerate().skip(start) {
        let ok = if i == j { cap[i] >= 2 } else { cap[i] >= 1 && cap[j] >= 1 };
        if !ok {
            continue;
        }
        if i == j {
            cap[i] -= 2;
        } else {
            cap[i] -= 1;
            cap[j] -= 1;
        }
        cur.push((i, j));
        multigraphs(cap, e - 1, idx, cur, out);
        cur.pop();
        if i == j {
            cap[i] += 2;
        } else {
            cap[i] += 1;
            cap[j] += 1;
        }
    }
}

/// Unlabelled graph shapes (hairs carry `UNLABELED`) with `d` units, `k` solid
/// components and the given rank, one canonical representative each.
pub fn shapes(k: usize, d: usize, rank: usize, ordered: bool) -> Vec<HairyGraph> {
    if k == 0 || k > d || d + 2 < 2 * rank {
        return Vec::new();
    }
    let e = rank + k - 1;
    let sizes: Vec<Vec<usize>> = if ordered {
        compositions(d, k)
    } else {
        compositions(d, k).into_iter().filter(|c| c.windows(2).all(|w| w[0] >= w[1])).collect()
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for sz in sizes {
        let mut offsets = vec![0];
        for s in &sz {
            offsets.push(offsets.last().unwrap() + s);
        }
        let mut forests: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for (c, &s) in sz.iter().enumerate() {
            let mut next = Vec::new();
            for f in &forests {
                for t in trees(s) {
                    let mut g = f.clone();
                    g.extend(t.into_iter().map(|(a, b)| (a + offsets[c], b + offsets[c])));
                    next.push(g);
                }
            }
            forests = next;
        }
        let comp: Vec<u8> = (0..d).map(|u| (0..k).find(|&c| u < offsets[c + 1]).unwrap() as u8).collect();
        for forest in forests {
            let mut cap = vec![3usize; d];
            for &(a, b) in &forest {
                cap[a] -= 1;
                cap[b] -= 1;
            }
            let mut dotted_sets = Vec::new();
            multigraphs(&mut cap, e, 0, &mut Vec::new(), &mut dotted_sets);
            for dotted in dotted_sets {
                let g = realize(d, &forest, &dotted, if ordered { comp.clone() } else { vec![0; d] });
                if !g.is_connected() {
                    continue;
                }
                let key = g.shape_key(ordered);
                if seen.insert(key.clone()) {
                    out.push(key);
                }
            }
        }
    }
    out.sort();
    out
}

fn realize(d: usize, solid: &[(usize, usize)], dotted: &[(usize, usize)], comp: Vec<u8>) -> HairyGraph {
    let mut next = vec![0usize; d];
    let mut slots = vec![Slot::Hair(UNLABELED); 3 * d];
    let mut take = |u: usize| {
        let s = 3 * u + next[u];
        next[u] += 1;
        s
    };
    let mut pairs = Vec::new();
    for &(a, b) in solid {
        pairs.push((take(a), take(b), true));
    }
    for &(a, b) in dotted {
        pairs.push((take(a), take(b), false));
    }
    for (s, t, is_solid) in pairs {
        if is_solid {
            slots[s] = Slot::Solid(t as u16);
            slots[t] = Slot::Solid(s as u16);
        } else {
            slots[s] = Slot::Dotted { peer: t as u16, out: true };
            slots[t] = Slot::Dotted { peer: s as u16, out: false };
        }
    }
    HairyGraph::raw(slots, comp)
}

/// Parameters of a graph space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceParams {
    pub k: usize,
    pub d: usize,
    pub g: usize,
    pub ordered: bool,
    pub harmonic: bool,
    pub sigma: i8,
}

/// A basis of canonical graphs together with its relation subspace.
#[derive(Clone, Debug)]
pub struct GraphSpace {
    pub params: SpaceParams,
    basis: Vec<HairyGraph>,
    index: HashMap<HairyGraph, usize>,
    relations: Echelon,
}

impl GraphSpace {
    pub fn empty(params: SpaceParams) -> Self {
        GraphSpace { params, basis: Vec::new(), index: HashMap::new(), relations: Echelon::new() }
    }

    /// Builds the space on an explicit basis; the relation subspace is
    /// generated from it.
    pub fn from_basis(params: SpaceParams, basis: Vec<HairyGraph>) -> Result<Self> {
        let index: HashMap<HairyGraph, usize> = basis.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let mut space = GraphSpace { params, basis, index, relations: Echelon::new() };
        let rels = space.relation_vectors()?;
        for r in &rels {
            space.relations.insert(r);
        }
        Ok(space)
    }

    pub fn basis(&self) -> &[HairyGraph] {
        &self.basis
    }

    pub fn basis_len(&self) -> usize {
        self.basis.len()
    }

    pub fn relation_rank(&self) -> usize {
        self.relations.rank()
    }

    pub fn relations(&self) -> &Echelon {
        &self.relations
    }

    /// Effective dimension |basis| − dim(relations).
    pub fn dim(&self) -> usize {
        self.basis.len() - self.relations.rank()
    }

    pub fn index_of(&self, g: &HairyGraph) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Coordinates of a sum whose summands are canonical in this space.
    pub fn vector(&self, v: &GraphSum) -> Result<SparseVec> {
        let mut pairs = Vec::with_capacity(v.len());
        for (g, c) in v.iter() {
            let i = self.index_of(g).ok_or_else(|| Error::Invariant(format!("graph {g} is outside the basis")))?;
            pairs.push((i, c.clone()));
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    pub fn sum(&self, v: &SparseVec) -> GraphSum {
        let mut out = GraphSum::new(self.params.ordered, self.params.sigma);
        for (i, c) in v.iter() {
            out.add(&self.basis[*i], c);
        }
        out
    }

    pub fn in_relations(&self, v: &SparseVec) -> bool {
        self.relations.reduce(v).is_zero()
    }

    fn add_graph(&self, acc: &mut Vec<(usize, Q)>, g: &HairyGraph, c: i64) -> Result<()> {
        let (canon, s) = g.canonical(self.params.ordered, self.params.sigma);
        if s == 0 {
            return Ok(());
        }
        let i = self.index_of(&canon).ok_or_else(|| Error::Invariant(format!("relation leaves the basis: {canon}")))?;
        acc.push((i, Q::int(c * s as i64)));
        Ok(())
    }

    /// IHX relations at every solid edge, plus the harmonic relations when flagged.
    pub fn relation_vectors(&self) -> Result<Vec<SparseVec>> {
        let chunks: Vec<Result<Vec<SparseVec>>> = self
            .basis
            .par_iter()
            .map(|g| {
                let mut out = Vec::new();
                for (s, t) in g.solid_edges() {
                    let mut acc = Vec::new();
                    self.add_graph(&mut acc, g, 1)?;
                    for h in ihx_partners(g, s, t) {
                        self.add_graph(&mut acc, &h, 1)?;
                    }
                    let v = SparseVec::from_pairs(acc);
                    if !v.is_zero() {
                        out.push(v);
                    }
                }
                if self.params.harmonic {
                    for r in harmonic_relations(g, self.params.g) {
                        let mut acc = Vec::new();
                        for (h, c) in r {
                            self.add_graph(&mut acc, &h, c)?;
                        }
                        let v = SparseVec::from_pairs(acc);
                        if !v.is_zero() {
                            out.push(v);
                        }
                    }
                }
                Ok(out)
            })
            .collect();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for c in chunks {
            for v in c? {
                if seen.insert(v.entries().to_vec()) {
                    out.push(v);
                }
            }
        }
        Ok(out)
    }

    /// Restriction to graphs of rank r.
    pub fn rank_stratum(&self, r: usize) -> Result<GraphSpace> {
        let basis: Vec<HairyGraph> = self.basis.iter().filter(|g| g.rank() == r as i64).cloned().collect();
        GraphSpace::from_basis(self.params, basis)
    }
}

/// Rewires slots: the content of slot `s` moves to `perm[s]`.
fn rewire(g: &HairyGraph, perm: &[usize]) -> HairyGraph {
    let mut slots = vec![Slot::Hair(0); g.slots().len()];
    for (s, &t) in perm.iter().enumerate() {
        slots[t] = match g.slot(s) {
            Slot::Hair(l) => Slot::Hair(l),
            Slot::Solid(p) => Slot::Solid(perm[p as usize] as u16),
            Slot::Dotted { peer, out } => Slot::Dotted { peer: perm[peer as usize] as u16, out },
        };
    }
    HairyGraph::new(slots, g.comp().to_vec()).expect("rewiring keeps the graph well formed")
}

/// The two other terms of the IHX relation at the solid edge (s, t).
pub fn ihx_partners(g: &HairyGraph, s: usize, t: usize) -> [HairyGraph; 2] {
    let (u, i) = (s / 3, s % 3);
    let (v, j) = (t / 3, t % 3);
    let a = 3 * u + (i + 1) % 3;
    let b = 3 * u + (i + 2) % 3;
    let c = 3 * v + (j + 1) % 3;
    let id: Vec<usize> = (0..g.slots().len()).collect();
    // A, B, C cycled with D fixed
    let mut p1 = id.clone();
    p1[a] = c;
    p1[b] = a;
    p1[c] = b;
    let mut p2 = id;
    p2[a] = b;
    p2[b] = c;
    p2[c] = a;
    [rewire(g, &p1), rewire(g, &p2)]
}

/// For every pair of hairs carrying partner letters, the graph with ω
/// inserted at that pair and the other labels kept.
fn harmonic_relations(g: &HairyGraph, genus: usize) -> Vec<Vec<(HairyGraph, i64)>> {
    let hairs = g.hair_slots();
    let labels = g.labels();
    let mut out = Vec::new();
    for x in 0..hairs.len() {
        for y in x + 1..hairs.len() {
            if labels[x] != partner(labels[y]) {
                continue;
            }
            let mut terms = Vec::with_capacity(2 * genus);
            for k in 1..=genus {
                for (p, q, c) in [(letter_a(k), letter_b(k), 1), (letter_b(k), letter_a(k), -1)] {
                    let mut h = g.clone();
                    h.set_hair(hairs[x], p);
                    h.set_hair(hairs[y], q);
                    terms.push((h, c));
                }
            }
            out.push(terms);
        }
    }
    out
}

/// All nonzero canonical labellings of the given shapes by words of weight μ.
pub fn labelled_basis(shapes: &[HairyGraph], g: usize, mu: &[i8], ordered: bool, sigma: i8) -> Vec<HairyGraph> {
    let mut set: Vec<HairyGraph> = shapes
        .par_iter()
        .flat_map_iter(|shape| {
            let s = shape.hairs();
            let words = words_of_weight(g, s, mu);
            words
                .into_iter()
                .filter_map(|w| {
                    let (c, sign) = shape.with_labels(&w).canonical(ordered, sigma);
                    (sign != 0).then_some(c)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    set.sort();
    set.dedup();
    set
}

/// One weight block of a graph space, optionally restricted to one rank.
pub fn enumerate_block(params: SpaceParams, rank: Option<usize>, mu: &[i8]) -> Result<GraphSpace> {
    if params.k == 0 || params.k > params.d {
        return Ok(GraphSpace::empty(params));
    }
    let ranks: Vec<usize> = match rank {
        Some(r) => vec![r],
        None => (0..=(params.d + 2) / 2).collect(),
    };
    let mut basis = Vec::new();
    for r in ranks {
        let sh = shapes(params.k, params.d, r, params.ordered);
        basis.extend(labelled_basis(&sh, params.g, mu, params.ordered, params.sigma));
    }
    basis.sort();
    GraphSpace::from_basis(params, basis)
}

/// The full space (every weight), for small parameters.
pub fn enumerate_space(params: SpaceParams) -> Result<GraphSpace> {
    if params.k == 0 || params.k > params.d {
        return Ok(GraphSpace::empty(params));
    }
    let mut basis = Vec::new();
    for r in 0..=(params.d + 2) / 2 {
        let sh = shapes(params.k, params.d, r, params.ordered);
        for shape in &sh {
            let s = shape.hairs();
            let n = 2 * params.g;
            let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
            for _ in 0..s {
                words = words
                    .into_iter()
                    .flat_map(|w| {
                        (0..n as Letter).map(move |x| {
                            let mut v = w.clone();
                            v.push(x);
                            v
                        })
                    })
                    .collect();
            }
            for w in words {
                let (c, sign) = shape.with_labels(&w).canonical(params.ordered, params.sigma);
                if sign != 0 {
                    basis.push(c);
                }
            }
        }
    }
    basis.sort();
    basis.dedup();
    GraphSpace::from_basis(params, basis)
}

// ---------------------------------------------------------------------------
// quotients by β images

/// Dimension data of one block of H_{1,d}⟨V⟩ / β^{d-1}(H^ord_{d,d}⟨V⟩).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientBlock {
    pub rank: usize,
    pub mu: Weight,
    pub basis: usize,
    pub relations: usize,
    pub dim: usize,
}

/// Raw β^{d-1} images of the ordered shapes of one rank, computed once per shape.
pub fn beta_images(d: usize, rank: usize, sigma: i8) -> Result<Vec<(HairyGraph, Vec<(i8, HairyGraph)>)>> {
    shapes(d, d, rank, true)
        .into_par_iter()
        .map(|s| {
            let img = beta_power_raw(&s, d - 1, sigma)?;
            Ok((s, img))
        })
        .collect()
}

pub fn quotient_block(d: usize, g: usize, rank: usize, mu: &[i8], sigma: i8, harmonic: bool) -> Result<QuotientBlock> {
    let params = SpaceParams { k: 1, d, g, ordered: false, harmonic, sigma };
    let space = enumerate_block(params, Some(rank), mu)?;
    let mut ech = space.relations.clone();
    let relations = ech.rank();
    if ech.rank() < space.basis_len() {
        'outer: for (shape, img) in beta_images(d, rank, sigma)? {
            let words = words_of_weight(g, shape.hairs(), mu);
            for w in words {
                let mut acc = Vec::new();
                for (c, h) in &img {
                    space.add_graph(&mut acc, &h.with_labels(&w).unordered(), *c as i64)?;
                }
                let v = SparseVec::from_pairs(acc);
                if !v.is_zero() {
                    ech.insert(&v);
                    if ech.rank() == space.basis_len() {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(QuotientBlock { rank, mu: mu.to_vec(), basis: space.basis_len(), relations, dim: space.basis_len() - ech.rank() })
}

// ---------------------------------------------------------------------------
// loop normal form

/// Rank-one, single-component space of one weight with pure loops ordered
/// last, carrying IHX relations only.
#[derive(Clone, Debug)]
pub struct LoopSpace {
    pub space: GraphSpace,
    first_loop: usize,
}

impl LoopSpace {
    pub fn build(d: usize, g: usize, mu: &[i8], sigma: i8) -> Result<Self> {
        let params = SpaceParams { k: 1, d, g, ordered: false, harmonic: false, sigma };
        let sh = shapes(1, d, 1, false);
        let mut basis = labelled_basis(&sh, g, mu, false, sigma);
        basis.sort_by_key(|x| crate::graph::is_pure_loop(x));
        let first_loop = basis.iter().position(crate::graph::is_pure_loop).unwrap_or(basis.len());
        Ok(LoopSpace { space: GraphSpace::from_basis(params, basis)?, first_loop })
    }

    /// Rewrites a sum as pure loops modulo IHX and reads the loops as words.
    pub fn normal_form(&self, v: &GraphSum) -> Result<TensorVector> {
        let x = self.space.relations.reduce(&self.space.vector(v)?);
        let mut out = TensorVector::zero(self.space.params.g, self.space.params.d);
        for (i, c) in x.iter() {
            if *i < self.first_loop {
                return Err(Error::LoopNormalForm(format!(
                    "graph {} is not a combination of pure loops modulo IHX",
                    self.space.basis[*i]
                )));
            }
            out.add_scaled(c, &loop_reading(&self.space.basis[*i], self.space.params.g)?);
        }
        Ok(out)
    }
}

/// Loop normal form of an arbitrary rank-one sum, block by block.
pub fn loop_normal_form(v: &GraphSum, g: usize) -> Result<TensorVector> {
    let mut blocks: BTreeMap<Weight, GraphSum> = BTreeMap::new();
    let mut d = None;
    for (h, c) in v.iter() {
        if h.components() != 1 || h.rank() != 1 {
            return Err(Error::LoopNormalForm(format!("summand {h} is not a connected rank-one graph")));
        }
        d = Some(h.units());
        blocks.entry(weight(g, &h.labels())).or_insert_with(|| GraphSum::new(false, v.sigma())).add(h, c);
    }
    let Some(d) = d else {
        return Ok(TensorVector::zero(g, 0));
    };
    let mut out = TensorVector::zero(g, d);
    for (mu, part) in blocks {
        let ls = LoopSpace::build(d, g, &mu, v.sigma())?;
        out = out.plus(&ls.normal_form(&part)?);
    }
    Ok(out)
}

/// Reflection-normalized form: each word w is replaced by the smaller of w and
/// its reverse, the reverse carrying `eps`.
pub fn reflection_normal(t: &TensorVector, eps: i8) -> TensorVector {
    let mut out = TensorVector::zero(t.g(), t.d());
    for (w, c) in t.iter() {
        let mut r = w.clone();
        r.reverse();
        if r < *w {
            out.add_term(r, c * &Q::int(eps as i64));
        } else {
            out.add_term(w.clone(), c.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// figures and the commutator case

/// Sum of class representatives under rotations only.
pub fn cyclic_normal(t: &TensorVector) -> TensorVector {
    let mut out = TensorVector::zero(t.g(), t.d());
    for (w, c) in t.iter() {
        let rep = (0..w.len().max(1))
            .map(|r| {
                let mut v = w.clone();
                v.rotate_left(r);
                v
            })
            .min()
            .unwrap_or_default();
        out.add_term(rep, c.clone());
    }
    out
}

/// Loop-chain family: the ordered d-cycle of tripods and the expected
/// β^{d-1} image L(v1..vd) − L(vd v1..v_{d-1}).
pub fn loop_chain(w: &[Letter], sigma: i8) -> Result<(GraphSum, GraphSum, GraphSum)> {
    let d = w.len();
    let input = GraphSum::single(crate::graph::ordered_loop(w), true, sigma);
    let output = crate::graph::beta_power(&input, d - 1)?.forget_order();
    let mut rotated = vec![w[d - 1]];
    rotated.extend_from_slice(&w[..d - 1]);
    let mut expected = GraphSum::new(false, sigma);
    expected.add(&crate::graph::pure_loop(w), &Q::ONE);
    expected.add(&crate::graph::pure_loop(&rotated), &-Q::ONE);
    Ok((input, output, expected))
}

/// Branched panel: a 3-tripod loop (units 1, 2, 4) with unit 3 hanging off unit 4.
pub fn figure_branched(v: [Letter; 4]) -> HairyGraph {
    HairyGraph::builder(4)
        .hair(0, 1, v[0])
        .hair(1, 1, v[1])
        .hair(2, 1, v[2])
        .hair(2, 2, v[3])
        .dotted((0, 2), (1, 0))
        .dotted((1, 2), (3, 0))
        .dotted((3, 2), (0, 0))
        .dotted((3, 1), (2, 0))
        .order(vec![0, 1, 2, 3])
        .build()
        .expect("well formed")
}

/// Commutator panel at d = 4: trees a = {1, 2} and b = {3} meet along two dotted
/// edges; unit 4 later hangs off unit 3.
pub fn figure_commutator(v: [Letter; 4]) -> HairyGraph {
    HairyGraph::builder(4)
        .hair(0, 2, v[0])
        .hair(1, 1, v[1])
        .hair(3, 1, v[2])
        .hair(3, 2, v[3])
        .dotted((0, 0), (1, 0))
        .dotted((0, 1), (2, 0))
        .dotted((2, 1), (1, 2))
        .dotted((2, 2), (3, 0))
        .order(vec![0, 1, 2, 3])
        .build()
        .expect("well formed")
}

/// Two tripods joined by two dotted edges, hairs x and y.
pub fn double_edge(x: Letter, y: Letter) -> HairyGraph {
    HairyGraph::builder(2)
        .hair(0, 0, x)
        .hair(1, 0, y)
        .dotted((0, 1), (1, 1))
        .dotted((0, 2), (1, 2))
        .order(vec![0, 1])
        .build()
        .expect("well formed")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommutatorOutcome {
    Inapplicable(String),
    Checked {
        step: usize,
        a_hat: TensorVector,
        b_hat: TensorVector,
        image: TensorVector,
        matches_commutator: bool,
        commutator_cyclic_zero: bool,
        image_dihedral_zero: bool,
        normal_form_agrees: bool,
    },
}

/// Runs β^{d-1} on an ordered rank-one graph step by step. If exactly one step
/// contracts a pair of edges, reads both results around their loops and checks
/// they form â b̂ − b̂ â (up to the loop reflection), which vanishes modulo rotations.
pub fn commutator_image_test(g: &HairyGraph, sigma: i8) -> Result<CommutatorOutcome> {
    let d = g.units();
    if g.rank() != 1 || g.components() != d {
        return Err(Error::Malformed("commutator test needs a rank-one graph of separate tripods".into()));
    }
    let mut cur = vec![(1i8, g.clone())];
    let mut split: Option<(usize, Vec<usize>)> = None;
    for step in 0..d - 1 {
        let mut next = Vec::new();
        for (c, h) in &cur {
            let out = crate::graph::beta_raw(h, sigma)?;
            if out.len() == 2 && split.is_none() {
                let a: Vec<usize> = (0..d).filter(|&u| h.comp()[u] == 0).collect();
                split = Some((step, a));
            } else if out.len() != 1 {
                return Ok(CommutatorOutcome::Inapplicable(format!("step {} has {} contractions", step + 1, out.len())));
            }
            next.extend(out.into_iter().map(|(s, x)| (c * s, x)));
        }
        cur = next;
    }
    let Some((step, a_units)) = split else {
        return Ok(CommutatorOutcome::Inapplicable("every step is a unique contraction".into()));
    };
    let gen = g.labels().iter().map(|&l| l as usize / 2 + 1).max().unwrap_or(1);
    let mut reads = Vec::new();
    for (c, h) in &cur {
        let pieces = crate::graph::loop_pieces(h, gen)?;
        let mut sign = *c as i64;
        let mut blocks: Vec<(bool, TensorVector)> = Vec::new();
        for (u, s, t) in pieces {
            sign *= s as i64;
            let in_a = a_units.contains(&u);
            match blocks.last_mut() {
                Some((side, acc)) if *side == in_a => *acc = acc.concat(&t),
                _ => blocks.push((in_a, t)),
            }
        }
        if blocks.len() != 2 {
            return Ok(CommutatorOutcome::Inapplicable("the loop does not split into two arcs".into()));
        }
        reads.push((Q::int(sign), blocks));
    }
    let (sa, ba) = &reads[0];
    let (sb, bb) = &reads[1];
    let part = |blocks: &Vec<(bool, TensorVector)>, a: bool| blocks.iter().find(|(s, _)| *s == a).unwrap().1.clone();
    let (a_hat, b_hat) = (part(ba, true), part(ba, false));
    let f_a = ba[0].1.concat(&ba[1].1).scale(sa);
    let f_b = bb[0].1.concat(&bb[1].1).scale(sb);
    let image = f_a.plus(&f_b);
    let eps = if d % 2 == 0 { sigma } else { -sigma };
    let commutator = a_hat.concat(&b_hat).minus(&b_hat.concat(&a_hat));
    let matches_commutator = reflection_normal(&image, eps) == reflection_normal(&commutator, eps)
        || reflection_normal(&image, eps) == reflection_normal(&commutator.scale(&-Q::ONE), eps);
    let commutator_cyclic_zero = cyclic_normal(&commutator).is_zero();
    let image_dihedral_zero = crate::dihedral::dihedral_normal(&image, eps)?.is_zero();
    let mut sum = GraphSum::new(false, sigma);
    for (c, h) in &cur {
        sum.add(&h.unordered(), &Q::int(*c as i64));
    }
    let lnf = loop_normal_form(&sum, gen)?;
    let normal_form_agrees = reflection_normal(&lnf, eps) == reflection_normal(&image, eps);
    Ok(CommutatorOutcome::Checked {
        step: step + 1,
        a_hat,
        b_hat,
        image,
        matches_commutator,
        commutator_cyclic_zero,
        image_dihedral_zero,
        normal_form_agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pure_loop, tree_graph};

    #[test]
    fn tree_counts() {
        assert_eq!(trees(3).len(), 3);
        assert_eq!(trees(4).len(), 16);
        assert_eq!(trees(5).len(), 125 - 5);
    }

    #[test]
    fn shape_counts() {
        // one tripod, rank 0: three hairs
        assert_eq!(shapes(1, 1, 0, false).len(), 1);
        // one tripod with a dotted self-loop
        assert_eq!(shapes(1, 1, 1, false).len(), 1);
        // two tripods, one solid edge: rank 1 has the theta-like loop and the two one-sided loops
        assert!(shapes(1, 2, 1, false).len() >= 2);
        assert!(shapes(2, 2, 0, true).len() == 1);
        assert!(shapes(3, 2, 0, true).is_empty());
    }

    #[test]
    fn single_tripod_space() {
        let p = SpaceParams { k: 1, d: 1, g: 1, ordered: false, harmonic: false, sigma: -1 };
        let s = enumerate_space(p).unwrap();
        // rank 0 tripods on {a1, b1} all vanish by alternation; rank 1 has one hair
        assert_eq!(s.basis().iter().filter(|g| g.rank() == 0).count(), 0);
        assert_eq!(s.basis().iter().filter(|g| g.rank() == 1).count(), 2);
    }

    #[test]
    fn ihx_kills_jacobi() {
        let p = SpaceParams { k: 1, d: 2, g: 2, ordered: false, harmonic: false, sigma: -1 };
        let space = enumerate_block(p, Some(0), &[0, 0]).unwrap();
        assert!(space.dim() < space.basis_len());
        let t = tree_graph(0, &[1, 2, 3]);
        assert!(space.index_of(&t.canonical(false, -1).0).is_some());
    }

    #[test]
    fn pure_loop_normal_form() {
        let w = vec![0u8, 1, 2];
        let s = GraphSum::single(pure_loop(&w), false, -1);
        let t = loop_normal_form(&s, 2).unwrap();
        assert_eq!(reflection_normal(&t, 1), reflection_normal(&TensorVector::word(2, w), 1));
        assert!(loop_normal_form(&GraphSum::new(false, -1), 2).unwrap().is_zero());
    }
}
