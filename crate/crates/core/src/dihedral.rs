//! The dihedral group D_{2d} acting on tensor positions, and coinvariants.
//!
//! Element `(r, f)` is ρ^r ∘ τ^f where ρ(v1..vd) = (vd, v1, .., v_{d-1}) and
//! τ reverses the word. Reflections carry the character value ε.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, Echelon, SparseMatrix, SparseVec};
use crate::scalar::Q;
use crate::symplectic::{dominant_weights, omega_insertions, orbit_size, words_of_weight, TensorVector, WordIndex};

pub type Sym = u8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DihedralElement {
    pub rot: usize,
    pub reflect: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DihedralGroup {
    d: usize,
    eps: i8,
}

impl DihedralGroup {
    pub fn new(d: usize, eps: i8) -> Result<Self> {
        if d == 0 {
            return Err(Error::Infeasible("dihedral group needs d >= 1".into()));
        }
        if eps != 1 && eps != -1 {
            return Err(Error::Infeasible(format!("reflection sign must be ±1, got {eps}")));
        }
        Ok(DihedralGroup { d, eps })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn eps(&self) -> i8 {
        self.eps
    }

    pub fn identity(&self) -> DihedralElement {
        DihedralElement { rot: 0, reflect: false }
    }

    pub fn elements(&self) -> Vec<DihedralElement> {
        let mut out: Vec<DihedralElement> = (0..self.d).map(|rot| DihedralElement { rot, reflect: false }).collect();
        out.extend((0..self.d).map(|rot| DihedralElement { rot, reflect: true }));
        out
    }

    /// Position map: the letter at position `k` moves to `perm[k]`.
    pub fn perm(&self, e: DihedralElement) -> Vec<usize> {
        (0..self.d)
            .map(|k| {
                let k = if e.reflect { self.d - 1 - k } else { k };
                (k + e.rot) % self.d
            })
            .collect()
    }

    pub fn character(&self, e: DihedralElement) -> i8 {
        if e.reflect {
            self.eps
        } else {
            1
        }
    }

    /// `a ∘ b` (apply `b` first).
    pub fn compose(&self, a: DihedralElement, b: DihedralElement) -> DihedralElement {
        let pa = self.perm(a);
        let pb = self.perm(b);
        let target: Vec<usize> = pb.iter().map(|&k| pa[k]).collect();
        self.elements().into_iter().find(|e| self.perm(*e) == target).expect("closed under composition")
    }

    pub fn cycles(&self, e: DihedralElement) -> usize {
        cycle_type(&self.perm(e)).len()
    }

    pub fn act(&self, e: DihedralElement, w: &[Sym]) -> Result<(Vec<Sym>, i8)> {
        if w.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: w.len() });
        }
        let p = self.perm(e);
        let mut out = vec![0; self.d];
        for (k, &x) in w.iter().enumerate() {
            out[p[k]] = x;
        }
        Ok((out, self.character(e)))
    }

    /// Canonical class of `w`: smallest word of its orbit and the sign with
    /// w ≡ sign · rep in the coinvariants.
    pub fn canonical(&self, w: &[Sym]) -> Result<DihedralClass> {
        let mut best: Option<(Vec<Sym>, i8)> = None;
        let mut zero = false;
        for e in self.elements() {
            let (v, s) = self.act(e, w)?;
            match &best {
                Some((b, bs)) if *b == v => {
                    if *bs != s {
                        zero = true;
                    }
                }
                Some((b, _)) if *b < v => {}
                _ => {
                    best = Some((v, s));
                    zero = false;
                }
            }
        }
        let (word, sign) = best.expect("group is nonempty");
        Ok(if zero { DihedralClass::Zero } else { DihedralClass::Class { word, sign } })
    }
}

/// Image of a tensor in the coinvariants, written on canonical class words.
pub fn dihedral_normal(t: &TensorVector, eps: i8) -> Result<TensorVector> {
    let mut out = TensorVector::zero(t.g(), t.d());
    if t.d() == 0 {
        return Ok(t.clone());
    }
    let gp = DihedralGroup::new(t.d(), eps)?;
    for (w, c) in t.iter() {
        if let DihedralClass::Class { word, sign } = gp.canonical(w)? {
            out.add_term(word, c * &Q::int(sign as i64));
        }
    }
    Ok(out)
}

/// Sorted cycle lengths of a permutation given as an image list.
pub fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DihedralClass {
    Zero,
    Class { word: Vec<Sym>, sign: i8 },
}

/// Coinvariants of the word space on `n` letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinvariantSpace {
    pub n: usize,
    pub d: usize,
    pub eps: i8,
    pub dim: usize,
    pub classes: Vec<Vec<Sym>>,
}

fn all_words(n: usize, d: usize) -> Vec<Vec<Sym>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n as Sym).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// Orbit enumeration: one basis class per orbit that does not contain its negative.
pub fn coinvariant_space(n: usize, d: usize, eps: i8) -> Result<CoinvariantSpace> {
    let gp = DihedralGroup::new(d, eps)?;
    let mut classes = BTreeSet::new();
    for w in all_words(n, d) {
        if let DihedralClass::Class { word, .. } = gp.canonical(&w)? {
            classes.insert(word);
        }
    }
    Ok(CoinvariantSpace { n, d, eps, dim: classes.len(), classes: classes.into_iter().collect() })
}

/// Relation vectors w − χ(g)·g·w for the generators ρ and τ.
fn dihedral_relations(gp: &DihedralGroup, index: &WordIndex) -> Vec<SparseVec> {
    let gens = [DihedralElement { rot: 1, reflect: false }, DihedralElement { rot: 0, reflect: true }];
    let mut out = Vec::new();
    for (i, w) in index.words().iter().enumerate() {
        for e in gens {
            let (v, s) = gp.act(e, w).expect("length checked");
            let j = index.get(&v).expect("orbit closed");
            out.push(SparseVec::from_pairs([(i, Q::ONE), (j, -Q::int(s as i64))]));
        }
    }
    out
}

/// The same dimension by linear algebra: n^d minus the rank of the relation span.
pub fn coinvariant_dim_linear(n: usize, d: usize, eps: i8) -> Result<usize> {
    let gp = DihedralGroup::new(d, eps)?;
    let index = WordIndex::new(all_words(n, d));
    let mut e = Echelon::new();
    for r in dihedral_relations(&gp, &index) {
        e.insert(&r);
    }
    Ok(index.len() - e.rank())
}

/// Invariants {v : g·v = χ(g) v}, computed as a kernel.
pub fn invariant_dim(n: usize, d: usize, eps: i8) -> Result<usize> {
    let gp = DihedralGroup::new(d, eps)?;
    let index = WordIndex::new(all_words(n, d));
    // kernel of the stacked (χ(g)g − 1) matrices
    let mut rows: Vec<SparseVec> = Vec::new();
    for e in [DihedralElement { rot: 1, reflect: false }, DihedralElement { rot: 0, reflect: true }] {
        let mut per_row: HashMap<usize, Vec<(usize, Q)>> = HashMap::new();
        for (i, w) in index.words().iter().enumerate() {
            let (v, s) = gp.act(e, w)?;
            let j = index.get(&v).unwrap();
            per_row.entry(j).or_default().push((i, Q::int(s as i64)));
            per_row.entry(i).or_default().push((i, -Q::ONE));
        }
        let mut keys: Vec<usize> = per_row.keys().copied().collect();
        keys.sort_unstable();
        rows.extend(keys.into_iter().map(|k| SparseVec::from_pairs(per_row.remove(&k).unwrap())));
    }
    let m = SparseMatrix::from_rows(index.len(), rows)?;
    Ok(kernel_basis(&m).dim())
}

/// (1/2d) Σ_g χ(g) n^{cycles(g)}.
pub fn burnside_dim(n: usize, d: usize, eps: i8) -> Result<Q> {
    if n == 0 {
        return Err(Error::Infeasible("burnside_dim needs n >= 1".into()));
    }
    let gp = DihedralGroup::new(d, eps)?;
    let mut total = BigInt::from(0);
    for e in gp.elements() {
        total += BigInt::from(gp.character(e)) * BigInt::from(n).pow(gp.cycles(e) as u32);
    }
    let q = Q::from(total) / Q::int(2 * d as i64);
    if !q.is_integer() || q.signum() < 0 {
        return Err(Error::Invariant(format!("Burnside average {q} is not a nonnegative integer")));
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// [V^<d>]_{D_2d}

/// One weight block of [V^<d>]_{D_2d} = V^{⊗d} / (W + dihedral relations).
#[derive(Clone, Debug)]
pub struct TargetBlock {
    pub g: usize,
    pub d: usize,
    pub mu: Vec<i8>,
    pub index: WordIndex,
    relations: Echelon,
}

impl TargetBlock {
    pub fn build(g: usize, d: usize, eps: i8, mu: &[i8]) -> Result<Self> {
        Self::build_with_order(g, d, eps, mu, words_of_weight(g, d, mu))
    }

    /// Same block with a caller-chosen word order (used to check order independence).
    pub fn build_with_order(g: usize, d: usize, eps: i8, mu: &[i8], words: Vec<Vec<Sym>>) -> Result<Self> {
        let gp = DihedralGroup::new(d, eps)?;
        let index = WordIndex::new(words);
        let mut relations = Echelon::new();
        for t in omega_insertions(g, d, mu) {
            relations.insert(&index.vector(&t)?);
        }
        for r in dihedral_relations(&gp, &index) {
            relations.insert(&r);
        }
        Ok(TargetBlock { g, d, mu: mu.to_vec(), index, relations })
    }

    pub fn dim(&self) -> usize {
        self.index.len() - self.relations.rank()
    }

    /// Normal form of a tensor in the quotient.
    pub fn reduce(&self, t: &TensorVector) -> Result<SparseVec> {
        Ok(self.relations.reduce(&self.index.vector(t)?))
    }
}

/// dim [V^<d>]_{D_2d} summed over weight blocks.
pub fn harmonic_coinvariant_dim(g: usize, d: usize, eps: i8) -> Result<u64> {
    let mut total = 0;
    for mu in dominant_weights(g, d) {
        total += orbit_size(&mu) * TargetBlock::build(g, d, eps, &mu)?.dim() as u64;
    }
    Ok(total)
}
