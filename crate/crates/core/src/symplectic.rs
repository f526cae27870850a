//! The symplectic space V, its tensor powers, contractions and the harmonic
//! part V^<d>.
//!
//! Basis letters are small integers: `2i` is `a_{i+1}` and `2i + 1` is
//! `b_{i+1}`, so the natural integer order is the alphabet order
//! `a1 < b1 < a2 < b2 < ...`. The torus weight of `a_i` is `+e_i` and of `b_i`
//! is `-e_i`; every map in this module preserves weight, which is how the
//! heavier computations are split into independent blocks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, Coordinates, Echelon, SparseMatrix, SparseVec, Subspace};
use crate::scalar::Q;

pub type Letter = u8;
pub type Word = Vec<Letter>;

pub fn letter_a(i: usize) -> Letter {
    (2 * (i - 1)) as Letter
}

pub fn letter_b(i: usize) -> Letter {
    (2 * (i - 1) + 1) as Letter
}

/// The symplectic partner: `a_i <-> b_i`.
pub fn partner(x: Letter) -> Letter {
    x ^ 1
}

pub fn omega(x: Letter, y: Letter) -> i64 {
    if x ^ 1 != y {
        0
    } else if x & 1 == 0 {
        1
    } else {
        -1
    }
}

pub fn letter_name(x: Letter) -> String {
    format!("{}{}", if x & 1 == 0 { 'a' } else { 'b' }, x / 2 + 1)
}

pub fn parse_letter(s: &str) -> Result<Letter> {
    let bad = || Error::Parse(format!("bad basis label {s:?}"));
    let mut chars = s.chars();
    let kind = chars.next().ok_or_else(bad)?;
    let idx: usize = chars.as_str().parse().map_err(|_| bad())?;
    if idx == 0 || idx > 64 {
        return Err(bad());
    }
    match kind {
        'a' => Ok(letter_a(idx)),
        'b' => Ok(letter_b(idx)),
        _ => Err(bad()),
    }
}

pub fn word_name(w: &[Letter]) -> String {
    w.iter().map(|&x| letter_name(x)).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticSpace {
    g: usize,
}

impl SymplecticSpace {
    pub fn new(g: usize) -> Result<Self> {
        if g == 0 || g > 32 {
            return Err(Error::Infeasible(format!("genus {g} out of range")));
        }
        Ok(SymplecticSpace { g })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn dim(&self) -> usize {
        2 * self.g
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..(2 * self.g) as Letter
    }

    pub fn omega(&self, x: Letter, y: Letter) -> i64 {
        omega(x, y)
    }

    pub fn omega_matrix(&self) -> SparseMatrix {
        let n = self.dim();
        let rows: Vec<Vec<i64>> =
            (0..n).map(|i| (0..n).map(|j| omega(i as Letter, j as Letter)).collect()).collect();
        SparseMatrix::from_i64(&rows)
    }

    pub fn all_words(&self, d: usize) -> Vec<Word> {
        let n = self.dim() as Letter;
        let mut out = vec![Vec::new()];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..n).map(move |x| {
                        let mut v = w.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

// ---------------------------------------------------------------------------
// weights

pub type Weight = Vec<i8>;

pub fn weight(g: usize, w: &[Letter]) -> Weight {
    let mut mu = vec![0i8; g];
    for &x in w {
        mu[(x / 2) as usize] += if x & 1 == 0 { 1 } else { -1 };
    }
    mu
}

/// Dominant representative under signed permutations.
pub fn dominant(mu: &[i8]) -> Weight {
    let mut v: Weight = mu.iter().map(|x| x.abs()).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Size of the signed-permutation orbit of `mu`.
pub fn orbit_size(mu: &[i8]) -> u64 {
    let g = mu.len() as u64;
    let mut counts: BTreeMap<i8, u64> = BTreeMap::new();
    for x in mu {
        *counts.entry(x.abs()).or_default() += 1;
    }
    let fact = |n: u64| (1..=n).product::<u64>();
    let nonzero = mu.iter().filter(|x| **x != 0).count() as u32;
    fact(g) / counts.values().map(|&c| fact(c)).product::<u64>() * 2u64.pow(nonzero)
}

/// All dominant weights of length-`n` words over `2g` letters.
pub fn dominant_weights(g: usize, n: usize) -> Vec<Weight> {
    fn parts(rem: usize, max: usize, slots: usize, cur: &mut Vec<i8>, out: &mut Vec<Vec<i8>>) {
        if rem == 0 {
            let mut v = cur.clone();
            v.resize(v.len() + slots, 0);
            out.push(v);
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p as i8);
            parts(rem - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in (0..=n).filter(|s| (n - s) % 2 == 0) {
        parts(size, size, g, &mut Vec::new(), &mut out);
    }
    out
}

/// Words of length `n` with the given weight, in lexicographic order.
pub fn words_of_weight(g: usize, n: usize, mu: &[i8]) -> Vec<Word> {
    fn rec(g: usize, n: usize, rem: &mut Vec<i8>, cur: &mut Word, out: &mut Vec<Word>) {
        let left = n - cur.len();
        let need: usize = rem.iter().map(|x| x.unsigned_abs() as usize).sum();
        if need > left || (left - need) % 2 == 1 {
            return;
        }
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in 0..(2 * g) as Letter {
            let i = (x / 2) as usize;
            let s = if x & 1 == 0 { 1 } else { -1 };
            rem[i] -= s;
            cur.push(x);
            rec(g, n, rem, cur, out);
            cur.pop();
            rem[i] += s;
        }
    }
    let mut out = Vec::new();
    rec(g, n, &mut mu.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Index of a word set, used to turn tensors into sparse coordinate vectors.
#[derive(Clone, Debug, Default)]
pub struct WordIndex {
    words: Vec<Word>,
    pos: HashMap<Word, usize>,
}

impl WordIndex {
    pub fn new(words: Vec<Word>) -> Self {
        let pos = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        WordIndex { words, pos }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn get(&self, w: &[Letter]) -> Option<usize> {
        self.pos.get(w).copied()
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn vector(&self, t: &TensorVector) -> Result<SparseVec> {
        let mut pairs = Vec::with_capacity(t.len());
        for (w, c) in t.iter() {
            let i = self.get(w).ok_or_else(|| Error::Invariant(format!("word {} outside index", word_name(w))))?;
            pairs.push((i, c.clone()));
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    pub fn tensor(&self, g: usize, d: usize, v: &SparseVec) -> TensorVector {
        let mut t = TensorVector::zero(g, d);
        for (i, c) in v.iter() {
            t.add_term(self.words[*i].clone(), c.clone());
        }
        t
    }
}

// ---------------------------------------------------------------------------
// tensors

/// Sparse rational combination of length-`d` words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorVector {
    g: usize,
    d: usize,
    terms: BTreeMap<Word, Q>,
}

impl TensorVector {
    pub fn zero(g: usize, d: usize) -> Self {
        TensorVector { g, d, terms: BTreeMap::new() }
    }

    pub fn word(g: usize, w: Word) -> Self {
        let mut t = TensorVector::zero(g, w.len());
        t.terms.insert(w, Q::ONE);
        t
    }

    /// The empty word with coefficient `c`.
    pub fn scalar(g: usize, c: Q) -> Self {
        let mut t = TensorVector::zero(g, 0);
        t.add_term(Vec::new(), c);
        t
    }

    pub fn from_terms(g: usize, d: usize, terms: impl IntoIterator<Item = (Word, Q)>) -> Result<Self> {
        let mut t = TensorVector::zero(g, d);
        for (w, c) in terms {
            if w.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: w.len() });
            }
            if w.iter().any(|&x| x as usize >= 2 * g) {
                return Err(Error::Malformed(format!("letter outside genus {g}")));
            }
            t.add_term(w, c);
        }
        Ok(t)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[Letter]) -> Q {
        self.terms.get(w).cloned().unwrap_or(Q::ZERO)
    }

    pub fn min_word(&self) -> Option<(&Word, &Q)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        debug_assert_eq!(w.len(), self.d);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Q, other: &TensorVector) {
        assert_eq!(self.d, other.d, "length mismatch");
        for (w, x) in other.iter() {
            self.add_term(w.clone(), c * x);
        }
    }

    pub fn scale(&self, c: &Q) -> TensorVector {
        let mut t = TensorVector::zero(self.g, self.d);
        if !c.is_zero() {
            t.terms = self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect();
        }
        t
    }

    pub fn plus(&self, other: &TensorVector) -> TensorVector {
        let mut t = self.clone();
        t.add_scaled(&Q::ONE, other);
        t
    }

    pub fn minus(&self, other: &TensorVector) -> TensorVector {
        let mut t = self.clone();
        t.add_scaled(&-Q::ONE, other);
        t
    }

    /// Tensor (concatenation) product.
    pub fn concat(&self, other: &TensorVector) -> TensorVector {
        let mut t = TensorVector::zero(self.g, self.d + other.d);
        for (u, x) in self.iter() {
            for (v, y) in other.iter() {
                let mut w = u.clone();
                w.extend_from_slice(v);
                t.add_term(w, x * y);
            }
        }
        t
    }

    /// `uv - vu` in the tensor algebra.
    pub fn commutator(&self, other: &TensorVector) -> TensorVector {
        self.concat(other).minus(&other.concat(self))
    }

    fn check_pair(&self, i: usize, j: usize, len: usize) -> Result<()> {
        if i == 0 || i >= j || j > len {
            return Err(Error::Position(format!("need 1 <= i < j <= {len}, got ({i}, {j})")));
        }
        Ok(())
    }

    /// Contraction c_ij (1-based positions).
    pub fn contract(&self, i: usize, j: usize) -> Result<TensorVector> {
        self.check_pair(i, j, self.d)?;
        let mut t = TensorVector::zero(self.g, self.d - 2);
        for (w, c) in self.iter() {
            let o = omega(w[i - 1], w[j - 1]);
            if o == 0 {
                continue;
            }
            let rest: Word =
                w.iter().enumerate().filter(|(k, _)| *k != i - 1 && *k != j - 1).map(|(_, &x)| x).collect();
            t.add_term(rest, c * &Q::int(o));
        }
        Ok(t)
    }

    /// Inserts Σ_k (a_k ⊗ b_k − b_k ⊗ a_k) at output positions `i < j`.
    pub fn insert_omega(&self, i: usize, j: usize) -> Result<TensorVector> {
        self.check_pair(i, j, self.d + 2)?;
        let mut t = TensorVector::zero(self.g, self.d + 2);
        for (w, c) in self.iter() {
            for k in 1..=self.g {
                for (x, y, s) in [(letter_a(k), letter_b(k), 1), (letter_b(k), letter_a(k), -1)] {
                    let mut out = Vec::with_capacity(self.d + 2);
                    let mut src = w.iter();
                    for pos in 1..=self.d + 2 {
                        if pos == i {
                            out.push(x);
                        } else if pos == j {
                            out.push(y);
                        } else {
                            out.push(*src.next().unwrap());
                        }
                    }
                    t.add_term(out, c * &Q::int(s));
                }
            }
        }
        Ok(t)
    }

    /// Moves the letter at position `k` to position `perm[k]` (0-based).
    pub fn permute_positions(&self, perm: &[usize]) -> Result<TensorVector> {
        if perm.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: perm.len() });
        }
        let mut t = TensorVector::zero(self.g, self.d);
        for (w, c) in self.iter() {
            let mut out = vec![0; self.d];
            for (k, &p) in perm.iter().enumerate() {
                out[p] = w[k];
            }
            t.add_term(out, c.clone());
        }
        Ok(t)
    }

    /// Splits into weight components.
    pub fn by_weight(&self) -> BTreeMap<Weight, TensorVector> {
        let mut out: BTreeMap<Weight, TensorVector> = BTreeMap::new();
        for (w, c) in self.iter() {
            out.entry(weight(self.g, w))
                .or_insert_with(|| TensorVector::zero(self.g, self.d))
                .add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .iter()
            .map(|(w, c)| {
                serde_json::json!({
                    "word": w.iter().map(|&x| letter_name(x)).collect::<Vec<_>>(),
                    "coeff": c.to_string(),
                })
            })
            .collect();
        serde_json::json!({ "g": self.g, "d": self.d, "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: RawTensor = serde_json::from_value(v.clone())?;
        let mut terms = Vec::new();
        for t in raw.terms {
            let w = t.word.iter().map(|s| parse_letter(s)).collect::<Result<Word>>()?;
            terms.push((w, t.coeff.parse::<Q>()?));
        }
        TensorVector::from_terms(raw.g, raw.d, terms)
    }
}

#[derive(Deserialize)]
struct RawTensor {
    g: usize,
    d: usize,
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
struct RawTerm {
    word: Vec<String>,
    coeff: String,
}

impl fmt::Display for TensorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(w, c)| format!("{c}·[{}]", word_name(w))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// harmonic part and the projection

/// Contraction equations restricted to a list of words of a fixed length.
fn contraction_rows(index: &WordIndex, d: usize) -> Vec<SparseVec> {
    let mut rows: HashMap<(usize, usize, Word), Vec<(usize, Q)>> = HashMap::new();
    for (col, w) in index.words().iter().enumerate() {
        for i in 0..d {
            for j in i + 1..d {
                let o = omega(w[i], w[j]);
                if o == 0 {
                    continue;
                }
                let rest: Word = w.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, &x)| x).collect();
                rows.entry((i, j, rest)).or_default().push((col, Q::int(o)));
            }
        }
    }
    let mut keys: Vec<_> = rows.keys().cloned().collect();
    keys.sort();
    keys.into_iter().map(|k| SparseVec::from_pairs(rows.remove(&k).unwrap())).collect()
}

/// Basis of V^<d>, either on the whole word space or on one weight block.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub g: usize,
    pub d: usize,
    pub index: WordIndex,
    pub subspace: Subspace,
}

impl HarmonicBasis {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn vectors(&self) -> Vec<TensorVector> {
        self.subspace.basis().iter().map(|v| self.index.tensor(self.g, self.d, v)).collect()
    }
}

fn harmonic_on(g: usize, d: usize, words: Vec<Word>) -> HarmonicBasis {
    let index = WordIndex::new(words);
    let rows = contraction_rows(&index, d);
    let m = SparseMatrix::from_rows(index.len(), rows).expect("rows within bounds");
    let subspace = kernel_basis(&m);
    HarmonicBasis { g, d, index, subspace }
}

pub fn harmonic_subspace(space: SymplecticSpace, d: usize) -> HarmonicBasis {
    harmonic_on(space.g(), d, space.all_words(d))
}

pub fn harmonic_block(g: usize, d: usize, mu: &[i8]) -> HarmonicBasis {
    harmonic_on(g, d, words_of_weight(g, d, mu))
}

/// Spanning set of W = Σ im(insert_omega) inside one weight block.
pub fn omega_insertions(g: usize, d: usize, mu: &[i8]) -> Vec<TensorVector> {
    if d < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for u in words_of_weight(g, d - 2, mu) {
        let t = TensorVector::word(g, u);
        for i in 1..=d {
            for j in i + 1..=d {
                out.push(t.insert_omega(i, j).expect("positions in range"));
            }
        }
    }
    out
}

/// A = Σ_{i<j} ι_ij ∘ c_ij. It kills V^<d> and its image lies in W.
pub fn contraction_laplacian(v: &TensorVector) -> TensorVector {
    let d = v.d();
    let mut out = TensorVector::zero(v.g(), d);
    for i in 1..=d {
        for j in i + 1..=d {
            let c = v.contract(i, j).expect("positions in range");
            if !c.is_zero() {
                out.add_scaled(&Q::ONE, &c.insert_omega(i, j).expect("positions in range"));
            }
        }
    }
    out
}

/// True if every pairwise contraction of v vanishes.
pub fn is_harmonic(v: &TensorVector) -> bool {
    let d = v.d();
    (1..=d).all(|i| (i + 1..=d).all(|j| v.contract(i, j).map(|c| c.is_zero()).unwrap_or(false)))
}

const KRYLOV_LIMIT: usize = 64;

/// π(v) from the minimal polynomial of A on the Krylov space of v: when it is
/// t·r(t) with r(0) ≠ 0, π(v) = r(A)v / r(0), and v − π(v) ∈ im A ⊆ W.
/// Returns None when that shape does not occur or the result is not harmonic.
pub fn krylov_project(v: &TensorVector) -> Option<TensorVector> {
    const TAG: usize = 1 << 48;
    let mut columns: HashMap<Word, usize> = HashMap::new();
    let mut ech = Echelon::with_limit(TAG);
    let mut krylov = vec![v.clone()];
    let dependency = loop {
        let k = krylov.len() - 1;
        let mut pairs: Vec<(usize, Q)> = krylov[k]
            .iter()
            .map(|(w, c)| {
                let n = columns.len();
                (*columns.entry(w.clone()).or_insert(n), c.clone())
            })
            .collect();
        pairs.push((TAG + k, Q::ONE));
        match ech.insert_or_remainder(&SparseVec::from_pairs(pairs)) {
            Ok(()) => {
                if krylov.len() > KRYLOV_LIMIT {
                    return None;
                }
                let next = contraction_laplacian(&krylov[k]);
                krylov.push(next);
            }
            Err(rem) => break rem,
        }
    };
    let a = |i: usize| dependency.get(TAG + i);
    if !a(0).is_zero() {
        return Some(TensorVector::zero(v.g(), v.d()));
    }
    let r0 = a(1);
    if r0.is_zero() {
        return None;
    }
    let mut out = TensorVector::zero(v.g(), v.d());
    for i in 1..krylov.len() {
        let c = a(i);
        if !c.is_zero() {
            out.add_scaled(&(c / r0.clone()), &krylov[i - 1]);
        }
    }
    is_harmonic(&out).then_some(out)
}

/// The decomposition V^{⊗d} = V^<d> ⊕ W on one weight block.
#[derive(Clone, Debug)]
struct PiBlock {
    index: WordIndex,
    harmonic_dim: usize,
    combined: Subspace,
    coords: Coordinates,
}

impl PiBlock {
    fn build(g: usize, d: usize, mu: &[i8]) -> Result<Self> {
        let h = harmonic_block(g, d, mu);
        let index = h.index.clone();
        let mut w_span = Echelon::new();
        let mut w_basis = Vec::new();
        for t in omega_insertions(g, d, mu) {
            let v = index.vector(&t)?;
            if w_span.insert(&v) {
                w_basis.push(v);
            }
        }
        let mut all = h.subspace.basis().to_vec();
        all.extend(w_basis.iter().cloned());
        let combined = Subspace::span(index.len(), all)?;
        if h.dim() + w_basis.len() != index.len() || combined.dim() != index.len() {
            return Err(Error::StableRange {
                g,
                d,
                reason: format!(
                    "weight {mu:?}: dim V<d> = {}, dim W = {}, span = {}, block = {}",
                    h.dim(),
                    w_basis.len(),
                    combined.dim(),
                    index.len()
                ),
            });
        }
        let coords = Coordinates::new(&combined);
        Ok(PiBlock { index, harmonic_dim: h.dim(), combined, coords })
    }
}

/// Projection onto V^<d> along W. Weight blocks are built lazily and shared
/// between threads.
#[derive(Debug)]
pub struct Projector {
    blocks: Mutex<HashMap<(usize, usize, Weight), Arc<PiBlock>>>,
    words: Mutex<HashMap<(usize, Word), Arc<TensorVector>>>,
    krylov: bool,
}

impl Default for Projector {
    fn default() -> Self {
        Projector::new()
    }
}

impl Projector {
    /// Krylov route first, weight-block decomposition as the fallback.
    pub fn new() -> Self {
        Projector { blocks: Mutex::default(), words: Mutex::default(), krylov: true }
    }

    /// Weight-block decomposition only.
    pub fn by_blocks() -> Self {
        Projector { blocks: Mutex::default(), words: Mutex::default(), krylov: false }
    }

    fn block(&self, g: usize, d: usize, mu: &[i8]) -> Result<Arc<PiBlock>> {
        let key = (g, d, mu.to_vec());
        if let Some(b) = self.blocks.lock().expect("projector lock").get(&key) {
            return Ok(b.clone());
        }
        let b = Arc::new(PiBlock::build(g, d, mu)?);
        Ok(self.blocks.lock().expect("projector lock").entry(key).or_insert(b).clone())
    }

    pub fn project(&self, v: &TensorVector) -> Result<TensorVector> {
        let (g, d) = (v.g(), v.d());
        let mut out = TensorVector::zero(g, d);
        if self.krylov {
            for (w, c) in v.iter() {
                out.add_scaled(c, &self.project_word(g, w)?);
            }
            return Ok(out);
        }
        for (mu, part) in v.by_weight() {
            out.add_scaled(&Q::ONE, &self.project_block(&mu, &part)?);
        }
        Ok(out)
    }

    fn project_block(&self, mu: &[i8], part: &TensorVector) -> Result<TensorVector> {
        let (g, d) = (part.g(), part.d());
        let b = self.block(g, d, mu)?;
        let coords = b
            .coords
            .solve(&b.index.vector(part)?)?
            .ok_or_else(|| Error::Invariant("block decomposition does not span".into()))?;
        let mut out = TensorVector::zero(g, d);
        for (c, h) in coords.iter().zip(b.combined.basis()).take(b.harmonic_dim) {
            if !c.is_zero() {
                out.add_scaled(c, &b.index.tensor(g, d, h));
            }
        }
        Ok(out)
    }

    /// π(e_w) through a canonical representative: pair indices relabelled by
    /// letter counts, then letters sorted. Both moves commute with π.
    fn project_word(&self, g: usize, w: &[Letter]) -> Result<TensorVector> {
        let mut counts: Vec<(usize, usize, usize)> = (0..g).map(|i| (0, 0, i)).collect();
        for &x in w {
            let c = &mut counts[(x / 2) as usize];
            if x % 2 == 0 {
                c.0 += 1;
            } else {
                c.1 += 1;
            }
        }
        counts.sort_by(|a, b| (b.0 + b.1, b.0).cmp(&(a.0 + a.1, a.0)).then(a.2.cmp(&b.2)));
        let mut to_new = vec![0u8; g];
        for (new, &(_, _, old)) in counts.iter().enumerate() {
            to_new[old] = new as u8;
        }
        let relabel = |x: Letter, map: &[u8]| 2 * map[(x / 2) as usize] + x % 2;
        let moved: Word = w.iter().map(|&x| relabel(x, &to_new)).collect();
        let mut order: Vec<usize> = (0..moved.len()).collect();
        order.sort_by_key(|&k| (moved[k], k));
        let sorted: Word = order.iter().map(|&k| moved[k]).collect();
        let key = (g, sorted.clone());
        let cached = self.words.lock().expect("projector lock").get(&key).cloned();
        let base = match cached {
            Some(b) => b,
            None => {
                let t = TensorVector::word(g, sorted.clone());
                let p = match krylov_project(&t) {
                    Some(p) => p,
                    None => self.project_block(&weight(g, &sorted), &t)?,
                };
                let p = Arc::new(p);
                self.words.lock().expect("projector lock").insert(key, p.clone());
                p
            }
        };
        let mut to_old = vec![0u8; g];
        for (old, &new) in to_new.iter().enumerate() {
            to_old[new as usize] = old as u8;
        }
        let mut out = TensorVector::zero(g, w.len());
        for (u, c) in base.iter() {
            let mut placed = vec![0; u.len()];
            for (k, &pos) in order.iter().enumerate() {
                placed[pos] = relabel(u[k], &to_old);
            }
            out.add_term(placed, c.clone());
        }
        Ok(out)
    }
}

/// π: V^{⊗d} → V^<d> along the span of ω-insertions.
pub fn project_pi(v: &TensorVector) -> Result<TensorVector> {
    Projector::new().project(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.split_whitespace().map(|x| parse_letter(x).unwrap()).collect()
    }

    #[test]
    fn letters_and_pairing() {
        assert_eq!(letter_name(letter_a(1)), "a1");
        assert_eq!(letter_name(letter_b(3)), "b3");
        assert_eq!(parse_letter("b2").unwrap(), 3);
        assert!(parse_letter("c1").is_err());
        assert_eq!(omega(letter_a(1), letter_b(1)), 1);
        assert_eq!(omega(letter_b(1), letter_a(1)), -1);
        assert_eq!(omega(letter_a(1), letter_a(1)), 0);
        assert_eq!(omega(letter_a(1), letter_b(2)), 0);
        let s = SymplecticSpace::new(3).unwrap();
        assert_eq!(crate::linalg::rank(&s.omega_matrix()), 6);
    }

    #[test]
    fn contract_examples() {
        let t = TensorVector::word(1, w("a1 b1"));
        assert_eq!(t.contract(1, 2).unwrap(), TensorVector::scalar(1, Q::ONE));
        assert!(TensorVector::word(1, w("a1 a1")).contract(1, 2).unwrap().is_zero());
        let t = TensorVector::word(2, w("a1 a2 b1"));
        assert_eq!(t.contract(1, 3).unwrap(), TensorVector::word(2, w("a2")));
        assert!(t.contract(2, 2).is_err());
        assert!(t.contract(1, 4).is_err());
    }

    #[test]
    fn insert_omega_examples() {
        let e = TensorVector::scalar(1, Q::ONE);
        let t = e.insert_omega(1, 2).unwrap();
        let expect = TensorVector::from_terms(1, 2, [(w("a1 b1"), Q::ONE), (w("b1 a1"), -Q::ONE)]).unwrap();
        assert_eq!(t, expect);
        let t = TensorVector::word(2, w("a1")).insert_omega(2, 3).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.coeff(&w("a1 b2 a2")), -Q::ONE);
        assert!(e.insert_omega(1, 3).is_err());
    }

    #[test]
    fn harmonic_dims() {
        for g in 1..=3 {
            let s = SymplecticSpace::new(g).unwrap();
            assert_eq!(harmonic_subspace(s, 1).dim(), 2 * g);
            assert_eq!(harmonic_subspace(s, 2).dim(), 4 * g * g - 1);
        }
    }

    #[test]
    fn pi_examples() {
        let t = TensorVector::word(1, w("a1 b1"));
        let p = project_pi(&t).unwrap();
        let half = Q::new(1, 2);
        let expect = TensorVector::from_terms(1, 2, [(w("a1 b1"), half.clone()), (w("b1 a1"), half)]).unwrap();
        assert_eq!(p, expect);
        let u = TensorVector::word(2, w("a2 b1"));
        assert!(project_pi(&u.insert_omega(1, 3).unwrap()).unwrap().is_zero());
        let v = TensorVector::word(1, w("a1 a1 b1 b1"));
        let p = project_pi(&v).unwrap();
        assert_eq!(project_pi(&p).unwrap(), p);
    }

    #[test]
    fn weights() {
        assert_eq!(orbit_size(&[0, 0]), 1);
        assert_eq!(orbit_size(&[1, 0]), 4);
        assert_eq!(orbit_size(&[1, 1]), 4);
        assert_eq!(orbit_size(&[2, 1]), 8);
        // every word lands in exactly one block
        let g = 2;
        let n = 3;
        let total: u64 = dominant_weights(g, n)
            .iter()
            .map(|mu| orbit_size(mu) * words_of_weight(g, n, mu).len() as u64)
            .sum();
        assert_eq!(total, 4u64.pow(3));
    }

    #[test]
    fn json_roundtrip() {
        let t = TensorVector::from_terms(2, 2, [(w("a1 b2"), Q::new(3, 4)), (w("b1 b1"), -Q::ONE)]).unwrap();
        let j = t.to_json();
        assert_eq!(j["terms"][0]["word"][1], "b2");
        assert_eq!(TensorVector::from_json(&j).unwrap(), t);
    }

    #[test]
    fn krylov_matches_blocks() {
        let blocks = Projector::by_blocks();
        let cached = Projector::new();
        for (g, d) in [(1, 2), (1, 3), (2, 2), (2, 3), (2, 4), (3, 3)] {
            for word in SymplecticSpace::new(g).unwrap().all_words(d) {
                let t = TensorVector::word(g, word);
                let k = krylov_project(&t).expect("krylov route applies");
                let b = blocks.project(&t).unwrap();
                assert_eq!(k, b);
                assert_eq!(cached.project(&t).unwrap(), b);
                assert!(is_harmonic(&k));
            }
        }
    }

}
