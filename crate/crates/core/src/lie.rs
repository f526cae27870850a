//! Free Lie algebra on V in the Lyndon basis, tree elements V ⊗ L_{d+1},
//! tripods and the derivation bracket.
//!
//! Lie elements are manipulated through their image in the tensor algebra.
//! The standard bracketing P_w of a Lyndon word w expands to w plus strictly
//! larger words, so a tensor that lies in L_k is converted back to Lyndon
//! coordinates by repeatedly peeling off its smallest word.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, SparseMatrix, SparseVec, Subspace};
use crate::scalar::Q;
use crate::symplectic::{
    letter_a, letter_b, letter_name, omega, parse_letter, weight, word_name, words_of_weight, Letter,
    SymplecticSpace, TensorVector, Word, WordIndex,
};

pub fn is_lyndon(w: &[Letter]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Lyndon words of length exactly `k` over `n` letters, in lexicographic order (Duval).
pub fn lyndon_words(n: usize, k: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 || k == 0 {
        return out;
    }
    let mut w: Vec<i32> = vec![-1];
    loop {
        *w.last_mut().unwrap() += 1;
        if w.len() == k {
            out.push(w.iter().map(|&x| x as Letter).collect());
        }
        let m = w.len();
        while w.len() < k {
            let x = w[w.len() - m];
            w.push(x);
        }
        while w.last() == Some(&(n as i32 - 1)) {
            w.pop();
        }
        if w.is_empty() {
            break;
        }
    }
    out
}

fn mobius(mut n: usize) -> i64 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Witt's necklace formula for dim L_k on `n` generators.
pub fn witt_dim(n: usize, k: usize) -> u64 {
    let s: i128 = (1..=k).filter(|m| k % m == 0).map(|m| mobius(m) as i128 * (n as i128).pow((k / m) as u32)).sum();
    (s / k as i128) as u64
}

pub fn lie_dim(space: SymplecticSpace, k: usize) -> u64 {
    lyndon_words(space.dim(), k).len() as u64
}

/// Standard factorization w = uv with v the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[Letter]) -> Option<(Word, Word)> {
    (1..w.len()).find(|&i| is_lyndon(&w[i..])).map(|i| (w[..i].to_vec(), w[i..].to_vec()))
}

type Cache = RwLock<HashMap<Word, TensorVector>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Tensor expansion of the standard bracketing P_w. The genus tag of the
/// result is the smallest one containing all letters.
pub fn lyndon_tensor(w: &[Letter]) -> TensorVector {
    if let Some(t) = cache().read().unwrap().get(w) {
        return t.clone();
    }
    let g = w.iter().map(|&x| x as usize / 2 + 1).max().unwrap_or(1);
    let t = if w.len() == 1 {
        TensorVector::word(g, w.to_vec())
    } else {
        let (u, v) = standard_factorization(w).expect("Lyndon word of length >= 2");
        let (pu, pv) = (lyndon_tensor(&u), lyndon_tensor(&v));
        retag(&pu, g).commutator(&retag(&pv, g))
    };
    debug_assert_eq!(t.min_word().map(|(m, c)| (m.as_slice(), c.is_one())), Some((w, true)));
    cache().write().unwrap().insert(w.to_vec(), t.clone());
    t
}

fn retag(t: &TensorVector, g: usize) -> TensorVector {
    let mut out = TensorVector::zero(g, t.d());
    for (w, c) in t.iter() {
        out.add_term(w.clone(), c.clone());
    }
    out
}

/// Element of L_k(V) in Lyndon coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiePoly {
    g: usize,
    k: usize,
    coeffs: BTreeMap<Word, Q>,
}

impl LiePoly {
    pub fn zero(g: usize, k: usize) -> Self {
        LiePoly { g, k, coeffs: BTreeMap::new() }
    }

    pub fn generator(g: usize, x: Letter) -> Self {
        let mut p = LiePoly::zero(g, 1);
        p.coeffs.insert(vec![x], Q::ONE);
        p
    }

    pub fn lyndon(g: usize, w: Word) -> Result<Self> {
        if !is_lyndon(&w) {
            return Err(Error::Malformed(format!("{} is not a Lyndon word", word_name(&w))));
        }
        let mut p = LiePoly::zero(g, w.len());
        p.coeffs.insert(w, Q::ONE);
        Ok(p)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, w: &[Letter]) -> Q {
        self.coeffs.get(w).cloned().unwrap_or(Q::ZERO)
    }

    pub fn embed_tensor(&self) -> TensorVector {
        let mut t = TensorVector::zero(self.g, self.k);
        for (w, c) in self.iter() {
            t.add_scaled(c, &lyndon_tensor(w));
        }
        t
    }

    /// Lyndon coordinates of a tensor; fails if the tensor is not in L_k.
    pub fn from_tensor(t: &TensorVector) -> Result<Self> {
        let mut rest = t.clone();
        let mut p = LiePoly::zero(t.g(), t.d());
        while let Some((m, c)) = rest.min_word().map(|(m, c)| (m.clone(), c.clone())) {
            if !is_lyndon(&m) {
                return Err(Error::Malformed(format!("tensor is not a Lie element (stuck at {})", word_name(&m))));
            }
            rest.add_scaled(&-c.clone(), &lyndon_tensor(&m));
            p.coeffs.insert(m, c);
        }
        Ok(p)
    }

    pub fn bracket(&self, other: &LiePoly) -> LiePoly {
        LiePoly::from_tensor(&self.embed_tensor().commutator(&other.embed_tensor())).expect("brackets stay in L")
    }

    pub fn scale(&self, c: &Q) -> LiePoly {
        let mut p = LiePoly::zero(self.g, self.k);
        if !c.is_zero() {
            p.coeffs = self.coeffs.iter().map(|(w, x)| (w.clone(), x * c)).collect();
        }
        p
    }

    pub fn plus(&self, other: &LiePoly) -> LiePoly {
        let mut p = self.clone();
        for (w, c) in other.iter() {
            let e = p.coeffs.entry(w.clone()).or_insert(Q::ZERO);
            *e += c;
            if e.is_zero() {
                p.coeffs.remove(w);
            }
        }
        p
    }
}

impl fmt::Display for LiePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(w, c)| format!("{c}·P[{}]", word_name(w))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Bracket expressions with basis leaves, closed under rational combinations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketExpr {
    Leaf(Letter),
    Bracket(Box<BracketExpr>, Box<BracketExpr>),
    Sum(Vec<(Q, BracketExpr)>),
}

impl BracketExpr {
    pub fn leaf(x: Letter) -> Self {
        BracketExpr::Leaf(x)
    }

    pub fn br(a: BracketExpr, b: BracketExpr) -> Self {
        BracketExpr::Bracket(Box::new(a), Box::new(b))
    }

    /// Number of leaves; `None` if a sum mixes degrees.
    pub fn degree(&self) -> Option<usize> {
        match self {
            BracketExpr::Leaf(_) => Some(1),
            BracketExpr::Bracket(a, b) => Some(a.degree()? + b.degree()?),
            BracketExpr::Sum(terms) => {
                let mut deg = None;
                for (_, t) in terms {
                    let e = t.degree()?;
                    if deg.is_some_and(|d| d != e) {
                        return None;
                    }
                    deg = Some(e);
                }
                deg
            }
        }
    }

    fn max_letter(&self) -> usize {
        match self {
            BracketExpr::Leaf(x) => *x as usize,
            BracketExpr::Bracket(a, b) => a.max_letter().max(b.max_letter()),
            BracketExpr::Sum(t) => t.iter().map(|(_, e)| e.max_letter()).max().unwrap_or(0),
        }
    }

    pub fn expand(&self, g: usize, deg: usize) -> TensorVector {
        match self {
            BracketExpr::Leaf(x) => TensorVector::word(g, vec![*x]),
            BracketExpr::Bracket(a, b) => {
                let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
                a.expand(g, da).commutator(&b.expand(g, db))
            }
            BracketExpr::Sum(terms) => {
                let mut t = TensorVector::zero(g, deg);
                for (c, e) in terms {
                    t.add_scaled(c, &e.expand(g, deg));
                }
                t
            }
        }
    }

    /// Parses `[a1,[b1,a2]]`-style expressions (no sums).
    pub fn parse(s: &str) -> Result<Self> {
        fn go(s: &str) -> Result<(BracketExpr, &str)> {
            let s = s.trim_start();
            if let Some(rest) = s.strip_prefix('[') {
                let (a, rest) = go(rest)?;
                let rest = rest.trim_start().strip_prefix(',').ok_or_else(|| Error::Parse("expected ','".into()))?;
                let (b, rest) = go(rest)?;
                let rest = rest.trim_start().strip_prefix(']').ok_or_else(|| Error::Parse("expected ']'".into()))?;
                Ok((BracketExpr::br(a, b), rest))
            } else {
                let end = s.find(|c: char| c == ',' || c == ']' || c.is_whitespace()).unwrap_or(s.len());
                Ok((BracketExpr::Leaf(parse_letter(&s[..end])?), &s[end..]))
            }
        }
        let (e, rest) = go(s)?;
        if !rest.trim().is_empty() {
            return Err(Error::Parse(format!("trailing input {rest:?}")));
        }
        Ok(e)
    }
}

impl fmt::Display for BracketExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BracketExpr::Leaf(x) => write!(f, "{}", letter_name(*x)),
            BracketExpr::Bracket(a, b) => write!(f, "[{a},{b}]"),
            BracketExpr::Sum(t) => {
                let parts: Vec<String> = t.iter().map(|(c, e)| format!("{c}·{e}")).collect();
                write!(f, "({})", parts.join(" + "))
            }
        }
    }
}

pub fn lie_normal_form(space: SymplecticSpace, expr: &BracketExpr) -> Result<LiePoly> {
    let deg = expr.degree().ok_or_else(|| Error::Malformed("inhomogeneous bracket expression".into()))?;
    if expr.max_letter() >= space.dim() {
        return Err(Error::Malformed(format!("letter outside genus {}", space.g())));
    }
    LiePoly::from_tensor(&expr.expand(space.g(), deg))
}

pub fn embed_tensor(u: &LiePoly) -> TensorVector {
    u.embed_tensor()
}

// ---------------------------------------------------------------------------
// tree elements

/// Element of V ⊗ L_{d+1}, stored through its tensor image (words of length d + 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeElement {
    d: usize,
    value: TensorVector,
}

impl TreeElement {
    pub fn zero(g: usize, d: usize) -> Self {
        TreeElement { d, value: TensorVector::zero(g, d + 2) }
    }

    /// Wraps a tensor, checking that every first-letter slice is a Lie element.
    pub fn from_tensor(value: TensorVector) -> Result<Self> {
        if value.d() < 3 {
            return Err(Error::Malformed("tree elements have length at least 3".into()));
        }
        let t = TreeElement { d: value.d() - 2, value };
        t.pairs()?;
        Ok(t)
    }

    pub(crate) fn from_tensor_unchecked(value: TensorVector) -> Self {
        TreeElement { d: value.d() - 2, value }
    }

    pub fn from_pairs(g: usize, d: usize, pairs: &[(Letter, LiePoly)]) -> Result<Self> {
        let mut value = TensorVector::zero(g, d + 2);
        for (x, u) in pairs {
            if u.degree() != d + 1 {
                return Err(Error::DimensionMismatch { expected: d + 1, got: u.degree() });
            }
            value.add_scaled(&Q::ONE, &TensorVector::word(g, vec![*x]).concat(&u.embed_tensor()));
        }
        Ok(TreeElement { d, value })
    }

    pub fn g(&self) -> usize {
        self.value.g()
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn tensor(&self) -> &TensorVector {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// The (x, u) decomposition with u in Lyndon coordinates.
    pub fn pairs(&self) -> Result<Vec<(Letter, LiePoly)>> {
        let mut slices: BTreeMap<Letter, TensorVector> = BTreeMap::new();
        for (w, c) in self.value.iter() {
            slices
                .entry(w[0])
                .or_insert_with(|| TensorVector::zero(self.g(), self.d + 1))
                .add_term(w[1..].to_vec(), c.clone());
        }
        slices.into_iter().map(|(x, t)| Ok((x, LiePoly::from_tensor(&t)?))).collect()
    }

    pub fn scale(&self, c: &Q) -> TreeElement {
        TreeElement { d: self.d, value: self.value.scale(c) }
    }

    pub fn plus(&self, other: &TreeElement) -> TreeElement {
        TreeElement { d: self.d, value: self.value.plus(&other.value) }
    }

    pub fn minus(&self, other: &TreeElement) -> TreeElement {
        TreeElement { d: self.d, value: self.value.minus(&other.value) }
    }

    /// Tensor image of the bracket map x ⊗ u ↦ [x, u].
    pub fn bracket_tensor(&self) -> TensorVector {
        let mut out = TensorVector::zero(self.g(), self.d + 2);
        for (w, c) in self.value.iter() {
            out.add_term(w.clone(), c.clone());
            let mut r = w[1..].to_vec();
            r.push(w[0]);
            out.add_term(r, -c.clone());
        }
        out
    }

    pub fn in_t(&self) -> bool {
        self.bracket_tensor().is_zero()
    }

    /// Bracket of tree elements through the derivation correspondence.
    pub fn bracket(&self, other: &TreeElement) -> TreeElement {
        Derivation::from_tree(self).commutator(&Derivation::from_tree(other)).to_tree()
    }
}

pub fn bracket_map(v: &TreeElement) -> LiePoly {
    LiePoly::from_tensor(&v.bracket_tensor()).expect("bracket of V with L lands in L")
}

/// x ⊗ [y,z] + y ⊗ [z,x] + z ⊗ [x,y].
pub fn tripod(space: SymplecticSpace, x: Letter, y: Letter, z: Letter) -> TreeElement {
    let g = space.g();
    let mut value = TensorVector::zero(g, 3);
    for (p, q, r) in [(x, y, z), (y, z, x), (z, x, y)] {
        value.add_term(vec![p, q, r], Q::ONE);
        value.add_term(vec![p, r, q], -Q::ONE);
    }
    TreeElement { d: 1, value }
}

/// Basis tripods tripod(x, y, z) with x < y < z.
pub fn basis_tripods(space: SymplecticSpace) -> Vec<(Letter, Letter, Letter)> {
    let n = space.dim() as Letter;
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                out.push((x, y, z));
            }
        }
    }
    out
}

/// A derivation of the free Lie algebra, stored by its values on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    g: usize,
    images: Vec<TensorVector>,
}

impl Derivation {
    /// D_{x ⊗ u}(y) = ω(x, y) u.
    pub fn from_tree(t: &TreeElement) -> Self {
        let g = t.g();
        let m = t.d + 1;
        let mut images = vec![TensorVector::zero(g, m); 2 * g];
        for (w, c) in t.value.iter() {
            let x = w[0];
            for (y, img) in images.iter_mut().enumerate() {
                let o = omega(x, y as Letter);
                if o != 0 {
                    img.add_term(w[1..].to_vec(), c * &Q::int(o));
                }
            }
        }
        Derivation { g, images }
    }

    pub fn image(&self, y: Letter) -> &TensorVector {
        &self.images[y as usize]
    }

    /// Leibniz extension to tensors.
    pub fn apply(&self, t: &TensorVector) -> TensorVector {
        let m = self.images[0].d();
        let mut out = TensorVector::zero(self.g, t.d() + m - 1);
        for (w, c) in t.iter() {
            for i in 0..w.len() {
                for (u, x) in self.images[w[i] as usize].iter() {
                    let mut r = Vec::with_capacity(w.len() + m - 1);
                    r.extend_from_slice(&w[..i]);
                    r.extend_from_slice(u);
                    r.extend_from_slice(&w[i + 1..]);
                    out.add_term(r, c * x);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Derivation) -> Derivation {
        let images = (0..2 * self.g)
            .map(|y| self.apply(&other.images[y]).minus(&other.apply(&self.images[y])))
            .collect();
        Derivation { g: self.g, images }
    }

    /// D ↦ Σ_i (a_i ⊗ D(b_i) − b_i ⊗ D(a_i)).
    pub fn to_tree(&self) -> TreeElement {
        let m = self.images[0].d();
        let mut value = TensorVector::zero(self.g, m + 1);
        for i in 1..=self.g {
            let (a, b) = (letter_a(i), letter_b(i));
            value.add_scaled(&Q::ONE, &TensorVector::word(self.g, vec![a]).concat(self.image(b)));
            value.add_scaled(&-Q::ONE, &TensorVector::word(self.g, vec![b]).concat(self.image(a)));
        }
        TreeElement { d: m - 1, value }
    }
}

/// Left-iterated bracket [[[t1, t2], t3], ..., td] of degree-one factors.
pub fn br(factors: &[TreeElement]) -> Result<TreeElement> {
    let first = factors.first().ok_or_else(|| Error::Malformed("br needs at least one factor".into()))?;
    for (i, t) in factors.iter().enumerate() {
        if t.degree() != 1 || !t.in_t() {
            return Err(Error::NotTripodSpan(format!("factor {} has degree {} or fails the bracket test", i + 1, t.degree())));
        }
    }
    let mut acc = first.clone();
    for t in &factors[1..] {
        acc = acc.bracket(t);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// T_d as a kernel

/// Basis of ker(bracket map) on one weight block of V ⊗ L_{d+1}, in tensor coordinates.
#[derive(Clone, Debug)]
pub struct TBlock {
    pub g: usize,
    pub d: usize,
    pub index: WordIndex,
    pub ambient_dim: usize,
    pub basis: Subspace,
}

impl TBlock {
    pub fn elements(&self) -> Vec<TreeElement> {
        self.basis
            .basis()
            .iter()
            .map(|v| TreeElement::from_tensor_unchecked(self.index.tensor(self.g, self.d + 2, v)))
            .collect()
    }
}

/// V ⊗ L_{d+1} basis elements x ⊗ P_w of the given weight (all weights if `None`).
pub fn tree_ambient(g: usize, d: usize, mu: Option<&[i8]>) -> Vec<(Letter, Word)> {
    let mut out = Vec::new();
    let lyn = lyndon_words(2 * g, d + 1);
    for x in 0..(2 * g) as Letter {
        for w in &lyn {
            if let Some(mu) = mu {
                let mut full = vec![x];
                full.extend_from_slice(w);
                if weight(g, &full) != mu {
                    continue;
                }
            }
            out.push((x, w.clone()));
        }
    }
    out
}

fn t_kernel(g: usize, d: usize, words: Vec<Word>, gens: Vec<(Letter, Word)>) -> TBlock {
    let index = WordIndex::new(words);
    let cols: Vec<TensorVector> = gens
        .iter()
        .map(|(x, w)| TensorVector::word(g, vec![*x]).concat(&retag(&lyndon_tensor(w), g)))
        .collect();
    // column j of the bracket matrix is the image of generator j
    let mut rows: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
    for (j, c) in cols.iter().enumerate() {
        let img = TreeElement::from_tensor_unchecked(c.clone()).bracket_tensor();
        for (w, x) in img.iter() {
            rows.entry(index.get(w).expect("weight preserved")).or_default().push((j, x.clone()));
        }
    }
    let m = SparseMatrix::from_rows(gens.len(), rows.into_values().map(SparseVec::from_pairs).collect())
        .expect("in range");
    let ker = kernel_basis(&m);
    let vectors: Vec<SparseVec> = ker
        .basis()
        .iter()
        .map(|k| {
            let mut t = TensorVector::zero(g, d + 2);
            for (j, c) in k.iter() {
                t.add_scaled(c, &cols[*j]);
            }
            index.vector(&t).expect("weight preserved")
        })
        .collect();
    let basis = Subspace::span(index.len(), vectors).expect("in range");
    TBlock { g, d, index, ambient_dim: gens.len(), basis }
}

pub fn t_block(g: usize, d: usize, mu: &[i8]) -> TBlock {
    t_kernel(g, d, words_of_weight(g, d + 2, mu), tree_ambient(g, d, Some(mu)))
}

pub fn t_space_basis(space: SymplecticSpace, d: usize) -> Result<TBlock> {
    if d == 0 {
        return Err(Error::Infeasible("T_d needs d >= 1".into()));
    }
    let g = space.g();
    let b = t_kernel(g, d, space.all_words(d + 2), tree_ambient(g, d, None));
    if d == 1 {
        let tri: Vec<SparseVec> = basis_tripods(space)
            .into_iter()
            .map(|(x, y, z)| b.index.vector(tripod(space, x, y, z).tensor()).expect("in range"))
            .collect();
        let span = Subspace::span(b.index.len(), tri)?;
        if span.dim() != b.basis.dim() {
            return Err(Error::Invariant(format!(
                "tripod span has dimension {} but the kernel has {}",
                span.dim(),
                b.basis.dim()
            )));
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(g: usize) -> SymplecticSpace {
        SymplecticSpace::new(g).unwrap()
    }

    #[test]
    fn lyndon_counts() {
        assert_eq!(lyndon_words(2, 3), vec![vec![0, 0, 1], vec![0, 1, 1]]);
        assert_eq!(lie_dim(sp(1), 1), 2);
        assert_eq!(lie_dim(sp(1), 2), 1);
        assert_eq!(lie_dim(sp(1), 3), 2);
        assert_eq!(witt_dim(4, 4), 60);
    }

    #[test]
    fn normal_form_examples() {
        let s = sp(2);
        let p = |e: &str| lie_normal_form(s, &BracketExpr::parse(e).unwrap()).unwrap();
        assert!(p("[a1,a1]").is_zero());
        assert_eq!(p("[[a1,b1],a1]"), p("[a1,[a1,b1]]").scale(&-Q::ONE));
        let jac = p("[a1,[b1,a2]]").plus(&p("[b1,[a2,a1]]")).plus(&p("[a2,[a1,b1]]"));
        assert!(jac.is_zero());
    }

    #[test]
    fn embed_examples() {
        let s = sp(1);
        let e = lie_normal_form(s, &BracketExpr::parse("[a1,b1]").unwrap()).unwrap().embed_tensor();
        assert_eq!(e.coeff(&[0, 1]), Q::ONE);
        assert_eq!(e.coeff(&[1, 0]), -Q::ONE);
        let e = lie_normal_form(s, &BracketExpr::parse("[[a1,b1],a1]").unwrap()).unwrap().embed_tensor();
        // (ab - ba)a - a(ab - ba) = aba - baa - aab + aba
        assert_eq!(e.len(), 3);
        assert_eq!(e.coeff(&[0, 1, 0]), Q::int(2));
        assert_eq!(e.coeff(&[1, 0, 0]), -Q::ONE);
        assert_eq!(e.coeff(&[0, 0, 1]), -Q::ONE);
    }

    #[test]
    fn tripod_examples() {
        let s = sp(2);
        assert!(tripod(s, 0, 0, 1).is_zero());
        let t = tripod(s, 0, 1, 2);
        assert!(bracket_map(&t).is_zero());
        assert_eq!(tripod(s, 1, 0, 2), t.scale(&-Q::ONE));
        let x = TreeElement::from_pairs(1, 1, &[(0, LiePoly::lyndon(1, vec![0, 1]).unwrap())]).unwrap();
        assert!(!bracket_map(&x).is_zero());
    }

    #[test]
    fn t1_is_tripod_span() {
        for g in 1..=2 {
            let b = t_space_basis(sp(g), 1).unwrap();
            let n = 2 * g;
            assert_eq!(b.basis.dim(), n * (n - 1) * (n - 2) / 6);
        }
    }

    #[test]
    fn br_examples() {
        let s = sp(2);
        let t1 = tripod(s, 0, 1, 2);
        let t2 = tripod(s, 1, 2, 3);
        assert_eq!(br(&[t1.clone()]).unwrap(), t1);
        let a = br(&[t1.clone(), t2.clone()]).unwrap();
        let b = br(&[t2, t1.clone()]).unwrap();
        assert!(!a.is_zero());
        assert_eq!(a, b.scale(&-Q::ONE));
        assert!(a.in_t());
        let bad = TreeElement::zero(2, 2);
        assert!(br(&[t1, bad]).is_err());
    }
}
