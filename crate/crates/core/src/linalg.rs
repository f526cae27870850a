//! Exact sparse linear algebra over the rationals.
//!
//! Everything reduces to one incremental structure, [`Echelon`]: rows are
//! inserted one at a time, fully reduced against the pivots already present,
//! and kept with a unit leading entry. Pivots are always the lowest column
//! index of the reduced row, so callers control which coordinates end up as
//! free (quotient) coordinates by choosing the column order. A dense
//! fraction-free elimination ([`bareiss_rank`]) is kept as an independent
//! route for cross-checking ranks.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Q;

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// Builds a vector from arbitrary (index, value) pairs, summing duplicates.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Q)>>(pairs: I) -> Self {
        let mut map: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, v) in pairs {
            if v.is_zero() {
                continue;
            }
            let e = map.entry(i).or_insert(Q::ZERO);
            *e += &v;
        }
        Self::from_map(map)
    }

    pub fn from_map(map: BTreeMap<usize, Q>) -> Self {
        SparseVec {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Q]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec { entries: vec![(i, Q::ONE)] }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Q)> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[(usize, Q)] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Q::ZERO,
        }
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|(i, _)| *i)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&self, c: &Q) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: &Q, other: &SparseVec) -> SparseVec {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c * y));
                        b.next();
                    } else {
                        let s = x + &(c * y);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVec { entries: out }
    }

    pub fn to_dense(&self, n: usize) -> Vec<Q> {
        let mut v = vec![Q::ZERO; n];
        for (i, x) in &self.entries {
            v[*i] = x.clone();
        }
        v
    }

    /// Applies an index map; indices mapped to `None` are dropped.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().filter_map(|(i, v)| f(*i).map(|j| (j, v.clone()))))
    }
}

/// Row-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { rows: n, cols: n, data: (0..n).map(SparseVec::unit).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Result<Self> {
        for r in &rows {
            if let Some(m) = r.max_index() {
                if m >= cols {
                    return Err(Error::DimensionMismatch { expected: cols, got: m + 1 });
                }
            }
        }
        Ok(SparseMatrix { rows: rows.len(), cols, data: rows })
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        SparseMatrix { rows: rows.len(), cols, data: rows.iter().map(|r| SparseVec::from_dense(r)).collect() }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let q: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| Q::int(x)).collect()).collect();
        Self::from_dense(&q)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.data[r].get(c)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r.iter() {
                cols[*j].push((i, v.clone()));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            data: cols.into_iter().map(|e| SparseVec { entries: e }).collect(),
        }
    }

    /// Permutes rows and columns: new row `i` is old row `row_perm[i]`,
    /// old column `j` becomes column `col_perm[j]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: row_perm.iter().map(|&r| self.data[r].remap(|j| Some(col_perm[j]))).collect(),
        }
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let dense = v.to_dense(self.cols);
        SparseVec::from_pairs(self.data.iter().enumerate().map(|(i, r)| {
            let s: Q = r.iter().map(|(j, x)| x * &dense[*j]).sum();
            (i, s)
        }))
    }
}

/// Incremental row echelon form with unit pivots.
///
/// When `limit` is set, only columns below it may become pivots; columns at or
/// above it are passive "tag" columns that record how a row was built.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: HashMap<usize, usize>,
    rows: Vec<SparseVec>,
    limit: Option<usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn with_limit(limit: usize) -> Self {
        Echelon { limit: Some(limit), ..Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.leading().unwrap())
    }

    /// Eliminates every entry of `v` that sits in a pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        if self.rows.is_empty() {
            return v.clone();
        }
        let mut acc: BTreeMap<usize, Q> = v.iter().cloned().collect();
        let mut cursor = 0usize;
        loop {
            let next = acc.range(cursor..).find(|(c, _)| self.pivots.contains_key(c)).map(|(c, x)| (*c, x.clone()));
            let Some((c, coef)) = next else { break };
            let row = &self.rows[self.pivots[&c]];
            for (j, x) in row.iter() {
                let e = acc.entry(*j).or_insert(Q::ZERO);
                *e -= &(&coef * x);
                if e.is_zero() {
                    acc.remove(j);
                }
            }
            cursor = c + 1;
        }
        SparseVec::from_map(acc)
    }

    fn pivot_of(&self, v: &SparseVec) -> Option<usize> {
        let lead = v.leading()?;
        match self.limit {
            Some(l) if lead >= l => None,
            _ => Some(lead),
        }
    }

    /// Inserts `v`; returns `true` if it enlarged the row space.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.insert_reduced(self.reduce(v))
    }

    /// Like [`Echelon::insert`], but hands back the reduced remainder when
    /// `v` was dependent (only meaningful with tag columns).
    pub fn insert_or_remainder(&mut self, v: &SparseVec) -> std::result::Result<(), SparseVec> {
        let r = self.reduce(v);
        match self.pivot_of(&r) {
            Some(_) => {
                self.insert_reduced(r);
                Ok(())
            }
            None => Err(r),
        }
    }

    fn insert_reduced(&mut self, r: SparseVec) -> bool {
        let Some(p) = self.pivot_of(&r) else { return false };
        let inv = r.get(p).recip();
        let r = r.scale(&inv);
        self.pivots.insert(p, self.rows.len());
        self.rows.push(r);
        true
    }

    /// Rows in reduced row echelon form, sorted by pivot column.
    pub fn rref_rows(&self) -> Vec<SparseVec> {
        let mut out: Vec<SparseVec> = self
            .rows
            .iter()
            .map(|r| {
                let p = r.leading().unwrap();
                let tail = SparseVec::from_pairs(r.iter().skip(1).cloned());
                let red = self.reduce(&tail);
                SparseVec::unit(p).add_scaled(&Q::ONE, &red)
            })
            .collect();
        out.sort_by_key(|r| r.leading());
        out
    }
}

/// Exact rank over the rationals.
pub fn rank(m: &SparseMatrix) -> usize {
    let mut e = Echelon::new();
    for r in m.row_vectors() {
        e.insert(r);
    }
    e.rank()
}

/// Kernel of a matrix as an explicit basis.
pub fn kernel_basis(m: &SparseMatrix) -> Subspace {
    let mut e = Echelon::new();
    for r in m.row_vectors() {
        e.insert(r);
    }
    let rref = e.rref_rows();
    let pivot_of_col: HashMap<usize, usize> =
        rref.iter().enumerate().map(|(i, r)| (r.leading().unwrap(), i)).collect();
    let mut per_free: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
    for c in 0..m.cols() {
        if !pivot_of_col.contains_key(&c) {
            per_free.insert(c, vec![(c, Q::ONE)]);
        }
    }
    for r in &rref {
        let p = r.leading().unwrap();
        for (j, x) in r.iter().skip(1) {
            if let Some(v) = per_free.get_mut(j) {
                v.push((p, -x));
            }
        }
    }
    let basis: Vec<SparseVec> = per_free.into_values().map(SparseVec::from_pairs).collect();
    debug_assert_eq!(basis.len() + rref.len(), m.cols(), "rank-nullity");
    Subspace { ambient_dim: m.cols(), basis }
}

/// A linear subspace of `Q^ambient_dim` with an independent basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<SparseVec>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn whole(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: (0..ambient_dim).map(SparseVec::unit).collect() }
    }

    /// Span of arbitrary vectors; keeps an independent subset.
    pub fn span(ambient_dim: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Result<Self> {
        let mut e = Echelon::new();
        let mut basis = Vec::new();
        for v in vectors {
            if let Some(m) = v.max_index() {
                if m >= ambient_dim {
                    return Err(Error::DimensionMismatch { expected: ambient_dim, got: m + 1 });
                }
            }
            if e.insert(&v) {
                basis.push(v);
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn echelon(&self) -> Echelon {
        let mut e = Echelon::new();
        for b in &self.basis {
            e.insert(b);
        }
        e
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.echelon().reduce(v).is_zero()
    }
}

/// Coordinates of `v` in the basis of `s`, or `None` if `v` is not in the span.
pub fn solve_membership(s: &Subspace, v: &SparseVec) -> Result<Option<Vec<Q>>> {
    Coordinates::new(s).solve(v)
}

/// Reusable solver for coordinates in a fixed basis.
#[derive(Clone, Debug)]
pub struct Coordinates {
    n: usize,
    dim: usize,
    ech: Echelon,
}

impl Coordinates {
    pub fn new(s: &Subspace) -> Self {
        let n = s.ambient_dim;
        let mut ech = Echelon::with_limit(n);
        for (i, b) in s.basis.iter().enumerate() {
            ech.insert(&b.add_scaled(&Q::ONE, &SparseVec::unit(n + i)));
        }
        Coordinates { n, dim: s.dim(), ech }
    }

    /// Coordinates of v, or None when v is outside the span.
    pub fn solve(&self, v: &SparseVec) -> Result<Option<Vec<Q>>> {
        let n = self.n;
        if let Some(m) = v.max_index() {
            if m >= n {
                return Err(Error::DimensionMismatch { expected: n, got: m + 1 });
            }
        }
        let r = self.ech.reduce(v);
        if r.leading().is_some_and(|l| l < n) {
            return Ok(None);
        }
        let mut coords = vec![Q::ZERO; self.dim];
        for (j, x) in r.iter() {
            coords[j - n] = -x;
        }
        Ok(Some(coords))
    }
}

/// Zassenhaus intersection.
pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim, got: b.ambient_dim });
    }
    let n = a.ambient_dim;
    let shift = |v: &SparseVec| v.remap(|j| Some(j + n));
    let mut e = Echelon::with_limit(n);
    let mut found = Vec::new();
    for v in &a.basis {
        let row = v.add_scaled(&Q::ONE, &shift(v));
        if let Err(rem) = e.insert_or_remainder(&row) {
            found.push(rem);
        }
    }
    for v in &b.basis {
        if let Err(rem) = e.insert_or_remainder(v) {
            found.push(rem);
        }
    }
    let vectors: Vec<SparseVec> = found.into_iter().map(|r| r.remap(|j| j.checked_sub(n))).collect();
    Subspace::span(n, vectors)
}

/// `dim(ambient) - dim(sub)`, after checking that `sub` lies in `ambient`.
pub fn quotient_dim(ambient: &Subspace, sub: &Subspace) -> Result<usize> {
    if ambient.ambient_dim != sub.ambient_dim {
        return Err(Error::DimensionMismatch { expected: ambient.ambient_dim, got: sub.ambient_dim });
    }
    let e = ambient.echelon();
    for (i, v) in sub.basis.iter().enumerate() {
        if !e.reduce(v).is_zero() {
            return Err(Error::NotContained { index: i });
        }
    }
    Ok(ambient.dim() - sub.dim())
}

/// Dense fraction-free (Bareiss) rank; the rows are cleared of denominators first.
pub fn bareiss_rank(m: &SparseMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .row_vectors()
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(&x.denom()));
            let mut row = vec![BigInt::zero(); m.cols()];
            for (j, x) in r.iter() {
                row[*j] = x.numer() * (&l / x.denom());
            }
            row
        })
        .collect();
    let (rows, cols) = (a.len(), m.cols());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // smallest nonzero entry in the column as pivot
        let Some(p) = (r..rows).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| (a[i][c].bits(), i)) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}
