//! Symmetric group characters, GL and Sp dimensions, and the character-theoretic
//! prediction of the top piece.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dihedral::{cycle_type, DihedralGroup};
use crate::error::{Error, Result};
use crate::scalar::Q;
use crate::symplectic::{dominant, Weight};

/// A partition with weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        parts.retain(|&p| p > 0);
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Malformed(format!("parts {parts:?} are not weakly decreasing")));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let m = self.part(0);
        Partition((0..m).map(|j| self.0.iter().filter(|&&p| p > j).count()).collect())
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=n.min(max)).rev() {
                cur.push(p);
                rec(n - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// Centralizer order z_μ = Π i^{m_i} m_i!.
    pub fn z(&self) -> BigInt {
        let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
        for &p in &self.0 {
            *counts.entry(p).or_default() += 1;
        }
        let mut z = BigInt::from(1);
        for (i, m) in counts {
            z *= BigInt::from(i).pow(m);
            for k in 1..=m {
                z *= k;
            }
        }
        z
    }

    fn hook(&self, i: usize, j: usize) -> usize {
        let conj = self.conjugate();
        self.0[i] - j + conj.part(j) - i - 1
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

static MN_CACHE: Mutex<Option<HashMap<(Vec<usize>, Vec<usize>), i64>>> = Mutex::new(None);

/// χ^λ(μ) by the Murnaghan–Nakayama rule on beta-sets.
pub fn mn_character(lambda: &Partition, mu: &Partition) -> Result<i64> {
    if lambda.size() != mu.size() {
        return Err(Error::DimensionMismatch { expected: lambda.size(), got: mu.size() });
    }
    Ok(mn_rec(lambda.parts().to_vec(), mu.parts().to_vec()))
}

fn mn_rec(lambda: Vec<usize>, mu: Vec<usize>) -> i64 {
    if mu.is_empty() {
        return 1;
    }
    let key = (lambda.clone(), mu.clone());
    if let Some(v) = MN_CACHE.lock().unwrap().get_or_insert_with(HashMap::new).get(&key) {
        return *v;
    }
    let r = mu[0];
    let rest = mu[1..].to_vec();
    let l = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + l - 1 - i).collect();
    let mut total = 0i64;
    for (i, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let between = beta.iter().filter(|&&c| c > b - r && c < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut nb = beta.clone();
        nb[i] = b - r;
        nb.sort_unstable_by(|a, b| b.cmp(a));
        let n = nb.len();
        let shape: Vec<usize> = nb.iter().enumerate().map(|(k, &c)| c - (n - 1 - k)).filter(|&p| p > 0).collect();
        total += sign * mn_rec(shape, rest.clone());
    }
    MN_CACHE.lock().unwrap().get_or_insert_with(HashMap::new).insert(key, total);
    total
}

/// Multiplicity of S^λ in the induced character Ind_{D_2d}^{S_d} χ_ε.
pub fn dihedral_multiplicity(lambda: &Partition, eps: i8) -> Result<u64> {
    let d = lambda.size();
    let gp = DihedralGroup::new(d, eps)?;
    let mut total = 0i64;
    for e in gp.elements() {
        let ct = Partition(cycle_type(&gp.perm(e)));
        total += gp.character(e) as i64 * mn_rec(lambda.parts().to_vec(), ct.0);
    }
    let n = 2 * d as i64;
    if total % n != 0 || total < 0 {
        return Err(Error::Invariant(format!("dihedral multiplicity of {lambda} is {total}/{n}")));
    }
    Ok((total / n) as u64)
}

/// dim of the GL(n) irreducible S_λ(C^n), by the hook-content formula.
pub fn gl_dim(lambda: &Partition, n: usize) -> u64 {
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for (i, &p) in lambda.parts().iter().enumerate() {
        for j in 0..p {
            let c = n as i64 + j as i64 - i as i64;
            if c <= 0 {
                return 0;
            }
            num *= c;
            den *= lambda.hook(i, j);
        }
    }
    (num / den).to_u64().expect("dimension fits in u64")
}

/// dim of the Sp(2g) irreducible V_λ by the Weyl dimension formula (type C).
pub fn sp_dim(lambda: &Partition, g: usize) -> u64 {
    if lambda.len() > g {
        return 0;
    }
    // l_i = λ_i + ρ_i with ρ = (g, .., 1)
    let l: Vec<i64> = (0..g).map(|i| (lambda.part(i) + g - i) as i64).collect();
    let r: Vec<i64> = (0..g).map(|i| (g - i) as i64).collect();
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for i in 0..g {
        num *= l[i];
        den *= r[i];
        for j in i + 1..g {
            num *= (l[i] - l[j]) * (l[i] + l[j]);
            den *= (r[i] - r[j]) * (r[i] + r[j]);
        }
    }
    (num / den).to_u64().expect("dimension fits in u64")
}

/// Multiplicities m_λ of S^λ in Ind χ_ε, keyed by partitions of d.
pub fn dihedral_multiplicities(d: usize, eps: i8) -> Result<BTreeMap<Partition, u64>> {
    let mut out = BTreeMap::new();
    for lambda in Partition::all(d) {
        let m = dihedral_multiplicity(&lambda, eps)?;
        if m > 0 {
            out.insert(lambda, m);
        }
    }
    Ok(out)
}

/// Predicted top piece dimension Σ_λ m_λ dim V_λ over partitions with at most g rows.
pub fn predict_top_piece(d: usize, eps: i8, g: usize) -> Result<u64> {
    Ok(dihedral_multiplicities(d, eps)?.iter().map(|(l, m)| m * sp_dim(l, g)).sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub d: usize,
    pub eps: i8,
    pub multiplicities: BTreeMap<String, u64>,
}

pub fn multiplicity_report(d: usize, eps: i8) -> Result<MultiplicityReport> {
    Ok(MultiplicityReport {
        d,
        eps,
        multiplicities: dihedral_multiplicities(d, eps)?.into_iter().map(|(l, m)| (l.to_string(), m)).collect(),
    })
}

fn signed_permutations(g: usize) -> Vec<(Vec<usize>, Vec<i8>, i8)> {
    fn perms(n: usize) -> Vec<(Vec<usize>, i8)> {
        if n == 0 {
            return vec![(Vec::new(), 1)];
        }
        let mut out = Vec::new();
        for (p, s) in perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                let moved = (n - 1 - pos) as i32;
                out.push((q, if moved % 2 == 0 { s } else { -s }));
            }
        }
        out
    }
    let mut out = Vec::new();
    for (p, s) in perms(g) {
        for mask in 0u32..(1 << g) {
            let signs: Vec<i8> = (0..g).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let flips = mask.count_ones() as i32;
            out.push((p.clone(), signs, if flips % 2 == 0 { s } else { -s }));
        }
    }
    out
}

/// Sp(2g) multiplicities from a weight-multiplicity function on dominant weights,
/// using m_λ = Σ_w sgn(w) mult(λ + ρ − wρ). Weights with more than `max_size`
/// total boxes are treated as absent.
pub fn sp_multiplicities(g: usize, max_size: usize, mult: impl Fn(&Weight) -> u64) -> BTreeMap<Partition, i64> {
    let weyl = signed_permutations(g);
    let rho: Vec<i64> = (0..g).map(|i| (g - i) as i64).collect();
    let mut out = BTreeMap::new();
    for n in (0..=max_size).rev().step_by(2) {
        for lambda in Partition::all(n) {
            if lambda.len() > g {
                continue;
            }
            let mut m = 0i64;
            for (p, signs, sgn) in &weyl {
                let mut nu: Vec<i64> = (0..g).map(|i| lambda.part(i) as i64 + rho[i]).collect();
                for i in 0..g {
                    nu[p[i]] -= signs[i] as i64 * rho[i];
                }
                if nu.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>() > max_size {
                    continue;
                }
                let w: Vec<i8> = nu.iter().map(|&x| x as i8).collect();
                m += *sgn as i64 * mult(&dominant(&w)) as i64;
            }
            if m != 0 {
                out.insert(lambda, m);
            }
        }
    }
    out
}

/// Character table of S_n: rows λ, columns μ, both in `Partition::all(n)` order.
pub fn character_table(n: usize) -> Vec<Vec<i64>> {
    let parts = Partition::all(n);
    parts.iter().map(|l| parts.iter().map(|m| mn_rec(l.0.clone(), m.0.clone())).collect()).collect()
}

/// Row orthogonality Σ_μ χ^λ(μ) χ^ν(μ) / z_μ = δ_{λν}, checked exactly.
pub fn check_orthogonality(n: usize) -> bool {
    let parts = Partition::all(n);
    let table = character_table(n);
    for a in 0..parts.len() {
        for b in 0..parts.len() {
            let mut s = Q::ZERO;
            for (c, mu) in parts.iter().enumerate() {
                s += Q::from(BigInt::from(table[a][c] * table[b][c])) / Q::from(mu.z());
            }
            let expected = if a == b { Q::ONE } else { Q::ZERO };
            if s != expected {
                return false;
            }
        }
    }
    true
}

/// n! as a BigInt.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, k| a * k)
}

/// Σ_λ (χ^λ(1))² = n!, a cheap sanity check on the table.
pub fn sum_of_squares(n: usize) -> BigInt {
    let parts = Partition::all(n);
    let id = Partition(vec![1; n]);
    let mut s = BigInt::zero();
    for l in &parts {
        let x = mn_rec(l.0.clone(), id.0.clone());
        s += x * x;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mn_examples() {
        assert_eq!(mn_character(&p(&[2, 1]), &p(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(mn_character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
        assert_eq!(mn_character(&p(&[2, 2]), &p(&[2, 2])).unwrap(), 2);
        assert_eq!(mn_character(&p(&[3, 1]), &p(&[2, 1, 1])).unwrap(), 1);
        assert!(mn_character(&p(&[2]), &p(&[1])).is_err());
    }

    #[test]
    fn tables() {
        for n in 1..=7 {
            assert!(check_orthogonality(n));
            assert_eq!(sum_of_squares(n), factorial(n));
        }
    }

    #[test]
    fn dims() {
        assert_eq!(gl_dim(&p(&[2]), 3), 6);
        assert_eq!(gl_dim(&p(&[1, 1]), 3), 3);
        assert_eq!(gl_dim(&p(&[2, 1]), 2), 2);
        assert_eq!(sp_dim(&p(&[1]), 2), 4);
        assert_eq!(sp_dim(&p(&[1, 1]), 2), 5);
        assert_eq!(sp_dim(&p(&[2]), 2), 10);
        assert_eq!(sp_dim(&p(&[1, 1, 1]), 2), 0);
        assert_eq!(sp_dim(&Partition::empty(), 3), 1);
        assert_eq!(sp_dim(&p(&[1, 1, 1]), 3), 14);
        assert_eq!(sp_dim(&p(&[3]), 1), 4);
    }

    #[test]
    fn dihedral_examples() {
        let m = dihedral_multiplicities(3, 1).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[&p(&[3])], 1);
        let m = dihedral_multiplicities(3, -1).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[&p(&[1, 1, 1])], 1);
        let m = dihedral_multiplicities(2, 1).unwrap();
        assert_eq!(m[&p(&[2])], 1);
        assert!(!m.contains_key(&p(&[1, 1])));
    }

    #[test]
    fn sp_multiplicities_of_square() {
        // V⊗V at g=2: weight multiplicities counted directly from words
        let g = 2;
        let words = crate::symplectic::SymplecticSpace::new(g).unwrap().all_words(2);
        let mut counts: HashMap<Weight, u64> = HashMap::new();
        for w in &words {
            *counts.entry(crate::symplectic::weight(g, w)).or_default() += 1;
        }
        let m = sp_multiplicities(g, 2, |mu| counts.get(mu).copied().unwrap_or(0));
        assert_eq!(m.len(), 3);
        assert!(m.values().all(|&v| v == 1));
        assert!(m.contains_key(&p(&[2])) && m.contains_key(&p(&[1, 1])) && m.contains_key(&Partition::empty()));
    }
}
