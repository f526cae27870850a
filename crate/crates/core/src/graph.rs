//! Hairy Lie graphs with expanded tripod units, canonical forms, β, traces
//! and rank-one loop readings.
//!
//! A graph is a list of trivalent units with three slots each; slot `3u + i`
//! is slot `i` of unit `u`. Every slot is a hair carrying a basis letter, one
//! end of a solid edge, or one end of an oriented dotted edge. `comp[u]` is the
//! position of the unit's solid component in the global order (all zero for
//! unordered graphs).

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde_json::json;

use crate::error::{Error, Result};
use crate::lie::{standard_factorization, TreeElement};
use crate::scalar::Q;
use crate::symplectic::{letter_name, omega, partner, Letter, TensorVector, Word};

/// Placeholder label for shape enumeration.
pub const UNLABELED: Letter = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Hair(Letter),
    Solid(u16),
    Dotted { peer: u16, out: bool },
}

impl Slot {
    fn peer(self) -> Option<usize> {
        match self {
            Slot::Hair(_) => None,
            Slot::Solid(p) | Slot::Dotted { peer: p, .. } => Some(p as usize),
        }
    }

    fn kind(self) -> u16 {
        match self {
            Slot::Hair(_) => 0,
            Slot::Solid(_) => 1,
            Slot::Dotted { .. } => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HairyGraph {
    slots: Vec<Slot>,
    comp: Vec<u8>,
}

fn parity3(p: [u8; 3]) -> i8 {
    let inv = (p[0] > p[1]) as u8 + (p[0] > p[2]) as u8 + (p[1] > p[2]) as u8;
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

impl HairyGraph {
    /// Checked constructor; `comp` may be empty for unordered graphs.
    pub fn new(slots: Vec<Slot>, comp: Vec<u8>) -> Result<Self> {
        if slots.is_empty() || slots.len() % 3 != 0 {
            return Err(Error::Malformed(format!("{} slots is not a positive multiple of 3", slots.len())));
        }
        let comp = if comp.is_empty() { vec![0; slots.len() / 3] } else { comp };
        if comp.len() != slots.len() / 3 {
            return Err(Error::DimensionMismatch { expected: slots.len() / 3, got: comp.len() });
        }
        let g = HairyGraph { slots, comp };
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn raw(slots: Vec<Slot>, comp: Vec<u8>) -> Self {
        HairyGraph { slots, comp }
    }

    /// Start of a builder with `units` units whose slots are all unlabelled hairs.
    pub fn builder(units: usize) -> GraphBuilder {
        GraphBuilder { slots: vec![Slot::Hair(UNLABELED); 3 * units], comp: vec![0; units] }
    }

    pub fn units(&self) -> usize {
        self.slots.len() / 3
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot(&self, s: usize) -> Slot {
        self.slots[s]
    }

    pub fn comp(&self) -> &[u8] {
        &self.comp
    }

    pub fn is_ordered(&self) -> bool {
        self.comp.iter().any(|&c| c != 0) || self.components() == 1
    }

    pub fn hair_slots(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&s| matches!(self.slots[s], Slot::Hair(_))).collect()
    }

    pub fn hairs(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Hair(_))).count()
    }

    /// Hair labels in slot order.
    pub fn labels(&self) -> Word {
        self.slots
            .iter()
            .filter_map(|s| match s {
                Slot::Hair(l) => Some(*l),
                _ => None,
            })
            .collect()
    }

    /// Replaces the hair labels in slot order.
    pub fn with_labels(&self, labels: &[Letter]) -> HairyGraph {
        let mut out = self.clone();
        let mut it = labels.iter();
        for s in out.slots.iter_mut() {
            if let Slot::Hair(l) = s {
                *l = *it.next().expect("one label per hair");
            }
        }
        out
    }

    pub fn set_hair(&mut self, s: usize, l: Letter) {
        debug_assert!(matches!(self.slots[s], Slot::Hair(_)));
        self.slots[s] = Slot::Hair(l);
    }

    pub fn solid_edges(&self) -> Vec<(usize, usize)> {
        (0..self.slots.len())
            .filter_map(|s| match self.slots[s] {
                Slot::Solid(p) if s < p as usize => Some((s, p as usize)),
                _ => None,
            })
            .collect()
    }

    /// Dotted edges as (tail, head).
    pub fn dotted_edges(&self) -> Vec<(usize, usize)> {
        (0..self.slots.len())
            .filter_map(|s| match self.slots[s] {
                Slot::Dotted { peer, out: true } => Some((s, peer as usize)),
                _ => None,
            })
            .collect()
    }

    pub fn num_dotted(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Dotted { .. })).count() / 2
    }

    pub fn num_solid(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Solid(_))).count() / 2
    }

    /// Solid component id per unit (ids are the smallest unit in the component).
    pub fn solid_component_ids(&self) -> Vec<usize> {
        let n = self.units();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (s, t) in self.solid_edges() {
            let (a, b) = (find(&mut parent, s / 3), find(&mut parent, t / 3));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
        (0..n).map(|u| find(&mut parent, u)).collect()
    }

    pub fn components(&self) -> usize {
        let ids = self.solid_component_ids();
        (0..self.units()).filter(|&u| ids[u] == u).count()
    }

    /// #dotted − k + 1.
    pub fn rank(&self) -> i64 {
        self.num_dotted() as i64 - self.components() as i64 + 1
    }

    pub fn is_connected(&self) -> bool {
        let n = self.units();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for i in 0..3 {
                if let Some(p) = self.slots[3 * u + i].peer() {
                    if !seen[p / 3] {
                        seen[p / 3] = true;
                        queue.push_back(p / 3);
                    }
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.slots.len();
        for s in 0..n {
            match self.slots[s] {
                Slot::Hair(_) => {}
                Slot::Solid(p) => {
                    let p = p as usize;
                    if p >= n || p == s || self.slots[p] != Slot::Solid(s as u16) {
                        return Err(Error::Malformed(format!("solid edge at slot {s} is not symmetric")));
                    }
                    if p / 3 == s / 3 {
                        return Err(Error::Malformed(format!("solid loop at unit {}", s / 3)));
                    }
                }
                Slot::Dotted { peer, out } => {
                    let p = peer as usize;
                    if p >= n || p == s || self.slots[p] != (Slot::Dotted { peer: s as u16, out: !out }) {
                        return Err(Error::Malformed(format!("dotted edge at slot {s} is not symmetric")));
                    }
                }
            }
        }
        let k = self.components();
        if self.num_solid() + k != self.units() {
            return Err(Error::Malformed("solid edges contain a cycle".into()));
        }
        if !self.is_connected() {
            return Err(Error::Malformed("graph is not connected".into()));
        }
        if self.rank() < 0 {
            return Err(Error::Malformed("negative rank".into()));
        }
        let ids = self.solid_component_ids();
        for u in 0..self.units() {
            if self.comp[u] != self.comp[ids[u]] {
                return Err(Error::Malformed(format!("unit {u} disagrees with its component order")));
            }
        }
        if self.comp.iter().any(|&c| c != 0) {
            let mut seen = vec![false; k];
            for u in 0..self.units() {
                if ids[u] == u {
                    let c = self.comp[u] as usize;
                    if c >= k || seen[c] {
                        return Err(Error::Malformed("component order is not a bijection".into()));
                    }
                    seen[c] = true;
                }
            }
        }
        Ok(())
    }

    /// Copy with the component order erased.
    pub fn unordered(&self) -> HairyGraph {
        HairyGraph { slots: self.slots.clone(), comp: vec![0; self.units()] }
    }

    /// Canonical representative and the sign with self = sign · canonical;
    /// sign 0 means the graph vanishes by an odd automorphism.
    pub fn canonical(&self, ordered: bool, sigma: i8) -> (HairyGraph, i8) {
        let comp = if ordered { self.comp.clone() } else { vec![0; self.units()] };
        Canon::run(self, comp, sigma)
    }

    /// Encoding of the canonical form, ignoring sign (shape dedupe).
    pub fn shape_key(&self, ordered: bool) -> HairyGraph {
        self.canonical(ordered, 1).0
    }

    pub fn to_json(&self) -> serde_json::Value {
        let labels: BTreeMap<String, String> = (0..self.slots.len())
            .filter_map(|s| match self.slots[s] {
                Slot::Hair(l) => Some((s.to_string(), label_str(l))),
                _ => None,
            })
            .collect();
        json!({
            "units": self.units(),
            "solid_edges": self.solid_edges(),
            "dotted_edges": self.dotted_edges(),
            "labels": labels,
            "order": self.comp,
        })
    }

    /// Graphviz rendering: units are points, hairs are labelled leaves,
    /// dotted edges are dashed arrows.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n  node [shape=point];\n");
        for u in 0..self.units() {
            out.push_str(&format!("  u{u} [xlabel=\"{}\"];\n", self.comp[u] + 1));
        }
        for s in 0..self.slots.len() {
            if let Slot::Hair(l) = self.slots[s] {
                out.push_str(&format!("  h{s} [shape=plaintext, label=\"{}\"];\n  u{} -- h{s};\n", label_str(l), s / 3));
            }
        }
        for (s, t) in self.solid_edges() {
            out.push_str(&format!("  u{} -- u{};\n", s / 3, t / 3));
        }
        for (s, t) in self.dotted_edges() {
            out.push_str(&format!("  u{} -- u{} [style=dashed, dir=forward];\n", s / 3, t / 3));
        }
        out.push_str("}\n");
        out
    }
}

/// Incremental construction by (unit, slot position) addresses.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    slots: Vec<Slot>,
    comp: Vec<u8>,
}

impl GraphBuilder {
    pub fn hair(mut self, unit: usize, pos: usize, l: Letter) -> Self {
        self.slots[3 * unit + pos] = Slot::Hair(l);
        self
    }

    pub fn solid(mut self, a: (usize, usize), b: (usize, usize)) -> Self {
        let (s, t) = (3 * a.0 + a.1, 3 * b.0 + b.1);
        self.slots[s] = Slot::Solid(t as u16);
        self.slots[t] = Slot::Solid(s as u16);
        self
    }

    /// Dotted edge from `tail` to `head`.
    pub fn dotted(mut self, tail: (usize, usize), head: (usize, usize)) -> Self {
        let (s, t) = (3 * tail.0 + tail.1, 3 * head.0 + head.1);
        self.slots[s] = Slot::Dotted { peer: t as u16, out: true };
        self.slots[t] = Slot::Dotted { peer: s as u16, out: false };
        self
    }

    pub fn order(mut self, comp: Vec<u8>) -> Self {
        self.comp = comp;
        self
    }

    pub fn build(self) -> Result<HairyGraph> {
        HairyGraph::new(self.slots, self.comp)
    }
}

fn label_str(l: Letter) -> String {
    if l == UNLABELED {
        "*".into()
    } else {
        letter_name(l)
    }
}

impl fmt::Display for HairyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let units: Vec<String> = (0..self.units())
            .map(|u| {
                let slots: Vec<String> = (0..3)
                    .map(|i| match self.slots[3 * u + i] {
                        Slot::Hair(l) => label_str(l),
                        Slot::Solid(p) => format!("-{p}"),
                        Slot::Dotted { peer, out: true } => format!(">{peer}"),
                        Slot::Dotted { peer, out: false } => format!("<{peer}"),
                    })
                    .collect();
                format!("{}:({})", self.comp[u] + 1, slots.join(" "))
            })
            .collect();
        write!(f, "{}", units.join(" "))
    }
}

// ---------------------------------------------------------------------------
// canonical labelling

const NONE: u16 = u16::MAX;

struct Best {
    enc: Vec<u16>,
    sign: i8,
    zero: bool,
    units: Vec<usize>,
    order: Vec<[u8; 3]>,
}

struct Canon<'a> {
    g: &'a HairyGraph,
    comp: Vec<u8>,
    ukey: Vec<u16>,
    sigma: i8,
    best: Option<Best>,
    newid: Vec<u16>,
    units: Vec<usize>,
    order: Vec<[u8; 3]>,
    enc: Vec<u16>,
}

impl<'a> Canon<'a> {
    fn run(g: &'a HairyGraph, comp: Vec<u8>, sigma: i8) -> (HairyGraph, i8) {
        let n = g.units();
        let slot_key = |s: Slot| -> (u16, u16) {
            match s {
                Slot::Hair(l) => (0, l as u16),
                other => (other.kind(), 0),
            }
        };
        let keys: Vec<(u8, [(u16, u16); 3])> = (0..n)
            .map(|u| {
                let mut k = [slot_key(g.slots[3 * u]), slot_key(g.slots[3 * u + 1]), slot_key(g.slots[3 * u + 2])];
                k.sort_unstable();
                (comp[u], k)
            })
            .collect();
        let mut distinct = keys.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let ukey: Vec<u16> = keys.iter().map(|k| distinct.binary_search(k).unwrap() as u16).collect();
        let mut c = Canon {
            g,
            comp,
            ukey,
            sigma,
            best: None,
            newid: vec![NONE; n],
            units: Vec::with_capacity(n),
            order: Vec::with_capacity(n),
            enc: Vec::with_capacity(4 * n),
        };
        let min_key = *c.ukey.iter().min().unwrap();
        for root in 0..n {
            if c.ukey[root] != min_key {
                continue;
            }
            for p in PERMS {
                let ks: Vec<(u16, u16)> = p.iter().map(|&i| slot_key(g.slots[3 * root + i as usize])).collect();
                if ks[0] > ks[1] || ks[1] > ks[2] {
                    continue;
                }
                c.newid[root] = 0;
                c.units.push(root);
                c.order.push(p);
                c.step(0, 0);
                c.units.pop();
                c.order.pop();
                c.newid[root] = NONE;
            }
        }
        let best = c.best.take().expect("at least one root");
        if best.zero {
            return (c.build(&best), 0);
        }
        (c.build(&best), best.sign)
    }

    fn build(&self, b: &Best) -> HairyGraph {
        let n = self.g.units();
        let mut newslot = vec![0u16; 3 * n];
        for (m, &u) in b.units.iter().enumerate() {
            for j in 0..3 {
                newslot[3 * u + b.order[m][j] as usize] = (3 * m + j) as u16;
            }
        }
        let mut slots = vec![Slot::Hair(0); 3 * n];
        let mut comp = vec![0; n];
        for (m, &u) in b.units.iter().enumerate() {
            comp[m] = self.comp[u];
            for j in 0..3 {
                let me = (3 * m + j) as u16;
                slots[3 * m + j] = match self.g.slots[3 * u + b.order[m][j] as usize] {
                    Slot::Hair(l) => Slot::Hair(l),
                    Slot::Solid(p) => Slot::Solid(newslot[p as usize]),
                    Slot::Dotted { peer, .. } => {
                        let q = newslot[peer as usize];
                        Slot::Dotted { peer: q, out: me < q }
                    }
                };
            }
        }
        HairyGraph { slots, comp }
    }

    fn worse(&self) -> bool {
        match &self.best {
            None => false,
            Some(b) => {
                let n = self.enc.len();
                self.enc[..] > b.enc[..n]
            }
        }
    }

    fn pos_in(&self, m: usize, old_pos: u8) -> Option<u16> {
        self.order.get(m).and_then(|o| o.iter().position(|&x| x == old_pos)).map(|p| p as u16)
    }

    fn refined_key(&self, s: usize, unit_new: usize, entry: u8) -> (u16, u16, u16) {
        match self.g.slots[s] {
            Slot::Hair(l) => (0, l as u16, 0),
            other => {
                let p = other.peer().unwrap();
                let pu = p / 3;
                let id = self.newid[pu];
                if id == NONE {
                    (other.kind(), 1, self.ukey[pu])
                } else {
                    let pos = if id as usize == unit_new {
                        if (p % 3) as u8 == entry {
                            0
                        } else {
                            3
                        }
                    } else {
                        self.pos_in(id as usize, (p % 3) as u8).unwrap()
                    };
                    (other.kind(), 0, id * 4 + pos)
                }
            }
        }
    }

    fn step(&mut self, m: usize, k: usize) {
        if m == self.units.len() {
            assert_eq!(m, self.g.units(), "canonical form requires a connected graph");
            self.finish();
            return;
        }
        if k == 0 {
            self.enc.push(self.comp[self.units[m]] as u16);
            if !self.worse() {
                self.step(m, 1);
            }
            self.enc.pop();
            return;
        }
        if k == 4 {
            self.step(m + 1, 0);
            return;
        }
        let u = self.units[m];
        let pos = self.order[m][k - 1];
        let s = 3 * u + pos as usize;
        match self.g.slots[s] {
            Slot::Hair(l) => {
                self.enc.push(l as u16);
                if !self.worse() {
                    self.step(m, k + 1);
                }
                self.enc.pop();
            }
            other => {
                let base = if other.kind() == 1 { 256 } else { 512 };
                let p = other.peer().unwrap();
                let pu = p / 3;
                if self.newid[pu] != NONE {
                    let id = self.newid[pu] as usize;
                    let code = base + 3 * id as u16 + self.pos_in(id, (p % 3) as u8).unwrap();
                    self.enc.push(code);
                    if !self.worse() {
                        self.step(m, k + 1);
                    }
                    self.enc.pop();
                    return;
                }
                let nid = self.units.len();
                self.newid[pu] = nid as u16;
                let entry = (p % 3) as u8;
                let others: Vec<u8> = (0..3).filter(|&x| x != entry).collect();
                let ka = self.refined_key(3 * pu + others[0] as usize, nid, entry);
                let kb = self.refined_key(3 * pu + others[1] as usize, nid, entry);
                let mut orders = Vec::with_capacity(2);
                if ka <= kb {
                    orders.push([entry, others[0], others[1]]);
                }
                if kb <= ka {
                    orders.push([entry, others[1], others[0]]);
                }
                for o in orders {
                    self.units.push(pu);
                    self.order.push(o);
                    self.enc.push(base + 3 * nid as u16);
                    if !self.worse() {
                        self.step(m, k + 1);
                    }
                    self.enc.pop();
                    self.order.pop();
                    self.units.pop();
                }
                self.newid[pu] = NONE;
            }
        }
    }

    fn finish(&mut self) {
        let mut sign: i8 = self.order.iter().map(|&o| parity3(o)).product();
        let n = self.g.units();
        let mut newslot = vec![0usize; 3 * n];
        for (m, &u) in self.units.iter().enumerate() {
            for j in 0..3 {
                newslot[3 * u + self.order[m][j] as usize] = 3 * m + j;
            }
        }
        for (t, h) in self.g.dotted_edges() {
            if newslot[t] > newslot[h] {
                sign *= self.sigma;
            }
        }
        match &mut self.best {
            Some(b) if b.enc == self.enc => {
                if b.sign != sign {
                    b.zero = true;
                }
            }
            Some(b) if b.enc < self.enc => {}
            _ => {
                self.best = Some(Best {
                    enc: self.enc.clone(),
                    sign,
                    zero: false,
                    units: self.units.clone(),
                    order: self.order.clone(),
                });
            }
        }
    }
}

const PERMS: [[u8; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

// ---------------------------------------------------------------------------
// formal sums

/// Formal sum of canonical graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSum {
    ordered: bool,
    sigma: i8,
    terms: BTreeMap<HairyGraph, Q>,
}

impl GraphSum {
    pub fn new(ordered: bool, sigma: i8) -> Self {
        GraphSum { ordered, sigma, terms: BTreeMap::new() }
    }

    pub fn single(g: HairyGraph, ordered: bool, sigma: i8) -> Self {
        let mut s = Self::new(ordered, sigma);
        s.add(&g, &Q::ONE);
        s
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn sigma(&self) -> i8 {
        self.sigma
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

    pub fn iter(&self) -> impl Iterator<Item = (&HairyGraph, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &HairyGraph) -> Q {
        let (c, s) = g.canonical(self.ordered, self.sigma);
        match s {
            0 => Q::ZERO,
            s => self.terms.get(&c).cloned().unwrap_or(Q::ZERO) * Q::int(s as i64),
        }
    }

    pub fn add(&mut self, g: &HairyGraph, c: &Q) {
        if c.is_zero() {
            return;
        }
        let (canon, s) = g.canonical(self.ordered, self.sigma);
        if s == 0 {
            return;
        }
        let c = if s < 0 { -c.clone() } else { c.clone() };
        self.add_canonical(canon, c);
    }

    fn add_canonical(&mut self, g: HairyGraph, c: Q) {
        let e = self.terms.entry(g).or_insert(Q::ZERO);
        *e += &c;
        if e.is_zero() {
            let key = self.terms.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).unwrap();
            self.terms.remove(&key);
        }
    }

    pub fn add_sum(&mut self, c: &Q, other: &GraphSum) {
        for (g, v) in other.iter() {
            if self.ordered == other.ordered && self.sigma == other.sigma {
                self.add_canonical(g.clone(), c * v);
            } else {
                self.add(g, &(c * v));
            }
        }
    }

    pub fn scale(&self, c: &Q) -> GraphSum {
        let mut out = GraphSum::new(self.ordered, self.sigma);
        out.add_sum(c, self);
        out
    }

    pub fn minus(&self, other: &GraphSum) -> GraphSum {
        let mut out = self.clone();
        out.add_sum(&-Q::ONE, other);
        out
    }

    /// Drops the global order on solid components.
    pub fn forget_order(&self) -> GraphSum {
        let mut out = GraphSum::new(false, self.sigma);
        for (g, c) in self.iter() {
            out.add(&g.unordered(), c);
        }
        out
    }

    /// Keeps the summands with the given rank.
    pub fn rank_part(&self, r: i64) -> GraphSum {
        GraphSum {
            ordered: self.ordered,
            sigma: self.sigma,
            terms: self.terms.iter().filter(|(g, _)| g.rank() == r).map(|(g, c)| (g.clone(), c.clone())).collect(),
        }
    }

    /// Replaces hair labels by a linear map on label words.
    pub fn map_labels(&self, f: impl Fn(&Word) -> Vec<(Word, Q)>) -> GraphSum {
        let mut out = GraphSum::new(self.ordered, self.sigma);
        for (g, c) in self.iter() {
            for (w, x) in f(&g.labels()) {
                out.add(&g.with_labels(&w), &(c * &x));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .iter()
            .map(|(g, c)| {
                let mut v = g.to_json();
                v["coefficient"] = json!(c.to_string());
                v
            })
            .collect();
        json!({ "ordered": self.ordered, "sigma": self.sigma, "terms": terms })
    }
}

impl fmt::Display for GraphSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.iter().map(|(g, c)| format!("({c}) [{g}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// ---------------------------------------------------------------------------
// β

/// One application of β to a single ordered graph, without canonicalization.
pub fn beta_raw(g: &HairyGraph, sigma: i8) -> Result<Vec<(i8, HairyGraph)>> {
    let k = g.components();
    if k < 2 {
        return Err(Error::Invariant(format!("β needs at least two solid components, found {k}")));
    }
    let mut out = Vec::new();
    for (t, h) in g.dotted_edges() {
        let (ct, ch) = (g.comp[t / 3], g.comp[h / 3]);
        if !((ct == 0 && ch == 1) || (ct == 1 && ch == 0)) {
            continue;
        }
        let coef = if ct == 0 { 1 } else { sigma };
        let mut slots = g.slots.clone();
        slots[t] = Slot::Solid(h as u16);
        slots[h] = Slot::Solid(t as u16);
        let comp: Vec<u8> = g.comp.iter().map(|&c| if c <= 1 { 0 } else { c - 1 }).collect();
        let next = HairyGraph { slots, comp };
        check_beta_step(g, &next)?;
        out.push((coef, next));
    }
    Ok(out)
}

fn check_beta_step(before: &HairyGraph, after: &HairyGraph) -> Result<()> {
    let ok = after.num_solid() == before.num_solid() + 1
        && after.num_dotted() + 1 == before.num_dotted()
        && after.components() + 1 == before.components()
        && after.rank() == before.rank()
        && after.is_connected();
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant(format!("β step broke the structural invariants: {before} -> {after}")))
    }
}

pub fn beta(v: &GraphSum) -> Result<GraphSum> {
    if !v.ordered {
        return Err(Error::Unordered);
    }
    let mut out = GraphSum::new(true, v.sigma);
    for (g, c) in v.iter() {
        for (s, h) in beta_raw(g, v.sigma)? {
            out.add(&h, &(c * &Q::int(s as i64)));
        }
    }
    Ok(out)
}

pub fn beta_power(v: &GraphSum, n: usize) -> Result<GraphSum> {
    let mut cur = v.clone();
    for _ in 0..n {
        cur = beta(&cur)?;
    }
    Ok(cur)
}

/// β^n on one ordered graph without intermediate canonicalization.
pub fn beta_power_raw(g: &HairyGraph, n: usize, sigma: i8) -> Result<Vec<(i8, HairyGraph)>> {
    let mut cur = vec![(1i8, g.clone())];
    for _ in 0..n {
        let mut next = Vec::new();
        for (c, h) in &cur {
            for (s, x) in beta_raw(h, sigma)? {
                next.push((c * s, x));
            }
        }
        cur = next;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// trees, Φ and traces

fn attach(slots: &mut Vec<Slot>, parent: usize, w: &[Letter]) {
    if w.len() == 1 {
        slots[parent] = Slot::Hair(w[0]);
        return;
    }
    let (u, v) = standard_factorization(w).expect("Lyndon word");
    let unit = slots.len() / 3;
    slots.extend([Slot::Hair(0); 3]);
    slots[3 * unit] = Slot::Solid(parent as u16);
    slots[parent] = Slot::Solid((3 * unit) as u16);
    attach(slots, 3 * unit + 1, &u);
    attach(slots, 3 * unit + 2, &v);
}

/// The solid tree of x ⊗ P_w rooted at the hair x, for a Lyndon word w of length ≥ 2.
pub fn tree_graph(x: Letter, w: &[Letter]) -> HairyGraph {
    assert!(w.len() >= 2, "tree_graph needs a Lie word of degree >= 2");
    let (u, v) = standard_factorization(w).expect("Lyndon word");
    let mut slots = vec![Slot::Hair(x), Slot::Hair(0), Slot::Hair(0)];
    attach(&mut slots, 1, &u);
    attach(&mut slots, 2, &v);
    let n = slots.len() / 3;
    HairyGraph { slots, comp: vec![0; n] }
}

/// Φ⁻¹ on T_d: (1/(d+2)) Σ c · tree(x, P_w).
pub fn phi_inverse(x: &TreeElement, sigma: i8) -> Result<GraphSum> {
    let d = x.degree();
    let mut out = GraphSum::new(false, sigma);
    let scale = Q::new(1, d as i64 + 2);
    for (letter, u) in x.pairs()? {
        for (w, c) in u.iter() {
            out.add(&tree_graph(letter, w), &(c * &scale));
        }
    }
    Ok(out)
}

/// Lie element read off the subtree entered through slot `entry` of `unit`.
fn read_from(g: &HairyGraph, gen: usize, unit: usize, entry: usize) -> Result<TensorVector> {
    let a = side(g, gen, 3 * unit + (entry + 1) % 3)?;
    let b = side(g, gen, 3 * unit + (entry + 2) % 3)?;
    Ok(a.commutator(&b))
}

fn side(g: &HairyGraph, gen: usize, s: usize) -> Result<TensorVector> {
    match g.slots[s] {
        Slot::Hair(l) => Ok(TensorVector::word(gen, vec![l])),
        Slot::Solid(p) => read_from(g, gen, p as usize / 3, p as usize % 3),
        Slot::Dotted { .. } => Err(Error::Malformed("dotted edge inside a hanging tree".into())),
    }
}

fn genus_of(g: &HairyGraph) -> usize {
    g.labels().iter().map(|&l| l as usize / 2 + 1).max().unwrap_or(1)
}

/// Φ on tree graphs: Σ over hairs of label ⊗ (Lie element rooted at that hair).
pub fn phi(v: &GraphSum, gen: usize) -> Result<TensorVector> {
    let mut out: Option<TensorVector> = None;
    for (g, c) in v.iter() {
        if g.components() != 1 || g.num_dotted() != 0 {
            return Err(Error::Malformed(format!("Φ needs a solid tree, got {g}")));
        }
        let gen = gen.max(genus_of(g));
        for s in g.hair_slots() {
            let Slot::Hair(l) = g.slots[s] else { unreachable!() };
            let t = TensorVector::word(gen, vec![l]).concat(&read_from(g, gen, s / 3, s % 3)?);
            match &mut out {
                Some(o) => o.add_scaled(c, &t),
                None => out = Some(t.scale(c)),
            }
        }
    }
    Ok(out.unwrap_or_else(|| TensorVector::zero(gen, 0)))
}

/// All sets of disjoint pairs among `hairs` whose labels pair nontrivially,
/// with the number of pairs constrained by `accept`.
fn weighted_pairings(labels: &[(usize, Letter)], accept: &dyn Fn(usize) -> bool) -> Vec<(i64, Vec<(usize, usize)>)> {
    fn rec(
        labels: &[(usize, Letter)],
        i: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        w: i64,
        accept: &dyn Fn(usize) -> bool,
        out: &mut Vec<(i64, Vec<(usize, usize)>)>,
    ) {
        if i == labels.len() {
            if accept(cur.len()) {
                out.push((w, cur.clone()));
            }
            return;
        }
        if used[i] {
            rec(labels, i + 1, used, cur, w, accept, out);
            return;
        }
        rec(labels, i + 1, used, cur, w, accept, out);
        for j in i + 1..labels.len() {
            if used[j] || labels[j].1 != partner(labels[i].1) {
                continue;
            }
            used[j] = true;
            cur.push((labels[i].0, labels[j].0));
            rec(labels, i + 1, used, cur, w * omega(labels[i].1, labels[j].1), accept, out);
            cur.pop();
            used[j] = false;
        }
    }
    let mut out = Vec::new();
    rec(labels, 0, &mut vec![false; labels.len()], &mut Vec::new(), 1, accept, &mut out);
    out
}

/// Converts hair pairs into dotted edges oriented from the lower slot.
fn with_dotted(g: &HairyGraph, pairs: &[(usize, usize)]) -> HairyGraph {
    let mut slots = g.slots.clone();
    for &(p, q) in pairs {
        slots[p] = Slot::Dotted { peer: q as u16, out: true };
        slots[q] = Slot::Dotted { peer: p as u16, out: false };
    }
    HairyGraph { slots, comp: g.comp.clone() }
}

fn connected_raw(slots: &[Slot]) -> bool {
    HairyGraph { slots: slots.to_vec(), comp: vec![0; slots.len() / 3] }.is_connected()
}

/// Disjoint union of the tripod expansions of degree-one factors, with
/// dotted edges added in every connected way, weighted by ω. `min_edges`
/// filters by the number of added edges.
pub fn trace_disjoint(factors: &[TreeElement], sigma: i8, min_edges: usize) -> Result<GraphSum> {
    let mut units: Vec<(Q, Vec<Slot>)> = vec![(Q::ONE, Vec::new())];
    for (i, t) in factors.iter().enumerate() {
        if t.degree() != 1 || !t.in_t() {
            return Err(Error::NotTripodSpan(format!("factor {} is not in T_1", i + 1)));
        }
        let expansion = phi_inverse(t, sigma)?;
        let mut next = Vec::new();
        for (c, slots) in &units {
            for (g, x) in expansion.iter() {
                let mut s = slots.clone();
                s.extend_from_slice(&g.slots);
                next.push((c * x, s));
            }
        }
        units = next;
    }
    let d = factors.len();
    let comp: Vec<u8> = (0..d as u8).collect();
    let mut out = GraphSum::new(true, sigma);
    for (c, slots) in units {
        let base = HairyGraph { slots, comp: comp.clone() };
        let labels: Vec<(usize, Letter)> =
            base.hair_slots().into_iter().map(|s| (s, match base.slots[s] { Slot::Hair(l) => l, _ => unreachable!() })).collect();
        let accept = |n: usize| n >= min_edges && n + 1 >= d;
        for (w, pairs) in weighted_pairings(&labels, &accept) {
            let g = with_dotted(&base, &pairs);
            if connected_raw(&g.slots) {
                out.add(&g, &(&c * &Q::int(w)));
            }
        }
    }
    Ok(out)
}

/// Trace of an unordered sum: dotted edges added along all ω-weighted
/// pairings of hairs, keeping `r` pairs if given.
pub fn trace_tree(v: &GraphSum, r: Option<usize>) -> GraphSum {
    let mut out = GraphSum::new(false, v.sigma);
    for (g, c) in v.iter() {
        let labels: Vec<(usize, Letter)> =
            g.hair_slots().into_iter().map(|s| (s, match g.slots[s] { Slot::Hair(l) => l, _ => unreachable!() })).collect();
        let accept = |n: usize| r.is_none_or(|r| n == r);
        for (w, pairs) in weighted_pairings(&labels, &accept) {
            out.add(&with_dotted(g, &pairs), &(c * &Q::int(w)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// rank-one loops

/// Pure hairy loop: unit i has slots (in, hair v_i, out); the dotted edge closes
/// the loop from the last unit back to the first.
pub fn pure_loop(w: &[Letter]) -> HairyGraph {
    let d = w.len();
    let mut slots = Vec::with_capacity(3 * d);
    for (i, &l) in w.iter().enumerate() {
        slots.push(if i == 0 { Slot::Dotted { peer: (3 * d - 1) as u16, out: false } } else { Slot::Solid((3 * i - 1) as u16) });
        slots.push(Slot::Hair(l));
        slots.push(if i + 1 == d { Slot::Dotted { peer: 0, out: true } } else { Slot::Solid((3 * i + 3) as u16) });
    }
    HairyGraph { slots, comp: vec![0; d] }
}

/// The ordered loop of d tripods, each its own component, joined cyclically by
/// dotted edges from slot 2 of unit i to slot 0 of unit i+1.
pub fn ordered_loop(w: &[Letter]) -> HairyGraph {
    let d = w.len();
    let mut slots = Vec::with_capacity(3 * d);
    for (i, &l) in w.iter().enumerate() {
        let prev = (3 * ((i + d - 1) % d) + 2) as u16;
        let next = (3 * ((i + 1) % d)) as u16;
        slots.push(Slot::Dotted { peer: prev, out: false });
        slots.push(Slot::Hair(l));
        slots.push(Slot::Dotted { peer: next, out: true });
    }
    HairyGraph { slots, comp: (0..d as u8).collect() }
}

pub fn is_pure_loop(g: &HairyGraph) -> bool {
    g.components() == 1 && g.num_dotted() == 1 && loop_path(g).map(|(p, _)| p.len() == g.units()).unwrap_or(false)
}

/// Units on the cycle from the dotted head to its tail, with (in, hang, out) positions.
fn loop_path(g: &HairyGraph) -> Result<(Vec<usize>, Vec<[usize; 3]>)> {
    let edges = g.dotted_edges();
    if edges.len() != 1 || g.components() != 1 {
        return Err(Error::LoopNormalForm(format!("not a connected rank-one graph: {g}")));
    }
    let (tail, head) = edges[0];
    let n = g.units();
    let mut prev = vec![usize::MAX; n];
    let start = head / 3;
    prev[start] = start;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for i in 0..3 {
            if let Slot::Solid(p) = g.slots[3 * u + i] {
                let v = p as usize / 3;
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
    }
    let mut path = vec![tail / 3];
    while *path.last().unwrap() != start {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    let mut roles = Vec::with_capacity(path.len());
    for (i, &u) in path.iter().enumerate() {
        let link = |v: usize| (0..3).find(|&j| matches!(g.slots[3 * u + j], Slot::Solid(p) if p as usize / 3 == v)).unwrap();
        let inp = if i == 0 { head % 3 } else { link(path[i - 1]) };
        let out = if i + 1 == path.len() { tail % 3 } else { link(path[i + 1]) };
        roles.push([inp, 3 - inp - out, out]);
    }
    Ok((path, roles))
}

/// Word reading of a rank-one, single-component graph: walk from the dotted
/// head to its tail, concatenating the Lie elements hanging off the cycle.
pub fn loop_reading(g: &HairyGraph, gen: usize) -> Result<TensorVector> {
    let (path, roles) = loop_path(g)?;
    let gen = gen.max(genus_of(g));
    let mut out = TensorVector::scalar(gen, Q::ONE);
    let mut sign = 1i64;
    for (&u, r) in path.iter().zip(&roles) {
        sign *= parity3([r[0] as u8, r[1] as u8, r[2] as u8]) as i64;
        out = out.concat(&side(g, gen, 3 * u + r[1])?);
    }
    Ok(out.scale(&Q::int(sign)))
}

/// The cycle of a rank-one graph as (unit, sign of (in, hang, out), hanging
/// Lie element) from the dotted head to its tail.
pub fn loop_pieces(g: &HairyGraph, gen: usize) -> Result<Vec<(usize, i8, TensorVector)>> {
    let (path, roles) = loop_path(g)?;
    let gen = gen.max(genus_of(g));
    path.iter()
        .zip(&roles)
        .map(|(&u, r)| Ok((u, parity3([r[0] as u8, r[1] as u8, r[2] as u8]), side(g, gen, 3 * u + r[1])?)))
        .collect()
}

/// Sum of loop readings.
pub fn loop_reading_sum(v: &GraphSum, gen: usize) -> Result<TensorVector> {
    let mut out: Option<TensorVector> = None;
    for (g, c) in v.iter() {
        let t = loop_reading(g, gen)?;
        match &mut out {
            Some(o) => o.add_scaled(c, &t),
            None => out = Some(t.scale(c)),
        }
    }
    Ok(out.unwrap_or_else(|| TensorVector::zero(gen, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::tripod;
    use crate::symplectic::{letter_a, letter_b, SymplecticSpace};

    fn a(i: usize) -> Letter {
        letter_a(i)
    }
    fn b(i: usize) -> Letter {
        letter_b(i)
    }

    fn tripod_graph(x: Letter, y: Letter, z: Letter) -> HairyGraph {
        HairyGraph::new(vec![Slot::Hair(x), Slot::Hair(y), Slot::Hair(z)], vec![]).unwrap()
    }

    #[test]
    fn tripod_alternation() {
        let (c1, s1) = tripod_graph(a(1), b(1), a(2)).canonical(false, -1);
        let (c2, s2) = tripod_graph(b(1), a(1), a(2)).canonical(false, -1);
        assert_eq!(c1, c2);
        assert_eq!(s1, -s2);
        assert_eq!(tripod_graph(a(1), a(1), b(1)).canonical(false, -1).1, 0);
    }

    #[test]
    fn canonical_idempotent() {
        let g = pure_loop(&[a(1), b(1), a(2)]);
        let (c, s) = g.canonical(false, -1);
        assert_ne!(s, 0);
        assert_eq!(c.canonical(false, -1), (c.clone(), 1));
    }

    #[test]
    fn validation() {
        assert!(HairyGraph::new(vec![Slot::Solid(1), Slot::Solid(0), Slot::Hair(0)], vec![]).is_err());
        let two = vec![Slot::Hair(0), Slot::Hair(0), Slot::Hair(1), Slot::Hair(0), Slot::Hair(0), Slot::Hair(1)];
        assert!(HairyGraph::new(two, vec![]).is_err());
        assert!(pure_loop(&[a(1), a(2)]).validate().is_ok());
        assert!(ordered_loop(&[a(1), a(2), a(3)]).validate().is_ok());
    }

    #[test]
    fn phi_round_trip() {
        let space = SymplecticSpace::new(2).unwrap();
        let t = tripod(space, a(1), b(1), a(2));
        let g = phi_inverse(&t, -1).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(phi(&g, 2).unwrap(), *t.tensor());
    }

    #[test]
    fn pure_loop_reading() {
        let w = vec![a(1), b(1), a(2)];
        assert_eq!(loop_reading(&pure_loop(&w), 2).unwrap(), TensorVector::word(2, w));
    }

    #[test]
    fn beta_two_edges() {
        // two tripods joined by two dotted edges
        let mut slots = vec![Slot::Hair(a(1)), Slot::Hair(0), Slot::Hair(0), Slot::Hair(a(2)), Slot::Hair(0), Slot::Hair(0)];
        slots[1] = Slot::Dotted { peer: 4, out: true };
        slots[4] = Slot::Dotted { peer: 1, out: false };
        slots[2] = Slot::Dotted { peer: 5, out: true };
        slots[5] = Slot::Dotted { peer: 2, out: false };
        let g = HairyGraph::new(slots, vec![0, 1]).unwrap();
        let raw = beta_raw(&g, -1).unwrap();
        assert_eq!(raw.len(), 2);
        let out = beta(&GraphSum::single(g, true, -1)).unwrap();
        for (h, _) in out.iter() {
            assert_eq!(h.rank(), 1);
            assert_eq!(h.components(), 1);
        }
    }

    #[test]
    fn beta_rejects_unordered() {
        let s = GraphSum::single(pure_loop(&[a(1), a(2)]), false, -1);
        assert!(matches!(beta(&s), Err(Error::Unordered)));
    }

    #[test]
    fn trace_with_no_pairs_vanishes() {
        let space = SymplecticSpace::new(3).unwrap();
        let t = tripod(space, a(1), a(2), a(3));
        assert!(trace_disjoint(&[t.clone(), t], -1, 0).unwrap().is_zero());
    }

    #[test]
    fn single_tripod_trace() {
        let space = SymplecticSpace::new(1).unwrap();
        let t = tripod(space, a(1), b(1), a(1));
        assert!(t.is_zero());
        let space = SymplecticSpace::new(2).unwrap();
        let t = tripod(space, a(1), b(1), a(2));
        let out = trace_disjoint(&[t], -1, 0).unwrap();
        // the bare tripod and the tripod with its a1-b1 hairs joined
        assert_eq!(out.len(), 2);
    }
}
