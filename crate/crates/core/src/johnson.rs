//! The Johnson cokernel on both sides of the comparison, the commuting
//! diagram, the Enomoto–Satoh trace and the isomorphism check on top pieces.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dihedral::TargetBlock;
use crate::error::{Error, Result};
use crate::graph::{beta_power, phi_inverse, pure_loop, trace_disjoint, trace_tree, GraphSum, HairyGraph};
use crate::graph_space::{ihx_partners, loop_chain, quotient_block, GraphSpace, LoopSpace, SpaceParams};
use crate::lie::{basis_tripods, br, t_block, tripod, TreeElement};
use crate::linalg::{Echelon, SparseVec};
use crate::rep::{sp_multiplicities, Partition};
use crate::scalar::Q;
use crate::symplectic::{
    dominant, dominant_weights, orbit_size, weight, words_of_weight, Letter, Projector, SymplecticSpace, TensorVector,
    Weight, WordIndex,
};

/// Sign conventions: σ for reversing a dotted edge, ε for reflections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signs {
    pub sigma: i8,
    pub epsilon: i8,
}

/// The reflection sign induced by σ on loops of length d: (−1)^d σ.
pub fn loop_epsilon(d: usize, sigma: i8) -> i8 {
    if d % 2 == 0 {
        sigma
    } else {
        -sigma
    }
}

/// Calibrated conventions at degree d.
pub fn default_signs(d: usize) -> Signs {
    Signs { sigma: -1, epsilon: loop_epsilon(d, -1) }
}

fn check_genus(g: usize) -> Result<SymplecticSpace> {
    SymplecticSpace::new(g)
}

// ---------------------------------------------------------------------------
// tree side

/// Bases of the iterated bracket images im_k ⊆ T_k, per weight.
#[derive(Clone, Debug)]
pub struct BracketImages {
    pub g: usize,
    /// levels[k - 1] maps a weight to a basis of im_k in that weight.
    pub levels: Vec<HashMap<Weight, Vec<TreeElement>>>,
    tripods: Vec<TreeElement>,
}

fn weight_of(t: &TreeElement) -> Weight {
    let (w, _) = t.tensor().min_word().expect("nonzero element");
    weight(t.g(), w)
}

impl BracketImages {
    /// Computes im_1, .., im_{top} on every weight.
    pub fn new(g: usize, top: usize) -> Result<Self> {
        let space = check_genus(g)?;
        let tripods: Vec<TreeElement> =
            basis_tripods(space).into_iter().map(|(x, y, z)| tripod(space, x, y, z)).collect();
        let mut first: HashMap<Weight, Vec<TreeElement>> = HashMap::new();
        for t in &tripods {
            first.entry(weight_of(t)).or_default().push(t.clone());
        }
        let mut levels = vec![first];
        for k in 2..=top {
            let prev = &levels[k - 2];
            let products: Vec<(Weight, TreeElement)> = prev
                .par_iter()
                .flat_map_iter(|(_, ys)| {
                    ys.iter()
                        .flat_map(|y| tripods.iter().map(move |t| y.bracket(t)))
                        .filter(|z| !z.is_zero())
                        .map(|z| (weight_of(&z), z))
                        .collect::<Vec<_>>()
                })
                .collect();
            let mut grouped: HashMap<Weight, Vec<TreeElement>> = HashMap::new();
            for (w, z) in products {
                grouped.entry(w).or_default().push(z);
            }
            let level: HashMap<Weight, Vec<TreeElement>> = grouped
                .into_par_iter()
                .map(|(w, zs)| {
                    let basis = independent(g, k, &w, zs);
                    (w, basis)
                })
                .collect();
            levels.push(level);
        }
        Ok(BracketImages { g, levels, tripods })
    }

    /// Spanning set of im_d in weight μ from brackets of im_{d-1} with tripods.
    pub fn spanning_set(&self, d: usize, mu: &[i8]) -> Vec<TreeElement> {
        if d == 1 {
            return self.levels[0].get(mu).cloned().unwrap_or_default();
        }
        let prev = &self.levels[d - 2];
        self.tripods
            .par_iter()
            .flat_map_iter(|t| {
                let wt = weight_of(t);
                let need: Weight = mu.iter().zip(&wt).map(|(a, b)| a - b).collect();
                prev.get(&need)
                    .map(|ys| ys.iter().map(|y| y.bracket(t)).filter(|z| !z.is_zero()).collect::<Vec<_>>())
                    .unwrap_or_default()
            })
            .collect()
    }
}

fn independent(g: usize, k: usize, mu: &[i8], zs: Vec<TreeElement>) -> Vec<TreeElement> {
    let index = WordIndex::new(words_of_weight(g, k + 2, mu));
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for z in zs {
        if ech.insert(&index.vector(z.tensor()).expect("weight matches")) {
            out.push(z);
        }
    }
    out
}

fn span_rank(g: usize, d: usize, mu: &[i8], zs: &[TreeElement]) -> usize {
    let index = WordIndex::new(words_of_weight(g, d + 2, mu));
    let mut ech = Echelon::new();
    for z in zs {
        ech.insert(&index.vector(z.tensor()).expect("weight matches"));
    }
    ech.rank()
}

// ---------------------------------------------------------------------------
// cokernel

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumReport {
    pub rank: usize,
    pub hairs: usize,
    pub dim: u64,
    pub multiplicities: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokernelReport {
    pub d: usize,
    pub g: usize,
    pub dim_t: u64,
    pub rank_br: u64,
    pub dim_quotient_tree: u64,
    pub dim_quotient_graph: u64,
    pub strata: Vec<StratumReport>,
    /// Sp multiplicities of T_d / im(br)
    pub tree_multiplicities: BTreeMap<String, i64>,
    /// Sp multiplicities of the whole graph quotient
    pub graph_multiplicities: BTreeMap<String, i64>,
    pub agree: bool,
}

/// Weight-block data of one graph stratum: the quotient dimension for each dominant weight.
pub fn stratum_blocks(d: usize, g: usize, rank: usize, sigma: i8) -> Result<BTreeMap<Weight, u64>> {
    let hairs = d + 2 - 2 * rank;
    let weights = dominant_weights(g, hairs);
    let dims: Vec<Result<(Weight, u64)>> = weights
        .into_par_iter()
        .map(|mu| Ok((mu.clone(), quotient_block(d, g, rank, &mu, sigma, true)?.dim as u64)))
        .collect();
    dims.into_iter().collect()
}

fn stratum_report(d: usize, g: usize, rank: usize, blocks: &BTreeMap<Weight, u64>) -> StratumReport {
    let hairs = d + 2 - 2 * rank;
    let dim = blocks.iter().map(|(mu, n)| orbit_size(mu) * n).sum();
    let mult = sp_multiplicities(g, hairs, |mu| blocks.get(&dominant(mu)).copied().unwrap_or(0));
    StratumReport { rank, hairs, dim, multiplicities: labelled(mult) }
}

fn labelled(mult: BTreeMap<Partition, i64>) -> BTreeMap<String, i64> {
    mult.into_iter().filter(|(_, m)| *m != 0).map(|(p, m)| (p.to_string(), m)).collect()
}

/// Both sides of C_d(V): T_d / im(br) and the harmonic graph quotient by β^{d-1}.
pub fn cokernel_quotient(d: usize, g: usize, sigma: i8) -> Result<CokernelReport> {
    if d < 2 {
        return Err(Error::Infeasible("cokernel_quotient needs d >= 2".into()));
    }
    check_genus(g)?;
    let images = BracketImages::new(g, d - 1)?;
    let mut dim_t = 0;
    let mut rank_br = 0;
    let mut tree_blocks: BTreeMap<Weight, u64> = BTreeMap::new();
    for mu in dominant_weights(g, d + 2) {
        let n = t_block(g, d, &mu).basis.dim();
        let span = images.spanning_set(d, &mu);
        let r = span_rank(g, d, &mu, &span);
        dim_t += orbit_size(&mu) * n as u64;
        rank_br += orbit_size(&mu) * r as u64;
        tree_blocks.insert(mu, (n - r) as u64);
    }
    let tree_multiplicities = labelled(sp_multiplicities(g, d + 2, |mu| tree_blocks[&dominant(mu)]));
    let mut strata = Vec::new();
    let mut graph_multiplicities: BTreeMap<String, i64> = BTreeMap::new();
    for rank in 0..=(d + 2) / 2 {
        let blocks = stratum_blocks(d, g, rank, sigma)?;
        let report = stratum_report(d, g, rank, &blocks);
        for (p, m) in &report.multiplicities {
            *graph_multiplicities.entry(p.clone()).or_default() += m;
        }
        strata.push(report);
    }
    graph_multiplicities.retain(|_, m| *m != 0);
    let dim_quotient_graph = strata.iter().map(|s| s.dim).sum();
    let dim_quotient_tree = dim_t - rank_br;
    Ok(CokernelReport {
        d,
        g,
        dim_t,
        rank_br,
        dim_quotient_tree,
        dim_quotient_graph,
        strata,
        agree: dim_quotient_tree == dim_quotient_graph && tree_multiplicities == graph_multiplicities,
        tree_multiplicities,
        graph_multiplicities,
    })
}

// ---------------------------------------------------------------------------
// the diagram

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramReport {
    pub d: usize,
    pub g: usize,
    pub sigma: i8,
    pub exhaustive: bool,
    pub checked: usize,
    pub skipped_trivial: usize,
    pub left_failures: Vec<serde_json::Value>,
    pub right_failures: Vec<serde_json::Value>,
}

impl DiagramReport {
    pub fn pass(&self) -> bool {
        self.checked > 0 && self.left_failures.is_empty() && self.right_failures.is_empty()
    }
}

/// Whether a sum of unordered graphs lies in the span of IHX relations among
/// the graphs reachable from its summands by IHX moves.
pub fn in_ihx_closure(v: &GraphSum, g: usize) -> Result<bool> {
    if v.is_zero() {
        return Ok(true);
    }
    let sigma = v.sigma();
    let mut seen: HashSet<HairyGraph> = v.iter().map(|(h, _)| h.clone()).collect();
    let mut queue: Vec<HairyGraph> = seen.iter().cloned().collect();
    while let Some(h) = queue.pop() {
        for (s, t) in h.solid_edges() {
            for p in ihx_partners(&h, s, t) {
                let (c, sign) = p.canonical(false, sigma);
                if sign != 0 && seen.insert(c.clone()) {
                    queue.push(c);
                }
            }
        }
    }
    let mut basis: Vec<HairyGraph> = seen.into_iter().collect();
    basis.sort();
    let d = basis[0].units();
    let params = SpaceParams { k: 1, d, g, ordered: false, harmonic: false, sigma };
    let space = GraphSpace::from_basis(params, basis)?;
    Ok(space.in_relations(&space.vector(v)?))
}

fn project_labels(v: &GraphSum, g: usize, proj: &Projector) -> Result<GraphSum> {
    let mut out = GraphSum::new(v.ordered(), v.sigma());
    for (h, c) in v.iter() {
        let labels = h.labels();
        if labels.is_empty() {
            out.add(h, c);
            continue;
        }
        let p = proj.project(&TensorVector::word(g, labels))?;
        for (w, x) in p.iter() {
            out.add(&h.with_labels(w), &(c * x));
        }
    }
    Ok(out)
}

fn tuples(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

/// Checks β^{d-1} ∘ trace_disjoint = trace ∘ br modulo IHX, and that label
/// projection commutes with β^{d-1}. Exhaustive over basis tripods at d = 2,
/// otherwise `trials` seeded samples with br ≠ 0.
pub fn verify_diagram(d: usize, g: usize, trials: usize, seed: u64, sigma: i8) -> Result<DiagramReport> {
    if d < 2 {
        return Err(Error::Infeasible("verify_diagram needs d >= 2".into()));
    }
    let space = check_genus(g)?;
    let tris = basis_tripods(space);
    let exhaustive = d == 2;
    let make = |idx: &[usize]| -> Vec<TreeElement> {
        idx.iter().map(|&i| tripod(space, tris[i].0, tris[i].1, tris[i].2)).collect()
    };
    let mut skipped_trivial = 0;
    let samples: Vec<Vec<usize>> = if tris.is_empty() {
        Vec::new()
    } else if exhaustive {
        tuples(tris.len(), d)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut attempts = 0;
        while out.len() < trials && attempts < 200 * trials.max(1) {
            attempts += 1;
            let t: Vec<usize> = (0..d).map(|_| rng.gen_range(0..tris.len())).collect();
            if br(&make(&t))?.is_zero() {
                skipped_trivial += 1;
            } else {
                out.push(t);
            }
        }
        out
    };
    let proj = Projector::new();
    let results: Vec<Result<(Option<serde_json::Value>, Option<serde_json::Value>)>> = samples
        .par_iter()
        .map(|idx| {
            let factors = make(idx);
            let b = br(&factors)?;
            let x = trace_disjoint(&factors, sigma, 0)?;
            let lhs = beta_power(&x, d - 1)?.forget_order();
            let rhs = trace_tree(&phi_inverse(&b, sigma)?, None);
            let diff = lhs.minus(&rhs);
            let mut by_rank: BTreeMap<i64, GraphSum> = BTreeMap::new();
            for (h, c) in diff.iter() {
                by_rank.entry(h.rank()).or_insert_with(|| GraphSum::new(false, sigma)).add(h, c);
            }
            let mut left_ok = true;
            for part in by_rank.values() {
                let mut by_labels: BTreeMap<Vec<Letter>, GraphSum> = BTreeMap::new();
                for (h, c) in part.iter() {
                    let mut key = h.labels();
                    key.sort_unstable();
                    by_labels.entry(key).or_insert_with(|| GraphSum::new(false, sigma)).add(h, c);
                }
                for piece in by_labels.values() {
                    if !in_ihx_closure(piece, g)? {
                        left_ok = false;
                    }
                }
            }
            let left = (!left_ok).then(|| {
                json!({ "tripods": idx.iter().map(|&i| tris[i]).collect::<Vec<_>>(), "difference": diff.to_json() })
            });
            let a = beta_power(&project_labels(&x, g, &proj)?, d - 1)?;
            let bq = project_labels(&beta_power(&x, d - 1)?, g, &proj)?;
            let right = (a != bq).then(|| json!({ "tripods": idx.iter().map(|&i| tris[i]).collect::<Vec<_>>() }));
            Ok((left, right))
        })
        .collect();
    let mut report = DiagramReport {
        d,
        g,
        sigma,
        exhaustive,
        checked: 0,
        skipped_trivial,
        left_failures: Vec::new(),
        right_failures: Vec::new(),
    };
    for r in results {
        let (l, rt) = r?;
        report.checked += 1;
        report.left_failures.extend(l);
        report.right_failures.extend(rt);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// traces

/// Tensor-level trace: contraction of the first two positions of x.
pub fn es_trace_tensor(x: &TreeElement) -> Result<TensorVector> {
    x.tensor().contract(1, 2)
}

/// Graph-level trace: expand as solid trees, add one ω-weighted dotted
/// edge, rewrite as pure loops and read the words.
pub fn es_trace_graph(x: &TreeElement, sigma: i8) -> Result<TensorVector> {
    let loops = trace_tree(&phi_inverse(x, sigma)?, Some(1));
    crate::graph_space::loop_normal_form(&loops, x.g())
}

fn es_trace_graph_in(ls: &LoopSpace, x: &TreeElement, sigma: i8) -> Result<TensorVector> {
    let loops = trace_tree(&phi_inverse(x, sigma)?, Some(1));
    ls.normal_form(&loops)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceValue {
    pub tensor: TensorVector,
    pub graph: TensorVector,
}

pub fn es_trace(x: &TreeElement, sigma: i8) -> Result<TraceValue> {
    if !x.in_t() {
        return Err(Error::Malformed("es_trace needs an element of T_d".into()));
    }
    Ok(TraceValue { tensor: es_trace_tensor(x)?, graph: es_trace_graph(x, sigma)? })
}

/// Finds κ with graph = κ · tensor for every pair of reduced vectors.
fn common_constant(pairs: &[(SparseVec, SparseVec)]) -> std::result::Result<Option<Q>, String> {
    let mut kappa: Option<Q> = None;
    for (gv, tv) in pairs {
        if tv.is_zero() {
            if !gv.is_zero() {
                return Err("graph trace is nonzero where the tensor trace vanishes".into());
            }
            continue;
        }
        let (i, c) = &tv.entries()[0];
        let k = gv.get(*i) / c.clone();
        if *gv != tv.scale(&k) {
            return Err("traces are not proportional".into());
        }
        match &kappa {
            Some(prev) if *prev != k => return Err(format!("constants {prev} and {k} differ")),
            _ => kappa = Some(k),
        }
    }
    Ok(kappa)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub d: usize,
    pub g: usize,
    pub signs: Signs,
    pub dim_top: u64,
    pub dim_target: u64,
    pub well_defined: bool,
    pub surjective: bool,
    pub isomorphism: bool,
    pub traces_agree: bool,
    pub kappa: Option<String>,
    pub failures: Vec<String>,
}

impl TheoremReport {
    pub fn to_json(&self, runtime_ms: Option<u128>) -> serde_json::Value {
        json!({
            "d": self.d,
            "g": self.g,
            "signs": { "sigma": self.signs.sigma, "epsilon": self.signs.epsilon },
            "dims": { "top": self.dim_top, "target": self.dim_target },
            "checks": {
                "well_defined": self.well_defined,
                "surjective": self.surjective,
                "isomorphism": self.isomorphism,
                "traces_agree": self.traces_agree,
            },
            "kappa": self.kappa,
            "failures": self.failures,
            "runtime_ms": runtime_ms,
        })
    }
}

struct BlockOutcome {
    dim_top: u64,
    dim_target: u64,
    well_defined: bool,
    surjective: bool,
    pairs: Vec<(SparseVec, SparseVec)>,
}

/// π∘Tr^ES on the top piece: well-definedness on im(br), surjectivity, and the
/// rank-one graph quotient against dim [V^<d>]_{D_2d}.
pub fn verify_theorem(d: usize, g: usize, signs: Signs) -> Result<TheoremReport> {
    if d < 2 {
        return Err(Error::Infeasible("verify_theorem needs d >= 2".into()));
    }
    check_genus(g)?;
    let images = BracketImages::new(g, d - 1)?;
    let weights = dominant_weights(g, d);
    let outcomes: Vec<Result<BlockOutcome>> = weights
        .par_iter()
        .map(|mu| {
            let orbit = orbit_size(mu);
            let target = TargetBlock::build(g, d, signs.epsilon, mu)?;
            let tb = t_block(g, d, mu);
            let elements = tb.elements();
            let mut ech = Echelon::new();
            let ls = LoopSpace::build(d, g, mu, signs.sigma)?;
            let mut pairs = Vec::with_capacity(elements.len());
            for x in &elements {
                let tv = target.reduce(&es_trace_tensor(x)?)?;
                ech.insert(&tv);
                let gv = target.reduce(&es_trace_graph_in(&ls, x, signs.sigma)?)?;
                pairs.push((gv, tv));
            }
            let surjective = ech.rank() == target.dim();
            let mut well_defined = true;
            for y in images.spanning_set(d, mu) {
                if !target.reduce(&es_trace_tensor(&y)?)?.is_zero() {
                    well_defined = false;
                    break;
                }
            }
            let top = quotient_block(d, g, 1, mu, signs.sigma, true)?.dim as u64;
            Ok(BlockOutcome {
                dim_top: orbit * top,
                dim_target: orbit * target.dim() as u64,
                well_defined,
                surjective,
                pairs,
            })
        })
        .collect();
    let mut report = TheoremReport {
        d,
        g,
        signs,
        dim_top: 0,
        dim_target: 0,
        well_defined: true,
        surjective: true,
        isomorphism: false,
        traces_agree: true,
        kappa: None,
        failures: Vec::new(),
    };
    let mut pairs = Vec::new();
    for o in outcomes {
        let o = o?;
        report.dim_top += o.dim_top;
        report.dim_target += o.dim_target;
        report.well_defined &= o.well_defined;
        report.surjective &= o.surjective;
        pairs.extend(o.pairs);
    }
    match common_constant(&pairs) {
        Ok(k) => report.kappa = k.map(|k| k.to_string()),
        Err(e) => {
            report.traces_agree = false;
            report.failures.push(format!("traces: {e}"));
        }
    }
    if !report.well_defined {
        report.failures.push("well_defined: a bracket image has nonzero trace".into());
    }
    if !report.surjective {
        report.failures.push("surjective: trace images do not span the target".into());
    }
    if report.dim_top != report.dim_target {
        report.failures.push(format!("dimensions: top {} vs target {}", report.dim_top, report.dim_target));
    }
    report.isomorphism = report.well_defined && report.surjective && report.dim_top == report.dim_target;
    Ok(report)
}

// ---------------------------------------------------------------------------
// calibration

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub sigma: i8,
    pub epsilon: i8,
    pub diagram: bool,
    pub chain: bool,
    pub reflection: bool,
}

impl Candidate {
    pub fn pass(&self) -> bool {
        self.diagram && self.chain && self.reflection
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub d: usize,
    pub g: usize,
    pub candidates: Vec<Candidate>,
    /// diagram evidence for σ = +1 and σ = −1
    pub diagrams: Vec<DiagramReport>,
    pub chosen: Signs,
}

fn distinct_letters(d: usize) -> Vec<Letter> {
    (0..d).map(|i| crate::symplectic::letter_a(i + 1)).collect()
}

/// The ordered d-cycle maps to L(v1..vd) − L(vd v1..v_{d-1}) exactly.
pub fn chain_holds(d: usize, sigma: i8) -> Result<bool> {
    let (_, out, expected) = loop_chain(&distinct_letters(d), sigma)?;
    Ok(out == expected)
}

/// L(rev w) = ε L(w) as canonical graphs.
pub fn reflection_holds(d: usize, sigma: i8, epsilon: i8) -> bool {
    let w = distinct_letters(d);
    let mut r = w.clone();
    r.reverse();
    let a = GraphSum::single(pure_loop(&w), false, sigma);
    let b = GraphSum::single(pure_loop(&r), false, sigma);
    b == a.scale(&Q::int(epsilon as i64))
}

/// Tries all four sign pairs and keeps the unique one passing the diagram,
/// the loop chain and the reflection check.
pub fn calibrate(d: usize, g: usize, trials: usize, seed: u64) -> Result<CalibrationReport> {
    if trials == 0 {
        return Err(Error::Infeasible("calibration with zero trials gives no evidence".into()));
    }
    let mut candidates = Vec::new();
    let mut diagrams = Vec::new();
    for sigma in [1i8, -1] {
        let report = verify_diagram(d, g, trials, seed, sigma)?;
        let diagram = report.pass();
        diagrams.push(report);
        let chain = chain_holds(d, sigma)?;
        for epsilon in [1i8, -1] {
            candidates.push(Candidate { sigma, epsilon, diagram, chain, reflection: reflection_holds(d, sigma, epsilon) });
        }
    }
    let passing: Vec<Signs> =
        candidates.iter().filter(|c| c.pass()).map(|c| Signs { sigma: c.sigma, epsilon: c.epsilon }).collect();
    match passing.as_slice() {
        [chosen] => Ok(CalibrationReport { d, g, chosen: *chosen, candidates, diagrams }),
        [] => Err(Error::Calibration(format!("no sign convention passes at d={d}, g={g}: {candidates:?}"))),
        _ => Err(Error::Calibration(format!("{} sign conventions pass at d={d}, g={g}: {candidates:?}", passing.len()))),
    }
}

// ---------------------------------------------------------------------------
// stabilization

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub d: usize,
    pub reports: Vec<CokernelReport>,
    /// consecutive genera give the same multiplicities on both sides and per stratum
    pub stable: bool,
}

fn same_decomposition(a: &CokernelReport, b: &CokernelReport) -> bool {
    a.tree_multiplicities == b.tree_multiplicities
        && a.graph_multiplicities == b.graph_multiplicities
        && a.strata.iter().zip(&b.strata).all(|(x, y)| x.multiplicities == y.multiplicities)
}

/// Runs cokernel_quotient at each genus and compares the Sp decompositions.
/// Raw dimensions always grow with g, so stability is read on multiplicities.
pub fn stabilization(d: usize, genera: &[usize], sigma: i8) -> Result<StabilizationReport> {
    let reports = genera.iter().map(|&g| cokernel_quotient(d, g, sigma)).collect::<Result<Vec<_>>>()?;
    let stable = reports.windows(2).all(|w| same_decomposition(&w[0], &w[1]));
    Ok(StabilizationReport { d, reports, stable })
}

/// The stable-range contract: both sides agree at g and the decomposition
/// does not change at g + 1.
pub fn check_stable(d: usize, g: usize, sigma: i8) -> Result<StabilizationReport> {
    let scan = stabilization(d, &[g, g + 1], sigma)?;
    let first = &scan.reports[0];
    if !first.agree && !scan.stable {
        return Err(Error::StableRange {
            g,
            d,
            reason: format!(
                "tree quotient {} vs graph quotient {}, and the decomposition changes at g = {}",
                first.dim_quotient_tree,
                first.dim_quotient_graph,
                g + 1
            ),
        });
    }
    Ok(scan)
}

// ---------------------------------------------------------------------------
// figure regressions

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigurePanel {
    pub panel: usize,
    pub name: String,
    pub pass: bool,
    pub detail: serde_json::Value,
}

fn letters(n: usize) -> Vec<Letter> {
    (1..=n).map(crate::symplectic::letter_a).collect()
}

/// Replays the three graph-chain regressions.
pub fn figure_panels(sigma: i8) -> Result<Vec<FigurePanel>> {
    let w = letters(3);
    let (input, output, expected) = loop_chain(&w, sigma)?;
    let reading = crate::graph_space::loop_normal_form(&output, 3)?;
    let class = crate::dihedral::dihedral_normal(&reading, loop_epsilon(3, sigma))?;
    let first = FigurePanel {
        panel: 1,
        name: "ordered 3-loop: beta^2 gives v1v2v3 - v3v1v2, zero in dihedral coinvariants".into(),
        pass: output == expected && class.is_zero(),
        detail: json!({
            "input": input.to_json(),
            "output": output.to_json(),
            "expected": expected.to_json(),
            "reading": reading.to_json(),
            "dihedral_class_zero": class.is_zero(),
        }),
    };
    let v = letters(4);
    let branched = GraphSum::single(crate::graph_space::figure_branched([v[0], v[1], v[2], v[3]]), true, sigma);
    let image = beta_power(&branched, 3)?;
    let second = FigurePanel {
        panel: 2,
        name: "branched 4-unit graph: beta^3 is zero".into(),
        pass: image.is_zero(),
        detail: json!({ "input": branched.to_json(), "output": image.to_json() }),
    };
    let shape = crate::graph_space::figure_commutator([v[0], v[1], v[2], v[3]]);
    let third = match crate::graph_space::commutator_image_test(&shape, sigma)? {
        crate::graph_space::CommutatorOutcome::Inapplicable(why) => FigurePanel {
            panel: 3,
            name: "commutator shape".into(),
            pass: false,
            detail: json!({ "inapplicable": why }),
        },
        crate::graph_space::CommutatorOutcome::Checked {
            step,
            a_hat,
            b_hat,
            image,
            matches_commutator,
            commutator_cyclic_zero,
            image_dihedral_zero,
            normal_form_agrees,
        } => FigurePanel {
            panel: 3,
            name: "commutator shape: image is a_hat b_hat - b_hat a_hat, zero modulo cyclic permutation".into(),
            pass: matches_commutator && commutator_cyclic_zero && image_dihedral_zero && normal_form_agrees,
            detail: json!({
                "double_step": step,
                "a_hat": a_hat.to_json(),
                "b_hat": b_hat.to_json(),
                "image": image.to_json(),
                "matches_commutator": matches_commutator,
                "commutator_cyclic_zero": commutator_cyclic_zero,
                "image_dihedral_zero": image_dihedral_zero,
                "normal_form_agrees": normal_form_agrees,
            }),
        },
    };
    Ok(vec![first, second, third])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_eps() {
        assert_eq!(loop_epsilon(3, -1), 1);
        assert_eq!(loop_epsilon(4, -1), -1);
        assert_eq!(default_signs(2).epsilon, -1);
    }

    #[test]
    fn chain_and_reflection() {
        for d in 2..=4 {
            assert!(chain_holds(d, -1).unwrap());
            assert!(!chain_holds(d, 1).unwrap());
            assert!(reflection_holds(d, -1, loop_epsilon(d, -1)));
            assert!(!reflection_holds(d, -1, -loop_epsilon(d, -1)));
        }
    }

    #[test]
    fn figures_replay() {
        for p in figure_panels(-1).unwrap() {
            assert!(p.pass, "panel {} failed: {}", p.panel, p.detail);
        }
    }

    #[test]
    fn diagram_d2() {
        let r = verify_diagram(2, 2, 0, 0, -1).unwrap();
        assert!(r.pass(), "{r:?}");
    }
}
