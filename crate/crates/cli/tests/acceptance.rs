//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The theorem, cokernel and diagram criteria are read off `cokernel verify`
//! JSON; the rest call the library directly against oracles written here.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use cokernel_core::dihedral::{burnside_dim, coinvariant_space, harmonic_coinvariant_dim};
use cokernel_core::johnson::{default_signs, verify_diagram, verify_theorem, Signs};
use cokernel_core::lie::{
    basis_tripods, br, bracket_map, lie_dim, lyndon_tensor, lyndon_words, tripod, witt_dim, Derivation, LiePoly,
    TreeElement,
};
use cokernel_core::linalg::Echelon;
use cokernel_core::rep::{
    character_table, check_orthogonality, dihedral_multiplicities, factorial, gl_dim, predict_top_piece,
    sum_of_squares, Partition,
};
use cokernel_core::symplectic::{
    dominant_weights, harmonic_block, is_harmonic, letter_a, letter_b, Projector, SymplecticSpace, TensorVector,
    WordIndex,
};
use cokernel_core::Q;

const STABLE: [usize; 3] = [2, 3, 4];

struct Line {
    criterion: u8,
    pass: bool,
    /// Set when the failure matches the recorded unattainable case exactly.
    known: bool,
    detail: String,
}

fn cokernel(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_cokernel"))
        .args(args)
        .env_remove("COKERNEL_CACHE_DIR")
        .output()
        .expect("cokernel binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), json)
}

struct Run {
    d: usize,
    json: Value,
    seconds: f64,
}

fn verify_runs() -> Vec<Run> {
    STABLE
        .iter()
        .map(|&d| {
            let t = Instant::now();
            let ds = d.to_string();
            let (_, json) = cokernel(&["verify", "--d", &ds, "--g", &ds, "--trials", "100", "--seed", "0", "--timing"]);
            Run { d, json, seconds: t.elapsed().as_secs_f64() }
        })
        .collect()
}

fn criterion1(runs: &[Run]) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let j = &r.json;
        let eps = j["signs"]["epsilon"].as_i64().unwrap_or(0) as i8;
        let target = harmonic_coinvariant_dim(r.d, r.d, eps).ok();
        let top = j["dims"]["top"].as_u64();
        let budget = if r.d <= 3 { 60.0 } else { 900.0 };
        let ok = j["checks"]["well_defined"] == true
            && j["checks"]["surjective"] == true
            && top.is_some()
            && top == j["dims"]["target"].as_u64()
            && top == target
            && r.seconds <= budget;
        pass &= ok;
        parts.push(format!("({0},{0}) top {1:?} target {2:?} in {3:.1}s", r.d, top.unwrap_or(0), target.unwrap_or(0), r.seconds));
    }
    Line { criterion: 1, pass, known: false, detail: parts.join("; ") }
}

fn criterion2(runs: &[Run]) -> Line {
    let mut pass = true;
    let mut known = true;
    let mut parts = Vec::new();
    for r in runs {
        let c = &r.json["cokernel"];
        let reports = c["reports"].as_array().cloned().unwrap_or_default();
        let agree = !reports.is_empty() && reports.iter().all(|x| x["agree"] == true);
        let stable = c["stable"] == true;
        let first = reports.first().cloned().unwrap_or(Value::Null);
        let (tree, graph) = (&first["dim_quotient_tree"], &first["dim_quotient_graph"]);
        if !(agree && stable) {
            pass = false;
            known &= r.d == 2 && *tree == 14 && *graph == 0;
        }
        parts.push(format!("({0},{0}) tree {tree} graph {graph} stable {stable}", r.d));
    }
    let mut detail = parts.join("; ");
    if !pass && known {
        detail.push_str(" [known: g = 2 lies below the stable range at d = 2]");
    }
    Line { criterion: 2, pass, known: !pass && known, detail }
}

fn criterion3(runs: &[Run]) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let diag = &r.json["diagram"];
        let passing = r.json["calibration"]["candidates"]
            .as_array()
            .map(|c| c.iter().filter(|x| x["pass"] == true).count())
            .unwrap_or(0);
        let checked = diag["checked"].as_u64().unwrap_or(0);
        let coverage = if r.d == 2 { diag["exhaustive"] == true } else { checked >= 100 };
        let ok = diag["pass"] == true && coverage && passing == 1;
        pass &= ok;
        parts.push(format!("d={} checked {checked} passing pairs {passing}", r.d));
    }
    Line { criterion: 3, pass, known: false, detail: parts.join("; ") }
}

fn criterion4() -> Line {
    let (code, json) = cokernel(&["figures"]);
    let pass = code == 0 && json["pass"] == true;
    let n = json["panels"].as_array().map_or(0, |p| p.iter().filter(|x| x["pass"] == true).count());
    Line { criterion: 4, pass, known: false, detail: format!("figures exit {code}, {n}/3 panels") }
}

fn criterion5() -> Line {
    let mut cases = 0;
    let mut bad = Vec::new();
    for n in 1..=6 {
        for d in 1..=6 {
            for eps in [1i8, -1] {
                cases += 1;
                let brute = coinvariant_space(n, d, eps).expect("valid parameters").dim;
                let b = burnside_dim(n, d, eps).expect("valid parameters");
                if b != Q::int(brute as i64) {
                    bad.push(format!("(n={n}, d={d}, eps={eps}): {b} vs {brute}"));
                }
            }
        }
    }
    Line { criterion: 5, pass: bad.is_empty() && cases == 72, known: false, detail: format!("{cases} cases, mismatches {bad:?}") }
}

/// Hook length formula.
fn hook_dim(l: &Partition) -> u128 {
    let p = l.parts();
    let n = l.size();
    let mut hooks: u128 = 1;
    for (i, &row) in p.iter().enumerate() {
        for j in 0..row {
            let below = p[i + 1..].iter().filter(|&&r| r > j).count();
            hooks *= (row - j + below) as u128;
        }
    }
    (1..=n as u128).product::<u128>() / hooks
}

fn criterion6(runs: &[Run]) -> Line {
    let mut bad = Vec::new();
    for n in 1..=6 {
        for d in 1..=6 {
            for eps in [1i8, -1] {
                let m = dihedral_multiplicities(d, eps).expect("valid parameters");
                let sum: u64 = m.iter().map(|(l, k)| k * gl_dim(l, n)).sum();
                let b = burnside_dim(n, d, eps).expect("valid parameters");
                if b != Q::int(sum as i64) {
                    bad.push(format!("gl sum (n={n}, d={d}, eps={eps})"));
                }
            }
        }
    }
    for d in 1..=7 {
        let parts = Partition::all(d);
        let table = character_table(d);
        let id = parts.iter().position(|p| p.parts().iter().all(|&x| x == 1)).expect("identity class");
        let degrees_ok = parts.iter().zip(&table).all(|(l, row)| row[id] as u128 == hook_dim(l));
        let squares: u128 = parts.iter().map(|l| hook_dim(l).pow(2)).sum();
        let fact = factorial(d);
        if !check_orthogonality(d) || !degrees_ok || sum_of_squares(d) != fact || fact != squares.into() {
            bad.push(format!("character table d={d}"));
        }
    }
    let mut three = Vec::new();
    for r in runs {
        let eps = r.json["signs"]["epsilon"].as_i64().unwrap_or(0) as i8;
        let predicted = predict_top_piece(r.d, eps, r.d).ok();
        let brute = harmonic_coinvariant_dim(r.d, r.d, eps).ok();
        let top = r.json["dims"]["top"].as_u64();
        if predicted.is_none() || predicted != brute || predicted != top {
            bad.push(format!("three-way at d={}: {predicted:?} {brute:?} {top:?}", r.d));
        }
        three.push(format!("{}", predicted.unwrap_or(0)));
    }
    Line {
        criterion: 6,
        pass: bad.is_empty(),
        known: false,
        detail: format!("top pieces {} at d=2,3,4; mismatches {bad:?}", three.join("/")),
    }
}

fn random_tensor(rng: &mut ChaCha8Rng, g: usize, d: usize, terms: usize) -> TensorVector {
    let mut t = TensorVector::zero(g, d);
    for _ in 0..terms {
        let w = (0..d).map(|_| rng.gen_range(0..2 * g) as u8).collect();
        let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        t.add_term(w, Q::int(c));
    }
    t
}

fn random_lie(rng: &mut ChaCha8Rng, g: usize, k: usize) -> LiePoly {
    let words = lyndon_words(2 * g, k);
    let mut p = LiePoly::zero(g, k);
    for _ in 0..3 {
        let w = words.choose(rng).expect("nonempty basis").clone();
        p = p.plus(&LiePoly::lyndon(g, w).expect("lyndon").scale(&Q::int(rng.gen_range(-2..=2))));
    }
    p
}

fn random_tree(rng: &mut ChaCha8Rng, space: SymplecticSpace, d: usize) -> TreeElement {
    let tris = basis_tripods(space);
    let mut x = TreeElement::zero(space.g(), d);
    for _ in 0..2 {
        let f: Vec<_> = (0..d)
            .map(|_| {
                let &(a, b, c) = tris.choose(rng).expect("g >= 2");
                tripod(space, a, b, c)
            })
            .collect();
        x = x.plus(&br(&f).expect("tripod factors").scale(&Q::int(rng.gen_range(1..=3))));
    }
    x
}

fn mobius(n: usize) -> i64 {
    let (mut m, mut r, mut p) = (n, 1, 2);
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if m > 1 {
        r = -r;
    }
    r
}

fn witt_oracle(n: usize, k: usize) -> u64 {
    let s: i64 = (1..=k).filter(|e| k % e == 0).map(|e| mobius(k / e) * (n as i64).pow(e as u32)).sum();
    (s / k as i64) as u64
}

fn criterion7() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();

    for g in 1..=3 {
        for d in 0..=4 {
            let v = random_tensor(&mut rng, g, d, 6);
            for i in 1..=d + 2 {
                for j in i + 1..=d + 2 {
                    let back = v.insert_omega(i, j).and_then(|w| w.contract(i, j)).expect("positions in range");
                    if back != v.scale(&Q::int(2 * g as i64)) {
                        bad.push(format!("c o iota at g={g} d={d} ({i},{j})"));
                    }
                }
            }
        }
    }

    let pi = Projector::new();
    let blocks = Projector::by_blocks();
    for g in 1..=3 {
        for d in 1..=4 {
            for _ in 0..4 {
                let v = random_tensor(&mut rng, g, d, 6);
                let p = pi.project(&v).expect("projection");
                let mut perm: Vec<usize> = (0..d).collect();
                perm.shuffle(&mut rng);
                let equivariant = pi.project(&v.permute_positions(&perm).unwrap()).unwrap() == p.permute_positions(&perm).unwrap();
                let ok = is_harmonic(&p)
                    && pi.project(&p).unwrap() == p
                    && blocks.project(&v).unwrap() == p
                    && equivariant;
                if !ok {
                    bad.push(format!("pi at g={g} d={d}"));
                }
            }
            for mu in dominant_weights(g, d) {
                for h in harmonic_block(g, d, &mu).vectors().into_iter().take(3) {
                    if pi.project(&h).unwrap() != h {
                        bad.push(format!("pi fixes V<d> at g={g} d={d} mu={mu:?}"));
                    }
                }
            }
        }
    }

    for g in 1..=2 {
        let n = 2 * g;
        let space = SymplecticSpace::new(g).unwrap();
        for k in 1..=6 {
            let words = lyndon_words(n, k);
            let index = WordIndex::new(space.all_words(k));
            let mut e = Echelon::new();
            for w in &words {
                e.insert(&index.vector(&lyndon_tensor(w)).unwrap());
            }
            let w = witt_oracle(n, k);
            if witt_dim(n, k) != w || words.len() as u64 != w || e.rank() as u64 != w || lie_dim(space, k) != w {
                bad.push(format!("witt n={n} k={k}"));
            }
        }
        for _ in 0..20 {
            let ks: Vec<usize> = loop {
                let ks: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=4)).collect();
                if ks.iter().sum::<usize>() <= 6 {
                    break ks;
                }
            };
            let (x, y, z) = (random_lie(&mut rng, g, ks[0]), random_lie(&mut rng, g, ks[1]), random_lie(&mut rng, g, ks[2]));
            let jac = x.bracket(&y.bracket(&z)).plus(&y.bracket(&z.bracket(&x))).plus(&z.bracket(&x.bracket(&y)));
            let embeds = x.bracket(&y).embed_tensor() == x.embed_tensor().commutator(&y.embed_tensor());
            if !jac.is_zero() || !embeds {
                bad.push(format!("jacobi g={g} degrees {ks:?}"));
            }
        }
    }

    for g in 2..=3 {
        let space = SymplecticSpace::new(g).unwrap();
        for d in 1..=4 {
            for _ in 0..5 {
                let x = random_tree(&mut rng, space, d);
                if !x.in_t() || !bracket_map(&x).is_zero() {
                    bad.push(format!("br closure g={g} d={d}"));
                }
            }
        }
    }

    let space = SymplecticSpace::new(2).unwrap();
    let mut omega = TensorVector::zero(2, 2);
    for i in 1..=2 {
        omega.add_term(vec![letter_a(i), letter_b(i)], Q::ONE);
        omega.add_term(vec![letter_b(i), letter_a(i)], -Q::ONE);
    }
    let mut roundtrips = 0;
    for _ in 0..100 {
        let d = rng.gen_range(1..=3);
        let x = random_tree(&mut rng, space, d);
        let der = Derivation::from_tree(&x);
        let in_lie = (0..4u8).all(|y| LiePoly::from_tensor(der.image(y)).is_ok());
        if der.to_tree() == x && in_lie && der.apply(&omega).is_zero() {
            roundtrips += 1;
        }
    }
    if roundtrips != 100 {
        bad.push(format!("derivation roundtrip {roundtrips}/100"));
    }

    Line { criterion: 7, pass: bad.is_empty(), known: false, detail: format!("failures {bad:?}") }
}

fn criterion8(runs: &[Run]) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    let theorem_holds = |d: usize, s: Signs| {
        let r = verify_theorem(d, d, s).expect("theorem runs");
        r.well_defined && r.surjective && r.dim_top as u64 == harmonic_coinvariant_dim(d, d, s.epsilon).unwrap()
    };
    let (code, _) = cokernel(&["figures", "--edge-sign", "1"]);
    let figures_flipped = code == 0;
    for r in runs {
        let d = r.d;
        let cal = default_signs(d);
        let flip_eps = Signs { sigma: cal.sigma, epsilon: -cal.epsilon };
        let eps_caught = !theorem_holds(d, flip_eps);

        let flip_sigma = Signs { sigma: -cal.sigma, epsilon: cal.epsilon };
        let diagram_flipped = r.json["calibration"]["diagrams"]
            .as_array()
            .and_then(|ds| ds.iter().find(|x| x["sigma"] == flip_sigma.sigma))
            .map(|x| x["left_failures"].as_u64().unwrap_or(0) + x["right_failures"].as_u64().unwrap_or(0) == 0);
        let diagram_flipped = match diagram_flipped {
            Some(ok) => ok,
            None => verify_diagram(d, d, 100, 0, flip_sigma.sigma).unwrap().pass(),
        };
        let sigma_caught = !theorem_holds(d, flip_sigma) || !diagram_flipped || !figures_flipped;
        pass &= eps_caught && sigma_caught;
        parts.push(format!("d={d} flipped eps caught {eps_caught}, flipped sigma caught {sigma_caught}"));
    }
    let (code, _) = cokernel(&["verify", "--d", "2", "--g", "2", "--reflection-sign", "1"]);
    pass &= code == 1;
    parts.push(format!("verify with anti-calibrated reflection sign exits {code}"));
    Line { criterion: 8, pass, known: false, detail: parts.join("; ") }
}

fn main() -> ExitCode {
    let runs = verify_runs();
    let mut lines = vec![criterion1(&runs), criterion2(&runs), criterion3(&runs), criterion4(), criterion5()];
    lines.push(criterion6(&runs));
    lines.push(criterion7());
    lines.push(criterion8(&runs));
    let mut unexpected = 0;
    for l in &lines {
        println!("criterion {}: {}  {}", l.criterion, if l.pass { "PASS" } else { "FAIL" }, l.detail);
        if !l.pass && !l.known {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
