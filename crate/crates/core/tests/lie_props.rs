use cokernel_core::lie::{
    basis_tripods, br, bracket_map, lie_normal_form, lyndon_tensor, lyndon_words, tripod, witt_dim, BracketExpr,
    Derivation, LiePoly, TreeElement,
};
use cokernel_core::linalg::Echelon;
use cokernel_core::symplectic::{omega, SymplecticSpace, WordIndex};
use cokernel_core::Q;
use proptest::prelude::*;

const G: usize = 2;

fn expr(max_leaves: u32) -> impl Strategy<Value = BracketExpr> {
    let leaf = (0..(2 * G) as u8).prop_map(BracketExpr::leaf);
    leaf.prop_recursive(2, max_leaves, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| BracketExpr::br(a, b)))
}

fn nf(e: &BracketExpr) -> LiePoly {
    lie_normal_form(SymplecticSpace::new(G).unwrap(), e).unwrap()
}

fn lie(k: usize) -> impl Strategy<Value = LiePoly> {
    let words = lyndon_words(2 * G, k);
    prop::collection::vec((0..words.len(), -2i64..=2), 1..4).prop_map(move |picks| {
        let mut p = LiePoly::zero(G, k);
        for (i, c) in picks {
            p = p.plus(&LiePoly::lyndon(G, words[i].clone()).unwrap().scale(&Q::int(c)));
        }
        p
    })
}

fn tree(d: usize) -> impl Strategy<Value = TreeElement> {
    let space = SymplecticSpace::new(G).unwrap();
    let tris = basis_tripods(space);
    prop::collection::vec((prop::collection::vec(0..tris.len(), d), 1i64..=3), 1..3).prop_map(move |terms| {
        let mut x = TreeElement::zero(G, d);
        for (idx, c) in terms {
            let f: Vec<_> = idx.iter().map(|&i| tripod(space, tris[i].0, tris[i].1, tris[i].2)).collect();
            x = x.plus(&br(&f).unwrap().scale(&Q::int(c)));
        }
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normal_form_respects_rewrites(x in expr(2), y in expr(2), z in expr(2), w in expr(1)) {
        let swap = BracketExpr::br(y.clone(), x.clone());
        prop_assert_eq!(nf(&BracketExpr::br(x.clone(), y.clone())), nf(&swap).scale(&-Q::ONE));

        let lhs = BracketExpr::br(x.clone(), BracketExpr::br(y.clone(), z.clone()));
        let rhs = BracketExpr::Sum(vec![
            (Q::ONE, BracketExpr::br(BracketExpr::br(x.clone(), y.clone()), z.clone())),
            (Q::ONE, BracketExpr::br(y.clone(), BracketExpr::br(x.clone(), z))),
        ]);
        prop_assert_eq!(nf(&lhs), nf(&rhs));

        let inner = BracketExpr::br(w.clone(), BracketExpr::br(x.clone(), y.clone()));
        prop_assert_eq!(nf(&inner), nf(&BracketExpr::br(w, swap)).scale(&-Q::ONE));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_intertwines_brackets((u, v) in (1usize..=3, 1usize..=3).prop_flat_map(|(a, b)| (lie(a), lie(b)))) {
        let lhs = u.bracket(&v).embed_tensor();
        let (eu, ev) = (u.embed_tensor(), v.embed_tensor());
        prop_assert_eq!(lhs, eu.concat(&ev).minus(&ev.concat(&eu)));
    }

    #[test]
    fn br_lands_in_t(x in (1usize..=3).prop_flat_map(tree)) {
        prop_assert!(x.in_t());
        prop_assert!(bracket_map(&x).is_zero());
    }

    #[test]
    fn derivation_of_a_pure_tensor(x in 0..(2 * G) as u8, u in (1usize..=3).prop_flat_map(lie)) {
        let d = u.degree() - 1;
        let t = TreeElement::from_pairs(G, d, &[(x, u.clone())]).unwrap();
        let der = Derivation::from_tree(&t);
        for y in 0..(2 * G) as u8 {
            let expected = u.embed_tensor().scale(&Q::int(omega(x, y)));
            prop_assert_eq!(der.image(y), &expected);
        }
    }

    #[test]
    fn derivation_roundtrip(x in (1usize..=3).prop_flat_map(tree)) {
        prop_assert_eq!(Derivation::from_tree(&x).to_tree(), x);
    }
}

#[test]
fn lyndon_span_has_witt_dimension() {
    for g in 1..=2 {
        let space = SymplecticSpace::new(g).unwrap();
        for k in 1..=6 {
            let index = WordIndex::new(space.all_words(k));
            let mut e = Echelon::new();
            let words = lyndon_words(2 * g, k);
            for w in &words {
                e.insert(&index.vector(&lyndon_tensor(w)).unwrap());
            }
            assert_eq!(e.rank() as u64, witt_dim(2 * g, k), "g={g} k={k}");
            assert_eq!(e.rank(), words.len());
        }
    }
}

