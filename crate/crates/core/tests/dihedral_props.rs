use cokernel_core::dihedral::{
    burnside_dim, coinvariant_dim_linear, coinvariant_space, harmonic_coinvariant_dim, invariant_dim, DihedralClass,
    DihedralGroup, TargetBlock,
};
use cokernel_core::rep::{
    character_table, check_orthogonality, dihedral_multiplicities, factorial, gl_dim, predict_top_piece, Partition,
};
use cokernel_core::symplectic::{dominant_weights, words_of_weight};
use cokernel_core::Q;
use num_bigint::BigInt;
use proptest::prelude::*;

fn word() -> impl Strategy<Value = (usize, i8, Vec<u8>)> {
    (1usize..=6, prop::sample::select(vec![1i8, -1]), 1u8..=3)
        .prop_flat_map(|(d, eps, n)| (Just(d), Just(eps), prop::collection::vec(0..n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_is_a_class_function((d, eps, w) in word()) {
        let gp = DihedralGroup::new(d, eps).unwrap();
        let base = gp.canonical(&w).unwrap();
        for e in gp.elements() {
            let (v, s) = gp.act(e, &w).unwrap();
            match (&base, gp.canonical(&v).unwrap()) {
                (DihedralClass::Zero, DihedralClass::Zero) => {}
                (DihedralClass::Class { word: a, sign: sa }, DihedralClass::Class { word: b, sign: sb }) => {
                    prop_assert_eq!(a, &b);
                    prop_assert_eq!(*sa, s * sb);
                }
                (x, y) => prop_assert!(false, "{:?} vs {:?}", x, y),
            }
        }
    }
}

#[test]
fn three_dimension_routes_agree() {
    for n in 1..=3 {
        for d in 1..=5 {
            for eps in [1i8, -1] {
                let orbits = coinvariant_space(n, d, eps).unwrap().dim;
                assert_eq!(coinvariant_dim_linear(n, d, eps).unwrap(), orbits);
                assert_eq!(invariant_dim(n, d, eps).unwrap(), orbits);
                assert_eq!(burnside_dim(n, d, eps).unwrap(), Q::int(orbits as i64));
            }
        }
    }
}

#[test]
fn target_is_independent_of_word_order() {
    for (g, d, eps) in [(2, 2, -1i8), (2, 3, 1), (3, 3, 1), (2, 4, -1)] {
        for mu in dominant_weights(g, d) {
            let a = TargetBlock::build(g, d, eps, &mu).unwrap();
            let mut words = words_of_weight(g, d, &mu);
            words.reverse();
            let b = TargetBlock::build_with_order(g, d, eps, &mu, words).unwrap();
            assert_eq!(a.dim(), b.dim(), "g={g} d={d} mu={mu:?}");
        }
    }
}

#[test]
fn character_tables() {
    for d in 1..=7 {
        assert!(check_orthogonality(d), "d={d}");
        let parts = Partition::all(d);
        let id = parts.iter().position(|p| p.parts().iter().all(|&x| x == 1)).unwrap();
        let squares: BigInt = character_table(d).iter().map(|row| BigInt::from(row[id] * row[id])).sum();
        assert_eq!(squares, factorial(d));
    }
}

#[test]
fn gl_decomposition_matches_burnside() {
    for n in 1..=6 {
        for d in 1..=6 {
            for eps in [1i8, -1] {
                let sum: u64 = dihedral_multiplicities(d, eps).unwrap().iter().map(|(l, m)| m * gl_dim(l, n)).sum();
                assert_eq!(burnside_dim(n, d, eps).unwrap(), Q::int(sum as i64), "n={n} d={d} eps={eps}");
            }
        }
    }
}

#[test]
fn predicted_top_piece_matches_brute_force() {
    for (d, g, eps) in [(2, 2, -1i8), (2, 3, -1), (3, 3, 1), (3, 4, 1), (4, 4, -1)] {
        assert_eq!(predict_top_piece(d, eps, g).unwrap(), harmonic_coinvariant_dim(g, d, eps).unwrap(), "d={d} g={g}");
    }
}
