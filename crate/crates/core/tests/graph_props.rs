use cokernel_core::graph::{beta, beta_raw, phi, trace_disjoint, HairyGraph, Slot};
use cokernel_core::graph_space::{enumerate_space, shapes, SpaceParams};
use cokernel_core::lie::{tripod, TreeElement};
use cokernel_core::symplectic::SymplecticSpace;
use cokernel_core::Q;
use proptest::prelude::*;

fn labelled(shape: &HairyGraph, letters: &[u8]) -> HairyGraph {
    let labels: Vec<u8> = (0..shape.hairs()).map(|i| letters[i % letters.len()]).collect();
    shape.with_labels(&labels)
}

/// Exchanges slots `a` and `b`, rewiring edges that end at them.
fn transpose_slots(g: &HairyGraph, a: usize, b: usize) -> HairyGraph {
    let f = |x: usize| if x == a { b } else if x == b { a } else { x };
    let mut slots = g.slots().to_vec();
    for (p, s) in g.slots().iter().enumerate() {
        slots[f(p)] = match *s {
            Slot::Hair(l) => Slot::Hair(l),
            Slot::Solid(q) => Slot::Solid(f(q as usize) as u16),
            Slot::Dotted { peer, out } => Slot::Dotted { peer: f(peer as usize) as u16, out },
        };
    }
    HairyGraph::new(slots, g.comp().to_vec()).unwrap()
}

#[test]
fn beta_preserves_structure_on_all_shapes() {
    for d in 1..=4 {
        for k in 2..=3 {
            for rank in 0..=2 {
                for shape in shapes(k, d, rank, true) {
                    let g = labelled(&shape, &[0, 1, 2, 3]);
                    for (_, h) in beta_raw(&g, -1).unwrap() {
                        assert_eq!(h.num_solid(), g.num_solid() + 1);
                        assert_eq!(h.num_dotted() + 1, g.num_dotted());
                        assert_eq!(h.components() + 1, g.components());
                        assert_eq!(h.rank(), g.rank());
                        assert!(h.is_connected());
                    }
                }
            }
        }
    }
}

#[test]
fn beta_maps_relations_to_relations() {
    for (d, g) in [(2, 1), (2, 2), (3, 1), (4, 1)] {
        let params = |k| SpaceParams { k, d, g, ordered: true, harmonic: false, sigma: -1 };
        let two = enumerate_space(params(2)).unwrap();
        let one = enumerate_space(params(1)).unwrap();
        for r in two.relation_vectors().unwrap() {
            let image = beta(&two.sum(&r)).unwrap();
            assert!(one.in_relations(&one.vector(&image).unwrap()), "d={d} g={g}");
        }
    }
}

#[test]
fn tree_relations_vanish_in_tensors() {
    for (d, g) in [(1, 2), (2, 1), (2, 2), (3, 1)] {
        let space = enumerate_space(SpaceParams { k: 1, d, g, ordered: false, harmonic: false, sigma: -1 }).unwrap();
        for r in space.relation_vectors().unwrap() {
            let sum = space.sum(&r);
            let trees = sum.rank_part(0);
            if !trees.is_empty() {
                assert!(phi(&trees, g).unwrap().is_zero(), "d={d} g={g}");
            }
        }
    }
}

fn shape_and_labels() -> impl Strategy<Value = (HairyGraph, Vec<u8>)> {
    let all: Vec<HairyGraph> = (1..=3).flat_map(|d| (0..=1).flat_map(move |r| shapes(1, d, r, false))).collect();
    (prop::sample::select(all), prop::collection::vec(0u8..4, 1..8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_is_idempotent((shape, letters) in shape_and_labels()) {
        let g = labelled(&shape, &letters);
        let (c, s) = g.canonical(false, -1);
        if s != 0 {
            prop_assert_eq!(c.canonical(false, -1), (c.clone(), 1));
        }
    }

    #[test]
    fn slot_transposition_negates((shape, letters) in shape_and_labels(), unit in 0usize..8, i in 0usize..3, j in 0usize..3) {
        prop_assume!(i != j);
        let g = labelled(&shape, &letters);
        let u = unit % g.units();
        let h = transpose_slots(&g, 3 * u + i, 3 * u + j);
        let (c1, s1) = g.canonical(false, -1);
        let (c2, s2) = h.canonical(false, -1);
        prop_assert_eq!(s1, -s2);
        if s1 != 0 {
            prop_assert_eq!(c1, c2);
        }
    }

    #[test]
    fn trace_is_multilinear_and_alternating(
        a in prop::collection::vec(0u8..4, 3),
        b in prop::collection::vec(0u8..4, 3),
        c in prop::collection::vec(0u8..4, 3),
        k in -2i64..=2,
    ) {
        let space = SymplecticSpace::new(2).unwrap();
        let t = |v: &[u8]| tripod(space, v[0], v[1], v[2]);
        let trace = |f: &[TreeElement]| trace_disjoint(f, -1, 0).unwrap();
        let swapped = tripod(space, a[1], a[0], a[2]);
        let mut sum = trace(&[t(&a), t(&c)]);
        sum.add_sum(&Q::ONE, &trace(&[swapped, t(&c)]));
        prop_assert!(sum.is_zero());

        let mixed = t(&a).plus(&t(&b).scale(&Q::int(k)));
        let mut expected = trace(&[t(&a), t(&c)]);
        expected.add_sum(&Q::int(k), &trace(&[t(&b), t(&c)]));
        prop_assert!(trace(&[mixed, t(&c)]).minus(&expected).is_zero());
    }
}

