//! Properties of the interval above `M` on random small posets.

use clonelab::interval::{
    binary_part, binary_polymorphism_sums, build_interval_map, classify_clone, forcing_closure, BinarySum,
    IntervalClone, SumShape,
};
use clonelab::linmodel::Field;
use clonelab::monoid::{ClassKind, MonoidInstance};
use clonelab::poset::{build_sperner, order_ideals, OrderIdeal, Poset, SpernerSpec};
use clonelab::report::Policy;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn poset_strategy(max: usize) -> impl Strategy<Value = Poset> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .zip(bits)
                .filter_map(|(p, keep)| keep.then_some(p))
                .collect();
            Poset::from_relations((0..n).map(|i| format!("x{i}")).collect(), &pairs).unwrap()
        })
    })
}

/// One ground vector per poset element.
fn instance(poset: Poset) -> MonoidInstance {
    let family = build_sperner(&[], &poset, &SpernerSpec::Disjoint { m: 1 }).unwrap();
    MonoidInstance::new(Field::new(5).unwrap(), poset, family).unwrap()
}

fn shape_strategy(n: usize) -> impl Strategy<Value = Vec<SumShape>> {
    let shape = prop_oneof![
        Just(SumShape::EssentiallyUnary),
        any::<bool>().prop_map(|swapped| SumShape::V { swapped }),
        (0..n, any::<bool>()).prop_map(|(p, swapped)| SumShape::D { p, swapped }),
    ];
    proptest::collection::vec(shape, 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forcing_closure_is_monotone_and_idempotent(
        (poset, xs, ys) in poset_strategy(5).prop_flat_map(|p| {
            let n = p.len();
            (Just(p), shape_strategy(n), shape_strategy(n))
        })
    ) {
        let s = forcing_closure(&poset, &xs);
        prop_assert!(s.ideal.is_downward_closed(&poset));
        let both: Vec<SumShape> = xs.iter().chain(&ys).copied().collect();
        let t = forcing_closure(&poset, &both);
        prop_assert!(s.ideal.is_subset(t.ideal));
        prop_assert!(!s.has_v || t.has_v);

        // feeding the closure back in adds nothing
        let mut again: Vec<SumShape> = s.ideal.elements().map(|p| SumShape::D { p, swapped: false }).collect();
        if s.has_v {
            again.push(SumShape::V { swapped: false });
        }
        prop_assert_eq!(forcing_closure(&poset, &again), s);
    }

    #[test]
    fn interval_map_is_one_plus_ideals(poset in poset_strategy(4)) {
        let inst = instance(poset.clone());
        let map = build_interval_map(&inst).unwrap();
        prop_assert!(map.report.passed(), "{}", map.report.to_json());
        let lattice = order_ideals(&poset).unwrap();
        prop_assert_eq!(map.len(), lattice.len() + 1);
        let expected = lattice.as_poset().with_bottom("bottom").unwrap();
        prop_assert!(map.as_poset().unwrap().find_isomorphism(&expected).is_some());
    }

    #[test]
    fn ideal_to_clone_is_an_order_embedding(poset in poset_strategy(4)) {
        let inst = instance(poset.clone());
        let lattice = order_ideals(&poset).unwrap();
        let parts: Vec<_> = lattice
            .ideals()
            .iter()
            .map(|&i| binary_part(&inst, IntervalClone::CI(i)).unwrap())
            .collect();
        for (x, px) in lattice.ideals().iter().zip(&parts) {
            // round trip through the generated clone
            let gens: Vec<BinarySum> = px.binary.iter().cloned().collect();
            prop_assert_eq!(classify_clone(&inst, &gens).unwrap(), IntervalClone::CI(*x));
            for (y, py) in lattice.ideals().iter().zip(&parts) {
                prop_assert_eq!(x.is_subset(*y), px.binary.is_subset(&py.binary));
                prop_assert_eq!(x == y, px.binary == py.binary);
            }
        }
    }
}

#[test]
fn polymorphism_sums_of_m1_are_v_or_d() {
    let inst = clonelab::config::parse_instance(
        "ground = \"d1 d2 d3\"\nposet = \"p r\"\nfamily = \"\"\"\np: d1 d2\nr: d2 d3\n\"\"\"\n",
    )
    .unwrap()
    .instance;
    let sweep = binary_polymorphism_sums(&inst, Policy::Sampled { count: 300, seed: 11 }).unwrap();
    assert!(sweep.report.passed());
    for s in &sweep.survivors {
        assert!(
            matches!(
                s.shape(),
                SumShape::EssentiallyUnary | SumShape::V { .. } | SumShape::D { .. }
            ),
            "{}",
            s.describe()
        );
    }
    assert!(sweep.survivors.iter().any(|s| matches!(s.shape(), SumShape::V { .. })));
    assert!(sweep.survivors.iter().any(|s| matches!(s.shape(), SumShape::D { .. })));
}

#[test]
fn triple_sums_never_preserve_m() {
    let inst = clonelab::config::parse_instance(
        "ground = \"d1 d2 d3\"\nposet = \"p r\"\nfamily = \"\"\"\np: d1 d2\nr: d2 d3\n\"\"\"\n",
    )
    .unwrap()
    .instance;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n0 = inst.n_trivial();
    for _ in 0..2000 {
        let parts: Vec<_> = (0..3)
            .map(|_| inst.sample_member(ClassKind::NONZERO[rng.random_range(0..7)], &mut rng))
            .collect();
        // substituting n0 for every variable must already leave M
        let sum = &(&(&parts[0] * &n0) + &(&parts[1] * &n0)) + &(&parts[2] * &n0);
        assert!(!inst.contains(&sum), "{:?}", parts);
    }
}

#[test]
fn whole_ideal_lattice_of_antichain_three() {
    let inst = instance(Poset::antichain(3).unwrap());
    let map = build_interval_map(&inst).unwrap();
    assert_eq!(map.len(), 9);
    assert_eq!(
        map.clones
            .iter()
            .filter(|c| matches!(c, IntervalClone::CI(i) if *i == OrderIdeal(0b111)))
            .count(),
        1
    );
}
