mod common;

use l0_simons::generate::{generate, Shape};
use l0_simons::instance::{
    attaining_selection, check_hypothesis, distinct_functions, enumerate_e, evaluate, sup_over_e,
    BaseFunction, Hypothesis, HypothesisMode, Instance, Selection, SelectionSet,
};
use l0_simons::l0::{ess_sup, in_ball, EventuallyPeriodicSeq, ProbSpace, Rv};
use l0_simons::minimax::{game_value, MixtureWeights, PayoffMatrix};
use l0_simons::rational::{int, q};
use l0_simons::{Error, Q};
use proptest::prelude::*;

fn shaped(atoms: usize, base: usize) -> Instance {
    generate(1, Shape::new(atoms, base, 0, 1)).unwrap()
}

#[test]
fn selection_counts() {
    assert_eq!(enumerate_e(&shaped(2, 3), 4096).unwrap().len(), 9);
    let one = enumerate_e(&shaped(1, 4), 4096).unwrap();
    assert_eq!(
        one.iter().map(|z| z.at(0)).collect::<Vec<_>>(),
        vec![0, 1, 2, 3]
    );
    let mut eight = enumerate_e(&shaped(3, 2), 4096).unwrap();
    assert_eq!(eight.len(), 8);
    eight.dedup();
    assert_eq!(eight.len(), 8);
    match enumerate_e(&shaped(4, 4), 100) {
        Err(Error::CapExceeded { count, .. }) => assert_eq!(count, 256),
        other => panic!("expected cap error, got {other:?}"),
    }
}

#[test]
fn evaluate_lookups() {
    let space = ProbSpace::uniform(3).unwrap();
    let c = Rv::from_fn(&space, |i| int(i as i64));
    let f = BaseFunction::constant(c.clone(), 4);
    for z in [Selection::new(vec![0, 1, 2]), Selection::new(vec![3, 3, 0])] {
        assert_eq!(evaluate(&f, &z).unwrap(), c);
    }
    assert!(evaluate(&f, &Selection::new(vec![0, 9, 0])).is_err());

    let inst = shaped(1, 3);
    let f = &inst.functions().cycle()[0];
    for b in 0..3 {
        assert_eq!(
            evaluate(f, &Selection::new(vec![b])).unwrap().at(0),
            f.at(b, 0)
        );
    }
}

#[test]
fn evaluation_reproduces_payoff_columns() {
    let inst = generate(5, Shape::new(3, 3, 1, 2)).unwrap();
    let df = distinct_functions(inst.functions());
    let columns = vec![(0..3).collect::<Vec<_>>(); 3];
    let matrices = df.payoff_matrices(&df.all_ids(), &columns).unwrap();
    for z in enumerate_e(&inst, 4096).unwrap() {
        for (row, &id) in df.all_ids().iter().enumerate() {
            let v = evaluate(&df.functions[id], &z).unwrap();
            for (atom, m) in matrices.iter().enumerate() {
                assert_eq!(v.at(atom), &m.entries[row][z.at(atom)]);
            }
        }
    }
}

#[test]
fn distinct_function_examples() {
    let space = ProbSpace::uniform(1).unwrap();
    let f = |v: i64| BaseFunction::constant(Rv::constant(&space, int(v)), 2);
    let df = distinct_functions(&EventuallyPeriodicSeq::new(vec![f(1)], vec![f(2), f(3)]).unwrap());
    assert_eq!(df.len(), 3);
    assert_eq!(df.tail, vec![false, true, true]);
    let df = distinct_functions(&EventuallyPeriodicSeq::new(vec![], vec![f(1), f(1)]).unwrap());
    assert_eq!((df.len(), df.tail.clone()), (1, vec![true]));
    let df = distinct_functions(&EventuallyPeriodicSeq::new(vec![f(1)], vec![f(1)]).unwrap());
    assert_eq!(df.len(), 1);
    assert_eq!(df.ids_from(1), vec![0]);
}

#[test]
fn ids_from_drops_the_preamble() {
    let space = ProbSpace::uniform(1).unwrap();
    let f = |v: i64| BaseFunction::constant(Rv::constant(&space, int(v)), 1);
    let df = distinct_functions(&EventuallyPeriodicSeq::new(vec![f(1), f(2)], vec![f(3)]).unwrap());
    assert_eq!(df.ids_from(1), vec![0, 1, 2]);
    assert_eq!(df.ids_from(2), vec![1, 2]);
    assert_eq!(df.ids_from(3), vec![2]);
    assert_eq!(df.ids_from(50), vec![2]);
}

#[test]
fn dominant_point_in_s_holds() {
    let space = ProbSpace::uniform(2).unwrap();
    let rv = |a: i64, b: i64| Rv::new(&space, vec![int(a), int(b)]).unwrap();
    let f1 = BaseFunction::new(vec![rv(1, 1), rv(0, -1), rv(1, 0)]).unwrap();
    let f2 = BaseFunction::new(vec![rv(2, 0), rv(-1, -1), rv(0, 0)]).unwrap();
    let inst = Instance::new(
        space.clone(),
        vec!["top".into(), "x".into(), "y".into()],
        EventuallyPeriodicSeq::new(vec![], vec![f1, f2]).unwrap(),
        Rv::constant(&space, int(2)),
        SelectionSet::Explicit(vec![Selection::new(vec![1, 2]), Selection::constant(0, 2)]),
    )
    .unwrap();
    let h = check_hypothesis(
        &inst,
        HypothesisMode::Sampled {
            samples: 200,
            seed: 3,
        },
    )
    .unwrap();
    assert_eq!(
        h,
        Hypothesis::HoldsOnSamples {
            samples: 200,
            seed: 3
        }
    );
}

#[test]
fn pennies_witness_by_enumeration() {
    let inst =
        l0_simons::format::parse_instance(&common::fixture("pennies_constant_a.json")).unwrap();
    let df = distinct_functions(inst.functions());
    let w = MixtureWeights::new(inst.space(), vec![0, 1], vec![vec![q(1, 4), q(3, 4)]]).unwrap();
    assert_eq!(sup_over_e(&inst, &df, &w).at(0), &q(3, 4));
    assert_eq!(
        df.eval_mixture(&w, &Selection::constant(0, 1)).at(0),
        &q(1, 4)
    );
    assert_eq!(
        df.eval_mixture(&w, &Selection::constant(1, 1)).at(0),
        &q(3, 4)
    );
    assert!(attaining_selection(&inst, &df, &w).is_none());
    let full = inst.with_selections(SelectionSet::All);
    assert_eq!(
        attaining_selection(&full, &df, &w),
        Some(Selection::constant(1, 1))
    );
}

fn small_instance() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 1usize..=3, 1usize..=3, 0usize..=2, 1usize..=3)
        .prop_map(|(seed, a, b, p, c)| generate(seed, Shape::new(a, b, p, c)).unwrap())
}

fn weights_for(inst: &Instance, raw: &[u8]) -> MixtureWeights {
    let df = distinct_functions(inst.functions());
    let ids = df.all_ids();
    let mut it = raw.iter().cycle();
    let weights = (0..inst.n_atoms())
        .map(|_| {
            let r: Vec<i64> = ids
                .iter()
                .map(|_| 1 + (*it.next().unwrap() % 7) as i64)
                .collect();
            let total: i64 = r.iter().sum();
            r.iter().map(|&x| q(x, total)).collect()
        })
        .collect();
    MixtureWeights::new(inst.space(), ids, weights).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sup_over_all_selections_is_attained(inst in small_instance(), raw in prop::collection::vec(any::<u8>(), 1..20)) {
        let df = distinct_functions(inst.functions());
        let w = weights_for(&inst, &raw);
        let sup = sup_over_e(&inst, &df, &w);
        let by_enumeration: Vec<Rv> = enumerate_e(&inst, 4096).unwrap().iter().map(|z| df.eval_mixture(&w, z)).collect();
        prop_assert_eq!(&ess_sup(&by_enumeration).unwrap(), &sup);
        let z = attaining_selection(&inst, &df, &w).unwrap();
        prop_assert_eq!(df.eval_mixture(&w, &z), sup);
    }

    #[test]
    fn evaluations_stay_in_the_ball(inst in small_instance()) {
        for z in enumerate_e(&inst, 4096).unwrap() {
            for f in inst.functions().items() {
                prop_assert!(in_ball(&evaluate(f, &z).unwrap(), inst.epsilon()).unwrap());
            }
        }
    }

    #[test]
    fn dedup_round_trips(inst in small_instance()) {
        let df = distinct_functions(inst.functions());
        prop_assert_eq!(&df.expand(), inst.functions());
        prop_assert!(df.len() <= inst.functions().items().count());
    }

    #[test]
    fn game_solution_matches_vertex_enumeration(entries in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..=4)) {
        let a: Vec<Vec<Q>> = entries.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        let sol = game_value(&PayoffMatrix::from_entries(a.clone()).unwrap());
        let (value, _) = common::vertex_game_value(&a);
        prop_assert_eq!(&sol.value, &value);
        let m = PayoffMatrix::from_entries(a).unwrap();
        prop_assert_eq!(m.max_over_columns(&sol.weights), value.clone());
        prop_assert_eq!(m.min_over_rows(&sol.column_strategy), value);
    }
}
