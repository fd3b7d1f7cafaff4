mod common;

use std::collections::BTreeSet;

use common::{random_program, Oracle};
use proptest::prelude::*;
use pvspace::positions::{
    complement_generators, enumerate_positions, is_finitely_lower_complemented, is_valid_position,
    pos_join, pos_leq, pos_meet, successors, Position,
};
use pvspace::syntax::Program;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BOUND: u64 = 3;
const LIMIT: usize = 220;

/// At least `count` random programs (loops allowed) whose truncated position
/// sets stay below `LIMIT`, each with its oracle.
fn corpus(seed: u64, count: usize) -> Vec<Oracle> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let prog = random_program(&mut rng, true);
        if let Some(o) = Oracle::new(&prog, BOUND, LIMIT) {
            out.push(o);
        }
    }
    out
}

fn pairs(o: &Oracle, rng: &mut StdRng) -> Vec<(usize, usize)> {
    let n = o.len();
    if n <= 60 {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    } else {
        (0..2000)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect()
    }
}

#[test]
fn every_valid_position_is_reachable() {
    for o in corpus(1, 500) {
        let reached: BTreeSet<_> = o.points.iter().cloned().collect();
        let listed: BTreeSet<_> = enumerate_positions(&o.prog, Some(BOUND))
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(reached, listed, "program {}", o.prog);
        assert!(listed.iter().all(|p| is_valid_position(&o.prog, p)));
    }
}

#[test]
fn order_is_reachability() {
    let mut rng = StdRng::seed_from_u64(2);
    for o in corpus(2, 500) {
        for (i, j) in pairs(&o, &mut rng) {
            let (p, q) = (&o.points[i], &o.points[j]);
            assert_eq!(
                pos_leq(&o.prog, p, q).unwrap(),
                o.leq(i, j),
                "{p} ≤ {q} in {}",
                o.prog
            );
        }
    }
}

#[test]
fn join_and_meet_are_least_and_greatest_bounds() {
    let mut rng = StdRng::seed_from_u64(3);
    for o in corpus(3, 500) {
        for (i, j) in pairs(&o, &mut rng) {
            let (p, q) = (&o.points[i], &o.points[j]);
            let lub = o.lub(i, j).expect("bounded lattice");
            let glb = o.glb(i, j).expect("bounded lattice");
            assert_eq!(
                pos_join(&o.prog, p, q).unwrap(),
                o.points[lub],
                "{p} ∨ {q} in {}",
                o.prog
            );
            assert_eq!(
                pos_meet(&o.prog, p, q).unwrap(),
                o.points[glb],
                "{p} ∧ {q} in {}",
                o.prog
            );
        }
    }
}

#[test]
fn complement_generators_match_extremal_elements() {
    let mut flc_seen = [0usize; 2];
    for o in corpus(4, 500) {
        for (i, p) in o.points.iter().enumerate() {
            // generators of p live at loop indices ≤ index(p) + 1
            if o.on_boundary(p) {
                continue;
            }
            let (lower, upper) = complement_generators(&o.prog, p).unwrap();
            let upper: BTreeSet<_> = upper.into_iter().collect();
            assert_eq!(
                upper,
                o.min_not_below(i),
                "upper generators of {p} in {}",
                o.prog
            );

            let maxima = o.max_not_above(i);
            let finite = !maxima.iter().any(|x| o.on_boundary(x));
            let flc = is_finitely_lower_complemented(&o.prog, p).unwrap();
            assert_eq!(flc, finite, "finite lower complement of {p} in {}", o.prog);
            flc_seen[usize::from(flc)] += 1;
            if flc {
                let lower: BTreeSet<_> = lower.into_iter().collect();
                assert_eq!(lower, maxima, "lower generators of {p} in {}", o.prog);
            }
        }
    }
    assert!(flc_seen[0] > 0 && flc_seen[1] > 0);
}

#[test]
fn steps_preserve_validity() {
    for o in corpus(5, 500) {
        for p in &o.points {
            let succ = successors(&o.prog, p).unwrap();
            assert!(succ.iter().all(|q| is_valid_position(&o.prog, q)));
            assert_eq!(succ.is_empty(), p.is_top(), "{p} in {}", o.prog);
        }
    }
}

fn arb_program() -> impl Strategy<Value = Program> {
    let leaf = prop_oneof![
        Just(Program::action("A")),
        Just(Program::action("B")),
        Just(Program::lock("a")),
        Just(Program::unlock("a")),
    ];
    leaf.prop_recursive(3, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Program::seq(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Program::choice(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Program::par(l, r)),
            inner.prop_map(Program::looped),
        ]
    })
}

/// A program with three of its positions (loop indices ≤ 2).
fn arb_triple() -> impl Strategy<Value = (Program, Position, Position, Position)> {
    arb_program().prop_flat_map(|prog| {
        let points = enumerate_positions(&prog, Some(2)).unwrap();
        let n = points.len();
        (Just(prog), 0..n, 0..n, 0..n).prop_map(move |(prog, i, j, k)| {
            (
                prog,
                points[i].clone(),
                points[j].clone(),
                points[k].clone(),
            )
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn partial_order_laws((prog, p, q, r) in arb_triple()) {
        let le = |a: &Position, b: &Position| pos_leq(&prog, a, b).unwrap();
        prop_assert!(le(&p, &p));
        prop_assert!(le(&Position::Bot, &p) && le(&p, &Position::Top));
        if le(&p, &q) && le(&q, &p) {
            prop_assert_eq!(&p, &q);
        }
        if le(&p, &q) && le(&q, &r) {
            prop_assert!(le(&p, &r));
        }
    }

    #[test]
    fn lattice_laws((prog, p, q, r) in arb_triple()) {
        let join = |a: &Position, b: &Position| pos_join(&prog, a, b).unwrap();
        let meet = |a: &Position, b: &Position| pos_meet(&prog, a, b).unwrap();
        prop_assert_eq!(join(&p, &q), join(&q, &p));
        prop_assert_eq!(meet(&p, &q), meet(&q, &p));
        prop_assert_eq!(join(&p, &join(&q, &r)), join(&join(&p, &q), &r));
        prop_assert_eq!(meet(&p, &meet(&q, &r)), meet(&meet(&p, &q), &r));
        prop_assert_eq!(join(&p, &meet(&p, &q)), p.clone());
        prop_assert_eq!(meet(&p, &join(&p, &q)), p.clone());
        prop_assert_eq!(join(&p, &Position::Bot), p.clone());
        prop_assert_eq!(meet(&p, &Position::Top), p.clone());
        prop_assert_eq!(join(&p, &q) == q, pos_leq(&prog, &p, &q).unwrap());
    }

    #[test]
    fn generators_are_antichains((prog, p, _q, _r) in arb_triple()) {
        let (lower, upper) = complement_generators(&prog, &p).unwrap();
        for gens in [&lower, &upper] {
            for a in gens.iter() {
                for b in gens.iter() {
                    if a != b {
                        prop_assert!(!pos_leq(&prog, a, b).unwrap());
                    }
                }
            }
        }
        for x in &lower {
            prop_assert!(!pos_leq(&prog, &p, x).unwrap());
        }
        for x in &upper {
            prop_assert!(!pos_leq(&prog, x, &p).unwrap());
        }
    }
}
