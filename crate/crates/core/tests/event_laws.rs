use std::collections::BTreeSet;

use proptest::prelude::*;

use socprac_core::event::{
    choice, compose, interpret_event, negate, sync, STrace, StepUniverse, TraceSet, UniverseLimits,
};
use socprac_core::ids::{ActionId, AgentId, Group, StepId, WorldId};
use socprac_core::model::{Kind, ModelBuilder};
use socprac_core::checker::EvalOptions;
use socprac_core::syntax::{ActionExpr, Actor, EventExpr};
use socprac_testkit::reference::Reference;

fn universe(agents: usize, actions: usize) -> StepUniverse {
    StepUniverse::exhaustive(agents, actions, UniverseLimits::default()).unwrap()
}

fn atomic(g: u32, a: u16) -> EventExpr {
    EventExpr::group(Group(g), ActionExpr::Atom(ActionId(a)))
}

/// Universe shape and an atomic event `G:b` over it.
fn shape_and_atoms() -> impl Strategy<Value = (usize, usize, EventExpr, EventExpr)> {
    (1usize..=3, 1usize..=2).prop_flat_map(|(n, m)| {
        let ev = (1u32..(1 << n), 0u16..m as u16).prop_map(|(g, a)| atomic(g, a));
        (Just(n), Just(m), ev.clone(), ev)
    })
}

/// A small set of traces of length 1 to 3 over a universe of `size` steps.
fn trace_set(size: u32) -> impl Strategy<Value = TraceSet> {
    prop::collection::vec(prop::collection::vec(0..size, 1..=3), 0..6)
        .prop_map(|ts| ts.into_iter().map(|t| STrace::new(t.into_iter().map(StepId).collect()).unwrap()).collect())
}

fn sets(t: &TraceSet) -> BTreeSet<Vec<StepId>> {
    t.iter().map(|s| s.to_vec()).collect()
}

fn is_prefix(a: &[StepId], b: &[StepId]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn choice_absorbs_sequential_extension((n, m, a, b) in shape_and_atoms()) {
        let u = universe(n, m);
        let lhs = interpret_event(&EventExpr::choice(a.clone(), EventExpr::seq(a.clone(), b)), &u).unwrap();
        prop_assert_eq!(lhs, interpret_event(&a, &u).unwrap());
    }

    #[test]
    fn compose_is_associative(x in trace_set(18), y in trace_set(18), z in trace_set(18)) {
        prop_assert_eq!(compose(&compose(&x, &y), &z), compose(&x, &compose(&y, &z)));
    }

    #[test]
    fn choice_is_commutative_and_idempotent(x in trace_set(6), y in trace_set(6)) {
        prop_assert_eq!(choice(&x, &y), choice(&y, &x));
        prop_assert_eq!(choice(&x, &x), x);
    }

    #[test]
    fn compose_is_pairwise_concatenation(x in trace_set(4), y in trace_set(4)) {
        let mut want = BTreeSet::new();
        for a in sets(&x) {
            for b in sets(&y) {
                let mut ab = a.clone();
                ab.extend(b);
                want.insert(ab);
            }
        }
        let got = compose(&x, &y);
        prop_assert_eq!(sets(&got), want);
        if !x.is_empty() && !y.is_empty() {
            prop_assert_eq!(got.dur(), x.dur() + y.dur());
        }
    }

    #[test]
    fn sync_keeps_the_longer_of_prefix_pairs(x in trace_set(3), y in trace_set(3)) {
        let mut want = BTreeSet::new();
        for a in sets(&x) {
            for b in sets(&y) {
                if is_prefix(&b, &a) {
                    want.insert(a.clone());
                }
                if is_prefix(&a, &b) {
                    want.insert(b.clone());
                }
            }
        }
        prop_assert_eq!(sets(&sync(&x, &y)), want);
    }

    #[test]
    fn choice_of_prefix_free_sets_is_union(x in trace_set(8), y in trace_set(8)) {
        let related = sets(&x).iter().any(|a| sets(&y).iter().any(|b| a != b && (is_prefix(a, b) || is_prefix(b, a))));
        prop_assume!(!related);
        prop_assert_eq!(choice(&x, &y), x.union(&y));
    }
}

#[test]
fn double_negation_restores_single_steps() {
    let u = universe(2, 1);
    for s in u.ids() {
        let t = TraceSet::singleton(STrace::single(s));
        assert_eq!(negate(&negate(&t, &u), &u), t, "step {s:?}");
    }
}

#[test]
fn negating_nothing_gives_every_step() {
    let u = universe(2, 2);
    assert_eq!(negate(&TraceSet::empty(), &u), TraceSet::of_steps(u.ids()));
}

/// Events over up to two agents and two actions, two steps long at most.
fn small_event(n: usize, m: usize) -> impl Strategy<Value = EventExpr> {
    let groups = 1u32..(1 << n);
    let acts = 0u16..m as u16;
    let action_leaf = prop_oneof![
        acts.clone().prop_map(|a| ActionExpr::Atom(ActionId(a))),
        Just(ActionExpr::Skip),
        acts.prop_map(|a| ActionExpr::neg(ActionExpr::Atom(ActionId(a)))),
    ];
    let action = action_leaf.clone().prop_recursive(2, 6, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ActionExpr::par(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ActionExpr::choice(a, b)),
            inner.prop_map(ActionExpr::neg),
        ]
    });
    let leaf = prop_oneof![
        (groups.clone(), action.clone()).prop_map(|(g, a)| EventExpr::group(Group(g), a)),
        Just(EventExpr::Skip),
    ];
    leaf.prop_recursive(2, 8, 2, move |inner| {
        prop_oneof![
            (groups.clone(), action_leaf.clone(), action_leaf.clone())
                .prop_map(|(g, a, b)| EventExpr::group(Group(g), ActionExpr::seq(a, b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| EventExpr::choice(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| EventExpr::par(a, b)),
            inner.clone().prop_map(EventExpr::neg),
            (groups.clone(), action_leaf.clone()).prop_map(|(g, a)| EventExpr::group(Group(g), a)),
        ]
    })
}

fn shape_and_event() -> impl Strategy<Value = (usize, usize, EventExpr)> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(n, m)| (Just(n), Just(m), small_event(n, m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// A one-world model looping on every step of the universe denotes, by
    /// definition, the same traces as the universe (complement excluding
    /// the idle step on both sides).
    #[test]
    fn universe_semantics_match_definitions((n, m, e) in shape_and_event()) {
        let full = universe(n, m);
        let non_idle: Vec<StepId> = full.ids().filter(|&s| s != full.skip()).collect();
        let u = full.clone().with_negation_domain(non_idle);
        let mut b = ModelBuilder::new();
        for i in 0..n {
            b.agent(&format!("a{i}")).unwrap();
        }
        for i in 0..m {
            b.action(&format!("b{i}"), Kind::Physical).unwrap();
        }
        let w = b.world("w").unwrap();
        for s in u.ids().filter(|&s| s != u.skip()) {
            b.transition(w, u.step(s).sparse(), w);
        }
        let model = b.build().unwrap();
        let reference = Reference::new(&model, EvalOptions { bound: 1, trace_bound: 8, ..EvalOptions::default() });
        let want: BTreeSet<Vec<StepId>> = reference
            .den(&e, WorldId(0))
            .into_iter()
            .map(|t| t.iter().map(|&s| u.id_of(model.step(s)).unwrap()).collect())
            .collect();
        prop_assert_eq!(sets(&interpret_event(&e, &u).unwrap()), want);
    }
}

#[test]
fn split_coalitions_differ_from_joint_performance() {
    let u = universe(3, 2);
    let (drive, sit) = (ActionId(0), ActionId(1));
    let fred = Group::singleton(AgentId(0));
    let others = Group::from_agents([AgentId(1), AgentId(2)]);
    let split = EventExpr::par(
        EventExpr::Do(Actor::Group(fred), ActionExpr::Atom(drive)),
        EventExpr::Do(Actor::Group(others), ActionExpr::Atom(sit)),
    );
    let joint = EventExpr::group(Group::all(3), ActionExpr::par(ActionExpr::Atom(drive), ActionExpr::Atom(sit)));
    let a = interpret_event(&split, &u).unwrap();
    let b = interpret_event(&joint, &u).unwrap();
    assert_ne!(a, b);
    assert!(sets(&a).is_subset(&sets(&b)));
}
