use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use socprac_core::checker::{EvalOptions, Evaluator};
use socprac_core::ids::WorldId;
use socprac_core::model::{validate_model, KripkeModel, Relation, Violation};
use socprac_core::syntax::Assertion;
use socprac_testkit::gen::{event, formula, random_model, FormulaShape, ModelShape, Vocabulary};

fn matrix(r: &Relation, n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|a| (0..n).map(|b| r.contains(WorldId(a as u32), WorldId(b as u32))).collect()).collect()
}

fn serial(m: &[Vec<bool>]) -> bool {
    m.iter().all(|row| row.iter().any(|&x| x))
}

fn symmetric(m: &[Vec<bool>]) -> bool {
    (0..m.len()).all(|a| (0..m.len()).all(|b| !m[a][b] || m[b][a]))
}

fn transitive(m: &[Vec<bool>]) -> bool {
    let n = m.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(m[a][b] && m[b][c]) || m[a][c])))
}

fn warshall(m: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let mut t = m.to_vec();
    let n = t.len();
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                if t[a][k] && t[k][b] {
                    t[a][b] = true;
                }
            }
        }
    }
    t
}

/// Which condition failed, without the witness.
fn key(v: &Violation) -> (u8, usize) {
    match v {
        Violation::BeliefNotSerial { agent, .. } => (0, agent.0 as usize),
        Violation::BeliefNotSymmetric { agent, .. } => (1, agent.0 as usize),
        Violation::BeliefNotTransitive { agent, .. } => (2, agent.0 as usize),
        Violation::GoalNotSerial { agent, .. } => (3, agent.0 as usize),
        Violation::GoalNotTransitive { agent, .. } => (4, agent.0 as usize),
        Violation::OrderCycle { .. } => (5, 0),
        Violation::OrderBeliefCoupling { agent, .. } => (6, agent.0 as usize),
        Violation::SkipNotIdentity { .. } => (7, 0),
        Violation::ContextNotConnected { context, .. } => (8, context.0 as usize),
        Violation::EnactmentOutsideContext { .. } => (9, 0),
        Violation::ValueOrderReflexive { value, .. } => (10, value.0 as usize),
        Violation::ValueOrderNotTransitive { value, .. } => (11, value.0 as usize),
    }
}

fn oracle(m: &KripkeModel) -> BTreeSet<(u8, usize)> {
    let n = m.world_count();
    let mut out = BTreeSet::new();
    let order = warshall(&matrix(m.order(), n));
    for a in m.agents() {
        let i = a.0 as usize;
        let b = matrix(m.belief(a), n);
        let g = matrix(m.goal(a), n);
        if !serial(&b) {
            out.insert((0, i));
        }
        if !symmetric(&b) {
            out.insert((1, i));
        }
        if !transitive(&b) {
            out.insert((2, i));
        }
        if !serial(&g) {
            out.insert((3, i));
        }
        if !transitive(&g) {
            out.insert((4, i));
        }
        let coupled = (0..n).all(|e| {
            (0..n).all(|l| !order[e][l] || (0..n).all(|v| b[v][e] == b[v][l]))
        });
        if !coupled {
            out.insert((6, i));
        }
    }
    if (0..n).any(|w| order[w][w]) {
        out.insert((5, 0));
    }
    for c in m.contexts() {
        let u: Vec<usize> = m.context(c).worlds.iter().map(|w| w.index()).collect();
        // undirected reachability inside u by repeated relaxation
        let mut reach = vec![false; n];
        if let Some(&first) = u.first() {
            reach[first] = true;
            loop {
                let mut grew = false;
                for &x in &u {
                    for &y in &u {
                        if reach[x] && !reach[y] && (order[x][y] || order[y][x]) {
                            reach[y] = true;
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
        }
        if u.iter().any(|&x| !reach[x]) {
            out.insert((8, c.0 as usize));
        }
    }
    out
}

fn checks_witness(m: &KripkeModel, v: &Violation) -> bool {
    match *v {
        Violation::BeliefNotSerial { agent, world } => m.belief(agent).successors(world).is_empty(),
        Violation::BeliefNotSymmetric { agent, from, to } => {
            m.belief(agent).contains(from, to) && !m.belief(agent).contains(to, from)
        }
        Violation::BeliefNotTransitive { agent, a, b, c } => {
            let r = m.belief(agent);
            r.contains(a, b) && r.contains(b, c) && !r.contains(a, c)
        }
        Violation::GoalNotSerial { agent, world } => m.goal(agent).successors(world).is_empty(),
        Violation::GoalNotTransitive { agent, a, b, c } => {
            let r = m.goal(agent);
            r.contains(a, b) && r.contains(b, c) && !r.contains(a, c)
        }
        Violation::OrderCycle { ref cycle } => {
            !cycle.is_empty()
                && (0..cycle.len()).all(|i| m.order().contains(cycle[i], cycle[(i + 1) % cycle.len()]))
        }
        Violation::OrderBeliefCoupling { agent, earlier, later, viewer } => {
            m.order_closure().contains(earlier, later)
                && m.belief(agent).contains(viewer, earlier) != m.belief(agent).contains(viewer, later)
        }
        Violation::ContextNotConnected { context, a, b } => {
            let u = &m.context(context).worlds;
            u.contains(&a) && u.contains(&b) && a != b
        }
        _ => true,
    }
}

fn options() -> EvalOptions {
    EvalOptions { bound: 1, trace_bound: 4, ..EvalOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn validation_matches_nested_loops(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let shape = ModelShape::random(&mut rng, 50);
        let m = random_model(&mut rng, shape);
        let report = validate_model(&m);
        let got: BTreeSet<_> = report.violations.iter().map(key).collect();
        prop_assert_eq!(got, oracle(&m));
        for v in &report.violations {
            prop_assert!(checks_witness(&m, v), "bad witness {:?}", v);
        }
    }

    #[test]
    fn transitions_are_deterministic(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let shape = ModelShape::random(&mut rng, 20);
        let m = random_model(&mut rng, shape);
        for w in m.worlds() {
            let steps: Vec<_> = m.transitions(w).map(|(s, _)| s).collect();
            let unique: BTreeSet<_> = steps.iter().copied().collect();
            prop_assert_eq!(steps.len(), unique.len());
            for (s, to) in m.transitions(w) {
                prop_assert_eq!(m.next(w, s), Some(to));
            }
        }
    }

    #[test]
    fn acyclic_contexts_have_start_and_end(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let shape = ModelShape::random(&mut rng, 20);
        let m = random_model(&mut rng, shape);
        prop_assume!(!validate_model(&m).violations.iter().any(|v| matches!(v, Violation::OrderCycle { .. })));
        for c in m.contexts() {
            prop_assert!(!m.context_start(c).is_empty());
            prop_assert!(!m.context_end(c).is_empty());
        }
    }

    #[test]
    fn box_distributes_and_diamond_is_dual(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let shape = ModelShape::random(&mut rng, 15);
        let m = random_model(&mut rng, shape);
        let v = Vocabulary::of(&m);
        let fs = FormulaShape { depth: 2, trace_budget: 3, achieving: true };
        let xi = event(&mut rng, &v, 3, 3, fs);
        let phi = formula(&mut rng, &v, fs);
        let psi = formula(&mut rng, &v, fs);
        let mut ev = Evaluator::with_options(&m, options());
        for w in m.worlds() {
            let conj = ev.eval(&Assertion::Box(xi.clone(), Box::new(Assertion::and(phi.clone(), psi.clone()))), w).unwrap();
            let split = ev.eval(&Assertion::Box(xi.clone(), Box::new(phi.clone())), w).unwrap()
                && ev.eval(&Assertion::Box(xi.clone(), Box::new(psi.clone())), w).unwrap();
            prop_assert_eq!(conj, split);
            let dia = ev.eval(&Assertion::Diamond(xi.clone(), Box::new(phi.clone())), w).unwrap();
            let boxed_not = ev.eval(&Assertion::Box(xi.clone(), Box::new(Assertion::not(phi.clone()))), w).unwrap();
            prop_assert!(!dia || !boxed_not);
        }
    }

    #[test]
    fn evaluation_is_deterministic(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let shape = ModelShape::random(&mut rng, 15);
        let m = random_model(&mut rng, shape);
        let v = Vocabulary::of(&m);
        let fs = FormulaShape { depth: 4, trace_budget: 4, achieving: true };
        let phis: Vec<_> = (0..5).map(|_| formula(&mut rng, &v, fs)).collect();
        let mut first = Evaluator::with_options(&m, options());
        let a: Vec<_> = phis.iter().flat_map(|f| m.worlds().map(|w| first.eval(f, w).unwrap()).collect::<Vec<_>>()).collect();
        let mut second = Evaluator::with_options(&m, options());
        let b: Vec<_> = phis.iter().rev().flat_map(|f| m.worlds().map(|w| second.eval(f, w).unwrap()).collect::<Vec<_>>()).collect();
        let b: Vec<_> = b.chunks(m.world_count()).rev().flatten().copied().collect();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn random_models_hit_every_relational_violation() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut seen = BTreeSet::new();
    for _ in 0..200 {
        let shape = ModelShape::random(&mut rng, 10);
        let m = random_model(&mut rng, shape);
        seen.extend(validate_model(&m).violations.iter().map(|v| key(v).0));
        let _ = rng.random::<u8>();
    }
    for k in [1u8, 2, 4, 5, 6] {
        assert!(seen.contains(&k), "no violation of kind {k} generated");
    }
}
