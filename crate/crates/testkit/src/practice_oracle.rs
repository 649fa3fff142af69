//! Breadth-first reference checks for practice properties.
//!
//! Paths are enumerated level by level and every way of cutting a path into
//! phase segments is tried, rather than searching depth-first with early
//! commitment.

use std::collections::{BTreeSet, VecDeque};

use socprac_core::checker::Evaluator;
use socprac_core::ids::{StepId, WorldId};
use socprac_core::model::{Kind, KripkeModel};
use socprac_core::practice::{Phase, SocialPractice};
use socprac_core::syntax::{ActionExpr, Assertion};

/// An execution in the oracle's Δ: start, steps, branch index (`None` for
/// the empty execution).
pub type Execution = (WorldId, Vec<StepId>, Option<usize>);

fn fold(m: &KripkeModel, w: WorldId, steps: &[StepId]) -> Option<WorldId> {
    steps.iter().try_fold(w, |v, &s| m.next(v, s))
}

/// Strictly increasing cut positions `c_1 < .. < c_k = n`.
fn cuttings(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(from: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 1 {
            if from < n {
                cur.push(n);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for c in from + 1..n {
            cur.push(c);
            go(c, n, left - 1, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn conforms(ev: &mut Evaluator<'_>, phases: &[Phase], w0: WorldId, steps: &[StepId]) -> bool {
    let m = ev.model();
    'cut: for cuts in cuttings(steps.len(), phases.len()) {
        let mut w = w0;
        let mut pos = 0;
        for (phase, &c) in phases.iter().zip(&cuts) {
            let seg = &steps[pos..c];
            if !ev.denotation(&phase.event, w).expect("bounded").contains(seg) {
                continue 'cut;
            }
            w = fold(m, w, seg).expect("path");
            if !ev.eval(&phase.goal, w).expect("bounded") {
                continue 'cut;
            }
            pos = c;
        }
        return true;
    }
    false
}

/// Δ by breadth-first enumeration of every non-idle path up to `depth`.
pub fn delta(ev: &mut Evaluator<'_>, sp: &SocialPractice, depth: usize) -> BTreeSet<Execution> {
    let m = ev.model();
    let sc: Vec<WorldId> = m.worlds().filter(|&w| ev.eval(&sp.start, w).unwrap()).collect();
    let ec: BTreeSet<WorldId> = m.worlds().filter(|&w| ev.eval(&sp.end, w).unwrap()).collect();
    let branches = sp.branches();
    let mut out = BTreeSet::new();
    let mut queue: VecDeque<(WorldId, Vec<StepId>)> = sc.iter().map(|&w| (w, Vec::new())).collect();
    while let Some((w0, steps)) = queue.pop_front() {
        let last = fold(m, w0, &steps).expect("path");
        if steps.len() < depth {
            for (s, _) in m.transitions(last).filter(|&(s, _)| !m.step(s).is_skip()) {
                let mut next = steps.clone();
                next.push(s);
                queue.push_back((w0, next));
            }
        }
        let lands = sc.iter().filter_map(|&w| fold(m, w, &steps)).all(|u| ec.contains(&u));
        if !ec.contains(&last) || !lands {
            continue;
        }
        if steps.is_empty() {
            out.insert((w0, steps, None));
            continue;
        }
        if let Some(bi) = (0..branches.len()).find(|&i| conforms(ev, &branches[i].phases, w0, &steps)) {
            out.insert((w0, steps, Some(bi)));
        }
    }
    out
}

fn worlds_along(m: &KripkeModel, w0: WorldId, steps: &[StepId]) -> Vec<WorldId> {
    let mut ws = vec![w0];
    for &s in steps {
        ws.push(m.next(*ws.last().unwrap(), s).expect("path"));
    }
    ws
}

/// Executions of Δ where every action has, at the world it fires, some
/// practice actor able to perform it.
pub fn feasible_executions(ev: &mut Evaluator<'_>, sp: &SocialPractice, depth: usize) -> Vec<Execution> {
    let m = ev.model();
    let mut out = Vec::new();
    for x in delta(ev, sp, depth) {
        if x.2.is_none() {
            continue;
        }
        let ws = worlds_along(m, x.0, &x.1);
        let ok = x.1.iter().enumerate().all(|(i, &s)| {
            m.step(s).all_acts().actions().all(|b| {
                sp.actors
                    .agents()
                    .any(|a| ev.eval(&Assertion::Able(a, ActionExpr::Atom(b)), ws[i]).unwrap())
            })
        });
        if ok {
            out.push(x);
        }
    }
    out
}

fn is_violation(m: &KripkeModel, p: socprac_core::ids::AtomId) -> bool {
    m.atom_name(p).starts_with("V#")
}

/// Some feasible execution visits no world where a violation atom holds.
pub fn normative(ev: &mut Evaluator<'_>, sp: &SocialPractice, depth: usize) -> bool {
    let m = ev.model();
    feasible_executions(ev, sp, depth).iter().any(|x| {
        worlds_along(m, x.0, &x.1).iter().all(|&w| !m.atoms().any(|p| is_violation(m, p) && m.holds(w, p)))
    })
}

/// Every social atom in a leaf goal of some branch is made true, along a
/// feasible execution of a branch containing that leaf, by a step performing
/// a social action or a physical action that a counts-as rule of the
/// practice maps to a social one.
pub fn complete(ev: &mut Evaluator<'_>, sp: &SocialPractice, depth: usize) -> bool {
    let m = ev.model();
    let branches = sp.branches();
    let sources: BTreeSet<_> = sp
        .counts_as
        .iter()
        .filter_map(|r| match &r.performed {
            ActionExpr::Atom(b) => Some(*b),
            _ => None,
        })
        .collect();
    let social = |b: usize| -> Vec<(usize, socprac_core::ids::AtomId)> {
        branches[b]
            .phases
            .iter()
            .flat_map(|p| p.goal.atoms().into_iter().map(move |a| (p.leaves[0], a)))
            .filter(|&(_, a)| m.atom_kind(a) == Kind::Social && !is_violation(m, a))
            .collect()
    };
    let needed: BTreeSet<_> = (0..branches.len()).flat_map(social).collect();
    let executions = feasible_executions(ev, sp, depth);
    if executions.is_empty() {
        return false;
    }
    let mut explained = BTreeSet::new();
    for x in &executions {
        let ws = worlds_along(m, x.0, &x.1);
        for (leaf, p) in social(x.2.unwrap()) {
            let made = x.1.iter().enumerate().any(|(i, &s)| {
                !m.holds(ws[i], p)
                    && m.holds(ws[i + 1], p)
                    && m.step(s).all_acts().actions().any(|b| m.action_kind(b) == Kind::Social || sources.contains(&b))
            });
            if made {
                explained.insert((leaf, p));
            }
        }
    }
    needed.is_subset(&explained)
}
