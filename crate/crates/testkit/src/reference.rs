//! A naive evaluator: candidate traces are enumerated and tested against
//! the membership clauses directly, nothing is cached, and common belief is
//! the greatest fixpoint of iterated everyone-believes.

use std::collections::BTreeSet;

use socprac_core::checker::{repertoire, EvalOptions};
use socprac_core::ids::{ActSet, AgentId, Group, StepId, WorldId};
use socprac_core::model::KripkeModel;
use socprac_core::syntax::{ActionExpr, Actor, Assertion, DeonticKind, EventExpr};

pub type Trace = Vec<StepId>;

pub struct Reference<'m> {
    pub m: &'m KripkeModel,
    pub opts: EvalOptions,
    rep: Vec<ActionExpr>,
}

fn act_len(a: &ActionExpr, ach: usize) -> usize {
    match a {
        ActionExpr::Atom(_) | ActionExpr::Skip => 1,
        ActionExpr::Achieving(_) => ach,
        ActionExpr::Neg(x) => act_len(x, ach),
        ActionExpr::Seq(x, y) => act_len(x, ach) + act_len(y, ach),
        ActionExpr::Choice(x, y) | ActionExpr::Par(x, y) => act_len(x, ach).max(act_len(y, ach)),
    }
}

/// Longest trace an event can denote.
pub fn event_len(e: &EventExpr, ach: usize) -> usize {
    match e {
        EventExpr::Skip => 1,
        EventExpr::Do(_, a) => act_len(a, ach),
        EventExpr::Neg(x) => event_len(x, ach),
        EventExpr::Seq(x, y) => event_len(x, ach) + event_len(y, ach),
        EventExpr::Choice(x, y) | EventExpr::Par(x, y) => event_len(x, ach).max(event_len(y, ach)),
    }
}

fn prefix_in(set: &BTreeSet<Trace>, t: &[StepId], proper: bool) -> bool {
    let upto = if proper { t.len() - 1 } else { t.len() };
    (1..=upto).any(|k| set.contains(&t[..k].to_vec()))
}

/// `T1 ⊔ T2`: a trace of either side, unless only one side has it and the
/// other side has one of its proper prefixes.
pub fn choice_sets(a: &BTreeSet<Trace>, b: &BTreeSet<Trace>) -> BTreeSet<Trace> {
    let mut out = BTreeSet::new();
    for t in a.iter().chain(b.iter()) {
        let ia = a.contains(t);
        let ib = b.contains(t);
        if ia && !ib && prefix_in(b, t, true) {
            continue;
        }
        if ib && !ia && prefix_in(a, t, true) {
            continue;
        }
        out.insert(t.clone());
    }
    out
}

impl<'m> Reference<'m> {
    pub fn new(m: &'m KripkeModel, opts: EvalOptions) -> Reference<'m> {
        let all = ActSet::from_actions(m.actions());
        let rep = repertoire(all, opts.bound).expect("small repertoire");
        Reference { m, opts, rep }
    }

    fn ach_len(&self) -> usize {
        self.rep.iter().map(|a| act_len(a, 1)).max().unwrap_or(1)
    }

    fn skip(&self) -> StepId {
        self.m.steps().skip()
    }

    /// Every executable trace from `w` with 1 to `len` steps.
    pub fn traces(&self, w: WorldId, len: usize) -> Vec<Trace> {
        let mut out = Vec::new();
        let mut layer = vec![(Vec::new(), w)];
        for _ in 0..len {
            let mut next = Vec::new();
            for (t, v) in layer {
                for (s, u) in self.m.transitions(v) {
                    let mut t2: Trace = t.clone();
                    t2.push(s);
                    out.push(t2.clone());
                    next.push((t2, u));
                }
            }
            layer = next;
        }
        out
    }

    pub fn den(&self, e: &EventExpr, w: WorldId) -> BTreeSet<Trace> {
        let len = event_len(e, self.ach_len());
        assert!(len <= self.opts.trace_bound, "event too long for the reference");
        self.traces(w, len).into_iter().filter(|t| self.member(e, w, t)).collect()
    }

    fn end(&self, w: WorldId, t: &[StepId]) -> WorldId {
        let mut v = w;
        for &s in t {
            v = self.m.next(v, s).expect("executable");
        }
        v
    }

    fn in_neg(&self, d: &BTreeSet<Trace>, t: &[StepId]) -> bool {
        let n = t.len();
        if t[n - 1] == self.skip() {
            return false;
        }
        if d.is_empty() {
            return n == 1;
        }
        d.iter().all(|u| u.len() >= n && u[..n - 1] == t[..n - 1] && u[n - 1] != t[n - 1])
    }

    pub fn member(&self, e: &EventExpr, w: WorldId, t: &[StepId]) -> bool {
        match e {
            EventExpr::Skip => t == [self.skip()],
            EventExpr::Do(Actor::Group(g), a) => self.member_group(*g, a, w, t),
            EventExpr::Do(Actor::Role(r), a) => {
                let who = self.m.enactors(*r, w);
                who.subsets().any(|g| self.member_group(g, a, w, t))
            }
            EventExpr::Neg(x) => self.in_neg(&self.den(x, w), t),
            EventExpr::Seq(x, y) => self.seq(x, y, w, t),
            EventExpr::Choice(x, y) => self.choice(x, y, w, t),
            EventExpr::Par(x, y) => self.par(x, y, w, t),
        }
    }

    fn seq(&self, x: &EventExpr, y: &EventExpr, w: WorldId, t: &[StepId]) -> bool {
        (1..t.len()).any(|k| self.member(x, w, &t[..k]) && self.member(y, self.end(w, &t[..k]), &t[k..]))
    }

    fn choice(&self, x: &EventExpr, y: &EventExpr, w: WorldId, t: &[StepId]) -> bool {
        let ix = self.member(x, w, t);
        let iy = self.member(y, w, t);
        let px = (1..t.len()).any(|k| self.member(x, w, &t[..k]));
        let py = (1..t.len()).any(|k| self.member(y, w, &t[..k]));
        (ix || iy) && !(ix && !iy && py) && !(iy && !ix && px)
    }

    fn par(&self, x: &EventExpr, y: &EventExpr, w: WorldId, t: &[StepId]) -> bool {
        let upto = |e: &EventExpr| (1..=t.len()).any(|k| self.member(e, w, &t[..k]));
        (self.member(x, w, t) && upto(y)) || (self.member(y, w, t) && upto(x))
    }

    fn member_group(&self, g: Group, a: &ActionExpr, w: WorldId, t: &[StepId]) -> bool {
        if g.is_empty() {
            return false;
        }
        let sub = |l: Group, x: &ActionExpr| EventExpr::Do(Actor::Group(l), x.clone());
        match a {
            ActionExpr::Atom(b) => t.len() == 1 && self.m.step(t[0]).acts(g).contains(*b),
            ActionExpr::Skip => t == [self.skip()],
            ActionExpr::Neg(x) => self.in_neg(&self.den(&sub(g, x), w), t),
            ActionExpr::Achieving(phi) => self.achieving(g, phi, w).contains(t),
            ActionExpr::Seq(x, y) | ActionExpr::Choice(x, y) | ActionExpr::Par(x, y) => {
                let mut found = false;
                for l in g.subsets() {
                    for r in g.subsets() {
                        if l.union(r) != g {
                            continue;
                        }
                        let (ex, ey) = (sub(l, x), sub(r, y));
                        found |= match a {
                            ActionExpr::Seq(..) => self.seq(&ex, &ey, w, t),
                            ActionExpr::Choice(..) => self.choice(&ex, &ey, w, t),
                            _ => self.par(&ex, &ey, w, t),
                        };
                    }
                }
                found
            }
        }
    }

    fn achieving(&self, g: Group, phi: &Assertion, w: WorldId) -> BTreeSet<Trace> {
        let mut acc: Option<BTreeSet<Trace>> = None;
        for c in &self.rep {
            let e = EventExpr::Do(Actor::Group(g), c.clone());
            let d = self.den(&e, w);
            if d.is_empty() || !d.iter().all(|t| self.eval(phi, self.end(w, t))) {
                continue;
            }
            acc = Some(match acc {
                None => d,
                Some(prev) => choice_sets(&prev, &d),
            });
        }
        acc.unwrap_or_default()
    }

    fn succ(&self, e: &EventExpr, w: WorldId) -> BTreeSet<WorldId> {
        self.den(e, w).iter().map(|t| self.end(w, t)).collect()
    }

    fn cap(&self, a: AgentId, act: &ActionExpr) -> bool {
        act.atoms().into_iter().all(|b| self.m.capability(a).contains(b))
    }

    fn done(&self, e: &EventExpr, w: WorldId) -> bool {
        let before: Vec<WorldId> = self.m.worlds().filter(|&v| self.m.order().contains(v, w)).collect();
        match e {
            EventExpr::Seq(x, y) => self.done(y, w) && before.iter().any(|&v| self.done(x, v)),
            _ => before.iter().any(|&v| self.succ(e, v).contains(&w)),
        }
    }

    fn do_(&self, e: &EventExpr, w: WorldId) -> bool {
        let after: Vec<WorldId> = self.m.worlds().filter(|&v| self.m.order().contains(w, v)).collect();
        match e {
            EventExpr::Seq(x, y) => {
                let reach = self.succ(x, w);
                after.iter().all(|v| reach.contains(v) && self.do_(y, *v))
            }
            _ => {
                let reach = self.succ(e, w);
                after.iter().all(|v| reach.contains(v))
            }
        }
    }

    fn candidates(&self, b: &Actor, w: WorldId) -> Vec<EventExpr> {
        self.rep
            .iter()
            .map(|c| EventExpr::Do(b.clone(), c.clone()))
            .filter(|e| !self.den(e, w).is_empty())
            .collect()
    }

    /// Worlds where `CB_g φ` holds: start from every world and remove those
    /// with a believed world outside `φ` or outside the current set.
    pub fn common_belief_worlds(&self, g: Group, phi: &Assertion) -> BTreeSet<WorldId> {
        let good: BTreeSet<WorldId> = self.m.worlds().filter(|&v| self.eval(phi, v)).collect();
        let mut x: BTreeSet<WorldId> = self.m.worlds().collect();
        loop {
            let next: BTreeSet<WorldId> = self
                .m
                .worlds()
                .filter(|&w| {
                    g.agents().all(|a| self.m.belief(a).successors(w).iter().all(|v| good.contains(v) && x.contains(v)))
                })
                .collect();
            if next == x {
                return x;
            }
            x = next;
        }
    }

    pub fn eval(&self, f: &Assertion, w: WorldId) -> bool {
        use Assertion as A;
        match f {
            A::True => true,
            A::False => false,
            A::Atom(p) => self.m.holds(w, *p),
            A::Not(x) => !self.eval(x, w),
            A::And(x, y) => self.eval(x, w) && self.eval(y, w),
            A::Or(x, y) => self.eval(x, w) || self.eval(y, w),
            A::Implies(x, y) => !self.eval(x, w) || self.eval(y, w),
            A::Box(e, x) => self.succ(e, w).into_iter().all(|v| self.eval(x, v)),
            A::Diamond(e, x) => self.succ(e, w).into_iter().any(|v| self.eval(x, v)),
            A::Cap(a, act) => self.cap(*a, act),
            A::Done(e) => self.done(e, w),
            A::Do(e) => self.do_(e, w),
            A::Belief(a, x) => self.m.belief(*a).successors(w).iter().all(|&v| self.eval(x, v)),
            A::Goal(a, x) => self.m.goal(*a).successors(w).iter().all(|&v| self.eval(x, v)),
            A::EveryoneBelieves(g, x) => {
                g.agents().all(|a| self.m.belief(a).successors(w).iter().all(|&v| self.eval(x, v)))
            }
            A::CommonBelief(g, x) => self.common_belief_worlds(*g, x).contains(&w),
            A::DoPart { agent, action, group, expr } => {
                group.contains(*agent)
                    && expr.atoms().contains(action)
                    && self.do_(&EventExpr::agent(*agent, ActionExpr::Atom(*action)), w)
                    && self.do_(&EventExpr::group(*group, expr.clone()), w)
            }
            A::DonePart { agent, action, group, expr } => {
                group.contains(*agent)
                    && expr.atoms().contains(action)
                    && self.done(&EventExpr::agent(*agent, ActionExpr::Atom(*action)), w)
                    && self.done(&EventExpr::group(*group, expr.clone()), w)
            }
            A::Able(a, act) => self.cap(*a, act) && !self.den(&EventExpr::agent(*a, act.clone()), w).is_empty(),
            A::AbleTo(a, x) => {
                let me = Actor::Group(Group::singleton(*a));
                self.candidates(&me, w).into_iter().any(|e| {
                    let EventExpr::Do(_, c) = &e else { unreachable!() };
                    self.cap(*a, c) && self.succ(&e, w).into_iter().any(|v| self.eval(x, v))
                })
            }
            A::Attempt(b, x) => self
                .candidates(b, w)
                .into_iter()
                .any(|e| self.do_(&e, w) && self.succ(&e, w).into_iter().any(|v| self.eval(x, v))),
            A::Stit(b, x) => self
                .candidates(b, w)
                .into_iter()
                .any(|e| self.do_(&e, w) && self.succ(&e, w).into_iter().all(|v| self.eval(x, v))),
            A::Deontic { kind, violation, event } => {
                let hit = |e: &EventExpr| self.succ(e, w).into_iter().all(|v| self.m.holds(v, *violation));
                match kind {
                    DeonticKind::Obligation => hit(&EventExpr::Neg(Box::new(event.clone()))),
                    DeonticKind::Prohibition => hit(event),
                    DeonticKind::Permission => !hit(event),
                }
            }
            other => panic!("the reference evaluator does not cover {other:?}"),
        }
    }
}
