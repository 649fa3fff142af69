//! Model checking of assertions.
//!
//! Events are interpreted relative to the world where they start: role
//! actors and achieving actions are resolved there, and only traces
//! executable from that world are considered. The complement of an event
//! ranges over executable non-idle steps, so `[¬ξ]φ` never quantifies over
//! the implicit skip self-loop.
//!
//! Denotations are built bottom-up from the denotations of sub-events and
//! memoized per (event, world).

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ids::{ActSet, ActionId, AgentId, AtomId, ContextId, Group, RoleId, StepId, WorldId};
use crate::model::{Kind, KripkeModel};
use crate::practice::{self, DeltaEntry, SocialPractice};
use crate::syntax::{
    ActionExpr, Actor, Assertion, CountsAs, DeonticKind, EventExpr, Norm, Purpose, Strategy, ValueLink,
};

pub type Trace = Vec<StepId>;

/// Evaluation bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    /// Operator depth of the action repertoire used for achieving actions
    /// and for the `∃α` in ability, attempt and stit.
    pub bound: usize,
    /// Longest trace an event may denote.
    pub trace_bound: usize,
    /// Cap on traces enumerated from one world.
    pub max_traces: usize,
    /// Longest execution considered for `Δ_sp`.
    pub delta_depth: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { bound: 2, trace_bound: 8, max_traces: 200_000, delta_depth: practice::DEFAULT_DEPTH }
    }
}

/// Repertoires larger than this are refused.
pub const MAX_REPERTOIRE: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    BoundExceeded(String),
    UnknownPractice(ContextId),
    Practice(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::BoundExceeded(what) => write!(f, "bound exceeded: {what}"),
            EvalError::UnknownPractice(c) => write!(f, "no practice record for context #{}", c.0),
            EvalError::Practice(msg) => f.write_str(msg),
        }
    }
}

pub type EvalResult<T> = Result<T, EvalError>;

#[derive(Clone, Copy)]
enum BinOp {
    Seq,
    Choice,
    Par,
}

/// The set of candidate actions `α` ranged over by achieving actions and the
/// existential abilities: skip, every atom, and binary `;`, `&`, `+`
/// combinations up to `bound` operator levels.
pub fn repertoire(acts: ActSet, bound: usize) -> EvalResult<Vec<ActionExpr>> {
    let mut level: Vec<ActionExpr> = acts.actions().map(ActionExpr::Atom).collect();
    let mut all = level.clone();
    for _ in 1..bound.max(1) {
        let n = all.len();
        if n.saturating_add(3 * n * n) > MAX_REPERTOIRE {
            return Err(EvalError::BoundExceeded(alloc::format!(
                "action repertoire at depth {bound} exceeds {MAX_REPERTOIRE} candidates"
            )));
        }
        let base = all.clone();
        level.clear();
        for x in &base {
            for y in &base {
                level.push(ActionExpr::seq(x.clone(), y.clone()));
                level.push(ActionExpr::par(x.clone(), y.clone()));
                level.push(ActionExpr::choice(x.clone(), y.clone()));
            }
        }
        let seen: BTreeSet<ActionExpr> = all.iter().cloned().collect();
        all.extend(level.drain(..).filter(|a| !seen.contains(a)));
    }
    all.insert(0, ActionExpr::Skip);
    Ok(all)
}

fn action_maxlen(a: &ActionExpr, achieving: usize) -> usize {
    match a {
        ActionExpr::Atom(_) | ActionExpr::Skip => 1,
        ActionExpr::Achieving(_) => achieving,
        ActionExpr::Neg(x) => action_maxlen(x, achieving).max(1),
        ActionExpr::Seq(x, y) => action_maxlen(x, achieving) + action_maxlen(y, achieving),
        ActionExpr::Choice(x, y) | ActionExpr::Par(x, y) => {
            action_maxlen(x, achieving).max(action_maxlen(y, achieving))
        }
    }
}

/// Longest trace `ξ` can denote, given the longest achieving candidate.
pub fn event_maxlen(e: &EventExpr, achieving: usize) -> usize {
    match e {
        EventExpr::Do(_, a) => action_maxlen(a, achieving),
        EventExpr::Skip => 1,
        EventExpr::Neg(x) => event_maxlen(x, achieving).max(1),
        EventExpr::Seq(x, y) => event_maxlen(x, achieving) + event_maxlen(y, achieving),
        EventExpr::Choice(x, y) | EventExpr::Par(x, y) => event_maxlen(x, achieving).max(event_maxlen(y, achieving)),
    }
}

fn has_prefix_in(set: &BTreeSet<Trace>, t: &[StepId], proper: bool) -> bool {
    let n = if proper { t.len() - 1 } else { t.len() };
    (1..=n).any(|k| set.contains(&t[..k]))
}

/// `T1 ⊔ T2` over plain trace sets.
fn set_choice(a: &BTreeSet<Trace>, b: &BTreeSet<Trace>) -> BTreeSet<Trace> {
    a.union(b)
        .filter(|t| {
            let (ia, ib) = (a.contains(*t), b.contains(*t));
            !(ia && !ib && has_prefix_in(b, t, true)) && !(ib && !ia && has_prefix_in(a, t, true))
        })
        .cloned()
        .collect()
}

/// Evaluates assertions over one model, memoizing per (formula, world).
pub struct Evaluator<'m> {
    m: &'m KripkeModel,
    opts: EvalOptions,
    repertoire: Option<Rc<Vec<ActionExpr>>>,
    repertoire_acts: ActSet,
    practices: BTreeMap<ContextId, &'m SocialPractice>,
    memo: BTreeMap<(Assertion, WorldId), bool>,
    den_memo: BTreeMap<(EventExpr, WorldId), Rc<BTreeSet<Trace>>>,
    achieving_memo: BTreeMap<(Group, Assertion, WorldId), Rc<BTreeSet<Trace>>>,
    exec_memo: BTreeMap<(WorldId, usize), Rc<Vec<Trace>>>,
    delta_memo: BTreeMap<ContextId, Rc<Vec<DeltaEntry>>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(m: &'m KripkeModel) -> Evaluator<'m> {
        Self::with_options(m, EvalOptions::default())
    }

    pub fn with_options(m: &'m KripkeModel, opts: EvalOptions) -> Evaluator<'m> {
        let all = if m.action_count() == 64 { ActSet(u64::MAX) } else { ActSet((1u64 << m.action_count()) - 1) };
        Evaluator {
            m,
            opts,
            repertoire: None,
            repertoire_acts: all,
            practices: BTreeMap::new(),
            memo: BTreeMap::new(),
            den_memo: BTreeMap::new(),
            achieving_memo: BTreeMap::new(),
            exec_memo: BTreeMap::new(),
            delta_memo: BTreeMap::new(),
        }
    }

    /// Makes a practice record available to practice-level assertions. Its
    /// possible actions, when declared, become the action repertoire.
    pub fn with_practice(mut self, sp: &'m SocialPractice) -> Evaluator<'m> {
        if !sp.actions.is_empty() {
            self.repertoire_acts = sp.actions;
            self.repertoire = None;
        }
        self.practices.insert(sp.context, sp);
        self
    }

    pub fn model(&self) -> &'m KripkeModel {
        self.m
    }

    pub fn options(&self) -> EvalOptions {
        self.opts
    }

    pub fn practice(&self, c: ContextId) -> EvalResult<&'m SocialPractice> {
        self.practices.get(&c).copied().ok_or(EvalError::UnknownPractice(c))
    }

    fn rep(&mut self) -> EvalResult<Rc<Vec<ActionExpr>>> {
        if let Some(r) = &self.repertoire {
            return Ok(r.clone());
        }
        let r = Rc::new(repertoire(self.repertoire_acts, self.opts.bound)?);
        self.repertoire = Some(r.clone());
        Ok(r)
    }

    fn achieving_len(&mut self) -> EvalResult<usize> {
        let rep = self.rep()?;
        Ok(rep.iter().map(|a| action_maxlen(a, 1)).max().unwrap_or(1))
    }

    // ---- traces -----------------------------------------------------------

    /// Executable traces from `w` of length `1..=len`, shortest first.
    pub fn executable(&mut self, w: WorldId, len: usize) -> EvalResult<Rc<Vec<Trace>>> {
        if let Some(v) = self.exec_memo.get(&(w, len)) {
            return Ok(v.clone());
        }
        let mut out: Vec<Trace> = Vec::new();
        let mut frontier: Vec<(Trace, WorldId)> = alloc::vec![(Vec::new(), w)];
        for _ in 0..len {
            let mut next = Vec::new();
            for (t, v) in &frontier {
                for (s, u) in self.m.transitions(*v) {
                    let mut t2 = t.clone();
                    t2.push(s);
                    out.push(t2.clone());
                    next.push((t2, u));
                }
            }
            if out.len() > self.opts.max_traces {
                return Err(EvalError::BoundExceeded(alloc::format!(
                    "more than {} executable traces from world `{}`",
                    self.opts.max_traces,
                    self.m.world_name(w)
                )));
            }
            frontier = next;
        }
        let out = Rc::new(out);
        self.exec_memo.insert((w, len), out.clone());
        Ok(out)
    }

    /// `⟦ξ⟧` at `w`: the executable traces of the event, built from the
    /// denotations of its parts.
    pub fn denotation(&mut self, e: &EventExpr, w: WorldId) -> EvalResult<Rc<BTreeSet<Trace>>> {
        if let Some(d) = self.den_memo.get(&(e.clone(), w)) {
            return Ok(d.clone());
        }
        let len = event_maxlen(e, self.achieving_len()?);
        if len > self.opts.trace_bound {
            return Err(EvalError::BoundExceeded(alloc::format!(
                "event may last {len} steps, above the trace bound {}",
                self.opts.trace_bound
            )));
        }
        let out = match e {
            EventExpr::Skip => self.skip_set(w),
            EventExpr::Do(Actor::Group(g), a) => self.collective(*g, a, w)?,
            EventExpr::Do(Actor::Role(r), a) => {
                let mut out = BTreeSet::new();
                for g in self.m.enactors(*r, w).subsets() {
                    out.extend(self.collective(g, a, w)?);
                }
                out
            }
            EventExpr::Neg(x) => {
                let d = self.denotation(x, w)?;
                self.complement(&d, w)
            }
            EventExpr::Seq(x, y) => self.bin(BinOp::Seq, x, y, w)?,
            EventExpr::Choice(x, y) => self.bin(BinOp::Choice, x, y, w)?,
            EventExpr::Par(x, y) => self.bin(BinOp::Par, x, y, w)?,
        };
        if out.len() > self.opts.max_traces {
            return Err(EvalError::BoundExceeded(alloc::format!(
                "more than {} traces denoted at world `{}`",
                self.opts.max_traces,
                self.m.world_name(w)
            )));
        }
        let out = Rc::new(out);
        self.den_memo.insert((e.clone(), w), out.clone());
        Ok(out)
    }

    /// `⟦ξ⟧_R(w)`.
    pub fn successors(&mut self, e: &EventExpr, w: WorldId) -> EvalResult<BTreeSet<WorldId>> {
        let d = self.denotation(e, w)?;
        Ok(d.iter().filter_map(|t| self.m.run(w, t)).collect())
    }

    fn skip_set(&self, w: WorldId) -> BTreeSet<Trace> {
        let skip = self.m.steps().skip();
        self.m.transitions(w).filter(|&(s, _)| s == skip).map(|(s, _)| alloc::vec![s]).collect()
    }

    fn collective(&mut self, g: Group, a: &ActionExpr, w: WorldId) -> EvalResult<BTreeSet<Trace>> {
        if g.is_empty() {
            return Ok(BTreeSet::new());
        }
        Ok(match a {
            ActionExpr::Atom(act) => self
                .m
                .transitions(w)
                .filter(|&(s, _)| self.m.step(s).acts(g).contains(*act))
                .map(|(s, _)| alloc::vec![s])
                .collect(),
            ActionExpr::Skip => self.skip_set(w),
            ActionExpr::Neg(x) => {
                let d = self.denotation(&EventExpr::group(g, (**x).clone()), w)?;
                self.complement(&d, w)
            }
            ActionExpr::Achieving(phi) => (*self.achieving_set(g, phi, w)?).clone(),
            ActionExpr::Seq(x, y) | ActionExpr::Choice(x, y) | ActionExpr::Par(x, y) => {
                let op = match a {
                    ActionExpr::Seq(..) => BinOp::Seq,
                    ActionExpr::Choice(..) => BinOp::Choice,
                    _ => BinOp::Par,
                };
                let mut out = BTreeSet::new();
                for (l, r) in g.covers() {
                    let el = EventExpr::group(l, (**x).clone());
                    let er = EventExpr::group(r, (**y).clone());
                    out.extend(self.bin(op, &el, &er, w)?);
                }
                out
            }
        })
    }

    fn bin(&mut self, op: BinOp, x: &EventExpr, y: &EventExpr, w: WorldId) -> EvalResult<BTreeSet<Trace>> {
        let dx = self.denotation(x, w)?;
        match op {
            BinOp::Seq => {
                let mut out = BTreeSet::new();
                for t in dx.iter() {
                    let mid = self.m.run(w, t).expect("executable");
                    for u in self.denotation(y, mid)?.iter() {
                        let mut tu = t.clone();
                        tu.extend_from_slice(u);
                        out.insert(tu);
                    }
                }
                Ok(out)
            }
            BinOp::Choice => {
                let dy = self.denotation(y, w)?;
                Ok(set_choice(&dx, &dy))
            }
            BinOp::Par => {
                let dy = self.denotation(y, w)?;
                Ok(dx
                    .iter()
                    .filter(|t| has_prefix_in(&dy, t, false))
                    .chain(dy.iter().filter(|t| has_prefix_in(&dx, t, false)))
                    .cloned()
                    .collect())
            }
        }
    }

    /// The executable traces from `w` in the complement of `d`: a common
    /// prefix of every trace of `d` followed by a non-idle step none of them
    /// takes there.
    fn complement(&self, d: &BTreeSet<Trace>, w: WorldId) -> BTreeSet<Trace> {
        let skip = self.m.steps().skip();
        let mut out = BTreeSet::new();
        let Some(first) = d.iter().next() else {
            for (s, _) in self.m.transitions(w) {
                if s != skip {
                    out.insert(alloc::vec![s]);
                }
            }
            return out;
        };
        let min = d.iter().map(Vec::len).min().unwrap_or(0);
        let mut at = w;
        for n in 1..=min {
            let prefix = &first[..n - 1];
            if !d.iter().all(|t| t[..n - 1] == *prefix) {
                break;
            }
            if n > 1 {
                at = self.m.next(at, first[n - 2]).expect("executable");
            }
            for (s, _) in self.m.transitions(at) {
                if s != skip && d.iter().all(|t| t[n - 1] != s) {
                    let mut u = prefix.to_vec();
                    u.push(s);
                    out.insert(u);
                }
            }
        }
        out
    }

    /// The candidate actions `α` for which `G:α` is executable at `w`.
    fn executable_candidates(&mut self, actor: &Actor, w: WorldId) -> EvalResult<Vec<ActionExpr>> {
        let rep = self.rep()?;
        let mut out = Vec::new();
        for a in rep.iter() {
            if !self.denotation(&EventExpr::Do(actor.clone(), a.clone()), w)?.is_empty() {
                out.push(a.clone());
            }
        }
        Ok(out)
    }

    /// `α(G)φ` at `w`: the `⊔` of every executable candidate `G:α` with
    /// `[G:α]φ`.
    fn achieving_set(&mut self, g: Group, phi: &Assertion, w: WorldId) -> EvalResult<Rc<BTreeSet<Trace>>> {
        let key = (g, phi.clone(), w);
        if let Some(s) = self.achieving_memo.get(&key) {
            return Ok(s.clone());
        }
        let actor = Actor::Group(g);
        let mut acc: Option<BTreeSet<Trace>> = None;
        for a in self.executable_candidates(&actor, w)? {
            let ev = EventExpr::Do(actor.clone(), a);
            if self.box_holds(&ev, phi, w)? {
                let d = self.denotation(&ev, w)?;
                acc = Some(match acc {
                    None => (*d).clone(),
                    Some(prev) => set_choice(&prev, &d),
                });
            }
        }
        let s = Rc::new(acc.unwrap_or_default());
        self.achieving_memo.insert(key, s.clone());
        Ok(s)
    }

    // ---- assertions -------------------------------------------------------

    fn box_holds(&mut self, e: &EventExpr, phi: &Assertion, w: WorldId) -> EvalResult<bool> {
        for v in self.successors(e, w)? {
            if !self.eval(phi, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn diamond_holds(&mut self, e: &EventExpr, phi: &Assertion, w: WorldId) -> EvalResult<bool> {
        for v in self.successors(e, w)? {
            if self.eval(phi, v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Worlds reachable from `w` in one or more steps of `⋃_{a∈g} R_a`.
    pub fn belief_closure(&self, g: Group, w: WorldId) -> BTreeSet<WorldId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<WorldId> = Vec::new();
        let push_succ = |v: WorldId, stack: &mut Vec<WorldId>| {
            for a in g.agents() {
                stack.extend(self.m.belief(a).successors(v).iter().copied());
            }
        };
        push_succ(w, &mut stack);
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                push_succ(v, &mut stack);
            }
        }
        seen
    }

    pub fn common_belief(&mut self, g: Group, phi: &Assertion, w: WorldId) -> EvalResult<bool> {
        for v in self.belief_closure(g, w) {
            if !self.eval(phi, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn resolve(&self, actor: &Actor, w: WorldId) -> Group {
        match actor {
            Actor::Group(g) => *g,
            Actor::Role(r) => self.m.enactors(*r, w),
        }
    }

    pub fn eval(&mut self, phi: &Assertion, w: WorldId) -> EvalResult<bool> {
        match phi {
            Assertion::True => return Ok(true),
            Assertion::False => return Ok(false),
            Assertion::Atom(p) => return Ok(self.m.holds(w, *p)),
            _ => {}
        }
        let key = (phi.clone(), w);
        if let Some(&b) = self.memo.get(&key) {
            return Ok(b);
        }
        let v = self.eval_uncached(phi, w)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    fn eval_uncached(&mut self, phi: &Assertion, w: WorldId) -> EvalResult<bool> {
        use Assertion as A;
        Ok(match phi {
            A::True => true,
            A::False => false,
            A::Atom(p) => self.m.holds(w, *p),
            A::Not(x) => !self.eval(x, w)?,
            A::And(x, y) => self.eval(x, w)? && self.eval(y, w)?,
            A::Or(x, y) => self.eval(x, w)? || self.eval(y, w)?,
            A::Implies(x, y) => !self.eval(x, w)? || self.eval(y, w)?,
            A::Box(e, x) => self.box_holds(e, x, w)?,
            A::Diamond(e, x) => self.diamond_holds(e, x, w)?,
            A::Cap(a, act) => self.cap(*a, act),
            A::Done(e) => self.done(e, w)?,
            A::Do(e) => self.do_(e, w)?,
            A::Belief(a, x) => {
                let succ: Vec<WorldId> = self.m.belief(*a).successors(w).iter().copied().collect();
                self.all(&succ, x)?
            }
            A::Goal(a, x) => {
                let succ: Vec<WorldId> = self.m.goal(*a).successors(w).iter().copied().collect();
                self.all(&succ, x)?
            }
            A::EveryoneBelieves(g, x) => {
                let mut ok = true;
                for a in g.agents() {
                    let succ: Vec<WorldId> = self.m.belief(a).successors(w).iter().copied().collect();
                    if !self.all(&succ, x)? {
                        ok = false;
                        break;
                    }
                }
                ok
            }
            A::CommonBelief(g, x) => self.common_belief(*g, x, w)?,
            A::DoPart { agent, action, group, expr } => {
                group.contains(*agent)
                    && expr.atoms().contains(action)
                    && self.do_(&EventExpr::agent(*agent, ActionExpr::Atom(*action)), w)?
                    && self.do_(&EventExpr::group(*group, expr.clone()), w)?
            }
            A::DonePart { agent, action, group, expr } => {
                group.contains(*agent)
                    && expr.atoms().contains(action)
                    && self.done(&EventExpr::agent(*agent, ActionExpr::Atom(*action)), w)?
                    && self.done(&EventExpr::group(*group, expr.clone()), w)?
            }
            A::Able(a, act) => {
                self.cap(*a, act) && !self.denotation(&EventExpr::agent(*a, act.clone()), w)?.is_empty()
            }
            A::AbleTo(a, x) => {
                let actor = Actor::Group(Group::singleton(*a));
                let mut ok = false;
                for act in self.executable_candidates(&actor, w)? {
                    if self.cap(*a, &act) && self.diamond_holds(&EventExpr::Do(actor.clone(), act), x, w)? {
                        ok = true;
                        break;
                    }
                }
                ok
            }
            A::Attempt(b, x) => self.attempt(b, x, w)?,
            A::Stit(b, x) => {
                let mut ok = false;
                for act in self.executable_candidates(b, w)? {
                    let ev = EventExpr::Do(b.clone(), act);
                    if self.do_(&ev, w)? && self.box_holds(&ev, x, w)? {
                        ok = true;
                        break;
                    }
                }
                ok
            }
            A::Deontic { kind, violation, event } => self.deontic(*kind, *violation, event, w)?,
            A::RoleNorm(n) => self.role_norm(n, w)?,
            A::Purpose(p) => self.purpose(p, w)?,
            A::Strategy(s, sp) => self.strategy(s, *sp, w)?,
            A::CountsAs(c) => self.counts_as(c)?,
            A::Promotes(v) => self.value_link(v, w, true)?,
            A::Demotes(v) => self.value_link(v, w, false)?,
            A::Affords(objs, act, c) => self.m.affords(objs, act, *c),
            A::Available(objs, c) => self.m.is_available(objs, *c, w),
            A::Play(a, r, c) => self.play_in(*a, *r, *c, w),
            A::Active(c) => self.m.context(*c).worlds.contains(&w),
            A::StartCond(c, x) => {
                let start = self.m.context_start(*c);
                self.exact_at(&start, x)?
            }
            A::EndCond(c, x) => {
                let end = self.m.context_end(*c);
                self.exact_at(&end, x)?
            }
            A::Salient(actor, _, c) => self.salient(actor, *c, w),
        })
    }

    fn all(&mut self, worlds: &[WorldId], x: &Assertion) -> EvalResult<bool> {
        for &v in worlds {
            if !self.eval(x, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `φ` at every world of `ws` and `¬φ` everywhere else.
    fn exact_at(&mut self, ws: &BTreeSet<WorldId>, x: &Assertion) -> EvalResult<bool> {
        for v in self.m.worlds() {
            if self.eval(x, v)? != ws.contains(&v) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn cap(&self, a: AgentId, act: &ActionExpr) -> bool {
        act.atoms().into_iter().all(|b| self.m.capability(a).contains(b))
    }

    pub fn done(&mut self, e: &EventExpr, w1: WorldId) -> EvalResult<bool> {
        let preds: Vec<WorldId> = self.m.order_predecessors(w1).iter().copied().collect();
        if let EventExpr::Seq(x, y) = e {
            if !self.done(y, w1)? {
                return Ok(false);
            }
            for w2 in preds {
                if self.done(x, w2)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        for w2 in preds {
            if self.successors(e, w2)?.contains(&w1) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `DO(ξ)`; vacuously true at `≺`-maximal worlds.
    pub fn do_(&mut self, e: &EventExpr, w1: WorldId) -> EvalResult<bool> {
        let next: Vec<WorldId> = self.m.order().successors(w1).iter().copied().collect();
        if let EventExpr::Seq(x, y) = e {
            let reach = self.successors(x, w1)?;
            for w2 in next {
                if !reach.contains(&w2) || !self.do_(y, w2)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let reach = self.successors(e, w1)?;
        Ok(next.iter().all(|w2| reach.contains(w2)))
    }

    fn attempt(&mut self, b: &Actor, x: &Assertion, w: WorldId) -> EvalResult<bool> {
        for act in self.executable_candidates(b, w)? {
            let ev = EventExpr::Do(b.clone(), act);
            if self.do_(&ev, w)? && self.diamond_holds(&ev, x, w)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn deontic(&mut self, kind: DeonticKind, v: AtomId, e: &EventExpr, w: WorldId) -> EvalResult<bool> {
        let viol = Assertion::Atom(v);
        Ok(match kind {
            DeonticKind::Obligation => self.box_holds(&EventExpr::neg(e.clone()), &viol, w)?,
            DeonticKind::Prohibition => self.box_holds(e, &viol, w)?,
            DeonticKind::Permission => !self.box_holds(e, &viol, w)?,
        })
    }

    /// `play(a, r)`: `a` enacts `r` in some context active at `w` that
    /// declares the role.
    pub fn play(&self, a: AgentId, r: RoleId, w: WorldId) -> bool {
        self.m.contexts().any(|c| self.play_in(a, r, c, w))
    }

    pub fn play_in(&self, a: AgentId, r: RoleId, c: ContextId, w: WorldId) -> bool {
        let ctx = self.m.context(c);
        ctx.roles.contains(&r) && ctx.worlds.contains(&w) && self.m.enacts_in(a, r, c, w)
    }

    /// Agents the norm currently binds: they play the role and believe its
    /// condition.
    pub fn norm_addressees(&mut self, n: &Norm, w: WorldId) -> EvalResult<Group> {
        let mut g = Group::EMPTY;
        for a in self.m.agents() {
            if self.play(a, n.role, w) && self.eval(&Assertion::belief(a, n.condition.clone()), w)? {
                g = g.with(a);
            }
        }
        Ok(g)
    }

    /// The per-agent body of an ADIC norm.
    pub fn norm_body(n: &Norm, a: AgentId) -> Assertion {
        let act = EventExpr::agent(a, n.action.clone());
        let main = Assertion::Deontic { kind: n.kind, violation: n.violation, event: act.clone() };
        let sanction = match (&n.sanction, n.sanction_violation) {
            (Some(rho), Some(vs)) if n.kind != DeonticKind::Permission => {
                let duty = Assertion::Deontic {
                    kind: DeonticKind::Obligation,
                    violation: vs,
                    event: EventExpr::agent(a, rho.clone()),
                };
                let trigger = match n.kind {
                    DeonticKind::Obligation => EventExpr::neg(act),
                    _ => act,
                };
                Some(Assertion::boxed(trigger, duty))
            }
            _ => None,
        };
        match sanction {
            Some(s) => Assertion::and(main, s),
            None => main,
        }
    }

    fn role_norm(&mut self, n: &Norm, w: WorldId) -> EvalResult<bool> {
        let bound = self.norm_addressees(n, w)?;
        for a in bound.agents() {
            if !self.eval(&Self::norm_body(n, a), w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn salient(&self, actor: &Actor, c: ContextId, w: WorldId) -> bool {
        let ctx = self.m.context(c);
        if !ctx.worlds.contains(&w) {
            return false;
        }
        if !self.resolve(actor, w).is_subset(ctx.actors) {
            return false;
        }
        !self.m.active_contexts(w).any(|d| {
            let inner = &self.m.context(d).worlds;
            inner.len() < ctx.worlds.len() && inner.is_subset(&ctx.worlds)
        })
    }

    // ---- practice-level expansions ----------------------------------------

    /// `CB_{A_c}((Salient(s, c) ∧ DO(a:trigger)) → Goal_a φ ∧ B_a([ev]φ))`.
    fn purpose_clause(
        c: ContextId,
        actors: Group,
        salient: (Actor, ActionExpr),
        a: AgentId,
        trigger: ActionExpr,
        believed: EventExpr,
        goal: &Assertion,
    ) -> Assertion {
        let ante = Assertion::and(
            Assertion::Salient(salient.0, salient.1, c),
            Assertion::Do(EventExpr::agent(a, trigger)),
        );
        let cons = Assertion::and(
            Assertion::goal(a, goal.clone()),
            Assertion::belief(a, Assertion::boxed(believed, goal.clone())),
        );
        Assertion::common_belief(actors, Assertion::implies(ante, cons))
    }

    fn choice_alternatives(a: &ActionExpr, out: &mut Vec<ActionExpr>) {
        match a {
            ActionExpr::Choice(x, y) => {
                Self::choice_alternatives(x, out);
                Self::choice_alternatives(y, out);
            }
            other => out.push(other.clone()),
        }
    }

    /// Macro-expansion of a purpose into base assertions. Role purposes need
    /// the current world to fix the enactors, and are expanded there.
    pub fn expand_purpose(&self, p: &Purpose, w: WorldId) -> Assertion {
        let m = self.m;
        match p {
            Purpose::Basic { agent, action, context, goal } => {
                let actors = m.context(*context).actors;
                let me = Actor::Group(Group::singleton(*agent));
                Self::purpose_clause(
                    *context,
                    actors,
                    (me, action.clone()),
                    *agent,
                    action.clone(),
                    EventExpr::agent(*agent, action.clone()),
                    goal,
                )
            }
            Purpose::General { action, context, goal } => {
                let actors = m.context(*context).actors;
                let mut alts = Vec::new();
                Self::choice_alternatives(action, &mut alts);
                Assertion::conjunction(alts.into_iter().flat_map(|alt| {
                    actors.agents().map(move |a| {
                        self.expand_purpose(
                            &Purpose::Basic { agent: a, action: alt.clone(), context: *context, goal: goal.clone() },
                            w,
                        )
                    })
                }))
            }
            Purpose::Complex { agent, action, context, goal } => {
                let actors = m.context(*context).actors;
                let me = Actor::Group(Group::singleton(*agent));
                Assertion::conjunction(action.atoms().into_iter().map(|b| {
                    Self::purpose_clause(
                        *context,
                        actors,
                        (me.clone(), action.clone()),
                        *agent,
                        ActionExpr::Atom(b),
                        EventExpr::agent(*agent, action.clone()),
                        goal,
                    )
                }))
            }
            Purpose::Group { group, action, context, goal } => {
                let actors = m.context(*context).actors;
                Assertion::conjunction(action.atoms().into_iter().map(|b| {
                    Assertion::disjunction(group.agents().map(|a| {
                        Self::purpose_clause(
                            *context,
                            actors,
                            (Actor::Group(*group), action.clone()),
                            a,
                            ActionExpr::Atom(b),
                            EventExpr::group(*group, action.clone()),
                            goal,
                        )
                    }))
                }))
            }
            Purpose::Role { role, action, context, goal } => {
                let actors = m.context(*context).actors;
                let players: Vec<AgentId> = m.agents().filter(|&a| self.play_in(a, *role, *context, w)).collect();
                if players.is_empty() {
                    return Assertion::True;
                }
                Assertion::conjunction(action.atoms().into_iter().map(|b| {
                    Assertion::disjunction(players.iter().map(|&a| {
                        Self::purpose_clause(
                            *context,
                            actors,
                            (Actor::Group(actors), action.clone()),
                            a,
                            ActionExpr::Atom(b),
                            EventExpr::Do(Actor::Role(*role), action.clone()),
                            goal,
                        )
                    }))
                }))
            }
            Purpose::Practice { .. } => Assertion::False,
        }
    }

    /// The abstract action performed along a concrete step sequence: each
    /// step becomes the parallel composition of its actions.
    pub fn sequence_action(&self, steps: &[StepId]) -> ActionExpr {
        let mut parts = steps.iter().map(|&s| {
            let acts = self.m.step(s).all_acts();
            let mut it = acts.actions().map(ActionExpr::Atom);
            match it.next() {
                None => ActionExpr::Skip,
                Some(first) => it.fold(first, ActionExpr::par),
            }
        });
        let first = parts.next().unwrap_or(ActionExpr::Skip);
        parts.fold(first, ActionExpr::seq)
    }

    pub fn delta(&mut self, sp: ContextId) -> EvalResult<Rc<Vec<DeltaEntry>>> {
        if let Some(d) = self.delta_memo.get(&sp) {
            return Ok(d.clone());
        }
        let record = self.practice(sp)?;
        let d = Rc::new(practice::delta_set(self, record, self.opts.delta_depth)?);
        self.delta_memo.insert(sp, d.clone());
        Ok(d)
    }

    fn purpose(&mut self, p: &Purpose, w: WorldId) -> EvalResult<bool> {
        if let Purpose::Practice { practice, goal } = p {
            let delta = self.delta(*practice)?;
            let actors = self.m.context(*practice).actors;
            for entry in delta.iter().filter(|e| e.branch.is_some()) {
                let action = self.sequence_action(&entry.steps);
                let f = self.expand_purpose(
                    &Purpose::Group { group: actors, action, context: *practice, goal: goal.clone() },
                    w,
                );
                if !self.eval(&f, w)? {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let f = self.expand_purpose(p, w);
        self.eval(&f, w)
    }

    /// `CB_{A_sp}(CB_B(φ)) ∧ CB_{A_sp}(active(sp)) → CB_{A_sp}(DO(B:γ))`,
    /// or `H_B(DONE(B:γ))` in the weak form.
    pub fn strategy(&mut self, s: &Strategy, sp: ContextId, w: WorldId) -> EvalResult<bool> {
        let ev = EventExpr::Do(s.actors.clone(), s.action.clone());
        self.strategy_event(&s.actors, &s.condition, &ev, s.weak, sp, w)
    }

    /// The strategy shape with an arbitrary expected event, believed by
    /// `actor` to be triggered by `cond`.
    pub fn strategy_event(
        &mut self,
        actor: &Actor,
        cond: &Assertion,
        ev: &EventExpr,
        weak: bool,
        sp: ContextId,
        w: WorldId,
    ) -> EvalResult<bool> {
        let actors = self.m.context(sp).actors;
        let reach = self.belief_closure(actors, w);
        let active = Assertion::Active(sp);
        for &v in &reach {
            if !self.eval(&active, v)? {
                return Ok(true);
            }
            let b = self.resolve(actor, v);
            if !self.common_belief(b, cond, v)? {
                return Ok(true);
            }
        }
        let expected = if weak {
            Assertion::Attempt(actor.clone(), Box::new(Assertion::Done(ev.clone())))
        } else {
            Assertion::Do(ev.clone())
        };
        for v in reach {
            if !self.eval(&expected, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Literals made true or false at `w` by every execution of `ev`, when
    /// it has at least one.
    pub fn effects(&mut self, ev: &EventExpr, w: WorldId) -> EvalResult<BTreeSet<(AtomId, bool)>> {
        let succ = self.successors(ev, w)?;
        let mut out = BTreeSet::new();
        if succ.is_empty() {
            return Ok(out);
        }
        for p in self.m.atoms() {
            let before = self.m.holds(w, p);
            if succ.iter().all(|&v| self.m.holds(v, p) != before) {
                out.insert((p, !before));
            }
        }
        Ok(out)
    }

    fn counts_as(&mut self, rule: &CountsAs) -> EvalResult<bool> {
        let ctx = self.m.context(rule.context);
        let worlds: Vec<WorldId> = ctx.worlds.iter().copied().collect();
        let actors = ctx.actors;
        let everyone = self.m.all_agents();
        for w in worlds {
            let target = self.effects(&EventExpr::group(everyone, rule.counts_as.clone()), w)?;
            for a in self.m.agents() {
                if !self.m.enacts_in(a, rule.role, rule.context, w) {
                    continue;
                }
                let performed = EventExpr::agent(a, rule.performed.clone());
                for &(p, val) in &target {
                    let lit = if val { Assertion::Atom(p) } else { Assertion::not(Assertion::Atom(p)) };
                    let bx = Assertion::boxed(performed.clone(), lit);
                    if !self.eval(&bx, w)? || !self.common_belief(actors, &bx, w)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    fn value_link(&mut self, v: &ValueLink, w: WorldId, promote: bool) -> EvalResult<bool> {
        if !self.m.context(v.practice).worlds.contains(&w) {
            return Ok(false);
        }
        let order = &self.m.value_order(v.value).less;
        for a in self.m.agents() {
            if !self.m.enacts(a, v.role, w) {
                continue;
            }
            for u in self.successors(&EventExpr::agent(a, v.action.clone()), w)? {
                let ok = if promote { order.contains(w, u) } else { order.contains(u, w) };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Instances of the affordance axiom that fail: objects affording an
    /// action are available and an agent with the capability plays a role
    /// in the context, yet the action is not executable for it.
    pub fn affordance_violations(&mut self) -> EvalResult<Vec<AffordanceViolation>> {
        let mut out = Vec::new();
        for (i, fact) in self.m.affordances().iter().enumerate() {
            let ctx = self.m.context(fact.context);
            for &w in &ctx.worlds {
                if !self.m.is_available(&fact.objects, fact.context, w) {
                    continue;
                }
                for a in self.m.agents() {
                    let plays = ctx.roles.iter().any(|&r| self.play_in(a, r, fact.context, w));
                    if plays && self.cap(a, &fact.action) && !self.eval(&Assertion::Able(a, fact.action.clone()), w)? {
                        out.push(AffordanceViolation { fact: i, world: w, agent: a });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Agents that are able to perform `b` at `w`.
    pub fn able_agents(&mut self, b: ActionId, w: WorldId) -> EvalResult<Group> {
        let mut g = Group::EMPTY;
        for a in self.m.agents() {
            if self.eval(&Assertion::Able(a, ActionExpr::Atom(b)), w)? {
                g = g.with(a);
            }
        }
        Ok(g)
    }

    /// Whether `p` is a social atom.
    pub fn is_social(&self, p: AtomId) -> bool {
        self.m.atom_kind(p) == Kind::Social
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffordanceViolation {
    pub fact: usize,
    pub world: WorldId,
    pub agent: AgentId,
}

/// Evaluates `φ` at `w` with default options.
pub fn eval(m: &KripkeModel, phi: &Assertion, w: WorldId) -> EvalResult<bool> {
    Evaluator::new(m).eval(phi, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Context, Kind, ModelBuilder};

    /// w0 --fred:drive--> w1, w0 --fred:park--> w2; p holds at w1.
    fn small() -> (KripkeModel, AtomId) {
        let mut b = ModelBuilder::new();
        let fred = b.agent("fred").unwrap();
        let drive = b.action("drive", Kind::Physical).unwrap();
        let park = b.action("park", Kind::Physical).unwrap();
        let p = b.atom("p", Kind::Physical).unwrap();
        b.violations(1).unwrap();
        let w: Vec<WorldId> = (0..3).map(|i| b.world(&alloc::format!("w{i}")).unwrap()).collect();
        b.set_true(w[1], p);
        b.capability(fred, ActSet::from_actions([drive, park]));
        b.transition(w[0], alloc::vec![(Group::singleton(fred), ActSet::singleton(drive))], w[1]);
        b.transition(w[0], alloc::vec![(Group::singleton(fred), ActSet::singleton(park))], w[2]);
        for &x in &w {
            for &y in &w {
                b.belief(fred, x, y);
            }
            b.goal(fred, x, w[1]);
        }
        b.order(w[0], w[1]);
        b.order(w[0], w[2]);
        b.context(Context {
            name: "c".into(),
            worlds: w.iter().copied().collect(),
            roles: BTreeSet::new(),
            actors: Group::singleton(fred),
            objects: BTreeSet::new(),
            places: Vec::new(),
        })
        .unwrap();
        (b.build().unwrap(), p)
    }

    fn fred(a: u16) -> EventExpr {
        EventExpr::agent(AgentId(0), ActionExpr::Atom(ActionId(a)))
    }

    #[test]
    fn skip_box_is_identity() {
        let (m, p) = small();
        let f = Assertion::boxed(EventExpr::Skip, Assertion::Atom(p));
        assert!(!eval(&m, &f, WorldId(0)).unwrap());
        assert!(eval(&m, &f, WorldId(1)).unwrap());
    }

    #[test]
    fn capability_of_sequence() {
        let (m, _) = small();
        let f = Assertion::Cap(AgentId(0), ActionExpr::seq(ActionExpr::Atom(ActionId(0)), ActionExpr::Atom(ActionId(1))));
        assert!(eval(&m, &f, WorldId(0)).unwrap());
    }

    #[test]
    fn done_and_do_follow_order() {
        let (m, _) = small();
        let mut ev = Evaluator::new(&m);
        assert!(ev.done(&fred(0), WorldId(1)).unwrap());
        assert!(!ev.done(&fred(0), WorldId(2)).unwrap());
        assert!(!ev.done(&fred(0), WorldId(0)).unwrap());
        // w0 has two order successors, reached by different actions
        assert!(!ev.do_(&fred(0), WorldId(0)).unwrap());
        let either = EventExpr::choice(fred(0), fred(1));
        assert!(ev.do_(&either, WorldId(0)).unwrap());
    }

    #[test]
    fn negated_event_excludes_skip() {
        let (m, _) = small();
        let mut ev = Evaluator::new(&m);
        let s = ev.successors(&EventExpr::neg(fred(0)), WorldId(0)).unwrap();
        assert_eq!(s, [WorldId(2)].into_iter().collect());
        // nothing but skip is executable at w1
        assert!(ev.successors(&EventExpr::neg(fred(0)), WorldId(1)).unwrap().is_empty());
    }

    #[test]
    fn ability_attempt_and_stit() {
        let (m, p) = small();
        let mut ev = Evaluator::new(&m);
        let f = Assertion::Atom(p);
        assert!(ev.eval(&Assertion::AbleTo(AgentId(0), Box::new(f.clone())), WorldId(0)).unwrap());
        let me = Actor::Group(Group(1));
        // DO(fred:(drive+park)) holds at w0 but only drive leads to p
        assert!(ev.eval(&Assertion::Attempt(me.clone(), Box::new(f.clone())), WorldId(0)).unwrap());
        assert!(!ev.eval(&Assertion::Stit(me, Box::new(f)), WorldId(0)).unwrap());
    }

    #[test]
    fn achieving_action_selects_drive() {
        let (m, p) = small();
        let mut ev = Evaluator::new(&m);
        let e = EventExpr::agent(AgentId(0), ActionExpr::Achieving(Box::new(Assertion::Atom(p))));
        assert_eq!(ev.successors(&e, WorldId(0)).unwrap(), [WorldId(1)].into_iter().collect());
    }

    #[test]
    fn deontic_operators() {
        let (m, _) = small();
        let v = m.atom_id("V#1").unwrap();
        let mut ev = Evaluator::new(&m);
        let ob = Assertion::Deontic { kind: DeonticKind::Obligation, violation: v, event: fred(0) };
        let pe = Assertion::Deontic { kind: DeonticKind::Permission, violation: v, event: fred(0) };
        let fo = Assertion::Deontic { kind: DeonticKind::Prohibition, violation: v, event: fred(0) };
        assert!(!ev.eval(&ob, WorldId(0)).unwrap());
        assert!(ev.eval(&pe, WorldId(0)).unwrap());
        assert_eq!(ev.eval(&pe, WorldId(0)).unwrap(), !ev.eval(&fo, WorldId(0)).unwrap());
    }

    #[test]
    fn singleton_common_belief_is_belief() {
        let (m, p) = small();
        let mut ev = Evaluator::new(&m);
        let f = Assertion::Atom(p);
        for w in m.worlds() {
            assert_eq!(
                ev.eval(&Assertion::common_belief(Group(1), f.clone()), w).unwrap(),
                ev.eval(&Assertion::belief(AgentId(0), f.clone()), w).unwrap()
            );
        }
    }

    #[test]
    fn repertoire_sizes() {
        assert_eq!(repertoire(ActSet(0b11), 1).unwrap().len(), 3);
        // skip + 2 atoms + 3 * 2 * 2 binary combinations
        assert_eq!(repertoire(ActSet(0b11), 2).unwrap().len(), 15);
        assert!(repertoire(ActSet(0xff), 3).is_err());
    }
}
