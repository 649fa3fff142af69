//! Open-interpretation trace semantics.
//!
//! A [`Step`] assigns an s-set to every non-empty group of agents; an
//! [`STrace`] is a finite sequence of steps; events denote [`TraceSet`]s.
//! This module implements the concrete (materialized) mode: every step of a
//! small universe is enumerated and trace sets are explicit sets. The model
//! checker builds the same clauses relative to a world, from the transitions
//! available there.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::ids::{ActSet, ActionId, Group, StepId, MAX_ACTIONS, MAX_AGENTS};
use crate::syntax::{ActionExpr, Actor, EventExpr};

/// Payload of an s-set: `skip` or a non-empty set of actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Payload {
    Skip,
    Acts(ActSet),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SSet {
    pub group: Group,
    pub payload: Payload,
}

impl SSet {
    /// `act(S)`: the empty set for skip.
    pub fn acts(&self) -> ActSet {
        match self.payload {
            Payload::Skip => ActSet::EMPTY,
            Payload::Acts(a) => a,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepError {
    TooManyAgents(usize),
    UnknownGroup(Group),
    /// `sub ⊆ sup` but `act(S_sub) ⊄ act(S_sup)`.
    Monotonicity { sub: Group, sup: Group },
    /// `agent` skips, yet adding it to `group` changes the group's actions.
    SkipAbsorption { group: Group, idle: Group },
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::TooManyAgents(n) => write!(f, "{n} agents exceeds the limit of {MAX_AGENTS}"),
            StepError::UnknownGroup(g) => write!(f, "group {g:?} is outside the agent set"),
            StepError::Monotonicity { sub, sup } => {
                write!(f, "actions of {sub:?} are not contained in those of its supergroup {sup:?}")
            }
            StepError::SkipAbsorption { group, idle } => write!(
                f,
                "{idle:?} is idle, so {group:?} must perform exactly what its other members do"
            ),
        }
    }
}

/// One synchronous tick: an s-set for each of the `2^n - 1` groups.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    acts: Box<[ActSet]>,
}

impl Step {
    /// The step in which every group skips.
    pub fn skip(agents: usize) -> Step {
        Step { acts: alloc::vec![ActSet::EMPTY; (1usize << agents) - 1].into_boxed_slice() }
    }

    /// Number of agents in the underlying universe.
    pub fn agents(&self) -> usize {
        (self.acts.len() + 1).trailing_zeros() as usize
    }

    /// `act(S_g)`.
    pub fn acts(&self, g: Group) -> ActSet {
        debug_assert!(!g.is_empty());
        self.acts[g.0 as usize - 1]
    }

    pub fn sset(&self, g: Group) -> SSet {
        let a = self.acts(g);
        SSet { group: g, payload: if a.is_empty() { Payload::Skip } else { Payload::Acts(a) } }
    }

    pub fn is_skip(&self) -> bool {
        self.acts.iter().all(|a| a.is_empty())
    }

    /// Every action performed by anyone in this step.
    pub fn all_acts(&self) -> ActSet {
        self.acts.last().copied().unwrap_or(ActSet::EMPTY)
    }

    pub fn entries(&self) -> impl Iterator<Item = SSet> + '_ {
        (1..=self.acts.len() as u32).map(move |g| self.sset(Group(g)))
    }

    /// Canonical completion of a sparse assignment: each group performs the
    /// union of what its constrained subgroups perform; groups with no
    /// constrained subgroup skip. The result is checked against both step
    /// constraints.
    pub fn complete(agents: usize, sparse: &[(Group, ActSet)]) -> Result<Step, StepError> {
        if agents > MAX_AGENTS {
            return Err(StepError::TooManyAgents(agents));
        }
        let full = Group::all(agents);
        let mut acts = alloc::vec![ActSet::EMPTY; (1usize << agents) - 1];
        for &(g, a) in sparse {
            if g.is_empty() || !g.is_subset(full) {
                return Err(StepError::UnknownGroup(g));
            }
            acts[g.0 as usize - 1] = acts[g.0 as usize - 1].union(a);
        }
        // propagate upward in increasing bitmask order: every proper subset
        // of g has a smaller mask
        for g in 1..=full.0 {
            let grp = Group(g);
            let mut acc = acts[g as usize - 1];
            for a in grp.agents() {
                let sub = grp.without(a);
                if !sub.is_empty() {
                    acc = acc.union(acts[sub.0 as usize - 1]);
                }
            }
            acts[g as usize - 1] = acc;
        }
        let step = Step { acts: acts.into_boxed_slice() };
        step.check()?;
        Ok(step)
    }

    /// Checks monotonicity and skip absorption. Both reduce to conditions
    /// between a group and its maximal proper subgroups.
    pub fn check(&self) -> Result<(), StepError> {
        let full = Group::all(self.agents());
        for g in 1..=full.0 {
            let grp = Group(g);
            let here = self.acts(grp);
            for a in grp.agents() {
                let sub = grp.without(a);
                if sub.is_empty() {
                    continue;
                }
                if !self.acts(sub).is_subset(here) {
                    return Err(StepError::Monotonicity { sub, sup: grp });
                }
                if self.acts(Group::singleton(a)).is_empty() && self.acts(sub) != here {
                    return Err(StepError::SkipAbsorption { group: grp, idle: Group::singleton(a) });
                }
            }
        }
        Ok(())
    }

    /// Smallest sparse assignment whose completion is this step: each group
    /// lists only the actions none of its proper subgroups already perform.
    pub fn sparse(&self) -> Vec<(Group, ActSet)> {
        let full = Group::all(self.agents());
        let mut out = Vec::new();
        for g in 1..=full.0 {
            let grp = Group(g);
            let mut inherited = ActSet::EMPTY;
            for a in grp.agents() {
                let sub = grp.without(a);
                if !sub.is_empty() {
                    inherited = inherited.union(self.acts(sub));
                }
            }
            let own = self.acts(grp).difference(inherited);
            if !own.is_empty() {
                out.push((grp, own));
            }
        }
        out
    }
}

impl fmt::Debug for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.sparse()).finish()
    }
}

/// Enumerates every valid step over `agents` agents and `actions` actions.
///
/// Groups are visited by increasing size. A group with an idle member is
/// forced to equal the group without it; a group whose members are all
/// active may perform any superset of what its maximal subgroups perform.
pub fn enumerate_steps(agents: usize, actions: usize, max_steps: usize) -> Result<Vec<Step>, UniverseError> {
    if agents == 0 || agents > MAX_AGENTS || actions > MAX_ACTIONS {
        return Err(UniverseError::TooLarge { agents, actions, limit: max_steps });
    }
    let full = Group::all(agents);
    let mut groups: Vec<Group> = full.subsets().collect();
    groups.sort_by_key(|g| (g.len(), g.0));
    let all_acts = if actions == 64 { ActSet(u64::MAX) } else { ActSet((1u64 << actions) - 1) };
    let mut acts = alloc::vec![ActSet::EMPTY; full.0 as usize];
    let mut out = Vec::new();

    fn supersets(base: ActSet, all: ActSet) -> impl Iterator<Item = ActSet> {
        let free = all.difference(base).0;
        let mut sub: u64 = 0;
        let mut done = false;
        core::iter::from_fn(move || {
            if done {
                return None;
            }
            let cur = ActSet(base.0 | sub);
            sub = sub.wrapping_sub(free) & free;
            if sub == 0 {
                done = true;
            }
            Some(cur)
        })
    }

    fn go(
        idx: usize,
        groups: &[Group],
        acts: &mut Vec<ActSet>,
        all_acts: ActSet,
        out: &mut Vec<Step>,
        max: usize,
    ) -> Result<(), ()> {
        if idx == groups.len() {
            if out.len() >= max {
                return Err(());
            }
            out.push(Step { acts: acts.clone().into_boxed_slice() });
            return Ok(());
        }
        let g = groups[idx];
        let slot = g.0 as usize - 1;
        if g.len() == 1 {
            for s in supersets(ActSet::EMPTY, all_acts) {
                acts[slot] = s;
                go(idx + 1, groups, acts, all_acts, out, max)?;
            }
            return Ok(());
        }
        let idle = g.agents().find(|&a| acts[Group::singleton(a).0 as usize - 1].is_empty());
        if let Some(a) = idle {
            acts[slot] = acts[g.without(a).0 as usize - 1];
            return go(idx + 1, groups, acts, all_acts, out, max);
        }
        let mut base = ActSet::EMPTY;
        for a in g.agents() {
            base = base.union(acts[g.without(a).0 as usize - 1]);
        }
        for s in supersets(base, all_acts) {
            acts[slot] = s;
            go(idx + 1, groups, acts, all_acts, out, max)?;
        }
        Ok(())
    }

    go(0, &groups, &mut acts, all_acts, &mut out, max_steps)
        .map_err(|()| UniverseError::TooLarge { agents, actions, limit: max_steps })?;
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniverseError {
    /// Exhaustive materialization would exceed the configured bound.
    TooLarge { agents: usize, actions: usize, limit: usize },
    Step(StepError),
}

impl fmt::Display for UniverseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UniverseError::TooLarge { agents, actions, limit } => write!(
                f,
                "step universe over {agents} agents and {actions} actions exceeds the bound of {limit} steps"
            ),
            UniverseError::Step(e) => write!(f, "invalid step: {e}"),
        }
    }
}

/// Bounds on exhaustive step materialization.
#[derive(Clone, Copy, Debug)]
pub struct UniverseLimits {
    pub max_agents: usize,
    pub max_actions: usize,
    pub max_steps: usize,
}

impl Default for UniverseLimits {
    fn default() -> Self {
        UniverseLimits { max_agents: 3, max_actions: 3, max_steps: 1 << 20 }
    }
}

/// An interned, finite set of steps together with the domain that
/// complementation ranges over.
#[derive(Clone, Debug)]
pub struct StepUniverse {
    agents: usize,
    actions: usize,
    steps: Vec<Step>,
    index: BTreeMap<Step, StepId>,
    skip: StepId,
    negation_domain: Vec<StepId>,
}

impl StepUniverse {
    /// Every valid step; complementation ranges over all of them.
    pub fn exhaustive(agents: usize, actions: usize, limits: UniverseLimits) -> Result<StepUniverse, UniverseError> {
        if agents > limits.max_agents || actions > limits.max_actions {
            return Err(UniverseError::TooLarge { agents, actions, limit: limits.max_steps });
        }
        let steps = enumerate_steps(agents, actions, limits.max_steps)?;
        Ok(Self::from_steps(agents, actions, steps))
    }

    /// An explicit universe. The skip step is always added.
    pub fn from_steps<I: IntoIterator<Item = Step>>(agents: usize, actions: usize, steps: I) -> StepUniverse {
        let mut set: BTreeSet<Step> = steps.into_iter().collect();
        set.insert(Step::skip(agents));
        let steps: Vec<Step> = set.into_iter().collect();
        let index = steps.iter().enumerate().map(|(i, s)| (s.clone(), StepId(i as u32))).collect::<BTreeMap<_, _>>();
        let skip = index[&Step::skip(agents)];
        let negation_domain = (0..steps.len() as u32).map(StepId).collect();
        StepUniverse { agents, actions, steps, index, skip, negation_domain }
    }

    /// Restricts complementation to the listed steps.
    pub fn with_negation_domain(mut self, domain: Vec<StepId>) -> StepUniverse {
        self.negation_domain = domain;
        self
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn skip(&self) -> StepId {
        self.skip
    }

    pub fn step(&self, id: StepId) -> &Step {
        &self.steps[id.index()]
    }

    pub fn id_of(&self, s: &Step) -> Option<StepId> {
        self.index.get(s).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = StepId> {
        (0..self.steps.len() as u32).map(StepId)
    }

    pub fn negation_domain(&self) -> &[StepId] {
        &self.negation_domain
    }

    /// Steps in which group `g` performs at least `a`.
    pub fn performing(&self, g: Group, a: ActionId) -> impl Iterator<Item = StepId> + '_ {
        self.ids().filter(move |&id| self.step(id).acts(g).contains(a))
    }
}

/// A finite, non-empty sequence of steps.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct STrace(Vec<StepId>);

impl STrace {
    pub fn new(steps: Vec<StepId>) -> Option<STrace> {
        if steps.is_empty() {
            None
        } else {
            Some(STrace(steps))
        }
    }

    pub fn single(s: StepId) -> STrace {
        STrace(alloc::vec![s])
    }

    pub fn dur(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &STrace) -> STrace {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        STrace(v)
    }

    /// Non-empty prefixes, shortest first, ending with the trace itself.
    pub fn prefixes(&self) -> impl Iterator<Item = &[StepId]> {
        (1..=self.0.len()).map(move |n| &self.0[..n])
    }

    pub fn into_vec(self) -> Vec<StepId> {
        self.0
    }
}

impl Deref for STrace {
    type Target = [StepId];
    fn deref(&self) -> &[StepId] {
        &self.0
    }
}

/// A finite set of s-traces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceSet {
    traces: BTreeSet<STrace>,
}

impl TraceSet {
    pub fn empty() -> TraceSet {
        TraceSet::default()
    }

    pub fn singleton(t: STrace) -> TraceSet {
        let mut s = TraceSet::empty();
        s.insert(t);
        s
    }

    /// Length-one traces, one per step.
    pub fn of_steps<I: IntoIterator<Item = StepId>>(steps: I) -> TraceSet {
        steps.into_iter().map(STrace::single).collect()
    }

    pub fn insert(&mut self, t: STrace) -> bool {
        self.traces.insert(t)
    }

    pub fn contains(&self, t: &[StepId]) -> bool {
        // STrace orders like its inner Vec
        STrace::new(t.to_vec()).is_some_and(|t| self.traces.contains(&t))
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &STrace> {
        self.traces.iter()
    }

    /// Longest member duration; one for the empty set.
    pub fn dur(&self) -> usize {
        self.traces.iter().map(STrace::dur).max().unwrap_or(1)
    }

    pub fn union(&self, other: &TraceSet) -> TraceSet {
        TraceSet { traces: self.traces.union(&other.traces).cloned().collect() }
    }

    pub fn intersection(&self, other: &TraceSet) -> TraceSet {
        TraceSet { traces: self.traces.intersection(&other.traces).cloned().collect() }
    }

    fn has_prefix_of(&self, t: &STrace, proper: bool) -> bool {
        let n = if proper { t.dur() - 1 } else { t.dur() };
        (1..=n).any(|k| self.contains(&t[..k]))
    }
}

impl FromIterator<STrace> for TraceSet {
    fn from_iter<I: IntoIterator<Item = STrace>>(iter: I) -> Self {
        TraceSet { traces: iter.into_iter().collect() }
    }
}

/// `T1 ∘ T2`: pairwise concatenation.
pub fn compose(t1: &TraceSet, t2: &TraceSet) -> TraceSet {
    let mut out = TraceSet::empty();
    for a in t1.iter() {
        for b in t2.iter() {
            out.insert(a.concat(b));
        }
    }
    out
}

/// `T1 ⊓ T2`: a pair contributes its longer member when one is a prefix of
/// the other.
pub fn sync(t1: &TraceSet, t2: &TraceSet) -> TraceSet {
    let mut out = TraceSet::empty();
    for a in t1.iter() {
        if t2.has_prefix_of(a, false) {
            out.insert(a.clone());
        }
    }
    for b in t2.iter() {
        if t1.has_prefix_of(b, false) {
            out.insert(b.clone());
        }
    }
    out
}

/// `T1 ⊔ T2`: the union minus every trace of one operand only that extends
/// a distinct member of the other. Traces both operands contain are kept,
/// which makes the operator idempotent. Single pass, no fixpoint iteration.
pub fn choice(t1: &TraceSet, t2: &TraceSet) -> TraceSet {
    let mut out = t1.union(t2);
    let mut superfluous = Vec::new();
    for a in t1.iter() {
        if !t2.contains(a) && t2.has_prefix_of(a, true) {
            superfluous.push(a.clone());
        }
    }
    for b in t2.iter() {
        if !t1.contains(b) && t1.has_prefix_of(b, true) {
            superfluous.push(b.clone());
        }
    }
    for t in superfluous {
        out.traces.remove(&t);
    }
    out
}

/// `T̃`: for the empty set, every single step of the negation domain;
/// otherwise the intersection of the per-trace negations, where a trace's
/// negation agrees with it up to some position and then takes a different
/// step.
pub fn negate(t: &TraceSet, universe: &StepUniverse) -> TraceSet {
    let domain = universe.negation_domain();
    let mut iter = t.iter();
    let Some(first) = iter.next() else {
        return TraceSet::of_steps(domain.iter().copied());
    };
    let mut out = TraceSet::empty();
    for n in 1..=first.dur() {
        for &s in domain {
            if s != first[n - 1] {
                let mut v = first[..n - 1].to_vec();
                v.push(s);
                out.insert(STrace(v));
            }
        }
    }
    let rest: Vec<&STrace> = iter.collect();
    out.traces.retain(|u| rest.iter().all(|t| in_trace_negation(u, t)));
    out
}

fn in_trace_negation(u: &STrace, t: &STrace) -> bool {
    let n = u.dur();
    n <= t.dur() && u[..n - 1] == t[..n - 1] && u[n - 1] != t[n - 1]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventError {
    UnknownAgent(Group),
    UnknownAction(ActionId),
    EmptyGroup,
    /// Role actors and achieving actions depend on a model world and have no
    /// universe-level denotation.
    Unresolved(&'static str),
}

impl fmt::Display for EventError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventError::UnknownAgent(g) => write!(f, "group {g:?} mentions an undeclared agent"),
            EventError::UnknownAction(a) => write!(f, "action #{} is not declared", a.0),
            EventError::EmptyGroup => f.write_str("an event needs a non-empty group of agents"),
            EventError::Unresolved(what) => write!(f, "{what} can only be interpreted at a model world"),
        }
    }
}

/// `⟦ξ⟧` over a materialized universe.
pub fn interpret_event(e: &EventExpr, u: &StepUniverse) -> Result<TraceSet, EventError> {
    Ok(match e {
        EventExpr::Do(Actor::Group(g), a) => interpret_collective(*g, a, u)?,
        EventExpr::Do(Actor::Role(_), _) => return Err(EventError::Unresolved("a role actor")),
        EventExpr::Skip => TraceSet::singleton(STrace::single(u.skip())),
        EventExpr::Neg(x) => negate(&interpret_event(x, u)?, u),
        EventExpr::Seq(a, b) => compose(&interpret_event(a, u)?, &interpret_event(b, u)?),
        EventExpr::Choice(a, b) => choice(&interpret_event(a, u)?, &interpret_event(b, u)?),
        EventExpr::Par(a, b) => sync(&interpret_event(a, u)?, &interpret_event(b, u)?),
    })
}

/// `⟦A:α⟧`: a composite action distributes over every cover `A' ∪ A'' = A`,
/// without fixing which sub-coalition performs which part.
pub fn interpret_collective(g: Group, a: &ActionExpr, u: &StepUniverse) -> Result<TraceSet, EventError> {
    if g.is_empty() {
        return Err(EventError::EmptyGroup);
    }
    if !g.is_subset(Group::all(u.agents())) {
        return Err(EventError::UnknownAgent(g));
    }
    Ok(match a {
        ActionExpr::Atom(act) => {
            if act.index() >= u.actions() {
                return Err(EventError::UnknownAction(*act));
            }
            TraceSet::of_steps(u.performing(g, *act))
        }
        ActionExpr::Skip => TraceSet::singleton(STrace::single(u.skip())),
        ActionExpr::Neg(x) => negate(&interpret_collective(g, x, u)?, u),
        ActionExpr::Achieving(_) => return Err(EventError::Unresolved("an achieving action")),
        ActionExpr::Seq(x, y) | ActionExpr::Choice(x, y) | ActionExpr::Par(x, y) => {
            let mut out = TraceSet::empty();
            for (l, r) in g.covers() {
                let tl = interpret_collective(l, x, u)?;
                let tr = interpret_collective(r, y, u)?;
                let part = match a {
                    ActionExpr::Seq(..) => compose(&tl, &tr),
                    ActionExpr::Choice(..) => choice(&tl, &tr),
                    _ => sync(&tl, &tr),
                };
                out = out.union(&part);
            }
            out
        }
    })
}
