//! Social practices: the practice record, plan patterns and their concrete
//! executions (`Δ`), the feasible / normative / complete properties, the
//! plan-pattern check, and generalization over instances.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{boxed::Box, format};
use core::fmt;

use crate::checker::{EvalError, EvalResult, Evaluator};
use crate::ids::{ActSet, AgentId, ContextId, Group, ObjectId, RoleId, StepId, WorldId};
use crate::model::{Kind, KripkeModel};
use crate::syntax::{ActionExpr, Actor, Assertion, CountsAs, DeonticKind, EventExpr, Norm, Strategy, ValueLink};

/// Default bound on the length of executions searched for `Δ`.
pub const DEFAULT_DEPTH: usize = 12;

/// A plan pattern: abstract actions paired with the goal they serve.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlanPattern {
    Leaf { event: EventExpr, goal: Assertion },
    Seq(Box<PlanPattern>, Box<PlanPattern>),
    Choice(Box<PlanPattern>, Box<PlanPattern>),
    Par(Box<PlanPattern>, Box<PlanPattern>),
}

impl PlanPattern {
    pub fn leaf(event: EventExpr, goal: Assertion) -> PlanPattern {
        PlanPattern::Leaf { event, goal }
    }

    pub fn seq(a: PlanPattern, b: PlanPattern) -> PlanPattern {
        PlanPattern::Seq(Box::new(a), Box::new(b))
    }

    pub fn choice(a: PlanPattern, b: PlanPattern) -> PlanPattern {
        PlanPattern::Choice(Box::new(a), Box::new(b))
    }

    pub fn par(a: PlanPattern, b: PlanPattern) -> PlanPattern {
        PlanPattern::Par(Box::new(a), Box::new(b))
    }

    /// The whole pattern read as one event.
    pub fn event(&self) -> EventExpr {
        match self {
            PlanPattern::Leaf { event, .. } => event.clone(),
            PlanPattern::Seq(a, b) => EventExpr::seq(a.event(), b.event()),
            PlanPattern::Choice(a, b) => EventExpr::choice(a.event(), b.event()),
            PlanPattern::Par(a, b) => EventExpr::par(a.event(), b.event()),
        }
    }

    /// The goal reached when the pattern completes.
    pub fn goal(&self) -> Assertion {
        match self {
            PlanPattern::Leaf { goal, .. } => goal.clone(),
            PlanPattern::Seq(_, b) => b.goal(),
            PlanPattern::Choice(a, b) => Assertion::or(a.goal(), b.goal()),
            PlanPattern::Par(a, b) => Assertion::and(a.goal(), b.goal()),
        }
    }

    /// `st(γφ)`: the first part of a sequence, otherwise the pattern itself.
    pub fn start(&self) -> &PlanPattern {
        match self {
            PlanPattern::Seq(a, _) => a.start(),
            other => other,
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<(&EventExpr, &Assertion)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a EventExpr, &'a Assertion)>) {
        match self {
            PlanPattern::Leaf { event, goal } => out.push((event, goal)),
            PlanPattern::Seq(a, b) | PlanPattern::Choice(a, b) | PlanPattern::Par(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    /// Every sequential pair `(γ1φ1, γ2φ2)` occurring in the pattern.
    pub fn sequential_pairs(&self) -> Vec<(&PlanPattern, &PlanPattern)> {
        let mut out = Vec::new();
        self.collect_pairs(&mut out);
        out
    }

    fn collect_pairs<'a>(&'a self, out: &mut Vec<(&'a PlanPattern, &'a PlanPattern)>) {
        match self {
            PlanPattern::Leaf { .. } => {}
            PlanPattern::Seq(a, b) => {
                out.push((a, b));
                a.collect_pairs(out);
                b.collect_pairs(out);
            }
            PlanPattern::Choice(a, b) | PlanPattern::Par(a, b) => {
                a.collect_pairs(out);
                b.collect_pairs(out);
            }
        }
    }

    /// Linear phase sequences, one per way of resolving the choices. A
    /// parallel composition is a single phase.
    pub fn branches(&self) -> Vec<Vec<Phase>> {
        self.branches_from(0).0
    }

    fn branches_from(&self, first_leaf: usize) -> (Vec<Vec<Phase>>, usize) {
        match self {
            PlanPattern::Leaf { event, goal } => (
                alloc::vec![alloc::vec![Phase { event: event.clone(), goal: goal.clone(), leaves: alloc::vec![first_leaf] }]],
                first_leaf + 1,
            ),
            PlanPattern::Seq(a, b) => {
                let (ba, next) = a.branches_from(first_leaf);
                let (bb, next) = b.branches_from(next);
                let mut out = Vec::new();
                for x in &ba {
                    for y in &bb {
                        let mut v = x.clone();
                        v.extend(y.iter().cloned());
                        out.push(v);
                    }
                }
                (out, next)
            }
            PlanPattern::Choice(a, b) => {
                let (mut ba, next) = a.branches_from(first_leaf);
                let (bb, next) = b.branches_from(next);
                ba.extend(bb);
                (ba, next)
            }
            PlanPattern::Par(a, b) => {
                let n = a.leaves().len() + b.leaves().len();
                let phase = Phase {
                    event: self.event(),
                    goal: self.goal(),
                    leaves: (first_leaf..first_leaf + n).collect(),
                };
                (alloc::vec![alloc::vec![phase]], first_leaf + n)
            }
        }
    }
}

/// One segment of a branch: an event and the goal that must hold after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase {
    pub event: EventExpr,
    pub goal: Assertion,
    /// Indices of the pattern leaves this phase stands for.
    pub leaves: Vec<usize>,
}

/// A branch of one of the practice's plan patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub pattern: usize,
    pub phases: Vec<Phase>,
}

/// The fifteen-part practice record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocialPractice {
    pub name: String,
    /// The context whose worlds make up the practice interval.
    pub context: ContextId,
    pub roles: BTreeSet<RoleId>,
    pub actors: Group,
    pub resources: BTreeSet<ObjectId>,
    pub affordances: Vec<(BTreeSet<ObjectId>, ActionExpr)>,
    pub places: Vec<String>,
    pub purpose: Vec<Assertion>,
    pub promotes: Vec<ValueLink>,
    pub counts_as: Vec<CountsAs>,
    pub plan_patterns: Vec<PlanPattern>,
    pub norms: Vec<Norm>,
    pub strategies: Vec<Strategy>,
    pub start: Assertion,
    pub end: Assertion,
    /// `Ac`: possible actions. Empty means every declared action.
    pub actions: ActSet,
    pub requirements: BTreeMap<RoleId, ActSet>,
}

impl SocialPractice {
    /// An empty record over a context; SC and EC default to `false`.
    pub fn new(name: &str, context: ContextId) -> SocialPractice {
        SocialPractice {
            name: name.into(),
            context,
            roles: BTreeSet::new(),
            actors: Group::EMPTY,
            resources: BTreeSet::new(),
            affordances: Vec::new(),
            places: Vec::new(),
            purpose: Vec::new(),
            promotes: Vec::new(),
            counts_as: Vec::new(),
            plan_patterns: Vec::new(),
            norms: Vec::new(),
            strategies: Vec::new(),
            start: Assertion::False,
            end: Assertion::False,
            actions: ActSet::EMPTY,
            requirements: BTreeMap::new(),
        }
    }

    /// Every branch of every plan pattern, in declaration order.
    pub fn branches(&self) -> Vec<Branch> {
        self.plan_patterns
            .iter()
            .enumerate()
            .flat_map(|(i, pp)| pp.branches().into_iter().map(move |phases| Branch { pattern: i, phases }))
            .collect()
    }

    /// `conj(P_sp)`.
    pub fn purpose_goal(&self) -> Assertion {
        Assertion::conjunction(self.purpose.iter().cloned())
    }

    /// Record invariants: referenced roles are declared, possible actions
    /// exist in the model, and the actors are model agents.
    pub fn check(&self, m: &KripkeModel) -> Vec<String> {
        let mut out = Vec::new();
        let mut role_ok = |r: RoleId, place: &str| {
            if !self.roles.contains(&r) {
                out.push(format!("{place} mentions role `{}` outside the practice roles", m.role_name(r)));
            }
        };
        for n in &self.norms {
            role_ok(n.role, "a norm");
        }
        for s in &self.strategies {
            if let Actor::Role(r) = s.actors {
                role_ok(r, "a strategy");
            }
        }
        for r in self.requirements.keys() {
            role_ok(*r, "a requirement");
        }
        for c in &self.counts_as {
            role_ok(c.role, "a counts-as rule");
        }
        let all = Group::all(m.agent_count());
        if !self.actors.is_subset(all) {
            out.push("actors include undeclared agents".into());
        }
        for n in &self.norms {
            if n.kind != DeonticKind::Permission && n.sanction.is_some() && n.sanction_violation.is_none() {
                out.push("a sanctioned norm lacks a sanction violation atom".into());
            }
        }
        out
    }
}

/// One execution in `Δ_sp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaEntry {
    pub start: WorldId,
    pub steps: Vec<StepId>,
    /// `steps.len() + 1` worlds, starting with `start`.
    pub worlds: Vec<WorldId>,
    /// Index into [`SocialPractice::branches`]; `None` only for the empty
    /// execution at a world already satisfying the end condition.
    pub branch: Option<usize>,
    /// End position of each phase segment.
    pub cuts: Vec<usize>,
}

impl DeltaEntry {
    pub fn end(&self) -> WorldId {
        *self.worlds.last().expect("non-empty")
    }
}

/// Worlds satisfying the practice's start condition.
pub fn start_worlds(ev: &mut Evaluator<'_>, sp: &SocialPractice) -> EvalResult<Vec<WorldId>> {
    let m = ev.model();
    let mut out = Vec::new();
    for w in m.worlds() {
        if ev.eval(&sp.start, w)? {
            out.push(w);
        }
    }
    Ok(out)
}

fn conform(
    ev: &mut Evaluator<'_>,
    phases: &[Phase],
    steps: &[StepId],
    w: WorldId,
    pos: usize,
    cuts: &mut Vec<usize>,
) -> EvalResult<bool> {
    let Some((phase, rest)) = phases.split_first() else {
        return Ok(pos == steps.len());
    };
    let den = ev.denotation(&phase.event, w)?;
    for k in pos + 1..=steps.len() {
        if !den.contains(&steps[pos..k]) {
            continue;
        }
        let v = ev.model().run(w, &steps[pos..k]).expect("executable");
        if !ev.eval(&phase.goal, v)? {
            continue;
        }
        cuts.push(k);
        if conform(ev, rest, steps, v, k, cuts)? {
            return Ok(true);
        }
        cuts.pop();
    }
    Ok(false)
}

/// `Δ_sp`: executions of length at most `depth` over non-idle transitions
/// that start in an SC-world, realize a plan-pattern branch (each segment is
/// an execution of its phase event and reaches the phase goal), and lead
/// into the end condition from every SC-world where they are executable.
/// Sorted by length, then start world, then steps.
pub fn delta_set(ev: &mut Evaluator<'_>, sp: &SocialPractice, depth: usize) -> EvalResult<Vec<DeltaEntry>> {
    let m = ev.model();
    let sc = start_worlds(ev, sp)?;
    let branches = sp.branches();
    let mut out = Vec::new();
    let limit = ev.options().max_traces;
    let mut explored = 0usize;
    for &w0 in &sc {
        let mut stack: Vec<(Vec<StepId>, Vec<WorldId>)> = alloc::vec![(Vec::new(), alloc::vec![w0])];
        while let Some((steps, worlds)) = stack.pop() {
            explored += 1;
            if explored > limit {
                return Err(EvalError::BoundExceeded(format!("more than {limit} executions explored for Δ")));
            }
            let last = *worlds.last().expect("non-empty");
            if steps.len() < depth {
                for (s, u) in m.active_transitions(last) {
                    let mut s2 = steps.clone();
                    s2.push(s);
                    let mut w2 = worlds.clone();
                    w2.push(u);
                    stack.push((s2, w2));
                }
            }
            if !ev.eval(&sp.end, last)? {
                continue;
            }
            let mut universal = true;
            for &w in &sc {
                if let Some(u) = m.run(w, &steps) {
                    if !ev.eval(&sp.end, u)? {
                        universal = false;
                        break;
                    }
                }
            }
            if !universal {
                continue;
            }
            if steps.is_empty() {
                out.push(DeltaEntry { start: w0, steps, worlds, branch: None, cuts: Vec::new() });
                continue;
            }
            for (bi, b) in branches.iter().enumerate() {
                let mut cuts = Vec::new();
                if conform(ev, &b.phases, &steps, w0, 0, &mut cuts)? {
                    out.push(DeltaEntry { start: w0, steps: steps.clone(), worlds: worlds.clone(), branch: Some(bi), cuts });
                    break;
                }
            }
        }
    }
    out.sort_by(|a, b| (a.steps.len(), a.start, &a.steps).cmp(&(b.steps.len(), b.start, &b.steps)));
    Ok(out)
}

/// Verdict of a property check with its witness execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<DeltaEntry>,
    /// Human-readable reasons for a negative verdict.
    pub notes: Vec<String>,
}

impl Verdict {
    fn no(notes: Vec<String>) -> Verdict {
        Verdict { holds: false, witness: None, notes }
    }
}

/// Whether every action along the execution can be performed, at the world
/// where it fires, by some practice actor that is able to (`G_a α`).
pub fn entry_is_feasible(ev: &mut Evaluator<'_>, sp: &SocialPractice, e: &DeltaEntry) -> EvalResult<Option<String>> {
    let m = ev.model();
    for (i, &s) in e.steps.iter().enumerate() {
        let w = e.worlds[i];
        for b in m.step(s).all_acts().actions() {
            if ev.able_agents(b, w)?.intersection(sp.actors).is_empty() {
                return Ok(Some(format!(
                    "no practice actor is able to `{}` at `{}`",
                    m.action_name(b),
                    m.world_name(w)
                )));
            }
        }
    }
    Ok(None)
}

fn feasible_entries(ev: &mut Evaluator<'_>, sp: &SocialPractice) -> EvalResult<(Vec<DeltaEntry>, Vec<String>)> {
    let delta = ev.delta(sp.context)?;
    let mut ok = Vec::new();
    let mut notes = Vec::new();
    for e in delta.iter().filter(|e| e.branch.is_some()) {
        match entry_is_feasible(ev, sp, e)? {
            None => ok.push(e.clone()),
            Some(n) => notes.push(n),
        }
    }
    if delta.iter().all(|e| e.branch.is_none()) {
        notes.push("no execution realizes a plan pattern from the start to the end condition".into());
    }
    Ok((ok, notes))
}

/// `feasible(sp)`.
pub fn feasible(ev: &mut Evaluator<'_>, sp: &SocialPractice) -> EvalResult<Verdict> {
    let (entries, mut notes) = feasible_entries(ev, sp)?;
    match entries.into_iter().next() {
        Some(w) => Ok(Verdict { holds: true, witness: Some(w), notes: Vec::new() }),
        None => {
            notes.dedup();
            Ok(Verdict::no(notes))
        }
    }
}

/// The first norm breach along an execution, if any: an addressee performs
/// a prohibited action, or fails to start an obliged one at a non-final
/// world.
pub fn norm_breach(ev: &mut Evaluator<'_>, sp: &SocialPractice, e: &DeltaEntry) -> EvalResult<Option<String>> {
    let m = ev.model();
    for i in 0..e.steps.len() {
        let w = e.worlds[i];
        for n in &sp.norms {
            if n.kind == DeonticKind::Permission {
                continue;
            }
            let bound = ev.norm_addressees(n, w)?;
            for a in bound.agents() {
                let den = ev.denotation(&EventExpr::agent(a, n.action.clone()), w)?;
                let performed = (i + 1..=e.steps.len()).any(|k| den.contains(&e.steps[i..k]));
                let breach = match n.kind {
                    DeonticKind::Prohibition => performed,
                    _ => !performed,
                };
                if breach {
                    let what = if n.kind == DeonticKind::Prohibition { "performs a prohibited" } else { "omits an obliged" };
                    return Ok(Some(format!(
                        "`{}` {what} action at `{}` (norm on role `{}`)",
                        m.agent_name(a),
                        m.world_name(w),
                        m.role_name(n.role)
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// `normative(sp)`: feasible, and some feasible execution breaks no active
/// norm.
pub fn normative(ev: &mut Evaluator<'_>, sp: &SocialPractice) -> EvalResult<Verdict> {
    let (entries, mut notes) = feasible_entries(ev, sp)?;
    if entries.is_empty() {
        notes.insert(0, "not feasible".into());
        return Ok(Verdict::no(notes));
    }
    let mut breaches = Vec::new();
    for e in entries {
        match norm_breach(ev, sp, &e)? {
            None => return Ok(Verdict { holds: true, witness: Some(e), notes: Vec::new() }),
            Some(b) => breaches.push(b),
        }
    }
    breaches.dedup();
    Ok(Verdict::no(breaches))
}

fn is_social(m: &KripkeModel, f: &Assertion) -> bool {
    let atoms = f.atoms();
    !atoms.is_empty() && atoms.iter().all(|&p| m.atom_kind(p) == Kind::Social)
}

/// Social goal conjuncts of the entry's branch that neither a social action
/// of their phase nor a counts-as rule of the practice accounts for.
pub fn unexplained_social_goals(
    ev: &mut Evaluator<'_>,
    sp: &SocialPractice,
    e: &DeltaEntry,
) -> EvalResult<Vec<(usize, Assertion)>> {
    let m = ev.model();
    let branches = sp.branches();
    let Some(b) = e.branch.map(|i| &branches[i]) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let mut seg_start = 0;
    for (j, phase) in b.phases.iter().enumerate() {
        let ws = e.worlds[seg_start];
        for conj in phase.goal.conjuncts() {
            if !is_social(m, conj) {
                continue;
            }
            let has_social_action =
                phase.event.performances().iter().any(|(_, act)| m.action_kind(*act) == Kind::Social);
            let direct = has_social_action && ev.eval(&Assertion::boxed(phase.event.clone(), conj.clone()), ws)?;
            if direct || explained_by_counts_as(ev, sp, e, conj)? {
                continue;
            }
            out.push((phase.leaves[0], conj.clone()));
        }
        seg_start = e.cuts[j];
    }
    Ok(out)
}

fn explained_by_counts_as(
    ev: &mut Evaluator<'_>,
    sp: &SocialPractice,
    e: &DeltaEntry,
    goal: &Assertion,
) -> EvalResult<bool> {
    let m = ev.model();
    for (k, &s) in e.steps.iter().enumerate() {
        let w = e.worlds[k];
        let step = m.step(s);
        for a in m.agents() {
            for act in step.acts(Group::singleton(a)).actions() {
                if m.action_kind(act) != Kind::Physical {
                    continue;
                }
                for rule in &sp.counts_as {
                    if rule.performed != ActionExpr::Atom(act) || !m.enacts_in(a, rule.role, rule.context, w) {
                        continue;
                    }
                    if !ev.eval(&Assertion::CountsAs(Box::new(rule.clone())), w)? {
                        continue;
                    }
                    let eff = Assertion::boxed(EventExpr::agent(a, rule.performed.clone()), goal.clone());
                    if ev.eval(&eff, w)? {
                        return Ok(true);
                    }
                }
            }
        }
    }
    Ok(false)
}

fn social_goals(m: &KripkeModel, b: &Branch) -> Vec<(usize, Assertion)> {
    b.phases
        .iter()
        .flat_map(|p| p.goal.conjuncts().into_iter().filter(|c| is_social(m, c)).map(move |c| (p.leaves[0], c.clone())))
        .collect()
}

/// `complete(sp)`: feasible, and every social leaf goal of the plan patterns
/// is, along some feasible execution of a branch containing the leaf, a
/// direct effect of a social action of its phase or the effect of a physical
/// action that counts as a social one.
pub fn complete(ev: &mut Evaluator<'_>, sp: &SocialPractice) -> EvalResult<Verdict> {
    let (entries, mut notes) = feasible_entries(ev, sp)?;
    if entries.is_empty() {
        notes.insert(0, "not feasible".into());
        return Ok(Verdict::no(notes));
    }
    let m = ev.model();
    let branches = sp.branches();
    let mut needed: BTreeSet<(usize, Assertion)> = BTreeSet::new();
    for b in &branches {
        needed.extend(social_goals(m, b));
    }
    let mut explained = BTreeSet::new();
    let mut witness = None;
    for e in entries {
        let b = &branches[e.branch.expect("feasible entries realize a branch")];
        let gaps = unexplained_social_goals(ev, sp, &e)?;
        if gaps.is_empty() && witness.is_none() {
            witness = Some(e.clone());
        }
        explained.extend(social_goals(m, b).into_iter().filter(|g| !gaps.contains(g)));
    }
    let missing: Vec<_> = needed.difference(&explained).collect();
    if missing.is_empty() {
        return Ok(Verdict { holds: true, witness, notes: Vec::new() });
    }
    let notes = missing
        .into_iter()
        .map(|(leaf, g)| {
            let names: Vec<&str> = g.atoms().into_iter().map(|p| m.atom_name(p)).collect();
            format!("social goal {names:?} of leaf {} has no direct or counts-as source", leaf + 1)
        })
        .collect();
    Ok(Verdict::no(notes))
}

/// Result of checking one plan pattern against the practice.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PlanPatternReport {
    pub in_delta: bool,
    pub practice_purpose: bool,
    /// Per leaf (in pattern order): whether its purpose holds.
    pub leaf_purposes: Vec<bool>,
    pub start_strategy: bool,
    /// Per sequential pair: whether the linking strategy holds.
    pub linking: Vec<bool>,
    /// Leaves whose goal their action never reaches at any practice world.
    pub failing_leaves: Vec<usize>,
}

impl PlanPatternReport {
    pub fn holds(&self) -> bool {
        self.in_delta
            && self.practice_purpose
            && self.leaf_purposes.iter().all(|&b| b)
            && self.start_strategy
            && self.linking.iter().all(|&b| b)
            && self.failing_leaves.is_empty()
    }
}

/// Purpose of a plan-pattern leaf: each basic action of the leaf is done,
/// by some actor able to resolve it, for the leaf goal, and the leaf event
/// is believed to reach it.
pub fn leaf_purpose(ev: &Evaluator<'_>, sp: &SocialPractice, event: &EventExpr, goal: &Assertion, w: WorldId) -> Assertion {
    let m = ev.model();
    let c = sp.context;
    let actors = sp.actors;
    let clause = |a: AgentId, b| {
        let ante = Assertion::and(
            Assertion::Salient(Actor::Group(actors), ActionExpr::Skip, c),
            Assertion::Do(EventExpr::agent(a, ActionExpr::Atom(b))),
        );
        let cons = Assertion::and(
            Assertion::goal(a, goal.clone()),
            Assertion::belief(a, Assertion::boxed(event.clone(), goal.clone())),
        );
        Assertion::common_belief(actors, Assertion::implies(ante, cons))
    };
    Assertion::conjunction(event.performances().into_iter().map(|(actor, b)| {
        let who = match actor {
            Actor::Group(g) => g,
            Actor::Role(r) => m.agents().filter(|&a| ev.play_in(a, r, c, w)).fold(Group::EMPTY, Group::with),
        };
        if who.is_empty() {
            return Assertion::True;
        }
        Assertion::disjunction(who.agents().map(|a| clause(a, b)))
    }))
}

/// `planpattern(γφ, sp)` for the practice's `index`-th pattern.
pub fn check_planpattern(ev: &mut Evaluator<'_>, sp: &SocialPractice, index: usize) -> EvalResult<PlanPatternReport> {
    let pp = sp
        .plan_patterns
        .get(index)
        .ok_or_else(|| EvalError::Practice(format!("practice `{}` has no plan pattern #{}", sp.name, index + 1)))?;
    let m = ev.model();
    let mut r = PlanPatternReport::default();
    let delta = ev.delta(sp.context)?;
    let branches = sp.branches();
    r.in_delta = delta.iter().any(|e| e.branch.is_some_and(|b| branches[b].pattern == index));

    let sc = start_worlds(ev, sp)?;
    let purpose = Assertion::Purpose(Box::new(crate::syntax::Purpose::Practice {
        practice: sp.context,
        goal: sp.purpose_goal(),
    }));
    r.practice_purpose = true;
    for &w in &sc {
        if !ev.eval(&purpose, w)? {
            r.practice_purpose = false;
        }
    }

    let worlds: Vec<WorldId> = m.context(sp.context).worlds.iter().copied().collect();
    for (i, (event, goal)) in pp.leaves().into_iter().enumerate() {
        let mut ok = true;
        let mut reached = false;
        for &w in &worlds {
            let f = leaf_purpose(ev, sp, event, goal, w);
            if !ev.eval(&f, w)? {
                ok = false;
            }
            if ev.eval(&Assertion::diamond(event.clone(), goal.clone()), w)? {
                reached = true;
            }
        }
        r.leaf_purposes.push(ok);
        if !reached {
            r.failing_leaves.push(i);
        }
    }

    let everyone = Actor::Group(sp.actors);
    let first = pp.start().event();
    r.start_strategy = true;
    for &w in &sc {
        if !ev.strategy_event(&everyone, &sp.start, &first, false, sp.context, w)? {
            r.start_strategy = false;
        }
    }
    for (a, b) in pp.sequential_pairs() {
        let cond = Assertion::Done(a.event());
        let mut ok = true;
        for &w in &worlds {
            if !ev.strategy_event(&everyone, &cond, &b.event(), false, sp.context, w)? {
                ok = false;
                break;
            }
        }
        r.linking.push(ok);
    }
    Ok(r)
}

/// `strategy(φ, DO(B:γ), sp)` at `w`.
pub fn check_strategy(ev: &mut Evaluator<'_>, s: &Strategy, sp: &SocialPractice, w: WorldId) -> EvalResult<bool> {
    ev.strategy(s, sp.context, w)
}

/// The first violated generalization condition (numbered 1 to 12).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionFailure {
    pub condition: u8,
    pub witness: String,
}

impl fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} fails: {}", self.condition, self.witness)
    }
}

fn plays_somewhere(m: &KripkeModel, a: AgentId, r: RoleId, c: ContextId) -> bool {
    let ctx = m.context(c);
    ctx.roles.contains(&r) && ctx.worlds.iter().any(|&w| m.enacts_in(a, r, c, w))
}

fn union_keep_order<T: Clone + Ord>(sets: impl Iterator<Item = Vec<T>>) -> Vec<T> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for v in sets {
        for x in v {
            if seen.insert(x.clone()) {
                out.push(x);
            }
        }
    }
    out
}

fn intersection<T: Clone + Ord>(sets: &[BTreeSet<T>]) -> BTreeSet<T> {
    let mut it = sets.iter();
    let Some(first) = it.next() else { return BTreeSet::new() };
    it.fold(first.clone(), |acc, s| acc.intersection(s).cloned().collect())
}

fn as_set<T: Clone + Ord>(v: &[T]) -> BTreeSet<T> {
    v.iter().cloned().collect()
}

/// Builds the practice based on `instances`, checking the twelve conditions
/// in order. The result takes the name given and the first instance's
/// context.
pub fn generalize(m: &KripkeModel, instances: &[SocialPractice], name: &str) -> Result<SocialPractice, ConditionFailure> {
    let fail = |condition: u8, witness: String| Err(ConditionFailure { condition, witness });
    let Some(first) = instances.first() else {
        return fail(1, "no instances given".into());
    };

    // 1. same roles; a role enacted in one instance is enacted in all
    for sp in instances {
        if sp.roles != first.roles {
            return fail(1, format!("`{}` and `{}` declare different roles", first.name, sp.name));
        }
    }
    for si in instances {
        for &r in &si.roles {
            if !si.actors.agents().any(|a| plays_somewhere(m, a, r, si.context)) {
                continue;
            }
            for sj in instances {
                if !sj.actors.agents().any(|a| plays_somewhere(m, a, r, sj.context)) {
                    return fail(
                        1,
                        format!("role `{}` is played in `{}` but by nobody in `{}`", m.role_name(r), si.name, sj.name),
                    );
                }
            }
        }
    }

    // 2. every afforded action is afforded, by some objects, in all instances
    for si in instances {
        for (_, act) in &si.affordances {
            for sj in instances {
                if !sj.affordances.iter().any(|(_, b)| b == act) {
                    return fail(2, format!("an action afforded in `{}` is afforded by nothing in `{}`", si.name, sj.name));
                }
            }
        }
    }
    let affordances = union_keep_order(instances.iter().map(|s| s.affordances.clone()));

    // 3-5. unions with a common core
    let purposes: Vec<BTreeSet<Assertion>> = instances.iter().map(|s| as_set(&s.purpose)).collect();
    if intersection(&purposes).is_empty() {
        return fail(3, "the instances share no purpose".into());
    }
    // value links and counts-as rules name their own context; compare them
    // as if stated for the first instance's context
    let home = first.context;
    let links = |s: &SocialPractice| -> Vec<ValueLink> {
        s.promotes.iter().map(|v| ValueLink { practice: home, ..v.clone() }).collect()
    };
    let rules = |s: &SocialPractice| -> Vec<CountsAs> {
        s.counts_as.iter().map(|c| CountsAs { context: home, ..c.clone() }).collect()
    };
    let promotes: Vec<BTreeSet<ValueLink>> = instances.iter().map(|s| as_set(&links(s))).collect();
    if promotes.iter().any(|s| !s.is_empty()) && intersection(&promotes).is_empty() {
        return fail(4, "the instances share no promoted value".into());
    }
    let counts: Vec<BTreeSet<CountsAs>> = instances.iter().map(|s| as_set(&rules(s))).collect();
    if counts.iter().any(|s| !s.is_empty()) && intersection(&counts).is_empty() {
        return fail(5, "the instances share no counts-as rule".into());
    }

    // 6-8. identical expectations
    for sp in instances {
        if as_set(&sp.plan_patterns) != as_set(&first.plan_patterns) {
            return fail(6, format!("`{}` and `{}` have different plan patterns", first.name, sp.name));
        }
    }
    for sp in instances {
        if as_set(&sp.norms) != as_set(&first.norms) {
            return fail(7, format!("`{}` and `{}` have different norms", first.name, sp.name));
        }
    }
    for sp in instances {
        if as_set(&sp.strategies) != as_set(&first.strategies) {
            return fail(8, format!("`{}` and `{}` have different strategies", first.name, sp.name));
        }
    }

    // 9-10. disjunctions, 11. union
    let start = Assertion::disjunction(union_keep_order(instances.iter().map(|s| alloc::vec![s.start.clone()])));
    let end = Assertion::disjunction(union_keep_order(instances.iter().map(|s| alloc::vec![s.end.clone()])));
    let actions = instances.iter().fold(ActSet::EMPTY, |acc, s| acc.union(s.actions));

    // 12. identical requirements
    for sp in instances {
        if sp.requirements != first.requirements {
            return fail(12, format!("`{}` and `{}` have different requirements", first.name, sp.name));
        }
    }

    Ok(SocialPractice {
        name: name.into(),
        context: first.context,
        roles: first.roles.clone(),
        actors: instances.iter().fold(Group::EMPTY, |g, s| g.union(s.actors)),
        resources: instances.iter().flat_map(|s| s.resources.iter().copied()).collect(),
        affordances,
        places: union_keep_order(instances.iter().map(|s| s.places.clone())),
        purpose: union_keep_order(instances.iter().map(|s| s.purpose.clone())),
        promotes: union_keep_order(instances.iter().map(links)),
        counts_as: union_keep_order(instances.iter().map(rules)),
        plan_patterns: first.plan_patterns.clone(),
        norms: first.norms.clone(),
        strategies: first.strategies.clone(),
        start,
        end,
        actions,
        requirements: first.requirements.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::{ActionId, AtomId};

    fn leaf(a: u16, p: u32) -> PlanPattern {
        PlanPattern::leaf(EventExpr::agent(AgentId(0), ActionExpr::Atom(ActionId(a))), Assertion::Atom(AtomId(p)))
    }

    #[test]
    fn branches_of_choice_inside_sequence() {
        // γ1;((γ2;γ3;γ4)+γ5)
        let tail = PlanPattern::seq(leaf(1, 1), PlanPattern::seq(leaf(2, 2), leaf(3, 3)));
        let pp = PlanPattern::seq(leaf(0, 0), PlanPattern::choice(tail, leaf(4, 3)));
        let br = pp.branches();
        assert_eq!(br.len(), 2);
        assert_eq!(br[0].len(), 4);
        assert_eq!(br[1].len(), 2);
        assert_eq!(br[1][1].leaves, alloc::vec![4]);
        assert_eq!(pp.leaves().len(), 5);
        assert_eq!(pp.sequential_pairs().len(), 3);
        assert_eq!(pp.start(), &leaf(0, 0));
    }

    #[test]
    fn parallel_is_one_phase() {
        let pp = PlanPattern::par(leaf(0, 0), leaf(1, 1));
        let br = pp.branches();
        assert_eq!(br.len(), 1);
        assert_eq!(br[0][0].leaves, alloc::vec![0, 1]);
    }
}
