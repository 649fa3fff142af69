//! Deterministic simulation of agents enacting a practice.
//!
//! Agents are scripted policies. Each tick the simulator fires a strategy
//! whose condition is commonly believed, or else advances the selected plan
//! branch by instantiating the next abstract step with bound performers.
//! When an intended step has no transition, it replans through another
//! object that affords the failed action.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checker::{EvalError, Evaluator};
use crate::ids::{ActSet, ActionId, AgentId, AtomId, Group, ObjectId, RoleId, StepId, WorldId};
use crate::model::{Kind, KripkeModel};
use crate::practice::{self, Phase, SocialPractice};
use crate::syntax::{ActionExpr, Actor, Assertion, DeonticKind, EventExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Compliance {
    Compliant,
    ViolatingAllowed,
}

/// How one agent takes part in a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentPolicy {
    pub agent: AgentId,
    /// Roles this agent is willing to act in.
    pub roles: Vec<RoleId>,
    /// Branch indices (see [`SocialPractice::branches`]) in preference order.
    pub branch_preference: Vec<usize>,
    pub compliance: Compliance,
}

impl AgentPolicy {
    pub fn new(agent: AgentId, roles: Vec<RoleId>) -> AgentPolicy {
        AgentPolicy { agent, roles, branch_preference: Vec::new(), compliance: Compliance::Compliant }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimOptions {
    pub ticks: usize,
    /// Depth of the replanning search.
    pub replan_depth: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { ticks: 64, replan_depth: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FireReason {
    Plan,
    Strategy,
    Replan,
}

impl FireReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FireReason::Plan => "plan",
            FireReason::Strategy => "strategy",
            FireReason::Replan => "replan",
        }
    }
}

/// One executed step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRecord {
    pub tick: usize,
    pub from: WorldId,
    pub step: StepId,
    pub to: WorldId,
    pub reason: FireReason,
    /// Branch and phase being advanced, if any.
    pub branch: Option<usize>,
    pub phase: Option<usize>,
    /// Norm indices with at least one addressee at `from`.
    pub active_norms: Vec<usize>,
    /// Violation atoms that became true at `to`.
    pub violations: Vec<AtomId>,
    /// Social atoms assumed through counts-as rules fired by this step.
    pub social_effects: Vec<AtomId>,
    /// Strategies whose turn was taken by an earlier one this tick.
    pub shadowed: Vec<usize>,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    ReachedEnd,
    TickBudget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub practice: String,
    pub seed: u64,
    pub start: WorldId,
    pub records: Vec<TraceRecord>,
    pub outcome: Outcome,
}

impl ExecutionTrace {
    /// World sequence, starting with `start`.
    pub fn worlds(&self) -> Vec<WorldId> {
        let mut v = alloc::vec![self.start];
        v.extend(self.records.iter().map(|r| r.to));
        v
    }

    pub fn end(&self) -> WorldId {
        self.records.last().map_or(self.start, |r| r.to)
    }

    pub fn violations(&self) -> Vec<AtomId> {
        self.records.iter().flat_map(|r| r.violations.iter().copied()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimError {
    NotStart(WorldId),
    NotFeasible,
    UnboundRole { agent: AgentId, role: RoleId },
    Unscriptable(usize),
    Stuck { world: WorldId, reason: String },
    Eval(EvalError),
}

impl From<EvalError> for SimError {
    fn from(e: EvalError) -> Self {
        SimError::Eval(e)
    }
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::NotStart(w) => write!(f, "world #{} does not satisfy the start condition", w.0),
            SimError::NotFeasible => f.write_str("the practice is not feasible"),
            SimError::UnboundRole { agent, role } => {
                write!(f, "policy of agent #{} binds role #{} outside the practice", agent.0, role.0)
            }
            SimError::Unscriptable(b) => write!(f, "branch {b} uses negation or achieving actions"),
            SimError::Stuck { world, reason } => write!(f, "stuck at world #{}: {reason}", world.0),
            SimError::Eval(e) => write!(f, "{e}"),
        }
    }
}

type Req = (Actor, ActionId);
type ScriptStep = Vec<Req>;
type Script = Vec<ScriptStep>;

const MAX_SCRIPTS: usize = 256;

fn merge_steps(a: &ScriptStep, b: &ScriptStep) -> ScriptStep {
    let mut v: ScriptStep = a.iter().chain(b.iter()).cloned().collect();
    v.sort();
    v.dedup();
    v
}

fn combine(xs: Vec<Script>, ys: Vec<Script>, par: bool) -> Option<Vec<Script>> {
    if xs.len().saturating_mul(ys.len()) > MAX_SCRIPTS {
        return None;
    }
    let mut out = Vec::new();
    for x in &xs {
        for y in &ys {
            if par {
                let n = x.len().max(y.len());
                let empty = Vec::new();
                out.push(
                    (0..n).map(|i| merge_steps(x.get(i).unwrap_or(&empty), y.get(i).unwrap_or(&empty))).collect(),
                );
            } else {
                let mut s = x.clone();
                s.extend(y.iter().cloned());
                out.push(s);
            }
        }
    }
    Some(out)
}

fn action_scripts(actor: &Actor, a: &ActionExpr) -> Option<Vec<Script>> {
    match a {
        ActionExpr::Atom(b) => Some(alloc::vec![alloc::vec![alloc::vec![(actor.clone(), *b)]]]),
        ActionExpr::Skip => Some(alloc::vec![Vec::new()]),
        ActionExpr::Neg(_) | ActionExpr::Achieving(_) => None,
        ActionExpr::Seq(x, y) => combine(action_scripts(actor, x)?, action_scripts(actor, y)?, false),
        ActionExpr::Par(x, y) => combine(action_scripts(actor, x)?, action_scripts(actor, y)?, true),
        ActionExpr::Choice(x, y) => {
            let mut v = action_scripts(actor, x)?;
            v.extend(action_scripts(actor, y)?);
            Some(v)
        }
    }
}

/// Linear scripts of an event built from atoms, `;`, `&` and `+`; `None`
/// for negation, achieving actions, or too many alternatives.
fn event_scripts(e: &EventExpr) -> Option<Vec<Script>> {
    match e {
        EventExpr::Do(actor, a) => action_scripts(actor, a),
        EventExpr::Skip => Some(alloc::vec![Vec::new()]),
        EventExpr::Neg(_) => None,
        EventExpr::Seq(x, y) => combine(event_scripts(x)?, event_scripts(y)?, false),
        EventExpr::Par(x, y) => combine(event_scripts(x)?, event_scripts(y)?, true),
        EventExpr::Choice(x, y) => {
            let mut v = event_scripts(x)?;
            v.extend(event_scripts(y)?);
            Some(v)
        }
    }
}

fn sorted_scripts(m: &KripkeModel, e: &EventExpr) -> Option<Vec<Script>> {
    let mut v = event_scripts(e)?;
    if v.len() > MAX_SCRIPTS {
        return None;
    }
    v.sort_by_cached_key(|s| {
        let names: Vec<Vec<&str>> =
            s.iter().map(|st| st.iter().map(|(_, b)| m.action_name(*b)).collect()).collect();
        (s.len(), names)
    });
    v.dedup();
    Some(v)
}

/// A concrete candidate for the next step.
struct Candidate {
    step: StepId,
    reqs: ScriptStep,
}

struct Sim<'a, 'm> {
    ev: &'a mut Evaluator<'m>,
    m: &'m KripkeModel,
    sp: &'a SocialPractice,
    policies: BTreeMap<AgentId, &'a AgentPolicy>,
    rng: ChaCha8Rng,
    /// Executed steps and the worlds between them.
    steps: Vec<StepId>,
    worlds: Vec<WorldId>,
}

impl<'a, 'm> Sim<'a, 'm> {
    fn w(&self) -> WorldId {
        *self.worlds.last().expect("non-empty")
    }

    fn bound(&self) -> Group {
        self.policies.keys().fold(Group::EMPTY, |g, &a| g.with(a))
    }

    fn compliant(&self, a: AgentId) -> bool {
        self.policies.get(&a).is_none_or(|p| p.compliance == Compliance::Compliant)
    }

    /// Object sets afforded for `b` in the practice, in declaration order.
    fn afforders(&self, b: ActionId) -> Vec<&'a BTreeSet<ObjectId>> {
        self.sp.affordances.iter().filter(|(_, act)| act.atoms().contains(&b)).map(|(o, _)| o).collect()
    }

    /// Objects used to perform `b` at `w`: the first afforded set that is
    /// available. `Some(None)` when nothing affords `b`; `None` when objects
    /// are needed but none are available.
    fn objects_for(&self, b: ActionId, w: WorldId) -> Option<Option<&'a BTreeSet<ObjectId>>> {
        let afforders = self.afforders(b);
        if afforders.is_empty() {
            return Some(None);
        }
        afforders.into_iter().find(|o| self.m.is_available(o, self.sp.context, w)).map(Some)
    }

    /// Performer choices for each requirement, shuffled by the seed.
    fn performers(&mut self, reqs: &ScriptStep, w: WorldId) -> Vec<Vec<Group>> {
        let mut out = Vec::new();
        for (actor, b) in reqs {
            let mut opts: Vec<Group> = match actor {
                Actor::Group(g) => {
                    if g.is_subset(self.bound()) && g.agents().all(|a| self.ev.cap(a, &ActionExpr::Atom(*b))) {
                        alloc::vec![*g]
                    } else {
                        Vec::new()
                    }
                }
                Actor::Role(r) => self
                    .policies
                    .values()
                    .filter(|p| p.roles.contains(r))
                    .map(|p| p.agent)
                    .filter(|&a| self.ev.play_in(a, *r, self.sp.context, w))
                    .filter(|&a| self.ev.cap(a, &ActionExpr::Atom(*b)))
                    .map(Group::singleton)
                    .collect(),
            };
            if self.objects_for(*b, w).is_none() {
                opts.clear();
            }
            opts.shuffle(&mut self.rng);
            out.push(opts);
        }
        out
    }

    /// Whether appending `s` at the current world completes a prohibited
    /// event for an addressee who does not accept violations.
    fn breaches(&mut self, s: StepId) -> Result<bool, SimError> {
        let n = self.steps.len();
        let mut trace = self.steps.clone();
        trace.push(s);
        for norm in &self.sp.norms {
            if norm.kind != DeonticKind::Prohibition {
                continue;
            }
            for i in n.saturating_sub(8)..=n {
                let wi = self.worlds[i];
                let addressees = self.ev.norm_addressees(norm, wi)?;
                for a in addressees.agents() {
                    if !self.compliant(a) {
                        continue;
                    }
                    let den = self.ev.denotation(&EventExpr::agent(a, norm.action.clone()), wi)?;
                    if den.contains(&trace[i..]) {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Transitions at `w` that realize the script step with some performer
    /// assignment, in assignment order. The boolean reports whether any
    /// assignment was possible at all.
    fn realize(&mut self, reqs: &ScriptStep) -> Result<(Vec<Candidate>, bool), SimError> {
        let w = self.w();
        let choices = self.performers(reqs, w);
        if choices.iter().any(|c| c.is_empty()) {
            return Ok((Vec::new(), false));
        }
        let wanted = reqs.iter().fold(ActSet::EMPTY, |acc, (_, b)| acc.union(ActSet::singleton(*b)));
        let mut out = Vec::new();
        let mut idx = alloc::vec![0usize; choices.len()];
        loop {
            let event = reqs
                .iter()
                .zip(&idx)
                .enumerate()
                .map(|(k, ((_, b), &i))| EventExpr::group(choices[k][i], ActionExpr::Atom(*b)))
                .reduce(EventExpr::par)
                .unwrap_or(EventExpr::Skip);
            let den = self.ev.denotation(&event, w)?;
            let transitions: Vec<(StepId, WorldId)> = self.m.active_transitions(w).collect();
            for (s, _) in transitions {
                if self.m.step(s).all_acts() == wanted && den.contains(&[s][..]) && !out.iter().any(|c: &Candidate| c.step == s) {
                    out.push(Candidate { step: s, reqs: reqs.clone() });
                }
            }
            // odometer over assignments
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return Ok((out, true));
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    fn social_effects(&mut self, s: StepId, w: WorldId) -> Result<Vec<AtomId>, SimError> {
        let mut out = BTreeSet::new();
        let step = self.m.step(s).clone();
        for a in self.m.agents() {
            for b in step.acts(Group::singleton(a)).actions() {
                if self.m.action_kind(b) != Kind::Physical {
                    continue;
                }
                for rule in &self.sp.counts_as {
                    if rule.performed != ActionExpr::Atom(b) || !self.m.enacts_in(a, rule.role, rule.context, w) {
                        continue;
                    }
                    if !self.ev.eval(&Assertion::CountsAs(alloc::boxed::Box::new(rule.clone())), w)? {
                        continue;
                    }
                    let target = self.ev.effects(&EventExpr::group(self.m.all_agents(), rule.counts_as.clone()), w)?;
                    for (p, val) in target {
                        if val && self.m.atom_kind(p) == Kind::Social {
                            out.insert(p);
                        }
                    }
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    fn execute(
        &mut self,
        tick: usize,
        s: StepId,
        reason: FireReason,
        at: (Option<usize>, Option<usize>),
        shadowed: Vec<usize>,
        note: Option<String>,
    ) -> Result<TraceRecord, SimError> {
        let from = self.w();
        let to = self.m.next(from, s).expect("step chosen among defined transitions");
        let mut active_norms = Vec::new();
        for (i, n) in self.sp.norms.iter().enumerate() {
            if !self.ev.norm_addressees(n, from)?.is_empty() {
                active_norms.push(i);
            }
        }
        let violations = self
            .m
            .atoms()
            .filter(|&p| self.m.atom_name(p).starts_with("V#") && self.m.holds(to, p) && !self.m.holds(from, p))
            .collect();
        let social_effects = self.social_effects(s, from)?;
        self.steps.push(s);
        self.worlds.push(to);
        Ok(TraceRecord {
            tick,
            from,
            step: s,
            to,
            reason,
            branch: at.0,
            phase: at.1,
            active_norms,
            violations,
            social_effects,
            shadowed,
            note,
        })
    }

    /// Shortest path from the current world to the phase goal that performs
    /// `b` with another afforded object set than `failed`.
    fn replan(&mut self, b: ActionId, failed: Option<&BTreeSet<ObjectId>>, goal: &Assertion, depth: usize) -> Result<Option<(Vec<StepId>, ObjectId)>, SimError> {
        let alternatives: Vec<&BTreeSet<ObjectId>> =
            self.afforders(b).into_iter().filter(|o| Some(*o) != failed).collect();
        if alternatives.is_empty() {
            return Ok(None);
        }
        let bound = self.bound();
        let start = self.w();
        let mut queue: VecDeque<(Vec<StepId>, WorldId, Option<ObjectId>)> = VecDeque::new();
        queue.push_back((Vec::new(), start, None));
        let mut seen = BTreeSet::new();
        while let Some((path, w, used)) = queue.pop_front() {
            if let Some(o) = used {
                if self.ev.eval(goal, w)? {
                    return Ok(Some((path, o)));
                }
            }
            if path.len() >= depth || !seen.insert((w, used)) {
                continue;
            }
            let transitions: Vec<(StepId, WorldId)> = self.m.active_transitions(w).collect();
            for (s, u) in transitions {
                let acts = self.m.step(s).all_acts();
                let capable = acts.actions().all(|x| bound.agents().any(|a| self.ev.cap(a, &ActionExpr::Atom(x))));
                if !capable {
                    continue;
                }
                let mut used2 = used;
                if acts.contains(b) && used.is_none() {
                    match alternatives.iter().find(|o| self.m.is_available(o, self.sp.context, w)) {
                        Some(o) => used2 = o.iter().next().copied(),
                        None => continue,
                    }
                }
                let mut p2 = path.clone();
                p2.push(s);
                queue.push_back((p2, u, used2));
            }
        }
        Ok(None)
    }
}

/// Runs the practice from `start`. Same inputs and seed give the same
/// trace.
pub fn simulate(
    ev: &mut Evaluator<'_>,
    sp: &SocialPractice,
    start: WorldId,
    policies: &[AgentPolicy],
    seed: u64,
    opts: SimOptions,
) -> Result<ExecutionTrace, SimError> {
    let m = ev.model();
    for p in policies {
        if let Some(&r) = p.roles.iter().find(|r| !sp.roles.contains(r)) {
            return Err(SimError::UnboundRole { agent: p.agent, role: r });
        }
    }
    if !ev.eval(&sp.start, start)? {
        return Err(SimError::NotStart(start));
    }
    if !practice::feasible(ev, sp)?.holds {
        return Err(SimError::NotFeasible);
    }
    let branches = sp.branches();
    let mut order: Vec<usize> = policies
        .iter()
        .find(|p| !p.branch_preference.is_empty())
        .map(|p| p.branch_preference.iter().copied().filter(|&b| b < branches.len()).collect())
        .unwrap_or_default();
    for b in 0..branches.len() {
        if !order.contains(&b) {
            order.push(b);
        }
    }

    let mut sim = Sim {
        ev,
        m,
        sp,
        policies: policies.iter().map(|p| (p.agent, p)).collect(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        steps: Vec::new(),
        worlds: alloc::vec![start],
    };
    let mut records = Vec::new();
    let mut fired: BTreeSet<usize> = BTreeSet::new();
    let mut pending: VecDeque<(StepId, String)> = VecDeque::new();

    // plan state
    let mut branch_pos = 0usize;
    let mut phase = 0usize;
    let mut done_in_phase: Vec<ScriptStep> = Vec::new();
    let mut scripts: Vec<Script> = Vec::new();
    let mut phases: Vec<Phase> = Vec::new();
    let mut started = false;

    for tick in 0..opts.ticks {
        let w = sim.w();
        if sim.ev.eval(&sp.end, w)? {
            return Ok(ExecutionTrace { practice: sp.name.clone(), seed, start, records, outcome: Outcome::ReachedEnd });
        }
        let b_idx = order.get(branch_pos).copied();

        if let Some((s, note)) = pending.pop_front() {
            let rec = sim.execute(tick, s, FireReason::Replan, (b_idx, Some(phase)), Vec::new(), Some(note))?;
            records.push(rec);
            if pending.is_empty() {
                phase += 1;
                done_in_phase.clear();
                started = false;
            }
            continue;
        }

        if !started {
            let Some(b) = b_idx else {
                return Err(SimError::Stuck { world: w, reason: "no plan branch left".into() });
            };
            phases = branches[b].phases.clone();
            if phase >= phases.len() {
                return Err(SimError::Stuck { world: w, reason: "plan finished outside the end condition".into() });
            }
            scripts = sorted_scripts(m, &phases[phase].event).ok_or(SimError::Unscriptable(b))?;
            started = true;
        }

        // candidates from every script consistent with this phase so far
        let mut candidates: Vec<Candidate> = Vec::new();
        let mut intended: Option<ScriptStep> = None;
        let n = done_in_phase.len();
        let live: Vec<Script> =
            scripts.iter().filter(|s| s.len() > n && s[..n] == done_in_phase[..]).cloned().collect();
        for s in &live {
            let (cands, possible) = sim.realize(&s[n])?;
            if possible && intended.is_none() && cands.is_empty() {
                intended = Some(s[n].clone());
            }
            for c in cands {
                if !sim.breaches(c.step)? {
                    candidates.push(c);
                }
            }
        }

        // strategies first, in file order
        let mut chosen: Option<(Candidate, FireReason, Option<usize>)> = None;
        let mut shadowed = Vec::new();
        for (i, st) in sp.strategies.iter().enumerate() {
            if fired.contains(&i) {
                continue;
            }
            let who = sim.ev.resolve(&st.actors, w);
            if !sim.ev.common_belief(who, &st.condition, w)? {
                continue;
            }
            let Some(st_scripts) = sorted_scripts(m, &EventExpr::Do(st.actors.clone(), st.action.clone())) else {
                continue;
            };
            let firsts: Vec<ScriptStep> = st_scripts.into_iter().filter_map(|s| s.into_iter().next()).collect();
            let hit = candidates.iter().position(|c| firsts.iter().any(|f| f.iter().all(|r| c.reqs.contains(r))));
            match hit {
                Some(k) if chosen.is_none() => {
                    let c = candidates.swap_remove(k);
                    chosen = Some((c, FireReason::Strategy, Some(i)));
                }
                Some(_) => shadowed.push(i),
                None => {}
            }
        }

        let (cand, reason, strategy) = match chosen {
            Some(c) => c,
            None => {
                if let Some(c) = candidates.into_iter().next() {
                    (c, FireReason::Plan, None)
                } else if let Some(reqs) = intended {
                    // the intended step has no transition: look for another
                    // object with the same affordance
                    let goal = phases[phase].goal.clone();
                    let mut found = None;
                    for (_, b) in &reqs {
                        let failed = sim.objects_for(*b, w).flatten();
                        if let Some((path, obj)) = sim.replan(*b, failed, &goal, opts.replan_depth)? {
                            let from = failed.and_then(|o| o.iter().next()).map_or("-", |o| m.object_name(*o));
                            found = Some((path, format!(
                                "{} failed with {from}; using {}",
                                m.action_name(*b),
                                m.object_name(obj)
                            )));
                            break;
                        }
                    }
                    match found {
                        Some((path, note)) if !path.is_empty() => {
                            pending.extend(path.into_iter().map(|s| (s, note.clone())));
                            let (s, note) = pending.pop_front().expect("non-empty");
                            let rec = sim.execute(tick, s, FireReason::Replan, (b_idx, Some(phase)), Vec::new(), Some(note))?;
                            records.push(rec);
                            if pending.is_empty() {
                                phase += 1;
                                done_in_phase.clear();
                                started = false;
                            }
                            continue;
                        }
                        _ => {
                            return Err(SimError::Stuck { world: w, reason: "intended step has no transition and no alternative object".into() })
                        }
                    }
                } else if n == 0 && phase == 0 && branch_pos + 1 < order.len() {
                    // the preferred branch cannot start here
                    branch_pos += 1;
                    started = false;
                    continue;
                } else {
                    return Err(SimError::Stuck { world: w, reason: "no strategy, plan step or replan applies".into() });
                }
            }
        };
        if let Some(i) = strategy {
            fired.insert(i);
        }
        let rec = sim.execute(tick, cand.step, reason, (b_idx, Some(phase)), shadowed, None)?;
        records.push(rec);
        done_in_phase.push(cand.reqs);
        let n = done_in_phase.len();
        let finished = scripts.iter().any(|s| s.len() == n && s[..] == done_in_phase[..]);
        let continues = scripts.iter().any(|s| s.len() > n && s[..n] == done_in_phase[..]);
        if finished && (sim.ev.eval(&phases[phase].goal, sim.w())? || !continues) {
            if !sim.ev.eval(&phases[phase].goal, sim.w())? {
                return Err(SimError::Stuck { world: sim.w(), reason: format!("goal of phase {} not reached", phase + 1) });
            }
            phase += 1;
            done_in_phase.clear();
            started = false;
        }
    }
    let outcome = if sim.ev.eval(&sp.end, sim.w())? { Outcome::ReachedEnd } else { Outcome::TickBudget };
    Ok(ExecutionTrace { practice: sp.name.clone(), seed, start, records, outcome })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReplayError {
    Discontinuous { index: usize },
    Undefined { index: usize },
    Diverges { index: usize, expected: WorldId, got: WorldId },
}

/// Feeds the trace's steps back through the model and checks that the same
/// worlds come out.
pub fn replay(m: &KripkeModel, trace: &ExecutionTrace) -> Result<(), ReplayError> {
    let mut w = trace.start;
    for (index, r) in trace.records.iter().enumerate() {
        if r.from != w {
            return Err(ReplayError::Discontinuous { index });
        }
        let got = m.next(w, r.step).ok_or(ReplayError::Undefined { index })?;
        if got != r.to {
            return Err(ReplayError::Diverges { index, expected: r.to, got });
        }
        w = got;
    }
    Ok(())
}
