//! Finite Kripke models: worlds, a partial step-transition function, per-agent
//! belief and goal relations, the execution order, and the context layer
//! (roles, objects, value orders, affordances).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::event::{Step, StepError, StepUniverse};
use crate::ids::{
    ActSet, ActionId, AgentId, AtomId, ContextId, Group, ObjectId, RoleId, StepId, ValueId, WorldId, MAX_ACTIONS,
    MAX_AGENTS,
};
use crate::syntax::ActionExpr;

/// Whether an atom or action belongs to the physical or the social world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Physical,
    Social,
}

/// A binary relation over worlds, stored as successor sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relation {
    succ: Vec<BTreeSet<WorldId>>,
}

impl Relation {
    pub fn new(worlds: usize) -> Relation {
        Relation { succ: alloc::vec![BTreeSet::new(); worlds] }
    }

    pub fn insert(&mut self, a: WorldId, b: WorldId) {
        self.succ[a.index()].insert(b);
    }

    pub fn contains(&self, a: WorldId, b: WorldId) -> bool {
        self.succ[a.index()].contains(&b)
    }

    pub fn successors(&self, a: WorldId) -> &BTreeSet<WorldId> {
        &self.succ[a.index()]
    }

    pub fn worlds(&self) -> usize {
        self.succ.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (WorldId, WorldId)> + '_ {
        self.succ.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |&b| (WorldId(i as u32), b)))
    }

    pub fn is_empty(&self) -> bool {
        self.succ.iter().all(BTreeSet::is_empty)
    }

    pub fn inverse(&self) -> Relation {
        let mut r = Relation::new(self.succ.len());
        for (a, b) in self.pairs() {
            r.insert(b, a);
        }
        r
    }

    /// Transitive closure (paths of length one or more).
    pub fn closure(&self) -> Relation {
        let n = self.succ.len();
        let mut out = Relation::new(n);
        for start in 0..n {
            let mut stack: Vec<WorldId> = self.succ[start].iter().copied().collect();
            let seen = &mut out.succ[start];
            while let Some(w) = stack.pop() {
                if seen.insert(w) {
                    stack.extend(self.succ[w.index()].iter().copied());
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    pub name: String,
    /// Atoms true at this world; every other declared atom is false.
    pub truths: BTreeSet<AtomId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub name: String,
    pub worlds: BTreeSet<WorldId>,
    pub roles: BTreeSet<RoleId>,
    pub actors: Group,
    pub objects: BTreeSet<ObjectId>,
    /// Place annotations; stored, never interpreted.
    pub places: Vec<String>,
}

/// A strict order `<_v` on worlds: `w1 < w2` means `w2` is better for `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueOrder {
    pub name: String,
    pub less: Relation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffordanceFact {
    pub objects: BTreeSet<ObjectId>,
    pub action: ActionExpr,
    pub context: ContextId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvailabilityFact {
    pub objects: BTreeSet<ObjectId>,
    pub context: ContextId,
    /// `None` means every world of the context.
    pub worlds: Option<BTreeSet<WorldId>>,
}

/// `rea(agent, role, world)` inside a context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Enactment {
    pub agent: AgentId,
    pub role: RoleId,
    pub context: ContextId,
    pub world: WorldId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelError {
    Duplicate { kind: &'static str, name: String },
    Unknown { kind: &'static str, name: String },
    TooMany { kind: &'static str, limit: usize },
    NoAgents,
    Step(StepError),
    /// Two transitions leave the same world on the same step.
    NonDeterministic { world: String, first: String, second: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Duplicate { kind, name } => write!(f, "{kind} `{name}` declared twice"),
            ModelError::Unknown { kind, name } => write!(f, "unknown {kind} `{name}`"),
            ModelError::TooMany { kind, limit } => write!(f, "at most {limit} {kind} are supported"),
            ModelError::NoAgents => f.write_str("a model needs at least one agent"),
            ModelError::Step(e) => write!(f, "invalid step: {e}"),
            ModelError::NonDeterministic { world, first, second } => write!(
                f,
                "world `{world}` has two transitions on the same step (to `{first}` and `{second}`)"
            ),
        }
    }
}

impl From<StepError> for ModelError {
    fn from(e: StepError) -> Self {
        ModelError::Step(e)
    }
}

#[derive(Clone, Debug, Default)]
struct Names {
    list: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl Names {
    fn add(&mut self, kind: &'static str, name: &str) -> Result<u32, ModelError> {
        if self.index.contains_key(name) {
            return Err(ModelError::Duplicate { kind, name: name.into() });
        }
        let id = self.list.len() as u32;
        self.list.push(name.into());
        self.index.insert(name.into(), id);
        Ok(id)
    }

    fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }
}

/// A transition with its step given group by group.
type SparseTransition = (WorldId, Vec<(Group, ActSet)>, WorldId);

/// Incremental construction of a [`KripkeModel`].
#[derive(Clone, Debug, Default)]
pub struct ModelBuilder {
    agents: Names,
    actions: Names,
    action_kinds: Vec<Kind>,
    atoms: Names,
    atom_kinds: Vec<Kind>,
    violations: usize,
    worlds: Names,
    truths: Vec<BTreeSet<AtomId>>,
    capability: BTreeMap<AgentId, ActSet>,
    transitions: Vec<SparseTransition>,
    belief: Vec<(AgentId, WorldId, WorldId)>,
    goal: Vec<(AgentId, WorldId, WorldId)>,
    order: Vec<(WorldId, WorldId)>,
    roles: Names,
    objects: Names,
    values: Names,
    value_pairs: Vec<(ValueId, WorldId, WorldId)>,
    contexts: Names,
    context_data: Vec<Context>,
    enactments: BTreeSet<Enactment>,
    affordances: Vec<AffordanceFact>,
    availability: Vec<AvailabilityFact>,
}

macro_rules! lookup {
    ($fn:ident, $field:ident, $id:ident, $ty:ty) => {
        pub fn $fn(&self, name: &str) -> Option<$id> {
            self.$field.get(name).map(|i| $id(i as $ty))
        }
    };
}

impl ModelBuilder {
    pub fn new() -> ModelBuilder {
        ModelBuilder::default()
    }

    pub fn agent(&mut self, name: &str) -> Result<AgentId, ModelError> {
        if self.agents.list.len() == MAX_AGENTS {
            return Err(ModelError::TooMany { kind: "agents", limit: MAX_AGENTS });
        }
        Ok(AgentId(self.agents.add("agent", name)? as u16))
    }

    pub fn action(&mut self, name: &str, kind: Kind) -> Result<ActionId, ModelError> {
        if self.actions.list.len() == MAX_ACTIONS {
            return Err(ModelError::TooMany { kind: "actions", limit: MAX_ACTIONS });
        }
        let id = ActionId(self.actions.add("action", name)? as u16);
        self.action_kinds.push(kind);
        Ok(id)
    }

    pub fn atom(&mut self, name: &str, kind: Kind) -> Result<AtomId, ModelError> {
        let id = AtomId(self.atoms.add("atom", name)?);
        self.atom_kinds.push(kind);
        Ok(id)
    }

    /// Declares violation atoms `V#1 .. V#n` and their sanction variants
    /// `V#1s .. V#ns`.
    pub fn violations(&mut self, n: usize) -> Result<(), ModelError> {
        for k in self.violations + 1..=n {
            self.atom(&violation_name(k, false), Kind::Social)?;
            self.atom(&violation_name(k, true), Kind::Social)?;
        }
        self.violations = self.violations.max(n);
        Ok(())
    }

    pub fn world(&mut self, name: &str) -> Result<WorldId, ModelError> {
        let id = WorldId(self.worlds.add("world", name)?);
        self.truths.push(BTreeSet::new());
        Ok(id)
    }

    pub fn set_true(&mut self, w: WorldId, atom: AtomId) {
        self.truths[w.index()].insert(atom);
    }

    pub fn capability(&mut self, agent: AgentId, acts: ActSet) {
        let e = self.capability.entry(agent).or_default();
        *e = e.union(acts);
    }

    /// A transition on the step completed from `sparse`; an empty pattern is
    /// the skip step.
    pub fn transition(&mut self, from: WorldId, sparse: Vec<(Group, ActSet)>, to: WorldId) {
        self.transitions.push((from, sparse, to));
    }

    pub fn belief(&mut self, agent: AgentId, a: WorldId, b: WorldId) {
        self.belief.push((agent, a, b));
    }

    pub fn goal(&mut self, agent: AgentId, a: WorldId, b: WorldId) {
        self.goal.push((agent, a, b));
    }

    /// `earlier ≺ later` (an immediate edge).
    pub fn order(&mut self, earlier: WorldId, later: WorldId) {
        self.order.push((earlier, later));
    }

    pub fn role(&mut self, name: &str) -> Result<RoleId, ModelError> {
        Ok(RoleId(self.roles.add("role", name)?))
    }

    pub fn object(&mut self, name: &str) -> Result<ObjectId, ModelError> {
        Ok(ObjectId(self.objects.add("object", name)?))
    }

    pub fn value(&mut self, name: &str) -> Result<ValueId, ModelError> {
        Ok(ValueId(self.values.add("value", name)?))
    }

    /// `worse <_v better`.
    pub fn value_pair(&mut self, v: ValueId, worse: WorldId, better: WorldId) {
        self.value_pairs.push((v, worse, better));
    }

    pub fn context(&mut self, ctx: Context) -> Result<ContextId, ModelError> {
        let id = ContextId(self.contexts.add("context", &ctx.name)?);
        self.context_data.push(ctx);
        Ok(id)
    }

    pub fn enact(&mut self, e: Enactment) {
        self.enactments.insert(e);
    }

    pub fn affords(&mut self, fact: AffordanceFact) {
        self.affordances.push(fact);
    }

    pub fn available(&mut self, fact: AvailabilityFact) {
        self.availability.push(fact);
    }

    lookup!(agent_id, agents, AgentId, u16);
    lookup!(action_id, actions, ActionId, u16);
    lookup!(atom_id, atoms, AtomId, u32);
    lookup!(world_id, worlds, WorldId, u32);
    lookup!(role_id, roles, RoleId, u32);
    lookup!(object_id, objects, ObjectId, u32);
    lookup!(value_id, values, ValueId, u32);
    lookup!(context_id, contexts, ContextId, u32);

    pub fn agent_count(&self) -> usize {
        self.agents.list.len()
    }

    pub fn context_mut(&mut self, c: ContextId) -> &mut Context {
        &mut self.context_data[c.index()]
    }

    pub fn build(self) -> Result<KripkeModel, ModelError> {
        let n_agents = self.agents.list.len();
        if n_agents == 0 {
            return Err(ModelError::NoAgents);
        }
        let n_worlds = self.worlds.list.len();

        let mut keyed: BTreeMap<(WorldId, Step), WorldId> = BTreeMap::new();
        for (from, sparse, to) in &self.transitions {
            let step = Step::complete(n_agents, sparse)?;
            match keyed.get(&(*from, step.clone())) {
                Some(prev) if prev != to => {
                    return Err(ModelError::NonDeterministic {
                        world: self.worlds.list[from.index()].clone(),
                        first: self.worlds.list[prev.index()].clone(),
                        second: self.worlds.list[to.index()].clone(),
                    });
                }
                _ => {
                    keyed.insert((*from, step), *to);
                }
            }
        }
        let steps = StepUniverse::from_steps(n_agents, self.actions.list.len(), keyed.keys().map(|(_, s)| s.clone()));
        let skip = steps.skip();
        let mut out: Vec<BTreeMap<StepId, WorldId>> = alloc::vec![BTreeMap::new(); n_worlds];
        for ((from, step), to) in &keyed {
            out[from.index()].insert(steps.id_of(step).expect("interned"), *to);
        }
        for (i, o) in out.iter_mut().enumerate() {
            o.entry(skip).or_insert(WorldId(i as u32));
        }

        let relation_family = |pairs: &[(AgentId, WorldId, WorldId)]| {
            let mut rs = alloc::vec![Relation::new(n_worlds); n_agents];
            for &(a, x, y) in pairs {
                rs[a.index()].insert(x, y);
            }
            rs
        };
        let belief = relation_family(&self.belief);
        let goal = relation_family(&self.goal);
        let mut order = Relation::new(n_worlds);
        for &(a, b) in &self.order {
            order.insert(a, b);
        }
        let order_closure = order.closure();
        let order_pred = order.inverse();

        let mut values: Vec<ValueOrder> = self
            .values
            .list
            .iter()
            .map(|name| ValueOrder { name: name.clone(), less: Relation::new(n_worlds) })
            .collect();
        for &(v, a, b) in &self.value_pairs {
            values[v.index()].less.insert(a, b);
        }

        let mut capability = alloc::vec![ActSet::EMPTY; n_agents];
        for (a, s) in self.capability {
            capability[a.index()] = s;
        }

        let worlds = self
            .worlds
            .list
            .into_iter()
            .zip(self.truths)
            .map(|(name, truths)| World { name, truths })
            .collect();

        Ok(KripkeModel {
            agents: self.agents,
            actions: self.actions,
            action_kinds: self.action_kinds,
            atoms: self.atoms,
            atom_kinds: self.atom_kinds,
            violations: self.violations,
            worlds,
            world_index: self.worlds.index,
            capability,
            steps,
            out,
            belief,
            goal,
            order,
            order_closure,
            order_pred,
            roles: self.roles,
            objects: self.objects,
            values,
            value_names: self.values,
            contexts: self.contexts,
            context_data: self.context_data,
            enactments: self.enactments,
            affordances: self.affordances,
            availability: self.availability,
        })
    }
}

/// Name of the `k`-th violation atom (1-based).
pub fn violation_name(k: usize, sanction: bool) -> String {
    if sanction {
        alloc::format!("V#{k}s")
    } else {
        alloc::format!("V#{k}")
    }
}

/// An immutable finite Kripke model.
#[derive(Clone, Debug)]
pub struct KripkeModel {
    agents: Names,
    actions: Names,
    action_kinds: Vec<Kind>,
    atoms: Names,
    atom_kinds: Vec<Kind>,
    violations: usize,
    worlds: Vec<World>,
    world_index: BTreeMap<String, u32>,
    capability: Vec<ActSet>,
    steps: StepUniverse,
    out: Vec<BTreeMap<StepId, WorldId>>,
    belief: Vec<Relation>,
    goal: Vec<Relation>,
    order: Relation,
    order_closure: Relation,
    order_pred: Relation,
    roles: Names,
    objects: Names,
    values: Vec<ValueOrder>,
    value_names: Names,
    contexts: Names,
    context_data: Vec<Context>,
    enactments: BTreeSet<Enactment>,
    affordances: Vec<AffordanceFact>,
    availability: Vec<AvailabilityFact>,
}

impl KripkeModel {
    lookup!(agent_id, agents, AgentId, u16);
    lookup!(action_id, actions, ActionId, u16);
    lookup!(atom_id, atoms, AtomId, u32);
    lookup!(role_id, roles, RoleId, u32);
    lookup!(object_id, objects, ObjectId, u32);
    lookup!(value_id, value_names, ValueId, u32);
    lookup!(context_id, contexts, ContextId, u32);

    pub fn world_id(&self, name: &str) -> Option<WorldId> {
        self.world_index.get(name).map(|&i| WorldId(i))
    }

    pub fn agent_count(&self) -> usize {
        self.agents.list.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.list.len()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.list.len()
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn violation_count(&self) -> usize {
        self.violations
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agents.list[a.index()]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions.list[a.index()]
    }

    pub fn action_kind(&self, a: ActionId) -> Kind {
        self.action_kinds[a.index()]
    }

    pub fn atom_name(&self, a: AtomId) -> &str {
        &self.atoms.list[a.index()]
    }

    pub fn atom_kind(&self, a: AtomId) -> Kind {
        self.atom_kinds[a.index()]
    }

    pub fn role_name(&self, r: RoleId) -> &str {
        &self.roles.list[r.index()]
    }

    pub fn object_name(&self, o: ObjectId) -> &str {
        &self.objects.list[o.index()]
    }

    pub fn context_name(&self, c: ContextId) -> &str {
        &self.contexts.list[c.index()]
    }

    pub fn world_name(&self, w: WorldId) -> &str {
        &self.worlds[w.index()].name
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.list.len() as u16).map(AgentId)
    }

    pub fn all_agents(&self) -> Group {
        Group::all(self.agent_count())
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.list.len() as u16).map(ActionId)
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> {
        (0..self.atoms.list.len() as u32).map(AtomId)
    }

    pub fn worlds(&self) -> impl Iterator<Item = WorldId> {
        (0..self.worlds.len() as u32).map(WorldId)
    }

    pub fn roles(&self) -> impl Iterator<Item = RoleId> {
        (0..self.roles.list.len() as u32).map(RoleId)
    }

    pub fn contexts(&self) -> impl Iterator<Item = ContextId> {
        (0..self.contexts.list.len() as u32).map(ContextId)
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> {
        (0..self.objects.list.len() as u32).map(ObjectId)
    }

    pub fn world(&self, w: WorldId) -> &World {
        &self.worlds[w.index()]
    }

    pub fn holds(&self, w: WorldId, atom: AtomId) -> bool {
        self.worlds[w.index()].truths.contains(&atom)
    }

    pub fn capability(&self, a: AgentId) -> ActSet {
        self.capability[a.index()]
    }

    pub fn steps(&self) -> &StepUniverse {
        &self.steps
    }

    pub fn step(&self, s: StepId) -> &Step {
        self.steps.step(s)
    }

    /// `r(s, w)`, if defined. Skip is the identity unless overridden.
    pub fn next(&self, w: WorldId, s: StepId) -> Option<WorldId> {
        self.out[w.index()].get(&s).copied()
    }

    /// Every defined `(step, successor)` at `w`, including skip.
    pub fn transitions(&self, w: WorldId) -> impl Iterator<Item = (StepId, WorldId)> + '_ {
        self.out[w.index()].iter().map(|(&s, &t)| (s, t))
    }

    /// Defined transitions at `w` other than the skip step.
    pub fn active_transitions(&self, w: WorldId) -> impl Iterator<Item = (StepId, WorldId)> + '_ {
        let skip = self.steps.skip();
        self.transitions(w).filter(move |&(s, _)| s != skip)
    }

    /// `R(t, w)`: folds the trace through `r`.
    pub fn run(&self, w: WorldId, trace: &[StepId]) -> Option<WorldId> {
        trace.iter().try_fold(w, |w, &s| self.next(w, s))
    }

    /// `⟦T⟧_R(w)`: end worlds of the traces of `traces` that are defined at `w`.
    pub fn successors<'a, I>(&self, w: WorldId, traces: I) -> BTreeSet<WorldId>
    where
        I: IntoIterator<Item = &'a [StepId]>,
    {
        traces.into_iter().filter_map(|t| self.run(w, t)).collect()
    }

    pub fn belief(&self, a: AgentId) -> &Relation {
        &self.belief[a.index()]
    }

    pub fn goal(&self, a: AgentId) -> &Relation {
        &self.goal[a.index()]
    }

    /// Declared immediate `≺` edges.
    pub fn order(&self) -> &Relation {
        &self.order
    }

    /// The strict partial order generated by the declared edges.
    pub fn order_closure(&self) -> &Relation {
        &self.order_closure
    }

    /// Immediate `≺` predecessors.
    pub fn order_predecessors(&self, w: WorldId) -> &BTreeSet<WorldId> {
        self.order_pred.successors(w)
    }

    pub fn context(&self, c: ContextId) -> &Context {
        &self.context_data[c.index()]
    }

    pub fn value_orders(&self) -> &[ValueOrder] {
        &self.values
    }

    pub fn value_order(&self, v: ValueId) -> &ValueOrder {
        &self.values[v.index()]
    }

    pub fn enactments(&self) -> &BTreeSet<Enactment> {
        &self.enactments
    }

    /// `rea(a, r, w)` in any context.
    pub fn enacts(&self, agent: AgentId, role: RoleId, w: WorldId) -> bool {
        self.enactments.iter().any(|e| e.agent == agent && e.role == role && e.world == w)
    }

    /// `rea(a, r, w)` within context `c`.
    pub fn enacts_in(&self, agent: AgentId, role: RoleId, c: ContextId, w: WorldId) -> bool {
        self.enactments.contains(&Enactment { agent, role, context: c, world: w })
    }

    /// Agents enacting `role` at `w`, in any context.
    pub fn enactors(&self, role: RoleId, w: WorldId) -> Group {
        self.enactments
            .iter()
            .filter(|e| e.role == role && e.world == w)
            .fold(Group::EMPTY, |g, e| g.with(e.agent))
    }

    pub fn affordances(&self) -> &[AffordanceFact] {
        &self.affordances
    }

    pub fn availability(&self) -> &[AvailabilityFact] {
        &self.availability
    }

    /// `available(O, c)` at `w`: some availability fact of `c` covers `O`
    /// and applies at `w`.
    pub fn is_available(&self, objects: &BTreeSet<ObjectId>, c: ContextId, w: WorldId) -> bool {
        self.availability.iter().any(|f| {
            f.context == c
                && objects.is_subset(&f.objects)
                && match &f.worlds {
                    None => self.context(c).worlds.contains(&w),
                    Some(ws) => ws.contains(&w),
                }
        })
    }

    /// `affords(O, α, c)`: declared literally.
    pub fn affords(&self, objects: &BTreeSet<ObjectId>, action: &ActionExpr, c: ContextId) -> bool {
        self.affordances.iter().any(|f| f.context == c && &f.objects == objects && &f.action == action)
    }

    /// `start(U)`: worlds of the context with no `≺`-predecessor inside it.
    pub fn context_start(&self, c: ContextId) -> BTreeSet<WorldId> {
        let u = &self.context(c).worlds;
        u.iter()
            .copied()
            .filter(|&w| !u.iter().any(|&v| self.order_closure.contains(v, w)))
            .collect()
    }

    /// `end(U)`: worlds of the context with no `≺`-successor inside it.
    pub fn context_end(&self, c: ContextId) -> BTreeSet<WorldId> {
        let u = &self.context(c).worlds;
        u.iter()
            .copied()
            .filter(|&w| !u.iter().any(|&v| self.order_closure.contains(w, v)))
            .collect()
    }

    /// Contexts whose world set contains `w` (the active contexts at `w`).
    pub fn active_contexts(&self, w: WorldId) -> impl Iterator<Item = ContextId> + '_ {
        self.contexts().filter(move |&c| self.context(c).worlds.contains(&w))
    }
}

/// A frame condition that does not hold, with one witness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    BeliefNotSerial { agent: AgentId, world: WorldId },
    BeliefNotSymmetric { agent: AgentId, from: WorldId, to: WorldId },
    BeliefNotTransitive { agent: AgentId, a: WorldId, b: WorldId, c: WorldId },
    GoalNotSerial { agent: AgentId, world: WorldId },
    GoalNotTransitive { agent: AgentId, a: WorldId, b: WorldId, c: WorldId },
    OrderCycle { cycle: Vec<WorldId> },
    /// `earlier ≺ later`, `viewer R_a` one of them but not the other.
    OrderBeliefCoupling { agent: AgentId, earlier: WorldId, later: WorldId, viewer: WorldId },
    SkipNotIdentity { world: WorldId, target: WorldId },
    ContextNotConnected { context: ContextId, a: WorldId, b: WorldId },
    EnactmentOutsideContext { enactment: Enactment },
    ValueOrderReflexive { value: ValueId, world: WorldId },
    ValueOrderNotTransitive { value: ValueId, a: WorldId, b: WorldId, c: WorldId },
}

/// Informational findings that do not make a model invalid.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Note {
    /// `≺`-maximal worlds; expected, since a finite strict order cannot be
    /// serial.
    OrderNotSerial { worlds: Vec<WorldId> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub notes: Vec<Note>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn first_non_serial(r: &Relation) -> Option<WorldId> {
    (0..r.worlds() as u32).map(WorldId).find(|&w| r.successors(w).is_empty())
}

fn first_asymmetric(r: &Relation) -> Option<(WorldId, WorldId)> {
    r.pairs().find(|&(a, b)| !r.contains(b, a))
}

fn first_intransitive(r: &Relation) -> Option<(WorldId, WorldId, WorldId)> {
    for (a, b) in r.pairs() {
        for &c in r.successors(b) {
            if !r.contains(a, c) {
                return Some((a, b, c));
            }
        }
    }
    None
}

fn find_cycle(r: &Relation) -> Option<Vec<WorldId>> {
    // iterative three-colour DFS
    let n = r.worlds();
    let mut colour = alloc::vec![0u8; n];
    let mut parent = alloc::vec![None::<WorldId>; n];
    for root in 0..n {
        if colour[root] != 0 {
            continue;
        }
        let mut stack: Vec<(WorldId, Vec<WorldId>)> =
            alloc::vec![(WorldId(root as u32), r.successors(WorldId(root as u32)).iter().rev().copied().collect())];
        colour[root] = 1;
        while let Some((w, pending)) = stack.last_mut() {
            let w = *w;
            match pending.pop() {
                Some(v) if colour[v.index()] == 0 => {
                    colour[v.index()] = 1;
                    parent[v.index()] = Some(w);
                    stack.push((v, r.successors(v).iter().rev().copied().collect()));
                }
                Some(v) if colour[v.index()] == 1 => {
                    let mut cycle = alloc::vec![w];
                    let mut cur = w;
                    while cur != v {
                        cur = parent[cur.index()].expect("on stack");
                        cycle.push(cur);
                    }
                    cycle.reverse();
                    return Some(cycle);
                }
                Some(_) => {}
                None => {
                    colour[w.index()] = 2;
                    stack.pop();
                }
            }
        }
    }
    None
}

/// Checks every frame condition and reports each failing one once, with the
/// first witness in world order.
pub fn validate_model(m: &KripkeModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    let v = &mut report.violations;
    for a in m.agents() {
        let r = m.belief(a);
        if let Some(world) = first_non_serial(r) {
            v.push(Violation::BeliefNotSerial { agent: a, world });
        }
        if let Some((from, to)) = first_asymmetric(r) {
            v.push(Violation::BeliefNotSymmetric { agent: a, from, to });
        }
        if let Some((x, y, z)) = first_intransitive(r) {
            v.push(Violation::BeliefNotTransitive { agent: a, a: x, b: y, c: z });
        }
    }
    for a in m.agents() {
        let r = m.goal(a);
        if let Some(world) = first_non_serial(r) {
            v.push(Violation::GoalNotSerial { agent: a, world });
        }
        if let Some((x, y, z)) = first_intransitive(r) {
            v.push(Violation::GoalNotTransitive { agent: a, a: x, b: y, c: z });
        }
    }
    if let Some(cycle) = find_cycle(m.order()) {
        v.push(Violation::OrderCycle { cycle });
    }
    'agents: for a in m.agents() {
        let r = m.belief(a);
        for (earlier, later) in m.order_closure().pairs() {
            for viewer in m.worlds() {
                let e = r.contains(viewer, earlier);
                let l = r.contains(viewer, later);
                if e != l {
                    v.push(Violation::OrderBeliefCoupling { agent: a, earlier, later, viewer });
                    continue 'agents;
                }
            }
        }
    }
    let skip = m.steps().skip();
    for w in m.worlds() {
        if let Some(t) = m.next(w, skip) {
            if t != w {
                v.push(Violation::SkipNotIdentity { world: w, target: t });
                break;
            }
        }
    }
    for c in m.contexts() {
        if let Some((a, b)) = disconnected_pair(m, &m.context(c).worlds) {
            v.push(Violation::ContextNotConnected { context: c, a, b });
        }
    }
    for e in m.enactments() {
        let ctx = m.context(e.context);
        if !ctx.worlds.contains(&e.world) || !ctx.roles.contains(&e.role) {
            v.push(Violation::EnactmentOutsideContext { enactment: *e });
        }
    }
    for (i, vo) in m.value_orders().iter().enumerate() {
        let value = ValueId(i as u32);
        if let Some(world) = m.worlds().find(|&w| vo.less.contains(w, w)) {
            v.push(Violation::ValueOrderReflexive { value, world });
        }
        if let Some((x, y, z)) = first_intransitive(&vo.less) {
            v.push(Violation::ValueOrderNotTransitive { value, a: x, b: y, c: z });
        }
    }
    let maximal: Vec<WorldId> = m.worlds().filter(|&w| m.order().successors(w).is_empty()).collect();
    if !maximal.is_empty() {
        report.notes.push(Note::OrderNotSerial { worlds: maximal });
    }
    report
}

/// Undirected connectivity of `u` under `≺` restricted to `u`; returns a
/// pair of worlds in different components.
fn disconnected_pair(m: &KripkeModel, u: &BTreeSet<WorldId>) -> Option<(WorldId, WorldId)> {
    let first = *u.iter().next()?;
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![first];
    let closure = m.order_closure();
    while let Some(w) = stack.pop() {
        if !seen.insert(w) {
            continue;
        }
        for &x in u {
            if !seen.contains(&x) && (closure.contains(w, x) || closure.contains(x, w)) {
                stack.push(x);
            }
        }
    }
    u.iter().find(|w| !seen.contains(w)).map(|&w| (first, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> KripkeModel {
        let mut b = ModelBuilder::new();
        let fred = b.agent("fred").unwrap();
        let ws: Vec<WorldId> = (0..n).map(|i| b.world(&alloc::format!("w{i}")).unwrap()).collect();
        for w in &ws {
            for x in &ws {
                b.belief(fred, *w, *x);
            }
            b.goal(fred, *w, ws[n - 1]);
        }
        for p in ws.windows(2) {
            b.order(p[0], p[1]);
        }
        b.context(Context {
            name: "c".into(),
            worlds: ws.iter().copied().collect(),
            roles: BTreeSet::new(),
            actors: Group::singleton(fred),
            objects: BTreeSet::new(),
            places: Vec::new(),
        })
        .unwrap();
        b.build().unwrap()
    }

    #[test]
    fn singleton_model_is_valid_with_order_note() {
        let m = chain(1);
        let r = validate_model(&m);
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!(r.notes, alloc::vec![Note::OrderNotSerial { worlds: alloc::vec![WorldId(0)] }]);
    }

    #[test]
    fn chain_start_and_end() {
        let m = chain(3);
        let c = ContextId(0);
        assert_eq!(m.context_start(c), [WorldId(0)].into_iter().collect());
        assert_eq!(m.context_end(c), [WorldId(2)].into_iter().collect());
        assert!(validate_model(&m).is_valid());
    }

    #[test]
    fn skip_is_identity_by_default() {
        let m = chain(2);
        let skip = m.steps().skip();
        assert_eq!(m.next(WorldId(1), skip), Some(WorldId(1)));
        assert_eq!(m.successors(WorldId(0), [&[skip][..]]), [WorldId(0)].into_iter().collect());
    }

    #[test]
    fn missing_belief_successor_is_reported() {
        let mut b = ModelBuilder::new();
        let a = b.agent("a").unwrap();
        let w0 = b.world("w0").unwrap();
        let w1 = b.world("w1").unwrap();
        b.belief(a, w0, w0);
        b.goal(a, w0, w0);
        b.goal(a, w1, w1);
        let r = validate_model(&b.build().unwrap());
        assert_eq!(r.violations, alloc::vec![Violation::BeliefNotSerial { agent: a, world: w1 }]);
    }

    #[test]
    fn conflicting_transitions_are_rejected() {
        let mut b = ModelBuilder::new();
        let a = b.agent("a").unwrap();
        let go = b.action("go", Kind::Physical).unwrap();
        let w0 = b.world("w0").unwrap();
        let w1 = b.world("w1").unwrap();
        let w2 = b.world("w2").unwrap();
        b.transition(w0, alloc::vec![(Group::singleton(a), ActSet::singleton(go))], w1);
        b.transition(w0, alloc::vec![(Group::singleton(a), ActSet::singleton(go))], w2);
        assert!(matches!(b.build(), Err(ModelError::NonDeterministic { .. })));
    }
}
