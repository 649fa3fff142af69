//! Random models and formulas for differential testing.

use rand::seq::IndexedRandom;
use rand::Rng;

use socprac_core::event::enumerate_steps;
use socprac_core::ids::{ActionId, AgentId, AtomId, ContextId, Group, RoleId, WorldId};
use socprac_core::model::{Context, Enactment, Kind, KripkeModel, ModelBuilder};
use socprac_core::syntax::{ActionExpr, Actor, Assertion, DeonticKind, EventExpr};

#[derive(Clone, Copy, Debug)]
pub struct ModelShape {
    pub agents: usize,
    pub actions: usize,
    pub atoms: usize,
    pub worlds: usize,
    /// Most non-idle transitions leaving one world.
    pub out_degree: usize,
}

impl ModelShape {
    /// Up to 3 agents, 2 actions, 3 atoms and `max_worlds` worlds.
    pub fn random<R: Rng>(rng: &mut R, max_worlds: usize) -> ModelShape {
        ModelShape {
            agents: rng.random_range(1..=3),
            actions: rng.random_range(1..=2),
            atoms: rng.random_range(1..=3),
            worlds: rng.random_range(1..=max_worlds),
            out_degree: 3,
        }
    }
}

fn some_worlds<R: Rng>(rng: &mut R, n: usize, max: usize) -> Vec<WorldId> {
    let k = rng.random_range(1..=max.min(n));
    (0..k).map(|_| WorldId(rng.random_range(0..n) as u32)).collect()
}

/// A model with random valuations, transitions, relations, and one role
/// enacted at random inside a context spanning every world. Agents are
/// `a0..`, actions `b0..`, atoms `p0..` plus the violation atom `V#1`.
pub fn random_model<R: Rng>(rng: &mut R, shape: ModelShape) -> KripkeModel {
    let mut b = ModelBuilder::new();
    let agents: Vec<AgentId> = (0..shape.agents).map(|i| b.agent(&format!("a{i}")).unwrap()).collect();
    for i in 0..shape.actions {
        b.action(&format!("b{i}"), Kind::Physical).unwrap();
    }
    let atoms: Vec<AtomId> = (0..shape.atoms).map(|i| b.atom(&format!("p{i}"), Kind::Physical).unwrap()).collect();
    b.violations(1).unwrap();
    let v = b.atom_id("V#1").unwrap();
    let n = shape.worlds;
    let worlds: Vec<WorldId> = (0..n).map(|i| b.world(&format!("w{i}")).unwrap()).collect();
    let steps: Vec<_> = enumerate_steps(shape.agents, shape.actions, 100_000)
        .unwrap()
        .into_iter()
        .filter(|s| !s.is_skip())
        .collect();
    for &w in &worlds {
        for &p in atoms.iter().chain([&v]) {
            if rng.random_bool(0.4) {
                b.set_true(w, p);
            }
        }
        let k = rng.random_range(0..=shape.out_degree.min(steps.len()));
        let chosen: Vec<_> = steps.choose_multiple(rng, k).collect();
        for s in chosen {
            let to = worlds[rng.random_range(0..n)];
            b.transition(w, s.sparse(), to);
            if rng.random_bool(0.7) {
                b.order(w, to);
            }
        }
        for &a in &agents {
            for u in some_worlds(rng, n, 3) {
                b.belief(a, w, u);
            }
            for u in some_worlds(rng, n, 2) {
                b.goal(a, w, u);
            }
        }
    }
    for &a in &agents {
        let mask: u64 = rng.random_range(0..1u64 << shape.actions);
        b.capability(a, socprac_core::ids::ActSet(mask));
    }
    let r = b.role("r").unwrap();
    let c = b
        .context(Context {
            name: "c".into(),
            worlds: worlds.iter().copied().collect(),
            roles: [r].into_iter().collect(),
            actors: Group::all(shape.agents),
            objects: Default::default(),
            places: Vec::new(),
        })
        .unwrap();
    for &w in &worlds {
        for &a in &agents {
            if rng.random_bool(0.5) {
                b.enact(Enactment { agent: a, role: r, context: c, world: w });
            }
        }
    }
    b.build().unwrap()
}

/// Names available to a generator.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    pub agents: usize,
    pub actions: usize,
    pub atoms: Vec<AtomId>,
    pub violations: Vec<AtomId>,
    pub roles: Vec<RoleId>,
    pub contexts: Vec<ContextId>,
}

impl Vocabulary {
    pub fn of(m: &KripkeModel) -> Vocabulary {
        let (violations, atoms) = m.atoms().partition(|&p| m.atom_name(p).starts_with("V#"));
        Vocabulary {
            agents: m.agent_count(),
            actions: m.action_count(),
            atoms,
            violations,
            roles: m.roles().collect(),
            contexts: m.contexts().collect(),
        }
    }

    pub fn agent<R: Rng>(&self, rng: &mut R) -> AgentId {
        AgentId(rng.random_range(0..self.agents) as u16)
    }

    pub fn group<R: Rng>(&self, rng: &mut R) -> Group {
        Group(rng.random_range(1..1u32 << self.agents))
    }

    pub fn action<R: Rng>(&self, rng: &mut R) -> ActionId {
        ActionId(rng.random_range(0..self.actions) as u16)
    }

    pub fn atom<R: Rng>(&self, rng: &mut R) -> AtomId {
        *self.atoms.choose(rng).expect("atoms")
    }

    pub fn actor<R: Rng>(&self, rng: &mut R) -> Actor {
        if !self.roles.is_empty() && rng.random_bool(0.25) {
            Actor::Role(*self.roles.choose(rng).unwrap())
        } else {
            Actor::Group(self.group(rng))
        }
    }
}

/// Bounds for generated formulas.
#[derive(Clone, Copy, Debug)]
pub struct FormulaShape {
    pub depth: usize,
    /// Longest trace a generated event may denote.
    pub trace_budget: usize,
    pub achieving: bool,
}

pub fn propositional<R: Rng>(rng: &mut R, v: &Vocabulary, depth: usize) -> Assertion {
    if depth <= 1 || rng.random_bool(0.4) {
        return match rng.random_range(0..6) {
            0 => Assertion::True,
            1 => Assertion::False,
            _ => Assertion::Atom(v.atom(rng)),
        };
    }
    let a = propositional(rng, v, depth - 1);
    match rng.random_range(0..4) {
        0 => Assertion::not(a),
        1 => Assertion::and(a, propositional(rng, v, depth - 1)),
        2 => Assertion::or(a, propositional(rng, v, depth - 1)),
        _ => Assertion::implies(a, propositional(rng, v, depth - 1)),
    }
}

/// An action of at most `budget` steps.
pub fn action<R: Rng>(rng: &mut R, v: &Vocabulary, depth: usize, budget: usize, s: FormulaShape) -> ActionExpr {
    if depth <= 1 || rng.random_bool(0.45) {
        return match rng.random_range(0..8) {
            0 => ActionExpr::Skip,
            1 if s.achieving => ActionExpr::Achieving(Box::new(propositional(rng, v, 2))),
            2 => ActionExpr::neg(ActionExpr::Atom(v.action(rng))),
            _ => ActionExpr::Atom(v.action(rng)),
        };
    }
    match rng.random_range(0..4) {
        0 if budget >= 2 => {
            let left = rng.random_range(1..budget);
            ActionExpr::seq(action(rng, v, depth - 1, left, s), action(rng, v, depth - 1, budget - left, s))
        }
        1 => ActionExpr::par(action(rng, v, depth - 1, budget, s), action(rng, v, depth - 1, budget, s)),
        2 => ActionExpr::neg(action(rng, v, depth - 1, budget, s)),
        _ => ActionExpr::choice(action(rng, v, depth - 1, budget, s), action(rng, v, depth - 1, budget, s)),
    }
}

/// An event of at most `budget` steps.
pub fn event<R: Rng>(rng: &mut R, v: &Vocabulary, depth: usize, budget: usize, s: FormulaShape) -> EventExpr {
    if depth <= 1 || rng.random_bool(0.4) {
        if rng.random_range(0..8) == 0 {
            return EventExpr::Skip;
        }
        let act = action(rng, v, depth.min(2), budget, s);
        return EventExpr::Do(v.actor(rng), act);
    }
    match rng.random_range(0..4) {
        0 if budget >= 2 => {
            let left = rng.random_range(1..budget);
            EventExpr::seq(event(rng, v, depth - 1, left, s), event(rng, v, depth - 1, budget - left, s))
        }
        1 => EventExpr::par(event(rng, v, depth - 1, budget, s), event(rng, v, depth - 1, budget, s)),
        2 => EventExpr::neg(event(rng, v, depth - 1, budget, s)),
        _ => EventExpr::choice(event(rng, v, depth - 1, budget, s), event(rng, v, depth - 1, budget, s)),
    }
}

/// A formula of the base logic (no practice-level constructs) whose events
/// stay within the trace budget. At most one common-belief operator is used.
pub fn formula<R: Rng>(rng: &mut R, v: &Vocabulary, s: FormulaShape) -> Assertion {
    let mut cb_left = 1;
    formula_at(rng, v, s.depth, s, &mut cb_left)
}

fn formula_at<R: Rng>(rng: &mut R, v: &Vocabulary, depth: usize, s: FormulaShape, cb: &mut usize) -> Assertion {
    let small_event = |rng: &mut R| event(rng, v, 3, s.trace_budget, s);
    if depth <= 1 || rng.random_bool(0.2) {
        return match rng.random_range(0..12) {
            0 => Assertion::True,
            1 => Assertion::Cap(v.agent(rng), action(rng, v, 2, s.trace_budget, s)),
            2 => Assertion::Able(v.agent(rng), action(rng, v, 2, s.trace_budget, s)),
            3 if !v.violations.is_empty() => {
                let kind = [DeonticKind::Obligation, DeonticKind::Prohibition, DeonticKind::Permission]
                    .choose(rng)
                    .copied()
                    .unwrap();
                Assertion::Deontic { kind, violation: *v.violations.choose(rng).unwrap(), event: small_event(rng) }
            }
            4 => Assertion::Done(small_event(rng)),
            5 => Assertion::Do(small_event(rng)),
            6 => {
                let group = v.group(rng);
                let agent = group.agents().next().unwrap();
                let action = v.action(rng);
                let expr = if rng.random_bool(0.5) {
                    ActionExpr::Atom(action)
                } else {
                    ActionExpr::par(ActionExpr::Atom(action), ActionExpr::Atom(v.action(rng)))
                };
                if rng.random_bool(0.5) {
                    Assertion::DoPart { agent, action, group, expr }
                } else {
                    Assertion::DonePart { agent, action, group, expr }
                }
            }
            _ => Assertion::Atom(v.atom(rng)),
        };
    }
    let d = depth - 1;
    match rng.random_range(0..16) {
        0 | 1 => Assertion::not(formula_at(rng, v, d, s, cb)),
        2 => Assertion::and(formula_at(rng, v, d, s, cb), formula_at(rng, v, d, s, cb)),
        3 => Assertion::or(formula_at(rng, v, d, s, cb), formula_at(rng, v, d, s, cb)),
        4 => Assertion::implies(formula_at(rng, v, d, s, cb), formula_at(rng, v, d, s, cb)),
        5 => Assertion::boxed(small_event(rng), formula_at(rng, v, d, s, cb)),
        6 => Assertion::diamond(small_event(rng), formula_at(rng, v, d, s, cb)),
        7 => Assertion::belief(v.agent(rng), formula_at(rng, v, d, s, cb)),
        8 => Assertion::goal(v.agent(rng), formula_at(rng, v, d, s, cb)),
        9 => Assertion::EveryoneBelieves(v.group(rng), Box::new(formula_at(rng, v, d, s, cb))),
        10 if *cb > 0 => {
            *cb -= 1;
            Assertion::common_belief(v.group(rng), formula_at(rng, v, d, s, cb))
        }
        11 => Assertion::AbleTo(v.agent(rng), Box::new(propositional(rng, v, 2))),
        12 => Assertion::Attempt(v.actor(rng), Box::new(propositional(rng, v, 2))),
        13 => Assertion::Stit(v.actor(rng), Box::new(propositional(rng, v, 2))),
        _ => formula_at(rng, v, d, s, cb),
    }
}
