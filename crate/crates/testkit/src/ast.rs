//! Random syntax trees over a model's names, for parser round trips.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;

use socprac_core::event::enumerate_steps;
use socprac_core::ids::{ActSet, ActionId, AgentId, AtomId, ContextId, Group, ObjectId, RoleId, ValueId, WorldId};
use socprac_core::model::{
    AffordanceFact, AvailabilityFact, Context, Enactment, Kind, KripkeModel, ModelBuilder,
};
use socprac_core::practice::{PlanPattern, SocialPractice};
use socprac_core::syntax::{
    ActionExpr, Actor, Assertion, CountsAs, DeonticKind, EventExpr, Norm, Purpose, Strategy, ValueLink,
};

/// A model using every declaration kind: social actions and atoms,
/// violation atoms, roles, objects, values, several contexts, affordances
/// and availability.
pub fn random_rich_model<R: Rng>(rng: &mut R) -> KripkeModel {
    let mut b = ModelBuilder::new();
    let n_agents = rng.random_range(1..=3);
    let n_actions = rng.random_range(1..=2);
    let agents: Vec<AgentId> = (0..n_agents).map(|i| b.agent(&format!("a{i}")).unwrap()).collect();
    let actions: Vec<ActionId> = (0..n_actions)
        .map(|i| {
            let kind = if rng.random_bool(0.3) { Kind::Social } else { Kind::Physical };
            b.action(&format!("b{i}"), kind).unwrap()
        })
        .collect();
    let mut atoms: Vec<AtomId> = (0..rng.random_range(1..=4))
        .map(|i| {
            let kind = if rng.random_bool(0.3) { Kind::Social } else { Kind::Physical };
            b.atom(&format!("p{i}"), kind).unwrap()
        })
        .collect();
    let nv = rng.random_range(0..=2);
    b.violations(nv).unwrap();
    for k in 1..=nv {
        atoms.push(b.atom_id(&format!("V#{k}")).unwrap());
    }
    let roles: Vec<RoleId> = (0..rng.random_range(1..=3)).map(|i| b.role(&format!("r{i}")).unwrap()).collect();
    let objects: Vec<ObjectId> = (0..rng.random_range(0..=3)).map(|i| b.object(&format!("o{i}")).unwrap()).collect();
    let values: Vec<ValueId> = (0..rng.random_range(0..=2)).map(|i| b.value(&format!("v{i}")).unwrap()).collect();
    let n = rng.random_range(1..=8);
    let worlds: Vec<WorldId> = (0..n).map(|i| b.world(&format!("w{i}")).unwrap()).collect();
    let steps: Vec<_> =
        enumerate_steps(n_agents, n_actions, 100_000).unwrap().into_iter().filter(|s| !s.is_skip()).collect();
    for &w in &worlds {
        for &p in &atoms {
            if rng.random_bool(0.4) {
                b.set_true(w, p);
            }
        }
        let k = rng.random_range(0..=2usize.min(steps.len()));
        for s in steps.choose_multiple(rng, k) {
            let to = worlds[rng.random_range(0..n)];
            b.transition(w, s.sparse(), to);
        }
        for &a in &agents {
            for _ in 0..rng.random_range(1..=2) {
                let u = worlds[rng.random_range(0..n)];
                b.belief(a, w, u);
            }
            let u = worlds[rng.random_range(0..n)];
            b.goal(a, w, u);
        }
    }
    for i in 1..n {
        if rng.random_bool(0.6) {
            let j = rng.random_range(0..i);
            b.order(worlds[j], worlds[i]);
        }
    }
    for &a in &agents {
        let mask: u64 = rng.random_range(0..1u64 << n_actions);
        b.capability(a, ActSet(mask));
    }
    for &v in &values {
        for _ in 0..rng.random_range(0..=3) {
            let (x, y) = (worlds[rng.random_range(0..n)], worlds[rng.random_range(0..n)]);
            if x != y {
                b.value_pair(v, x, y);
            }
        }
    }
    let n_ctx = rng.random_range(1..=2);
    for ci in 0..n_ctx {
        let ws: BTreeSet<WorldId> = worlds.iter().copied().filter(|_| rng.random_bool(0.7)).collect();
        let ws = if ws.is_empty() { [worlds[0]].into_iter().collect() } else { ws };
        let rs: BTreeSet<RoleId> = roles.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        let os: BTreeSet<ObjectId> = objects.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        let places = (0..rng.random_range(0..=2)).map(|i| format!("place{i}")).collect();
        let actors = agents.iter().filter(|_| rng.random_bool(0.7)).fold(Group::EMPTY, |g, &a| g.with(a));
        let c = b
            .context(Context {
                name: format!("c{ci}"),
                worlds: ws.clone(),
                roles: rs.clone(),
                actors,
                objects: os.clone(),
                places,
            })
            .unwrap();
        for &w in &ws {
            for &a in &agents {
                if let Some(&r) = rs.iter().copied().collect::<Vec<_>>().choose(rng) {
                    if rng.random_bool(0.4) {
                        b.enact(Enactment { agent: a, role: r, context: c, world: w });
                    }
                }
            }
        }
        if !os.is_empty() {
            let pool: Vec<ObjectId> = os.iter().copied().collect();
            for _ in 0..rng.random_range(0..=2) {
                let k = rng.random_range(1..=pool.len());
                let objs: BTreeSet<ObjectId> = pool.choose_multiple(rng, k).copied().collect();
                b.affords(AffordanceFact {
                    objects: objs.clone(),
                    action: ActionExpr::Atom(*actions.choose(rng).unwrap()),
                    context: c,
                });
                let at = if rng.random_bool(0.5) {
                    None
                } else {
                    Some(ws.iter().copied().filter(|_| rng.random_bool(0.5)).chain([*ws.iter().next().unwrap()]).collect())
                };
                b.available(AvailabilityFact { objects: objs, context: c, worlds: at });
            }
        }
    }
    b.build().unwrap()
}

/// Generator of syntax trees whose identifiers all exist in `m`.
pub struct AstGen<'m> {
    pub m: &'m KripkeModel,
    agents: Vec<AgentId>,
    actions: Vec<ActionId>,
    atoms: Vec<AtomId>,
    roles: Vec<RoleId>,
    objects: Vec<ObjectId>,
    values: Vec<ValueId>,
    contexts: Vec<ContextId>,
}

impl<'m> AstGen<'m> {
    pub fn new(m: &'m KripkeModel) -> AstGen<'m> {
        AstGen {
            m,
            agents: m.agents().collect(),
            actions: m.actions().collect(),
            atoms: m.atoms().collect(),
            roles: m.roles().collect(),
            objects: m.objects().collect(),
            values: (0..m.value_orders().len() as u32).map(ValueId).collect(),
            contexts: m.contexts().collect(),
        }
    }

    fn pick<T: Copy, R: Rng>(rng: &mut R, v: &[T]) -> T {
        *v.choose(rng).expect("non-empty vocabulary")
    }

    pub fn agent<R: Rng>(&self, rng: &mut R) -> AgentId {
        Self::pick(rng, &self.agents)
    }

    pub fn group<R: Rng>(&self, rng: &mut R) -> Group {
        let g = self.agents.iter().filter(|_| rng.random_bool(0.5)).fold(Group::EMPTY, |g, &a| g.with(a));
        if g.is_empty() {
            Group::singleton(self.agent(rng))
        } else {
            g
        }
    }

    pub fn actor<R: Rng>(&self, rng: &mut R) -> Actor {
        if !self.roles.is_empty() && rng.random_bool(0.3) {
            Actor::Role(Self::pick(rng, &self.roles))
        } else {
            Actor::Group(self.group(rng))
        }
    }

    fn role<R: Rng>(&self, rng: &mut R) -> RoleId {
        Self::pick(rng, &self.roles)
    }

    fn context<R: Rng>(&self, rng: &mut R) -> ContextId {
        Self::pick(rng, &self.contexts)
    }

    fn objects<R: Rng>(&self, rng: &mut R) -> BTreeSet<ObjectId> {
        self.objects.iter().copied().filter(|_| rng.random_bool(0.5)).collect()
    }

    fn violation<R: Rng>(&self, rng: &mut R, sanction: bool) -> Option<(AtomId, Option<AtomId>)> {
        let n = self.m.violation_count();
        if n == 0 {
            return None;
        }
        let k = rng.random_range(1..=n);
        let v = self.m.atom_id(&format!("V#{k}")).unwrap();
        let s = sanction.then(|| self.m.atom_id(&format!("V#{k}s")).unwrap());
        Some((v, s))
    }

    pub fn action<R: Rng>(&self, rng: &mut R, depth: usize) -> ActionExpr {
        let leaf = depth == 0 || rng.random_bool(0.3);
        if leaf {
            return match rng.random_range(0..10) {
                0 => ActionExpr::Skip,
                1 if depth > 0 => ActionExpr::Achieving(Box::new(self.assertion(rng, depth - 1))),
                _ => ActionExpr::Atom(Self::pick(rng, &self.actions)),
            };
        }
        let d = depth - 1;
        match rng.random_range(0..4) {
            0 => ActionExpr::neg(self.action(rng, d)),
            1 => ActionExpr::choice(self.action(rng, d), self.action(rng, d)),
            2 => ActionExpr::par(self.action(rng, d), self.action(rng, d)),
            _ => ActionExpr::seq(self.action(rng, d), self.action(rng, d)),
        }
    }

    pub fn event<R: Rng>(&self, rng: &mut R, depth: usize) -> EventExpr {
        if depth == 0 || rng.random_bool(0.3) {
            if rng.random_bool(0.1) {
                return EventExpr::Skip;
            }
            return EventExpr::Do(self.actor(rng), self.action(rng, depth.min(2)));
        }
        let d = depth - 1;
        match rng.random_range(0..4) {
            0 => EventExpr::neg(self.event(rng, d)),
            1 => EventExpr::choice(self.event(rng, d), self.event(rng, d)),
            2 => EventExpr::par(self.event(rng, d), self.event(rng, d)),
            _ => EventExpr::seq(self.event(rng, d), self.event(rng, d)),
        }
    }

    pub fn norm<R: Rng>(&self, rng: &mut R, depth: usize, roles: &[RoleId]) -> Option<Norm> {
        let kind = *[DeonticKind::Obligation, DeonticKind::Prohibition, DeonticKind::Permission].choose(rng).unwrap();
        let sanctioned = kind != DeonticKind::Permission && rng.random_bool(0.5);
        let (violation, sanction_violation) = self.violation(rng, sanctioned)?;
        Some(Norm {
            kind,
            role: Self::pick(rng, roles),
            condition: self.assertion(rng, depth),
            action: self.action(rng, depth),
            sanction: sanctioned.then(|| self.action(rng, depth)),
            violation,
            sanction_violation,
        })
    }

    fn purpose<R: Rng>(&self, rng: &mut R, d: usize) -> Purpose {
        let context = self.context(rng);
        let goal = self.assertion(rng, d);
        let action = self.action(rng, d);
        match rng.random_range(0..6) {
            0 => Purpose::Basic { agent: self.agent(rng), action, context, goal },
            1 => Purpose::General { action, context, goal },
            2 => Purpose::Complex { agent: self.agent(rng), action, context, goal },
            3 => Purpose::Group { group: self.group(rng), action, context, goal },
            4 => Purpose::Role { role: self.role(rng), action, context, goal },
            _ => Purpose::Practice { practice: context, goal },
        }
    }

    pub fn assertion<R: Rng>(&self, rng: &mut R, depth: usize) -> Assertion {
        if depth == 0 || rng.random_bool(0.2) {
            return match rng.random_range(0..8) {
                0 => Assertion::True,
                1 => Assertion::False,
                _ => Assertion::Atom(Self::pick(rng, &self.atoms)),
            };
        }
        let d = depth - 1;
        let sub = |rng: &mut R| Box::new(self.assertion(rng, d));
        match rng.random_range(0..36) {
            0 => Assertion::Not(sub(rng)),
            1 => Assertion::And(sub(rng), sub(rng)),
            2 => Assertion::Or(sub(rng), sub(rng)),
            3 => Assertion::Implies(sub(rng), sub(rng)),
            4 => Assertion::Done(self.event(rng, d)),
            5 => Assertion::Do(self.event(rng, d)),
            6 => Assertion::Cap(self.agent(rng), self.action(rng, d)),
            7 => Assertion::Box(self.event(rng, d), sub(rng)),
            8 => Assertion::Diamond(self.event(rng, d), sub(rng)),
            9 => Assertion::Belief(self.agent(rng), sub(rng)),
            10 => Assertion::EveryoneBelieves(self.group(rng), sub(rng)),
            11 => Assertion::CommonBelief(self.group(rng), sub(rng)),
            12 => Assertion::Goal(self.agent(rng), sub(rng)),
            13 => Assertion::DoPart {
                agent: self.agent(rng),
                action: Self::pick(rng, &self.actions),
                group: self.group(rng),
                expr: self.action(rng, d),
            },
            14 => Assertion::DonePart {
                agent: self.agent(rng),
                action: Self::pick(rng, &self.actions),
                group: self.group(rng),
                expr: self.action(rng, d),
            },
            15 => Assertion::Able(self.agent(rng), self.action(rng, d)),
            16 => Assertion::AbleTo(self.agent(rng), sub(rng)),
            17 => Assertion::Attempt(self.actor(rng), sub(rng)),
            18 => Assertion::Stit(self.actor(rng), sub(rng)),
            19 => match self.violation(rng, false) {
                Some((violation, _)) => Assertion::Deontic {
                    kind: *[DeonticKind::Obligation, DeonticKind::Prohibition, DeonticKind::Permission]
                        .choose(rng)
                        .unwrap(),
                    violation,
                    event: self.event(rng, d),
                },
                None => Assertion::True,
            },
            20 if !self.roles.is_empty() => match self.norm(rng, d, &self.roles) {
                Some(n) => Assertion::RoleNorm(Box::new(n)),
                None => Assertion::False,
            },
            21 => Assertion::Purpose(Box::new(self.purpose(rng, d))),
            22 => Assertion::Strategy(
                Box::new(Strategy {
                    condition: self.assertion(rng, d),
                    actors: self.actor(rng),
                    action: self.action(rng, d),
                    weak: rng.random_bool(0.5),
                }),
                self.context(rng),
            ),
            23 if !self.roles.is_empty() => Assertion::CountsAs(Box::new(CountsAs {
                context: self.context(rng),
                role: self.role(rng),
                performed: self.action(rng, d),
                counts_as: self.action(rng, d),
            })),
            24 | 25 if !self.roles.is_empty() && !self.values.is_empty() => {
                let link = Box::new(ValueLink {
                    practice: self.context(rng),
                    role: self.role(rng),
                    action: self.action(rng, d),
                    value: Self::pick(rng, &self.values),
                });
                if rng.random_bool(0.5) {
                    Assertion::Promotes(link)
                } else {
                    Assertion::Demotes(link)
                }
            }
            26 => Assertion::Affords(self.objects(rng), self.action(rng, d), self.context(rng)),
            27 => Assertion::Available(self.objects(rng), self.context(rng)),
            28 if !self.roles.is_empty() => Assertion::Play(self.agent(rng), self.role(rng), self.context(rng)),
            29 => Assertion::Active(self.context(rng)),
            30 => Assertion::StartCond(self.context(rng), sub(rng)),
            31 => Assertion::EndCond(self.context(rng), sub(rng)),
            32 => Assertion::Salient(self.actor(rng), self.action(rng, d), self.context(rng)),
            _ => Assertion::And(sub(rng), sub(rng)),
        }
    }

    pub fn pattern<R: Rng>(&self, rng: &mut R, depth: usize) -> PlanPattern {
        if depth == 0 || rng.random_bool(0.3) {
            return PlanPattern::leaf(self.event(rng, 2), self.assertion(rng, 2));
        }
        let d = depth - 1;
        match rng.random_range(0..3) {
            0 => PlanPattern::seq(self.pattern(rng, d), self.pattern(rng, d)),
            1 => PlanPattern::choice(self.pattern(rng, d), self.pattern(rng, d)),
            _ => PlanPattern::par(self.pattern(rng, d), self.pattern(rng, d)),
        }
    }

    /// A practice whose role references stay inside its declared roles.
    pub fn practice<R: Rng>(&self, rng: &mut R, name: &str) -> SocialPractice {
        let context = self.context(rng);
        let mut sp = SocialPractice::new(name, context);
        let d = 2;
        let roles: Vec<RoleId> = self.roles.iter().copied().filter(|_| rng.random_bool(0.7)).collect();
        sp.roles = roles.iter().copied().collect();
        sp.actors = if rng.random_bool(0.9) { self.group(rng) } else { Group::EMPTY };
        sp.resources = self.objects(rng);
        if !self.objects.is_empty() {
            for _ in 0..rng.random_range(0..=2) {
                sp.affordances.push((self.objects(rng), self.action(rng, 1)));
            }
        }
        sp.places = (0..rng.random_range(0..=2)).map(|i| format!("place{i}")).collect();
        sp.purpose = (0..rng.random_range(0..=2)).map(|_| self.assertion(rng, d)).collect();
        if !roles.is_empty() {
            if !self.values.is_empty() {
                for _ in 0..rng.random_range(0..=2) {
                    sp.promotes.push(ValueLink {
                        practice: context,
                        role: Self::pick(rng, &roles),
                        action: self.action(rng, d),
                        value: Self::pick(rng, &self.values),
                    });
                }
            }
            for _ in 0..rng.random_range(0..=2) {
                sp.counts_as.push(CountsAs {
                    context,
                    role: Self::pick(rng, &roles),
                    performed: self.action(rng, d),
                    counts_as: self.action(rng, d),
                });
            }
            for _ in 0..rng.random_range(0..=2) {
                if let Some(n) = self.norm(rng, d, &roles) {
                    sp.norms.push(n);
                }
            }
            let mut req = BTreeMap::new();
            for &r in &roles {
                if rng.random_bool(0.5) {
                    let acts = self.actions.iter().filter(|_| rng.random_bool(0.5)).fold(ActSet::EMPTY, |s, &a| {
                        s.union(ActSet::singleton(a))
                    });
                    req.insert(r, acts);
                }
            }
            sp.requirements = req;
        }
        sp.plan_patterns = (0..rng.random_range(0..=2)).map(|_| self.pattern(rng, 3)).collect();
        for _ in 0..rng.random_range(0..=2) {
            let actors = match roles.choose(rng) {
                Some(&r) if rng.random_bool(0.5) => Actor::Role(r),
                _ => Actor::Group(self.group(rng)),
            };
            sp.strategies.push(Strategy {
                condition: self.assertion(rng, d),
                actors,
                action: self.action(rng, d),
                weak: rng.random_bool(0.5),
            });
        }
        sp.start = self.assertion(rng, d);
        sp.end = self.assertion(rng, d);
        sp.actions = self.actions.iter().filter(|_| rng.random_bool(0.4)).fold(ActSet::EMPTY, |s, &a| s.union(ActSet::singleton(a)));
        sp
    }
}
