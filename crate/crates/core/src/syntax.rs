//! Abstract syntax for actions, events, assertions, and the practice-level
//! constructs layered on top of them.
//!
//! Identifiers are already resolved to indices into a
//! [`KripkeModel`](crate::model::KripkeModel); the textual front end lives in
//! the std companion crate.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::ids::{ActionId, AgentId, AtomId, ContextId, Group, ObjectId, RoleId, ValueId};

/// Who performs an action: an explicit coalition or whichever actors
/// currently play a role.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Actor {
    Group(Group),
    Role(RoleId),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionExpr {
    Atom(ActionId),
    Skip,
    Neg(Box<ActionExpr>),
    Choice(Box<ActionExpr>, Box<ActionExpr>),
    Par(Box<ActionExpr>, Box<ActionExpr>),
    Seq(Box<ActionExpr>, Box<ActionExpr>),
    /// "any action that achieves φ", resolved against the world it starts in.
    Achieving(Box<Assertion>),
}

impl ActionExpr {
    pub fn seq(a: ActionExpr, b: ActionExpr) -> ActionExpr {
        ActionExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn par(a: ActionExpr, b: ActionExpr) -> ActionExpr {
        ActionExpr::Par(Box::new(a), Box::new(b))
    }

    pub fn choice(a: ActionExpr, b: ActionExpr) -> ActionExpr {
        ActionExpr::Choice(Box::new(a), Box::new(b))
    }

    pub fn neg(a: ActionExpr) -> ActionExpr {
        ActionExpr::Neg(Box::new(a))
    }

    /// Atomic actions occurring anywhere in the expression (the basic
    /// actions `act(α)`); achieving leaves contribute nothing.
    pub fn atoms(&self) -> BTreeSet<ActionId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<ActionId>) {
        match self {
            ActionExpr::Atom(a) => {
                out.insert(*a);
            }
            ActionExpr::Skip | ActionExpr::Achieving(_) => {}
            ActionExpr::Neg(a) => a.collect_atoms(out),
            ActionExpr::Choice(a, b) | ActionExpr::Par(a, b) | ActionExpr::Seq(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn has_achieving(&self) -> bool {
        match self {
            ActionExpr::Achieving(_) => true,
            ActionExpr::Atom(_) | ActionExpr::Skip => false,
            ActionExpr::Neg(a) => a.has_achieving(),
            ActionExpr::Choice(a, b) | ActionExpr::Par(a, b) | ActionExpr::Seq(a, b) => {
                a.has_achieving() || b.has_achieving()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventExpr {
    /// `A:α`
    Do(Actor, ActionExpr),
    Skip,
    Neg(Box<EventExpr>),
    Choice(Box<EventExpr>, Box<EventExpr>),
    Par(Box<EventExpr>, Box<EventExpr>),
    Seq(Box<EventExpr>, Box<EventExpr>),
}

impl EventExpr {
    pub fn agent(a: AgentId, act: ActionExpr) -> EventExpr {
        EventExpr::Do(Actor::Group(Group::singleton(a)), act)
    }

    pub fn group(g: Group, act: ActionExpr) -> EventExpr {
        EventExpr::Do(Actor::Group(g), act)
    }

    pub fn seq(a: EventExpr, b: EventExpr) -> EventExpr {
        EventExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn par(a: EventExpr, b: EventExpr) -> EventExpr {
        EventExpr::Par(Box::new(a), Box::new(b))
    }

    pub fn choice(a: EventExpr, b: EventExpr) -> EventExpr {
        EventExpr::Choice(Box::new(a), Box::new(b))
    }

    pub fn neg(a: EventExpr) -> EventExpr {
        EventExpr::Neg(Box::new(a))
    }

    /// Basic actions mentioned, paired with who is said to perform them.
    pub fn performances(&self) -> Vec<(Actor, ActionId)> {
        let mut out = Vec::new();
        self.collect_performances(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_performances(&self, out: &mut Vec<(Actor, ActionId)>) {
        match self {
            EventExpr::Do(actor, act) => {
                for a in act.atoms() {
                    out.push((actor.clone(), a));
                }
            }
            EventExpr::Skip => {}
            EventExpr::Neg(e) => e.collect_performances(out),
            EventExpr::Choice(a, b) | EventExpr::Par(a, b) | EventExpr::Seq(a, b) => {
                a.collect_performances(out);
                b.collect_performances(out);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeonticKind {
    Obligation,
    Prohibition,
    Permission,
}

impl DeonticKind {
    pub fn letter(self) -> char {
        match self {
            DeonticKind::Obligation => 'O',
            DeonticKind::Prohibition => 'F',
            DeonticKind::Permission => 'P',
        }
    }
}

/// An ADIC(O) norm bound to a role.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Norm {
    pub kind: DeonticKind,
    pub role: RoleId,
    pub condition: Assertion,
    pub action: ActionExpr,
    /// Absent only for permissions.
    pub sanction: Option<ActionExpr>,
    pub violation: AtomId,
    /// Violation atom of the obligation created by the sanction.
    pub sanction_violation: Option<AtomId>,
}

/// A trigger-action expectation. `weak` selects the attempt form
/// `H_B(DONE(B:γ))` instead of `DO(B:γ)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strategy {
    pub condition: Assertion,
    pub actors: Actor,
    pub action: ActionExpr,
    pub weak: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Purpose {
    /// `purpose(a:α, c, φ)`
    Basic { agent: AgentId, action: ActionExpr, context: ContextId, goal: Assertion },
    /// `purpose(α, c, φ)`
    General { action: ActionExpr, context: ContextId, goal: Assertion },
    /// `purpose(a, γ, c, φ)`
    Complex { agent: AgentId, action: ActionExpr, context: ContextId, goal: Assertion },
    /// `purpose({a,b}, γ, c, φ)`
    Group { group: Group, action: ActionExpr, context: ContextId, goal: Assertion },
    /// `purpose(r, γ, c, φ)`
    Role { role: RoleId, action: ActionExpr, context: ContextId, goal: Assertion },
    /// `purpose(sp, φ)`
    Practice { practice: ContextId, goal: Assertion },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountsAs {
    pub context: ContextId,
    pub role: RoleId,
    pub performed: ActionExpr,
    pub counts_as: ActionExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueLink {
    pub practice: ContextId,
    pub role: RoleId,
    pub action: ActionExpr,
    pub value: ValueId,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    True,
    False,
    /// Propositions and violation atoms alike.
    Atom(AtomId),
    Not(Box<Assertion>),
    And(Box<Assertion>, Box<Assertion>),
    Or(Box<Assertion>, Box<Assertion>),
    Implies(Box<Assertion>, Box<Assertion>),
    Done(EventExpr),
    Do(EventExpr),
    Cap(AgentId, ActionExpr),
    Box(EventExpr, Box<Assertion>),
    Diamond(EventExpr, Box<Assertion>),
    Belief(AgentId, Box<Assertion>),
    EveryoneBelieves(Group, Box<Assertion>),
    CommonBelief(Group, Box<Assertion>),
    Goal(AgentId, Box<Assertion>),
    /// `DO(a, b, A:α)`: `a` performs `b` as its part of `A` doing `α`.
    DoPart { agent: AgentId, action: ActionId, group: Group, expr: ActionExpr },
    DonePart { agent: AgentId, action: ActionId, group: Group, expr: ActionExpr },
    /// `G_a α`
    Able(AgentId, ActionExpr),
    /// `G_a φ`
    AbleTo(AgentId, Box<Assertion>),
    /// `H_B φ`
    Attempt(Actor, Box<Assertion>),
    /// `E_B φ`
    Stit(Actor, Box<Assertion>),
    /// `O(ξ)`, `F(ξ)`, `P(ξ)` against a violation atom.
    Deontic { kind: DeonticKind, violation: AtomId, event: EventExpr },
    RoleNorm(Box<Norm>),
    Purpose(Box<Purpose>),
    Strategy(Box<Strategy>, ContextId),
    CountsAs(Box<CountsAs>),
    Promotes(Box<ValueLink>),
    Demotes(Box<ValueLink>),
    Affords(BTreeSet<ObjectId>, ActionExpr, ContextId),
    Available(BTreeSet<ObjectId>, ContextId),
    Play(AgentId, RoleId, ContextId),
    Active(ContextId),
    StartCond(ContextId, Box<Assertion>),
    EndCond(ContextId, Box<Assertion>),
    /// `Salient(A:γ, c)`; only the actor and context affect the verdict.
    Salient(Actor, ActionExpr, ContextId),
}

impl Assertion {
    pub fn not(a: Assertion) -> Assertion {
        Assertion::Not(Box::new(a))
    }

    pub fn and(a: Assertion, b: Assertion) -> Assertion {
        Assertion::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Assertion, b: Assertion) -> Assertion {
        Assertion::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Assertion, b: Assertion) -> Assertion {
        Assertion::Implies(Box::new(a), Box::new(b))
    }

    pub fn boxed(e: EventExpr, a: Assertion) -> Assertion {
        Assertion::Box(e, Box::new(a))
    }

    pub fn diamond(e: EventExpr, a: Assertion) -> Assertion {
        Assertion::Diamond(e, Box::new(a))
    }

    pub fn belief(a: AgentId, p: Assertion) -> Assertion {
        Assertion::Belief(a, Box::new(p))
    }

    pub fn common_belief(g: Group, p: Assertion) -> Assertion {
        Assertion::CommonBelief(g, Box::new(p))
    }

    pub fn goal(a: AgentId, p: Assertion) -> Assertion {
        Assertion::Goal(a, Box::new(p))
    }

    /// Right-nested conjunction; `True` for an empty list.
    pub fn conjunction<I: IntoIterator<Item = Assertion>>(items: I) -> Assertion {
        let mut v: Vec<Assertion> = items.into_iter().collect();
        match v.pop() {
            None => Assertion::True,
            Some(last) => v.into_iter().rev().fold(last, |acc, a| Assertion::and(a, acc)),
        }
    }

    /// Right-nested disjunction; `False` for an empty list.
    pub fn disjunction<I: IntoIterator<Item = Assertion>>(items: I) -> Assertion {
        let mut v: Vec<Assertion> = items.into_iter().collect();
        match v.pop() {
            None => Assertion::False,
            Some(last) => v.into_iter().rev().fold(last, |acc, a| Assertion::or(a, acc)),
        }
    }

    /// Top-level conjuncts.
    pub fn conjuncts(&self) -> Vec<&Assertion> {
        match self {
            Assertion::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => alloc::vec![other],
        }
    }

    /// Propositional and violation atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<AtomId> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomId>) {
        use Assertion::*;
        match self {
            Atom(p) => {
                out.insert(*p);
            }
            Not(a) | Belief(_, a) | EveryoneBelieves(_, a) | CommonBelief(_, a) | Goal(_, a)
            | AbleTo(_, a) | Attempt(_, a) | Stit(_, a) | Box(_, a) | Diamond(_, a)
            | StartCond(_, a) | EndCond(_, a) => a.collect_atoms(out),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Deontic { violation, .. } => {
                out.insert(*violation);
            }
            _ => {}
        }
    }

    /// Syntactic depth, counting every connective and modality.
    pub fn depth(&self) -> usize {
        use Assertion::*;
        match self {
            Not(a) | Belief(_, a) | EveryoneBelieves(_, a) | CommonBelief(_, a) | Goal(_, a)
            | AbleTo(_, a) | Attempt(_, a) | Stit(_, a) | Box(_, a) | Diamond(_, a)
            | StartCond(_, a) | EndCond(_, a) => 1 + a.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) => 1 + a.depth().max(b.depth()),
            _ => 1,
        }
    }
}
