//! Human-readable descriptions of core diagnostics.

use socprac_core::checker::AffordanceViolation;
use socprac_core::model::{KripkeModel, Note, Violation};

use crate::expr::Printer;

pub fn violation(m: &KripkeModel, v: &Violation) -> String {
    let w = |x| m.world_name(x);
    let a = |x| m.agent_name(x);
    match v {
        Violation::BeliefNotSerial { agent, world } => {
            format!("beliefs of `{}` are not serial: `{}` has no belief successor", a(*agent), w(*world))
        }
        Violation::BeliefNotSymmetric { agent, from, to } => format!(
            "beliefs of `{}` are not symmetric: `{}` -> `{}` without the reverse",
            a(*agent),
            w(*from),
            w(*to)
        ),
        Violation::BeliefNotTransitive { agent, a: x, b: y, c: z } => format!(
            "beliefs of `{}` are not transitive: `{}` -> `{}` -> `{}`",
            a(*agent),
            w(*x),
            w(*y),
            w(*z)
        ),
        Violation::GoalNotSerial { agent, world } => {
            format!("goals of `{}` are not serial: `{}` has no goal successor", a(*agent), w(*world))
        }
        Violation::GoalNotTransitive { agent, a: x, b: y, c: z } => format!(
            "goals of `{}` are not transitive: `{}` -> `{}` -> `{}`",
            a(*agent),
            w(*x),
            w(*y),
            w(*z)
        ),
        Violation::OrderCycle { cycle } => {
            let names: Vec<&str> = cycle.iter().map(|&x| w(x)).collect();
            format!("execution order has a cycle: {}", names.join(" -> "))
        }
        Violation::OrderBeliefCoupling { agent, earlier, later, viewer } => format!(
            "`{}` at `{}` considers only one of `{}` and its later world `{}` possible",
            a(*agent),
            w(*viewer),
            w(*earlier),
            w(*later)
        ),
        Violation::SkipNotIdentity { world, target } => {
            format!("skip leaves `{}` for `{}`", w(*world), w(*target))
        }
        Violation::ContextNotConnected { context, a: x, b: y } => format!(
            "context `{}` is not connected: `{}` and `{}`",
            m.context_name(*context),
            w(*x),
            w(*y)
        ),
        Violation::EnactmentOutsideContext { enactment } => format!(
            "`{}` enacts `{}` at `{}` outside context `{}`",
            a(enactment.agent),
            m.role_name(enactment.role),
            w(enactment.world),
            m.context_name(enactment.context)
        ),
        Violation::ValueOrderReflexive { value, world } => {
            format!("value `{}` ranks `{}` above itself", m.value_order(*value).name, w(*world))
        }
        Violation::ValueOrderNotTransitive { value, a: x, b: y, c: z } => format!(
            "value `{}` is not transitive: `{}` < `{}` < `{}`",
            m.value_order(*value).name,
            w(*x),
            w(*y),
            w(*z)
        ),
    }
}

pub fn note(m: &KripkeModel, n: &Note) -> String {
    match n {
        Note::OrderNotSerial { worlds } => {
            let names: Vec<&str> = worlds.iter().map(|&x| m.world_name(x)).collect();
            format!("execution order ends at: {}", names.join(", "))
        }
    }
}

pub fn affordance(m: &KripkeModel, v: &AffordanceViolation) -> String {
    let fact = &m.affordances()[v.fact];
    let pr = Printer::new(m);
    format!(
        "{} affords {} in `{}` and is available at `{}`, but `{}` is not able to",
        pr.objects(&fact.objects),
        pr.action(&fact.action),
        m.context_name(fact.context),
        m.world_name(v.world),
        m.agent_name(v.agent)
    )
}
