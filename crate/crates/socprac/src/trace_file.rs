//! JSON-lines and text renderings of execution traces.
//!
//! A trace file is one `header` object, one `step` object per executed
//! step, and a closing `end` object. Names are model names throughout.

use serde::{Deserialize, Serialize};

use socprac_core::event::Step;
use socprac_core::ids::{ActSet, Group, StepId};
use socprac_core::model::KripkeModel;
use socprac_core::sim::{ExecutionTrace, FireReason, Outcome, TraceRecord};

use crate::expr::Printer;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepPart {
    pub group: Vec<String>,
    pub acts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceLine {
    Header {
        practice: String,
        seed: u64,
        start: String,
    },
    Step {
        tick: usize,
        from: String,
        to: String,
        step: Vec<StepPart>,
        reason: String,
        branch: Option<usize>,
        phase: Option<usize>,
        active_norms: Vec<usize>,
        violations: Vec<String>,
        social_effects: Vec<String>,
        shadowed: Vec<usize>,
        note: Option<String>,
    },
    End {
        outcome: String,
        end: String,
        violations: Vec<String>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum TraceFileError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: unknown {what} `{name}`")]
    Unknown { line: usize, what: &'static str, name: String },
    #[error("{0}")]
    Structure(String),
}

fn step_parts(m: &KripkeModel, s: StepId) -> Vec<StepPart> {
    m.step(s)
        .sparse()
        .into_iter()
        .map(|(g, acts)| StepPart {
            group: g.agents().map(|a| m.agent_name(a).to_string()).collect(),
            acts: acts.actions().map(|a| m.action_name(a).to_string()).collect(),
        })
        .collect()
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::ReachedEnd => "reached_end",
        Outcome::TickBudget => "tick_budget",
    }
}

pub fn trace_lines(m: &KripkeModel, t: &ExecutionTrace) -> Vec<TraceLine> {
    let atoms = |v: &[socprac_core::ids::AtomId]| v.iter().map(|&p| m.atom_name(p).to_string()).collect::<Vec<_>>();
    let mut out = vec![TraceLine::Header {
        practice: t.practice.clone(),
        seed: t.seed,
        start: m.world_name(t.start).into(),
    }];
    for r in &t.records {
        out.push(TraceLine::Step {
            tick: r.tick,
            from: m.world_name(r.from).into(),
            to: m.world_name(r.to).into(),
            step: step_parts(m, r.step),
            reason: r.reason.as_str().into(),
            branch: r.branch,
            phase: r.phase,
            active_norms: r.active_norms.clone(),
            violations: atoms(&r.violations),
            social_effects: atoms(&r.social_effects),
            shadowed: r.shadowed.clone(),
            note: r.note.clone(),
        });
    }
    out.push(TraceLine::End {
        outcome: outcome_name(t.outcome).into(),
        end: m.world_name(t.end()).into(),
        violations: atoms(&t.violations()),
    });
    out
}

pub fn trace_to_jsonl(m: &KripkeModel, t: &ExecutionTrace) -> String {
    let mut s = String::new();
    for l in trace_lines(m, t) {
        s.push_str(&serde_json::to_string(&l).expect("plain data serializes"));
        s.push('\n');
    }
    s
}

/// Reads a trace back, resolving names against `m`.
pub fn trace_from_jsonl(m: &KripkeModel, src: &str) -> Result<ExecutionTrace, TraceFileError> {
    let mut header = None;
    let mut records = Vec::new();
    let mut outcome = None;
    for (k, text) in src.lines().enumerate() {
        let line = k + 1;
        if text.trim().is_empty() {
            continue;
        }
        let tl: TraceLine = serde_json::from_str(text).map_err(|source| TraceFileError::Json { line, source })?;
        let world = |name: &str| {
            m.world_id(name).ok_or_else(|| TraceFileError::Unknown { line, what: "world", name: name.into() })
        };
        let atom = |name: &String| {
            m.atom_id(name).ok_or_else(|| TraceFileError::Unknown { line, what: "atom", name: name.clone() })
        };
        match tl {
            TraceLine::Header { practice, seed, start } => {
                if header.is_some() {
                    return Err(TraceFileError::Structure(format!("line {line}: second header")));
                }
                header = Some((practice, seed, world(&start)?));
            }
            TraceLine::Step {
                tick,
                from,
                to,
                step,
                reason,
                branch,
                phase,
                active_norms,
                violations,
                social_effects,
                shadowed,
                note,
            } => {
                let mut sparse = Vec::new();
                for part in &step {
                    let mut g = Group::EMPTY;
                    for a in &part.group {
                        g = g.with(m.agent_id(a).ok_or_else(|| TraceFileError::Unknown {
                            line,
                            what: "agent",
                            name: a.clone(),
                        })?);
                    }
                    let mut acts = ActSet::EMPTY;
                    for a in &part.acts {
                        acts = acts.union(ActSet::singleton(m.action_id(a).ok_or_else(|| {
                            TraceFileError::Unknown { line, what: "action", name: a.clone() }
                        })?));
                    }
                    sparse.push((g, acts));
                }
                let st = Step::complete(m.agent_count(), &sparse)
                    .map_err(|e| TraceFileError::Structure(format!("line {line}: {e}")))?;
                let step = m
                    .steps()
                    .id_of(&st)
                    .ok_or_else(|| TraceFileError::Structure(format!("line {line}: step occurs in no transition")))?;
                let reason = match reason.as_str() {
                    "plan" => FireReason::Plan,
                    "strategy" => FireReason::Strategy,
                    "replan" => FireReason::Replan,
                    other => {
                        return Err(TraceFileError::Unknown { line, what: "reason", name: other.into() });
                    }
                };
                records.push(TraceRecord {
                    tick,
                    from: world(&from)?,
                    step,
                    to: world(&to)?,
                    reason,
                    branch,
                    phase,
                    active_norms,
                    violations: violations.iter().map(atom).collect::<Result<_, _>>()?,
                    social_effects: social_effects.iter().map(atom).collect::<Result<_, _>>()?,
                    shadowed,
                    note,
                });
            }
            TraceLine::End { outcome: o, .. } => {
                outcome = Some(match o.as_str() {
                    "reached_end" => Outcome::ReachedEnd,
                    "tick_budget" => Outcome::TickBudget,
                    other => return Err(TraceFileError::Unknown { line, what: "outcome", name: other.into() }),
                });
            }
        }
    }
    let (practice, seed, start) = header.ok_or_else(|| TraceFileError::Structure("missing header line".into()))?;
    let outcome = outcome.ok_or_else(|| TraceFileError::Structure("missing end line".into()))?;
    Ok(ExecutionTrace { practice, seed, start, records, outcome })
}

/// Step in `{a}:x, {b}:y` notation, `skip` for the idle step.
pub fn step_text(m: &KripkeModel, s: StepId) -> String {
    let pr = Printer::new(m);
    let parts: Vec<String> = m
        .step(s)
        .sparse()
        .into_iter()
        .map(|(g, acts)| {
            let names: Vec<&str> = acts.actions().map(|a| m.action_name(a)).collect();
            format!("{}:{}", pr.group(g), names.join(" & "))
        })
        .collect();
    if parts.is_empty() {
        "skip".into()
    } else {
        parts.join(", ")
    }
}

pub fn trace_to_text(m: &KripkeModel, t: &ExecutionTrace) -> String {
    let mut s = format!("practice {} seed {} from {}\n", t.practice, t.seed, m.world_name(t.start));
    for r in &t.records {
        let mut line = format!(
            "{:>3} {} -> {} by {} [{}",
            r.tick,
            m.world_name(r.from),
            m.world_name(r.to),
            step_text(m, r.step),
            r.reason.as_str()
        );
        if let (Some(b), Some(p)) = (r.branch, r.phase) {
            line.push_str(&format!(" branch {b} phase {p}"));
        }
        line.push(']');
        if !r.violations.is_empty() {
            let v: Vec<&str> = r.violations.iter().map(|&p| m.atom_name(p)).collect();
            line.push_str(&format!(" violations: {}", v.join(", ")));
        }
        if !r.social_effects.is_empty() {
            let v: Vec<&str> = r.social_effects.iter().map(|&p| m.atom_name(p)).collect();
            line.push_str(&format!(" social: {}", v.join(", ")));
        }
        if !r.shadowed.is_empty() {
            line.push_str(&format!(" shadowed: {:?}", r.shadowed));
        }
        if let Some(n) = &r.note {
            line.push_str(&format!(" ({n})"));
        }
        s.push_str(&line);
        s.push('\n');
    }
    s.push_str(&format!("{} at {}\n", outcome_name(t.outcome), m.world_name(t.end())));
    s
}
