//! The command implementations behind the binary. Each returns its output
//! and exit code instead of printing, so tests can drive them directly.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use socprac_core::checker::{EvalError, EvalOptions, Evaluator};
use socprac_core::ids::{Group, RoleId, WorldId};
use socprac_core::model::{validate_model, KripkeModel};
use socprac_core::practice::{self, DeltaEntry, SocialPractice, Verdict};
use socprac_core::sim::{self, AgentPolicy, Compliance, SimError, SimOptions};

use crate::error::LangError;
use crate::expr::{parse_assertion, Printer};
use crate::model_file::parse_model;
use crate::practice_file::{parse_practices, print_practice};
use crate::query_file::{parse_queries, Query};
use crate::trace_file::{step_text, trace_from_jsonl, trace_to_jsonl, trace_to_text, TraceFileError};

/// Success, a failed property or query, or unusable input.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Jsonl,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// A parse or resolution error, already rendered with its source line.
    #[error("{0}")]
    Lang(String),
    #[error("{path}: {source}")]
    Trace { path: PathBuf, source: TraceFileError },
    #[error("{0}")]
    Eval(EvalError),
    #[error("{0}")]
    Usage(String),
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Eval(e)
    }
}

impl CliError {
    /// Exit code for this error. Evaluation limits count as failures of the
    /// run, everything else as bad input.
    pub fn code(&self) -> i32 {
        match self {
            CliError::Eval(_) => EXIT_FAILED,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn lang(path: &Path, src: &str, e: LangError) -> CliError {
    CliError::Lang(e.in_file(&path.display().to_string()).render(src))
}

pub fn load_model(path: &Path) -> Result<KripkeModel, CliError> {
    let src = read(path)?;
    parse_model(&src).map_err(|e| lang(path, &src, e))
}

pub fn load_practices(m: &KripkeModel, path: &Path) -> Result<Vec<SocialPractice>, CliError> {
    let src = read(path)?;
    parse_practices(&src, m).map_err(|e| lang(path, &src, e))
}

pub fn load_practice(m: &KripkeModel, path: &Path) -> Result<SocialPractice, CliError> {
    let mut all = load_practices(m, path)?;
    if all.len() != 1 {
        return Err(CliError::Usage(format!("{}: expected one practice, found {}", path.display(), all.len())));
    }
    Ok(all.pop().expect("one"))
}

fn world(m: &KripkeModel, name: &str) -> Result<WorldId, CliError> {
    m.world_id(name).ok_or_else(|| CliError::Usage(format!("unknown world `{name}`")))
}

pub fn validate(model: &Path, practices: &[PathBuf]) -> Result<Output, CliError> {
    let m = load_model(model)?;
    let report = validate_model(&m);
    let mut text = String::new();
    let mut failed = !report.is_valid();
    for v in &report.violations {
        text.push_str(&format!("violation: {}\n", crate::report::violation(&m, v)));
    }
    for n in &report.notes {
        text.push_str(&format!("note: {}\n", crate::report::note(&m, n)));
    }
    let mut ev = Evaluator::new(&m);
    for v in ev.affordance_violations()? {
        failed = true;
        text.push_str(&format!("affordance: {}\n", crate::report::affordance(&m, &v)));
    }
    for p in practices {
        for sp in load_practices(&m, p)? {
            for msg in sp.check(&m) {
                failed = true;
                text.push_str(&format!("practice `{}`: {msg}\n", sp.name));
            }
        }
    }
    if !failed {
        text.push_str(&format!(
            "valid: {} worlds, {} agents, {} actions\n",
            m.world_count(),
            m.agent_count(),
            m.action_count()
        ));
    }
    Ok(Output { text, code: if failed { EXIT_FAILED } else { EXIT_OK } })
}

#[derive(Clone, Debug, Default)]
pub struct EvalArgs {
    pub model: PathBuf,
    pub practices: Vec<PathBuf>,
    pub queries: Option<PathBuf>,
    pub world: Option<String>,
    pub formula: Option<String>,
    pub options: EvalOptions,
}

pub fn eval(args: &EvalArgs) -> Result<Output, CliError> {
    let m = load_model(&args.model)?;
    let mut sps = Vec::new();
    for p in &args.practices {
        sps.extend(load_practices(&m, p)?);
    }
    let mut queries: Vec<Query> = Vec::new();
    if let Some(q) = &args.queries {
        let src = read(q)?;
        queries = parse_queries(&src, &m).map_err(|e| lang(q, &src, e))?;
    }
    if let Some(f) = &args.formula {
        let w = world(&m, args.world.as_deref().ok_or_else(|| CliError::Usage("--formula needs --world".into()))?)?;
        let formula = parse_assertion(f, &m).map_err(|e| lang(Path::new("<formula>"), f, e))?;
        queries.push(Query { world: w, formula, line: 0 });
    }
    if queries.is_empty() {
        return Err(CliError::Usage("nothing to evaluate: give a query file or --world with --formula".into()));
    }
    let mut ev = Evaluator::with_options(&m, args.options);
    for sp in &sps {
        ev = ev.with_practice(sp);
    }
    let pr = Printer::new(&m);
    let mut text = String::new();
    let mut all = true;
    for q in &queries {
        let v = ev.eval(&q.formula, q.world)?;
        all &= v;
        text.push_str(&format!("{}: {} = {}\n", m.world_name(q.world), pr.assertion(&q.formula), v));
    }
    Ok(Output { text, code: if all { EXIT_OK } else { EXIT_FAILED } })
}

fn witness_json(m: &KripkeModel, e: &DeltaEntry) -> serde_json::Value {
    json!({
        "worlds": e.worlds.iter().map(|&w| m.world_name(w)).collect::<Vec<_>>(),
        "steps": e.steps.iter().map(|&s| step_text(m, s)).collect::<Vec<_>>(),
        "branch": e.branch,
    })
}

fn witness_text(m: &KripkeModel, e: &DeltaEntry) -> String {
    let mut s = m.world_name(e.start).to_string();
    for (i, &st) in e.steps.iter().enumerate() {
        s.push_str(&format!(" -[{}]-> {}", step_text(m, st), m.world_name(e.worlds[i + 1])));
    }
    s
}

#[derive(Clone, Debug, Default)]
pub struct CheckArgs {
    pub model: PathBuf,
    pub practice: PathBuf,
    pub options: EvalOptions,
    pub format: Format,
}

/// Verdicts of one practice: feasible, normative, complete in that order.
pub fn verdicts(ev: &mut Evaluator<'_>, sp: &SocialPractice) -> Result<[(&'static str, Verdict); 3], EvalError> {
    Ok([
        ("feasible", practice::feasible(ev, sp)?),
        ("normative", practice::normative(ev, sp)?),
        ("complete", practice::complete(ev, sp)?),
    ])
}

pub fn check_practice(args: &CheckArgs) -> Result<Output, CliError> {
    let m = load_model(&args.model)?;
    let sps = load_practices(&m, &args.practice)?;
    let mut text = String::new();
    let mut all = true;
    for sp in &sps {
        let mut ev = Evaluator::with_options(&m, args.options).with_practice(sp);
        let vs = verdicts(&mut ev, sp)?;
        let reports: Vec<_> =
            (0..sp.plan_patterns.len()).map(|i| practice::check_planpattern(&mut ev, sp, i)).collect::<Result<_, _>>()?;
        match args.format {
            Format::Text => {
                text.push_str(&format!("practice {}\n", sp.name));
                for (name, v) in &vs {
                    text.push_str(&format!("{name}: {}\n", v.holds));
                    if let Some(w) = &v.witness {
                        text.push_str(&format!("  witness: {}\n", witness_text(&m, w)));
                    }
                    for n in &v.notes {
                        text.push_str(&format!("  {n}\n"));
                    }
                }
                for (i, r) in reports.iter().enumerate() {
                    text.push_str(&format!(
                        "plan pattern {}: in delta {}, purpose {}, leaf purposes {:?}, start strategy {}, linking {:?}, failing leaves {:?}\n",
                        i + 1,
                        r.in_delta,
                        r.practice_purpose,
                        r.leaf_purposes,
                        r.start_strategy,
                        r.linking,
                        r.failing_leaves.iter().map(|l| l + 1).collect::<Vec<_>>()
                    ));
                }
            }
            Format::Jsonl => {
                for (name, v) in &vs {
                    let line = json!({
                        "practice": sp.name,
                        "property": name,
                        "holds": v.holds,
                        "witness": v.witness.as_ref().map(|w| witness_json(&m, w)),
                        "notes": v.notes,
                    });
                    text.push_str(&format!("{line}\n"));
                }
                for (i, r) in reports.iter().enumerate() {
                    let line = json!({
                        "practice": sp.name,
                        "plan_pattern": i + 1,
                        "in_delta": r.in_delta,
                        "purpose": r.practice_purpose,
                        "leaf_purposes": r.leaf_purposes,
                        "start_strategy": r.start_strategy,
                        "linking": r.linking,
                        "failing_leaves": r.failing_leaves.iter().map(|l| l + 1).collect::<Vec<_>>(),
                    });
                    text.push_str(&format!("{line}\n"));
                }
            }
        }
        all &= vs.iter().all(|(_, v)| v.holds);
    }
    Ok(Output { text, code: if all { EXIT_OK } else { EXIT_FAILED } })
}

pub fn generalize(model: &Path, practices: &[PathBuf], name: &str, format: Format) -> Result<Output, CliError> {
    let m = load_model(model)?;
    let mut sps = Vec::new();
    for p in practices {
        sps.extend(load_practices(&m, p)?);
    }
    if sps.is_empty() {
        return Err(CliError::Usage("generalize needs at least one practice".into()));
    }
    Ok(match (practice::generalize(&m, &sps, name), format) {
        (Ok(sp), Format::Text) => Output { text: print_practice(&m, &sp), code: EXIT_OK },
        (Ok(sp), Format::Jsonl) => Output {
            text: format!("{}\n", json!({"generalized": true, "practice": sp.name, "text": print_practice(&m, &sp)})),
            code: EXIT_OK,
        },
        (Err(f), Format::Text) => Output { text: format!("{f}\n"), code: EXIT_FAILED },
        (Err(f), Format::Jsonl) => Output {
            text: format!("{}\n", json!({"generalized": false, "condition": f.condition, "witness": f.witness})),
            code: EXIT_FAILED,
        },
    })
}

#[derive(Clone, Debug, Default)]
pub struct SimArgs {
    pub model: PathBuf,
    pub practice: PathBuf,
    pub world: Option<String>,
    pub seed: u64,
    pub ticks: Option<usize>,
    /// Participating agents; all practice actors when empty.
    pub agents: Vec<String>,
    /// Agents allowed to break norms.
    pub violating: Vec<String>,
    pub prefer: Vec<usize>,
    pub options: EvalOptions,
    pub format: Format,
}

/// One policy per participating agent, bound to every practice role it
/// enacts somewhere in the practice context.
pub fn default_policies(m: &KripkeModel, sp: &SocialPractice, agents: Group) -> Vec<AgentPolicy> {
    let ctx = m.context(sp.context);
    agents
        .agents()
        .map(|a| {
            let roles: Vec<RoleId> = sp
                .roles
                .iter()
                .copied()
                .filter(|&r| ctx.worlds.iter().any(|&w| m.enacts_in(a, r, sp.context, w)))
                .collect();
            AgentPolicy::new(a, roles)
        })
        .collect()
}

fn sim_error(m: &KripkeModel, e: SimError) -> CliError {
    match e {
        SimError::Eval(e) => CliError::Eval(e),
        SimError::NotStart(w) => CliError::Usage(format!("`{}` does not satisfy the start condition", m.world_name(w))),
        SimError::NotFeasible => CliError::Eval(EvalError::Practice("the practice is not feasible".into())),
        SimError::UnboundRole { agent, role } => CliError::Usage(format!(
            "`{}` is bound to role `{}` outside the practice",
            m.agent_name(agent),
            m.role_name(role)
        )),
        SimError::Unscriptable(b) => {
            CliError::Eval(EvalError::Practice(format!("branch {b} cannot be turned into concrete steps")))
        }
        SimError::Stuck { world, reason } => {
            CliError::Eval(EvalError::Practice(format!("stuck at `{}`: {reason}", m.world_name(world))))
        }
    }
}

pub fn simulate(args: &SimArgs) -> Result<Output, CliError> {
    let m = load_model(&args.model)?;
    let sp = load_practice(&m, &args.practice)?;
    let mut ev = Evaluator::with_options(&m, args.options).with_practice(&sp);
    let start = match &args.world {
        Some(w) => world(&m, w)?,
        None => *practice::start_worlds(&mut ev, &sp)?
            .first()
            .ok_or_else(|| CliError::Usage("no world satisfies the start condition".into()))?,
    };
    let mut group = Group::EMPTY;
    for a in &args.agents {
        group = group.with(m.agent_id(a).ok_or_else(|| CliError::Usage(format!("unknown agent `{a}`")))?);
    }
    if group.is_empty() {
        group = sp.actors;
    }
    let mut policies = default_policies(&m, &sp, group);
    for name in &args.violating {
        let a = m.agent_id(name).ok_or_else(|| CliError::Usage(format!("unknown agent `{name}`")))?;
        match policies.iter_mut().find(|p| p.agent == a) {
            Some(p) => p.compliance = Compliance::ViolatingAllowed,
            None => return Err(CliError::Usage(format!("`{name}` does not take part in the run"))),
        }
    }
    for p in &mut policies {
        p.branch_preference = args.prefer.clone();
    }
    let mut opts = SimOptions::default();
    if let Some(t) = args.ticks {
        opts.ticks = t;
    }
    let trace = sim::simulate(&mut ev, &sp, start, &policies, args.seed, opts).map_err(|e| sim_error(&m, e))?;
    let text = match args.format {
        Format::Text => trace_to_text(&m, &trace),
        Format::Jsonl => trace_to_jsonl(&m, &trace),
    };
    let code = if trace.outcome == sim::Outcome::ReachedEnd { EXIT_OK } else { EXIT_FAILED };
    Ok(Output { text, code })
}

/// Pretty-prints a stored JSON-lines trace after replaying it.
pub fn trace(model: &Path, trace_path: &Path, format: Format) -> Result<Output, CliError> {
    let m = load_model(model)?;
    let src = read(trace_path)?;
    let t = trace_from_jsonl(&m, &src).map_err(|source| CliError::Trace { path: trace_path.into(), source })?;
    let replay = sim::replay(&m, &t);
    let mut text = match format {
        Format::Text => trace_to_text(&m, &t),
        Format::Jsonl => trace_to_jsonl(&m, &t),
    };
    let code = match replay {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if format == Format::Text {
                text.push_str(&format!("replay failed: {e:?}\n"));
            }
            EXIT_FAILED
        }
    };
    Ok(Output { text, code })
}
