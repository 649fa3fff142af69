//! One pass/fail line per acceptance criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;
use socprac::commands::{default_policies, verdicts};
use socprac::expr::{parse_action, parse_assertion, parse_event, parse_pattern, Printer};
use socprac::lex::{lex, lex_line};
use socprac::model_file::{parse_model, print_model};
use socprac::practice_file::{parse_practices, print_practice};
use socprac::trace_file::{trace_from_jsonl, trace_to_jsonl};
use socprac_core::checker::{EvalOptions, Evaluator};
use socprac_core::event::{
    choice, compose, enumerate_steps, interpret_event, STrace, Step, StepUniverse, TraceSet, UniverseLimits,
};
use socprac_core::ids::{ActSet, ActionId, Group, StepId, WorldId};
use socprac_core::model::KripkeModel;
use socprac_core::practice::{generalize, start_worlds, PlanPattern, SocialPractice};
use socprac_core::sim::{self, replay, AgentPolicy, Compliance, ExecutionTrace, FireReason, Outcome, SimOptions};
use socprac_core::syntax::{ActionExpr, Assertion, EventExpr};
use socprac_testkit::ast::{random_rich_model, AstGen};
use socprac_testkit::gen::{formula, propositional, random_model, FormulaShape, ModelShape, Vocabulary};
use socprac_testkit::practice_oracle;
use socprac_testkit::reference::Reference;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(t: Duration, limit: f64, what: &str) -> Result<(), String> {
    if t.as_secs_f64() < limit {
        Ok(())
    } else {
        Err(format!("{what} took {:.2}s, limit {limit}s", t.as_secs_f64()))
    }
}

// 1

fn trace_set(rng: &mut StdRng, size: u32) -> TraceSet {
    (0..rng.random_range(0..6))
        .map(|_| {
            let len = rng.random_range(1..=3);
            STrace::new((0..len).map(|_| StepId(rng.random_range(0..size))).collect()).unwrap()
        })
        .collect()
}

fn algebraic_laws() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut universes = Vec::new();
    for n in 1..=3 {
        for m in 1..=2 {
            universes.push(StepUniverse::exhaustive(n, m, UniverseLimits::default()).unwrap());
        }
    }
    let cases = 600;
    for i in 0..cases {
        let u = &universes[i % universes.len()];
        let atom = |rng: &mut StdRng| {
            let g = Group(rng.random_range(1..1u32 << u.agents()));
            EventExpr::group(g, ActionExpr::Atom(ActionId(rng.random_range(0..u.actions() as u16))))
        };
        let (a, b) = (atom(&mut rng), atom(&mut rng));
        let lhs = interpret_event(&EventExpr::choice(a.clone(), EventExpr::seq(a.clone(), b.clone())), u).unwrap();
        ensure!(lhs == interpret_event(&a, u).unwrap(), "a + a;b differs from a for {a:?}, {b:?}");
        let size = u.len() as u32;
        let (x, y, z) = (trace_set(&mut rng, size), trace_set(&mut rng, size), trace_set(&mut rng, size));
        ensure!(compose(&compose(&x, &y), &z) == compose(&x, &compose(&y, &z)), "composition not associative");
        ensure!(choice(&x, &y) == choice(&y, &x), "choice not commutative");
        ensure!(choice(&x, &x) == x, "choice not idempotent");
    }
    within(start.elapsed(), 10.0, "laws")?;
    Ok(format!("{cases} cases over 1-3 agents, 1-2 actions"))
}

// 2

fn satisfies_constraints(n: usize, acts: &dyn Fn(Group) -> ActSet) -> bool {
    for sup in Group::all(n).subsets() {
        for sub in sup.subsets() {
            if !acts(sub).is_subset(acts(sup)) {
                return false;
            }
        }
        for a in sup.agents() {
            let rest = sup.without(a);
            if !rest.is_empty() && acts(Group::singleton(a)).is_empty() && acts(rest) != acts(sup) {
                return false;
            }
        }
    }
    true
}

fn step_constraints() -> Check {
    let mut tables = 0;
    for m in 1..=2usize {
        let cells = 3;
        let mask = (1u64 << m) - 1;
        let mut valid = BTreeSet::new();
        for code in 0..1u64 << (cells * m) {
            let t: Vec<ActSet> = (0..cells).map(|i| ActSet((code >> (i * m)) & mask)).collect();
            tables += 1;
            if satisfies_constraints(2, &|g: Group| t[g.0 as usize - 1]) {
                valid.insert(t);
            }
        }
        let enumerated: BTreeSet<Vec<ActSet>> = enumerate_steps(2, m, 1 << 16)
            .unwrap()
            .iter()
            .map(|s| (1..=cells as u32).map(|g| s.acts(Group(g))).collect())
            .collect();
        ensure!(enumerated == valid, "two-agent steps with {m} actions differ from the valid tables");
    }
    let mut rng = StdRng::seed_from_u64(2);
    let mut sampled = 0;
    while sampled < 12_000 {
        let sparse: Vec<(Group, ActSet)> = (0..rng.random_range(1..=4))
            .map(|_| (Group(rng.random_range(1..8)), ActSet(rng.random_range(0..4))))
            .collect();
        if let Ok(step) = Step::complete(3, &sparse) {
            sampled += 1;
            ensure!(satisfies_constraints(3, &|g| step.acts(g)), "completed step breaks a constraint: {sparse:?}");
        }
    }
    Ok(format!("{tables} two-agent tables exhaustively, {sampled} sampled three-agent steps"))
}

// 3

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let opts = EvalOptions { bound: 1, trace_bound: 4, ..EvalOptions::default() };
    let mut rng = StdRng::seed_from_u64(3);
    let mut triples = 0;
    let mut held = 0;
    while triples < 1200 {
        let shape = ModelShape::random(&mut rng, 50);
        let m = random_model(&mut rng, shape);
        let v = Vocabulary::of(&m);
        let mut ev = Evaluator::with_options(&m, opts);
        let reference = Reference::new(&m, opts);
        for _ in 0..12 {
            let fs = FormulaShape { depth: rng.random_range(1..=5), trace_budget: 4, achieving: true };
            let f = formula(&mut rng, &v, fs);
            let w = WorldId(rng.random_range(0..m.world_count()) as u32);
            let got = ev.eval(&f, w).map_err(|e| format!("checker error {e:?}"))?;
            ensure!(got == reference.eval(&f, w), "disagreement at {w:?} on {f:?}");
            held += got as usize;
            triples += 1;
        }
    }
    within(start.elapsed(), 60.0, "oracle comparison")?;
    Ok(format!("{triples} triples agree ({held} true)"))
}

// 4

fn common_belief_fixpoint() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let models = 250;
    for _ in 0..models {
        let shape = ModelShape::random(&mut rng, 40);
        let m = random_model(&mut rng, shape);
        let v = Vocabulary::of(&m);
        let g = v.group(&mut rng);
        let depth = rng.random_range(1..=3);
        let phi = propositional(&mut rng, &v, depth);
        let fixpoint = Reference::new(&m, EvalOptions::default()).common_belief_worlds(g, &phi);
        let mut ev = Evaluator::new(&m);
        let cb = Assertion::common_belief(g, phi.clone());
        for w in m.worlds() {
            ensure!(ev.eval(&cb, w).unwrap() == fixpoint.contains(&w), "CB differs at {w:?} for {phi:?}");
        }
    }
    Ok(format!("{models} models"))
}

// 5

fn collective_split() -> Check {
    let m = model("fred_marco_claire.spm");
    let u = StepUniverse::exhaustive(m.agents().count(), m.actions().count(), UniverseLimits::default()).unwrap();
    let split = interpret_event(&parse_event("{fred}:drive & {marco, claire}:sit", &m).unwrap(), &u).unwrap();
    let joint = interpret_event(&parse_event("{fred, marco, claire}:(drive & sit)", &m).unwrap(), &u).unwrap();
    // membership straight from the definitions, one step at a time
    let g = |names: &[&str]| Group::from_agents(names.iter().map(|n| m.agent_id(n).unwrap()));
    let (drive, sit) = (m.action_id("drive").unwrap(), m.action_id("sit").unwrap());
    let all = g(&["fred", "marco", "claire"]);
    let mut want_split = TraceSet::empty();
    let mut want_joint = TraceSet::empty();
    for s in u.ids() {
        let st = u.step(s);
        if st.acts(g(&["fred"])).contains(drive) && st.acts(g(&["marco", "claire"])).contains(sit) {
            want_split.insert(STrace::single(s));
        }
        let covered = all.subsets().filter(|a| !a.is_empty()).any(|a| {
            all.subsets()
                .filter(|b| !b.is_empty() && a.union(*b) == all)
                .any(|b| st.acts(a).contains(drive) && st.acts(b).contains(sit))
        });
        if covered {
            want_joint.insert(STrace::single(s));
        }
    }
    ensure!(split == want_split, "split denotation differs from the step filter");
    ensure!(joint == want_joint, "joint denotation differs from the cover filter");
    ensure!(split != joint, "the two denotations coincide");
    let only_joint = joint.iter().filter(|t| !split.contains(t.as_ref())).count();
    Ok(format!("{} split vs {} joint steps, {only_joint} only in the joint one", split.len(), joint.len()))
}

// 6

fn skeleton(p: &PlanPattern) -> String {
    fn seq_items<'a>(p: &'a PlanPattern, out: &mut Vec<&'a PlanPattern>) {
        match p {
            PlanPattern::Seq(a, b) => {
                seq_items(a, out);
                seq_items(b, out);
            }
            _ => out.push(p),
        }
    }
    match p {
        PlanPattern::Leaf { .. } => "g".into(),
        PlanPattern::Seq(..) => {
            let mut items = Vec::new();
            seq_items(p, &mut items);
            items
                .iter()
                .map(|q| match q {
                    PlanPattern::Choice(..) | PlanPattern::Par(..) => format!("({})", skeleton(q)),
                    _ => skeleton(q),
                })
                .collect::<Vec<_>>()
                .join(";")
        }
        PlanPattern::Choice(a, b) | PlanPattern::Par(a, b) => {
            let op = if matches!(p, PlanPattern::Choice(..)) { "+" } else { "&" };
            let side = |q: &PlanPattern| match q {
                PlanPattern::Seq(..) => format!("({})", skeleton(q)),
                _ => skeleton(q),
            };
            format!("{}{op}{}", side(a), side(b))
        }
    }
}

fn kids_to_school() -> Check {
    for f in ["kids_to_school.spm", "kids_to_school.spp", "kids_to_school_car_failure.spm"] {
        ensure!(scenario_path(f).exists(), "{f} not shipped");
    }
    let m = model("kids_to_school.spm");
    let sp = practice(&m, "kids_to_school.spp");
    ensure!(sp.plan_patterns.len() == 1, "expected one plan pattern");
    let shape = skeleton(&sp.plan_patterns[0]);
    ensure!(shape == "g;((g;g;g)+g)", "plan pattern shape {shape}");
    let start = Instant::now();
    let mut ev = Evaluator::with_options(&m, options()).with_practice(&sp);
    let v = verdicts(&mut ev, &sp).map_err(|e| format!("{e:?}"))?.map(|(_, v)| v.holds);
    let elapsed = start.elapsed();
    within(elapsed, 5.0, "practice check")?;
    ensure!(v == [true, true, true], "verdicts {v:?}");
    let depth = options().delta_depth;
    let mut ev = Evaluator::with_options(&m, options()).with_practice(&sp);
    let oracle = [
        !practice_oracle::feasible_executions(&mut ev, &sp, depth).is_empty(),
        practice_oracle::normative(&mut ev, &sp, depth),
        practice_oracle::complete(&mut ev, &sp, depth),
    ];
    ensure!(oracle == v, "oracles say {oracle:?}");
    Ok(format!("feasible, normative, complete in {:.3}s; oracles agree", elapsed.as_secs_f64()))
}

// 7

fn run(m: &KripkeModel, sp: &SocialPractice, ps: &[AgentPolicy], seed: u64) -> ExecutionTrace {
    let mut ev = Evaluator::with_options(m, options()).with_practice(sp);
    let start = start_worlds(&mut ev, sp).unwrap()[0];
    sim::simulate(&mut ev, sp, start, ps, seed, SimOptions::default()).unwrap()
}

fn simulation() -> Check {
    let m = model("kids_to_school.spm");
    let sp = practice(&m, "kids_to_school.spp");
    let ps = default_policies(&m, &sp, sp.actors);
    let mut ev = Evaluator::with_options(&m, options()).with_practice(&sp);
    for seed in 0..10 {
        let t = run(&m, &sp, &ps, seed);
        ensure!(t.outcome == Outcome::ReachedEnd, "seed {seed}: {:?}", t.outcome);
        ensure!(ev.eval(&sp.end, t.end()).unwrap(), "seed {seed}: end condition false");
        ensure!(t.violations().is_empty(), "seed {seed}: violations in nominal run");
        ensure!(t == run(&m, &sp, &ps, seed), "seed {seed}: rerun differs");
        ensure!(replay(&m, &t).is_ok(), "seed {seed}: replay fails");
        ensure!(trace_from_jsonl(&m, &trace_to_jsonl(&m, &t)).unwrap() == t, "seed {seed}: JSONL round trip");
    }

    let mf = model("kids_to_school_car_failure.spm");
    let spf = practice(&mf, "kids_to_school.spp");
    let psf = default_policies(&mf, &spf, spf.actors);
    let mut replans = 0;
    for seed in 0..10 {
        let t = run(&mf, &spf, &psf, seed);
        ensure!(t.outcome == Outcome::ReachedEnd, "car failure seed {seed}: {:?}", t.outcome);
        if let Some(r) = t.records.iter().find(|r| r.reason == FireReason::Replan) {
            ensure!(r.note.as_deref().is_some_and(|n| n.contains("car_b")), "replan note {:?}", r.note);
            ensure!(t.worlds().contains(&mf.world_id("buckled_b").unwrap()), "replan did not use car B");
            replans += 1;
        }
    }
    ensure!(replans > 0, "no run hit the failed car");

    let v1 = m.atom_id("V#1").unwrap();
    let mut bad = ps.clone();
    for p in &mut bad {
        if ["fred", "madeleine"].contains(&m.agent_name(p.agent)) {
            p.compliance = Compliance::ViolatingAllowed;
        }
    }
    let mut raised = 0;
    for seed in 0..10 {
        let vs = run(&m, &sp, &bad, seed).violations();
        ensure!(vs.is_empty() || vs == vec![v1], "seed {seed}: unexpected violations {vs:?}");
        raised += !vs.is_empty() as usize;
    }
    ensure!(raised > 0, "violating policy never violated");
    Ok(format!("10 nominal runs, {replans} replans to car_b, V#1 raised in {raised}/10 violating runs"))
}

// 8

fn generalization() -> Check {
    let m = model("two_days.spm");
    let day1 = practices_from(&m, &read("day1.spp")).remove(0);
    let day2_src = read("day2.spp");
    let day2 = practices_from(&m, &day2_src).remove(0);
    generalize(&m, &[day1.clone(), day2], "school_run_practice").map_err(|e| format!("{e}"))?;
    let mutations = [
        (1, edit(&edit(&day2_src, "roles: parent, child, neighbour", "roles: parent, child"), "neighbour:neighbour_drive", "{ned}:neighbour_drive")),
        (3, edit(&day2_src, "purpose:\n  kids_at_school & before_9", "purpose:\n  kids_at_school & kids_safe")),
        (6, edit(&day2_src, "phase(parent:park, car_parked)", "phase(parent:park, car_at_school)")),
    ];
    for (want, src) in mutations {
        let other = practices_from(&m, &src).remove(0);
        match generalize(&m, &[day1.clone(), other], "p") {
            Ok(_) => return Err(format!("mutation for condition {want} still generalizes")),
            Err(e) => ensure!(e.condition == want, "expected condition {want}, got {e}"),
        }
    }
    Ok("two days generalize; conditions 1, 3, 6 detected".into())
}

// 9

fn parser_round_trip() -> Check {
    let n = 500;
    let mut counts = [0usize; 6];
    for seed in 0..n {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = random_rich_model(&mut rng);
        let g = AstGen::new(&m);
        let p = Printer::new(&m);
        let a = g.action(&mut rng, 4);
        ensure!(parse_action(&p.action(&a), &m).ok() == Some(a.clone()), "action {}", p.action(&a));
        let e = g.event(&mut rng, 4);
        ensure!(parse_event(&p.event(&e), &m).ok() == Some(e.clone()), "event {}", p.event(&e));
        let f = g.assertion(&mut rng, 5);
        ensure!(parse_assertion(&p.assertion(&f), &m).ok() == Some(f.clone()), "assertion {}", p.assertion(&f));
        let pp = g.pattern(&mut rng, 4);
        ensure!(parse_pattern(&p.pattern(&pp), &m).ok() == Some(pp.clone()), "pattern {}", p.pattern(&pp));
        let sp = g.practice(&mut rng, "sp");
        let text = print_practice(&m, &sp);
        ensure!(parse_practices(&text, &m).ok() == Some(vec![sp]), "practice\n{text}");
        let mt = print_model(&m);
        let back = parse_model(&mt).map_err(|e| format!("model: {e}"))?;
        ensure!(fingerprint(&back) == fingerprint(&m), "model\n{mt}");
        counts.iter_mut().for_each(|c| *c += 1);

        // injected syntax errors
        let text = p.assertion(&f);
        let k = rng.random_range(0..lex(&text, 1).unwrap().len());
        let bad = ["=", "!", "?"][rng.random_range(0..3)];
        let (broken, col) = inject(&text, 1, k, bad).unwrap();
        let err = parse_assertion(&broken, &m).err().ok_or(format!("accepted {broken}"))?;
        ensure!(err.span.contains(1, col), "span {:?} misses column {col} in {broken}", err.span);
        let line = rng.random_range(1..=mt.lines().count());
        if let Ok(toks) = lex_line(line_of(&mt, line), line, 1) {
            if !toks.is_empty() {
                let (broken, col) = inject(&mt, line, rng.random_range(0..toks.len()), bad).unwrap();
                let err = parse_model(&broken).err().ok_or("accepted a broken model")?;
                ensure!(err.span.contains(line, col), "model span {:?} misses {line}:{col}", err.span);
            }
        }
    }
    Ok(format!("{n} ASTs per grammar (action, event, assertion, pattern, practice, model) and {n} injected errors"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("1 algebraic laws", algebraic_laws),
        ("2 step constraints", step_constraints),
        ("3 oracle equivalence", oracle_equivalence),
        ("4 common belief fixpoint", common_belief_fixpoint),
        ("5 collective split", collective_split),
        ("6 kids to school", kids_to_school),
        ("7 simulation", simulation),
        ("8 generalization", generalization),
        ("9 parser round trip", parser_round_trip),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({secs:.2}s)"),
            Err(why) => {
                println!("FAIL criterion {name}: {why} ({secs:.2}s)");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
