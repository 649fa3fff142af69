#![allow(dead_code)]

use std::path::PathBuf;

use socprac::expr::Printer;
use socprac::lex::lex_line;
use socprac::model_file::parse_model;
use socprac::practice_file::parse_practices;
use socprac_core::checker::EvalOptions;
use socprac_core::ids::ActSet;
use socprac_core::model::KripkeModel;
use socprac_core::practice::SocialPractice;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn model_from(src: &str) -> KripkeModel {
    parse_model(src).unwrap_or_else(|e| panic!("model: {e}"))
}

pub fn model(name: &str) -> KripkeModel {
    model_from(&read(name))
}

pub fn practices_from(m: &KripkeModel, src: &str) -> Vec<SocialPractice> {
    parse_practices(src, m).unwrap_or_else(|e| panic!("practice: {e}"))
}

pub fn practice(m: &KripkeModel, name: &str) -> SocialPractice {
    practices_from(m, &read(name)).remove(0)
}

/// Replaces `from` with `to`, insisting that the text occurs.
pub fn edit(src: &str, from: &str, to: &str) -> String {
    assert!(src.contains(from), "missing {from:?}");
    src.replace(from, to)
}

/// Drops every line containing `needle`.
pub fn drop_lines(src: &str, needle: &str) -> String {
    assert!(src.contains(needle), "missing {needle:?}");
    src.lines().filter(|l| !l.contains(needle)).collect::<Vec<_>>().join("\n") + "\n"
}

pub fn options() -> EvalOptions {
    EvalOptions::default()
}

fn acts_names(m: &KripkeModel, acts: ActSet) -> Vec<&str> {
    let mut v: Vec<&str> = acts.actions().map(|b| m.action_name(b)).collect();
    v.sort();
    v
}

/// Everything a model says, by name, in a canonical order.
pub fn fingerprint(m: &KripkeModel) -> Vec<String> {
    let mut out = Vec::new();
    let p = Printer::new(m);
    for w in m.worlds() {
        let wn = m.world_name(w);
        for a in m.atoms() {
            if m.holds(w, a) {
                out.push(format!("fact {wn} {}", m.atom_name(a)));
            }
        }
        for (s, to) in m.transitions(w) {
            let mut parts: Vec<String> = m
                .step(s)
                .sparse()
                .into_iter()
                .map(|(g, acts)| format!("{}:{}", p.group(g), acts_names(m, acts).join("&")))
                .collect();
            parts.sort();
            out.push(format!("step {wn} {parts:?} {}", m.world_name(to)));
        }
        for a in m.agents() {
            for u in m.belief(a).successors(w) {
                out.push(format!("B {} {wn} {}", m.agent_name(a), m.world_name(*u)));
            }
            for u in m.goal(a).successors(w) {
                out.push(format!("G {} {wn} {}", m.agent_name(a), m.world_name(*u)));
            }
        }
        for u in m.order().successors(w) {
            out.push(format!("order {wn} {}", m.world_name(*u)));
        }
    }
    for a in m.agents() {
        out.push(format!("cap {} {:?}", m.agent_name(a), acts_names(m, m.capability(a))));
    }
    for b in m.actions() {
        out.push(format!("action {} {:?}", m.action_name(b), m.action_kind(b)));
    }
    for a in m.atoms() {
        out.push(format!("atom {} {:?}", m.atom_name(a), m.atom_kind(a)));
    }
    for c in m.contexts() {
        let ctx = m.context(c);
        out.push(format!(
            "context {} {:?} {:?} {} {:?} {:?}",
            ctx.name,
            ctx.worlds.iter().map(|&w| m.world_name(w)).collect::<Vec<_>>(),
            ctx.roles.iter().map(|&r| m.role_name(r)).collect::<Vec<_>>(),
            p.group(ctx.actors),
            ctx.objects.iter().map(|&o| m.object_name(o)).collect::<Vec<_>>(),
            ctx.places,
        ));
    }
    for e in m.enactments() {
        out.push(format!(
            "enact {} {} {} {}",
            m.agent_name(e.agent),
            m.role_name(e.role),
            m.context(e.context).name,
            m.world_name(e.world)
        ));
    }
    for f in m.affordances() {
        out.push(format!("affords {} {} {}", p.objects(&f.objects), p.action(&f.action), m.context(f.context).name));
    }
    for f in m.availability() {
        out.push(format!(
            "available {} {} {:?}",
            p.objects(&f.objects),
            m.context(f.context).name,
            f.worlds.as_ref().map(|ws| ws.iter().map(|&w| m.world_name(w)).collect::<Vec<_>>())
        ));
    }
    for o in m.value_orders() {
        for (x, y) in o.less.pairs() {
            out.push(format!("value {} {} {}", o.name, m.world_name(x), m.world_name(y)));
        }
    }
    out.sort();
    out
}

pub fn line_of(text: &str, n: usize) -> &str {
    text.lines().nth(n - 1).unwrap()
}

/// Inserts `bad` before the `k`-th token of line `line` and returns the new
/// text together with the injected token's column.
pub fn inject(text: &str, line: usize, k: usize, bad: &str) -> Option<(String, usize)> {
    let toks = lex_line(line_of(text, line), line, 1).ok()?;
    let col = toks.get(k)?.span.column;
    let mut out: Vec<String> = text.lines().map(str::to_string).collect();
    let l = &mut out[line - 1];
    let byte = l.char_indices().nth(col - 1).map(|(b, _)| b)?;
    l.insert_str(byte, &format!("{bad} "));
    Some((out.join("\n"), col))
}
