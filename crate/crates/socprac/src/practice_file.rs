//! The practice format (`.spp`). A file holds one or more practices, each
//! opened by `practice NAME in CONTEXT:` and followed by its fifteen
//! sections.

use std::collections::BTreeMap;

use socprac_core::ids::ActSet;
use socprac_core::model::KripkeModel;
use socprac_core::practice::SocialPractice;
use socprac_core::syntax::{Assertion, CountsAs, Strategy, ValueLink};

use crate::error::{LangError, LangResult, Span};
use crate::expr::{Parser, Printer};
use crate::lex::Tok;
use crate::sections::{split, Entry, Section};

pub const SECTIONS: [&str; 15] = [
    "roles",
    "actors",
    "resources",
    "affordances",
    "places",
    "purpose",
    "promotes",
    "counts-as",
    "plan-patterns",
    "norms",
    "strategies",
    "start",
    "end",
    "actions",
    "requirements",
];

fn keyword(p: &mut Parser<'_>, kw: &str) -> LangResult<()> {
    let (w, sp) = p.ident(&format!("`{kw}`"))?;
    if w != kw {
        return Err(LangError::syntax(sp, format!("expected `{kw}`, found `{w}`")));
    }
    Ok(())
}

/// Runs `f` over each comma-separated item until the entry is exhausted.
fn each<'a>(p: &mut Parser<'a>, mut f: impl FnMut(&mut Parser<'a>) -> LangResult<()>) -> LangResult<()> {
    if p.at_end() {
        return Ok(());
    }
    loop {
        f(p)?;
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    p.finish()
}

fn single(sec: &Section) -> LangResult<Entry> {
    let chunks = sec.chunks();
    match chunks.len() {
        1 => Ok(chunks.into_iter().next().expect("one")),
        0 => Err(LangError::syntax(sec.span, format!("section `{}` needs a value", sec.name()))),
        _ => Err(LangError::syntax(chunks[1].span(), format!("section `{}` takes a single value", sec.name()))),
    }
}

fn practice_body(m: &KripkeModel, header: &Section, body: &[&Section]) -> LangResult<SocialPractice> {
    let words = &header.words;
    if words.len() != 4 || words[2] != "in" {
        return Err(LangError::syntax(header.span, "expected `practice NAME in CONTEXT:`"));
    }
    if !header.inline.is_empty() {
        return Err(LangError::syntax(header.inline[0].span, "unexpected text after practice header"));
    }
    let ctx_name = &words[3];
    let context = m
        .context_id(ctx_name)
        .ok_or_else(|| LangError::unknown(header.span, "context", ctx_name))?;
    let mut sp = SocialPractice::new(&words[1], context);
    let mut seen: BTreeMap<&str, Span> = BTreeMap::new();
    for sec in body {
        let name = sec.name();
        let Some(&key) = SECTIONS.iter().find(|s| **s == name) else {
            return Err(LangError::syntax(sec.span, format!("unknown section `{name}`")));
        };
        if seen.insert(key, sec.span).is_some() {
            return Err(LangError::duplicate(sec.span, key));
        }
        let chunks = sec.chunks();
        match key {
            "start" | "end" => {
                let e = single(sec)?;
                let mut p = Parser::new(&e.toks, m, e.end());
                let phi = p.assertion()?;
                p.finish()?;
                if key == "start" {
                    sp.start = phi;
                } else {
                    sp.end = phi;
                }
                continue;
            }
            _ => {}
        }
        for e in &chunks {
            let mut p = Parser::new(&e.toks, m, e.end());
            match key {
                "roles" => each(&mut p, |p| {
                    sp.roles.insert(p.role()?);
                    Ok(())
                })?,
                "actors" => each(&mut p, |p| {
                    sp.actors = sp.actors.with(p.agent()?);
                    Ok(())
                })?,
                "resources" => each(&mut p, |p| {
                    sp.resources.insert(p.object()?);
                    Ok(())
                })?,
                "places" => each(&mut p, |p| {
                    sp.places.push(p.ident("a place")?.0.to_string());
                    Ok(())
                })?,
                "actions" => each(&mut p, |p| {
                    sp.actions = sp.actions.union(ActSet::singleton(p.action_atom()?));
                    Ok(())
                })?,
                "affordances" => {
                    let objs = p.objects()?;
                    p.expect(Tok::Colon)?;
                    let act = p.action()?;
                    p.finish()?;
                    sp.affordances.push((objs, act));
                }
                "purpose" => {
                    let phi = p.assertion()?;
                    p.finish()?;
                    sp.purpose.push(phi);
                }
                "promotes" => {
                    let role = p.role()?;
                    p.expect(Tok::Colon)?;
                    let action = p.action()?;
                    keyword(&mut p, "promotes")?;
                    let value = p.value()?;
                    p.finish()?;
                    sp.promotes.push(ValueLink { practice: context, role, action, value });
                }
                "counts-as" => {
                    let role = p.role()?;
                    p.expect(Tok::Colon)?;
                    let performed = p.action()?;
                    keyword(&mut p, "counts-as")?;
                    let counts_as = p.action()?;
                    p.finish()?;
                    sp.counts_as.push(CountsAs { context, role, performed, counts_as });
                }
                "plan-patterns" => {
                    let pp = p.pattern()?;
                    p.finish()?;
                    sp.plan_patterns.push(pp);
                }
                "norms" => {
                    let at = p.span();
                    match p.assertion()? {
                        Assertion::RoleNorm(n) => sp.norms.push(*n),
                        _ => return Err(LangError::syntax(at, "expected a role norm such as `O#1(role, cond, act)`")),
                    }
                    p.finish()?;
                }
                "strategies" => {
                    keyword(&mut p, "when")?;
                    let condition = p.assertion()?;
                    let (mode, mode_span) = p.ident("`do` or `try`")?;
                    let weak = match mode {
                        "do" => false,
                        "try" => true,
                        other => {
                            return Err(LangError::syntax(mode_span, format!("expected `do` or `try`, found `{other}`")))
                        }
                    };
                    let actors = p.actor()?;
                    p.expect(Tok::Colon)?;
                    let action = p.action()?;
                    p.finish()?;
                    sp.strategies.push(Strategy { condition, actors, action, weak });
                }
                "requirements" => {
                    let r = p.role()?;
                    p.expect(Tok::Colon)?;
                    let mut acts = ActSet::EMPTY;
                    each(&mut p, |p| {
                        acts = acts.union(ActSet::singleton(p.action_atom()?));
                        Ok(())
                    })?;
                    let e = sp.requirements.entry(r).or_insert(ActSet::EMPTY);
                    *e = e.union(acts);
                }
                _ => unreachable!("section list"),
            }
        }
    }
    let end = body.last().map_or(header.span, |s| s.entries.last().map_or(s.span, |e| e.span()));
    for s in SECTIONS {
        if !seen.contains_key(s) {
            return Err(LangError::missing_section(Span::new(end.line, end.column, 0), s));
        }
    }
    Ok(sp)
}

/// Parses every practice in a file.
pub fn parse_practices(src: &str, m: &KripkeModel) -> LangResult<Vec<SocialPractice>> {
    let sections = split(src)?;
    let mut out = Vec::new();
    let mut i = 0;
    if let Some(s) = sections.first() {
        if s.words[0] != "practice" {
            return Err(LangError::syntax(s.span, "expected `practice NAME in CONTEXT:`"));
        }
    }
    while i < sections.len() {
        let header = &sections[i];
        let mut j = i + 1;
        while j < sections.len() && sections[j].words[0] != "practice" {
            j += 1;
        }
        let body: Vec<&Section> = sections[i + 1..j].iter().collect();
        out.push(practice_body(m, header, &body)?);
        i = j;
    }
    Ok(out)
}

/// Parses a file that must contain exactly one practice.
pub fn parse_practice(src: &str, m: &KripkeModel) -> LangResult<SocialPractice> {
    let mut all = parse_practices(src, m)?;
    match all.len() {
        1 => Ok(all.pop().expect("one")),
        0 => Err(LangError::syntax(Span::new(1, 1, 0), "no practice in file")),
        _ => Err(LangError::invalid(Span::new(1, 1, 0), "expected exactly one practice")),
    }
}

fn names(it: impl Iterator<Item = String>) -> String {
    it.collect::<Vec<_>>().join(", ")
}

/// Prints a practice in the format read by [`parse_practices`].
pub fn print_practice(m: &KripkeModel, sp: &SocialPractice) -> String {
    let pr = Printer::new(m);
    let mut out = format!("practice {} in {}:\n", sp.name, m.context_name(sp.context));
    let line = |out: &mut String, header: &str, body: String| {
        if body.is_empty() {
            out.push_str(&format!("{header}:\n"));
        } else {
            out.push_str(&format!("{header}: {body}\n"));
        }
    };
    let block = |out: &mut String, header: &str, items: Vec<String>| {
        out.push_str(&format!("{header}:\n"));
        for i in items {
            out.push_str(&format!("  {i}\n"));
        }
    };
    line(&mut out, "roles", names(sp.roles.iter().map(|&r| m.role_name(r).to_string())));
    line(&mut out, "actors", names(sp.actors.agents().map(|a| m.agent_name(a).to_string())));
    line(&mut out, "resources", names(sp.resources.iter().map(|&o| m.object_name(o).to_string())));
    block(
        &mut out,
        "affordances",
        sp.affordances.iter().map(|(o, a)| format!("{}: {}", pr.objects(o), pr.action(a))).collect(),
    );
    line(&mut out, "places", sp.places.join(", "));
    block(&mut out, "purpose", sp.purpose.iter().map(|p| pr.assertion(p)).collect());
    block(
        &mut out,
        "promotes",
        sp.promotes
            .iter()
            .map(|v| format!("{}:{} promotes {}", m.role_name(v.role), pr.action(&v.action), m.value_order(v.value).name))
            .collect(),
    );
    block(
        &mut out,
        "counts-as",
        sp.counts_as
            .iter()
            .map(|c| format!("{}:{} counts-as {}", m.role_name(c.role), pr.action(&c.performed), pr.action(&c.counts_as)))
            .collect(),
    );
    block(&mut out, "plan-patterns", sp.plan_patterns.iter().map(|p| pr.pattern(p)).collect());
    block(&mut out, "norms", sp.norms.iter().map(|n| pr.norm(n)).collect());
    block(
        &mut out,
        "strategies",
        sp.strategies
            .iter()
            .map(|s| {
                format!(
                    "when {} {} {}:{}",
                    pr.assertion(&s.condition),
                    if s.weak { "try" } else { "do" },
                    pr.actor(&s.actors),
                    pr.action(&s.action)
                )
            })
            .collect(),
    );
    line(&mut out, "start", pr.assertion(&sp.start));
    line(&mut out, "end", pr.assertion(&sp.end));
    line(&mut out, "actions", names(sp.actions.actions().map(|a| m.action_name(a).to_string())));
    block(
        &mut out,
        "requirements",
        sp.requirements
            .iter()
            .map(|(&r, acts)| format!("{}: {}", m.role_name(r), names(acts.actions().map(|a| m.action_name(a).to_string()))))
            .collect(),
    );
    out
}
