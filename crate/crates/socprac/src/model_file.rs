//! The model format (`.spm`).

use std::collections::{BTreeMap, BTreeSet};

use socprac_core::ids::{ActSet, AgentId, Group, ObjectId, RoleId, WorldId};
use socprac_core::model::{
    AffordanceFact, AvailabilityFact, Context, Enactment, KripkeModel, Kind, ModelBuilder, ModelError, Relation,
};

use crate::error::{LangError, LangResult, Span};
use crate::expr::{Parser, Printer, Scope, KEYWORDS};
use crate::lex::{Tok, Token};
use crate::sections::{split, Entry, Section};

fn parser<'a>(toks: &'a [Token], scope: &'a dyn Scope, end: Span) -> Parser<'a> {
    Parser::new(toks, scope, end)
}

fn ident_list<'a>(p: &mut Parser<'a>) -> LangResult<Vec<(&'a str, Span)>> {
    let mut out = Vec::new();
    if p.at_end() {
        return Ok(out);
    }
    loop {
        out.push(p.ident("a name")?);
        if !p.eat(&Tok::Comma) {
            break;
        }
    }
    Ok(out)
}

fn model_err(span: Span, e: ModelError) -> LangError {
    match e {
        ModelError::Duplicate { name, .. } => LangError::duplicate(span, &name),
        ModelError::Unknown { kind, name } => LangError::unknown(span, kind, &name),
        other => LangError::invalid(span, other.to_string()),
    }
}

/// Highest `k` among `V#k`/`V#ks` identifiers in the token stream.
fn max_violation(sections: &[Section]) -> usize {
    let mut k = 0;
    let mut see = |t: &Token| {
        if let Tok::Ident(s) = &t.tok {
            if let Some(rest) = s.strip_prefix("V#") {
                let digits = rest.strip_suffix('s').unwrap_or(rest);
                if let Ok(n) = digits.parse::<usize>() {
                    k = k.max(n);
                }
            }
        }
    };
    for s in sections {
        s.inline.iter().for_each(&mut see);
        for e in &s.entries {
            e.toks.iter().for_each(&mut see);
        }
    }
    k
}

struct Loader {
    b: ModelBuilder,
    /// Agents, roles, contexts, actions, objects and values share one
    /// namespace so that bare names in expressions are unambiguous.
    shared: BTreeMap<String, &'static str>,
}

impl Loader {
    fn name(&mut self, kind: &'static str, name: &str, span: Span, shared: bool) -> LangResult<()> {
        if KEYWORDS.contains(&name) {
            return Err(LangError::invalid(span, format!("`{name}` is reserved")));
        }
        if name.contains('#') {
            return Err(LangError::invalid(span, format!("`{name}`: `#` names are reserved for violations")));
        }
        if shared {
            if self.shared.contains_key(name) {
                return Err(LangError::duplicate(span, name));
            }
            self.shared.insert(name.to_string(), kind);
        }
        Ok(())
    }

    fn declare_list(&mut self, sec: &Section, kind: &'static str) -> LangResult<()> {
        for e in sec.chunks() {
            let mut p = parser(&e.toks, &self.b, e.end());
            let names: Vec<(String, Span)> =
                ident_list(&mut p)?.into_iter().map(|(n, s)| (n.to_string(), s)).collect();
            p.finish()?;
            for (n, sp) in names {
                let r = match kind {
                    "agent" => {
                        self.name(kind, &n, sp, true)?;
                        self.b.agent(&n).map(|_| ())
                    }
                    "action" | "social action" => {
                        self.name(kind, &n, sp, true)?;
                        let k = if kind == "action" { Kind::Physical } else { Kind::Social };
                        self.b.action(&n, k).map(|_| ())
                    }
                    "atom" | "social atom" => {
                        self.name(kind, &n, sp, false)?;
                        let k = if kind == "atom" { Kind::Physical } else { Kind::Social };
                        self.b.atom(&n, k).map(|_| ())
                    }
                    "role" => {
                        self.name(kind, &n, sp, true)?;
                        self.b.role(&n).map(|_| ())
                    }
                    "object" => {
                        self.name(kind, &n, sp, true)?;
                        self.b.object(&n).map(|_| ())
                    }
                    _ => unreachable!("list kind"),
                };
                r.map_err(|e| model_err(sp, e))?;
            }
        }
        Ok(())
    }

    fn world(&self, p: &mut Parser<'_>) -> LangResult<WorldId> {
        let (n, sp) = p.ident("a world")?;
        self.b.world_id(n).ok_or_else(|| LangError::unknown(sp, "world", n))
    }

    fn world_list(&self, p: &mut Parser<'_>) -> LangResult<Vec<WorldId>> {
        let mut out = vec![self.world(p)?];
        while p.eat(&Tok::Comma) {
            out.push(self.world(p)?);
        }
        Ok(out)
    }

    fn agent_or_group(&self, p: &mut Parser<'_>) -> LangResult<Group> {
        if p.peek() == Some(&Tok::LBrace) {
            p.group()
        } else {
            Ok(Group::singleton(p.agent()?))
        }
    }

    /// `agent: cluster w..` or `agent: w.. -> u..`, into `(agent, pairs)`.
    fn relation_entry(&self, e: &Entry) -> LangResult<(AgentId, Vec<(WorldId, WorldId)>)> {
        let mut p = parser(&e.toks, &self.b, e.end());
        let a = p.agent()?;
        p.expect(Tok::Colon)?;
        let mut pairs = Vec::new();
        if matches!(p.peek(), Some(Tok::Ident(s)) if s == "cluster") && p.peek_at(1) != Some(&Tok::Arrow) && p.peek_at(1) != Some(&Tok::Comma) {
            p.ident("cluster")?;
            let ws = self.world_list(&mut p)?;
            for &x in &ws {
                for &y in &ws {
                    pairs.push((x, y));
                }
            }
        } else {
            let from = self.world_list(&mut p)?;
            p.expect(Tok::Arrow)?;
            let to = self.world_list(&mut p)?;
            for &x in &from {
                for &y in &to {
                    pairs.push((x, y));
                }
            }
        }
        p.finish()?;
        Ok((a, pairs))
    }
}

/// Parses a model file.
pub fn parse_model(src: &str) -> LangResult<KripkeModel> {
    let sections = split(src)?;
    let mut ld = Loader { b: ModelBuilder::new(), shared: BTreeMap::new() };
    let mut by_name: BTreeMap<String, Vec<&Section>> = BTreeMap::new();
    let mut contexts: Vec<(&Section, String)> = Vec::new();
    const KNOWN: &[&str] = &[
        "agents",
        "actions",
        "social actions",
        "atoms",
        "social atoms",
        "violations",
        "roles",
        "objects",
        "values",
        "worlds",
        "transitions",
        "capabilities",
        "beliefs",
        "goals",
        "order",
        "affordances",
        "availability",
    ];
    for s in &sections {
        if s.words.len() == 2 && s.words[0] == "context" {
            contexts.push((s, s.words[1].clone()));
            continue;
        }
        let name = s.name();
        if !KNOWN.contains(&name.as_str()) {
            return Err(LangError::syntax(s.span, format!("unknown section `{name}`")));
        }
        by_name.entry(name).or_default().push(s);
    }
    let get = |n: &str| by_name.get(n).cloned().unwrap_or_default();

    for (kind, sec) in [("agent", "agents"), ("action", "actions"), ("social action", "social actions")] {
        for s in get(sec) {
            ld.declare_list(s, kind)?;
        }
    }
    for (kind, sec) in [("atom", "atoms"), ("social atom", "social atoms")] {
        for s in get(sec) {
            ld.declare_list(s, kind)?;
        }
    }
    let mut nviol = max_violation(&sections);
    for s in get("violations") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            nviol = nviol.max(p.number()? as usize);
            p.finish()?;
        }
    }
    ld.b.violations(nviol).map_err(|e| model_err(Span::default(), e))?;
    for (kind, sec) in [("role", "roles"), ("object", "objects")] {
        for s in get(sec) {
            ld.declare_list(s, kind)?;
        }
    }

    // value names, world names and contexts before anything refers to them
    for s in get("values") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let (n, sp) = p.ident("a value")?;
            let n = n.to_string();
            ld.name("value", &n, sp, true)?;
            ld.b.value(&n).map_err(|e| model_err(sp, e))?;
        }
    }
    for s in get("worlds") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let (n, sp) = p.ident("a world")?;
            let n = n.to_string();
            ld.name("world", &n, sp, false)?;
            ld.b.world(&n).map_err(|e| model_err(sp, e))?;
        }
    }
    for (s, name) in &contexts {
        let sp = s.span;
        ld.name("context", name, sp, true)?;
        let ctx = Context {
            name: name.clone(),
            worlds: BTreeSet::new(),
            roles: BTreeSet::new(),
            actors: Group::EMPTY,
            objects: BTreeSet::new(),
            places: Vec::new(),
        };
        ld.b.context(ctx).map_err(|e| model_err(sp, e))?;
    }

    for s in get("worlds") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let w = ld.world(&mut p)?;
            let mut atoms = Vec::new();
            if p.eat(&Tok::Colon) && !p.at_end() {
                loop {
                    atoms.push(p.atom()?);
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            p.finish()?;
            for a in atoms {
                ld.b.set_true(w, a);
            }
        }
    }
    for s in get("capabilities") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let a = p.agent()?;
            p.expect(Tok::Colon)?;
            let mut acts = ActSet::EMPTY;
            if !p.at_end() {
                loop {
                    acts = acts.union(ActSet::singleton(p.action_atom()?));
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            p.finish()?;
            ld.b.capability(a, acts);
        }
    }
    let mut transition_spans: Vec<Span> = Vec::new();
    for s in get("transitions") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let from = ld.world(&mut p)?;
            p.expect(Tok::Arrow)?;
            let to = ld.world(&mut p)?;
            let (by, by_span) = p.ident("`by`")?;
            if by != "by" {
                return Err(LangError::syntax(by_span, format!("expected `by`, found `{by}`")));
            }
            let mut sparse: Vec<(Group, ActSet)> = Vec::new();
            if matches!(p.peek(), Some(Tok::Ident(s)) if s == "skip") {
                p.ident("skip")?;
            } else {
                loop {
                    let g = ld.agent_or_group(&mut p)?;
                    p.expect(Tok::Colon)?;
                    let mut acts = ActSet::singleton(p.action_atom()?);
                    while p.eat(&Tok::Amp) {
                        acts = acts.union(ActSet::singleton(p.action_atom()?));
                    }
                    sparse.push((g, acts));
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            p.finish()?;
            transition_spans.push(e.span());
            ld.b.transition(from, sparse, to);
        }
    }
    for (sec, is_belief) in [("beliefs", true), ("goals", false)] {
        for s in get(sec) {
            for e in s.chunks() {
                let (a, pairs) = ld.relation_entry(&e)?;
                for (x, y) in pairs {
                    if is_belief {
                        ld.b.belief(a, x, y);
                    } else {
                        ld.b.goal(a, x, y);
                    }
                }
            }
        }
    }
    let mut order_from_transitions = false;
    for s in get("order") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            if matches!(p.peek(), Some(Tok::Ident(s)) if s == "transitions") && p.peek_at(1).is_none() {
                order_from_transitions = true;
                p.ident("transitions")?;
                continue;
            }
            let from = ld.world_list(&mut p)?;
            p.expect(Tok::Arrow)?;
            let to = ld.world_list(&mut p)?;
            p.finish()?;
            for &x in &from {
                for &y in &to {
                    ld.b.order(x, y);
                }
            }
        }
    }
    for s in get("values") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let v = p.value()?;
            let mut pairs = Vec::new();
            if p.eat(&Tok::Colon) && !p.at_end() {
                loop {
                    let worse = ld.world(&mut p)?;
                    p.expect(Tok::Lt)?;
                    pairs.push((worse, ld.world(&mut p)?));
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            p.finish()?;
            for (worse, better) in pairs {
                ld.b.value_pair(v, worse, better);
            }
        }
    }
    for (s, name) in &contexts {
        let c = ld.b.context_id(name).expect("declared above");
        let mut ctx = ld.b.context_mut(c).clone();
        let mut enacts: Vec<(AgentId, RoleId, Option<Vec<WorldId>>)> = Vec::new();
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let (key, key_span) = p.ident("a context field")?;
            match key {
                "enact" => {
                    let a = p.agent()?;
                    let (as_kw, as_span) = p.ident("`as`")?;
                    if as_kw != "as" {
                        return Err(LangError::syntax(as_span, format!("expected `as`, found `{as_kw}`")));
                    }
                    let r = p.role()?;
                    let ws = if p.eat(&Tok::Colon) { Some(ld.world_list(&mut p)?) } else { None };
                    p.finish()?;
                    enacts.push((a, r, ws));
                }
                "worlds" | "roles" | "actors" | "objects" | "places" => {
                    p.expect(Tok::Colon)?;
                    match key {
                        "worlds" => {
                            let ws = if p.at_end() { Vec::new() } else { ld.world_list(&mut p)? };
                            ctx.worlds.extend(ws);
                        }
                        "roles" => {
                            let mut rs = Vec::new();
                            while !p.at_end() {
                                rs.push(p.role()?);
                                if !p.eat(&Tok::Comma) {
                                    break;
                                }
                            }
                            ctx.roles.extend(rs);
                        }
                        "actors" => {
                            let mut g = Group::EMPTY;
                            while !p.at_end() {
                                g = g.with(p.agent()?);
                                if !p.eat(&Tok::Comma) {
                                    break;
                                }
                            }
                            ctx.actors = ctx.actors.union(g);
                        }
                        "objects" => {
                            let mut os: Vec<ObjectId> = Vec::new();
                            while !p.at_end() {
                                os.push(p.object()?);
                                if !p.eat(&Tok::Comma) {
                                    break;
                                }
                            }
                            ctx.objects.extend(os);
                        }
                        _ => {
                            let names: Vec<String> = ident_list(&mut p)?.into_iter().map(|(n, _)| n.into()).collect();
                            ctx.places.extend(names);
                        }
                    }
                    p.finish()?;
                }
                other => {
                    return Err(LangError::syntax(key_span, format!("unknown context field `{other}`")));
                }
            }
        }
        let all: Vec<WorldId> = ctx.worlds.iter().copied().collect();
        *ld.b.context_mut(c) = ctx;
        for (agent, role, ws) in enacts {
            let ws = ws.unwrap_or_else(|| all.clone());
            for world in ws {
                ld.b.enact(Enactment { agent, role, context: c, world });
            }
        }
    }
    for s in get("affordances") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let objects = p.objects()?;
            keyword(&mut p, "affords")?;
            let action = p.action()?;
            keyword(&mut p, "in")?;
            let context = p.context()?;
            p.finish()?;
            ld.b.affords(AffordanceFact { objects, action, context });
        }
    }
    for s in get("availability") {
        for e in s.chunks() {
            let mut p = parser(&e.toks, &ld.b, e.end());
            let objects = p.objects()?;
            keyword(&mut p, "in")?;
            let context = p.context()?;
            let worlds = if p.at_end() {
                None
            } else {
                keyword(&mut p, "at")?;
                Some(ld.world_list(&mut p)?.into_iter().collect())
            };
            p.finish()?;
            ld.b.available(AvailabilityFact { objects, context, worlds });
        }
    }

    let header = sections.first().map(|s| s.span).unwrap_or_default();
    let mut pending_order = Vec::new();
    if order_from_transitions {
        for s in get("transitions") {
            for e in s.chunks() {
                let mut p = parser(&e.toks, &ld.b, e.end());
                let from = ld.world(&mut p)?;
                p.expect(Tok::Arrow)?;
                let to = ld.world(&mut p)?;
                if from != to {
                    pending_order.push((from, to));
                }
            }
        }
    }
    for (x, y) in pending_order {
        ld.b.order(x, y);
    }
    let tspan = transition_spans.first().copied().unwrap_or(header);
    ld.b.build().map_err(|e| model_err(tspan, e))
}

fn keyword(p: &mut Parser<'_>, kw: &str) -> LangResult<()> {
    let (w, sp) = p.ident(&format!("`{kw}`"))?;
    if w != kw {
        return Err(LangError::syntax(sp, format!("expected `{kw}`, found `{w}`")));
    }
    Ok(())
}

fn is_violation_atom(name: &str) -> bool {
    name.starts_with("V#")
}

fn relation_lines(out: &mut String, m: &KripkeModel, who: &str, r: &Relation) {
    // group worlds by successor set
    let mut groups: BTreeMap<BTreeSet<WorldId>, Vec<WorldId>> = BTreeMap::new();
    for w in m.worlds() {
        let s = r.successors(w);
        if !s.is_empty() {
            groups.entry(s.clone()).or_default().push(w);
        }
    }
    let mut lines: Vec<(WorldId, String)> = Vec::new();
    for (succ, from) in groups {
        let names = |ws: &mut dyn Iterator<Item = WorldId>| ws.map(|w| m.world_name(w)).collect::<Vec<_>>().join(", ");
        let from_set: BTreeSet<WorldId> = from.iter().copied().collect();
        let line = if from_set == succ {
            format!("  {who}: cluster {}\n", names(&mut from.iter().copied()))
        } else {
            format!("  {who}: {} -> {}\n", names(&mut from.iter().copied()), names(&mut succ.iter().copied()))
        };
        lines.push((from[0], line));
    }
    lines.sort();
    for (_, l) in lines {
        out.push_str(&l);
    }
}

fn list_line(out: &mut String, header: &str, items: &[&str]) {
    if !items.is_empty() {
        out.push_str(&format!("{header}: {}\n", items.join(", ")));
    }
}

/// Prints a model in the format read by [`parse_model`].
pub fn print_model(m: &KripkeModel) -> String {
    let pr = Printer::new(m);
    let mut out = String::new();
    let agents: Vec<&str> = m.agents().map(|a| m.agent_name(a)).collect();
    list_line(&mut out, "agents", &agents);
    for (header, kind) in [("actions", Kind::Physical), ("social actions", Kind::Social)] {
        let v: Vec<&str> = m.actions().filter(|&a| m.action_kind(a) == kind).map(|a| m.action_name(a)).collect();
        list_line(&mut out, header, &v);
    }
    // ids as a reparse assigns them: physical, social, then violations
    let mut rank = vec![0; m.atoms().count()];
    let mut next = 0;
    for (header, kind) in [("atoms", Kind::Physical), ("social atoms", Kind::Social)] {
        let v: Vec<_> =
            m.atoms().filter(|&a| m.atom_kind(a) == kind && !is_violation_atom(m.atom_name(a))).collect();
        for &a in &v {
            rank[a.index()] = next;
            next += 1;
        }
        list_line(&mut out, header, &v.iter().map(|&a| m.atom_name(a)).collect::<Vec<_>>());
    }
    for a in m.atoms().filter(|&a| is_violation_atom(m.atom_name(a))) {
        rank[a.index()] = next;
        next += 1;
    }
    if m.violation_count() > 0 {
        out.push_str(&format!("violations: {}\n", m.violation_count()));
    }
    let roles: Vec<&str> = m.roles().map(|r| m.role_name(r)).collect();
    list_line(&mut out, "roles", &roles);
    let objects: Vec<&str> = m.objects().map(|o| m.object_name(o)).collect();
    list_line(&mut out, "objects", &objects);

    out.push_str("worlds:\n");
    for w in m.worlds() {
        let mut truths: Vec<_> = m.world(w).truths.iter().copied().collect();
        truths.sort_by_key(|a| rank[a.index()]);
        let truths: Vec<&str> = truths.into_iter().map(|a| m.atom_name(a)).collect();
        if truths.is_empty() {
            out.push_str(&format!("  {}\n", m.world_name(w)));
        } else {
            out.push_str(&format!("  {}: {}\n", m.world_name(w), truths.join(", ")));
        }
    }
    if !m.value_orders().is_empty() {
        out.push_str("values:\n");
        for v in m.value_orders() {
            let pairs: Vec<String> = v
                .less
                .pairs()
                .map(|(a, b)| format!("{} < {}", m.world_name(a), m.world_name(b)))
                .collect();
            if pairs.is_empty() {
                out.push_str(&format!("  {}\n", v.name));
            } else {
                out.push_str(&format!("  {}: {}\n", v.name, pairs.join(", ")));
            }
        }
    }

    let mut trans = String::new();
    for w in m.worlds() {
        for (s, to) in m.transitions(w) {
            let step = m.step(s);
            if step.is_skip() {
                if to != w {
                    trans.push_str(&format!("  {} -> {} by skip\n", m.world_name(w), m.world_name(to)));
                }
                continue;
            }
            let parts: Vec<String> = step
                .sparse()
                .into_iter()
                .map(|(g, acts)| {
                    let names: Vec<&str> = acts.actions().map(|a| m.action_name(a)).collect();
                    format!("{}:{}", pr.group(g), names.join(" & "))
                })
                .collect();
            trans.push_str(&format!("  {} -> {} by {}\n", m.world_name(w), m.world_name(to), parts.join(", ")));
        }
    }
    if !trans.is_empty() {
        out.push_str("transitions:\n");
        out.push_str(&trans);
    }

    let caps: Vec<String> = m
        .agents()
        .filter(|&a| !m.capability(a).is_empty())
        .map(|a| {
            let names: Vec<&str> = m.capability(a).actions().map(|x| m.action_name(x)).collect();
            format!("  {}: {}\n", m.agent_name(a), names.join(", "))
        })
        .collect();
    if !caps.is_empty() {
        out.push_str("capabilities:\n");
        out.extend(caps);
    }
    for (header, belief) in [("beliefs", true), ("goals", false)] {
        let mut body = String::new();
        for a in m.agents() {
            let r = if belief { m.belief(a) } else { m.goal(a) };
            relation_lines(&mut body, m, m.agent_name(a), r);
        }
        if !body.is_empty() {
            out.push_str(&format!("{header}:\n"));
            out.push_str(&body);
        }
    }
    if !m.order().is_empty() {
        out.push_str("order:\n");
        for w in m.worlds() {
            let succ = m.order().successors(w);
            if !succ.is_empty() {
                let names: Vec<&str> = succ.iter().map(|&u| m.world_name(u)).collect();
                out.push_str(&format!("  {} -> {}\n", m.world_name(w), names.join(", ")));
            }
        }
    }

    for c in m.contexts() {
        let ctx = m.context(c);
        out.push_str(&format!("context {}:\n", ctx.name));
        let ws: Vec<&str> = ctx.worlds.iter().map(|&w| m.world_name(w)).collect();
        out.push_str(&format!("  worlds: {}\n", ws.join(", ")));
        let rs: Vec<&str> = ctx.roles.iter().map(|&r| m.role_name(r)).collect();
        out.push_str(&format!("  roles: {}\n", rs.join(", ")));
        let ag: Vec<&str> = ctx.actors.agents().map(|a| m.agent_name(a)).collect();
        out.push_str(&format!("  actors: {}\n", ag.join(", ")));
        let os: Vec<&str> = ctx.objects.iter().map(|&o| m.object_name(o)).collect();
        out.push_str(&format!("  objects: {}\n", os.join(", ")));
        out.push_str(&format!("  places: {}\n", ctx.places.join(", ")));
        let mut en: BTreeMap<(AgentId, RoleId), Vec<WorldId>> = BTreeMap::new();
        for e in m.enactments().iter().filter(|e| e.context == c) {
            en.entry((e.agent, e.role)).or_default().push(e.world);
        }
        for ((a, r), ws) in en {
            let names: Vec<&str> = ws.iter().map(|&w| m.world_name(w)).collect();
            out.push_str(&format!("  enact {} as {}: {}\n", m.agent_name(a), m.role_name(r), names.join(", ")));
        }
    }
    if !m.affordances().is_empty() {
        out.push_str("affordances:\n");
        for f in m.affordances() {
            out.push_str(&format!(
                "  {} affords {} in {}\n",
                pr.objects(&f.objects),
                pr.action(&f.action),
                m.context_name(f.context)
            ));
        }
    }
    if !m.availability().is_empty() {
        out.push_str("availability:\n");
        for f in m.availability() {
            match &f.worlds {
                None => out.push_str(&format!("  {} in {}\n", pr.objects(&f.objects), m.context_name(f.context))),
                Some(ws) => {
                    let names: Vec<&str> = ws.iter().map(|&w| m.world_name(w)).collect();
                    out.push_str(&format!(
                        "  {} in {} at {}\n",
                        pr.objects(&f.objects),
                        m.context_name(f.context),
                        names.join(", ")
                    ));
                }
            }
        }
    }
    out
}
