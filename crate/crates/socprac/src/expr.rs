//! Parser and printer for actions, events, assertions and plan patterns.

use std::collections::BTreeSet;

use socprac_core::ids::{ActionId, AgentId, AtomId, ContextId, Group, ObjectId, RoleId, ValueId};
use socprac_core::model::{KripkeModel, ModelBuilder};
use socprac_core::practice::PlanPattern;
use socprac_core::syntax::{
    ActionExpr, Actor, Assertion, CountsAs, DeonticKind, EventExpr, Norm, Purpose, Strategy, ValueLink,
};

use crate::error::{LangError, LangResult, Span};
use crate::lex::{lex, Tok, Token};

/// Name resolution used by the parser.
pub trait Scope {
    fn find_agent(&self, name: &str) -> Option<AgentId>;
    fn find_action(&self, name: &str) -> Option<ActionId>;
    fn find_atom(&self, name: &str) -> Option<AtomId>;
    fn find_role(&self, name: &str) -> Option<RoleId>;
    fn find_object(&self, name: &str) -> Option<ObjectId>;
    fn find_value(&self, name: &str) -> Option<ValueId>;
    fn find_context(&self, name: &str) -> Option<ContextId>;
}

macro_rules! scope_impl {
    ($t:ty) => {
        impl Scope for $t {
            fn find_agent(&self, name: &str) -> Option<AgentId> {
                self.agent_id(name)
            }
            fn find_action(&self, name: &str) -> Option<ActionId> {
                self.action_id(name)
            }
            fn find_atom(&self, name: &str) -> Option<AtomId> {
                self.atom_id(name)
            }
            fn find_role(&self, name: &str) -> Option<RoleId> {
                self.role_id(name)
            }
            fn find_object(&self, name: &str) -> Option<ObjectId> {
                self.object_id(name)
            }
            fn find_value(&self, name: &str) -> Option<ValueId> {
                self.value_id(name)
            }
            fn find_context(&self, name: &str) -> Option<ContextId> {
                self.context_id(name)
            }
        }
    };
}

scope_impl!(KripkeModel);
scope_impl!(ModelBuilder);

/// Reverse lookup used by the printer.
pub trait Names {
    fn agent_name(&self, a: AgentId) -> &str;
    fn action_name(&self, a: ActionId) -> &str;
    fn atom_name(&self, a: AtomId) -> &str;
    fn role_name(&self, r: RoleId) -> &str;
    fn object_name(&self, o: ObjectId) -> &str;
    fn value_name(&self, v: ValueId) -> &str;
    fn context_name(&self, c: ContextId) -> &str;
}

impl Names for KripkeModel {
    fn agent_name(&self, a: AgentId) -> &str {
        KripkeModel::agent_name(self, a)
    }
    fn action_name(&self, a: ActionId) -> &str {
        KripkeModel::action_name(self, a)
    }
    fn atom_name(&self, a: AtomId) -> &str {
        KripkeModel::atom_name(self, a)
    }
    fn role_name(&self, r: RoleId) -> &str {
        KripkeModel::role_name(self, r)
    }
    fn object_name(&self, o: ObjectId) -> &str {
        KripkeModel::object_name(self, o)
    }
    fn value_name(&self, v: ValueId) -> &str {
        &self.value_order(v).name
    }
    fn context_name(&self, c: ContextId) -> &str {
        KripkeModel::context_name(self, c)
    }
}

pub const KEYWORDS: &[&str] = &["true", "false", "skip", "any"];

/// The token an operator name must be followed by, if `name` is one.
fn opener(name: &str) -> Option<&'static str> {
    const HEADS: &[&str] = &[
        "Cap", "Able", "DONE", "DO", "DOpart", "DONEpart", "G", "H", "E", "O", "F", "P", "purpose", "strategy",
        "weak_strategy", "countsas", "promotes", "demotes", "affords", "available", "play", "active", "SC", "EC",
        "Salient",
    ];
    match name {
        "B" | "Goal" | "EB" | "CB" => Some("`{`"),
        n if HEADS.contains(&n) => Some("`(`"),
        n if n.len() > 2 && matches!(&n[..2], "O#" | "F#" | "P#") => Some("`(`"),
        _ => None,
    }
}

/// Recursive-descent parser over a token slice.
pub struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    scope: &'a dyn Scope,
    end: Span,
}

impl<'a> Parser<'a> {
    /// `end` is reported when input runs out.
    pub fn new(toks: &'a [Token], scope: &'a dyn Scope, end: Span) -> Parser<'a> {
        Parser { toks, pos: 0, scope, end }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.end, |t| t.span)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn unexpected(&self, wanted: &str) -> LangError {
        match self.peek() {
            Some(t) => LangError::syntax(self.span(), format!("expected {wanted}, found {}", t.describe())),
            None => LangError::syntax(self.span(), format!("expected {wanted}, found end of input")),
        }
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: Tok) -> LangResult<Span> {
        if self.peek() == Some(&tok) {
            Ok(self.bump().expect("peeked").span)
        } else {
            Err(self.unexpected(&format!("`{}`", tok.symbol())))
        }
    }

    pub fn finish(&self) -> LangResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(LangError::syntax(self.span(), format!("unexpected {}", t.describe()))),
        }
    }

    pub fn ident(&mut self, what: &str) -> LangResult<(&'a str, Span)> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Ident(s), span }) => {
                self.pos += 1;
                Ok((s.as_str(), *span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    pub fn number(&mut self) -> LangResult<u64> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Num(n), .. }) => {
                self.pos += 1;
                Ok(*n)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn peek_ident(&self) -> Option<&'a str> {
        match self.toks.get(self.pos) {
            Some(Token { tok: Tok::Ident(s), .. }) => Some(s.as_str()),
            _ => None,
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        self.peek_ident() == Some(kw)
    }

    pub fn agent(&mut self) -> LangResult<AgentId> {
        let (n, sp) = self.ident("an agent")?;
        self.scope.find_agent(n).ok_or_else(|| LangError::unknown(sp, "agent", n))
    }

    pub fn action_atom(&mut self) -> LangResult<ActionId> {
        let (n, sp) = self.ident("an action")?;
        self.scope.find_action(n).ok_or_else(|| LangError::unknown(sp, "action", n))
    }

    pub fn atom(&mut self) -> LangResult<AtomId> {
        let (n, sp) = self.ident("an atom")?;
        self.scope.find_atom(n).ok_or_else(|| LangError::unknown(sp, "atom", n))
    }

    pub fn role(&mut self) -> LangResult<RoleId> {
        let (n, sp) = self.ident("a role")?;
        self.scope.find_role(n).ok_or_else(|| LangError::unknown(sp, "role", n))
    }

    pub fn object(&mut self) -> LangResult<ObjectId> {
        let (n, sp) = self.ident("an object")?;
        self.scope.find_object(n).ok_or_else(|| LangError::unknown(sp, "object", n))
    }

    pub fn value(&mut self) -> LangResult<ValueId> {
        let (n, sp) = self.ident("a value")?;
        self.scope.find_value(n).ok_or_else(|| LangError::unknown(sp, "value", n))
    }

    pub fn context(&mut self) -> LangResult<ContextId> {
        let (n, sp) = self.ident("a context")?;
        self.scope.find_context(n).ok_or_else(|| LangError::unknown(sp, "context", n))
    }

    /// `{a, b}`, non-empty.
    pub fn group(&mut self) -> LangResult<Group> {
        self.expect(Tok::LBrace)?;
        let mut g = Group::EMPTY;
        loop {
            g = g.with(self.agent()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(g)
    }

    /// `{o1, o2}`, possibly empty.
    pub fn objects(&mut self) -> LangResult<BTreeSet<ObjectId>> {
        self.expect(Tok::LBrace)?;
        let mut out = BTreeSet::new();
        if self.eat(&Tok::RBrace) {
            return Ok(out);
        }
        loop {
            out.insert(self.object()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    /// A group in braces, a role name, or a single agent name.
    pub fn actor(&mut self) -> LangResult<Actor> {
        if self.peek() == Some(&Tok::LBrace) {
            return Ok(Actor::Group(self.group()?));
        }
        let (n, sp) = self.ident("an actor")?;
        if let Some(r) = self.scope.find_role(n) {
            Ok(Actor::Role(r))
        } else if let Some(a) = self.scope.find_agent(n) {
            Ok(Actor::Group(Group::singleton(a)))
        } else {
            Err(LangError::unknown(sp, "role or agent", n))
        }
    }

    pub fn action(&mut self) -> LangResult<ActionExpr> {
        let mut l = self.action_seq()?;
        while self.eat(&Tok::Plus) {
            l = ActionExpr::choice(l, self.action_seq()?);
        }
        Ok(l)
    }

    fn action_seq(&mut self) -> LangResult<ActionExpr> {
        let mut l = self.action_par()?;
        while self.eat(&Tok::Semi) {
            l = ActionExpr::seq(l, self.action_par()?);
        }
        Ok(l)
    }

    fn action_par(&mut self) -> LangResult<ActionExpr> {
        let mut l = self.action_unary()?;
        while self.eat(&Tok::Amp) {
            l = ActionExpr::par(l, self.action_unary()?);
        }
        Ok(l)
    }

    pub fn action_unary(&mut self) -> LangResult<ActionExpr> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(ActionExpr::neg(self.action_unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let a = self.action()?;
                self.expect(Tok::RParen)?;
                Ok(a)
            }
            Some(Tok::Ident(s)) if s == "skip" => {
                self.pos += 1;
                Ok(ActionExpr::Skip)
            }
            Some(Tok::Ident(s)) if s == "any" => {
                self.pos += 1;
                self.expect(Tok::Arrow)?;
                Ok(ActionExpr::Achieving(Box::new(self.assertion_unary()?)))
            }
            Some(Tok::Ident(_)) => Ok(ActionExpr::Atom(self.action_atom()?)),
            _ => Err(self.unexpected("an action")),
        }
    }

    pub fn event(&mut self) -> LangResult<EventExpr> {
        let mut l = self.event_seq()?;
        while self.eat(&Tok::Plus) {
            l = EventExpr::choice(l, self.event_seq()?);
        }
        Ok(l)
    }

    fn event_seq(&mut self) -> LangResult<EventExpr> {
        let mut l = self.event_par()?;
        while self.eat(&Tok::Semi) {
            l = EventExpr::seq(l, self.event_par()?);
        }
        Ok(l)
    }

    fn event_par(&mut self) -> LangResult<EventExpr> {
        let mut l = self.event_unary()?;
        while self.eat(&Tok::Amp) {
            l = EventExpr::par(l, self.event_unary()?);
        }
        Ok(l)
    }

    fn event_unary(&mut self) -> LangResult<EventExpr> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(EventExpr::neg(self.event_unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.event()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(s)) if s == "skip" => {
                self.pos += 1;
                Ok(EventExpr::Skip)
            }
            Some(Tok::LBrace) | Some(Tok::Ident(_)) => {
                let (actor, act) = self.performance()?;
                Ok(EventExpr::Do(actor, act))
            }
            _ => Err(self.unexpected("an event")),
        }
    }

    /// `actor:α` with a unary action.
    fn performance(&mut self) -> LangResult<(Actor, ActionExpr)> {
        let actor = self.actor()?;
        self.expect(Tok::Colon)?;
        Ok((actor, self.action_unary()?))
    }

    /// `actor:α` with a full action, as used inside argument lists.
    fn performance_arg(&mut self) -> LangResult<(Actor, ActionExpr)> {
        let actor = self.actor()?;
        self.expect(Tok::Colon)?;
        Ok((actor, self.action()?))
    }

    pub fn assertion(&mut self) -> LangResult<Assertion> {
        let l = self.assertion_or()?;
        if self.eat(&Tok::Arrow) {
            return Ok(Assertion::implies(l, self.assertion()?));
        }
        Ok(l)
    }

    fn assertion_or(&mut self) -> LangResult<Assertion> {
        let mut l = self.assertion_and()?;
        while self.eat(&Tok::Pipe) {
            l = Assertion::or(l, self.assertion_and()?);
        }
        Ok(l)
    }

    fn assertion_and(&mut self) -> LangResult<Assertion> {
        let mut l = self.assertion_unary()?;
        while self.eat(&Tok::Amp) {
            l = Assertion::and(l, self.assertion_unary()?);
        }
        Ok(l)
    }

    pub fn assertion_unary(&mut self) -> LangResult<Assertion> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Assertion::not(self.assertion_unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let a = self.assertion()?;
                self.expect(Tok::RParen)?;
                Ok(a)
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let e = self.event()?;
                self.expect(Tok::RBracket)?;
                Ok(Assertion::boxed(e, self.assertion_unary()?))
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let e = self.event()?;
                self.expect(Tok::Gt)?;
                Ok(Assertion::diamond(e, self.assertion_unary()?))
            }
            Some(Tok::Ident(_)) => self.assertion_ident(),
            _ => Err(self.unexpected("an assertion")),
        }
    }

    fn assertion_ident(&mut self) -> LangResult<Assertion> {
        let name = self.peek_ident().expect("caller checked");
        let next = self.peek_at(1);
        match (name, next) {
            ("true", _) => {
                self.pos += 1;
                Ok(Assertion::True)
            }
            ("false", _) => {
                self.pos += 1;
                Ok(Assertion::False)
            }
            ("B", Some(Tok::LBrace)) => {
                self.pos += 2;
                let a = self.agent()?;
                self.expect(Tok::RBrace)?;
                Ok(Assertion::belief(a, self.assertion_unary()?))
            }
            ("Goal", Some(Tok::LBrace)) => {
                self.pos += 2;
                let a = self.agent()?;
                self.expect(Tok::RBrace)?;
                Ok(Assertion::goal(a, self.assertion_unary()?))
            }
            ("EB", Some(Tok::LBrace)) => {
                self.pos += 1;
                let g = self.group()?;
                Ok(Assertion::EveryoneBelieves(g, Box::new(self.assertion_unary()?)))
            }
            ("CB", Some(Tok::LBrace)) => {
                self.pos += 1;
                let g = self.group()?;
                Ok(Assertion::common_belief(g, self.assertion_unary()?))
            }
            (_, Some(Tok::LParen)) => self.head(),
            (n, _) if self.scope.find_atom(n).is_none() && opener(n).is_some() => {
                self.pos += 1;
                Err(self.unexpected(opener(n).unwrap()))
            }
            _ => Ok(Assertion::Atom(self.atom()?)),
        }
    }

    fn comma(&mut self) -> LangResult<()> {
        self.expect(Tok::Comma).map(|_| ())
    }

    fn head(&mut self) -> LangResult<Assertion> {
        let (name, name_span) = self.ident("an operator")?;
        self.expect(Tok::LParen)?;
        let out = match name {
            "Cap" | "Able" => {
                let a = self.agent()?;
                self.comma()?;
                let act = self.action()?;
                if name == "Cap" {
                    Assertion::Cap(a, act)
                } else {
                    Assertion::Able(a, act)
                }
            }
            "DONE" => Assertion::Done(self.event()?),
            "DO" => Assertion::Do(self.event()?),
            "DOpart" | "DONEpart" => {
                let agent = self.agent()?;
                self.comma()?;
                let action = self.action_atom()?;
                self.comma()?;
                let group = self.group()?;
                self.comma()?;
                let expr = self.action()?;
                if name == "DOpart" {
                    Assertion::DoPart { agent, action, group, expr }
                } else {
                    Assertion::DonePart { agent, action, group, expr }
                }
            }
            "G" => {
                let a = self.agent()?;
                self.comma()?;
                Assertion::AbleTo(a, Box::new(self.assertion()?))
            }
            "H" | "E" => {
                let actor = self.actor()?;
                self.comma()?;
                let phi = Box::new(self.assertion()?);
                if name == "H" {
                    Assertion::Attempt(actor, phi)
                } else {
                    Assertion::Stit(actor, phi)
                }
            }
            "O" | "F" | "P" => {
                let violation = self.atom()?;
                self.comma()?;
                let event = self.event()?;
                Assertion::Deontic { kind: deontic_kind(name), violation, event }
            }
            "purpose" => Assertion::Purpose(Box::new(self.purpose()?)),
            "strategy" | "weak_strategy" => {
                let condition = self.assertion()?;
                self.comma()?;
                let (actors, action) = self.performance_arg()?;
                self.comma()?;
                let c = self.context()?;
                let weak = name == "weak_strategy";
                Assertion::Strategy(Box::new(Strategy { condition, actors, action, weak }), c)
            }
            "countsas" => {
                let context = self.context()?;
                self.comma()?;
                let role = self.role()?;
                self.expect(Tok::Colon)?;
                let performed = self.action()?;
                self.comma()?;
                let counts_as = self.action()?;
                Assertion::CountsAs(Box::new(CountsAs { context, role, performed, counts_as }))
            }
            "promotes" | "demotes" => {
                let practice = self.context()?;
                self.comma()?;
                let role = self.role()?;
                self.expect(Tok::Colon)?;
                let action = self.action()?;
                self.comma()?;
                let value = self.value()?;
                let link = Box::new(ValueLink { practice, role, action, value });
                if name == "promotes" {
                    Assertion::Promotes(link)
                } else {
                    Assertion::Demotes(link)
                }
            }
            "affords" => {
                let objs = self.objects()?;
                self.comma()?;
                let act = self.action()?;
                self.comma()?;
                Assertion::Affords(objs, act, self.context()?)
            }
            "available" => {
                let objs = self.objects()?;
                self.comma()?;
                Assertion::Available(objs, self.context()?)
            }
            "play" => {
                let a = self.agent()?;
                self.comma()?;
                let r = self.role()?;
                self.comma()?;
                Assertion::Play(a, r, self.context()?)
            }
            "active" => Assertion::Active(self.context()?),
            "SC" | "EC" => {
                let c = self.context()?;
                self.comma()?;
                let phi = Box::new(self.assertion()?);
                if name == "SC" {
                    Assertion::StartCond(c, phi)
                } else {
                    Assertion::EndCond(c, phi)
                }
            }
            "Salient" => {
                let (actor, act) = self.performance_arg()?;
                self.comma()?;
                Assertion::Salient(actor, act, self.context()?)
            }
            _ => match role_norm_name(name) {
                Some((kind, k)) => Assertion::RoleNorm(Box::new(self.role_norm(kind, k, name_span)?)),
                None => return Err(LangError::syntax(name_span, format!("unknown operator `{name}`"))),
            },
        };
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn role_norm(&mut self, kind: DeonticKind, k: u64, span: Span) -> LangResult<Norm> {
        let vname = format!("V#{k}");
        let violation = self.scope.find_atom(&vname).ok_or_else(|| LangError::unknown(span, "violation atom", &vname))?;
        let role = self.role()?;
        self.comma()?;
        let condition = self.assertion()?;
        self.comma()?;
        let action = self.action()?;
        let mut sanction = None;
        let mut sanction_violation = None;
        if kind != DeonticKind::Permission && self.eat(&Tok::Comma) {
            sanction = Some(self.action()?);
            let sname = format!("V#{k}s");
            sanction_violation =
                Some(self.scope.find_atom(&sname).ok_or_else(|| LangError::unknown(span, "violation atom", &sname))?);
        }
        Ok(Norm { kind, role, condition, action, sanction, violation, sanction_violation })
    }

    fn purpose(&mut self) -> LangResult<Purpose> {
        if self.peek() == Some(&Tok::LBrace) {
            let group = self.group()?;
            self.comma()?;
            let action = self.action()?;
            self.comma()?;
            let context = self.context()?;
            self.comma()?;
            let goal = self.assertion()?;
            return Ok(Purpose::Group { group, action, context, goal });
        }
        if let (Some(n), Some(next)) = (self.peek_ident(), self.peek_at(1)) {
            if *next == Tok::Colon {
                let agent = self.agent()?;
                self.expect(Tok::Colon)?;
                let action = self.action()?;
                self.comma()?;
                let context = self.context()?;
                self.comma()?;
                let goal = self.assertion()?;
                return Ok(Purpose::Basic { agent, action, context, goal });
            }
            if *next == Tok::Comma {
                if let Some(agent) = self.scope.find_agent(n) {
                    self.pos += 2;
                    let action = self.action()?;
                    self.comma()?;
                    let context = self.context()?;
                    self.comma()?;
                    let goal = self.assertion()?;
                    return Ok(Purpose::Complex { agent, action, context, goal });
                }
                if let Some(role) = self.scope.find_role(n) {
                    self.pos += 2;
                    let action = self.action()?;
                    self.comma()?;
                    let context = self.context()?;
                    self.comma()?;
                    let goal = self.assertion()?;
                    return Ok(Purpose::Role { role, action, context, goal });
                }
                if let Some(practice) = self.scope.find_context(n) {
                    self.pos += 2;
                    let goal = self.assertion()?;
                    return Ok(Purpose::Practice { practice, goal });
                }
            }
            let owner = self.scope.find_agent(n).is_some()
                || self.scope.find_role(n).is_some()
                || self.scope.find_context(n).is_some();
            if owner && self.scope.find_action(n).is_none() {
                self.pos += 1;
                return Err(self.unexpected("`,` or `:`"));
            }
        }
        let action = self.action()?;
        self.comma()?;
        let context = self.context()?;
        self.comma()?;
        let goal = self.assertion()?;
        Ok(Purpose::General { action, context, goal })
    }

    pub fn pattern(&mut self) -> LangResult<PlanPattern> {
        let mut l = self.pattern_seq()?;
        while self.eat(&Tok::Plus) {
            l = PlanPattern::choice(l, self.pattern_seq()?);
        }
        Ok(l)
    }

    fn pattern_seq(&mut self) -> LangResult<PlanPattern> {
        let mut l = self.pattern_par()?;
        while self.eat(&Tok::Semi) {
            l = PlanPattern::seq(l, self.pattern_par()?);
        }
        Ok(l)
    }

    fn pattern_par(&mut self) -> LangResult<PlanPattern> {
        let mut l = self.pattern_unary()?;
        while self.eat(&Tok::Amp) {
            l = PlanPattern::par(l, self.pattern_unary()?);
        }
        Ok(l)
    }

    fn pattern_unary(&mut self) -> LangResult<PlanPattern> {
        if self.eat(&Tok::LParen) {
            let p = self.pattern()?;
            self.expect(Tok::RParen)?;
            return Ok(p);
        }
        if self.peek_keyword("phase") && self.peek_at(1) == Some(&Tok::LParen) {
            self.pos += 2;
            let event = self.event()?;
            self.comma()?;
            let goal = self.assertion()?;
            self.expect(Tok::RParen)?;
            return Ok(PlanPattern::leaf(event, goal));
        }
        Err(self.unexpected("`phase(` or `(`"))
    }
}

fn deontic_kind(letter: &str) -> DeonticKind {
    match letter {
        "O" => DeonticKind::Obligation,
        "F" => DeonticKind::Prohibition,
        _ => DeonticKind::Permission,
    }
}

/// `O#3` style names.
fn role_norm_name(name: &str) -> Option<(DeonticKind, u64)> {
    let (head, num) = name.split_once('#')?;
    if !matches!(head, "O" | "F" | "P") || num.is_empty() || !num.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((deontic_kind(head), num.parse().ok()?))
}

fn end_span(toks: &[Token]) -> Span {
    toks.last().map_or(Span::new(1, 1, 0), |t| Span::new(t.span.line, t.span.column + t.span.length, 0))
}

fn parse_with<T>(
    src: &str,
    scope: &dyn Scope,
    f: impl FnOnce(&mut Parser<'_>) -> LangResult<T>,
) -> LangResult<T> {
    let toks = lex(src, 1)?;
    let mut p = Parser::new(&toks, scope, end_span(&toks));
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

pub fn parse_action(src: &str, scope: &dyn Scope) -> LangResult<ActionExpr> {
    parse_with(src, scope, |p| p.action())
}

pub fn parse_event(src: &str, scope: &dyn Scope) -> LangResult<EventExpr> {
    parse_with(src, scope, |p| p.event())
}

pub fn parse_assertion(src: &str, scope: &dyn Scope) -> LangResult<Assertion> {
    parse_with(src, scope, |p| p.assertion())
}

pub fn parse_pattern(src: &str, scope: &dyn Scope) -> LangResult<PlanPattern> {
    parse_with(src, scope, |p| p.pattern())
}

/// Parses a token slice completely.
pub fn parse_tokens<T>(
    toks: &[Token],
    scope: &dyn Scope,
    f: impl FnOnce(&mut Parser<'_>) -> LangResult<T>,
) -> LangResult<T> {
    let mut p = Parser::new(toks, scope, end_span(toks));
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

// Binding strength, loosest first.
const CHOICE: u8 = 1;
const SEQ: u8 = 2;
const PAR: u8 = 3;
const UNARY: u8 = 4;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;

/// Pretty printer; output parses back to the same tree.
pub struct Printer<'a> {
    pub names: &'a dyn Names,
}

impl<'a> Printer<'a> {
    pub fn new(names: &'a dyn Names) -> Printer<'a> {
        Printer { names }
    }

    pub fn group(&self, g: Group) -> String {
        let v: Vec<&str> = g.agents().map(|a| self.names.agent_name(a)).collect();
        format!("{{{}}}", v.join(", "))
    }

    pub fn objects(&self, objs: &BTreeSet<ObjectId>) -> String {
        let v: Vec<&str> = objs.iter().map(|&o| self.names.object_name(o)).collect();
        format!("{{{}}}", v.join(", "))
    }

    pub fn actor(&self, a: &Actor) -> String {
        match a {
            Actor::Group(g) => self.group(*g),
            Actor::Role(r) => self.names.role_name(*r).to_string(),
        }
    }

    pub fn action(&self, a: &ActionExpr) -> String {
        let mut s = String::new();
        self.action_into(a, 0, &mut s);
        s
    }

    fn action_into(&self, a: &ActionExpr, min: u8, out: &mut String) {
        let (prec, l, r, op) = match a {
            ActionExpr::Atom(id) => {
                out.push_str(self.names.action_name(*id));
                return;
            }
            ActionExpr::Skip => {
                out.push_str("skip");
                return;
            }
            ActionExpr::Neg(x) => {
                out.push('~');
                self.action_into(x, UNARY, out);
                return;
            }
            ActionExpr::Achieving(phi) => {
                out.push_str("any->");
                self.assertion_into(phi, UNARY, out);
                return;
            }
            ActionExpr::Choice(l, r) => (CHOICE, l, r, " + "),
            ActionExpr::Seq(l, r) => (SEQ, l, r, "; "),
            ActionExpr::Par(l, r) => (PAR, l, r, " & "),
        };
        let wrap = prec < min;
        if wrap {
            out.push('(');
        }
        self.action_into(l, prec, out);
        out.push_str(op);
        self.action_into(r, prec + 1, out);
        if wrap {
            out.push(')');
        }
    }

    pub fn event(&self, e: &EventExpr) -> String {
        let mut s = String::new();
        self.event_into(e, 0, &mut s);
        s
    }

    fn event_into(&self, e: &EventExpr, min: u8, out: &mut String) {
        let (prec, l, r, op) = match e {
            EventExpr::Do(actor, act) => {
                out.push_str(&self.actor(actor));
                out.push(':');
                self.action_into(act, UNARY, out);
                return;
            }
            EventExpr::Skip => {
                out.push_str("skip");
                return;
            }
            EventExpr::Neg(x) => {
                out.push('~');
                self.event_into(x, UNARY, out);
                return;
            }
            EventExpr::Choice(l, r) => (CHOICE, l, r, " + "),
            EventExpr::Seq(l, r) => (SEQ, l, r, "; "),
            EventExpr::Par(l, r) => (PAR, l, r, " & "),
        };
        let wrap = prec < min;
        if wrap {
            out.push('(');
        }
        self.event_into(l, prec, out);
        out.push_str(op);
        self.event_into(r, prec + 1, out);
        if wrap {
            out.push(')');
        }
    }

    pub fn assertion(&self, a: &Assertion) -> String {
        let mut s = String::new();
        self.assertion_into(a, 0, &mut s);
        s
    }

    fn assertion_into(&self, a: &Assertion, min: u8, out: &mut String) {
        let n = self.names;
        let (prec, l, r, op, right_assoc) = match a {
            Assertion::Implies(l, r) => (IMPLIES, l, r, " -> ", true),
            Assertion::Or(l, r) => (OR, l, r, " | ", false),
            Assertion::And(l, r) => (AND, l, r, " & ", false),
            Assertion::Not(x) => {
                out.push('~');
                self.assertion_into(x, UNARY, out);
                return;
            }
            Assertion::Box(e, x) => {
                out.push('[');
                self.event_into(e, 0, out);
                out.push(']');
                self.assertion_into(x, UNARY, out);
                return;
            }
            Assertion::Diamond(e, x) => {
                out.push('<');
                self.event_into(e, 0, out);
                out.push('>');
                self.assertion_into(x, UNARY, out);
                return;
            }
            Assertion::Belief(ag, x) => {
                out.push_str(&format!("B{{{}}} ", n.agent_name(*ag)));
                self.assertion_into(x, UNARY, out);
                return;
            }
            Assertion::Goal(ag, x) => {
                out.push_str(&format!("Goal{{{}}} ", n.agent_name(*ag)));
                self.assertion_into(x, UNARY, out);
                return;
            }
            Assertion::EveryoneBelieves(g, x) => {
                out.push_str(&format!("EB{} ", self.group(*g)));
                self.assertion_into(x, UNARY, out);
                return;
            }
            Assertion::CommonBelief(g, x) => {
                out.push_str(&format!("CB{} ", self.group(*g)));
                self.assertion_into(x, UNARY, out);
                return;
            }
            other => {
                out.push_str(&self.atomic(other));
                return;
            }
        };
        let wrap = prec < min;
        if wrap {
            out.push('(');
        }
        if right_assoc {
            self.assertion_into(l, prec + 1, out);
            out.push_str(op);
            self.assertion_into(r, prec, out);
        } else {
            self.assertion_into(l, prec, out);
            out.push_str(op);
            self.assertion_into(r, prec + 1, out);
        }
        if wrap {
            out.push(')');
        }
    }

    fn atomic(&self, a: &Assertion) -> String {
        let n = self.names;
        match a {
            Assertion::True => "true".into(),
            Assertion::False => "false".into(),
            Assertion::Atom(p) => n.atom_name(*p).into(),
            Assertion::Done(e) => format!("DONE({})", self.event(e)),
            Assertion::Do(e) => format!("DO({})", self.event(e)),
            Assertion::Cap(ag, act) => format!("Cap({}, {})", n.agent_name(*ag), self.action(act)),
            Assertion::Able(ag, act) => format!("Able({}, {})", n.agent_name(*ag), self.action(act)),
            Assertion::DoPart { agent, action, group, expr } => format!(
                "DOpart({}, {}, {}, {})",
                n.agent_name(*agent),
                n.action_name(*action),
                self.group(*group),
                self.action(expr)
            ),
            Assertion::DonePart { agent, action, group, expr } => format!(
                "DONEpart({}, {}, {}, {})",
                n.agent_name(*agent),
                n.action_name(*action),
                self.group(*group),
                self.action(expr)
            ),
            Assertion::AbleTo(ag, x) => format!("G({}, {})", n.agent_name(*ag), self.assertion(x)),
            Assertion::Attempt(actor, x) => format!("H({}, {})", self.actor(actor), self.assertion(x)),
            Assertion::Stit(actor, x) => format!("E({}, {})", self.actor(actor), self.assertion(x)),
            Assertion::Deontic { kind, violation, event } => {
                format!("{}({}, {})", kind.letter(), n.atom_name(*violation), self.event(event))
            }
            Assertion::RoleNorm(norm) => self.norm(norm),
            Assertion::Purpose(p) => self.purpose(p),
            Assertion::Strategy(s, c) => format!(
                "{}({}, {}:{}, {})",
                if s.weak { "weak_strategy" } else { "strategy" },
                self.assertion(&s.condition),
                self.actor(&s.actors),
                self.action(&s.action),
                n.context_name(*c)
            ),
            Assertion::CountsAs(ca) => format!(
                "countsas({}, {}:{}, {})",
                n.context_name(ca.context),
                n.role_name(ca.role),
                self.action(&ca.performed),
                self.action(&ca.counts_as)
            ),
            Assertion::Promotes(v) => format!("promotes({})", self.value_link(v)),
            Assertion::Demotes(v) => format!("demotes({})", self.value_link(v)),
            Assertion::Affords(objs, act, c) => {
                format!("affords({}, {}, {})", self.objects(objs), self.action(act), n.context_name(*c))
            }
            Assertion::Available(objs, c) => format!("available({}, {})", self.objects(objs), n.context_name(*c)),
            Assertion::Play(ag, r, c) => {
                format!("play({}, {}, {})", n.agent_name(*ag), n.role_name(*r), n.context_name(*c))
            }
            Assertion::Active(c) => format!("active({})", n.context_name(*c)),
            Assertion::StartCond(c, x) => format!("SC({}, {})", n.context_name(*c), self.assertion(x)),
            Assertion::EndCond(c, x) => format!("EC({}, {})", n.context_name(*c), self.assertion(x)),
            Assertion::Salient(actor, act, c) => {
                format!("Salient({}:{}, {})", self.actor(actor), self.action(act), n.context_name(*c))
            }
            Assertion::Not(_)
            | Assertion::And(..)
            | Assertion::Or(..)
            | Assertion::Implies(..)
            | Assertion::Box(..)
            | Assertion::Diamond(..)
            | Assertion::Belief(..)
            | Assertion::Goal(..)
            | Assertion::EveryoneBelieves(..)
            | Assertion::CommonBelief(..) => format!("({})", self.assertion(a)),
        }
    }

    fn value_link(&self, v: &ValueLink) -> String {
        let n = self.names;
        format!(
            "{}, {}:{}, {}",
            n.context_name(v.practice),
            n.role_name(v.role),
            self.action(&v.action),
            n.value_name(v.value)
        )
    }

    /// `O#k(r, φ, α, ρ)`. The index comes from the violation atom's name.
    pub fn norm(&self, norm: &Norm) -> String {
        let n = self.names;
        let vname = n.atom_name(norm.violation);
        let k = vname.strip_prefix("V#").unwrap_or(vname);
        let mut s = format!(
            "{}#{}({}, {}, {}",
            norm.kind.letter(),
            k,
            n.role_name(norm.role),
            self.assertion(&norm.condition),
            self.action(&norm.action)
        );
        if let Some(rho) = &norm.sanction {
            s.push_str(", ");
            s.push_str(&self.action(rho));
        }
        s.push(')');
        s
    }

    pub fn purpose(&self, p: &Purpose) -> String {
        let n = self.names;
        match p {
            Purpose::Basic { agent, action, context, goal } => format!(
                "purpose({}:{}, {}, {})",
                n.agent_name(*agent),
                self.action(action),
                n.context_name(*context),
                self.assertion(goal)
            ),
            Purpose::General { action, context, goal } => {
                format!("purpose({}, {}, {})", self.action(action), n.context_name(*context), self.assertion(goal))
            }
            Purpose::Complex { agent, action, context, goal } => format!(
                "purpose({}, {}, {}, {})",
                n.agent_name(*agent),
                self.action(action),
                n.context_name(*context),
                self.assertion(goal)
            ),
            Purpose::Group { group, action, context, goal } => format!(
                "purpose({}, {}, {}, {})",
                self.group(*group),
                self.action(action),
                n.context_name(*context),
                self.assertion(goal)
            ),
            Purpose::Role { role, action, context, goal } => format!(
                "purpose({}, {}, {}, {})",
                n.role_name(*role),
                self.action(action),
                n.context_name(*context),
                self.assertion(goal)
            ),
            Purpose::Practice { practice, goal } => {
                format!("purpose({}, {})", n.context_name(*practice), self.assertion(goal))
            }
        }
    }

    pub fn pattern(&self, p: &PlanPattern) -> String {
        let mut s = String::new();
        self.pattern_into(p, 0, &mut s);
        s
    }

    fn pattern_into(&self, p: &PlanPattern, min: u8, out: &mut String) {
        let (prec, l, r, op) = match p {
            PlanPattern::Leaf { event, goal } => {
                out.push_str(&format!("phase({}, {})", self.event(event), self.assertion(goal)));
                return;
            }
            PlanPattern::Choice(l, r) => (CHOICE, l, r, " + "),
            PlanPattern::Seq(l, r) => (SEQ, l, r, "; "),
            PlanPattern::Par(l, r) => (PAR, l, r, " & "),
        };
        let wrap = prec < min;
        if wrap {
            out.push('(');
        }
        self.pattern_into(l, prec, out);
        out.push_str(op);
        self.pattern_into(r, prec + 1, out);
        if wrap {
            out.push(')');
        }
    }
}
