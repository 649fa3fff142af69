//! The query format (`.spq`): one `WORLD: assertion` per line.

use socprac_core::ids::WorldId;
use socprac_core::model::KripkeModel;
use socprac_core::syntax::Assertion;

use crate::error::{LangError, LangResult};
use crate::expr::{Parser, Printer};
use crate::lex::{lex_line, Tok};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub world: WorldId,
    pub formula: Assertion,
    pub line: usize,
}

pub fn parse_queries(src: &str, m: &KripkeModel) -> LangResult<Vec<Query>> {
    let mut out = Vec::new();
    for (k, text) in src.lines().enumerate() {
        let line = k + 1;
        let toks = lex_line(text, line, 1)?;
        if toks.is_empty() {
            continue;
        }
        let end = toks.last().map(|t| t.span).unwrap_or_default();
        let end = crate::error::Span::new(line, end.column + end.length, 0);
        let mut p = Parser::new(&toks, m, end);
        let (name, span) = p.ident("a world")?;
        let world = m.world_id(name).ok_or_else(|| LangError::unknown(span, "world", name))?;
        p.expect(Tok::Colon)?;
        let formula = p.assertion()?;
        p.finish()?;
        out.push(Query { world, formula, line });
    }
    Ok(out)
}

pub fn print_query(m: &KripkeModel, q: &Query) -> String {
    format!("{}: {}", m.world_name(q.world), Printer::new(m).assertion(&q.formula))
}
