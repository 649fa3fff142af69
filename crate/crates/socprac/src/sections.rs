//! Line layout shared by the model and practice formats: column-0 headers
//! ending in `:`, indented entries, deeper-indented continuation lines.
//! A header with inline content takes every indented line as continuation.

use crate::error::{LangError, LangResult, Span};
use crate::lex::{lex_line, Tok, Token};

#[derive(Clone, Debug)]
pub struct Entry {
    pub indent: usize,
    pub toks: Vec<Token>,
}

impl Entry {
    pub fn span(&self) -> Span {
        self.toks.first().map(|t| t.span).unwrap_or_default()
    }

    pub fn end(&self) -> Span {
        self.toks.last().map_or(Span::default(), |t| Span::new(t.span.line, t.span.column + t.span.length, 0))
    }
}

#[derive(Clone, Debug)]
pub struct Section {
    /// Header words before the colon.
    pub words: Vec<String>,
    pub span: Span,
    /// Tokens after the header colon on the same line.
    pub inline: Vec<Token>,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn name(&self) -> String {
        self.words.join(" ")
    }

    /// Inline content followed by each entry.
    pub fn chunks(&self) -> Vec<Entry> {
        let mut out = Vec::new();
        if !self.inline.is_empty() {
            out.push(Entry { indent: 0, toks: self.inline.clone() });
        }
        out.extend(self.entries.iter().cloned());
        out
    }
}

/// Splits a source into sections. Lines before the first header are an
/// error, as is a header without its colon.
pub fn split(src: &str) -> LangResult<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (k, text) in src.lines().enumerate() {
        let line = k + 1;
        let indent = text.chars().take_while(|c| c.is_whitespace()).count();
        let toks = lex_line(text, line, 1)?;
        if toks.is_empty() {
            continue;
        }
        if indent == 0 {
            let mut words = Vec::new();
            let mut i = 0;
            while let Some(Token { tok: Tok::Ident(w), .. }) = toks.get(i) {
                words.push(w.clone());
                i += 1;
            }
            if words.is_empty() {
                return Err(LangError::syntax(toks[0].span, format!("expected a section header, found {}", toks[0].tok.describe())));
            }
            match toks.get(i) {
                Some(Token { tok: Tok::Colon, .. }) => {}
                Some(t) => return Err(LangError::syntax(t.span, format!("expected `:`, found {}", t.tok.describe()))),
                None => {
                    let last = toks[i - 1].span;
                    return Err(LangError::syntax(
                        Span::new(line, last.column + last.length, 0),
                        "expected `:` after section header",
                    ));
                }
            }
            out.push(Section { words, span: toks[0].span, inline: toks[i + 1..].to_vec(), entries: Vec::new() });
            continue;
        }
        let Some(sec) = out.last_mut() else {
            return Err(LangError::syntax(toks[0].span, "entry outside any section"));
        };
        if !sec.inline.is_empty() && sec.entries.is_empty() {
            sec.inline.extend(toks);
            continue;
        }
        match sec.entries.first() {
            Some(first) if indent > first.indent => {
                sec.entries.last_mut().expect("non-empty").toks.extend(toks);
            }
            _ => sec.entries.push(Entry { indent, toks }),
        }
    }
    Ok(out)
}

/// Splits tokens at top-level commas (outside any brackets).
pub fn split_commas(toks: &[Token]) -> Vec<&[Token]> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        match t.tok {
            Tok::LParen | Tok::LBrace | Tok::LBracket => depth += 1,
            Tok::RParen | Tok::RBrace | Tok::RBracket => depth -= 1,
            Tok::Comma if depth == 0 => {
                out.push(&toks[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&toks[start..]);
    out
}
