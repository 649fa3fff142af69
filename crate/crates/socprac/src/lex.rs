//! Tokenizer shared by every text format.

use crate::error::{LangError, LangResult, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Colon,
    Semi,
    Plus,
    Amp,
    Tilde,
    Pipe,
    Arrow,
    Eq,
    Bang,
    Question,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::Ident(_) | Tok::Num(_) => "",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Plus => "+",
            Tok::Amp => "&",
            Tok::Tilde => "~",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::Eq => "=",
            Tok::Bang => "!",
            Tok::Question => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes one line. `column` is the 1-based column of `text`'s first
/// character. A `//` comment runs to the end of the line.
pub fn lex_line(text: &str, line: usize, column: usize) -> LangResult<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = column + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            break;
        }
        if ident_start(c) {
            let start = i;
            i += 1;
            loop {
                match chars.get(i) {
                    Some(&d) if ident_char(d) => i += 1,
                    // `counts-as`, but never the `->` arrow
                    Some('-') if chars.get(i + 1).is_some_and(|d| d.is_ascii_alphabetic()) => i += 1,
                    _ => break,
                }
            }
            if chars.get(i) == Some(&'#') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                i += 1;
                while chars.get(i).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                }
                if chars.get(i) == Some(&'s') && !chars.get(i + 1).is_some_and(|&d| ident_char(d)) {
                    i += 1;
                }
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(s), span: Span::new(line, col, i - start) });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while chars.get(i).is_some_and(|d| d.is_ascii_digit()) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let span = Span::new(line, col, i - start);
            let n = s.parse().map_err(|_| LangError::syntax(span, "number out of range"))?;
            out.push(Token { tok: Tok::Num(n), span });
            continue;
        }
        let (tok, len) = match c {
            '-' if chars.get(i + 1) == Some(&'>') => (Tok::Arrow, 2),
            '→' => (Tok::Arrow, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '<' | '⟨' => (Tok::Lt, 1),
            '>' | '⟩' => (Tok::Gt, 1),
            ',' => (Tok::Comma, 1),
            ':' => (Tok::Colon, 1),
            ';' => (Tok::Semi, 1),
            '+' => (Tok::Plus, 1),
            '&' | '∧' => (Tok::Amp, 1),
            '~' | '¬' => (Tok::Tilde, 1),
            '|' | '∨' => (Tok::Pipe, 1),
            '=' => (Tok::Eq, 1),
            '!' => (Tok::Bang, 1),
            '?' => (Tok::Question, 1),
            other => {
                return Err(LangError::syntax(Span::new(line, col, 1), format!("unexpected character `{other}`")));
            }
        };
        out.push(Token { tok, span: Span::new(line, col, len) });
        i += len;
    }
    Ok(out)
}

/// Tokenizes a multi-line string, numbering lines from `first_line`.
pub fn lex(text: &str, first_line: usize) -> LangResult<Vec<Token>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        out.extend(lex_line(line, first_line + k, 1)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s, 1).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn violation_names_are_identifiers() {
        assert_eq!(toks("V#1s & V#2"), vec![Tok::Ident("V#1s".into()), Tok::Amp, Tok::Ident("V#2".into())]);
        assert_eq!(toks("F#1(parent"), vec![Tok::Ident("F#1".into()), Tok::LParen, Tok::Ident("parent".into())]);
    }

    #[test]
    fn hyphen_versus_arrow() {
        assert_eq!(toks("counts-as:"), vec![Tok::Ident("counts-as".into()), Tok::Colon]);
        assert_eq!(toks("p->q"), vec![Tok::Ident("p".into()), Tok::Arrow, Tok::Ident("q".into())]);
    }

    #[test]
    fn spans_count_columns() {
        let t = lex("  ab <x> // c", 3).unwrap();
        assert_eq!(t[0].span, Span::new(3, 3, 2));
        assert_eq!(t[1].span, Span::new(3, 6, 1));
        assert_eq!(t.len(), 4);
        let e = lex("p $ q", 1).unwrap_err();
        assert_eq!(e.span, Span::new(1, 3, 1));
    }
}
