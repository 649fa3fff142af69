//! Diagnostics for the text formats.

use std::fmt;

/// A region of one source line. Columns and lengths count characters and
/// start at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl Span {
    pub fn new(line: usize, column: usize, length: usize) -> Span {
        Span { line, column, length }
    }

    /// Whether `(line, column)` falls inside the span. Empty spans contain
    /// their own position.
    pub fn contains(&self, line: usize, column: usize) -> bool {
        line == self.line && column >= self.column && column < self.column + self.length.max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    UnknownIdentifier,
    DuplicateDeclaration,
    MissingSection(String),
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct LangError {
    pub kind: ErrorKind,
    pub span: Span,
    pub message: String,
    pub file: Option<String>,
}

impl LangError {
    pub fn syntax(span: Span, message: impl Into<String>) -> LangError {
        LangError { kind: ErrorKind::Syntax, span, message: message.into(), file: None }
    }

    pub fn unknown(span: Span, what: &str, name: &str) -> LangError {
        LangError { kind: ErrorKind::UnknownIdentifier, span, message: format!("unknown {what} `{name}`"), file: None }
    }

    pub fn duplicate(span: Span, name: &str) -> LangError {
        LangError {
            kind: ErrorKind::DuplicateDeclaration,
            span,
            message: format!("`{name}` is declared twice"),
            file: None,
        }
    }

    pub fn missing_section(span: Span, name: &str) -> LangError {
        LangError {
            kind: ErrorKind::MissingSection(name.into()),
            span,
            message: format!("missing section `{name}`"),
            file: None,
        }
    }

    pub fn invalid(span: Span, message: impl Into<String>) -> LangError {
        LangError { kind: ErrorKind::Invalid, span, message: message.into(), file: None }
    }

    pub fn in_file(mut self, file: &str) -> LangError {
        self.file = Some(file.into());
        self
    }

    /// The message followed by the offending line with a caret marker.
    pub fn render(&self, source: &str) -> String {
        let mut out = self.to_string();
        if let Some(line) = source.lines().nth(self.span.line.saturating_sub(1)) {
            let pad: String = line.chars().take(self.span.column.saturating_sub(1)).map(|c| if c == '\t' { '\t' } else { ' ' }).collect();
            out.push_str(&format!("\n{:>5} | {line}\n      | {pad}{}", self.span.line, "^".repeat(self.span.length.max(1))));
        }
        out
    }
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)
    }
}

pub type LangResult<T> = Result<T, LangError>;
