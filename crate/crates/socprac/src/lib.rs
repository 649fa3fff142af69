//! Text formats, checking commands and simulation front end.

pub mod commands;
pub mod error;
pub mod expr;
pub mod lex;
pub mod model_file;
pub mod practice_file;
pub mod query_file;
pub mod report;
pub mod trace_file;
pub mod sections;

pub use error::{ErrorKind, LangError, LangResult, Span};
