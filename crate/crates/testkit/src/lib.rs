//! Test oracles and random generators.

pub mod ast;
pub mod gen;
pub mod practice_oracle;
pub mod reference;
