//! Core of a model checker for social practices: an open-interpretation
//! event algebra over synchronous multi-agent steps, Kripke models with
//! belief, goal and temporal-order relations, an evaluator for the full
//! assertion language, and the practice-level checks built on it.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod checker;
pub mod event;
pub mod ids;
pub mod model;
pub mod practice;
pub mod sim;
pub mod syntax;

pub use ids::{ActSet, ActionId, AgentId, AtomId, ContextId, Group, ObjectId, RoleId, StepId, ValueId, WorldId};
