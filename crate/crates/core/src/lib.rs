//! tcla: a timed concurrent language whose agents share an abstract
//! argumentation framework as their store.

pub mod af;
pub mod engine;
pub mod protocols;
pub mod syntax;
pub mod session;
pub mod presets;
