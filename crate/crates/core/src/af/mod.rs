//! Abstract argumentation frameworks: the data model shared by all agents,
//! extension-based semantics, reinstatement labellings and acceptance.

mod framework;
pub mod io;
mod semantics;

pub use framework::{arg, is_identifier, ArgumentId, ArgumentationFramework, Attack};
pub use semantics::{
    accepted, extensions, is_reinstatement_labelling, labelling_of, AcceptanceMode, Extension,
    Label, Labelling, Semantics, MAX_ENUMERABLE_ARGUMENTS,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AfError {
    #[error("invalid argument identifier {0:?}")]
    InvalidName(String),
    #[error("argument {0} is not in the framework")]
    UnknownArgument(ArgumentId),
    #[error("attack ({from},{to}) refers to missing argument {missing}")]
    DanglingAttack {
        from: ArgumentId,
        to: ArgumentId,
        missing: ArgumentId,
    },
    #[error("set is not conflict-free: {0} and {1} conflict")]
    NotConflictFree(ArgumentId, ArgumentId),
    #[error("labelling is not total: {0} has no label")]
    PartialLabelling(ArgumentId),
    #[error("labelling assigns a label to {0}, which is not in the framework")]
    ForeignLabel(ArgumentId),
    #[error("unknown semantics {0:?}")]
    UnknownSemantics(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("semantics {0} cannot be used for acceptance tests")]
    NotATestSemantics(Semantics),
    #[error("framework has {0} arguments; enumeration supports at most {MAX_ENUMERABLE_ARGUMENTS}")]
    TooLarge(usize),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Frameworks used by the worked examples in the documentation and tests.
pub mod examples {
    use super::ArgumentationFramework;

    /// Five arguments where `a` is unattacked, `c` and `d` attack each other,
    /// `e` attacks itself and `d` attacks `e`.
    pub fn figure1() -> ArgumentationFramework {
        ArgumentationFramework::build(
            &["a", "b", "c", "d", "e"],
            &[("a", "b"), ("c", "b"), ("c", "d"), ("d", "c"), ("d", "e"), ("e", "e")],
        )
    }

    /// The framework produced by the fertiliser debate between Alice, Bob and Carol.
    pub fn debate_framework() -> ArgumentationFramework {
        ArgumentationFramework::build(
            &["a", "b", "c", "d", "e", "f", "g"],
            &[
                ("b", "a"),
                ("c", "a"),
                ("d", "a"),
                ("f", "a"),
                ("e", "c"),
                ("e", "d"),
                ("g", "b"),
            ],
        )
    }

    /// The vaccine dialogue framework: a symmetric chain a-b-c-d-e-f.
    pub fn vaccine_framework() -> ArgumentationFramework {
        ArgumentationFramework::build(
            &["a", "b", "c", "d", "e", "f"],
            &[
                ("a", "b"),
                ("b", "a"),
                ("b", "c"),
                ("c", "b"),
                ("c", "d"),
                ("d", "c"),
                ("d", "e"),
                ("e", "d"),
                ("e", "f"),
                ("f", "e"),
            ],
        )
    }
}
