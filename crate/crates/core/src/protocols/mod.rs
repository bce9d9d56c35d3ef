//! Multi-agent debates and two-player dialogue games, their translation into
//! tcla programs, and checkers comparing the translated programs' observables
//! against the protocol definitions.

mod debate;
mod game;
pub mod generate;

use serde::Serialize;
use thiserror::Error;

use crate::af::{AfError, ArgumentId};
use crate::engine::ExecError;

pub use debate::{
    check_theorem1, check_theorem1_for_program, debate_traces, ordered_sequences, rd_all, rd_consecutive,
    trace_frameworks, translate_debate, validate_debate, wait_clause_name, Debate, DebateTrace, DebateViolation,
    ReadingComparison, Theorem1Verdict,
};
pub use game::{
    check_theorem2, check_theorem2_for_program, translate_game, translate_game_with, DialogueGame, GameRun,
    GameStatus, Move, Player, RuleViolation, Theorem2Verdict, Tokens, HOLD_TIMEOUT,
};

/// Outcome of comparing a translated program against its protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Holds,
    Mismatch,
    /// Exploration finished but no run terminated with success.
    NoSuccessfulRun,
    /// The node budget ran out before exploration finished.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("invalid debate: {}", join(.0))]
    InvalidDebate(Vec<DebateViolation>),
    #[error("move {index}: {violation}")]
    IllegalMove { index: usize, violation: RuleViolation },
    #[error("framework already uses the reserved token name {0}")]
    TokenCollision(ArgumentId),
    #[error(transparent)]
    Framework(#[from] AfError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

fn join(items: &[DebateViolation]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
