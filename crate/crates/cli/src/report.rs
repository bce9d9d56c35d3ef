//! Serializable results shared by the command line and the HTTP service.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use tcla_core::af::io::to_dot;
use tcla_core::af::{extensions, labelling_of, AfError, ArgumentationFramework, Extension, Labelling, Semantics};
use tcla_core::protocols::{
    check_theorem1, check_theorem2, translate_debate, translate_game, validate_debate, Debate, DebateViolation,
    DialogueGame, ProtocolError, RuleViolation, Theorem1Verdict, Theorem2Verdict,
};
use tcla_core::syntax::pretty_print;

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub semantics: Semantics,
    pub extensions: Vec<Extension>,
    pub labellings: Vec<Labelling>,
    /// Graph coloured by the first labelling, if there is one.
    pub dot: String,
}

pub fn analyze(af: &ArgumentationFramework, semantics: Semantics) -> Result<Analysis, AfError> {
    let extensions: Vec<Extension> = extensions(af, semantics)?.into_iter().collect();
    let labellings = extensions
        .iter()
        .map(|e| labelling_of(af, e))
        .collect::<Result<Vec<_>, _>>()?;
    let dot = to_dot(af, labellings.first());
    Ok(Analysis {
        semantics,
        extensions,
        labellings,
        dot,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Debate,
    Game,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "theorem")]
pub enum Verdict {
    #[serde(rename = "1")]
    Debate(Theorem1Verdict),
    #[serde(rename = "2")]
    Game(Theorem2Verdict),
}

impl Verdict {
    pub fn status(&self) -> tcla_core::protocols::VerdictStatus {
        match self {
            Verdict::Debate(v) => v.status,
            Verdict::Game(v) => v.status,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Translation {
    pub program: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

/// A protocol input that breaks the protocol's own rules.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    /// Debate condition or game rule number, when one applies.
    pub rule: Option<u8>,
    pub message: String,
}

impl From<&DebateViolation> for Violation {
    fn from(v: &DebateViolation) -> Self {
        Violation {
            rule: Some(v.condition()).filter(|&c| c > 0),
            message: v.to_string(),
        }
    }
}

impl From<&RuleViolation> for Violation {
    fn from(v: &RuleViolation) -> Self {
        Violation {
            rule: v.rule(),
            message: v.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("input is not a valid {kind:?} description: {message}")]
    Input { kind: ProtocolKind, message: String },
    #[error("{}", .0.iter().map(|v| v.message.clone()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Protocol(ProtocolError),
}

impl From<ProtocolError> for TranslateError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::InvalidDebate(vs) => TranslateError::Invalid(vs.iter().map(Violation::from).collect()),
            ProtocolError::IllegalMove { index, violation } => TranslateError::Invalid(vec![Violation {
                rule: violation.rule(),
                message: format!("move {index}: {violation}"),
            }]),
            other => TranslateError::Protocol(other),
        }
    }
}

/// Translates a debate or game given as JSON, optionally checking the
/// translation against the protocol.
pub fn translate(
    kind: ProtocolKind,
    input: serde_json::Value,
    check: Option<(usize, usize)>,
) -> Result<Translation, TranslateError> {
    let bad = |e: serde_json::Error| TranslateError::Input {
        kind,
        message: e.to_string(),
    };
    match kind {
        ProtocolKind::Debate => {
            let debate: Debate = serde_json::from_value(input).map_err(bad)?;
            let violations = validate_debate(&debate);
            if !violations.is_empty() {
                return Err(TranslateError::Invalid(violations.iter().map(Violation::from).collect()));
            }
            let program = translate_debate(&debate)?;
            let verdict = check
                .map(|(bound, budget)| check_theorem1(&debate, bound, budget).map(Verdict::Debate))
                .transpose()?;
            Ok(Translation {
                program: pretty_print(&program),
                verdict,
            })
        }
        ProtocolKind::Game => {
            let game: DialogueGame = serde_json::from_value(input).map_err(bad)?;
            let game = game.validated()?;
            let program = translate_game(&game)?;
            let verdict = check
                .map(|(bound, budget)| check_theorem2(&game, bound, budget).map(Verdict::Game))
                .transpose()?;
            Ok(Translation {
                program: pretty_print(&program),
                verdict,
            })
        }
    }
}
