//! The labelled transition system and its interleaving executor.
//!
//! Each top-level step consumes one time unit: exactly one component performs
//! an ω-action while every other timed component lets its clock run (τ).

mod derive;
mod explore;
mod run;

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::af::{AfError, ArgumentationFramework};
use crate::syntax::{Agent, SubstError, Timeout};

pub use derive::{derive, omega_transitions};
pub use explore::{
    explore, observables, stutter_free_runs, Exploration, FullTraces, ObservedTrace, Observables, StutterFreeRuns, TraceFold,
    DEFAULT_NODE_BUDGET,
};
pub use run::{
    run, run_configuration, step, step_with_choice, timeline, Scheduler, SchedulingPolicy, StepOutcome, TimelineRow,
    Trace, TraceStep,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionLabel {
    Tau,
    Omega,
}

impl fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransitionLabel::Tau => "tau",
            TransitionLabel::Omega => "omega",
        })
    }
}

/// Name of a transition rule. Numbered families carry the rule number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Add,
    Rmv,
    Chk(u8),
    CrT(u8),
    ScT(u8),
    NDt(u8),
    Ite(u8),
    GPa(u8),
    Par(u8),
    HVa,
    PrC,
}

impl Rule {
    /// Rules applied at a leaf of the agent tree.
    pub fn is_leaf(self) -> bool {
        matches!(
            self,
            Rule::Add | Rule::Rmv | Rule::Chk(_) | Rule::CrT(_) | Rule::ScT(_) | Rule::PrC
        )
    }

    /// An unsuccessful check or test that only burns a time unit.
    pub fn is_idle_check(self) -> bool {
        matches!(self, Rule::Chk(2) | Rule::CrT(2) | Rule::ScT(2))
    }

    pub fn is_expiry(self) -> bool {
        matches!(self, Rule::Chk(4) | Rule::CrT(4) | Rule::ScT(4))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Add => f.write_str("Add"),
            Rule::Rmv => f.write_str("Rmv"),
            Rule::HVa => f.write_str("HVa"),
            Rule::PrC => f.write_str("PrC"),
            Rule::Chk(n) => write!(f, "Chk({n})"),
            Rule::CrT(n) => write!(f, "CrT({n})"),
            Rule::ScT(n) => write!(f, "ScT({n})"),
            Rule::NDt(n) => write!(f, "NDt({n})"),
            Rule::Ite(n) => write!(f, "ITE({n})"),
            Rule::GPa(n) => write!(f, "GPa({n})"),
            Rule::Par(n) => write!(f, "Par({n})"),
        }
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One rule application inside a step. `path` locates the node in the agent
/// tree: 0 is the left (or only) child, 1 the right child.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Event {
    pub rule: Rule,
    pub label: TransitionLabel,
    #[serde(serialize_with = "serialize_path")]
    pub path: Vec<u8>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
    /// Timeout of the guard before the step, for check and test rules.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timeout: Option<Timeout>,
}

pub fn path_string(path: &[u8]) -> String {
    if path.is_empty() {
        "root".into()
    } else {
        path.iter().map(u8::to_string).collect::<Vec<_>>().join(".")
    }
}

fn serialize_path<S: Serializer>(path: &[u8], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&path_string(path))
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.rule, path_string(&self.path))?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

/// A single derivable transition of a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub label: TransitionLabel,
    pub agent: Agent,
    pub store: ArgumentationFramework,
    pub next_fresh: u64,
    pub events: Vec<Event>,
}

impl Transition {
    /// The leaf rule that performed the ω-action, if any.
    pub fn omega_event(&self) -> Option<&Event> {
        self.events
            .iter()
            .find(|e| e.rule.is_leaf() && e.label == TransitionLabel::Omega)
    }

    /// Whether the step only records an unsuccessful check.
    pub fn is_idle(&self) -> bool {
        self.omega_event().is_some_and(|e| e.rule.is_idle_check())
    }

    /// Timeout of the guard this step satisfies, if it satisfies one.
    pub fn satisfied_deadline(&self) -> Option<Timeout> {
        self.omega_event()
            .filter(|e| matches!(e.rule, Rule::Chk(1) | Rule::CrT(1) | Rule::ScT(1)))
            .and_then(|e| e.timeout)
    }

    pub(crate) fn sort_key(&self) -> (TransitionLabel, Vec<u8>) {
        let primary = self
            .omega_event()
            .or_else(|| self.events.iter().filter(|e| e.rule.is_leaf()).min_by(|a, b| a.path.cmp(&b.path)))
            .map(|e| e.path.clone())
            .unwrap_or_default();
        // ω before τ.
        let label = match self.label {
            TransitionLabel::Omega => TransitionLabel::Tau,
            TransitionLabel::Tau => TransitionLabel::Omega,
        };
        (label, primary)
    }
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Terminal {
    #[serde(rename = "ss")]
    Success,
    #[serde(rename = "ff")]
    Failure,
    #[serde(rename = "bounded")]
    Bounded,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::Success => "ss",
            Terminal::Failure => "ff",
            Terminal::Bounded => "bounded",
        })
    }
}

/// The state of the transition system plus the elapsed time and the counter
/// for hidden-variable names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub agent: Agent,
    pub store: ArgumentationFramework,
    pub clock: u64,
    pub next_fresh: u64,
}

impl Configuration {
    pub fn new(agent: Agent, store: ArgumentationFramework) -> Self {
        Configuration {
            agent: agent.normalize(),
            store,
            clock: 0,
            next_fresh: 0,
        }
    }

    pub fn terminal(&self) -> Option<Terminal> {
        match self.agent {
            Agent::Success => Some(Terminal::Success),
            Agent::Failure => Some(Terminal::Failure),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("call to undeclared procedure {name}/{arity}")]
    UndeclaredProcedure { name: String, arity: usize },
    #[error("procedure instantiation failed: {0}")]
    Substitution(#[from] SubstError),
    #[error("parameter `{name}` is unbound at {}", path_string(.path))]
    UnboundParameter { name: String, path: Vec<u8> },
    #[error("acceptance test failed: {0}")]
    Semantics(#[from] AfError),
    #[error("no transition available for non-terminal agent {agent}")]
    Stuck { agent: String },
    #[error("choice {index} out of range: {available} transitions enabled")]
    InvalidChoice { index: usize, available: usize },
    #[error("{0}")]
    Policy(String),
}

#[cfg(test)]
mod tests;
