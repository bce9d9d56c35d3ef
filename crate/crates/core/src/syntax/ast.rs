use std::sync::Arc;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::af::{AcceptanceMode, ArgumentId, Attack, Label, Semantics};

pub type ArgSet = BTreeSet<ArgumentId>;
pub type AttackSet = BTreeSet<Attack>;

/// Timeout of a guard: a natural number or `+inf`. Serialized as a number
/// or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Timeout {
    Finite(u64),
    Infinite,
}

impl Serialize for Timeout {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Timeout::Finite(t) => s.serialize_u64(*t),
            Timeout::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Timeout {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Finite(u64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Finite(t) => Ok(Timeout::Finite(t)),
            Raw::Word(w) if w == "inf" => Ok(Timeout::Infinite),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("invalid timeout {w:?}"))),
        }
    }
}

impl Timeout {
    pub fn is_zero(self) -> bool {
        self == Timeout::Finite(0)
    }

    /// One time unit less; `inf - 1 = inf`. Must not be called on zero.
    pub fn decrement(self) -> Timeout {
        match self {
            Timeout::Finite(t) => Timeout::Finite(t.checked_sub(1).expect("decrement of expired timeout")),
            Timeout::Infinite => Timeout::Infinite,
        }
    }
}

impl fmt::Display for Timeout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timeout::Finite(t) => write!(f, "{t}"),
            Timeout::Infinite => f.write_str("inf"),
        }
    }
}

/// A slot that holds either a literal value or a formal parameter of the
/// enclosing procedure declaration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term<T> {
    Value(T),
    Param(String),
}

impl<T: Copy> Term<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Term::Value(v) => Some(*v),
            Term::Param(_) => None,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Term<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Value(v) => v.fmt(f),
            Term::Param(p) => f.write_str(p),
        }
    }
}

pub type TimeoutTerm = Term<Timeout>;
pub type LabelTerm = Term<Label>;
pub type SemanticsTerm = Term<Semantics>;

/// A tcla agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Agent {
    Success,
    Failure,
    Add {
        arguments: ArgSet,
        attacks: AttackSet,
        then: Arc<Agent>,
    },
    Rmv {
        arguments: ArgSet,
        attacks: AttackSet,
        then: Arc<Agent>,
    },
    Guarded(Guarded),
    Parallel(Arc<Agent>, Arc<Agent>),
    Exists {
        var: ArgumentId,
        body: Arc<Agent>,
    },
    Call {
        name: String,
        args: Vec<String>,
    },
}

/// An agent preceded by a condition on the store.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Guarded {
    Check {
        timeout: TimeoutTerm,
        arguments: ArgSet,
        attacks: AttackSet,
        then: Arc<Agent>,
    },
    Test {
        mode: AcceptanceMode,
        timeout: TimeoutTerm,
        argument: ArgumentId,
        label: LabelTerm,
        semantics: SemanticsTerm,
        then: Arc<Agent>,
    },
    Sum(Arc<Guarded>, Arc<Guarded>),
    IfThenElse(Arc<Guarded>, Arc<Guarded>),
    GuardedParallel(Arc<Guarded>, Arc<Guarded>),
}

impl Agent {
    pub fn add(arguments: ArgSet, attacks: AttackSet, then: Agent) -> Agent {
        Agent::Add {
            arguments,
            attacks,
            then: Arc::new(then),
        }
    }

    pub fn rmv(arguments: ArgSet, attacks: AttackSet, then: Agent) -> Agent {
        Agent::Rmv {
            arguments,
            attacks,
            then: Arc::new(then),
        }
    }

    pub fn parallel(left: Agent, right: Agent) -> Agent {
        Agent::Parallel(Arc::new(left), Arc::new(right))
    }

    pub fn call(name: impl Into<String>, args: Vec<String>) -> Agent {
        Agent::Call {
            name: name.into(),
            args,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Agent::Success | Agent::Failure)
    }

    pub fn is_guarded(&self) -> bool {
        matches!(self, Agent::Guarded(_))
    }

    pub fn as_guarded(&self) -> Option<&Guarded> {
        match self {
            Agent::Guarded(g) => Some(g),
            _ => None,
        }
    }

    /// Left-associated parallel composition of `agents`; `success` when empty.
    pub fn parallel_all(agents: impl IntoIterator<Item = Agent>) -> Agent {
        agents
            .into_iter()
            .reduce(Agent::parallel)
            .unwrap_or(Agent::Success)
    }

    /// Rewrites `A || success` to `A` and `A || failure` to `failure`
    /// throughout the tree.
    pub fn normalize(self) -> Agent {
        match self {
            Agent::Parallel(l, r) => match (Arc::unwrap_or_clone(l).normalize(), Arc::unwrap_or_clone(r).normalize()) {
                (Agent::Failure, _) | (_, Agent::Failure) => Agent::Failure,
                (Agent::Success, other) | (other, Agent::Success) => other,
                (l, r) => Agent::parallel(l, r),
            },
            Agent::Add {
                arguments,
                attacks,
                then,
            } => Agent::add(arguments, attacks, Arc::unwrap_or_clone(then).normalize()),
            Agent::Rmv {
                arguments,
                attacks,
                then,
            } => Agent::rmv(arguments, attacks, Arc::unwrap_or_clone(then).normalize()),
            Agent::Guarded(g) => Agent::Guarded(g.normalize()),
            Agent::Exists { var, body } => Agent::Exists {
                var,
                body: Arc::new(Arc::unwrap_or_clone(body).normalize()),
            },
            other => other,
        }
    }

    /// As [`Agent::normalize`], but only along the top-level `||` spine.
    pub(crate) fn normalize_spine(self) -> Agent {
        match self {
            Agent::Parallel(l, r) => match (
                Arc::unwrap_or_clone(l).normalize_spine(),
                Arc::unwrap_or_clone(r).normalize_spine(),
            ) {
                (Agent::Failure, _) | (_, Agent::Failure) => Agent::Failure,
                (Agent::Success, other) | (other, Agent::Success) => other,
                (l, r) => Agent::parallel(l, r),
            },
            other => other,
        }
    }

    /// Every argument-like name occurring in the agent, including binders and
    /// call parameters.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    pub(crate) fn collect_names(&self, out: &mut BTreeSet<String>) {
        let sets = |args: &ArgSet, attacks: &AttackSet, out: &mut BTreeSet<String>| {
            out.extend(args.iter().map(|a| a.as_str().to_owned()));
            for (a, b) in attacks {
                out.insert(a.as_str().to_owned());
                out.insert(b.as_str().to_owned());
            }
        };
        match self {
            Agent::Success | Agent::Failure => {}
            Agent::Add {
                arguments,
                attacks,
                then,
            }
            | Agent::Rmv {
                arguments,
                attacks,
                then,
            } => {
                sets(arguments, attacks, out);
                then.collect_names(out);
            }
            Agent::Guarded(g) => g.collect_names(out),
            Agent::Parallel(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Agent::Exists { var, body } => {
                out.insert(var.as_str().to_owned());
                body.collect_names(out);
            }
            Agent::Call { args, .. } => out.extend(args.iter().cloned()),
        }
    }

    /// Visits every procedure call in the tree.
    pub fn for_each_call(&self, f: &mut impl FnMut(&str, &[String])) {
        match self {
            Agent::Success | Agent::Failure => {}
            Agent::Add { then, .. } | Agent::Rmv { then, .. } => then.for_each_call(f),
            Agent::Guarded(g) => g.for_each_call(f),
            Agent::Parallel(l, r) => {
                l.for_each_call(f);
                r.for_each_call(f);
            }
            Agent::Exists { body, .. } => body.for_each_call(f),
            Agent::Call { name, args } => f(name, args),
        }
    }
}

impl Guarded {
    pub fn check(timeout: Timeout, arguments: ArgSet, attacks: AttackSet, then: Agent) -> Guarded {
        Guarded::Check {
            timeout: Term::Value(timeout),
            arguments,
            attacks,
            then: Arc::new(then),
        }
    }

    pub fn sum(left: Guarded, right: Guarded) -> Guarded {
        Guarded::Sum(Arc::new(left), Arc::new(right))
    }

    pub fn if_then_else(left: Guarded, right: Guarded) -> Guarded {
        Guarded::IfThenElse(Arc::new(left), Arc::new(right))
    }

    pub fn guarded_parallel(left: Guarded, right: Guarded) -> Guarded {
        Guarded::GuardedParallel(Arc::new(left), Arc::new(right))
    }

    /// Membership in E0: every outermost guard, reached through `+`, `+P`
    /// and `||G` without crossing another guard, has timeout 0.
    pub fn is_expired(&self) -> bool {
        match self {
            Guarded::Check { timeout, .. } | Guarded::Test { timeout, .. } => {
                timeout.value().is_some_and(Timeout::is_zero)
            }
            Guarded::Sum(l, r) | Guarded::IfThenElse(l, r) | Guarded::GuardedParallel(l, r) => {
                l.is_expired() && r.is_expired()
            }
        }
    }

    fn normalize(self) -> Guarded {
        match self {
            Guarded::Check {
                timeout,
                arguments,
                attacks,
                then,
            } => Guarded::Check {
                timeout,
                arguments,
                attacks,
                then: Arc::new(Arc::unwrap_or_clone(then).normalize()),
            },
            Guarded::Test {
                mode,
                timeout,
                argument,
                label,
                semantics,
                then,
            } => Guarded::Test {
                mode,
                timeout,
                argument,
                label,
                semantics,
                then: Arc::new(Arc::unwrap_or_clone(then).normalize()),
            },
            Guarded::Sum(l, r) => Guarded::sum(Arc::unwrap_or_clone(l).normalize(), Arc::unwrap_or_clone(r).normalize()),
            Guarded::IfThenElse(l, r) => Guarded::if_then_else(Arc::unwrap_or_clone(l).normalize(), Arc::unwrap_or_clone(r).normalize()),
            Guarded::GuardedParallel(l, r) => Guarded::guarded_parallel(Arc::unwrap_or_clone(l).normalize(), Arc::unwrap_or_clone(r).normalize()),
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Guarded::Check {
                arguments,
                attacks,
                then,
                ..
            } => {
                out.extend(arguments.iter().map(|a| a.as_str().to_owned()));
                for (a, b) in attacks {
                    out.insert(a.as_str().to_owned());
                    out.insert(b.as_str().to_owned());
                }
                then.collect_names(out);
            }
            Guarded::Test { argument, then, .. } => {
                out.insert(argument.as_str().to_owned());
                then.collect_names(out);
            }
            Guarded::Sum(l, r) | Guarded::IfThenElse(l, r) | Guarded::GuardedParallel(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
        }
    }

    fn for_each_call(&self, f: &mut impl FnMut(&str, &[String])) {
        match self {
            Guarded::Check { then, .. } | Guarded::Test { then, .. } => then.for_each_call(f),
            Guarded::Sum(l, r) | Guarded::IfThenElse(l, r) | Guarded::GuardedParallel(l, r) => {
                l.for_each_call(f);
                r.for_each_call(f);
            }
        }
    }
}

impl From<Guarded> for Agent {
    fn from(g: Guarded) -> Agent {
        Agent::Guarded(g)
    }
}

/// `p(x1, ..., xn) :: A`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    pub name: String,
    pub params: Vec<String>,
    pub body: Agent,
}

/// `let C in A`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Program {
    pub declarations: Vec<Clause>,
    pub main: Agent,
}

impl Program {
    pub fn new(main: Agent) -> Program {
        Program {
            declarations: Vec::new(),
            main,
        }
    }

    pub fn clause(&self, name: &str, arity: usize) -> Option<&Clause> {
        self.declarations
            .iter()
            .find(|c| c.name == name && c.params.len() == arity)
    }
}
