use std::fmt::{self, Write};

use super::ast::{Agent, ArgSet, AttackSet, Clause, Guarded, Program};
use crate::af::AcceptanceMode;

/// Canonical concrete syntax for a program; parses back to the same tree.
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    if !program.declarations.is_empty() {
        out.push_str("let\n");
        for c in &program.declarations {
            let _ = writeln!(out, "  {c}");
        }
        out.push_str("in\n");
    }
    let _ = writeln!(out, "{};", program.main);
    out
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "def {}({}) := {};", self.name, self.params.join(", "), self.body)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_print(self))
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_agent(f, self, true)
    }
}

impl fmt::Display for Guarded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_guarded(f, self)
    }
}

pub(crate) fn write_arg_set(f: &mut impl Write, set: &ArgSet) -> fmt::Result {
    f.write_char('{')?;
    for (i, a) in set.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{a}")?;
    }
    f.write_char('}')
}

pub(crate) fn write_attack_set(f: &mut impl Write, set: &AttackSet) -> fmt::Result {
    f.write_char('{')?;
    for (i, (a, b)) in set.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "({a},{b})")?;
    }
    f.write_char('}')
}

/// `top` is true where an unparenthesised `||` parses as intended.
fn write_agent(f: &mut fmt::Formatter<'_>, agent: &Agent, top: bool) -> fmt::Result {
    match agent {
        Agent::Success => f.write_str("success"),
        Agent::Failure => f.write_str("failure"),
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
            f.write_str(if matches!(agent, Agent::Add { .. }) { "add(" } else { "rmv(" })?;
            write_arg_set(f, arguments)?;
            f.write_char(',')?;
            write_attack_set(f, attacks)?;
            f.write_str(") -> ")?;
            write_agent(f, then, false)
        }
        Agent::Guarded(g) => write_guarded(f, g),
        Agent::Parallel(l, r) => {
            if !top {
                f.write_char('(')?;
            }
            write_agent(f, l, true)?;
            f.write_str(" || ")?;
            write_agent(f, r, false)?;
            if !top {
                f.write_char(')')?;
            }
            Ok(())
        }
        Agent::Exists { var, body } => {
            write!(f, "exists {var} . ")?;
            write_agent(f, body, false)
        }
        Agent::Call { name, args } => write!(f, "{name}({})", args.join(",")),
    }
}

fn left_spine<'a>(g: &'a Guarded, same: fn(&Guarded) -> Option<(&Guarded, &Guarded)>) -> Vec<&'a Guarded> {
    match same(g) {
        Some((l, r)) => {
            let mut items = left_spine(l, same);
            items.push(r);
            items
        }
        None => vec![g],
    }
}

fn write_guarded(f: &mut fmt::Formatter<'_>, g: &Guarded) -> fmt::Result {
    match g {
        Guarded::Check {
            timeout,
            arguments,
            attacks,
            then,
        } => {
            write!(f, "check({timeout},")?;
            write_arg_set(f, arguments)?;
            f.write_char(',')?;
            write_attack_set(f, attacks)?;
            f.write_str(") -> ")?;
            write_agent(f, then, false)
        }
        Guarded::Test {
            mode,
            timeout,
            argument,
            label,
            semantics,
            then,
        } => {
            let kw = match mode {
                AcceptanceMode::Credulous => "ctest",
                AcceptanceMode::Sceptical => "stest",
            };
            write!(f, "{kw}({timeout},{{{argument}}},{label},{semantics}) -> ")?;
            write_agent(f, then, false)
        }
        Guarded::Sum(..) | Guarded::GuardedParallel(..) => {
            let (kw, items) = if matches!(g, Guarded::Sum(..)) {
                let items = left_spine(g, |g| match g {
                    Guarded::Sum(l, r) => Some((l, r)),
                    _ => None,
                });
                ("sum", items)
            } else {
                let items = left_spine(g, |g| match g {
                    Guarded::GuardedParallel(l, r) => Some((l, r)),
                    _ => None,
                });
                ("gpar", items)
            };
            write!(f, "{kw}(")?;
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_guarded(f, item)?;
            }
            f.write_char(')')
        }
        Guarded::IfThenElse(..) => {
            let items = left_spine(g, |g| match g {
                Guarded::IfThenElse(l, r) => Some((l, r)),
                _ => None,
            });
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str("+P")?;
                }
                f.write_char('(')?;
                write_guarded(f, item)?;
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}
