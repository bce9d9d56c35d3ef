use std::sync::Arc;
use std::collections::BTreeMap;

use super::ast::{Agent, ArgSet, AttackSet, Clause, Guarded, Term, Timeout};
use super::SubstError;
use crate::af::{ArgumentId, Label, Semantics};

type Mapping = BTreeMap<String, String>;

/// `A[actual/formal]`, capture-avoiding.
pub fn substitute(agent: &Agent, formal: &str, actual: &str) -> Result<Agent, SubstError> {
    let map = Mapping::from([(formal.to_owned(), actual.to_owned())]);
    subst_agent(agent, &map)
}

/// Body of `clause` with the actual parameters substituted simultaneously
/// for its formals.
pub fn instantiate(clause: &Clause, actuals: &[String]) -> Result<Agent, SubstError> {
    if clause.params.len() != actuals.len() {
        return Err(SubstError::Arity {
            name: clause.name.clone(),
            expected: clause.params.len(),
            found: actuals.len(),
        });
    }
    let map: Mapping = clause
        .params
        .iter()
        .cloned()
        .zip(actuals.iter().cloned())
        .collect();
    subst_agent(&clause.body, &map)
}

fn subst_id(a: &ArgumentId, map: &Mapping) -> Result<ArgumentId, SubstError> {
    match map.get(a.as_str()) {
        Some(actual) => ArgumentId::from_token(actual).map_err(|_| SubstError::IllTyped {
            position: "argument",
            actual: actual.clone(),
        }),
        None => Ok(a.clone()),
    }
}

fn subst_sets(args: &ArgSet, attacks: &AttackSet, map: &Mapping) -> Result<(ArgSet, AttackSet), SubstError> {
    let args = args.iter().map(|a| subst_id(a, map)).collect::<Result<_, _>>()?;
    let attacks = attacks
        .iter()
        .map(|(a, b)| Ok((subst_id(a, map)?, subst_id(b, map)?)))
        .collect::<Result<_, SubstError>>()?;
    Ok((args, attacks))
}

fn subst_term<T>(
    term: &Term<T>,
    map: &Mapping,
    position: &'static str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Term<T>, SubstError>
where
    T: Clone,
{
    match term {
        Term::Param(p) => match map.get(p) {
            Some(actual) => parse(actual).map(Term::Value).ok_or_else(|| SubstError::IllTyped {
                position,
                actual: actual.clone(),
            }),
            None => Ok(Term::Param(p.clone())),
        },
        Term::Value(v) => Ok(Term::Value(v.clone())),
    }
}

fn parse_timeout(s: &str) -> Option<Timeout> {
    if s == "inf" {
        Some(Timeout::Infinite)
    } else if s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok().map(Timeout::Finite)
    } else {
        None
    }
}

fn subst_agent(agent: &Agent, map: &Mapping) -> Result<Agent, SubstError> {
    Ok(match agent {
        Agent::Success => Agent::Success,
        Agent::Failure => Agent::Failure,
        Agent::Add {
            arguments,
            attacks,
            then,
        } => {
            let (arguments, attacks) = subst_sets(arguments, attacks, map)?;
            Agent::add(arguments, attacks, subst_agent(then, map)?)
        }
        Agent::Rmv {
            arguments,
            attacks,
            then,
        } => {
            let (arguments, attacks) = subst_sets(arguments, attacks, map)?;
            Agent::rmv(arguments, attacks, subst_agent(then, map)?)
        }
        Agent::Guarded(g) => Agent::Guarded(subst_guarded(g, map)?),
        Agent::Parallel(l, r) => Agent::parallel(subst_agent(l, map)?, subst_agent(r, map)?),
        Agent::Exists { var, body } => {
            let mut inner = map.clone();
            inner.remove(var.as_str());
            if inner.is_empty() {
                return Ok(agent.clone());
            }
            let captured = inner.values().any(|v| v == var.as_str());
            let (var, body) = if captured {
                let mut taken = body.names();
                taken.extend(inner.values().cloned());
                taken.extend(inner.keys().cloned());
                let fresh = (0..)
                    .map(|k| format!("#b{k}"))
                    .find(|n| !taken.contains(n))
                    .expect("unbounded supply of names");
                let renamed = substitute(body, var.as_str(), &fresh)?;
                (ArgumentId::reserved(fresh), renamed)
            } else {
                (var.clone(), (**body).clone())
            };
            Agent::Exists {
                var,
                body: Arc::new(subst_agent(&body, &inner)?),
            }
        }
        Agent::Call { name, args } => Agent::Call {
            name: name.clone(),
            args: args
                .iter()
                .map(|a| map.get(a).cloned().unwrap_or_else(|| a.clone()))
                .collect(),
        },
    })
}

fn subst_guarded(g: &Guarded, map: &Mapping) -> Result<Guarded, SubstError> {
    Ok(match g {
        Guarded::Check {
            timeout,
            arguments,
            attacks,
            then,
        } => {
            let (arguments, attacks) = subst_sets(arguments, attacks, map)?;
            Guarded::Check {
                timeout: subst_term(timeout, map, "timeout", parse_timeout)?,
                arguments,
                attacks,
                then: Arc::new(subst_agent(then, map)?),
            }
        }
        Guarded::Test {
            mode,
            timeout,
            argument,
            label,
            semantics,
            then,
        } => Guarded::Test {
            mode: *mode,
            timeout: subst_term(timeout, map, "timeout", parse_timeout)?,
            argument: subst_id(argument, map)?,
            label: subst_term(label, map, "label", |s| s.parse::<Label>().ok())?,
            semantics: subst_term(semantics, map, "semantics", |s| {
                s.parse::<Semantics>().ok().filter(|s| s.is_test_semantics(false))
            })?,
            then: Arc::new(subst_agent(then, map)?),
        },
        Guarded::Sum(l, r) => Guarded::sum(subst_guarded(l, map)?, subst_guarded(r, map)?),
        Guarded::IfThenElse(l, r) => Guarded::if_then_else(subst_guarded(l, map)?, subst_guarded(r, map)?),
        Guarded::GuardedParallel(l, r) => {
            Guarded::guarded_parallel(subst_guarded(l, map)?, subst_guarded(r, map)?)
        }
    })
}
