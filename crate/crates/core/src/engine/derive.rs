use std::collections::HashSet;
use std::fmt::Write as _;

use super::{Event, ExecError, Rule, Transition, TransitionLabel};
use crate::af::{accepted, AcceptanceMode, AfError, ArgumentId, ArgumentationFramework, Label, Semantics};
use crate::syntax::{
    instantiate, substitute, write_arg_set, write_attack_set, Agent, ArgSet, AttackSet, Guarded, Program, Term, Timeout,
};

/// Every transition of `agent` in `store`, with both labels, sorted by the
/// tree position of the rule that fired and free of duplicates.
///
/// `next_fresh` numbers the hidden variables introduced by `exists`.
pub fn derive(
    agent: &Agent,
    store: &ArgumentationFramework,
    next_fresh: u64,
    program: &Program,
) -> Result<Vec<Transition>, ExecError> {
    derive_with(agent, store, next_fresh, program, true)
}

fn derive_with(
    agent: &Agent,
    store: &ArgumentationFramework,
    next_fresh: u64,
    program: &Program,
    record: bool,
) -> Result<Vec<Transition>, ExecError> {
    let mut path = Vec::new();
    if !record {
        let agent = agent.clone().normalize_spine();
        let mut out = Deriver { program, record }.agent(&agent, store, next_fresh, &mut path)?;
        for t in &mut out {
            t.agent = std::mem::replace(&mut t.agent, Agent::Success).normalize_spine();
        }
        return Ok(out);
    }
    let agent = agent.clone().normalize();
    let raw = Deriver { program, record }.agent(&agent, store, next_fresh, &mut path)?;
    let mut out: Vec<Transition> = raw
        .into_iter()
        .map(|mut t| {
            t.agent = std::mem::replace(&mut t.agent, Agent::Success).normalize();
            t.events.sort_by(|a, b| a.path.cmp(&b.path));
            t
        })
        .collect();
    out.sort_by_cached_key(Transition::sort_key);
    let mut seen = HashSet::new();
    out.retain(|t| seen.insert((t.label, t.agent.clone(), t.store.clone(), t.next_fresh)));
    Ok(out)
}

/// Only the ω-labelled transitions: the moves available to a scheduler.
pub fn omega_transitions(
    agent: &Agent,
    store: &ArgumentationFramework,
    next_fresh: u64,
    program: &Program,
) -> Result<Vec<Transition>, ExecError> {
    let mut all = derive(agent, store, next_fresh, program)?;
    all.retain(|t| t.label == TransitionLabel::Omega);
    Ok(all)
}

/// As [`omega_transitions`] without event records; for state-space search.
pub(crate) fn omega_successors(
    agent: &Agent,
    store: &ArgumentationFramework,
    next_fresh: u64,
    program: &Program,
) -> Result<Vec<Transition>, ExecError> {
    let mut all = derive_with(agent, store, next_fresh, program, false)?;
    all.retain(|t| t.label == TransitionLabel::Omega);
    Ok(all)
}

struct Deriver<'p> {
    program: &'p Program,
    /// Whether transitions carry their event log.
    record: bool,
}

/// Event data of a leaf rule; `detail` is only rendered when recording.
struct LeafInfo<'a, D: FnOnce() -> String> {
    rule: Rule,
    label: TransitionLabel,
    path: &'a [u8],
    detail: D,
    timeout: Option<Timeout>,
}

impl Deriver<'_> {
    fn leaf<D: FnOnce() -> String>(
        &self,
        info: LeafInfo<'_, D>,
        agent: Agent,
        store: ArgumentationFramework,
        next_fresh: u64,
    ) -> Transition {
        let events = if self.record {
            vec![Event {
                rule: info.rule,
                label: info.label,
                path: info.path.to_vec(),
                detail: (info.detail)(),
                timeout: info.timeout,
            }]
        } else {
            Vec::new()
        };
        Transition {
            label: info.label,
            agent,
            store,
            next_fresh,
            events,
        }
    }

    fn with_event(&self, mut t: Transition, rule: Rule, path: &[u8]) -> Transition {
        if self.record {
            t.events.push(Event {
                rule,
                label: t.label,
                path: path.to_vec(),
                detail: String::new(),
                timeout: None,
            });
        }
        t
    }
}

fn sets_detail(op: &str, prefix: &str, args: &ArgSet, attacks: &AttackSet) -> String {
    let mut s = format!("{op}({prefix}");
    let _ = write_arg_set(&mut s, args);
    s.push(',');
    let _ = write_attack_set(&mut s, attacks);
    s.push(')');
    s
}

fn timeout_of(term: &Term<Timeout>, path: &[u8]) -> Result<Timeout, ExecError> {
    match term {
        Term::Value(t) => Ok(*t),
        Term::Param(p) => Err(ExecError::UnboundParameter {
            name: p.clone(),
            path: path.to_vec(),
        }),
    }
}

fn value_of<T: Copy>(term: &Term<T>, path: &[u8]) -> Result<T, ExecError> {
    match term {
        Term::Value(v) => Ok(*v),
        Term::Param(p) => Err(ExecError::UnboundParameter {
            name: p.clone(),
            path: path.to_vec(),
        }),
    }
}

fn contains_all(store: &ArgumentationFramework, args: &ArgSet, attacks: &AttackSet) -> bool {
    args.iter().all(|a| store.contains(a)) && attacks.iter().all(|r| store.contains_attack(r))
}

/// Acceptance test used by ctest/stest. An argument missing from the store
/// satisfies no test.
fn test_holds(
    store: &ArgumentationFramework,
    a: &ArgumentId,
    label: Label,
    semantics: Semantics,
    mode: AcceptanceMode,
) -> Result<bool, AfError> {
    if !store.contains(a) {
        return Ok(false);
    }
    accepted(store, a, label, semantics, mode)
}

impl Deriver<'_> {
    fn agent(
        &self,
        agent: &Agent,
        store: &ArgumentationFramework,
        fresh: u64,
        path: &mut Vec<u8>,
    ) -> Result<Vec<Transition>, ExecError> {
        use TransitionLabel::*;
        Ok(match agent {
            Agent::Success | Agent::Failure => Vec::new(),
            Agent::Add {
                arguments,
                attacks,
                then,
            } => {
                let mut next = store.clone();
                for a in arguments {
                    next.add_argument(a.clone());
                }
                for (a, b) in attacks {
                    // Attacks whose endpoints are still absent are dropped.
                    let _ = next.add_attack(a.clone(), b.clone());
                }
                let info = LeafInfo {
                    rule: Rule::Add,
                    label: Omega,
                    path,
                    detail: || sets_detail("add", "", arguments, attacks),
                    timeout: None,
                };
                vec![self.leaf(info, (**then).clone(), next, fresh)]
            }
            Agent::Rmv {
                arguments,
                attacks,
                then,
            } => {
                let mut next = store.clone();
                for a in arguments {
                    next.remove_argument(a);
                }
                for r in attacks {
                    next.remove_attack(r);
                }
                let info = LeafInfo {
                    rule: Rule::Rmv,
                    label: Omega,
                    path,
                    detail: || sets_detail("rmv", "", arguments, attacks),
                    timeout: None,
                };
                vec![self.leaf(info, (**then).clone(), next, fresh)]
            }
            Agent::Guarded(g) => self.guarded(g, store, fresh, path)?,
            Agent::Parallel(l, r) => self.parallel(l, r, store, fresh, path)?,
            Agent::Exists { var, body } => {
                let y = format!("#v{fresh}");
                let body = substitute(body, var.as_str(), &y)?;
                let detail = format!("{var} := {y}");
                let inner = self.agent(&body, store, fresh + 1, path)?;
                inner
                    .into_iter()
                    .map(|t| {
                        let mut t = self.with_event(t, Rule::HVa, path);
                        if let Some(e) = t.events.last_mut() {
                            e.detail = detail.clone();
                        }
                        t
                    })
                    .collect()
            }
            Agent::Call { name, args } => {
                let clause = self
                    .program
                    .clause(name, args.len())
                    .ok_or_else(|| ExecError::UndeclaredProcedure {
                        name: name.clone(),
                        arity: args.len(),
                    })?;
                let body = instantiate(clause, args)?;
                let info = LeafInfo {
                    rule: Rule::PrC,
                    label: Omega,
                    path,
                    detail: || format!("{name}({})", args.join(",")),
                    timeout: None,
                };
                vec![self.leaf(info, body, store.clone(), fresh)]
            }
        })
    }

    fn parallel(
        &self,
        left: &Agent,
        right: &Agent,
        store: &ArgumentationFramework,
        fresh: u64,
        path: &mut Vec<u8>,
    ) -> Result<Vec<Transition>, ExecError> {
        let sub = |d: &Self, a: &Agent, fresh: u64, side: u8, path: &mut Vec<u8>| {
            path.push(side);
            let r = d.agent(a, store, fresh, path);
            path.pop();
            r
        };
        let taus = |ts: Vec<Transition>| -> Vec<Transition> {
            ts.into_iter().filter(|t| t.label == TransitionLabel::Tau).collect()
        };
        let tl = sub(self, left, fresh, 0, path)?;
        let tr = sub(self, right, fresh, 1, path)?;
        let left_taus = taus(tl.clone());
        let right_taus = taus(tr.clone());
        let mut out = Vec::new();

        for x in &tl {
            if right_taus.is_empty() {
                let t = Transition {
                    agent: Agent::parallel(x.agent.clone(), right.clone()),
                    ..x.clone()
                };
                out.push(self.with_event(t, Rule::Par(2), path));
                continue;
            }
            let partners = if x.next_fresh == fresh {
                right_taus.clone()
            } else {
                taus(sub(self, right, x.next_fresh, 1, path)?)
            };
            for y in partners {
                let mut events = x.events.clone();
                events.extend(y.events);
                let t = Transition {
                    label: x.label,
                    agent: Agent::parallel(x.agent.clone(), y.agent),
                    store: x.store.clone(),
                    next_fresh: y.next_fresh,
                    events,
                };
                out.push(self.with_event(t, Rule::Par(1), path));
            }
        }
        for y in &tr {
            if left_taus.is_empty() {
                let t = Transition {
                    agent: Agent::parallel(left.clone(), y.agent.clone()),
                    ..y.clone()
                };
                out.push(self.with_event(t, Rule::Par(2), path));
                continue;
            }
            if y.label == TransitionLabel::Tau {
                // Both sides idle: already produced by the loop above.
                continue;
            }
            let partners = if y.next_fresh == fresh {
                left_taus.clone()
            } else {
                taus(sub(self, left, y.next_fresh, 0, path)?)
            };
            for x in partners {
                let mut events = x.events;
                events.extend(y.events.iter().cloned());
                let t = Transition {
                    label: y.label,
                    agent: Agent::parallel(x.agent, y.agent.clone()),
                    store: y.store.clone(),
                    next_fresh: x.next_fresh,
                    events,
                };
                out.push(self.with_event(t, Rule::Par(1), path));
            }
        }
        Ok(out)
    }

    fn guarded(
        &self,
        g: &Guarded,
        store: &ArgumentationFramework,
        fresh: u64,
        path: &mut Vec<u8>,
    ) -> Result<Vec<Transition>, ExecError> {
        use TransitionLabel::*;
        match g {
            Guarded::Check {
                timeout,
                arguments,
                attacks,
                then,
            } => {
                let t = timeout_of(timeout, path)?;
                let info = |rule, label| LeafInfo {
                    rule,
                    label,
                    path,
                    detail: move || sets_detail("check", &format!("{t},"), arguments, attacks),
                    timeout: Some(t),
                };
                if t.is_zero() {
                    return Ok(vec![self.leaf(info(Rule::Chk(4), Omega), Agent::Failure, store.clone(), fresh)]);
                }
                let waiting = Agent::Guarded(Guarded::Check {
                    timeout: Term::Value(t.decrement()),
                    arguments: arguments.clone(),
                    attacks: attacks.clone(),
                    then: then.clone(),
                });
                let omega = if contains_all(store, arguments, attacks) {
                    self.leaf(info(Rule::Chk(1), Omega), (**then).clone(), store.clone(), fresh)
                } else {
                    self.leaf(info(Rule::Chk(2), Omega), waiting.clone(), store.clone(), fresh)
                };
                let tau = self.leaf(info(Rule::Chk(3), Tau), waiting, store.clone(), fresh);
                Ok(vec![omega, tau])
            }
            Guarded::Test {
                mode,
                timeout,
                argument,
                label,
                semantics,
                then,
            } => {
                let t = timeout_of(timeout, path)?;
                let l = value_of(label, path)?;
                let s = value_of(semantics, path)?;
                let rule = |n| match mode {
                    AcceptanceMode::Credulous => Rule::CrT(n),
                    AcceptanceMode::Sceptical => Rule::ScT(n),
                };
                let kw = match mode {
                    AcceptanceMode::Credulous => "ctest",
                    AcceptanceMode::Sceptical => "stest",
                };
                let info = |rule, label| LeafInfo {
                    rule,
                    label,
                    path,
                    detail: move || {
                        let mut detail = String::new();
                        let _ = write!(detail, "{kw}({t},{{{argument}}},{l},{s})");
                        detail
                    },
                    timeout: Some(t),
                };
                if t.is_zero() {
                    return Ok(vec![self.leaf(info(rule(4), Omega), Agent::Failure, store.clone(), fresh)]);
                }
                let waiting = Agent::Guarded(Guarded::Test {
                    mode: *mode,
                    timeout: Term::Value(t.decrement()),
                    argument: argument.clone(),
                    label: label.clone(),
                    semantics: semantics.clone(),
                    then: then.clone(),
                });
                let omega = if test_holds(store, argument, l, s, *mode)? {
                    self.leaf(info(rule(1), Omega), (**then).clone(), store.clone(), fresh)
                } else {
                    self.leaf(info(rule(2), Omega), waiting.clone(), store.clone(), fresh)
                };
                let tau = self.leaf(info(rule(3), Tau), waiting, store.clone(), fresh);
                Ok(vec![omega, tau])
            }
            Guarded::Sum(l, r) => self.binary(BinaryKind::Sum, l, r, store, fresh, path),
            Guarded::GuardedParallel(l, r) => self.binary(BinaryKind::GuardedParallel, l, r, store, fresh, path),
            Guarded::IfThenElse(l, r) => {
                let (t1, t2) = self.children(l, r, store, fresh, path)?;
                if l.is_expired() {
                    return Ok(t2.into_iter().map(|t| self.with_event(t, Rule::Ite(3), path)).collect());
                }
                let mut out = Vec::new();
                for t in t1 {
                    match t.agent {
                        Agent::Guarded(ref e1) => {
                            let agent = Agent::Guarded(Guarded::if_then_else(e1.clone(), (**r).clone()));
                            out.push(self.with_event(Transition { agent, ..t }, Rule::Ite(2), path));
                        }
                        _ if t.label == Omega => out.push(self.with_event(t, Rule::Ite(1), path)),
                        _ => {}
                    }
                }
                Ok(out)
            }
        }
    }

    fn children(
        &self,
        l: &Guarded,
        r: &Guarded,
        store: &ArgumentationFramework,
        fresh: u64,
        path: &mut Vec<u8>,
    ) -> Result<(Vec<Transition>, Vec<Transition>), ExecError> {
        path.push(0);
        let t1 = self.guarded(l, store, fresh, path);
        path.pop();
        path.push(1);
        let t2 = self.guarded(r, store, fresh, path);
        path.pop();
        Ok((t1?, t2?))
    }

    fn binary(
        &self,
        kind: BinaryKind,
        l: &Guarded,
        r: &Guarded,
        store: &ArgumentationFramework,
        fresh: u64,
        path: &mut Vec<u8>,
    ) -> Result<Vec<Transition>, ExecError> {
        use TransitionLabel::*;
        let (t1, t2) = self.children(l, r, store, fresh, path)?;
        let (commit, persist, drop) = match kind {
            BinaryKind::Sum => (Rule::NDt(1), Rule::NDt(3), Rule::NDt(2)),
            BinaryKind::GuardedParallel => (Rule::GPa(1), Rule::GPa(2), Rule::GPa(3)),
        };
        let mut out = Vec::new();
        let (e1, e2) = (l.is_expired(), r.is_expired());
        if e1 {
            out.extend(t2.iter().cloned().map(|t| self.with_event(t, drop, path)));
        }
        if e2 {
            out.extend(t1.iter().cloned().map(|t| self.with_event(t, drop, path)));
        }
        if e1 || e2 {
            return Ok(out);
        }
        let tau = |ts: &[Transition]| -> Vec<Transition> {
            ts.iter().filter(|t| t.label == Tau).cloned().collect()
        };
        let (tau1, tau2) = (tau(&t1), tau(&t2));
        let rebuild = |a: &Guarded, b: &Guarded| match kind {
            BinaryKind::Sum => Guarded::sum(a.clone(), b.clone()),
            BinaryKind::GuardedParallel => Guarded::guarded_parallel(a.clone(), b.clone()),
        };
        // `mover_left` tells which side performs ξ; the other side does τ.
        for (movers, idlers, mover_left) in [(&t1, &tau2, true), (&t2, &tau1, false)] {
            for m in movers.iter() {
                match &m.agent {
                    Agent::Guarded(gm) => {
                        for i in idlers.iter() {
                            let Agent::Guarded(gi) = &i.agent else { continue };
                            let agent = if mover_left { rebuild(gm, gi) } else { rebuild(gi, gm) };
                            let mut events = m.events.clone();
                            events.extend(i.events.iter().cloned());
                            let t = Transition {
                                label: m.label,
                                agent: Agent::Guarded(agent),
                                store: m.store.clone(),
                                next_fresh: m.next_fresh,
                                events,
                            };
                            out.push(self.with_event(t, persist, path));
                        }
                    }
                    _ if m.label == Omega => match kind {
                        BinaryKind::Sum => out.push(self.with_event(m.clone(), commit, path)),
                        BinaryKind::GuardedParallel => {
                            for i in idlers.iter() {
                                let agent = if mover_left {
                                    Agent::parallel(m.agent.clone(), i.agent.clone())
                                } else {
                                    Agent::parallel(i.agent.clone(), m.agent.clone())
                                };
                                let mut events = m.events.clone();
                                events.extend(i.events.iter().cloned());
                                let t = Transition {
                                    label: Omega,
                                    agent,
                                    store: m.store.clone(),
                                    next_fresh: m.next_fresh,
                                    events,
                                };
                                out.push(self.with_event(t, commit, path));
                            }
                        }
                    },
                    _ => {}
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy)]
enum BinaryKind {
    Sum,
    GuardedParallel,
}
