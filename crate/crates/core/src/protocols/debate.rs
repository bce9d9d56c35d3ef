use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ProtocolError, VerdictStatus};
use crate::af::{AfError, ArgumentId, ArgumentationFramework, Attack};
use crate::engine::stutter_free_runs;
use crate::syntax::{Agent, ArgSet, AttackSet, Clause, Guarded, Program, Timeout};

/// A debate: named agents, each holding a sequence of arguments of a shared
/// framework. Agent order is kept as given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Debate {
    pub framework: ArgumentationFramework,
    pub agents: IndexMap<String, Vec<ArgumentId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DebateViolation {
    #[error("agent {agent} uses {argument}, which is not in the framework")]
    UnknownArgument { agent: String, argument: ArgumentId },
    #[error("condition 1: agent {agent} holds both {attacker} and {target}, and {attacker} attacks {target}")]
    InternalConflict {
        agent: String,
        attacker: ArgumentId,
        target: ArgumentId,
    },
    #[error("condition 2: argument {argument} is used by {first} and again by {second}")]
    Repeated {
        argument: ArgumentId,
        first: String,
        second: String,
    },
    #[error("condition 3: the arguments admit no ordered sequence")]
    NoOrderedSequence,
}

impl DebateViolation {
    /// Number of the violated debate condition; 0 for arguments outside the
    /// framework.
    pub fn condition(&self) -> u8 {
        match self {
            DebateViolation::UnknownArgument { .. } => 0,
            DebateViolation::InternalConflict { .. } => 1,
            DebateViolation::Repeated { .. } => 2,
            DebateViolation::NoOrderedSequence => 3,
        }
    }
}

/// One step of a debate trace: an argument with its outgoing attacks.
pub type DebateTrace = Vec<(ArgumentId, BTreeSet<Attack>)>;

impl Debate {
    pub fn new(framework: ArgumentationFramework) -> Self {
        Debate {
            framework,
            agents: IndexMap::new(),
        }
    }

    pub fn with_agent(mut self, name: &str, arguments: &[&str]) -> Self {
        let seq = arguments.iter().map(|a| crate::af::arg(a)).collect();
        self.agents.insert(name.to_owned(), seq);
        self
    }

    /// Union of the arguments of all agents.
    pub fn arguments(&self) -> BTreeSet<ArgumentId> {
        self.agents.values().flatten().cloned().collect()
    }
}

/// The first witness of every violated condition, in condition order. An
/// empty list means the debate is valid.
pub fn validate_debate(debate: &Debate) -> Vec<DebateViolation> {
    let f = &debate.framework;
    let mut out = Vec::new();
    let unknown = debate
        .agents
        .iter()
        .flat_map(|(agent, seq)| seq.iter().map(move |a| (agent, a)))
        .find(|(_, a)| !f.contains(a));
    if let Some((agent, argument)) = unknown {
        out.push(DebateViolation::UnknownArgument {
            agent: agent.clone(),
            argument: argument.clone(),
        });
    }
    let conflict = debate.agents.iter().find_map(|(agent, seq)| {
        let held: BTreeSet<&ArgumentId> = seq.iter().collect();
        f.attacks()
            .iter()
            .find(|(x, y)| held.contains(x) && held.contains(y))
            .map(|(x, y)| DebateViolation::InternalConflict {
                agent: agent.clone(),
                attacker: x.clone(),
                target: y.clone(),
            })
    });
    out.extend(conflict);
    let mut owner: IndexMap<&ArgumentId, &String> = IndexMap::new();
    'outer: for (agent, seq) in &debate.agents {
        for a in seq {
            if let Some(first) = owner.insert(a, agent) {
                out.push(DebateViolation::Repeated {
                    argument: a.clone(),
                    first: first.clone(),
                    second: agent.clone(),
                });
                break 'outer;
            }
        }
    }
    if unknown.is_none() && !has_ordered_sequence(debate) {
        out.push(DebateViolation::NoOrderedSequence);
    }
    out
}

fn require_valid(debate: &Debate) -> Result<(), ProtocolError> {
    let violations = validate_debate(debate);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ProtocolError::InvalidDebate(violations))
    }
}

/// Arguments of the debate with, for each, the positions of the arguments it
/// attacks; `None` when it attacks something outside the debate and so can
/// never be placed.
struct Pool {
    args: Vec<ArgumentId>,
    targets: Vec<Option<Vec<usize>>>,
}

impl Pool {
    fn new(debate: &Debate) -> Result<Self, AfError> {
        let args: Vec<ArgumentId> = debate.arguments().into_iter().collect();
        let mut targets = Vec::with_capacity(args.len());
        for a in &args {
            let plus = debate.framework.attacked_by_argument(a)?;
            targets.push(plus.iter().map(|b| args.binary_search(b).ok()).collect());
        }
        Ok(Pool { args, targets })
    }

    fn placeable(&self, x: usize, placed: &[bool], position: usize) -> bool {
        match &self.targets[x] {
            None => false,
            Some(t) => (position == 0) == t.is_empty() && t.iter().all(|&y| placed[y]),
        }
    }
}

/// Placing an argument only enlarges the prefix, so beyond the first position
/// a greedy closure decides whether a complete ordering exists.
fn has_ordered_sequence(debate: &Debate) -> bool {
    let Ok(pool) = Pool::new(debate) else {
        return false;
    };
    let n = pool.args.len();
    if n == 0 {
        return true;
    }
    let mut placed = vec![false; n];
    let roots: Vec<usize> = (0..n).filter(|&x| pool.placeable(x, &placed, 0)).collect();
    let [root] = roots[..] else {
        return false;
    };
    placed[root] = true;
    let mut count = 1;
    loop {
        let next = (0..n).find(|&x| !placed[x] && pool.placeable(x, &placed, count));
        match next {
            Some(x) => {
                placed[x] = true;
                count += 1;
            }
            None => return count == n,
        }
    }
}

/// Every ordered sequence of the debate's arguments.
pub fn ordered_sequences(debate: &Debate) -> Result<BTreeSet<Vec<ArgumentId>>, ProtocolError> {
    let pool = Pool::new(debate)?;
    let n = pool.args.len();
    let mut out = BTreeSet::new();
    let mut prefix = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    extend(&pool, &mut prefix, &mut placed, &mut out);
    Ok(out)
}

fn extend(pool: &Pool, prefix: &mut Vec<usize>, placed: &mut [bool], out: &mut BTreeSet<Vec<ArgumentId>>) {
    if prefix.len() == pool.args.len() {
        out.insert(prefix.iter().map(|&i| pool.args[i].clone()).collect());
        return;
    }
    for x in 0..pool.args.len() {
        if !placed[x] && pool.placeable(x, placed, prefix.len()) {
            placed[x] = true;
            prefix.push(x);
            extend(pool, prefix, placed, out);
            prefix.pop();
            placed[x] = false;
        }
    }
}

/// `tr(D)`: each ordered sequence paired with the outgoing attacks.
pub fn debate_traces(debate: &Debate) -> Result<BTreeSet<DebateTrace>, ProtocolError> {
    let f = &debate.framework;
    ordered_sequences(debate)?
        .into_iter()
        .map(|seq| {
            seq.into_iter()
                .map(|a| {
                    let r = f.outgoing_attacks(&a)?;
                    Ok((a, r))
                })
                .collect::<Result<DebateTrace, AfError>>()
                .map_err(ProtocolError::from)
        })
        .collect()
}

/// `TrF(D)`: the growing frameworks along every debate trace.
pub fn trace_frameworks(debate: &Debate) -> Result<BTreeSet<Vec<ArgumentationFramework>>, ProtocolError> {
    let mut out = BTreeSet::new();
    for trace in debate_traces(debate)? {
        let mut current = ArgumentationFramework::new();
        let mut seq = Vec::with_capacity(trace.len());
        for (a, attacks) in trace {
            current.add_argument(a);
            for (x, y) in attacks {
                current.add_attack(x, y)?;
            }
            seq.push(current.clone());
        }
        out.insert(seq);
    }
    Ok(out)
}

pub fn wait_clause_name(a: &ArgumentId) -> String {
    format!("wait_{a}")
}

/// `wait_a() := (check(1, a+, {}) -> add({a}, R|a) -> success) +P (check(1, {}, {}) -> wait_a())`
fn wait_clause(f: &ArgumentationFramework, a: &ArgumentId) -> Result<Clause, AfError> {
    let name = wait_clause_name(a);
    let ready = Guarded::check(
        Timeout::Finite(1),
        f.attacked_by_argument(a)?,
        AttackSet::new(),
        Agent::add(ArgSet::from([a.clone()]), f.outgoing_attacks(a)?, Agent::Success),
    );
    let retry = Guarded::check(
        Timeout::Finite(1),
        ArgSet::new(),
        AttackSet::new(),
        Agent::call(name.clone(), Vec::new()),
    );
    Ok(Clause {
        name,
        params: Vec::new(),
        body: Agent::Guarded(Guarded::if_then_else(ready, retry)),
    })
}

/// Translates a valid debate into a program: one specialised `wait_a`
/// procedure per argument, and each agent the parallel composition of the
/// calls for its arguments.
pub fn translate_debate(debate: &Debate) -> Result<Program, ProtocolError> {
    require_valid(debate)?;
    let mut declarations = Vec::new();
    let mut agents = Vec::new();
    for seq in debate.agents.values() {
        let mut calls = Vec::new();
        for a in seq {
            declarations.push(wait_clause(&debate.framework, a)?);
            calls.push(Agent::call(wait_clause_name(a), Vec::new()));
        }
        agents.push(Agent::parallel_all(calls));
    }
    Ok(Program {
        declarations,
        main: Agent::parallel_all(agents),
    })
}

/// Collapses runs of equal consecutive elements.
pub fn rd_consecutive<T: Clone + PartialEq>(seq: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(seq.len());
    for x in seq {
        if out.last() != Some(x) {
            out.push(x.clone());
        }
    }
    out
}

/// Keeps only the first occurrence of every element.
pub fn rd_all<T: Clone + PartialEq>(seq: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(seq.len());
    for x in seq {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReadingComparison {
    pub holds: bool,
    /// Debate framework sequences no successful run produces.
    pub missing: Vec<Vec<ArgumentationFramework>>,
    /// Successful run sequences that are not debate framework sequences.
    pub extra: Vec<Vec<ArgumentationFramework>>,
}

impl ReadingComparison {
    fn new(expected: &BTreeSet<Vec<ArgumentationFramework>>, observed: &BTreeSet<Vec<ArgumentationFramework>>) -> Self {
        let missing: Vec<_> = expected.difference(observed).cloned().collect();
        let extra: Vec<_> = observed.difference(expected).cloned().collect();
        ReadingComparison {
            holds: missing.is_empty() && extra.is_empty(),
            missing,
            extra,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem1Verdict {
    pub status: VerdictStatus,
    /// Size of `TrF(D)`.
    pub expected: usize,
    /// Distinct reduced store sequences of successful runs.
    pub observed: usize,
    /// Repeats collapsed only when adjacent; this reading decides `status`.
    pub consecutive: ReadingComparison,
    /// Every repeated store dropped, wherever it occurs.
    pub all_duplicates: ReadingComparison,
    pub failed_runs: bool,
    pub bounded_runs: bool,
    pub budget_exhausted: bool,
    pub nodes: usize,
}

/// Compares `TrF(D)` with the reduced successful store sequences of the
/// translated program, explored from the empty store for `bound` steps.
pub fn check_theorem1(debate: &Debate, bound: usize, budget: usize) -> Result<Theorem1Verdict, ProtocolError> {
    let program = translate_debate(debate)?;
    check_theorem1_for_program(debate, &program, bound, budget)
}

/// As [`check_theorem1`] with an arbitrary program standing in for the
/// translation.
pub fn check_theorem1_for_program(
    debate: &Debate,
    program: &Program,
    bound: usize,
    budget: usize,
) -> Result<Theorem1Verdict, ProtocolError> {
    require_valid(debate)?;
    let expected = trace_frameworks(debate)?;
    let empty = ArgumentationFramework::new();
    let ex = stutter_free_runs(program, &empty, bound, budget)?;
    let mut consecutive = BTreeSet::new();
    let mut all = BTreeSet::new();
    // Each sequence starts with the initial empty store; the stores the
    // theorem speaks about follow it.
    for seq in &ex.successful {
        consecutive.insert(drop_initial(seq, &empty));
        all.insert(drop_initial(&rd_all(seq), &empty));
    }
    let consecutive_cmp = ReadingComparison::new(&expected, &consecutive);
    let all_cmp = ReadingComparison::new(&expected, &all);
    let status = if ex.budget_exhausted {
        VerdictStatus::Inconclusive
    } else if consecutive.is_empty() {
        VerdictStatus::NoSuccessfulRun
    } else if consecutive_cmp.holds {
        VerdictStatus::Holds
    } else {
        VerdictStatus::Mismatch
    };
    Ok(Theorem1Verdict {
        status,
        expected: expected.len(),
        observed: consecutive.len(),
        consecutive: consecutive_cmp,
        all_duplicates: all_cmp,
        failed_runs: !ex.failed.is_empty(),
        bounded_runs: ex.bounded_runs,
        budget_exhausted: ex.budget_exhausted,
        nodes: ex.nodes,
    })
}

fn drop_initial(seq: &[ArgumentationFramework], initial: &ArgumentationFramework) -> Vec<ArgumentationFramework> {
    let start = usize::from(seq.first() == Some(initial));
    seq[start..].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::af::{arg, examples};
    use crate::engine::{run, SchedulingPolicy, Terminal, DEFAULT_NODE_BUDGET};
    use crate::syntax::{parse_program, pretty_print};

    fn example4() -> Debate {
        Debate::new(examples::debate_framework())
            .with_agent("Alice", &["a", "e", "g"])
            .with_agent("Bob", &["b"])
            .with_agent("Carol", &["c", "d", "f"])
    }

    fn names(seq: &[ArgumentId]) -> String {
        seq.iter().map(ArgumentId::as_str).collect()
    }

    /// Every permutation of the pool, filtered by the ordering conditions.
    fn brute_force(debate: &Debate) -> BTreeSet<String> {
        fn perms(rest: Vec<ArgumentId>, acc: &mut Vec<ArgumentId>, out: &mut Vec<Vec<ArgumentId>>) {
            if rest.is_empty() {
                out.push(acc.clone());
            }
            for i in 0..rest.len() {
                let mut r = rest.clone();
                acc.push(r.remove(i));
                perms(r, acc, out);
                acc.pop();
            }
        }
        let mut all = Vec::new();
        perms(debate.arguments().into_iter().collect(), &mut Vec::new(), &mut all);
        let f = &debate.framework;
        all.into_iter()
            .filter(|seq| {
                seq.iter().enumerate().all(|(i, a)| {
                    let plus: Vec<_> = f.attacks().iter().filter(|(x, _)| x == a).map(|(_, y)| y).collect();
                    plus.iter().all(|y| seq[..i].contains(y)) && (i == 0 || !plus.is_empty())
                })
            })
            .map(|s| names(&s))
            .collect()
    }

    #[test]
    fn example4_orderings() {
        let d = example4();
        assert!(validate_debate(&d).is_empty());
        let ord = ordered_sequences(&d).unwrap();
        assert!(ord.contains(&"abcdefg".chars().map(|c| arg(&c.to_string())).collect::<Vec<_>>()));
        let got: BTreeSet<String> = ord.iter().map(|s| names(s)).collect();
        assert_eq!(got, brute_force(&d));
        // a first; b,c,d,f in any order after a; e after c and d; g after b.
        assert_eq!(got.len(), 120);
    }

    #[test]
    fn orderings_of_small_debates() {
        let single = Debate::new(ArgumentationFramework::build(&["x"], &[])).with_agent("A", &["x"]);
        let ord = ordered_sequences(&single).unwrap();
        assert_eq!(ord, BTreeSet::from([vec![arg("x")]]));

        let cycle = ArgumentationFramework::build(&["a", "b"], &[("a", "b"), ("b", "a")]);
        let d = Debate::new(cycle).with_agent("A", &["a"]).with_agent("B", &["b"]);
        assert!(ordered_sequences(&d).unwrap().is_empty());
        assert!(brute_force(&d).is_empty());
        assert_eq!(validate_debate(&d), vec![DebateViolation::NoOrderedSequence]);
    }

    #[test]
    fn violations_name_their_condition() {
        let f = ArgumentationFramework::build(&["a", "b"], &[("b", "a")]);
        let d = Debate::new(f.clone()).with_agent("A", &["a", "b"]);
        let v = validate_debate(&d);
        assert_eq!(v[0].condition(), 1);
        let d = Debate::new(f.clone()).with_agent("A", &["a"]).with_agent("B", &["a"]);
        assert_eq!(validate_debate(&d).iter().map(|v| v.condition()).collect::<Vec<_>>(), vec![2]);
        let d = Debate::new(f).with_agent("A", &["a", "z"]);
        assert_eq!(validate_debate(&d)[0].condition(), 0);
        assert!(matches!(translate_debate(&d), Err(ProtocolError::InvalidDebate(_))));
    }

    #[test]
    fn final_frameworks_cover_every_argument() {
        let d = example4();
        let trf = trace_frameworks(&d).unwrap();
        assert_eq!(trf.len(), 120);
        for seq in &trf {
            assert_eq!(seq.last().unwrap(), &examples::debate_framework());
            assert_eq!(seq.len(), 7);
        }
    }

    #[test]
    fn translation_shape() {
        let d = example4();
        let p = translate_debate(&d).unwrap();
        assert_eq!(p.declarations.len(), 7);
        let text = pretty_print(&p);
        assert!(text.contains("def wait_e() := (check(1,{c,d},{}) -> add({e},{(e,c),(e,d)}) -> success)+P(check(1,{},{}) -> wait_e());"), "{text}");
        assert_eq!(parse_program(&text).unwrap(), p);
        let empty = Debate::new(ArgumentationFramework::new());
        assert_eq!(translate_debate(&empty).unwrap().main, Agent::Success);
    }

    #[test]
    fn single_argument_needs_call_check_and_add() {
        let d = Debate::new(ArgumentationFramework::build(&["x"], &[])).with_agent("A", &["x"]);
        let p = translate_debate(&d).unwrap();
        let t = run(&p, &ArgumentationFramework::new(), SchedulingPolicy::default(), 10).unwrap();
        assert_eq!(t.terminal, Terminal::Success);
        assert!(t.steps[0].store.is_empty() && t.steps[1].store.is_empty());
        assert_eq!(t.steps[2].clock, 3);
        assert!(t.steps[2].store.contains(&arg("x")));
    }

    #[test]
    fn rd_readings() {
        assert_eq!(rd_consecutive(&[1, 1, 2, 1, 1]), vec![1, 2, 1]);
        assert_eq!(rd_all(&[1, 1, 2, 1, 1]), vec![1, 2]);
        assert!(rd_consecutive::<u8>(&[]).is_empty());
    }

    #[test]
    fn theorem1_small_debates() {
        let chain = ArgumentationFramework::build(&["a", "b", "c"], &[("b", "a"), ("c", "b")]);
        let d = Debate::new(chain).with_agent("A", &["a", "c"]).with_agent("B", &["b"]);
        let v = check_theorem1(&d, 40, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds, "{v:?}");
        assert_eq!(v.expected, 1);

        let empty = Debate::new(ArgumentationFramework::new());
        let v = check_theorem1(&empty, 10, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(v.status, VerdictStatus::Holds);
        assert_eq!(v.expected, 1);
    }

    #[test]
    fn dropped_agent_is_reported_missing() {
        let f = ArgumentationFramework::build(&["a", "b", "c"], &[("b", "a"), ("c", "a")]);
        let d = Debate::new(f).with_agent("A", &["a"]).with_agent("B", &["b"]).with_agent("C", &["c"]);
        let mut p = translate_debate(&d).unwrap();
        p.main = Agent::parallel(Agent::call("wait_a", vec![]), Agent::call("wait_b", vec![]));
        let v = check_theorem1_for_program(&d, &p, 40, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(v.status, VerdictStatus::Mismatch);
        assert_eq!(v.consecutive.missing.len(), 2);
        assert_eq!(v.consecutive.extra.len(), 1);
    }
}
