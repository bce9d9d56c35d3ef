use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::Serialize;

use super::derive::omega_successors;
use super::{ExecError, Terminal};
use crate::af::ArgumentationFramework;
use crate::syntax::{Agent, Program};

pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Summarises the store sequences of all runs. `end` handles the last store
/// of a run, `cons` prepends a store to the summary of the remainder.
pub trait TraceFold {
    type Out: Ord + Clone + Send;

    fn end(&self, store: &ArgumentationFramework, terminal: Terminal) -> Self::Out;
    fn cons(&self, store: &ArgumentationFramework, rest: &Self::Out) -> Self::Out;
}

#[derive(Clone, Debug)]
pub struct Exploration<O> {
    pub outcomes: BTreeSet<O>,
    /// Set when the node budget ran out; unexplored nodes were cut off as
    /// bounded and the outcome set is partial.
    pub budget_exhausted: bool,
    pub nodes: usize,
}

/// Explores every schedule of `agent` from `initial` for at most `bound`
/// ω-steps, folding each run's store sequence with `fold`.
pub fn explore<F>(
    program: &Program,
    agent: &Agent,
    initial: &ArgumentationFramework,
    bound: usize,
    budget: usize,
    fold: &F,
) -> Result<Exploration<F::Out>, ExecError>
where
    F: TraceFold + Sync,
{
    let work = || {
        let mut ex = Explorer {
            program,
            fold,
            memo: HashMap::new(),
            budget,
            nodes: 0,
            exhausted: false,
        };
        let root = ex.node(agent.clone().normalize(), initial.clone(), 0, bound)?;
        Ok(Exploration {
            outcomes: (*root).clone(),
            budget_exhausted: ex.exhausted,
            nodes: ex.nodes,
        })
    };
    #[cfg(not(target_arch = "wasm32"))]
    {
        // Depth grows with the bound; give the recursion room.
        std::thread::scope(|s| {
            std::thread::Builder::new()
                .stack_size(256 * 1024 * 1024)
                .spawn_scoped(s, work)
                .expect("spawn explorer thread")
                .join()
                .expect("explorer thread panicked")
        })
    }
    #[cfg(target_arch = "wasm32")]
    {
        work()
    }
}

type Key = (Agent, ArgumentationFramework, u64, usize);

struct Explorer<'a, F: TraceFold> {
    program: &'a Program,
    fold: &'a F,
    memo: HashMap<Key, Rc<BTreeSet<F::Out>>>,
    budget: usize,
    nodes: usize,
    exhausted: bool,
}

impl<F: TraceFold> Explorer<'_, F> {
    fn node(
        &mut self,
        agent: Agent,
        store: ArgumentationFramework,
        fresh: u64,
        remaining: usize,
    ) -> Result<Rc<BTreeSet<F::Out>>, ExecError> {
        let terminal = match agent {
            Agent::Success => Some(Terminal::Success),
            Agent::Failure => Some(Terminal::Failure),
            _ if remaining == 0 => Some(Terminal::Bounded),
            _ => None,
        };
        if let Some(t) = terminal {
            return Ok(Rc::new(BTreeSet::from([self.fold.end(&store, t)])));
        }
        let key = (agent, store, fresh, remaining);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let (agent, store, ..) = &key;
        if self.nodes >= self.budget {
            self.exhausted = true;
            return Ok(Rc::new(BTreeSet::from([self.fold.end(store, Terminal::Bounded)])));
        }
        self.nodes += 1;
        let options = omega_successors(agent, store, fresh, self.program)?;
        if options.is_empty() {
            return Err(ExecError::Stuck {
                agent: agent.to_string(),
            });
        }
        let mut out = BTreeSet::new();
        for t in options {
            let rest = self.node(t.agent, t.store, t.next_fresh, remaining - 1)?;
            for r in rest.iter() {
                out.insert(self.fold.cons(store, r));
            }
        }
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// A store sequence observed along one run, starting with the initial store.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ObservedTrace {
    pub stores: Vec<ArgumentationFramework>,
    pub terminal: Terminal,
}

/// Keeps complete store sequences.
pub struct FullTraces;

impl TraceFold for FullTraces {
    type Out = ObservedTrace;

    fn end(&self, store: &ArgumentationFramework, terminal: Terminal) -> ObservedTrace {
        ObservedTrace {
            stores: vec![store.clone()],
            terminal,
        }
    }

    fn cons(&self, store: &ArgumentationFramework, rest: &ObservedTrace) -> ObservedTrace {
        let mut stores = Vec::with_capacity(rest.stores.len() + 1);
        stores.push(store.clone());
        stores.extend(rest.stores.iter().cloned());
        ObservedTrace {
            stores,
            terminal: rest.terminal,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Observables {
    pub traces: BTreeSet<ObservedTrace>,
    pub budget_exhausted: bool,
    pub nodes: usize,
}

impl Observables {
    pub fn with_terminal(&self, terminal: Terminal) -> impl Iterator<Item = &ObservedTrace> {
        self.traces.iter().filter(move |t| t.terminal == terminal)
    }

    pub fn successful(&self) -> impl Iterator<Item = &ObservedTrace> {
        self.with_terminal(Terminal::Success)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ObservedTrace> {
        self.with_terminal(Terminal::Failure)
    }

    pub fn bounded(&self) -> impl Iterator<Item = &ObservedTrace> {
        self.with_terminal(Terminal::Bounded)
    }
}

/// Every ω-store sequence of `program` from `initial` within `bound` steps.
pub fn observables(
    program: &Program,
    initial: &ArgumentationFramework,
    bound: usize,
    budget: usize,
) -> Result<Observables, ExecError> {
    let ex = explore(program, &program.main, initial, bound, budget, &FullTraces)?;
    Ok(Observables {
        traces: ex.outcomes,
        budget_exhausted: ex.budget_exhausted,
        nodes: ex.nodes,
    })
}

/// Runs summarised by their store sequence with adjacent repeats collapsed.
/// Every sequence starts with the initial store.
#[derive(Clone, Debug, Serialize)]
pub struct StutterFreeRuns {
    pub successful: BTreeSet<Vec<ArgumentationFramework>>,
    pub failed: BTreeSet<Vec<ArgumentationFramework>>,
    /// Some run takes `bound` steps without terminating.
    pub bounded_runs: bool,
    pub budget_exhausted: bool,
    pub nodes: usize,
}

/// Breadth-first search over configurations paired with the collapsed store
/// sequence that led to them. A pair is expanded only at the depth where it
/// is first met; a later arrival has fewer steps left and the same futures,
/// so it cannot add a terminated sequence.
pub fn stutter_free_runs(
    program: &Program,
    initial: &ArgumentationFramework,
    bound: usize,
    budget: usize,
) -> Result<StutterFreeRuns, ExecError> {
    let mut stores: Vec<ArgumentationFramework> = Vec::new();
    let mut store_ids: HashMap<ArgumentationFramework, u32> = HashMap::new();
    let mut intern_store = |af: ArgumentationFramework, stores: &mut Vec<ArgumentationFramework>| -> u32 {
        *store_ids.entry(af).or_insert_with_key(|af| {
            stores.push(af.clone());
            (stores.len() - 1) as u32
        })
    };
    // Prefix trie: (parent, last store).
    const NO_PARENT: u32 = u32::MAX;
    let mut prefixes: Vec<(u32, u32)> = Vec::new();
    let mut prefix_ids: HashMap<(u32, u32), u32> = HashMap::new();
    let mut intern_prefix = |parent: u32, store: u32, prefixes: &mut Vec<(u32, u32)>| -> u32 {
        *prefix_ids.entry((parent, store)).or_insert_with(|| {
            prefixes.push((parent, store));
            (prefixes.len() - 1) as u32
        })
    };
    let sequence = |mut p: u32, prefixes: &[(u32, u32)], stores: &[ArgumentationFramework]| {
        let mut seq = Vec::new();
        while p != NO_PARENT {
            let (parent, s) = prefixes[p as usize];
            seq.push(stores[s as usize].clone());
            p = parent;
        }
        seq.reverse();
        seq
    };

    let mut out = StutterFreeRuns {
        successful: BTreeSet::new(),
        failed: BTreeSet::new(),
        bounded_runs: false,
        budget_exhausted: false,
        nodes: 0,
    };
    let root_store = intern_store(initial.clone(), &mut stores);
    let root_prefix = intern_prefix(NO_PARENT, root_store, &mut prefixes);
    let root = program.main.clone().normalize();
    match root {
        Agent::Success => {
            out.successful.insert(vec![initial.clone()]);
            return Ok(out);
        }
        Agent::Failure => {
            out.failed.insert(vec![initial.clone()]);
            return Ok(out);
        }
        _ => {}
    }

    type Node = (Agent, u32, u64);
    let mut index: HashMap<Node, u32> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut edges: Vec<Vec<u32>> = Vec::new();
    let start: Node = (root, root_prefix, 0);
    index.insert(start.clone(), 0);
    nodes.push(start);
    edges.push(Vec::new());
    let mut frontier = vec![0u32];
    for _depth in 0..bound {
        let mut next = Vec::new();
        for n in frontier {
            if out.nodes >= budget {
                out.budget_exhausted = true;
                break;
            }
            out.nodes += 1;
            let (agent, prefix, fresh) = nodes[n as usize].clone();
            let store = &stores[prefixes[prefix as usize].1 as usize];
            let options = omega_successors(&agent, store, fresh, program)?;
            if options.is_empty() {
                return Err(ExecError::Stuck {
                    agent: agent.to_string(),
                });
            }
            for t in options {
                let last = prefixes[prefix as usize].1;
                let s = intern_store(t.store, &mut stores);
                let p = if s == last { prefix } else { intern_prefix(prefix, s, &mut prefixes) };
                match t.agent {
                    Agent::Success => {
                        out.successful.insert(sequence(p, &prefixes, &stores));
                    }
                    Agent::Failure => {
                        out.failed.insert(sequence(p, &prefixes, &stores));
                    }
                    agent => {
                        let key = (agent, p, t.next_fresh);
                        let id = match index.get(&key) {
                            Some(&id) => id,
                            None => {
                                let id = nodes.len() as u32;
                                index.insert(key.clone(), id);
                                nodes.push(key);
                                edges.push(Vec::new());
                                next.push(id);
                                id
                            }
                        };
                        edges[n as usize].push(id);
                    }
                }
            }
        }
        if out.budget_exhausted {
            break;
        }
        frontier = next;
    }
    out.bounded_runs = longest_path_reaches(&edges, bound);
    Ok(out)
}

/// Whether a path of `bound` edges starts at node 0. Any cycle qualifies.
fn longest_path_reaches(edges: &[Vec<u32>], bound: usize) -> bool {
    let n = edges.len();
    let mut indegree = vec![0usize; n];
    for targets in edges {
        for &t in targets {
            indegree[t as usize] += 1;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = ready.pop() {
        order.push(i);
        for &t in &edges[i] {
            indegree[t as usize] -= 1;
            if indegree[t as usize] == 0 {
                ready.push(t as usize);
            }
        }
    }
    if order.len() < n {
        return true;
    }
    let mut longest = vec![None::<usize>; n];
    longest[0] = Some(0);
    for i in order {
        if let Some(d) = longest[i] {
            if d >= bound {
                return true;
            }
            for &t in &edges[i] {
                let slot = &mut longest[t as usize];
                *slot = Some(slot.map_or(d + 1, |old| old.max(d + 1)));
            }
        }
    }
    false
}
