use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use super::{omega_transitions, Configuration, Event, ExecError, Terminal, Transition, TransitionLabel};
use crate::af::{ArgumentId, ArgumentationFramework};
use crate::syntax::Program;

/// How the scheduler resolves the choice among enabled ω-transitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SchedulingPolicy {
    /// Seeded draw in three tiers. Steps that satisfy a guard come first,
    /// earliest timeout first; then the other productive steps; a failed
    /// check is only picked when nothing else is enabled. Ties are broken
    /// uniformly at random.
    SeededRandom { seed: u64 },
    /// Seeded uniform draw over every enabled transition.
    UniformRandom { seed: u64 },
    /// Indices into the canonical choice list, one per step. Once the script
    /// runs out, the first choice is taken.
    Scripted { choices: Vec<usize> },
    /// Exploration of every choice up to a step bound; see `observables`.
    Exhaustive { bound: usize },
}

impl Default for SchedulingPolicy {
    fn default() -> Self {
        SchedulingPolicy::SeededRandom { seed: 0 }
    }
}

pub struct Scheduler {
    policy: SchedulingPolicy,
    rng: ChaCha8Rng,
    cursor: usize,
}

impl Scheduler {
    pub fn new(policy: SchedulingPolicy) -> Result<Self, ExecError> {
        let seed = match &policy {
            SchedulingPolicy::SeededRandom { seed } | SchedulingPolicy::UniformRandom { seed } => *seed,
            SchedulingPolicy::Scripted { .. } => 0,
            SchedulingPolicy::Exhaustive { .. } => {
                return Err(ExecError::Policy(
                    "exhaustive exploration does not drive a single run".into(),
                ))
            }
        };
        Ok(Scheduler {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cursor: 0,
        })
    }

    pub fn policy(&self) -> &SchedulingPolicy {
        &self.policy
    }

    pub fn choose(&mut self, options: &[Transition]) -> Result<usize, ExecError> {
        if options.is_empty() {
            return Err(ExecError::Policy("nothing to choose from".into()));
        }
        match &self.policy {
            SchedulingPolicy::SeededRandom { .. } => {
                let rank = |t: &Transition| match (t.is_idle(), t.satisfied_deadline()) {
                    (true, _) => (2, None),
                    (false, Some(deadline)) => (0, Some(deadline)),
                    (false, None) => (1, None),
                };
                let best = options.iter().map(rank).min().expect("non-empty");
                let tied: Vec<usize> = (0..options.len()).filter(|&i| rank(&options[i]) == best).collect();
                Ok(tied[self.rng.gen_range(0..tied.len())])
            }
            SchedulingPolicy::UniformRandom { .. } => Ok(self.rng.gen_range(0..options.len())),
            SchedulingPolicy::Scripted { choices } => {
                let index = choices.get(self.cursor).copied().unwrap_or(0);
                self.cursor += 1;
                if index >= options.len() {
                    return Err(ExecError::InvalidChoice {
                        index,
                        available: options.len(),
                    });
                }
                Ok(index)
            }
            SchedulingPolicy::Exhaustive { .. } => unreachable!("rejected in Scheduler::new"),
        }
    }
}

/// Result of advancing a configuration by one time unit.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub label: TransitionLabel,
    pub next: Configuration,
    pub events: Vec<Event>,
    /// Index of the transition taken in the canonical choice list.
    pub choice: usize,
    /// Number of ω-transitions that were enabled.
    pub choices: usize,
}

fn enabled(cfg: &Configuration, program: &Program) -> Result<Vec<Transition>, ExecError> {
    let options = omega_transitions(&cfg.agent, &cfg.store, cfg.next_fresh, program)?;
    if options.is_empty() {
        return Err(ExecError::Stuck {
            agent: cfg.agent.to_string(),
        });
    }
    Ok(options)
}

fn take(cfg: &Configuration, mut options: Vec<Transition>, index: usize) -> Result<StepOutcome, ExecError> {
    let choices = options.len();
    if index >= choices {
        return Err(ExecError::InvalidChoice {
            index,
            available: choices,
        });
    }
    let t = options.swap_remove(index);
    Ok(StepOutcome {
        label: t.label,
        next: Configuration {
            agent: t.agent,
            store: t.store,
            clock: cfg.clock + 1,
            next_fresh: t.next_fresh,
        },
        events: t.events,
        choice: index,
        choices,
    })
}

/// Advances `cfg` by one time unit; `None` once the agent is terminal.
pub fn step(cfg: &Configuration, program: &Program, scheduler: &mut Scheduler) -> Result<Option<StepOutcome>, ExecError> {
    if cfg.terminal().is_some() {
        return Ok(None);
    }
    let options = enabled(cfg, program)?;
    let index = scheduler.choose(&options)?;
    take(cfg, options, index).map(Some)
}

/// Advances `cfg` taking the transition at `index` of the canonical list.
pub fn step_with_choice(cfg: &Configuration, program: &Program, index: usize) -> Result<Option<StepOutcome>, ExecError> {
    if cfg.terminal().is_some() {
        return Ok(None);
    }
    let options = enabled(cfg, program)?;
    take(cfg, options, index).map(Some)
}

/// Store reached after one ω-step, with the step's bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub clock: u64,
    pub label: TransitionLabel,
    pub store: ArgumentationFramework,
    pub events: Vec<Event>,
    pub choice: usize,
    pub choices: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub initial: ArgumentationFramework,
    pub steps: Vec<TraceStep>,
    pub terminal: Terminal,
}

impl Trace {
    /// The initial store followed by the store after each step.
    pub fn stores(&self) -> Vec<&ArgumentationFramework> {
        std::iter::once(&self.initial)
            .chain(self.steps.iter().map(|s| &s.store))
            .collect()
    }

    pub fn final_store(&self) -> &ArgumentationFramework {
        self.steps.last().map(|s| &s.store).unwrap_or(&self.initial)
    }
}

/// Runs `program` from `initial` until it terminates or `step_bound` steps
/// have been taken.
pub fn run(
    program: &Program,
    initial: &ArgumentationFramework,
    policy: SchedulingPolicy,
    step_bound: usize,
) -> Result<Trace, ExecError> {
    let cfg = Configuration::new(program.main.clone(), initial.clone());
    let mut scheduler = Scheduler::new(policy)?;
    run_configuration(cfg, program, &mut scheduler, step_bound).map(|(trace, _)| trace)
}

/// Runs from an arbitrary configuration; also returns the last configuration.
pub fn run_configuration(
    mut cfg: Configuration,
    program: &Program,
    scheduler: &mut Scheduler,
    step_bound: usize,
) -> Result<(Trace, Configuration), ExecError> {
    let initial = cfg.store.clone();
    let mut steps = Vec::new();
    let terminal = loop {
        if let Some(t) = cfg.terminal() {
            break t;
        }
        if steps.len() >= step_bound {
            break Terminal::Bounded;
        }
        let outcome = step(&cfg, program, scheduler)?.expect("non-terminal configuration steps");
        steps.push(TraceStep {
            clock: outcome.next.clock,
            label: outcome.label,
            store: outcome.next.store.clone(),
            events: outcome.events,
            choice: outcome.choice,
            choices: outcome.choices,
        });
        cfg = outcome.next;
    };
    Ok((
        Trace {
            initial,
            steps,
            terminal,
        },
        cfg,
    ))
}

/// Presence of one argument in the store over time. Intervals are half-open
/// `[enter, exit)` in clock units; `exit` is `None` while still present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimelineRow {
    pub argument: ArgumentId,
    pub intervals: Vec<(u64, Option<u64>)>,
}

impl Serialize for TimelineRow {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Intervals<'a>(&'a [(u64, Option<u64>)]);
        impl Serialize for Intervals<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for (a, b) in self.0 {
                    seq.serialize_element(&(a, b))?;
                }
                seq.end()
            }
        }
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TimelineRow", 2)?;
        st.serialize_field("argument", &self.argument)?;
        st.serialize_field("intervals", &Intervals(&self.intervals))?;
        st.end()
    }
}

/// Per-argument presence intervals along a trace, ordered by argument name.
pub fn timeline(trace: &Trace) -> Vec<TimelineRow> {
    let snapshots = std::iter::once((0u64, &trace.initial)).chain(trace.steps.iter().map(|s| (s.clock, &s.store)));
    let mut rows: BTreeMap<ArgumentId, Vec<(u64, Option<u64>)>> = BTreeMap::new();
    for (clock, store) in snapshots {
        for a in store.arguments() {
            let intervals = rows.entry(a.clone()).or_default();
            if !matches!(intervals.last(), Some((_, None))) {
                intervals.push((clock, None));
            }
        }
        for (a, intervals) in rows.iter_mut() {
            if let Some(last) = intervals.last_mut() {
                if last.1.is_none() && !store.contains(a) {
                    last.1 = Some(clock);
                }
            }
        }
    }
    rows.into_iter()
        .map(|(argument, intervals)| TimelineRow { argument, intervals })
        .collect()
}
