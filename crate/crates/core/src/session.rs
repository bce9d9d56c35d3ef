//! Step-by-step execution sessions, shared by the CLI, the HTTP service and
//! the browser demo.

use serde::Serialize;
use thiserror::Error;

use crate::af::ArgumentationFramework;
use crate::engine::{
    omega_transitions, path_string, step, step_with_choice, timeline, Configuration, Event, ExecError, Scheduler,
    SchedulingPolicy, Terminal, TimelineRow, Trace, TraceStep, Transition,
};
use crate::syntax::Program;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("session already terminated with {0}")]
    Terminated(Terminal),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// One enabled ω-transition as offered to a user.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceView {
    pub index: usize,
    pub rule: String,
    pub path: String,
    pub detail: String,
    pub store: ArgumentationFramework,
}

impl ChoiceView {
    fn of(index: usize, t: &Transition) -> Self {
        let (rule, path, detail) = match t.omega_event() {
            Some(e) => (e.rule.to_string(), path_string(&e.path), e.detail.clone()),
            None => (String::new(), String::new(), String::new()),
        };
        ChoiceView {
            index,
            rule,
            path,
            detail,
            store: t.store.clone(),
        }
    }
}

/// Snapshot of a session after some number of steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateView {
    pub clock: u64,
    pub store: ArgumentationFramework,
    /// Remaining agent, printed.
    pub agent: String,
    /// Events of the most recent step.
    pub events: Vec<Event>,
    /// Choice index taken by the most recent step.
    pub last_choice: Option<usize>,
    pub choices: Vec<ChoiceView>,
    pub timeline: Vec<TimelineRow>,
    pub terminal: Option<Terminal>,
    pub is_terminal: bool,
}

/// A program being executed one time unit at a time.
pub struct ExecSession {
    program: Program,
    config: Configuration,
    scheduler: Scheduler,
    initial: ArgumentationFramework,
    steps: Vec<TraceStep>,
}

impl ExecSession {
    pub fn new(program: Program, initial: ArgumentationFramework, policy: SchedulingPolicy) -> Result<Self, ExecError> {
        let scheduler = Scheduler::new(policy)?;
        let config = Configuration::new(program.main.clone(), initial.clone());
        Ok(ExecSession {
            program,
            config,
            scheduler,
            initial,
            steps: Vec::new(),
        })
    }

    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    pub fn policy(&self) -> &SchedulingPolicy {
        self.scheduler.policy()
    }

    pub fn terminal(&self) -> Option<Terminal> {
        self.config.terminal()
    }

    /// The trace so far; `Bounded` while the agent has not terminated.
    pub fn trace(&self) -> Trace {
        Trace {
            initial: self.initial.clone(),
            steps: self.steps.clone(),
            terminal: self.terminal().unwrap_or(Terminal::Bounded),
        }
    }

    /// The enabled ω-transitions in canonical order.
    pub fn choices(&self) -> Result<Vec<Transition>, ExecError> {
        if self.terminal().is_some() {
            return Ok(Vec::new());
        }
        omega_transitions(&self.config.agent, &self.config.store, self.config.next_fresh, &self.program)
    }

    pub fn state(&self) -> Result<StateView, ExecError> {
        let choices = self.choices()?.iter().enumerate().map(|(i, t)| ChoiceView::of(i, t)).collect();
        let last = self.steps.last();
        let terminal = self.terminal();
        Ok(StateView {
            clock: self.config.clock,
            store: self.config.store.clone(),
            agent: self.config.agent.to_string(),
            events: last.map(|s| s.events.clone()).unwrap_or_default(),
            last_choice: last.map(|s| s.choice),
            choices,
            timeline: timeline(&self.trace()),
            terminal,
            is_terminal: terminal.is_some(),
        })
    }

    /// Advances one time unit, taking `choice` or asking the policy.
    pub fn step(&mut self, choice: Option<usize>) -> Result<(), SessionError> {
        if let Some(t) = self.terminal() {
            return Err(SessionError::Terminated(t));
        }
        let outcome = match choice {
            Some(index) => step_with_choice(&self.config, &self.program, index)?,
            None => step(&self.config, &self.program, &mut self.scheduler)?,
        }
        .expect("non-terminal configuration steps");
        self.steps.push(TraceStep {
            clock: outcome.next.clock,
            label: outcome.label,
            store: outcome.next.store.clone(),
            events: outcome.events,
            choice: outcome.choice,
            choices: outcome.choices,
        });
        self.config = outcome.next;
        Ok(())
    }

    /// Steps with the policy until termination or `bound` further steps.
    pub fn run(&mut self, bound: usize) -> Result<(), SessionError> {
        if let Some(t) = self.terminal() {
            return Err(SessionError::Terminated(t));
        }
        for _ in 0..bound {
            if self.terminal().is_some() {
                break;
            }
            self.step(None)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::af::ArgumentationFramework;
    use crate::engine::run;
    use crate::syntax::parse_program;

    const THREE: &str = "add({a},{}) -> success || add({b},{}) -> success || add({c},{}) -> success;";

    #[test]
    fn three_way_parallel_offers_three_choices() {
        let p = parse_program(THREE).unwrap();
        let s = ExecSession::new(p, ArgumentationFramework::new(), SchedulingPolicy::default()).unwrap();
        let view = s.state().unwrap();
        assert_eq!(view.choices.len(), 3);
        assert_eq!(view.clock, 0);
        assert!(!view.is_terminal);
    }

    #[test]
    fn steps_match_scripted_run_prefix() {
        let p = parse_program(THREE).unwrap();
        let script = vec![2, 1, 0];
        let full = run(
            &p,
            &ArgumentationFramework::new(),
            SchedulingPolicy::Scripted { choices: script.clone() },
            50,
        )
        .unwrap();
        let mut s = ExecSession::new(p, ArgumentationFramework::new(), SchedulingPolicy::default()).unwrap();
        for (n, c) in script.iter().enumerate() {
            s.step(Some(*c)).unwrap();
            let view = s.state().unwrap();
            assert_eq!(view.store, full.steps[n].store);
            assert_eq!(view.clock, full.steps[n].clock);
            assert_eq!(view.events, full.steps[n].events);
        }
        assert_eq!(s.terminal(), Some(Terminal::Success));
        assert_eq!(s.trace(), full);
    }

    #[test]
    fn terminal_session_rejects_steps() {
        let p = parse_program("failure;").unwrap();
        let mut s = ExecSession::new(p, ArgumentationFramework::new(), SchedulingPolicy::default()).unwrap();
        assert_eq!(s.step(None), Err(SessionError::Terminated(Terminal::Failure)));
        assert!(s.state().unwrap().choices.is_empty());
    }

    #[test]
    fn invalid_choice_leaves_state_untouched() {
        let p = parse_program(THREE).unwrap();
        let mut s = ExecSession::new(p, ArgumentationFramework::new(), SchedulingPolicy::default()).unwrap();
        assert!(matches!(s.step(Some(7)), Err(SessionError::Exec(ExecError::InvalidChoice { .. }))));
        assert_eq!(s.state().unwrap().clock, 0);
    }

    #[test]
    fn run_stops_at_bound() {
        let p = parse_program("let def loop() := check(1,{},{}) -> loop(); in loop();").unwrap();
        let mut s = ExecSession::new(p, ArgumentationFramework::new(), SchedulingPolicy::default()).unwrap();
        s.run(5).unwrap();
        assert_eq!(s.state().unwrap().clock, 5);
        assert_eq!(s.trace().terminal, Terminal::Bounded);
    }
}
