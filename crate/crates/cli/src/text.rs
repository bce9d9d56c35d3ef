//! Plain-text rendering of traces, timelines and observables.

use std::fmt::Write as _;

use tcla_core::af::ArgumentationFramework;
use tcla_core::engine::{Observables, TimelineRow, Trace};
use tcla_core::session::ChoiceView;

/// Additions and removals between two stores, e.g. `+a +(b,a) -c`.
pub fn store_diff(before: &ArgumentationFramework, after: &ArgumentationFramework) -> String {
    let mut parts = Vec::new();
    for a in after.arguments().difference(before.arguments()) {
        parts.push(format!("+{a}"));
    }
    for (a, b) in after.attacks().difference(before.attacks()) {
        parts.push(format!("+({a},{b})"));
    }
    for a in before.arguments().difference(after.arguments()) {
        parts.push(format!("-{a}"));
    }
    for (a, b) in before.attacks().difference(after.attacks()) {
        parts.push(format!("-({a},{b})"));
    }
    if parts.is_empty() {
        "(no change)".into()
    } else {
        parts.join(" ")
    }
}

pub fn choices(choices: &[ChoiceView]) -> String {
    let mut out = String::new();
    for c in choices {
        let _ = write!(out, "  [{}] {} at {}", c.index, c.rule, c.path);
        if !c.detail.is_empty() {
            let _ = write!(out, ": {}", c.detail);
        }
        out.push('\n');
    }
    out
}

/// One bar per argument; `#` where the argument is in the store.
pub fn timeline(rows: &[TimelineRow], end: u64) -> String {
    let width = rows.iter().map(|r| r.argument.as_str().len()).max().unwrap_or(0);
    let mut out = String::new();
    for row in rows {
        let mut bar = String::new();
        for t in 0..end.max(1) {
            let present = row
                .intervals
                .iter()
                .any(|&(enter, exit)| enter <= t && exit.is_none_or(|x| t < x));
            bar.push(if present { '#' } else { '.' });
        }
        let _ = writeln!(out, "{:>width$} |{bar}|", row.argument.as_str());
    }
    out
}

pub fn trace(trace: &Trace, rows: &[TimelineRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "initial store: {}", trace.initial);
    let mut before = &trace.initial;
    for (n, step) in trace.steps.iter().enumerate() {
        let _ = writeln!(out, "---- step {} (clock {}) ----", n + 1, step.clock);
        if step.choices > 1 {
            let _ = writeln!(out, "choice {} of {}", step.choice, step.choices);
        }
        for e in &step.events {
            let _ = writeln!(out, "  {e}");
        }
        let _ = writeln!(out, "  store: {}  [{}]", step.store, store_diff(before, &step.store));
        before = &step.store;
    }
    let _ = writeln!(out, "==== {} after {} steps ====", trace.terminal, trace.steps.len());
    let _ = writeln!(out, "final store: {}", trace.final_store());
    if !rows.is_empty() {
        out.push_str("timeline:\n");
        let end = trace.steps.last().map_or(1, |s| s.clock + 1);
        out.push_str(&timeline(rows, end));
    }
    out
}

pub fn observables(obs: &Observables) -> String {
    let mut out = String::new();
    let count = |it: &mut dyn Iterator<Item = _>| it.count();
    let _ = writeln!(
        out,
        "{} traces: {} ss, {} ff, {} bounded ({} nodes{})",
        obs.traces.len(),
        count(&mut obs.successful()),
        count(&mut obs.failed()),
        count(&mut obs.bounded()),
        obs.nodes,
        if obs.budget_exhausted { ", budget exhausted" } else { "" }
    );
    for t in &obs.traces {
        let stores: Vec<String> = t.stores.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}: {}", t.terminal, stores.join(" ; "));
    }
    out
}
