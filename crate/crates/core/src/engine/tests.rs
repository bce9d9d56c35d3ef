use super::*;
use crate::af::{arg, examples::figure1, ArgumentationFramework};
use crate::syntax::{parse_agent, parse_program, Agent, Program};

fn prog(text: &str) -> Program {
    parse_program(text).unwrap_or_else(|e| panic!("{text}: {e:?}"))
}

fn af(args: &[&str], attacks: &[(&str, &str)]) -> ArgumentationFramework {
    ArgumentationFramework::build(args, attacks)
}

fn agent(text: &str) -> Agent {
    parse_agent(text).unwrap()
}

fn omegas(text: &str, store: &ArgumentationFramework) -> Vec<Transition> {
    omega_transitions(&agent(text), store, 0, &Program::new(Agent::Success)).unwrap()
}

const EXAMPLE6: &str = "add({a},{}) -> success || add({b},{}) -> success || add({c},{}) -> success;";

#[test]
fn add_on_empty_store() {
    let ts = derive(&agent("add({a},{}) -> success"), &af(&[], &[]), 0, &Program::new(Agent::Success)).unwrap();
    assert_eq!(ts.len(), 1);
    assert_eq!(ts[0].label, TransitionLabel::Omega);
    assert_eq!(ts[0].agent, Agent::Success);
    assert_eq!(ts[0].store, af(&["a"], &[]));
}

#[test]
fn add_drops_attacks_with_missing_endpoints() {
    let ts = omegas("add({b},{(b,a)}) -> success", &af(&[], &[]));
    assert_eq!(ts[0].store, af(&["b"], &[]));
    let ts = omegas("add({b},{(b,a)}) -> success", &af(&["a"], &[]));
    assert_eq!(ts[0].store, af(&["a", "b"], &[("b", "a")]));
}

#[test]
fn rmv_removes_incident_attacks() {
    let ts = omegas("rmv({a},{}) -> success", &figure1());
    let mut expected = figure1();
    expected.remove_argument(&arg("a"));
    assert_eq!(ts[0].store, expected);
    assert!(ts[0].store.contains_attack(&(arg("c"), arg("d"))));
    // Removing absent items has no effect.
    let ts = omegas("rmv({z},{(a,c)}) -> success", &figure1());
    assert_eq!(ts[0].store, figure1());
}

#[test]
fn expired_guards_fail_in_one_step() {
    for g in [
        "check(0,{a},{}) -> success",
        "ctest(0,{a},in,com) -> success",
        "stest(0,{a},in,com) -> success",
    ] {
        let all = derive(&agent(g), &figure1(), 0, &Program::new(Agent::Success)).unwrap();
        assert_eq!(all.len(), 1, "{g}");
        assert_eq!(all[0].label, TransitionLabel::Omega);
        assert_eq!(all[0].agent, Agent::Failure);
        assert_eq!(all[0].store, figure1());
        assert!(all[0].omega_event().unwrap().rule.is_expiry());
    }
}

#[test]
fn check_rules() {
    let store = af(&["a"], &[]);
    let all = derive(&agent("check(2,{a},{}) -> add({b},{})"), &store, 0, &Program::new(Agent::Success)).unwrap();
    let rules: Vec<String> = all.iter().map(|t| t.events[0].rule.to_string()).collect();
    assert_eq!(rules, ["Chk(1)", "Chk(3)"]);
    let all = derive(&agent("check(2,{z},{}) -> success"), &store, 0, &Program::new(Agent::Success)).unwrap();
    assert_eq!(all[0].events[0].rule, Rule::Chk(2));
    assert_eq!(all[0].agent, agent("check(1,{z},{}) -> success"));
    // τ never touches the store.
    assert!(all.iter().filter(|t| t.label == TransitionLabel::Tau).all(|t| t.store == store));
}

#[test]
fn tests_follow_acceptance() {
    let f = figure1();
    let t = omegas("ctest(3,{c},in,com) -> success", &f);
    assert_eq!(t[0].omega_event().unwrap().rule, Rule::CrT(1));
    let t = omegas("stest(3,{c},in,com) -> success", &f);
    assert_eq!(t[0].omega_event().unwrap().rule, Rule::ScT(2));
    let t = omegas("stest(3,{a},in,gde) -> success", &f);
    assert_eq!(t[0].omega_event().unwrap().rule, Rule::ScT(1));
    // An argument outside the store satisfies no test.
    let t = omegas("ctest(3,{zz},undec,com) -> success", &f);
    assert_eq!(t[0].omega_event().unwrap().rule, Rule::CrT(2));
}

#[test]
fn parallel_combines_omega_with_tau() {
    let ts = omegas("add({a},{}) -> success || check(2,{z},{}) -> success", &af(&[], &[]));
    assert_eq!(ts.len(), 2);
    assert_eq!(ts[0].store, af(&["a"], &[]));
    assert_eq!(ts[0].agent, agent("check(1,{z},{}) -> success"));
    assert!(ts[0].events.iter().any(|e| e.rule == Rule::Par(1)));
    // The failing check may take the processor instead; add has no τ.
    assert_eq!(ts[1].omega_event().unwrap().rule, Rule::Chk(2));
    assert!(ts[1].events.iter().any(|e| e.rule == Rule::Par(2)));
}

#[test]
fn expired_component_waits_until_alone() {
    // check(0) has no τ-move, so the add proceeds alone via Par(2).
    let ts = omegas("check(0,{z},{}) -> success || add({a},{}) -> success", &af(&[], &[]));
    assert_eq!(ts.len(), 2);
    assert!(ts.iter().any(|t| t.agent == Agent::Failure));
    assert!(ts.iter().any(|t| t.store == af(&["a"], &[])));
}

#[test]
fn lone_check_expires() {
    let p = prog("check(1,{a},{}) -> success;");
    let cfg = Configuration::new(p.main.clone(), af(&[], &[]));
    let s1 = step_with_choice(&cfg, &p, 0).unwrap().unwrap();
    assert_eq!(s1.label, TransitionLabel::Omega);
    assert_eq!(s1.next.agent, agent("check(0,{a},{}) -> success"));
    let s2 = step_with_choice(&s1.next, &p, 0).unwrap().unwrap();
    assert_eq!(s2.next.agent, Agent::Failure);
    assert_eq!(s2.next.clock, 2);
    assert!(step_with_choice(&s2.next, &p, 0).unwrap().is_none());
}

#[test]
fn sum_rules() {
    let e = af(&[], &[]);
    let ts = omegas("sum(check(3,{a},{}) -> add({x},{}), check(3,{},{}) -> add({y},{}))", &e);
    let rules: Vec<Rule> = ts.iter().flat_map(|t| t.events.iter().map(|e| e.rule)).collect();
    assert!(rules.contains(&Rule::NDt(1)));
    assert!(rules.contains(&Rule::NDt(3)));
    let commit = ts.iter().find(|t| t.events.iter().any(|e| e.rule == Rule::NDt(1))).unwrap();
    assert_eq!(commit.agent, agent("add({y},{})"));
    let persist = ts.iter().find(|t| t.events.iter().any(|e| e.rule == Rule::NDt(3))).unwrap();
    assert_eq!(
        persist.agent,
        agent("sum(check(2,{a},{}) -> add({x},{}), check(2,{},{}) -> add({y},{}))")
    );
    // An expired branch is discarded.
    let ts = omegas("sum(check(0,{a},{}) -> success, check(2,{},{}) -> add({y},{}))", &e);
    assert_eq!(ts.len(), 1);
    assert_eq!(ts[0].agent, agent("add({y},{})"));
}

#[test]
fn both_branches_expired_fail() {
    let p = prog("sum(check(0,{a},{}) -> success, check(0,{b},{}) -> success);");
    let obs = observables(&p, &af(&[], &[]), 10, DEFAULT_NODE_BUDGET).unwrap();
    assert!(!obs.traces.is_empty());
    assert!(obs.traces.iter().all(|t| t.terminal == Terminal::Failure));
}

#[test]
fn if_then_else_prefers_left() {
    let p = prog("(check(2,{a},{}) -> add({x},{}))+P(check(2,{},{}) -> add({y},{}));");
    let obs = observables(&p, &af(&[], &[]), 20, DEFAULT_NODE_BUDGET).unwrap();
    let finals: Vec<_> = obs.successful().map(|t| t.stores.last().unwrap().clone()).collect();
    assert_eq!(finals, vec![af(&["y"], &[])]);
    // Left satisfied: right is never chosen.
    let obs = observables(&p, &af(&["a"], &[]), 20, DEFAULT_NODE_BUDGET).unwrap();
    let finals: Vec<_> = obs.successful().map(|t| t.stores.last().unwrap().clone()).collect();
    assert_eq!(finals, vec![af(&["a", "x"], &[])]);
}

#[test]
fn ite_keeps_right_branch_untouched() {
    let ts = omegas("(check(2,{a},{}) -> success)+P(check(5,{},{}) -> success)", &af(&[], &[]));
    assert_eq!(ts.len(), 1);
    assert_eq!(ts[0].agent, agent("(check(1,{a},{}) -> success)+P(check(5,{},{}) -> success)"));
}

#[test]
fn guarded_parallel_runs_every_enabled_branch() {
    let p = prog("gpar(check(3,{},{}) -> add({x},{}), check(3,{},{}) -> add({y},{}));");
    let obs = observables(&p, &af(&[], &[]), 20, DEFAULT_NODE_BUDGET).unwrap();
    assert!(obs.successful().count() > 0);
    assert!(obs.successful().all(|t| t.stores.last().unwrap() == &af(&["x", "y"], &[])));
    let p = prog("gpar(check(0,{a},{}) -> add({x},{}), check(3,{},{}) -> add({y},{}));");
    let obs = observables(&p, &af(&[], &[]), 20, DEFAULT_NODE_BUDGET).unwrap();
    assert!(obs.traces.iter().all(|t| t.terminal == Terminal::Success));
    assert!(obs.successful().all(|t| t.stores.last().unwrap() == &af(&["y"], &[])));
}

#[test]
fn hidden_variables_are_fresh() {
    let p = prog("exists x . add({x},{}) -> success || exists x . add({x},{}) -> success;");
    let trace = run(&p, &af(&[], &[]), SchedulingPolicy::Scripted { choices: vec![] }, 10).unwrap();
    assert_eq!(trace.terminal, Terminal::Success);
    let names: Vec<&str> = trace.final_store().arguments().iter().map(|a| a.as_str()).collect();
    assert_eq!(names.len(), 2);
    assert!(names.iter().all(|n| n.starts_with("#v")));
}

#[test]
fn procedure_calls_take_a_step() {
    let p = prog("let def p(x, t) := check(t,{},{}) -> add({x},{}); in p(q, 2);");
    let trace = run(&p, &af(&[], &[]), SchedulingPolicy::default(), 10).unwrap();
    assert_eq!(trace.terminal, Terminal::Success);
    assert_eq!(trace.steps.len(), 3);
    assert_eq!(trace.steps[0].events[0].rule, Rule::PrC);
    assert_eq!(trace.final_store(), &af(&["q"], &[]));
}

#[test]
fn undeclared_call_is_an_execution_error() {
    let p = Program::new(Agent::call("nope", vec![]));
    let err = run(&p, &af(&[], &[]), SchedulingPolicy::default(), 10).unwrap_err();
    assert!(matches!(err, ExecError::UndeclaredProcedure { .. }));
}

#[test]
fn ill_typed_actual_is_reported_at_call_time() {
    let p = prog("let def p(t) := check(t,{},{}) -> success; in p(abc);");
    let err = run(&p, &af(&[], &[]), SchedulingPolicy::default(), 10).unwrap_err();
    assert!(matches!(err, ExecError::Substitution(_)));
}

#[test]
fn infinite_timeout_waits() {
    let p = prog("check(inf,{a},{}) -> add({b},{}) || check(5,{},{}) -> add({a},{});");
    let obs = observables(&p, &af(&[], &[]), 12, DEFAULT_NODE_BUDGET).unwrap();
    assert!(obs.successful().all(|t| t.stores.last().unwrap() == &af(&["a", "b"], &[])));
    assert!(obs.successful().count() > 0);
}

#[test]
fn example6_seeded_step_adds_one_argument() {
    let p = prog(EXAMPLE6);
    for seed in 0..10 {
        let mut sched = Scheduler::new(SchedulingPolicy::SeededRandom { seed }).unwrap();
        let cfg = Configuration::new(p.main.clone(), af(&[], &[]));
        let out = step(&cfg, &p, &mut sched).unwrap().unwrap();
        assert_eq!(out.choices, 3);
        assert_eq!(out.next.store.len(), 1);
        assert_eq!(out.next.clock, 1);
    }
}

#[test]
fn example6_observables() {
    let p = prog(EXAMPLE6);
    let obs = observables(&p, &af(&[], &[]), 20, DEFAULT_NODE_BUDGET).unwrap();
    assert_eq!(obs.traces.len(), 6);
    for t in &obs.traces {
        assert_eq!(t.terminal, Terminal::Success);
        assert_eq!(t.stores.len(), 4);
        assert_eq!(t.stores.last().unwrap(), &af(&["a", "b", "c"], &[]));
    }
}

#[test]
fn trivial_observables() {
    let p = prog("add({a},{}) -> success;");
    let obs = observables(&p, &af(&[], &[]), 5, DEFAULT_NODE_BUDGET).unwrap();
    let expected = ObservedTrace {
        stores: vec![af(&[], &[]), af(&["a"], &[])],
        terminal: Terminal::Success,
    };
    assert_eq!(obs.traces.into_iter().collect::<Vec<_>>(), vec![expected]);
    let p = prog("failure;");
    let t = run(&p, &af(&[], &[]), SchedulingPolicy::default(), 5).unwrap();
    assert_eq!(t.terminal, Terminal::Failure);
    assert!(t.steps.is_empty());
}

#[test]
fn bound_and_budget() {
    let p = prog("let def loop() := check(1,{},{}) -> loop(); in loop();");
    let obs = observables(&p, &af(&[], &[]), 7, DEFAULT_NODE_BUDGET).unwrap();
    assert!(obs.traces.iter().all(|t| t.terminal == Terminal::Bounded));
    let obs = observables(&p, &af(&[], &[]), 50, 3).unwrap();
    assert!(obs.budget_exhausted);
    let t = run(&p, &af(&[], &[]), SchedulingPolicy::default(), 9).unwrap();
    assert_eq!(t.terminal, Terminal::Bounded);
    assert_eq!(t.steps.len(), 9);
}

#[test]
fn scripted_runs_are_reproducible() {
    let p = prog(EXAMPLE6);
    let script = SchedulingPolicy::Scripted { choices: vec![2, 1, 0] };
    let a = run(&p, &af(&[], &[]), script.clone(), 10).unwrap();
    let b = run(&p, &af(&[], &[]), script, 10).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.steps[0].store, af(&["c"], &[]));
    let bad = run(&p, &af(&[], &[]), SchedulingPolicy::Scripted { choices: vec![7] }, 10);
    assert!(matches!(bad, Err(ExecError::InvalidChoice { index: 7, available: 3 })));
    assert!(Scheduler::new(SchedulingPolicy::Exhaustive { bound: 3 }).is_err());
}

#[test]
fn timeline_intervals() {
    let p = prog("add({a},{}) -> check(5,{},{}) -> rmv({a},{}) -> success;");
    let t = run(&p, &af(&[], &[]), SchedulingPolicy::default(), 10).unwrap();
    let rows = timeline(&t);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].intervals, vec![(1, Some(3))]);
    assert_eq!(
        serde_json::to_string(&rows).unwrap(),
        r#"[{"argument":"a","intervals":[[1,3]]}]"#
    );
    let empty = Trace {
        initial: af(&[], &[]),
        steps: vec![],
        terminal: Terminal::Success,
    };
    assert!(timeline(&empty).is_empty());
    let p = prog("add({a},{}) -> rmv({a},{}) -> add({a},{}) -> success;");
    let t = run(&p, &af(&[], &[]), SchedulingPolicy::default(), 10).unwrap();
    assert_eq!(timeline(&t)[0].intervals, vec![(1, Some(2)), (3, None)]);
}

#[test]
fn trace_json_shape() {
    let p = prog("add({a},{}) -> success;");
    let t = run(&p, &af(&[], &[]), SchedulingPolicy::default(), 10).unwrap();
    let v = serde_json::to_value(&t).unwrap();
    assert_eq!(v["terminal"], "ss");
    assert_eq!(v["steps"][0]["clock"], 1);
    assert_eq!(v["steps"][0]["label"], "omega");
    assert_eq!(v["steps"][0]["store"]["arguments"][0], "a");
    assert_eq!(v["steps"][0]["events"][0]["rule"], "Add");
    assert_eq!(v["initial"]["arguments"].as_array().unwrap().len(), 0);
}
