//! Concrete syntax of tcla programs: AST, parser, canonical printer and
//! parameter substitution.

mod ast;
mod lexer;
mod parser;
mod printer;
mod subst;

use serde::Serialize;
use thiserror::Error;

pub use ast::{
    Agent, ArgSet, AttackSet, Clause, Guarded, LabelTerm, Program, SemanticsTerm, Term, Timeout,
    TimeoutTerm,
};
pub use parser::{parse_agent, parse_program, parse_program_with, ParseOptions, KEYWORDS};
pub use printer::pretty_print;
pub(crate) use printer::{write_arg_set, write_attack_set};
pub use subst::{instantiate, substitute};

/// A located parse or resolution error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[error("{line}:{column}: {message}")]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("`{actual}` cannot be used as a {position}")]
    IllTyped { position: &'static str, actual: String },
    #[error("procedure {name} expects {expected} parameters, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

/// Whether every outermost guard of `g` has timeout 0.
pub fn is_guard_expired(g: &Guarded) -> bool {
    g.is_expired()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::af::{arg, AcceptanceMode, Label, Semantics};

    use crate::presets::TABLE4;

    fn set(names: &[&str]) -> ArgSet {
        names.iter().map(|n| arg(n)).collect()
    }

    #[test]
    fn three_additions_in_parallel() {
        let p = parse_program("add({a},{}) -> success || add({b},{}) -> success || add({c},{}) -> success;").unwrap();
        let leaf = |n: &str| Agent::add(set(&[n]), AttackSet::new(), Agent::Success);
        assert_eq!(
            p.main,
            Agent::parallel(Agent::parallel(leaf("a"), leaf("b")), leaf("c"))
        );
    }

    #[test]
    fn bare_success() {
        let p = parse_program("success;").unwrap();
        assert!(p.declarations.is_empty());
        assert_eq!(p.main, Agent::Success);
    }

    #[test]
    fn table4_shape() {
        let p = parse_program(TABLE4).unwrap();
        let Agent::Parallel(left, third) = &p.main else { panic!("expected ||") };
        let Agent::Parallel(first, _second) = &**left else { panic!("expected ||") };
        assert!(matches!(**third, Agent::Guarded(Guarded::GuardedParallel(..))));
        let Agent::Add { then, .. } = &**first else { panic!("expected add") };
        let Agent::Guarded(Guarded::GuardedParallel(l, r)) = &**then else { panic!("expected gpar") };
        assert!(matches!(**l, Guarded::Check { .. }));
        assert!(matches!(**r, Guarded::Check { .. }));
    }

    #[test]
    fn table4_print_is_fixed_point() {
        let p = parse_program(TABLE4).unwrap();
        let printed = pretty_print(&p);
        let again = parse_program(&printed).unwrap();
        assert_eq!(again, p);
        assert_eq!(pretty_print(&again), printed);
    }

    #[test]
    fn nary_forms_desugar_left() {
        let g = |x: &str| format!("check(1,{{{x}}},{{}}) -> success");
        let text = format!("sum({}, {}, {});", g("a"), g("b"), g("c"));
        let p = parse_program(&text).unwrap();
        let Agent::Guarded(Guarded::Sum(l, _)) = p.main else { panic!() };
        assert!(matches!(*l, Guarded::Sum(..)));
        let text = format!("gpar({}, {}, {});", g("a"), g("b"), g("c"));
        let Agent::Guarded(Guarded::GuardedParallel(l, _)) = parse_program(&text).unwrap().main else {
            panic!()
        };
        assert!(matches!(*l, Guarded::GuardedParallel(..)));
        let text = format!("({})+P({})+P({});", g("a"), g("b"), g("c"));
        let Agent::Guarded(Guarded::IfThenElse(l, _)) = parse_program(&text).unwrap().main else {
            panic!()
        };
        assert!(matches!(*l, Guarded::IfThenElse(..)));
    }

    #[test]
    fn sum_prints_surface_form() {
        let p = parse_program("sum(check(1,{a},{}) -> success, check(2,{b},{}) -> failure);").unwrap();
        assert_eq!(
            pretty_print(&p),
            "sum(check(1,{a},{}) -> success, check(2,{b},{}) -> failure);\n"
        );
    }

    #[test]
    fn declarations_and_tests() {
        let text = "let
            def w(x, t, l, s) := ctest(t,{x},l,s) -> add({x},{}) -> success;
            def loop() := (check(inf,{a},{}) -> success)+P(check(0,{},{}) -> loop());
          in w(a, 3, in, gde) || loop() || stest(2,{b},undec,sst) -> success;";
        let p = parse_program(text).unwrap();
        assert_eq!(p.declarations.len(), 2);
        let body = &p.declarations[0].body;
        let Agent::Guarded(Guarded::Test { mode, timeout, label, semantics, .. }) = body else {
            panic!()
        };
        assert_eq!(*mode, AcceptanceMode::Credulous);
        assert_eq!(*timeout, Term::Param("t".into()));
        assert_eq!(*label, Term::Param("l".into()));
        assert_eq!(*semantics, Term::Param("s".into()));
        assert_eq!(parse_program(&pretty_print(&p)).unwrap(), p);
    }

    #[test]
    fn diagnostics_have_positions() {
        let errs = parse_program("add({a},{})\n -> chek;").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!((errs[0].line, errs[0].column), (2, 5));
        assert!(!errs[0].expected.is_empty() || errs[0].message.contains("undeclared"));

        let errs = parse_program("add({a},{}) -> success").unwrap_err();
        assert_eq!(errs[0].expected, vec!["`;`".to_string()]);
        let errs = parse_program("check(x,{a},{}) -> success;").unwrap_err();
        assert!(errs[0].message.contains("timeout"));
    }

    #[test]
    fn unresolved_and_duplicate_declarations() {
        let errs = parse_program("p(a);").unwrap_err();
        assert!(errs[0].message.contains("undeclared procedure p/1"));
        let errs = parse_program("let def p(x) := success; def p(y) := failure; in p(a);").unwrap_err();
        assert!(errs[0].message.contains("duplicate declaration"));
        // Same name with different arity is fine.
        assert!(parse_program("let def p(x) := success; def p() := failure; in p(a) || p();").is_ok());
        let errs = parse_program("let def p(x, x) := success; in p(a,b);").unwrap_err();
        assert!(errs[0].message.contains("duplicate parameter"));
    }

    #[test]
    fn test_semantics_restrictions() {
        assert!(parse_program("ctest(1,{a},in,cf) -> success;").is_err());
        assert!(parse_program("ctest(1,{a},in,sst) -> success;").is_ok());
        assert!(parse_program_with("ctest(1,{a},in,sst) -> success;", ParseOptions { strict: true }).is_err());
    }

    #[test]
    fn prefix_without_arrow_defaults_to_success() {
        let p = parse_program("add({a},{});").unwrap();
        assert_eq!(p.main, Agent::add(set(&["a"]), AttackSet::new(), Agent::Success));
    }

    #[test]
    fn substitution_replaces_argument_positions() {
        let body = parse_agent("check(1,{x},{}) -> add({x},{(x,y)})").unwrap();
        let out = substitute(&body, "x", "a").unwrap();
        assert_eq!(out, parse_agent("check(1,{a},{}) -> add({a},{(a,y)})").unwrap());
    }

    #[test]
    fn substitution_respects_shadowing_and_capture() {
        let body = parse_agent("exists x . add({x,y},{})").unwrap();
        assert_eq!(substitute(&body, "x", "a").unwrap(), body);
        // y := x must not be captured by the binder.
        let out = substitute(&body, "y", "x").unwrap();
        let Agent::Exists { var, body } = out else { panic!() };
        assert!(var.is_reserved());
        let Agent::Add { ref arguments, .. } = *body else { panic!() };
        assert!(arguments.contains(&arg("x")));
        assert!(arguments.contains(&var));
    }

    #[test]
    fn instantiation_is_typed() {
        let p = parse_program("let def w(t, l, s) := ctest(t,{a},l,s) -> success; in w(2, out, prf);").unwrap();
        let clause = &p.declarations[0];
        let ok = instantiate(clause, &["2".into(), "out".into(), "prf".into()]).unwrap();
        let Agent::Guarded(Guarded::Test { timeout, label, semantics, .. }) = ok else { panic!() };
        assert_eq!(timeout, Term::Value(Timeout::Finite(2)));
        assert_eq!(label, Term::Value(Label::Out));
        assert_eq!(semantics, Term::Value(Semantics::Prf));
        assert!(matches!(
            instantiate(clause, &["x".into(), "out".into(), "prf".into()]),
            Err(SubstError::IllTyped { position: "timeout", .. })
        ));
        assert!(matches!(
            instantiate(clause, &["1".into(), "maybe".into(), "prf".into()]),
            Err(SubstError::IllTyped { position: "label", .. })
        ));
        assert!(matches!(
            instantiate(clause, &["1".into(), "in".into(), "cf".into()]),
            Err(SubstError::IllTyped { position: "semantics", .. })
        ));
        assert!(matches!(instantiate(clause, &[]), Err(SubstError::Arity { .. })));
    }
}
