use std::sync::Arc;
use std::collections::{BTreeSet, HashSet};

use super::ast::{Agent, ArgSet, AttackSet, Clause, Guarded, Program, Term, Timeout};
use super::lexer::{tokenize, Spanned, Tok};
use super::Diagnostic;
use crate::af::{AcceptanceMode, ArgumentId, Label, Semantics};

/// Words that cannot name a procedure.
pub const KEYWORDS: &[&str] = &[
    "success", "failure", "add", "rmv", "check", "ctest", "stest", "sum", "gpar", "exists", "let",
    "in", "def",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject `sst` inside ctest/stest.
    pub strict: bool,
}

pub fn parse_program(text: &str) -> Result<Program, Vec<Diagnostic>> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, options: ParseOptions) -> Result<Program, Vec<Diagnostic>> {
    let toks = tokenize(text).map_err(|d| vec![d])?;
    let mut p = Parser {
        toks,
        pos: 0,
        formals: Vec::new(),
        options,
        calls: Vec::new(),
        decls: Vec::new(),
    };
    let program = p.program().map_err(|d| vec![d])?;
    let diagnostics = p.resolve(&program);
    if diagnostics.is_empty() {
        Ok(program)
    } else {
        Err(diagnostics)
    }
}

/// Parses a single agent (no trailing `;`, no declarations).
pub fn parse_agent(text: &str) -> Result<Agent, Vec<Diagnostic>> {
    let toks = tokenize(text).map_err(|d| vec![d])?;
    let mut p = Parser {
        toks,
        pos: 0,
        formals: Vec::new(),
        options: ParseOptions::default(),
        calls: Vec::new(),
        decls: Vec::new(),
    };
    let agent = p.agent().map_err(|d| vec![d])?;
    p.expect(Tok::Eof).map_err(|d| vec![d])?;
    Ok(agent)
}

struct CallSite {
    name: String,
    arity: usize,
    line: usize,
    column: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    formals: Vec<String>,
    options: ParseOptions,
    calls: Vec<CallSite>,
    decls: Vec<CallSite>,
}

type PResult<T> = Result<T, Diagnostic>;

fn is_reserved_formal(w: &str) -> bool {
    KEYWORDS.contains(&w)
        || w == "inf"
        || w.parse::<Label>().is_ok()
        || w.parse::<Semantics>().is_ok()
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>, expected: &[&str]) -> Diagnostic {
        let t = &self.toks[self.pos];
        Diagnostic {
            line: t.line,
            column: t.column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        self.error_here(format!("unexpected {}", self.peek().describe()), expected)
    }

    fn expect(&mut self, tok: Tok) -> PResult<Spanned> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            let want = tok.describe();
            Err(self.unexpected(&[want.as_str()]))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn word(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.unexpected(&[what])),
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn program(&mut self) -> PResult<Program> {
        let mut declarations = Vec::new();
        if self.is_word("let") {
            self.bump();
            while self.is_word("def") {
                declarations.push(self.clause()?);
            }
            if !self.is_word("in") {
                return Err(self.unexpected(&["`def`", "`in`"]));
            }
            self.bump();
        }
        let main = self.agent()?;
        self.expect(Tok::Semi)?;
        self.expect(Tok::Eof)?;
        Ok(Program { declarations, main })
    }

    fn clause(&mut self) -> PResult<Clause> {
        self.bump(); // def
        let at = self.toks[self.pos].clone();
        let name = self.word("procedure name")?;
        if KEYWORDS.contains(&name.as_str()) || name.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(Diagnostic {
                line: at.line,
                column: at.column,
                message: format!("`{name}` cannot name a procedure"),
                expected: vec!["procedure name".into()],
            });
        }
        self.expect(Tok::LParen)?;
        let mut params: Vec<String> = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let at = self.toks[self.pos].clone();
                let p = self.word("parameter name")?;
                let problem = if is_reserved_formal(&p) {
                    Some(format!("`{p}` is reserved and cannot be a parameter"))
                } else if params.contains(&p) {
                    Some(format!("duplicate parameter `{p}`"))
                } else {
                    None
                };
                if let Some(message) = problem {
                    return Err(Diagnostic {
                        line: at.line,
                        column: at.column,
                        message,
                        expected: vec![],
                    });
                }
                params.push(p);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Assign)?;
        self.formals = params.clone();
        let body = self.agent();
        self.formals.clear();
        let body = body?;
        self.expect(Tok::Semi)?;
        self.decls.push(CallSite {
            name: name.clone(),
            arity: params.len(),
            line: at.line,
            column: at.column,
        });
        Ok(Clause { name, params, body })
    }

    /// agent := seq ('||' seq)*
    fn agent(&mut self) -> PResult<Agent> {
        let mut left = self.seq()?;
        while self.eat(&Tok::Par) {
            let right = self.seq()?;
            left = Agent::parallel(left, right);
        }
        Ok(left)
    }

    fn continuation(&mut self) -> PResult<Agent> {
        if self.eat(&Tok::Arrow) {
            self.seq()
        } else {
            Ok(Agent::Success)
        }
    }

    fn seq(&mut self) -> PResult<Agent> {
        let expected = [
            "`success`", "`failure`", "`add`", "`rmv`", "`check`", "`ctest`", "`stest`", "`sum`",
            "`gpar`", "`exists`", "`(`", "procedure call",
        ];
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.agent()?;
                self.expect(Tok::RParen)?;
                if *self.peek() != Tok::PlusP {
                    return Ok(inner);
                }
                let mut left = self.require_guarded(inner)?;
                while self.eat(&Tok::PlusP) {
                    self.expect(Tok::LParen)?;
                    let right = self.guarded()?;
                    self.expect(Tok::RParen)?;
                    left = Guarded::if_then_else(left, right);
                }
                Ok(Agent::Guarded(left))
            }
            Tok::Word(w) => match w.as_str() {
                "success" => {
                    self.bump();
                    Ok(Agent::Success)
                }
                "failure" => {
                    self.bump();
                    Ok(Agent::Failure)
                }
                "add" | "rmv" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let arguments = self.arg_set()?;
                    self.expect(Tok::Comma)?;
                    let attacks = self.attack_set()?;
                    self.expect(Tok::RParen)?;
                    let then = self.continuation()?;
                    Ok(if w == "add" {
                        Agent::add(arguments, attacks, then)
                    } else {
                        Agent::rmv(arguments, attacks, then)
                    })
                }
                "check" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let timeout = self.timeout()?;
                    self.expect(Tok::Comma)?;
                    let arguments = self.arg_set()?;
                    self.expect(Tok::Comma)?;
                    let attacks = self.attack_set()?;
                    self.expect(Tok::RParen)?;
                    let then = Arc::new(self.continuation()?);
                    Ok(Agent::Guarded(Guarded::Check {
                        timeout,
                        arguments,
                        attacks,
                        then,
                    }))
                }
                "ctest" | "stest" => {
                    self.bump();
                    let mode = if w == "ctest" {
                        AcceptanceMode::Credulous
                    } else {
                        AcceptanceMode::Sceptical
                    };
                    self.expect(Tok::LParen)?;
                    let timeout = self.timeout()?;
                    self.expect(Tok::Comma)?;
                    self.expect(Tok::LBrace)?;
                    let argument = self.argument()?;
                    self.expect(Tok::RBrace)?;
                    self.expect(Tok::Comma)?;
                    let label = self.label()?;
                    self.expect(Tok::Comma)?;
                    let semantics = self.semantics()?;
                    self.expect(Tok::RParen)?;
                    let then = Arc::new(self.continuation()?);
                    Ok(Agent::Guarded(Guarded::Test {
                        mode,
                        timeout,
                        argument,
                        label,
                        semantics,
                        then,
                    }))
                }
                "sum" | "gpar" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let mut acc = self.guarded()?;
                    while self.eat(&Tok::Comma) {
                        let next = self.guarded()?;
                        acc = if w == "sum" {
                            Guarded::sum(acc, next)
                        } else {
                            Guarded::guarded_parallel(acc, next)
                        };
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Agent::Guarded(acc))
                }
                "exists" => {
                    self.bump();
                    let var = self.argument()?;
                    self.expect(Tok::Dot)?;
                    let body = self.seq()?;
                    Ok(Agent::Exists {
                        var,
                        body: Arc::new(body),
                    })
                }
                _ if !KEYWORDS.contains(&w.as_str())
                    && !w.starts_with(|c: char| c.is_ascii_digit())
                    && *self.peek_at(1) == Tok::LParen =>
                {
                    let at = self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.word("actual parameter")?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    self.calls.push(CallSite {
                        name: w.clone(),
                        arity: args.len(),
                        line: at.line,
                        column: at.column,
                    });
                    Ok(Agent::Call { name: w, args })
                }
                _ => Err(self.unexpected(&expected)),
            },
            _ => Err(self.unexpected(&expected)),
        }
    }

    fn guarded(&mut self) -> PResult<Guarded> {
        let agent = self.agent()?;
        self.require_guarded(agent)
    }

    fn require_guarded(&self, agent: Agent) -> PResult<Guarded> {
        match agent {
            Agent::Guarded(g) => Ok(g),
            _ => {
                let prev = &self.toks[self.pos.saturating_sub(1)];
                Err(Diagnostic {
                    line: prev.line,
                    column: prev.column,
                    message: "expected a guarded agent (check, ctest, stest, sum, gpar or +P)".into(),
                    expected: vec!["guarded agent".into()],
                })
            }
        }
    }

    fn argument(&mut self) -> PResult<ArgumentId> {
        let w = self.word("argument name")?;
        Ok(ArgumentId::new(&w).expect("lexer words are identifiers"))
    }

    fn arg_set(&mut self) -> PResult<ArgSet> {
        self.expect(Tok::LBrace)?;
        let mut set = BTreeSet::new();
        if *self.peek() != Tok::RBrace {
            loop {
                set.insert(self.argument()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(set)
    }

    fn attack_set(&mut self) -> PResult<AttackSet> {
        self.expect(Tok::LBrace)?;
        let mut set = BTreeSet::new();
        if *self.peek() != Tok::RBrace {
            loop {
                self.expect(Tok::LParen)?;
                let a = self.argument()?;
                self.expect(Tok::Comma)?;
                let b = self.argument()?;
                self.expect(Tok::RParen)?;
                set.insert((a, b));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(set)
    }

    fn param_or<T>(&mut self, w: String, what: &str, expected: &[&str]) -> PResult<Term<T>> {
        if self.formals.contains(&w) {
            self.bump();
            Ok(Term::Param(w))
        } else {
            Err(self.error_here(format!("`{w}` is not a valid {what}"), expected))
        }
    }

    fn timeout(&mut self) -> PResult<Term<Timeout>> {
        let expected = ["natural number", "`inf`", "parameter"];
        let Tok::Word(w) = self.peek().clone() else {
            return Err(self.unexpected(&expected));
        };
        if w == "inf" {
            self.bump();
            return Ok(Term::Value(Timeout::Infinite));
        }
        if w.bytes().all(|b| b.is_ascii_digit()) {
            return match w.parse::<u64>() {
                Ok(t) => {
                    self.bump();
                    Ok(Term::Value(Timeout::Finite(t)))
                }
                Err(_) => Err(self.error_here(format!("timeout {w} is too large"), &expected)),
            };
        }
        self.param_or(w, "timeout", &expected)
    }

    fn label(&mut self) -> PResult<Term<Label>> {
        let expected = ["`in`", "`out`", "`undec`", "parameter"];
        let Tok::Word(w) = self.peek().clone() else {
            return Err(self.unexpected(&expected));
        };
        match w.parse::<Label>() {
            Ok(l) => {
                self.bump();
                Ok(Term::Value(l))
            }
            Err(_) => self.param_or(w, "label", &expected),
        }
    }

    fn semantics(&mut self) -> PResult<Term<Semantics>> {
        let expected = ["`adm`", "`com`", "`stb`", "`sst`", "`prf`", "`gde`", "parameter"];
        let Tok::Word(w) = self.peek().clone() else {
            return Err(self.unexpected(&expected));
        };
        match w.parse::<Semantics>() {
            Ok(s) if s.is_test_semantics(self.options.strict) => {
                self.bump();
                Ok(Term::Value(s))
            }
            Ok(s) => Err(self.error_here(
                format!("semantics `{s}` cannot be used in an acceptance test"),
                &expected,
            )),
            Err(_) => self.param_or(w, "semantics", &expected),
        }
    }

    fn resolve(&self, program: &Program) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for d in &self.decls {
            if !seen.insert((d.name.as_str(), d.arity)) {
                out.push(Diagnostic {
                    line: d.line,
                    column: d.column,
                    message: format!("duplicate declaration of {}/{}", d.name, d.arity),
                    expected: vec![],
                });
            }
        }
        for call in &self.calls {
            if program.clause(&call.name, call.arity).is_none() {
                out.push(Diagnostic {
                    line: call.line,
                    column: call.column,
                    message: format!("call to undeclared procedure {}/{}", call.name, call.arity),
                    expected: vec![],
                });
            }
        }
        out
    }
}
