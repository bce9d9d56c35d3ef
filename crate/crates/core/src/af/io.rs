//! Interchange formats: JSON, the line-oriented apx convention and Graphviz DOT.

use std::fmt::Write as _;

use super::{AfError, ArgumentId, ArgumentationFramework, Label, Labelling};

pub fn to_json(af: &ArgumentationFramework) -> String {
    serde_json::to_string(af).expect("framework serializes")
}

pub fn from_json(text: &str) -> Result<ArgumentationFramework, AfError> {
    serde_json::from_str(text).map_err(|e| AfError::Syntax {
        line: e.line(),
        message: e.to_string(),
    })
}

/// Parses `arg(a).` / `att(a,b).` facts. `%` starts a comment. Attacks may
/// precede the declaration of their endpoints.
pub fn from_apx(text: &str) -> Result<ArgumentationFramework, AfError> {
    let mut arguments = Vec::new();
    let mut attacks = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('%').next().unwrap_or("").trim();
        for fact in content.split_terminator('.').map(str::trim).filter(|f| !f.is_empty()) {
            let syntax = |message: String| AfError::Syntax { line, message };
            let (head, rest) = fact
                .split_once('(')
                .ok_or_else(|| syntax(format!("expected `arg(..)` or `att(..)`, found {fact:?}")))?;
            let body = rest
                .strip_suffix(')')
                .ok_or_else(|| syntax(format!("missing `)` in {fact:?}")))?;
            let names: Vec<&str> = body.split(',').map(str::trim).collect();
            let ident = |s: &str| ArgumentId::new(s).map_err(|_| syntax(format!("invalid identifier {s:?}")));
            match (head.trim(), names.as_slice()) {
                ("arg", [a]) => arguments.push(ident(a)?),
                ("att", [a, b]) => attacks.push((ident(a)?, ident(b)?)),
                (other, _) => return Err(syntax(format!("unexpected fact {other}/{}", names.len()))),
            }
        }
    }
    ArgumentationFramework::from_parts(arguments, attacks)
}

pub fn to_apx(af: &ArgumentationFramework) -> String {
    let mut out = String::new();
    for a in af.arguments() {
        let _ = writeln!(out, "arg({a}).");
    }
    for (a, b) in af.attacks() {
        let _ = writeln!(out, "att({a},{b}).");
    }
    out
}

/// Reads either JSON (first non-blank character `{`) or apx.
pub fn parse_framework(text: &str) -> Result<ArgumentationFramework, AfError> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_apx(text)
    }
}

/// DOT graph of the framework. With a labelling, nodes are coloured
/// green/red/yellow for in/out/undec.
pub fn to_dot(af: &ArgumentationFramework, labelling: Option<&Labelling>) -> String {
    let mut out = String::from("digraph af {\n");
    for a in af.arguments() {
        let colour = labelling.and_then(|l| l.get(a)).map(|l| match l {
            Label::In => "green",
            Label::Out => "red",
            Label::Undec => "yellow",
        });
        match colour {
            Some(c) => {
                let _ = writeln!(out, "  \"{a}\" [style=filled, fillcolor={c}];");
            }
            None => {
                let _ = writeln!(out, "  \"{a}\";");
            }
        }
    }
    for (a, b) in af.attacks() {
        let _ = writeln!(out, "  \"{a}\" -> \"{b}\";");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::af::examples::figure1;

    #[test]
    fn json_shape() {
        let f = ArgumentationFramework::build(&["a", "b"], &[("a", "b")]);
        assert_eq!(to_json(&f), r#"{"arguments":["a","b"],"attacks":[["a","b"]]}"#);
        assert_eq!(from_json(&to_json(&figure1())).unwrap(), figure1());
    }

    #[test]
    fn json_rejects_dangling_attack() {
        assert!(from_json(r#"{"arguments":["a"],"attacks":[["a","b"]]}"#).is_err());
        assert!(from_json(r#"{"arguments":["a b"]}"#).is_err());
    }

    #[test]
    fn apx_round_trip() {
        let f = figure1();
        assert_eq!(from_apx(&to_apx(&f)).unwrap(), f);
        let text = "% comment\natt(a,b).\narg(a). arg(b).\n";
        assert_eq!(
            from_apx(text).unwrap(),
            ArgumentationFramework::build(&["a", "b"], &[("a", "b")])
        );
        assert!(matches!(from_apx("arg(a).\nfoo(b).\n"), Err(AfError::Syntax { line: 2, .. })));
    }

    #[test]
    fn dot_mentions_every_edge() {
        let dot = to_dot(&figure1(), None);
        assert_eq!(dot.matches("->").count(), figure1().attacks().len());
    }
}
