//! Static checks over a parsed grammar.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::ast::{GrammarAst, Item, Pos, SymRef};
use crate::symbol::START_NAME;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    UndefinedName,
    ArityMismatch,
    DuplicateDefinition,
    ReservedName,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
    pub pos: Pos,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.pos.line, self.pos.column, self.message
        )
    }
}

/// Global names of a grammar: declared tokens and rule arities.
#[derive(Debug, Default, Clone)]
pub(crate) struct Scope {
    pub tokens: HashSet<String>,
    pub rules: HashMap<String, usize>,
}

impl Scope {
    pub fn of(ast: &GrammarAst) -> Scope {
        let mut scope = Scope::default();
        for item in &ast.items {
            match item {
                Item::Token(t) => {
                    scope.tokens.insert(t.name.clone());
                }
                Item::Rule(d) => {
                    scope.rules.entry(d.name.clone()).or_insert(d.params.len());
                }
                Item::Precedence(_) => {}
            }
        }
        scope
    }

    /// Checks one reference under the formal parameters `params`.
    pub fn check(&self, r: &SymRef, params: &[String], out: &mut Vec<Diagnostic>) {
        let SymRef::Name { name, args, pos } = r else {
            return;
        };
        let arity = if params.contains(name) || self.tokens.contains(name) {
            Some(0)
        } else {
            self.rules.get(name).copied()
        };
        match arity {
            None => out.push(Diagnostic {
                kind: DiagnosticKind::UndefinedName,
                message: format!("`{name}` is not defined"),
                pos: *pos,
            }),
            Some(n) if n != args.len() => out.push(Diagnostic {
                kind: DiagnosticKind::ArityMismatch,
                message: format!("`{name}` takes {n} argument(s) but is given {}", args.len()),
                pos: *pos,
            }),
            Some(_) => {}
        }
        for arg in args {
            self.check(arg, params, out);
        }
    }
}

/// Returns one diagnostic per violated well-formedness rule; empty iff the
/// grammar can be elaborated.
pub fn validate(ast: &GrammarAst) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    let reserved = |name: &str, pos: Pos, out: &mut Vec<Diagnostic>| {
        if name == START_NAME {
            out.push(Diagnostic {
                kind: DiagnosticKind::ReservedName,
                message: format!("`{START_NAME}` is reserved"),
                pos,
            });
        }
    };
    for item in &ast.items {
        let (name, pos) = match item {
            Item::Token(t) => (t.name.as_str(), t.pos),
            Item::Rule(d) => (d.name.as_str(), d.pos),
            Item::Precedence(_) => continue,
        };
        reserved(name, pos, &mut out);
        if !seen.insert(name) {
            out.push(Diagnostic {
                kind: DiagnosticKind::DuplicateDefinition,
                message: format!("`{name}` is defined more than once"),
                pos,
            });
        }
    }
    let scope = Scope::of(ast);
    for def in ast.definitions() {
        let mut params = HashSet::new();
        for p in &def.params {
            reserved(p, def.pos, &mut out);
            if !params.insert(p) {
                out.push(Diagnostic {
                    kind: DiagnosticKind::DuplicateDefinition,
                    message: format!(
                        "parameter `{p}` of `{}` is declared more than once",
                        def.name
                    ),
                    pos: def.pos,
                });
            }
        }
        for r in def.alternates.iter().flatten() {
            scope.check(r, &def.params, &mut out);
        }
    }
    out
}

/// Checks a reference appearing outside any definition, such as a start
/// symbol.
pub fn validate_reference(ast: &GrammarAst, r: &SymRef, out: &mut Vec<Diagnostic>) {
    Scope::of(ast).check(r, &[], out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_grammar;

    fn kinds(text: &str) -> Vec<DiagnosticKind> {
        validate(&parse_grammar(text).unwrap())
            .into_iter()
            .map(|d| d.kind)
            .collect()
    }

    #[test]
    fn clean_grammar() {
        assert!(kinds("Within(l,r,x): l x r\nS: Within('(', ')', S) |").is_empty());
    }

    #[test]
    fn undefined_name() {
        assert_eq!(kinds("S: T"), vec![DiagnosticKind::UndefinedName]);
    }

    #[test]
    fn arity_mismatch() {
        assert_eq!(
            kinds("Within(l,r,x): l x r\nS: Within('(',')')"),
            vec![DiagnosticKind::ArityMismatch]
        );
        assert_eq!(kinds("P(x): x(x)"), vec![DiagnosticKind::ArityMismatch]);
    }

    #[test]
    fn duplicates_and_reserved() {
        assert_eq!(
            kinds("A: 'a'\nA: 'b'"),
            vec![DiagnosticKind::DuplicateDefinition]
        );
        assert_eq!(
            kinds("%token A 'a'\nA: 'b'"),
            vec![DiagnosticKind::DuplicateDefinition]
        );
        assert_eq!(
            kinds("P(x, x): x"),
            vec![DiagnosticKind::DuplicateDefinition]
        );
        assert_eq!(kinds("__START: 'a'"), vec![DiagnosticKind::ReservedName]);
    }
}
