//! Turning a grammar AST into an engine grammar.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use super::ast::{literal_name, Definition, GrammarAst, PatternSpec, SymRef};
use super::parser::parse_symref;
use super::token::LexToken;
use super::validate::{validate, Diagnostic, Scope};
use crate::forest::PrecedenceTable;
use crate::grammar::{Action, Alternative, Grammar, GrammarError, Symbol, TokenPattern};
use crate::symbol::SymbolId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElaborateError {
    #[error("invalid grammar:{}", render_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("cannot resolve start symbol `{reference}`: {reason}")]
    UnresolvedStart { reference: String, reason: String },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

fn render_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| format!("\n  {d}")).collect()
}

/// Elaborates `ast` and returns the symbol named by `start`, a symbol
/// reference such as `CSV(alpha)` or `'a'`.
pub fn elaborate<T: LexToken>(
    ast: &GrammarAst,
    start: &str,
) -> Result<Symbol<T, ()>, ElaborateError> {
    let reference = parse_symref(start.trim()).map_err(|e| ElaborateError::UnresolvedStart {
        reference: start.to_owned(),
        reason: e.message,
    })?;
    elaborate_ref(ast, &reference)
}

pub fn elaborate_ref<T: LexToken>(
    ast: &GrammarAst,
    start: &SymRef,
) -> Result<Symbol<T, ()>, ElaborateError> {
    let diagnostics = validate(ast);
    if !diagnostics.is_empty() {
        return Err(ElaborateError::Invalid(diagnostics));
    }
    let scope = Scope::of(ast);
    let mut problems = Vec::new();
    scope.check(start, &[], &mut problems);
    if let Some(p) = problems.first() {
        return Err(ElaborateError::UnresolvedStart {
            reference: super::render::render_symref(start),
            reason: p.message.clone(),
        });
    }
    let mut extra = BTreeSet::new();
    collect_literals(start, &mut extra);
    let grammar = Arc::new(build(ast, scope.clone(), extra)?);
    let id = resolve(start, &[], &scope);
    Ok(Symbol::new(grammar, id)?)
}

/// The operator table declared by `%left`, `%right` and `%nonassoc` lines,
/// later lines binding tighter.
pub fn precedence_table(ast: &GrammarAst) -> PrecedenceTable {
    let mut table = PrecedenceTable::new();
    for decl in ast.precedence() {
        table.push_group(
            decl.assoc,
            decl.literals
                .iter()
                .map(|&c| SymbolId::token(&literal_name(c))),
        );
    }
    table
}

fn build<T: LexToken>(
    ast: &GrammarAst,
    scope: Scope,
    mut literals: BTreeSet<char>,
) -> Result<Grammar<T, ()>, ElaborateError> {
    let mut builder = Grammar::builder();
    for decl in ast.tokens() {
        let name = decl.name.clone();
        let pattern = decl.pattern.clone();
        builder.token(TokenPattern::new(decl.name.clone(), move |t: &T| {
            t.matches(Some(&name), &pattern).then_some(())
        }))?;
    }
    for def in ast.definitions() {
        def.alternates
            .iter()
            .flatten()
            .for_each(|r| collect_literals(r, &mut literals));
    }
    for decl in ast.precedence() {
        literals.extend(decl.literals.iter().copied());
    }
    for c in literals {
        let pattern = PatternSpec::Literal(c);
        builder.token(TokenPattern::new(literal_name(c), move |t: &T| {
            t.matches(None, &pattern).then_some(())
        }))?;
    }
    let scope = Arc::new(scope);
    for def in ast.definitions() {
        let def: Arc<Definition> = Arc::new(def.clone());
        let scope = Arc::clone(&scope);
        let action = Action::plain(|_: &[()]| ());
        builder.rule(&def.name.clone(), def.params.len(), move |args| {
            let env: Vec<(&str, SymbolId)> = def
                .params
                .iter()
                .map(String::as_str)
                .zip(args.iter().copied())
                .collect();
            def.alternates
                .iter()
                .map(|alt| {
                    Alternative::new(
                        alt.iter().map(|r| resolve(r, &env, &scope)).collect(),
                        action.clone(),
                    )
                })
                .collect()
        })?;
    }
    Ok(builder.build())
}

fn collect_literals(r: &SymRef, out: &mut BTreeSet<char>) {
    match r {
        SymRef::Literal(c, _) => {
            out.insert(*c);
        }
        SymRef::Name { args, .. } => args.iter().for_each(|a| collect_literals(a, out)),
    }
}

/// The id a validated reference denotes under the parameter bindings `env`.
fn resolve(r: &SymRef, env: &[(&str, SymbolId)], scope: &Scope) -> SymbolId {
    match r {
        SymRef::Literal(c, _) => SymbolId::token(&literal_name(*c)),
        SymRef::Name { name, args, .. } => {
            if let Some(&(_, id)) = env.iter().find(|(p, _)| p == name) {
                id
            } else if scope.tokens.contains(name) {
                SymbolId::token(name)
            } else {
                let args: Vec<SymbolId> = args.iter().map(|a| resolve(a, env, scope)).collect();
                SymbolId::applied(name, &args)
            }
        }
    }
}
