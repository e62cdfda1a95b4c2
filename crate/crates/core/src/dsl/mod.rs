//! A text format for grammars with parameterised nonterminals.
//!
//! ```text
//! %token alpha %alpha
//! %left '+'
//! CSV(v): CSV(v) ',' CSV(v) | v
//! Expr: Expr '+' Expr | 'a'
//! ```

mod ast;
mod elaborate;
mod parser;
mod render;
mod token;
mod validate;

pub use ast::{
    literal_name, CharClass, Definition, GrammarAst, Item, PatternSpec, Pos, PrecDecl, SetItem,
    SymRef, TokenDecl,
};
pub use elaborate::{elaborate, elaborate_ref, precedence_table, ElaborateError};
pub use parser::{parse_grammar, parse_symref, SyntaxError};
pub use render::{render, render_symref};
pub use token::{LexToken, TokenMode};
pub use validate::{validate, validate_reference, Diagnostic, DiagnosticKind};
