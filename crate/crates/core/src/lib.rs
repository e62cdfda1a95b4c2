//! FUN-GLL parsing with parameterised nonterminals.
//!
//! ```
//! use fungll::dsl::{elaborate, parse_grammar};
//! use fungll::{parse, Forest, ParseOptions};
//!
//! let ast = parse_grammar("Expr: Expr '+' Expr | 'a'").unwrap();
//! let expr = elaborate::<char>(&ast, "Expr").unwrap();
//! let p = parse(&expr, "a+a+a".chars().collect(), &ParseOptions::default()).unwrap();
//! assert!(p.accepted());
//! assert_eq!(Forest::new(&p).count().value, 2);
//! ```

pub mod dsl;
pub mod engine;
pub mod forest;
pub mod grammar;
pub mod oracle;
pub mod state;
pub mod symbol;

pub use engine::{
    parse, run_prefix, run_recognize, Parse, ParseError, ParseOptions, Schedule, DEFAULT_FUEL,
};
pub use forest::{Count, DerivationTree, ErrorReport, Forest, VisitedSet};
pub use grammar::{
    Action, Alternative, Grammar, GrammarBuilder, GrammarError, Instance, Symbol, TokenPattern,
};
pub use state::{BsrSet, Continuation, ParseState, Stats};
pub use symbol::{
    Alternate, BsrElement, Commencement, ContinuationId, Descriptor, Slot, SymbolId, SymbolView,
};
