//! A naive continuation-passing recogniser, independent of the engine.
//!
//! Each recogniser takes the input, a position and a continuation over end
//! positions, and succeeds iff some continuation call does. Alternation is
//! disjunction and sequencing is continuation chaining. There is no
//! memoisation, so left-recursive grammars diverge; the optional depth limit
//! turns divergence into [`OracleError::DepthExceeded`].

use std::cell::Cell;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::dsl::{parse_symref, validate, Definition, GrammarAst, LexToken, PatternSpec, SymRef};
use crate::grammar::TokenPattern;

pub type Recognizer<T> = Rc<dyn Fn(&[T], usize, &dyn Fn(usize) -> bool) -> bool>;

pub fn naive_token<T: 'static>(accepts: impl Fn(&T) -> bool + 'static) -> Recognizer<T> {
    Rc::new(move |input: &[T], k: usize, c: &dyn Fn(usize) -> bool| {
        k < input.len() && accepts(&input[k]) && c(k + 1)
    })
}

pub fn naive_pattern<T: 'static, V: 'static>(pattern: TokenPattern<T, V>) -> Recognizer<T> {
    naive_token(move |t| pattern.accepts(t))
}

pub fn epsilon<T: 'static>() -> Recognizer<T> {
    Rc::new(|_: &[T], k: usize, c: &dyn Fn(usize) -> bool| c(k))
}

pub fn seq<T: 'static>(parts: Vec<Recognizer<T>>) -> Recognizer<T> {
    let parts: Rc<[Recognizer<T>]> = parts.into();
    Rc::new(move |input: &[T], k: usize, c: &dyn Fn(usize) -> bool| chain(&parts, input, k, c))
}

fn chain<T>(parts: &[Recognizer<T>], input: &[T], k: usize, c: &dyn Fn(usize) -> bool) -> bool {
    match parts.split_first() {
        None => c(k),
        Some((first, rest)) => first(input, k, &|j| chain(rest, input, j, c)),
    }
}

pub fn alt<T: 'static>(alternates: Vec<Recognizer<T>>) -> Recognizer<T> {
    Rc::new(move |input: &[T], k: usize, c: &dyn Fn(usize) -> bool| {
        alternates.iter().any(|a| a(input, k, c))
    })
}

/// Whether `r` derives the whole input.
pub fn naive_run<T>(r: &Recognizer<T>, input: &[T]) -> bool {
    r(input, 0, &|k| k == input.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grammar is invalid: {0}")]
    Invalid(String),
    #[error("cannot resolve start symbol `{0}`")]
    UnresolvedStart(String),
    #[error("recursion deeper than {0} nonterminal calls; the grammar is probably left-recursive")]
    DepthExceeded(usize),
}

struct Inner<T> {
    ast: GrammarAst,
    tokens: HashMap<String, PatternSpec>,
    max_depth: Option<usize>,
    depth: Cell<usize>,
    exceeded: Cell<bool>,
    _token: std::marker::PhantomData<T>,
}

/// Recognisers built structurally from a grammar AST, one call per
/// nonterminal reference.
pub struct NaiveGrammar<T> {
    inner: Rc<Inner<T>>,
}

type Env<T> = Rc<HashMap<String, Recognizer<T>>>;

impl<T: LexToken> NaiveGrammar<T> {
    pub fn new(ast: &GrammarAst) -> Result<Self, OracleError> {
        Self::build(ast, None)
    }

    /// Like [`NaiveGrammar::new`] but failing once nonterminal calls nest
    /// deeper than `max_depth`.
    pub fn with_depth_limit(ast: &GrammarAst, max_depth: usize) -> Result<Self, OracleError> {
        Self::build(ast, Some(max_depth))
    }

    fn build(ast: &GrammarAst, max_depth: Option<usize>) -> Result<Self, OracleError> {
        let problems = validate(ast);
        if let Some(p) = problems.first() {
            return Err(OracleError::Invalid(p.to_string()));
        }
        let tokens = ast
            .tokens()
            .map(|t| (t.name.clone(), t.pattern.clone()))
            .collect();
        Ok(NaiveGrammar {
            inner: Rc::new(Inner {
                ast: ast.clone(),
                tokens,
                max_depth,
                depth: Cell::new(0),
                exceeded: Cell::new(false),
                _token: std::marker::PhantomData,
            }),
        })
    }

    /// The recogniser for a reference resolved at top level.
    pub fn recognizer(&self, start: &SymRef) -> Result<Recognizer<T>, OracleError> {
        let mut problems = Vec::new();
        crate::dsl::validate_reference(&self.inner.ast, start, &mut problems);
        if !problems.is_empty() {
            return Err(OracleError::UnresolvedStart(crate::dsl::render_symref(
                start,
            )));
        }
        Ok(reference(&self.inner, start, &Rc::new(HashMap::new())))
    }

    pub fn recognizes(&self, start: &str, input: &[T]) -> Result<bool, OracleError> {
        let start_ref = parse_symref(start.trim())
            .map_err(|_| OracleError::UnresolvedStart(start.to_owned()))?;
        let r = self.recognizer(&start_ref)?;
        self.inner.depth.set(0);
        self.inner.exceeded.set(false);
        let verdict = naive_run(&r, input);
        if self.inner.exceeded.get() {
            return Err(OracleError::DepthExceeded(
                self.inner.max_depth.unwrap_or(0),
            ));
        }
        Ok(verdict)
    }
}

fn reference<T: LexToken>(inner: &Rc<Inner<T>>, r: &SymRef, env: &Env<T>) -> Recognizer<T> {
    match r {
        SymRef::Literal(c, _) => {
            let pattern = PatternSpec::Literal(*c);
            naive_token(move |t: &T| t.matches(None, &pattern))
        }
        SymRef::Name { name, args, .. } => {
            if let Some(bound) = env.get(name) {
                return Rc::clone(bound);
            }
            if let Some(pattern) = inner.tokens.get(name) {
                let (name, pattern) = (name.clone(), pattern.clone());
                return naive_token(move |t: &T| t.matches(Some(&name), &pattern));
            }
            let args: Vec<Recognizer<T>> = args.iter().map(|a| reference(inner, a, env)).collect();
            let inner = Rc::clone(inner);
            let name = name.clone();
            // The body is built on each call so recursive definitions stay finite.
            Rc::new(move |input: &[T], k: usize, c: &dyn Fn(usize) -> bool| {
                if inner.exceeded.get() {
                    return false;
                }
                let depth = inner.depth.get() + 1;
                if inner.max_depth.is_some_and(|m| depth > m) {
                    inner.exceeded.set(true);
                    return false;
                }
                inner.depth.set(depth);
                let def = inner.ast.definition(&name).expect("validated reference");
                let result = body(&inner, def, &args)(input, k, c);
                inner.depth.set(depth - 1);
                result
            })
        }
    }
}

fn body<T: LexToken>(
    inner: &Rc<Inner<T>>,
    def: &Definition,
    args: &[Recognizer<T>],
) -> Recognizer<T> {
    let env: Env<T> = Rc::new(
        def.params
            .iter()
            .cloned()
            .zip(args.iter().cloned())
            .collect(),
    );
    alt(def
        .alternates
        .iter()
        .map(|a| seq(a.iter().map(|r| reference(inner, r, &env)).collect()))
        .collect())
}

/// Whether a grammar without parameters has a nonterminal that can derive
/// itself at the front of a sentential form. `None` for parameterised
/// grammars, which this check does not cover.
pub fn is_left_recursive(ast: &GrammarAst) -> Option<bool> {
    if ast.definitions().any(|d| !d.params.is_empty()) {
        return None;
    }
    let nullable = nullable_set(ast);
    let mut corners: HashMap<&str, Vec<&str>> = HashMap::new();
    for d in ast.definitions() {
        let edges = corners.entry(d.name.as_str()).or_default();
        for alt in &d.alternates {
            for r in alt {
                let SymRef::Name { name, .. } = r else { break };
                if ast.definition(name).is_none() {
                    break;
                }
                edges.push(name.as_str());
                if !nullable.contains(name.as_str()) {
                    break;
                }
            }
        }
    }
    let mut done = HashSet::new();
    let mut on_path = HashSet::new();
    fn cyclic<'a>(
        n: &'a str,
        g: &HashMap<&'a str, Vec<&'a str>>,
        done: &mut HashSet<&'a str>,
        on_path: &mut HashSet<&'a str>,
    ) -> bool {
        if on_path.contains(n) {
            return true;
        }
        if !done.insert(n) {
            return false;
        }
        on_path.insert(n);
        let found = g
            .get(n)
            .into_iter()
            .flatten()
            .any(|&m| cyclic(m, g, done, on_path));
        on_path.remove(n);
        found
    }
    Some(
        ast.definitions()
            .any(|d| cyclic(&d.name, &corners, &mut done, &mut on_path)),
    )
}

fn nullable_set(ast: &GrammarAst) -> HashSet<&str> {
    let mut nullable = HashSet::new();
    loop {
        let before = nullable.len();
        for d in ast.definitions() {
            let derives_empty = d.alternates.iter().any(|alt| {
                alt.iter().all(
                    |r| matches!(r, SymRef::Name { name, .. } if nullable.contains(name.as_str())),
                )
            });
            if derives_empty {
                nullable.insert(d.name.as_str());
            }
        }
        if nullable.len() == before {
            return nullable;
        }
    }
}
