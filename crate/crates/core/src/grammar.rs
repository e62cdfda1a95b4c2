//! Symbol registry: token patterns, (parameterised) rule definitions and the
//! memoised instances the engine resolves nonterminal ids through.
//!
//! A parameterised nonterminal is a rule: a function from argument ids to
//! alternates. Applying a rule only mints an [`SymbolId`]; its alternates are
//! computed the first time the engine (or the semantic phase) asks for the
//! instance, and then cached for the lifetime of the grammar. This is what
//! lets definitions such as `F(x): F(Seq(x,'a')) | x` be elaborated eagerly
//! while only parse-time exploration can diverge.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::symbol::{Alternate, SymbolId, SymbolView, START_NAME};

/// A token classifier together with its display name.
type Classifier<T, V> = dyn Fn(&T) -> Option<V> + Send + Sync;

pub struct TokenPattern<T, V> {
    name: String,
    classify: Arc<Classifier<T, V>>,
}

impl<T, V> Clone for TokenPattern<T, V> {
    fn clone(&self) -> Self {
        TokenPattern {
            name: self.name.clone(),
            classify: Arc::clone(&self.classify),
        }
    }
}

impl<T, V> fmt::Debug for TokenPattern<T, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("TokenPattern").field(&self.name).finish()
    }
}

impl<T, V> TokenPattern<T, V> {
    pub fn new(
        name: impl Into<String>,
        classify: impl Fn(&T) -> Option<V> + Send + Sync + 'static,
    ) -> Self {
        TokenPattern {
            name: name.into(),
            classify: Arc::new(classify),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn id(&self) -> SymbolId {
        SymbolId::token(&self.name)
    }

    pub fn classify(&self, token: &T) -> Option<V> {
        (self.classify)(token)
    }

    pub fn accepts(&self, token: &T) -> bool {
        self.classify(token).is_some()
    }
}

impl<T: PartialEq + Clone + Send + Sync + 'static> TokenPattern<T, T> {
    /// Matches exactly `expected` and yields the token itself.
    pub fn exact(name: impl Into<String>, expected: T) -> Self {
        TokenPattern::new(name, move |t: &T| (*t == expected).then(|| t.clone()))
    }
}

type PlainFn<V> = dyn Fn(&[V]) -> V + Send + Sync;
type AmbiguousFn<V> = dyn Fn(&[Vec<V>]) -> Vec<V> + Send + Sync;

/// The semantic action attached to an alternate.
pub enum Action<V> {
    /// Called once per derivation with the children's values.
    Plain(Arc<PlainFn<V>>),
    /// Called once per split with, for each child, all of its values; returns
    /// any number of results, so it can prune or merge derivations.
    Ambiguous(Arc<AmbiguousFn<V>>),
}

impl<V> Clone for Action<V> {
    fn clone(&self) -> Self {
        match self {
            Action::Plain(f) => Action::Plain(Arc::clone(f)),
            Action::Ambiguous(f) => Action::Ambiguous(Arc::clone(f)),
        }
    }
}

impl<V> fmt::Debug for Action<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Plain(_) => "Action::Plain",
            Action::Ambiguous(_) => "Action::Ambiguous",
        })
    }
}

impl<V> Action<V> {
    pub fn plain(f: impl Fn(&[V]) -> V + Send + Sync + 'static) -> Self {
        Action::Plain(Arc::new(f))
    }

    pub fn ambiguous(f: impl Fn(&[Vec<V>]) -> Vec<V> + Send + Sync + 'static) -> Self {
        Action::Ambiguous(Arc::new(f))
    }
}

impl<V: Default> Default for Action<V> {
    fn default() -> Self {
        Action::plain(|_| V::default())
    }
}

/// One alternate of a rule body, as produced by a rule function.
#[derive(Debug)]
pub struct Alternative<V> {
    pub symbols: Vec<SymbolId>,
    pub action: Action<V>,
}

impl<V> Clone for Alternative<V> {
    fn clone(&self) -> Self {
        Alternative {
            symbols: self.symbols.clone(),
            action: self.action.clone(),
        }
    }
}

impl<V> Alternative<V> {
    pub fn new(symbols: Vec<SymbolId>, action: Action<V>) -> Self {
        Alternative { symbols, action }
    }
}

impl<V: Default> From<Vec<SymbolId>> for Alternative<V> {
    fn from(symbols: Vec<SymbolId>) -> Self {
        Alternative::new(symbols, Action::default())
    }
}

type RuleFn<V> = dyn Fn(&[SymbolId]) -> Vec<Alternative<V>> + Send + Sync;

struct Rule<V> {
    arity: usize,
    body: Arc<RuleFn<V>>,
}

/// A nonterminal id with its alternates resolved.
#[derive(Debug)]
pub struct Instance<V> {
    id: SymbolId,
    alternates: Box<[(Alternate, Action<V>)]>,
}

impl<V> Instance<V> {
    pub fn id(&self) -> SymbolId {
        self.id
    }

    /// Alternates in definition order.
    pub fn alternates(&self) -> &[(Alternate, Action<V>)] {
        &self.alternates
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("`{0}` is defined more than once")]
    Duplicate(String),
    #[error("no rule named `{0}`")]
    UnknownRule(String),
    #[error("no token named `{0}`")]
    UnknownToken(String),
    #[error("`{name}` takes {expected} argument(s) but was given {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

/// An immutable symbol registry with lazily memoised rule instances.
pub struct Grammar<T, V> {
    tokens: FxHashMap<SymbolId, TokenPattern<T, V>>,
    rules: HashMap<String, Rule<V>>,
    instances: RwLock<FxHashMap<SymbolId, Arc<Instance<V>>>>,
}

impl<T, V> fmt::Debug for Grammar<T, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rules: Vec<_> = self.rules.keys().collect();
        rules.sort();
        f.debug_struct("Grammar")
            .field("tokens", &self.tokens.len())
            .field("rules", &rules)
            .field("instances", &self.instances.read().len())
            .finish()
    }
}

impl<T, V> Grammar<T, V> {
    pub fn builder() -> GrammarBuilder<T, V> {
        GrammarBuilder {
            tokens: FxHashMap::default(),
            rules: HashMap::new(),
        }
    }

    pub fn token(&self, id: SymbolId) -> Option<&TokenPattern<T, V>> {
        self.tokens.get(&id)
    }

    pub fn arity(&self, rule: &str) -> Option<usize> {
        self.rules.get(rule).map(|r| r.arity)
    }

    /// The id of `rule` applied to `args`, after checking the rule exists
    /// and the argument count.
    pub fn apply(&self, rule: &str, args: &[SymbolId]) -> Result<SymbolId, GrammarError> {
        let found = self
            .rules
            .get(rule)
            .ok_or_else(|| GrammarError::UnknownRule(rule.to_owned()))?;
        if found.arity != args.len() {
            return Err(GrammarError::Arity {
                name: rule.to_owned(),
                expected: found.arity,
                found: args.len(),
            });
        }
        Ok(SymbolId::applied(rule, args))
    }

    /// Resolves a nonterminal id, instantiating its rule on first use.
    pub fn instance(&self, id: SymbolId) -> Result<Arc<Instance<V>>, GrammarError> {
        if let Some(inst) = self.instances.read().get(&id) {
            return Ok(Arc::clone(inst));
        }
        let SymbolView::Applied(name, args) = id.view() else {
            return Err(GrammarError::UnknownRule(id.to_string()));
        };
        let rule = self
            .rules
            .get(&name)
            .ok_or_else(|| GrammarError::UnknownRule(name.clone()))?;
        if rule.arity != args.len() {
            return Err(GrammarError::Arity {
                name,
                expected: rule.arity,
                found: args.len(),
            });
        }
        let alternates = (rule.body)(&args)
            .into_iter()
            .map(|alt| (Alternate::new(id, &alt.symbols), alt.action))
            .collect();
        let inst = Arc::new(Instance { id, alternates });
        Ok(Arc::clone(self.instances.write().entry(id).or_insert(inst)))
    }

    /// Number of instances created so far.
    pub fn instance_count(&self) -> usize {
        self.instances.read().len()
    }
}

/// Collects token patterns and rules into a [`Grammar`].
pub struct GrammarBuilder<T, V> {
    tokens: FxHashMap<SymbolId, TokenPattern<T, V>>,
    rules: HashMap<String, Rule<V>>,
}

impl<T, V> GrammarBuilder<T, V> {
    /// Registers a token; its id is `TokenName(pattern.name())`.
    pub fn token(&mut self, pattern: TokenPattern<T, V>) -> Result<SymbolId, GrammarError> {
        let id = pattern.id();
        if self.tokens.contains_key(&id) {
            return Err(GrammarError::Duplicate(pattern.name));
        }
        self.tokens.insert(id, pattern);
        Ok(id)
    }

    /// Registers a rule of the given arity whose alternates are computed from
    /// the argument ids on demand.
    pub fn rule(
        &mut self,
        name: &str,
        arity: usize,
        body: impl Fn(&[SymbolId]) -> Vec<Alternative<V>> + Send + Sync + 'static,
    ) -> Result<(), GrammarError> {
        if name == START_NAME {
            return Err(GrammarError::Reserved(name.to_owned()));
        }
        if self.rules.contains_key(name) {
            return Err(GrammarError::Duplicate(name.to_owned()));
        }
        self.rules.insert(
            name.to_owned(),
            Rule {
                arity,
                body: Arc::new(body),
            },
        );
        Ok(())
    }

    /// Registers a nonterminal without parameters and returns its id.
    pub fn nonterminal(
        &mut self,
        name: &str,
        alternates: Vec<Alternative<V>>,
    ) -> Result<SymbolId, GrammarError>
    where
        V: 'static,
    {
        self.rule(name, 0, move |_| alternates.clone())?;
        Ok(SymbolId::nonterminal(name))
    }

    pub fn build(self) -> Grammar<T, V> {
        Grammar {
            tokens: self.tokens,
            rules: self.rules,
            instances: RwLock::new(FxHashMap::default()),
        }
    }
}

/// A grammar symbol: an id resolved against a shared registry.
pub struct Symbol<T, V> {
    grammar: Arc<Grammar<T, V>>,
    id: SymbolId,
}

impl<T, V> Clone for Symbol<T, V> {
    fn clone(&self) -> Self {
        Symbol {
            grammar: Arc::clone(&self.grammar),
            id: self.id,
        }
    }
}

impl<T, V> fmt::Debug for Symbol<T, V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Symbol").field(&self.id).finish()
    }
}

impl<T, V> Symbol<T, V> {
    /// Fails if `id` is a token the grammar does not know.
    pub fn new(grammar: Arc<Grammar<T, V>>, id: SymbolId) -> Result<Self, GrammarError> {
        if id.is_token() && grammar.token(id).is_none() {
            return Err(GrammarError::UnknownToken(id.to_string()));
        }
        Ok(Symbol { grammar, id })
    }

    pub fn id(&self) -> SymbolId {
        self.id
    }

    pub fn grammar(&self) -> &Arc<Grammar<T, V>> {
        &self.grammar
    }

    /// Another symbol of the same grammar.
    pub fn sibling(&self, id: SymbolId) -> Result<Self, GrammarError> {
        Symbol::new(Arc::clone(&self.grammar), id)
    }
}
