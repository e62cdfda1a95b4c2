//! The semantic phase: reading derivations back out of a BSR set.
//!
//! Every walk applies the same curtailment rule. A nonterminal already being
//! evaluated at the current extent pair yields nothing, and the visited set
//! is cleared whenever a child's extents differ from its parent's.

mod count;
mod errors;
mod filter;
mod splits;
mod trees;

use std::sync::Arc;

use smallvec::SmallVec;

pub use count::Count;
pub use errors::{extract_errors, ErrorReport};
pub use filter::{
    apply_filters, Assoc, ChildSummary, Filter, PrecedenceFilter, PrecedenceTable, SplitCandidate,
};
pub use splits::enumerate_splits;
pub use trees::DerivationTree;

use crate::engine::Parse;
use crate::grammar::{Action, Grammar, Symbol, TokenPattern};
use crate::state::{BsrSet, ParseState};
use crate::symbol::{Alternate, SymbolId};

/// Nonterminals under evaluation at the current extent pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VisitedSet(SmallVec<[SymbolId; 4]>);

impl VisitedSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, id: SymbolId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn with(&self, id: SymbolId) -> VisitedSet {
        let mut next = self.clone();
        if let Err(at) = next.0.binary_search(&id) {
            next.0.insert(at, id);
        }
        next
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.0.iter().copied()
    }
}

/// The alternate a derivation is rooted at; `None` for a token.
pub(crate) type Root = Option<Alternate>;

/// The values of a token over `[l, r)`: one when the extents are one apart
/// and the pattern accepts the token there.
pub fn evaluate_token<T, V>(
    pattern: &TokenPattern<T, V>,
    input: &[T],
    l: usize,
    r: usize,
) -> Vec<V> {
    if r != l + 1 || l >= input.len() {
        return Vec::new();
    }
    pattern.classify(&input[l]).into_iter().collect()
}

/// One split of one alternate, with each child's extents.
pub(crate) struct Split {
    pub alternate: Alternate,
    pub index: usize,
    pub bounds: Vec<usize>,
    pub children: Vec<(SymbolId, usize, usize)>,
}

/// Read access to the derivations of one parse, optionally filtered.
pub struct Forest<'p, T, V> {
    grammar: &'p Grammar<T, V>,
    input: &'p [T],
    bsrs: &'p BsrSet,
    root: SymbolId,
    filters: Vec<Arc<dyn Filter>>,
}

impl<'p, T, V> Forest<'p, T, V> {
    pub fn new(parse: &'p Parse<T, V>) -> Self {
        Self::from_parts(parse.symbol(), parse.state())
    }

    pub fn from_parts(symbol: &'p Symbol<T, V>, state: &'p ParseState<T>) -> Self {
        Forest {
            grammar: symbol.grammar(),
            input: state.input(),
            bsrs: state.bsrs(),
            root: symbol.id(),
            filters: Vec::new(),
        }
    }

    pub fn with_filter(mut self, filter: impl Filter + 'static) -> Self {
        self.filters.push(Arc::new(filter));
        self
    }

    pub fn with_filters(mut self, filters: impl IntoIterator<Item = Arc<dyn Filter>>) -> Self {
        self.filters.extend(filters);
        self
    }

    pub fn root(&self) -> SymbolId {
        self.root
    }

    pub fn input(&self) -> &'p [T] {
        self.input
    }

    pub fn bsrs(&self) -> &'p BsrSet {
        self.bsrs
    }

    pub fn is_filtered(&self) -> bool {
        !self.filters.is_empty()
    }

    pub(crate) fn allows(&self, candidate: &SplitCandidate) -> bool {
        self.filters.iter().all(|f| f.allows(candidate))
    }

    pub(crate) fn token_matches(&self, id: SymbolId, l: usize, r: usize) -> bool {
        r == l + 1
            && l < self.input.len()
            && self
                .grammar
                .token(id)
                .is_some_and(|p| p.accepts(&self.input[l]))
    }

    pub(crate) fn child_visited(
        id: SymbolId,
        l: usize,
        r: usize,
        visited: &VisitedSet,
        cl: usize,
        cr: usize,
    ) -> VisitedSet {
        if (cl, cr) == (l, r) {
            visited.with(id)
        } else {
            VisitedSet::new()
        }
    }

    /// Every split of every alternate of `id` over `[l, r)`, alternates in
    /// definition order.
    pub(crate) fn splits(&self, id: SymbolId, l: usize, r: usize) -> Vec<Split> {
        let Ok(instance) = self.grammar.instance(id) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (index, (alternate, _)) in instance.alternates().iter().enumerate() {
            let symbols = alternate.symbols();
            for bounds in enumerate_splits(*alternate, l, r, self.bsrs) {
                let children = symbols
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| (s, bounds[i], bounds[i + 1]))
                    .collect();
                out.push(Split {
                    alternate: *alternate,
                    index,
                    bounds,
                    children,
                });
            }
        }
        out
    }

    pub(crate) fn candidate(split: &Split, roots: &[Root]) -> SplitCandidate {
        SplitCandidate {
            alternate: split.alternate,
            bounds: split.bounds.clone(),
            children: split
                .children
                .iter()
                .zip(roots)
                .map(|(&(symbol, left, right), &root)| ChildSummary {
                    symbol,
                    left,
                    right,
                    root,
                })
                .collect(),
        }
    }

    /// Derivation count of the root over the whole input.
    pub fn count(&self) -> Count {
        self.count_at(self.root, 0, self.input.len())
    }

    pub fn count_at(&self, id: SymbolId, l: usize, r: usize) -> Count {
        count::Counter::new(self).total(id, l, r, &VisitedSet::new())
    }
}

impl<T, V: Clone> Forest<'_, T, V> {
    /// The semantic values of the root over the whole input.
    pub fn values(&self) -> Vec<V> {
        self.evaluate(self.root, 0, self.input.len(), &VisitedSet::new())
    }

    /// One value per curtailed derivation of `id` over `[l, r)`.
    pub fn evaluate(&self, id: SymbolId, l: usize, r: usize, visited: &VisitedSet) -> Vec<V> {
        self.grouped_values(id, l, r, visited)
            .into_iter()
            .flat_map(|(_, vs)| vs)
            .collect()
    }

    fn grouped_values(
        &self,
        id: SymbolId,
        l: usize,
        r: usize,
        visited: &VisitedSet,
    ) -> Vec<(Root, Vec<V>)> {
        if id.is_token() {
            let values = self
                .grammar
                .token(id)
                .map(|p| evaluate_token(p, self.input, l, r))
                .unwrap_or_default();
            return if values.is_empty() {
                Vec::new()
            } else {
                vec![(None, values)]
            };
        }
        if visited.contains(id) {
            return Vec::new();
        }
        let Ok(instance) = self.grammar.instance(id) else {
            return Vec::new();
        };
        let mut out: Vec<(Root, Vec<V>)> = Vec::new();
        for split in self.splits(id, l, r) {
            let action = &instance.alternates()[split.index].1;
            let groups: Vec<Vec<(Root, Vec<V>)>> = split
                .children
                .iter()
                .map(|&(c, cl, cr)| {
                    let g = self.grouped_values(
                        c,
                        cl,
                        cr,
                        &Self::child_visited(id, l, r, visited, cl, cr),
                    );
                    if self.is_filtered() {
                        g
                    } else {
                        merge(g)
                    }
                })
                .collect();
            let mut values = Vec::new();
            let lens: Vec<usize> = groups.iter().map(Vec::len).collect();
            for_each_combo(&lens, |combo| {
                if self.is_filtered() {
                    let roots: Vec<Root> =
                        combo.iter().zip(&groups).map(|(&i, g)| g[i].0).collect();
                    if !self.allows(&Self::candidate(&split, &roots)) {
                        return;
                    }
                }
                let lists: Vec<&Vec<V>> =
                    combo.iter().zip(&groups).map(|(&i, g)| &g[i].1).collect();
                apply_action(action, &lists, &mut values);
            });
            if values.is_empty() {
                continue;
            }
            match out.last_mut() {
                Some((Some(a), vs)) if *a == split.alternate => vs.extend(values),
                _ => out.push((Some(split.alternate), values)),
            }
        }
        out
    }
}

fn merge<V>(groups: Vec<(Root, Vec<V>)>) -> Vec<(Root, Vec<V>)> {
    if groups.len() <= 1 {
        return groups;
    }
    vec![(None, groups.into_iter().flat_map(|(_, vs)| vs).collect())]
}

fn apply_action<V: Clone>(action: &Action<V>, lists: &[&Vec<V>], out: &mut Vec<V>) {
    match action {
        Action::Plain(f) => {
            let lens: Vec<usize> = lists.iter().map(|l| l.len()).collect();
            let mut args = Vec::with_capacity(lists.len());
            for_each_combo(&lens, |combo| {
                args.clear();
                args.extend(combo.iter().zip(lists).map(|(&i, l)| l[i].clone()));
                out.push(f(&args));
            });
        }
        Action::Ambiguous(f) => {
            let owned: Vec<Vec<V>> = lists.iter().map(|l| (*l).clone()).collect();
            out.extend(f(&owned));
        }
    }
}

/// Calls `f` with every index vector below `lens`, in lexicographic order.
pub(crate) fn for_each_combo(lens: &[usize], mut f: impl FnMut(&[usize])) {
    if lens.contains(&0) {
        return;
    }
    let mut combo = vec![0; lens.len()];
    loop {
        f(&combo);
        let mut i = lens.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            combo[i] += 1;
            if combo[i] < lens[i] {
                break;
            }
            combo[i] = 0;
        }
    }
}
