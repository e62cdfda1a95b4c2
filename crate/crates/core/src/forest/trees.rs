use std::cell::RefCell;
use std::fmt;
use std::ops::ControlFlow;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::count::Counter;
use super::{Forest, Root, Split, VisitedSet};
use crate::symbol::{Alternate, SymbolId};

/// One derivation. Children of a node tile its extent left to right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationTree<T> {
    Node {
        symbol: SymbolId,
        alternate: Alternate,
        left: usize,
        right: usize,
        children: Vec<DerivationTree<T>>,
    },
    Leaf {
        symbol: SymbolId,
        token: T,
        position: usize,
    },
}

impl<T> DerivationTree<T> {
    pub fn symbol(&self) -> SymbolId {
        match self {
            DerivationTree::Node { symbol, .. } | DerivationTree::Leaf { symbol, .. } => *symbol,
        }
    }

    pub fn left(&self) -> usize {
        match self {
            DerivationTree::Node { left, .. } => *left,
            DerivationTree::Leaf { position, .. } => *position,
        }
    }

    pub fn right(&self) -> usize {
        match self {
            DerivationTree::Node { right, .. } => *right,
            DerivationTree::Leaf { position, .. } => position + 1,
        }
    }

    pub fn root(&self) -> Option<Alternate> {
        match self {
            DerivationTree::Node { alternate, .. } => Some(*alternate),
            DerivationTree::Leaf { .. } => None,
        }
    }

    pub fn children(&self) -> &[DerivationTree<T>] {
        match self {
            DerivationTree::Node { children, .. } => children,
            DerivationTree::Leaf { .. } => &[],
        }
    }

    pub fn leaves(&self) -> Vec<&T> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a T>) {
        match self {
            DerivationTree::Node { children, .. } => {
                children.iter().for_each(|c| c.collect_leaves(out))
            }
            DerivationTree::Leaf { token, .. } => out.push(token),
        }
    }
}

/// `(Name l r child…)` for nodes and `'c'@pos` for leaves.
impl<T: fmt::Display> fmt::Display for DerivationTree<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationTree::Node {
                symbol,
                left,
                right,
                children,
                ..
            } => {
                write!(f, "({symbol} {left} {right}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
            DerivationTree::Leaf {
                token, position, ..
            } => write!(f, "'{token}'@{position}"),
        }
    }
}

impl<T: fmt::Display> Serialize for DerivationTree<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            DerivationTree::Node {
                symbol,
                left,
                right,
                children,
                ..
            } => {
                let mut s = serializer.serialize_struct("Node", 4)?;
                s.serialize_field("name", &symbol.to_string())?;
                s.serialize_field("left", left)?;
                s.serialize_field("right", right)?;
                s.serialize_field("children", children)?;
                s.end()
            }
            DerivationTree::Leaf {
                token, position, ..
            } => {
                let mut s = serializer.serialize_struct("Leaf", 2)?;
                s.serialize_field("token", &token.to_string())?;
                s.serialize_field("position", position)?;
                s.end()
            }
        }
    }
}

type Sink<'a, T> = dyn FnMut(DerivationTree<T>) -> ControlFlow<()> + 'a;

/// Depth-first tree enumeration; subtrees with no derivations are pruned
/// using memoised counts.
struct Walk<'f, 'p, T, V> {
    forest: &'f Forest<'p, T, V>,
    counter: RefCell<Counter<'f, 'p, T, V>>,
}

impl<T: Clone, V> Walk<'_, '_, T, V> {
    fn each(
        &self,
        id: SymbolId,
        l: usize,
        r: usize,
        visited: &VisitedSet,
        only: Option<Root>,
        sink: &mut Sink<'_, T>,
    ) -> ControlFlow<()> {
        if id.is_token() {
            if self.forest.token_matches(id, l, r) {
                return sink(DerivationTree::Leaf {
                    symbol: id,
                    token: self.forest.input[l].clone(),
                    position: l,
                });
            }
            return ControlFlow::Continue(());
        }
        if visited.contains(id) {
            return ControlFlow::Continue(());
        }
        let filtered = self.forest.is_filtered();
        for split in self.forest.splits(id, l, r) {
            if let Some(root) = only {
                if root != Some(split.alternate) {
                    continue;
                }
            }
            let visits: Vec<VisitedSet> = split
                .children
                .iter()
                .map(|&(_, cl, cr)| Forest::<T, V>::child_visited(id, l, r, visited, cl, cr))
                .collect();
            let groups: Vec<Vec<Option<Root>>> = split
                .children
                .iter()
                .zip(&visits)
                .map(|(&(c, cl, cr), cv)| {
                    let g = self.counter.borrow_mut().grouped(c, cl, cr, cv);
                    if filtered {
                        g.iter().map(|&(root, _)| Some(root)).collect()
                    } else if g.is_empty() {
                        Vec::new()
                    } else {
                        vec![None]
                    }
                })
                .collect();
            let lens: Vec<usize> = groups.iter().map(Vec::len).collect();
            let mut combos = Vec::new();
            super::for_each_combo(&lens, |combo| {
                let restriction: Vec<Option<Root>> =
                    combo.iter().zip(&groups).map(|(&i, g)| g[i]).collect();
                if filtered {
                    let roots: Vec<Root> = restriction.iter().map(|r| r.flatten()).collect();
                    if !self
                        .forest
                        .allows(&Forest::<T, V>::candidate(&split, &roots))
                    {
                        return;
                    }
                }
                combos.push(restriction);
            });
            for restriction in combos {
                let ctx = NodeCtx {
                    id,
                    l,
                    r,
                    split: &split,
                    visits: &visits,
                    restriction: &restriction,
                };
                self.product(&ctx, 0, &mut Vec::new(), sink)?;
            }
        }
        ControlFlow::Continue(())
    }

    fn product(
        &self,
        ctx: &NodeCtx<'_>,
        i: usize,
        acc: &mut Vec<DerivationTree<T>>,
        sink: &mut Sink<'_, T>,
    ) -> ControlFlow<()> {
        if i == ctx.split.children.len() {
            return sink(DerivationTree::Node {
                symbol: ctx.id,
                alternate: ctx.split.alternate,
                left: ctx.l,
                right: ctx.r,
                children: acc.clone(),
            });
        }
        let (c, cl, cr) = ctx.split.children[i];
        self.each(c, cl, cr, &ctx.visits[i], ctx.restriction[i], &mut |t| {
            acc.push(t);
            let flow = self.product(ctx, i + 1, acc, sink);
            acc.pop();
            flow
        })
    }
}

struct NodeCtx<'a> {
    id: SymbolId,
    l: usize,
    r: usize,
    split: &'a Split,
    visits: &'a [VisitedSet],
    restriction: &'a [Option<Root>],
}

impl<T: Clone, V> Forest<'_, T, V> {
    /// Up to `limit` derivation trees of the root over the whole input, in
    /// alternate order then ascending split order.
    pub fn trees(&self, limit: Option<usize>) -> Vec<DerivationTree<T>> {
        self.trees_at(self.root, 0, self.input.len(), limit)
    }

    pub fn trees_at(
        &self,
        id: SymbolId,
        l: usize,
        r: usize,
        limit: Option<usize>,
    ) -> Vec<DerivationTree<T>> {
        let mut out = Vec::new();
        if limit == Some(0) {
            return out;
        }
        self.for_each_tree_at(id, l, r, |t| {
            out.push(t);
            if limit.is_some_and(|n| out.len() >= n) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        out
    }

    /// Feeds trees to `sink` until it breaks.
    pub fn for_each_tree_at(
        &self,
        id: SymbolId,
        l: usize,
        r: usize,
        mut sink: impl FnMut(DerivationTree<T>) -> ControlFlow<()>,
    ) {
        let walk = Walk {
            forest: self,
            counter: RefCell::new(Counter::new(self)),
        };
        let _ = walk.each(id, l, r, &VisitedSet::new(), None, &mut sink);
    }
}
