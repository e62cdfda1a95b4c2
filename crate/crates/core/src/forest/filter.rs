//! Split filters for disambiguation.

use rustc_hash::FxHashMap;

use crate::symbol::{Alternate, SymbolId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assoc {
    Left,
    Right,
    NonAssoc,
}

/// One child of a candidate split, with the alternate its derivation is
/// rooted at (`None` for tokens).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChildSummary {
    pub symbol: SymbolId,
    pub left: usize,
    pub right: usize,
    pub root: Option<Alternate>,
}

/// A way of deriving `alternate` over `bounds`, one child per symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SplitCandidate {
    pub alternate: Alternate,
    pub bounds: Vec<usize>,
    pub children: Vec<ChildSummary>,
}

/// A predicate over split candidates. Filters only ever remove candidates.
pub trait Filter: Send + Sync {
    fn allows(&self, candidate: &SplitCandidate) -> bool;
}

impl<F: Fn(&SplitCandidate) -> bool + Send + Sync> Filter for F {
    fn allows(&self, candidate: &SplitCandidate) -> bool {
        self(candidate)
    }
}

pub fn apply_filters(
    filters: &[&dyn Filter],
    candidates: Vec<SplitCandidate>,
) -> Vec<SplitCandidate> {
    candidates
        .into_iter()
        .filter(|c| filters.iter().all(|f| f.allows(c)))
        .collect()
}

/// Operator tokens with their binding level and associativity. Higher levels
/// bind tighter.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecedenceTable {
    operators: FxHashMap<SymbolId, (usize, Assoc)>,
}

impl PrecedenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a group binding tighter than every group declared before it.
    pub fn push_group(&mut self, assoc: Assoc, tokens: impl IntoIterator<Item = SymbolId>) {
        let level = self.levels() + 1;
        for t in tokens {
            self.operators.insert(t, (level, assoc));
        }
    }

    pub fn levels(&self) -> usize {
        self.operators.values().map(|&(l, _)| l).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn get(&self, token: SymbolId) -> Option<(usize, Assoc)> {
        self.operators.get(&token).copied()
    }

    /// The rightmost declared operator of an alternate: its index, level and
    /// associativity.
    pub fn operator_of(&self, alternate: Alternate) -> Option<(usize, usize, Assoc)> {
        let symbols = alternate.symbols();
        symbols
            .iter()
            .enumerate()
            .rev()
            .find_map(|(i, s)| self.get(*s).map(|(level, assoc)| (i, level, assoc)))
    }
}

/// Rejects splits where an operand's root operator binds looser than the
/// parent's operator, or equally tightly on the side its associativity
/// forbids.
#[derive(Clone, Debug)]
pub struct PrecedenceFilter {
    table: PrecedenceTable,
}

impl PrecedenceFilter {
    pub fn new(table: PrecedenceTable) -> Self {
        PrecedenceFilter { table }
    }

    pub fn table(&self) -> &PrecedenceTable {
        &self.table
    }
}

impl Filter for PrecedenceFilter {
    fn allows(&self, candidate: &SplitCandidate) -> bool {
        let Some((at, level, assoc)) = self.table.operator_of(candidate.alternate) else {
            return true;
        };
        candidate.children.iter().enumerate().all(|(i, child)| {
            if i == at {
                return true;
            }
            let Some((_, child_level, _)) =
                child.root.and_then(|root| self.table.operator_of(root))
            else {
                return true;
            };
            let tied_side = if i < at { Assoc::Left } else { Assoc::Right };
            child_level > level || (child_level == level && assoc == tied_side)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr() -> (SymbolId, Alternate, Alternate, Alternate) {
        let e = SymbolId::nonterminal("Expr");
        let plus = Alternate::new(e, &[e, SymbolId::token("'+'"), e]);
        let times = Alternate::new(e, &[e, SymbolId::token("'*'"), e]);
        let atom = Alternate::new(e, &[SymbolId::token("'a'")]);
        (e, plus, times, atom)
    }

    fn candidate(
        parent: Alternate,
        left: Option<Alternate>,
        right: Option<Alternate>,
    ) -> SplitCandidate {
        let e = parent.lhs();
        SplitCandidate {
            alternate: parent,
            bounds: vec![0, 3, 4, 7],
            children: vec![
                ChildSummary {
                    symbol: e,
                    left: 0,
                    right: 3,
                    root: left,
                },
                ChildSummary {
                    symbol: parent.symbol(1).unwrap(),
                    left: 3,
                    right: 4,
                    root: None,
                },
                ChildSummary {
                    symbol: e,
                    left: 4,
                    right: 7,
                    root: right,
                },
            ],
        }
    }

    #[test]
    fn associativity() {
        let (_, plus, _, atom) = expr();
        let mut table = PrecedenceTable::new();
        table.push_group(Assoc::Left, [SymbolId::token("'+'")]);
        let left = PrecedenceFilter::new(table);
        assert!(left.allows(&candidate(plus, Some(plus), Some(atom))));
        assert!(!left.allows(&candidate(plus, Some(atom), Some(plus))));

        let mut table = PrecedenceTable::new();
        table.push_group(Assoc::NonAssoc, [SymbolId::token("'+'")]);
        let none = PrecedenceFilter::new(table);
        assert!(!none.allows(&candidate(plus, Some(plus), Some(atom))));
        assert!(!none.allows(&candidate(plus, Some(atom), Some(plus))));
        assert!(none.allows(&candidate(plus, Some(atom), Some(atom))));
    }

    #[test]
    fn later_groups_bind_tighter() {
        let (_, plus, times, atom) = expr();
        let mut table = PrecedenceTable::new();
        table.push_group(Assoc::Left, [SymbolId::token("'+'")]);
        table.push_group(Assoc::Left, [SymbolId::token("'*'")]);
        let f = PrecedenceFilter::new(table);
        assert!(f.allows(&candidate(plus, Some(times), Some(times))));
        assert!(!f.allows(&candidate(times, Some(plus), Some(atom))));
        assert!(!f.allows(&candidate(times, Some(atom), Some(plus))));
    }

    #[test]
    fn apply_is_contractive() {
        let (_, plus, _, atom) = expr();
        let mut table = PrecedenceTable::new();
        table.push_group(Assoc::Left, [SymbolId::token("'+'")]);
        let f = PrecedenceFilter::new(table);
        let all = vec![
            candidate(plus, Some(plus), Some(atom)),
            candidate(plus, Some(atom), Some(plus)),
        ];
        let once = apply_filters(&[&f], all.clone());
        assert_eq!(once, vec![all[0].clone()]);
        assert_eq!(apply_filters(&[&f], once.clone()), once);
        assert_eq!(apply_filters(&[], all.clone()), all);
    }
}
