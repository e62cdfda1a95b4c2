use std::fmt;
use std::ops::{Add, Mul};
use std::rc::Rc;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{for_each_combo, Forest, Root, VisitedSet};
use crate::symbol::SymbolId;

/// A derivation count. Arithmetic saturates at `u128::MAX` and sets the flag.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Count {
    pub value: u128,
    pub saturated: bool,
}

impl Count {
    pub const ZERO: Count = Count {
        value: 0,
        saturated: false,
    };
    pub const ONE: Count = Count {
        value: 1,
        saturated: false,
    };

    pub fn is_zero(self) -> bool {
        self.value == 0 && !self.saturated
    }
}

impl Add for Count {
    type Output = Count;

    fn add(self, other: Count) -> Count {
        let (value, over) = self.value.overflowing_add(other.value);
        Count {
            value: if over { u128::MAX } else { value },
            saturated: self.saturated || other.saturated || over,
        }
    }
}

impl Mul for Count {
    type Output = Count;

    fn mul(self, other: Count) -> Count {
        if self.is_zero() || other.is_zero() {
            return Count::ZERO;
        }
        let (value, over) = self.value.overflowing_mul(other.value);
        Count {
            value: if over { u128::MAX } else { value },
            saturated: self.saturated || other.saturated || over,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.saturated {
            write!(f, "{} (saturated)", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

type Key = (SymbolId, usize, usize, VisitedSet);
pub(crate) type Groups = Rc<[(Root, Count)]>;

/// Memoised counting over one forest. Counts are grouped by root alternate
/// when filters are present and merged into one group otherwise.
pub(crate) struct Counter<'f, 'p, T, V> {
    forest: &'f Forest<'p, T, V>,
    memo: FxHashMap<Key, Groups>,
}

impl<'f, 'p, T, V> Counter<'f, 'p, T, V> {
    pub fn new(forest: &'f Forest<'p, T, V>) -> Self {
        Counter {
            forest,
            memo: FxHashMap::default(),
        }
    }

    pub fn total(&mut self, id: SymbolId, l: usize, r: usize, visited: &VisitedSet) -> Count {
        self.grouped(id, l, r, visited)
            .iter()
            .fold(Count::ZERO, |acc, &(_, c)| acc + c)
    }

    /// Non-zero counts per root alternate, in definition order.
    pub fn grouped(&mut self, id: SymbolId, l: usize, r: usize, visited: &VisitedSet) -> Groups {
        if id.is_token() {
            let groups: Groups = if self.forest.token_matches(id, l, r) {
                Rc::new([(None, Count::ONE)])
            } else {
                Rc::new([])
            };
            return groups;
        }
        if visited.contains(id) {
            return Rc::new([]);
        }
        let key = (id, l, r, visited.clone());
        if let Some(g) = self.memo.get(&key) {
            return Rc::clone(g);
        }
        let filtered = self.forest.is_filtered();
        let mut out: Vec<(Root, Count)> = Vec::new();
        for split in self.forest.splits(id, l, r) {
            let groups: Vec<Groups> = split
                .children
                .iter()
                .map(|&(c, cl, cr)| {
                    let cv = Forest::<T, V>::child_visited(id, l, r, visited, cl, cr);
                    if filtered {
                        self.grouped(c, cl, cr, &cv)
                    } else {
                        let total = self.total(c, cl, cr, &cv);
                        if total.is_zero() {
                            Groups::from([])
                        } else {
                            Groups::from([(None, total)])
                        }
                    }
                })
                .collect();
            let lens: Vec<usize> = groups.iter().map(|g| g.len()).collect();
            let mut sum = Count::ZERO;
            for_each_combo(&lens, |combo| {
                if filtered {
                    let roots: Vec<Root> =
                        combo.iter().zip(&groups).map(|(&i, g)| g[i].0).collect();
                    if !self
                        .forest
                        .allows(&Forest::<T, V>::candidate(&split, &roots))
                    {
                        return;
                    }
                }
                let product = combo
                    .iter()
                    .zip(&groups)
                    .fold(Count::ONE, |acc, (&i, g)| acc * g[i].1);
                sum = sum + product;
            });
            if sum.is_zero() {
                continue;
            }
            let root = filtered.then_some(split.alternate);
            match out.last_mut() {
                Some((last, c)) if *last == root => *c = *c + sum,
                _ => out.push((root, sum)),
            }
        }
        let groups: Groups = out.into();
        self.memo.insert(key, Rc::clone(&groups));
        groups
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation() {
        let big = Count {
            value: u128::MAX / 2 + 1,
            saturated: false,
        };
        let s = big + big;
        assert!(s.saturated);
        assert_eq!(s.value, u128::MAX);
        assert!(
            (big * Count {
                value: 2,
                saturated: false
            })
            .saturated
        );
        assert_eq!(Count::ZERO * s, Count::ZERO);
        assert_eq!((Count::ONE + Count::ONE).value, 2);
    }
}
