//! Interned grammar identifiers and the positional value types built on them.
//!
//! A [`SymbolId`] names a grammar symbol structurally: either a token name or
//! a nonterminal name applied to argument ids. Ids are hash-consed in a
//! process-wide table, so structurally equal ids are the same `u32` and every
//! state structure can key on them cheaply. Alternates are interned the same
//! way, which makes a [`Slot`] an 8-byte value.

use std::cmp::Ordering;
use std::fmt;
use std::hash::BuildHasherDefault;
use std::sync::LazyLock;

use indexmap::IndexSet;
use parking_lot::RwLock;
use rustc_hash::FxHasher;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use smallvec::SmallVec;
use thiserror::Error;

/// Name of the artificial start nonterminal wrapped around every run.
pub const START_NAME: &str = "__START";

const TOKEN_BIT: u32 = 1 << 31;

type FxIndexSet<T> = IndexSet<T, BuildHasherDefault<FxHasher>>;
type Symbols = SmallVec<[SymbolId; 3]>;

#[derive(PartialEq, Eq, Hash)]
struct AppliedData {
    name: u32,
    args: Symbols,
}

#[derive(PartialEq, Eq, Hash)]
struct AltData {
    lhs: SymbolId,
    symbols: Symbols,
}

#[derive(Default)]
struct Interner {
    names: FxIndexSet<Box<str>>,
    applied: FxIndexSet<AppliedData>,
    alts: FxIndexSet<AltData>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(Default::default);

impl Interner {
    fn name_index(&mut self, name: &str) -> u32 {
        if let Some(i) = self.names.get_index_of(name) {
            return i as u32;
        }
        let (i, _) = self.names.insert_full(name.into());
        assert!((i as u32) < TOKEN_BIT, "symbol name table overflow");
        i as u32
    }

    fn name(&self, id: SymbolId) -> &str {
        let index = if id.is_token() {
            id.0 & !TOKEN_BIT
        } else {
            self.applied[id.0 as usize].name
        };
        &self.names[index as usize]
    }

    fn args(&self, id: SymbolId) -> &[SymbolId] {
        if id.is_token() {
            &[]
        } else {
            &self.applied[id.0 as usize].args
        }
    }

    fn compare(&self, a: SymbolId, b: SymbolId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match (a.is_token(), b.is_token()) {
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        self.name(a).cmp(self.name(b)).then_with(|| {
            let (xs, ys) = (self.args(a), self.args(b));
            for (&x, &y) in xs.iter().zip(ys) {
                match self.compare(x, y) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
            xs.len().cmp(&ys.len())
        })
    }

    fn write_symbol(&self, id: SymbolId, out: &mut String) {
        out.push_str(self.name(id));
        let args = self.args(id);
        if !args.is_empty() {
            out.push('(');
            for (i, &arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                self.write_symbol(arg, out);
            }
            out.push(')');
        }
    }
}

/// Structural identifier of a grammar symbol.
///
/// Equality and hashing are O(1) thanks to interning; [`Ord`] is the
/// structural order (tokens first, then by name, then argument-wise), so it is
/// independent of interning order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolId(u32);

/// A borrowed-free view of a [`SymbolId`]'s structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolView {
    Token(String),
    Applied(String, Vec<SymbolId>),
}

impl SymbolId {
    /// The id `TokenName(name)`.
    pub fn token(name: &str) -> SymbolId {
        let mut table = INTERNER.write();
        SymbolId(table.name_index(name) | TOKEN_BIT)
    }

    /// The id `Applied(name, args)`.
    pub fn applied(name: &str, args: &[SymbolId]) -> SymbolId {
        let mut table = INTERNER.write();
        let name = table.name_index(name);
        let data = AppliedData {
            name,
            args: args.iter().copied().collect(),
        };
        if let Some(i) = table.applied.get_index_of(&data) {
            return SymbolId(i as u32);
        }
        let (i, _) = table.applied.insert_full(data);
        assert!((i as u32) < TOKEN_BIT, "symbol table overflow");
        SymbolId(i as u32)
    }

    /// The id `Applied(name, [])`.
    pub fn nonterminal(name: &str) -> SymbolId {
        SymbolId::applied(name, &[])
    }

    /// The artificial start nonterminal `__START`.
    pub fn start() -> SymbolId {
        SymbolId::nonterminal(START_NAME)
    }

    pub fn is_token(self) -> bool {
        self.0 & TOKEN_BIT != 0
    }

    pub fn is_applied(self) -> bool {
        !self.is_token()
    }

    pub fn name(self) -> String {
        INTERNER.read().name(self).to_owned()
    }

    pub fn args(self) -> Vec<SymbolId> {
        INTERNER.read().args(self).to_vec()
    }

    pub fn arity(self) -> usize {
        INTERNER.read().args(self).len()
    }

    pub fn view(self) -> SymbolView {
        let table = INTERNER.read();
        let name = table.name(self).to_owned();
        if self.is_token() {
            SymbolView::Token(name)
        } else {
            SymbolView::Applied(name, table.args(self).to_vec())
        }
    }
}

impl Ord for SymbolId {
    fn cmp(&self, other: &Self) -> Ordering {
        INTERNER.read().compare(*self, *other)
    }
}

impl PartialOrd for SymbolId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        INTERNER.read().write_symbol(*self, &mut out);
        f.write_str(&out)
    }
}

impl fmt::Debug for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for SymbolId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.view() {
            SymbolView::Token(name) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("token", &name)?;
                map.end()
            }
            SymbolView::Applied(name, args) => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("nt", &name)?;
                map.serialize_entry("args", &args)?;
                map.end()
            }
        }
    }
}

/// An interned alternate: a left-hand side together with its symbol sequence.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alternate(u32);

impl Alternate {
    pub fn new(lhs: SymbolId, symbols: &[SymbolId]) -> Alternate {
        let data = AltData {
            lhs,
            symbols: symbols.iter().copied().collect(),
        };
        if let Some(i) = INTERNER.read().alts.get_index_of(&data) {
            return Alternate(i as u32);
        }
        let (i, _) = INTERNER.write().alts.insert_full(data);
        Alternate(i as u32)
    }

    pub fn lhs(self) -> SymbolId {
        INTERNER.read().alts[self.0 as usize].lhs
    }

    pub fn symbols(self) -> Vec<SymbolId> {
        INTERNER.read().alts[self.0 as usize].symbols.to_vec()
    }

    pub fn len(self) -> usize {
        INTERNER.read().alts[self.0 as usize].symbols.len()
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    /// The symbol at `index`, if any.
    pub fn symbol(self, index: usize) -> Option<SymbolId> {
        INTERNER.read().alts[self.0 as usize]
            .symbols
            .get(index)
            .copied()
    }

    /// The slot with the dot before the first symbol.
    pub fn first_slot(self) -> Slot {
        Slot { alt: self, dot: 0 }
    }

    /// The slot with the dot after the last symbol.
    pub fn last_slot(self) -> Slot {
        Slot {
            alt: self,
            dot: self.len() as u32,
        }
    }

    /// The slot with `dot` symbols before the dot.
    ///
    /// Panics if `dot` exceeds the alternate's length.
    pub fn slot(self, dot: usize) -> Slot {
        assert!(dot <= self.len(), "dot position outside alternate");
        Slot {
            alt: self,
            dot: dot as u32,
        }
    }
}

impl fmt::Debug for Alternate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table = INTERNER.read();
        let data = &table.alts[self.0 as usize];
        let mut out = String::new();
        table.write_symbol(data.lhs, &mut out);
        out.push_str(" ::=");
        for &s in &data.symbols {
            out.push(' ');
            table.write_symbol(s, &mut out);
        }
        f.write_str(&out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlotError {
    #[error("cannot advance past the end of `{0}`")]
    AtEnd(String),
}

/// A grammar position `lhs ::= pre . post`.
///
/// Two slots are equal iff their left-hand sides, `pre` and `post` agree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    alt: Alternate,
    dot: u32,
}

impl Slot {
    pub fn new(lhs: SymbolId, pre: &[SymbolId], post: &[SymbolId]) -> Slot {
        let symbols: Vec<SymbolId> = pre.iter().chain(post).copied().collect();
        Slot {
            alt: Alternate::new(lhs, &symbols),
            dot: pre.len() as u32,
        }
    }

    pub fn alternate(self) -> Alternate {
        self.alt
    }

    /// Number of symbols before the dot.
    pub fn dot(self) -> usize {
        self.dot as usize
    }

    pub fn lhs(self) -> SymbolId {
        self.alt.lhs()
    }

    pub fn pre(self) -> Vec<SymbolId> {
        let table = INTERNER.read();
        table.alts[self.alt.0 as usize].symbols[..self.dot as usize].to_vec()
    }

    pub fn post(self) -> Vec<SymbolId> {
        let table = INTERNER.read();
        table.alts[self.alt.0 as usize].symbols[self.dot as usize..].to_vec()
    }

    /// The symbol right after the dot.
    pub fn next_symbol(self) -> Option<SymbolId> {
        self.alt.symbol(self.dot as usize)
    }

    /// The last symbol of `pre`.
    pub fn previous_symbol(self) -> Option<SymbolId> {
        self.dot
            .checked_sub(1)
            .and_then(|i| self.alt.symbol(i as usize))
    }

    pub fn is_complete(self) -> bool {
        self.dot as usize == self.alt.len()
    }

    /// Moves the dot one symbol to the right.
    pub fn advance(self) -> Result<Slot, SlotError> {
        if self.is_complete() {
            Err(SlotError::AtEnd(self.to_string()))
        } else {
            Ok(Slot {
                alt: self.alt,
                dot: self.dot + 1,
            })
        }
    }

    /// Moves the dot one symbol to the left, if possible.
    pub fn retreat(self) -> Option<Slot> {
        self.dot
            .checked_sub(1)
            .map(|dot| Slot { alt: self.alt, dot })
    }

    /// Renders as `lhs ::= pre . post`.
    pub fn render(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table = INTERNER.read();
        let data = &table.alts[self.alt.0 as usize];
        let mut out = String::new();
        table.write_symbol(data.lhs, &mut out);
        out.push_str(" ::=");
        for (i, &s) in data.symbols.iter().enumerate() {
            if i == self.dot as usize {
                out.push_str(" .");
            }
            out.push(' ');
            table.write_symbol(s, &mut out);
        }
        if self.dot as usize == data.symbols.len() {
            out.push_str(" .");
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Slot {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Slot", 3)?;
        s.serialize_field("lhs", &self.lhs())?;
        s.serialize_field("pre", &self.pre())?;
        s.serialize_field("post", &self.post())?;
        s.end()
    }
}

/// A unit of work: progress through `slot` from `left` up to `right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Descriptor {
    pub slot: Slot,
    pub left: usize,
    pub right: usize,
}

/// A nonterminal together with the input position it was descended at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Commencement {
    pub nonterminal: SymbolId,
    pub left: usize,
}

/// A descriptor whose right extent is still unknown.
///
/// The dot of `slot` sits right after the nonterminal being waited on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContinuationId {
    pub slot: Slot,
    pub left: usize,
}

/// A forest edge `(slot, left, pivot, right)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BsrElement {
    pub slot: Slot,
    #[serde(rename = "l")]
    pub left: usize,
    #[serde(rename = "k")]
    pub pivot: usize,
    #[serde(rename = "r")]
    pub right: usize,
}

impl fmt::Display for BsrElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, {}, {}, {}",
            self.slot, self.left, self.pivot, self.right
        )
    }
}
