//! The grow-only structures of one parse run.
//!
//! Positions are stored as `u32` internally; the public surface speaks
//! `usize`.

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;

use crate::symbol::{BsrElement, Commencement, ContinuationId, Descriptor, Slot, SymbolId};

type Positions = SmallVec<[u32; 2]>;

fn pos(i: usize) -> u32 {
    u32::try_from(i).expect("input position exceeds u32")
}

/// Inserts `value` into an ascending vector; returns whether it was new.
fn insert_sorted<T: Ord>(list: &mut SmallVec<[T; 2]>, value: T) -> bool {
    match list.binary_search(&value) {
        Ok(_) => false,
        Err(at) => {
            list.insert(at, value);
            true
        }
    }
}

/// The set of descriptors seen so far (`uset`), nested left → right → slots.
#[derive(Default, Debug, Clone)]
pub struct DescriptorSet {
    by_left: Vec<FxHashMap<u32, FxHashSet<Slot>>>,
    len: usize,
}

impl DescriptorSet {
    /// Adds `d`; returns `true` iff it was not present.
    pub fn insert(&mut self, d: Descriptor) -> bool {
        if self.by_left.len() <= d.left {
            self.by_left.resize_with(d.left + 1, Default::default);
        }
        let fresh = self.by_left[d.left]
            .entry(pos(d.right))
            .or_default()
            .insert(d.slot);
        self.len += usize::from(fresh);
        fresh
    }

    pub fn contains(&self, d: &Descriptor) -> bool {
        self.by_left
            .get(d.left)
            .and_then(|by_right| by_right.get(&pos(d.right)))
            .is_some_and(|slots| slots.contains(&d.slot))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All descriptors, in no particular order.
    pub fn iter(&self) -> impl Iterator<Item = Descriptor> + '_ {
        self.by_left
            .iter()
            .enumerate()
            .flat_map(|(left, by_right)| {
                by_right.iter().flat_map(move |(&right, slots)| {
                    slots.iter().map(move |&slot| Descriptor {
                        slot,
                        left,
                        right: right as usize,
                    })
                })
            })
    }
}

/// What a registered continuation does once it receives `(pivot, right)`.
///
/// Every continuation the engine creates is determined by its
/// [`ContinuationId`], so the stored value only distinguishes the ordinary
/// case from the artificial start slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Continuation {
    /// Record the BSR element for the id's slot and resume the alternate.
    Resume,
    /// Complete the artificial start slot.
    Accept,
}

type CommKey = (SymbolId, u32);
type CidKey = (Slot, u32);

/// `grel` and `cmap`: continuations waiting on each commencement.
#[derive(Default, Debug, Clone)]
pub struct ContinuationRelation {
    grel: FxHashMap<CommKey, SmallVec<[CidKey; 2]>>,
    cmap: FxHashMap<CidKey, Continuation>,
    pairs: usize,
}

impl ContinuationRelation {
    /// Registers `cid` under `c`. The first continuation stored for a given
    /// id wins. Returns `true` iff the pair was new.
    pub fn insert(&mut self, c: Commencement, cid: ContinuationId, k: Continuation) -> bool {
        let key = (cid.slot, pos(cid.left));
        self.cmap.entry(key).or_insert(k);
        let fresh = insert_sorted(
            self.grel.entry((c.nonterminal, pos(c.left))).or_default(),
            key,
        );
        self.pairs += usize::from(fresh);
        fresh
    }

    /// Every pair registered under `c`, in canonical id order.
    pub fn continuations_for(&self, c: Commencement) -> Vec<(ContinuationId, Continuation)> {
        self.grel
            .get(&(c.nonterminal, pos(c.left)))
            .map(|cids| {
                cids.iter()
                    .map(|&(slot, left)| {
                        let cid = ContinuationId {
                            slot,
                            left: left as usize,
                        };
                        (cid, self.cmap[&(slot, left)])
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    pub(crate) fn raw_for(&self, nt: SymbolId, left: u32) -> &[CidKey] {
        self.grel.get(&(nt, left)).map_or(&[], |v| v.as_slice())
    }

    pub(crate) fn continuation(&self, key: CidKey) -> Continuation {
        self.cmap[&key]
    }

    /// Number of (commencement, id) pairs in `grel`.
    pub fn len(&self) -> usize {
        self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs == 0
    }

    /// Number of entries in `cmap`.
    pub fn stored_continuations(&self) -> usize {
        self.cmap.len()
    }

    /// Every `grel` pair, in no particular order.
    pub fn iter(&self) -> impl Iterator<Item = (Commencement, ContinuationId)> + '_ {
        self.grel.iter().flat_map(|(&(nonterminal, left), cids)| {
            cids.iter().map(move |&(slot, cl)| {
                (
                    Commencement {
                        nonterminal,
                        left: left as usize,
                    },
                    ContinuationId {
                        slot,
                        left: cl as usize,
                    },
                )
            })
        })
    }
}

/// `prel`: right extents discovered for each commencement.
#[derive(Default, Debug, Clone)]
pub struct ExtentRelation {
    map: FxHashMap<CommKey, Positions>,
    len: usize,
}

impl ExtentRelation {
    /// Returns `true` iff `(c, r)` was new.
    pub fn insert(&mut self, c: Commencement, r: usize) -> bool {
        debug_assert!(r >= c.left);
        let fresh = insert_sorted(
            self.map.entry((c.nonterminal, pos(c.left))).or_default(),
            pos(r),
        );
        self.len += usize::from(fresh);
        fresh
    }

    /// Ascending right extents recorded for `c`.
    pub fn extents_for(&self, c: Commencement) -> Vec<usize> {
        self.raw_for(c.nonterminal, pos(c.left))
            .iter()
            .map(|&r| r as usize)
            .collect()
    }

    pub fn contains(&self, c: Commencement, r: usize) -> bool {
        self.raw_for(c.nonterminal, pos(c.left))
            .binary_search(&pos(r))
            .is_ok()
    }

    pub(crate) fn raw_for(&self, nt: SymbolId, left: u32) -> &[u32] {
        self.map.get(&(nt, left)).map_or(&[], |v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Commencement, usize)> + '_ {
        self.map.iter().flat_map(|(&(nonterminal, left), rs)| {
            rs.iter().map(move |&r| {
                (
                    Commencement {
                        nonterminal,
                        left: left as usize,
                    },
                    r as usize,
                )
            })
        })
    }
}

/// The forest: BSR elements indexed by `(slot, left, right)`.
#[derive(Default, Debug, Clone)]
pub struct BsrSet {
    map: FxHashMap<(Slot, u32, u32), Positions>,
    len: usize,
}

impl BsrSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `true` iff `b` was new.
    pub fn insert(&mut self, b: BsrElement) -> bool {
        assert!(
            b.left <= b.pivot && b.pivot <= b.right,
            "malformed BSR element {b}"
        );
        let fresh = insert_sorted(
            self.map
                .entry((b.slot, pos(b.left), pos(b.right)))
                .or_default(),
            pos(b.pivot),
        );
        self.len += usize::from(fresh);
        fresh
    }

    pub fn contains(&self, b: &BsrElement) -> bool {
        self.raw_pivots(b.slot, b.left, b.right)
            .binary_search(&pos(b.pivot))
            .is_ok()
    }

    /// Ascending pivots `k` such that `(slot, l, k, r)` is present.
    pub fn pivots(&self, slot: Slot, l: usize, r: usize) -> Vec<usize> {
        self.raw_pivots(slot, l, r)
            .iter()
            .map(|&k| k as usize)
            .collect()
    }

    pub(crate) fn raw_pivots(&self, slot: Slot, l: usize, r: usize) -> &[u32] {
        self.map
            .get(&(slot, pos(l), pos(r)))
            .map_or(&[], |v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = BsrElement> + '_ {
        self.map.iter().flat_map(|(&(slot, l, r), ks)| {
            ks.iter().map(move |&k| BsrElement {
                slot,
                left: l as usize,
                pivot: k as usize,
                right: r as usize,
            })
        })
    }

    /// Elements sorted by rendered slot, then `l`, `k`, `r`.
    pub fn sorted(&self) -> Vec<BsrElement> {
        let mut rendered: FxHashMap<Slot, String> = FxHashMap::default();
        let mut items: Vec<(String, BsrElement)> = self
            .iter()
            .map(|b| {
                let text = rendered.entry(b.slot).or_insert_with(|| b.slot.render());
                (text.clone(), b)
            })
            .collect();
        items.sort_by(|(x, a), (y, b)| {
            x.cmp(y)
                .then(a.left.cmp(&b.left))
                .then(a.pivot.cmp(&b.pivot))
                .then(a.right.cmp(&b.right))
        });
        items.into_iter().map(|(_, b)| b).collect()
    }
}

impl FromIterator<BsrElement> for BsrSet {
    fn from_iter<I: IntoIterator<Item = BsrElement>>(iter: I) -> Self {
        let mut set = BsrSet::new();
        for b in iter {
            set.insert(b);
        }
        set
    }
}

/// Counters maintained during a run.
#[derive(Default, Debug, Clone, PartialEq, Eq)]
pub struct Stats {
    /// Descriptors added to `uset`, each of which is processed exactly once.
    pub descriptors_processed: u64,
    /// Invocations of the effect that follows a fresh descriptor.
    pub next_effect_invocations: u64,
    /// Fuel spent, in processed descriptors.
    pub fuel_consumed: u64,
    /// Furthest position at which a token match was attempted and failed.
    pub furthest_failure: Option<usize>,
    /// Slots whose next token was attempted at `furthest_failure`.
    pub failed_slots: BTreeSet<Slot>,
}

impl Stats {
    pub(crate) fn record_failure(&mut self, at: usize, slot: Slot) {
        match self.furthest_failure {
            Some(p) if p > at => {}
            Some(p) if p == at => {
                self.failed_slots.insert(slot);
            }
            _ => {
                self.furthest_failure = Some(at);
                self.failed_slots.clear();
                self.failed_slots.insert(slot);
            }
        }
    }
}

/// Everything one parse run builds, plus its immutable input.
#[derive(Debug, Clone)]
pub struct ParseState<T> {
    input: Vec<T>,
    pub(crate) uset: DescriptorSet,
    pub(crate) continuations: ContinuationRelation,
    pub(crate) prel: ExtentRelation,
    pub(crate) bsrs: BsrSet,
    pub(crate) stats: Stats,
    fuel: Option<u64>,
}

impl<T> ParseState<T> {
    pub fn new(input: Vec<T>, fuel: Option<u64>) -> Self {
        assert!(input.len() < u32::MAX as usize, "input too long");
        ParseState {
            input,
            uset: DescriptorSet::default(),
            continuations: ContinuationRelation::default(),
            prel: ExtentRelation::default(),
            bsrs: BsrSet::default(),
            stats: Stats::default(),
            fuel,
        }
    }

    pub fn input(&self) -> &[T] {
        &self.input
    }

    pub fn fuel(&self) -> Option<u64> {
        self.fuel
    }

    pub fn uset(&self) -> &DescriptorSet {
        &self.uset
    }

    pub fn continuations(&self) -> &ContinuationRelation {
        &self.continuations
    }

    pub fn prel(&self) -> &ExtentRelation {
        &self.prel
    }

    pub fn bsrs(&self) -> &BsrSet {
        &self.bsrs
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn add_descriptor(&mut self, d: Descriptor) -> bool {
        debug_assert!(d.left <= d.right && d.right <= self.input.len());
        self.uset.insert(d)
    }

    pub fn has_descriptor(&self, d: &Descriptor) -> bool {
        self.uset.contains(d)
    }

    pub fn add_continuation(&mut self, c: Commencement, cid: ContinuationId, k: Continuation) {
        self.continuations.insert(c, cid, k);
    }

    pub fn continuations_for(&self, c: Commencement) -> Vec<(ContinuationId, Continuation)> {
        self.continuations.continuations_for(c)
    }

    pub fn add_extent(&mut self, c: Commencement, r: usize) {
        self.prel.insert(c, r);
    }

    pub fn extents_for(&self, c: Commencement) -> Vec<usize> {
        self.prel.extents_for(c)
    }

    pub fn add_bsr(&mut self, b: BsrElement) {
        self.bsrs.insert(b);
    }

    pub fn pivots(&self, slot: Slot, l: usize, r: usize) -> Vec<usize> {
        self.bsrs.pivots(slot, l, r)
    }
}
