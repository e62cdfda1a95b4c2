//! The FUN-GLL recogniser.
//!
//! Matchers, continuations and the descend/ascend/continue actions are
//! represented as [`Task`] values on an explicit work queue instead of nested
//! closures, so the depth of a derivation never turns into call-stack depth.
//! Because the final state does not depend on the order in which pending
//! effects are applied, the queue discipline is a free parameter
//! ([`Schedule`]).
//!
//! A run is wrapped in the artificial start slot `__START ::= s .` at left
//! extent 0; its continuation records every right extent of `s` from 0 under
//! the commencement `(__START, 0)`.

use std::collections::VecDeque;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::grammar::{GrammarError, Symbol};
use crate::state::{Continuation, ParseState};
use crate::symbol::{
    Alternate, BsrElement, Commencement, ContinuationId, Descriptor, Slot, SymbolId,
};

/// Order in which pending effects are taken off the work queue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    #[default]
    Fifo,
    Lifo,
}

/// Descriptor budget used by the command line unless overridden.
pub const DEFAULT_FUEL: u64 = 10_000_000;

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Maximum number of descriptors to process; `None` is unlimited.
    pub fuel: Option<u64>,
    pub schedule: Schedule,
    /// Apply alternates and registered continuations in reverse order.
    pub reverse_order: bool,
}

impl ParseOptions {
    pub fn with_fuel(fuel: u64) -> Self {
        ParseOptions {
            fuel: Some(fuel),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("fuel exhausted: processed {processed} descriptors with a budget of {budget}")]
    ResourceExhausted { budget: u64, processed: u64 },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// The completed state of a run over `symbol`.
#[derive(Debug, Clone)]
pub struct Parse<T, V> {
    symbol: Symbol<T, V>,
    state: ParseState<T>,
}

impl<T, V> Parse<T, V> {
    pub fn symbol(&self) -> &Symbol<T, V> {
        &self.symbol
    }

    pub fn state(&self) -> &ParseState<T> {
        &self.state
    }

    pub fn into_state(self) -> ParseState<T> {
        self.state
    }

    /// Whether the start symbol derives the whole input.
    pub fn accepted(&self) -> bool {
        self.state.accepted()
    }

    /// Every `r` such that the start symbol derives `input[0..r]`, ascending.
    pub fn prefixes(&self) -> Vec<usize> {
        self.state.start_extents()
    }
}

impl<T> ParseState<T> {
    pub fn start_commencement() -> Commencement {
        Commencement {
            nonterminal: SymbolId::start(),
            left: 0,
        }
    }

    pub fn start_extents(&self) -> Vec<usize> {
        self.prel.extents_for(Self::start_commencement())
    }

    pub fn accepted(&self) -> bool {
        self.prel
            .contains(Self::start_commencement(), self.input().len())
    }
}

#[derive(Clone, Copy, Debug)]
enum Task {
    /// Run the matcher of `symbol` at `at`, continuing with `cont` for `cid`.
    Match {
        symbol: SymbolId,
        at: u32,
        cid: (Slot, u32),
        cont: Continuation,
    },
    /// Record a BSR element and process its descriptor if it is new.
    Continue {
        slot: Slot,
        left: u32,
        pivot: u32,
        right: u32,
    },
    /// Start every alternate of `nt` at `left`.
    Alternates {
        nt: SymbolId,
        left: u32,
    },
    Ascend {
        nt: SymbolId,
        left: u32,
        right: u32,
    },
}

struct Engine<'s, T, V> {
    symbol: &'s Symbol<T, V>,
    state: ParseState<T>,
    queue: VecDeque<Task>,
    schedule: Schedule,
    reverse: bool,
}

/// Runs the recogniser for `symbol` over `input`.
pub fn parse<T, V>(
    symbol: &Symbol<T, V>,
    input: Vec<T>,
    options: &ParseOptions,
) -> Result<Parse<T, V>, ParseError> {
    let mut engine = Engine {
        symbol,
        state: ParseState::new(input, options.fuel),
        queue: VecDeque::new(),
        schedule: options.schedule,
        reverse: options.reverse_order,
    };
    engine.run()?;
    Ok(Parse {
        symbol: symbol.clone(),
        state: engine.state,
    })
}

/// Recognises the whole input; returns the verdict with the final state.
pub fn run_recognize<T, V>(
    symbol: &Symbol<T, V>,
    input: Vec<T>,
) -> Result<(bool, ParseState<T>), ParseError> {
    let parse = parse(symbol, input, &ParseOptions::default())?;
    Ok((parse.accepted(), parse.into_state()))
}

/// Every right extent `r` such that the symbol derives `input[0..r]`.
pub fn run_prefix<T, V>(
    symbol: &Symbol<T, V>,
    input: Vec<T>,
) -> Result<(Vec<usize>, ParseState<T>), ParseError> {
    let parse = parse(symbol, input, &ParseOptions::default())?;
    Ok((parse.prefixes(), parse.into_state()))
}

impl<T, V> Engine<'_, T, V> {
    fn run(&mut self) -> Result<(), ParseError> {
        let start = self.symbol.id();
        let wrapper = Alternate::new(SymbolId::start(), &[start]);
        self.push(Task::Match {
            symbol: start,
            at: 0,
            cid: (wrapper.last_slot(), 0),
            cont: Continuation::Accept,
        });
        while let Some(task) = self.pop() {
            self.step(task)?;
        }
        Ok(())
    }

    fn push(&mut self, task: Task) {
        self.queue.push_back(task);
    }

    fn pop(&mut self) -> Option<Task> {
        match self.schedule {
            Schedule::Fifo => self.queue.pop_front(),
            Schedule::Lifo => self.queue.pop_back(),
        }
    }

    fn step(&mut self, task: Task) -> Result<(), ParseError> {
        match task {
            Task::Match {
                symbol,
                at,
                cid,
                cont,
            } if symbol.is_token() => {
                let pattern = self
                    .symbol
                    .grammar()
                    .token(symbol)
                    .ok_or_else(|| GrammarError::UnknownToken(symbol.to_string()))?;
                let matched = self
                    .state
                    .input()
                    .get(at as usize)
                    .is_some_and(|t| pattern.accepts(t));
                if matched {
                    self.apply(cont, cid, at, at + 1);
                } else {
                    let attempted = cid.0.retreat().expect("continuation slot follows a symbol");
                    self.state.stats.record_failure(at as usize, attempted);
                }
            }
            Task::Match {
                symbol,
                at,
                cid,
                cont,
            } => self.descend(symbol, at, cid, cont),
            Task::Continue {
                slot,
                left,
                pivot,
                right,
            } => self.continue_with(slot, left, pivot, right)?,
            Task::Alternates { nt, left } => {
                let instance = self.symbol.grammar().instance(nt)?;
                let alternates = instance
                    .alternates()
                    .iter()
                    .map(|(alt, _)| alt.first_slot());
                let starts: SmallVec<[Slot; 4]> = if self.reverse {
                    alternates.rev().collect()
                } else {
                    alternates.collect()
                };
                for slot in starts {
                    self.push(Task::Continue {
                        slot,
                        left,
                        pivot: left,
                        right: left,
                    });
                }
            }
            Task::Ascend { nt, left, right } => self.ascend(nt, left, right),
        }
        Ok(())
    }

    /// Applies a continuation for `cid` at `(pivot, right)`.
    fn apply(&mut self, cont: Continuation, cid: (Slot, u32), pivot: u32, right: u32) {
        let (slot, left) = cid;
        match cont {
            Continuation::Resume => self.push(Task::Continue {
                slot,
                left,
                pivot,
                right,
            }),
            Continuation::Accept => {
                // A token start leaves no other trace of its match.
                if slot.previous_symbol().is_some_and(SymbolId::is_token) {
                    self.state.bsrs.insert(BsrElement {
                        slot,
                        left: left as usize,
                        pivot: pivot as usize,
                        right: right as usize,
                    });
                }
                self.state
                    .prel
                    .insert(ParseState::<T>::start_commencement(), right as usize);
            }
        }
    }

    fn descend(&mut self, nt: SymbolId, at: u32, cid: (Slot, u32), cont: Continuation) {
        let c = Commencement {
            nonterminal: nt,
            left: at as usize,
        };
        let id = ContinuationId {
            slot: cid.0,
            left: cid.1 as usize,
        };
        self.state.continuations.insert(c, id, cont);
        let mut extents: SmallVec<[u32; 8]> = self.state.prel.raw_for(nt, at).into();
        if extents.is_empty() {
            self.push(Task::Alternates { nt, left: at });
            return;
        }
        if self.reverse {
            extents.reverse();
        }
        for r in extents {
            self.apply(cont, cid, at, r);
        }
    }

    fn ascend(&mut self, nt: SymbolId, left: u32, right: u32) {
        let c = Commencement {
            nonterminal: nt,
            left: left as usize,
        };
        self.state.prel.insert(c, right as usize);
        let mut waiting: SmallVec<[(Slot, u32); 8]> =
            self.state.continuations.raw_for(nt, left).into();
        if self.reverse {
            waiting.reverse();
        }
        for cid in waiting {
            let cont = self.state.continuations.continuation(cid);
            self.apply(cont, cid, left, right);
        }
    }

    fn continue_with(
        &mut self,
        slot: Slot,
        left: u32,
        pivot: u32,
        right: u32,
    ) -> Result<(), ParseError> {
        // Initial slots of non-empty alternates carry no derivation step.
        if slot.dot() > 0 || slot.is_complete() {
            self.state.bsrs.insert(BsrElement {
                slot,
                left: left as usize,
                pivot: pivot as usize,
                right: right as usize,
            });
        }
        let descriptor = Descriptor {
            slot,
            left: left as usize,
            right: right as usize,
        };
        if !self.state.uset.insert(descriptor) {
            return Ok(());
        }
        let budget = self.state.fuel();
        let stats = &mut self.state.stats;
        stats.descriptors_processed += 1;
        stats.fuel_consumed += 1;
        if let Some(budget) = budget {
            if stats.fuel_consumed > budget {
                return Err(ParseError::ResourceExhausted {
                    budget,
                    processed: stats.descriptors_processed,
                });
            }
        }
        stats.next_effect_invocations += 1;
        match slot.next_symbol() {
            None => self.push(Task::Ascend {
                nt: slot.lhs(),
                left,
                right,
            }),
            Some(next) => {
                let after = slot.advance().expect("slot has a next symbol");
                self.push(Task::Match {
                    symbol: next,
                    at: right,
                    cid: (after, left),
                    cont: Continuation::Resume,
                });
            }
        }
        Ok(())
    }
}

/// Convenience: a shared grammar plus a start id as a [`Symbol`].
pub fn symbol<T, V>(
    grammar: &Arc<crate::grammar::Grammar<T, V>>,
    id: SymbolId,
) -> Result<Symbol<T, V>, GrammarError> {
    Symbol::new(Arc::clone(grammar), id)
}
