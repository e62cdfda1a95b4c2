use std::fmt;

use serde::Serialize;

use crate::state::ParseState;
use crate::symbol::{Slot, SymbolId};

/// A token match that failed at the furthest position any match reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub position: usize,
    /// The slot whose next symbol was attempted.
    pub slot: Slot,
    pub expected: SymbolId,
    /// The token found there; `None` at end of input.
    pub got: Option<String>,
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "position {}: expected {} at `{}`, got ",
            self.position, self.expected, self.slot
        )?;
        match &self.got {
            Some(t) => write!(f, "{t}"),
            None => write!(f, "end of input"),
        }
    }
}

/// Up to `n` reports at the furthest failure position, ordered by rendered
/// slot. `None` when the run accepted, since there is nothing to report.
pub fn extract_errors<T: fmt::Display>(
    state: &ParseState<T>,
    n: usize,
) -> Option<Vec<ErrorReport>> {
    if state.accepted() {
        return None;
    }
    let stats = state.stats();
    let Some(position) = stats.furthest_failure else {
        return Some(Vec::new());
    };
    let got = state.input().get(position).map(ToString::to_string);
    let mut slots: Vec<(String, Slot)> = stats
        .failed_slots
        .iter()
        .map(|s| (s.render(), *s))
        .collect();
    slots.sort();
    Some(
        slots
            .into_iter()
            .filter_map(|(_, slot)| {
                Some(ErrorReport {
                    position,
                    slot,
                    expected: slot.next_symbol()?,
                    got: got.clone(),
                })
            })
            .take(n)
            .collect(),
    )
}
