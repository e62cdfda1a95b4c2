//! Helpers shared by the integration tests: corpus loading, a random grammar
//! family and a brute-force derivation counter that never looks at a BSR set.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use fungll::dsl::{elaborate, parse_grammar, GrammarAst, PatternSpec, SymRef};
use fungll::{parse, BsrElement, Commencement, Descriptor, ParseOptions, ParseState, Symbol};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn grammar_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../grammars")
        .join(file)
}

pub fn corpus(file: &str) -> GrammarAst {
    let text = std::fs::read_to_string(grammar_path(file)).expect("corpus grammar");
    parse_grammar(&text).expect("corpus grammar parses")
}

pub fn load(file: &str, start: &str) -> Symbol<char, ()> {
    elaborate::<char>(&corpus(file), start).expect("corpus grammar elaborates")
}

pub fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

/// The E grammar of the golden trace: `E ::= E E E | 'a' | ε`.
pub fn e_grammar() -> Symbol<char, ()> {
    load("e.grammar", "E")
}

pub fn state_of(
    symbol: &Symbol<char, ()>,
    input: &str,
    options: &ParseOptions,
) -> ParseState<char> {
    parse(symbol, chars(input), options)
        .expect("parse within budget")
        .into_state()
}

/// Everything a run produced, as order-free sets.
#[derive(Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub uset: HashSet<Descriptor>,
    pub prel: HashSet<(Commencement, usize)>,
    pub bsrs: HashSet<BsrElement>,
}

pub fn snapshot(state: &ParseState<char>) -> Snapshot {
    Snapshot {
        uset: state.uset().iter().collect(),
        prel: state.prel().iter().collect(),
        bsrs: state.bsrs().iter().collect(),
    }
}

/// Tokens of the random family.
pub const ALPHABET: [char; 2] = ['a', 'b'];

/// A random grammar with at most 4 nonterminals, 3 alternates each and
/// alternates of length at most 3 over `'a'`, `'b'`. `N0` is the start.
pub fn random_grammar(rng: &mut ChaCha8Rng) -> String {
    let nts = rng.gen_range(1..=4);
    let mut text = String::new();
    for i in 0..nts {
        text.push_str(&format!("N{i}:"));
        let alts = rng.gen_range(1..=3);
        for j in 0..alts {
            if j > 0 {
                text.push_str(" |");
            }
            for _ in 0..rng.gen_range(0..=3) {
                if rng.gen_bool(0.5) {
                    text.push_str(&format!(" '{}'", ALPHABET.choose(rng).unwrap()));
                } else {
                    text.push_str(&format!(" N{}", rng.gen_range(0..nts)));
                }
            }
        }
        text.push('\n');
    }
    text
}

pub fn random_input(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

/// A string derived from `N0` by random expansion, or a random string when
/// expansion runs past `max_len` tokens or the depth bound. Biases inputs
/// towards members of the language.
pub fn derived_or_random(ast: &GrammarAst, rng: &mut ChaCha8Rng, max_len: usize) -> String {
    fn expand(
        ast: &GrammarAst,
        name: &str,
        rng: &mut ChaCha8Rng,
        depth: usize,
        out: &mut String,
        max_len: usize,
    ) -> bool {
        if depth == 0 || out.len() > max_len {
            return false;
        }
        let def = ast.definition(name).expect("defined");
        let alt = def.alternates.choose(rng).unwrap();
        alt.iter().all(|s| match s {
            SymRef::Literal(c, _) => {
                out.push(*c);
                out.len() <= max_len
            }
            SymRef::Name { name, .. } => expand(ast, name, rng, depth - 1, out, max_len),
        })
    }
    if rng.gen_bool(0.5) {
        let mut out = String::new();
        if expand(ast, "N0", rng, 12, &mut out, max_len) {
            return out;
        }
    }
    random_input(rng, max_len)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counts derivations of a parameter-free grammar directly over the input,
/// trying every split point, with the same curtailment rule as the forest:
/// a nonterminal already open at the same extents derives nothing, and the
/// open set is cleared whenever extents change.
pub struct BruteCounter<'a> {
    ast: &'a GrammarAst,
    input: &'a [char],
    memo: HashMap<(String, usize, usize, BTreeSet<String>), u128>,
}

impl<'a> BruteCounter<'a> {
    pub fn new(ast: &'a GrammarAst, input: &'a [char]) -> Self {
        assert!(ast.definitions().all(|d| d.params.is_empty()));
        BruteCounter {
            ast,
            input,
            memo: HashMap::new(),
        }
    }

    pub fn count(&mut self, name: &str) -> u128 {
        self.nonterminal(name, 0, self.input.len(), &BTreeSet::new())
    }

    fn nonterminal(&mut self, name: &str, l: usize, r: usize, open: &BTreeSet<String>) -> u128 {
        if open.contains(name) {
            return 0;
        }
        let key = (name.to_owned(), l, r, open.clone());
        if let Some(&n) = self.memo.get(&key) {
            return n;
        }
        let def = self.ast.definition(name).expect("defined").clone();
        let mut total = 0;
        for alt in &def.alternates {
            total += self.sequence(name, alt, l, r, l, open);
        }
        self.memo.insert(key, total);
        total
    }

    /// Ways `alt` derives `input[at..r]` given that it started at `l`.
    fn sequence(
        &mut self,
        parent: &str,
        alt: &[SymRef],
        l: usize,
        r: usize,
        at: usize,
        open: &BTreeSet<String>,
    ) -> u128 {
        let Some((first, rest)) = alt.split_first() else {
            return u128::from(at == r);
        };
        let mut total = 0;
        for end in at..=r {
            let child_open = if (at, end) == (l, r) {
                let mut o = open.clone();
                o.insert(parent.to_owned());
                o
            } else {
                BTreeSet::new()
            };
            let here = self.symbol(first, at, end, &child_open);
            if here > 0 {
                total += here * self.sequence(parent, rest, l, r, end, open);
            }
        }
        total
    }

    fn symbol(&mut self, s: &SymRef, l: usize, r: usize, open: &BTreeSet<String>) -> u128 {
        let token =
            |pattern: &PatternSpec| u128::from(r == l + 1 && pattern.matches_char(self.input[l]));
        match s {
            SymRef::Literal(c, _) => token(&PatternSpec::Literal(*c)),
            SymRef::Name { name, .. } => match self.ast.token(name) {
                Some(decl) => token(&decl.pattern),
                None => self.nonterminal(name, l, r, open),
            },
        }
    }
}

pub fn catalan(n: u32) -> u128 {
    let mut c: u128 = 1;
    for i in 0..u128::from(n) {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// `n` copies of `a` joined by `+`.
pub fn sum_of(n: usize) -> String {
    vec!["a"; n].join("+")
}
