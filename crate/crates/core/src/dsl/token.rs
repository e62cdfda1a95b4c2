//! Token models for grammar files: single characters or whitespace-separated
//! words.

use std::fmt;
use std::str::FromStr;

use super::ast::PatternSpec;

/// A token type grammar files can be elaborated over.
pub trait LexToken: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    /// Whether this token matches a token declared as `declared` (`None` for
    /// literal tokens) with the given pattern.
    fn matches(&self, declared: Option<&str>, pattern: &PatternSpec) -> bool;

    /// Splits input text into tokens.
    fn tokenize(text: &str) -> Vec<Self>;
}

impl LexToken for char {
    fn matches(&self, _declared: Option<&str>, pattern: &PatternSpec) -> bool {
        pattern.matches_char(*self)
    }

    fn tokenize(text: &str) -> Vec<char> {
        text.chars().collect()
    }
}

/// In word mode a declared token matches the word equal to its name and a
/// literal matches the one-character word.
impl LexToken for String {
    fn matches(&self, declared: Option<&str>, pattern: &PatternSpec) -> bool {
        match (declared, pattern) {
            (Some(name), _) => self == name,
            (None, PatternSpec::Literal(c)) => {
                let mut chars = self.chars();
                chars.next() == Some(*c) && chars.next().is_none()
            }
            (None, _) => false,
        }
    }

    fn tokenize(text: &str) -> Vec<String> {
        text.split_whitespace().map(str::to_owned).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TokenMode {
    #[default]
    Char,
    Words,
}

impl FromStr for TokenMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "char" => Ok(TokenMode::Char),
            "words" => Ok(TokenMode::Words),
            other => Err(format!(
                "unknown token mode `{other}` (expected char or words)"
            )),
        }
    }
}
