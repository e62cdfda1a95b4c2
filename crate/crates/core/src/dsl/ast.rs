use std::fmt;

use crate::forest::Assoc;

/// A source position. Positions are informational: every `Pos` compares
/// equal, so ASTs compare structurally.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CharClass {
    Alpha,
    Digit,
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetItem {
    Char(char),
    Range(char, char),
}

impl SetItem {
    pub fn contains(self, c: char) -> bool {
        match self {
            SetItem::Char(x) => x == c,
            SetItem::Range(lo, hi) => lo <= c && c <= hi,
        }
    }
}

/// What a declared token matches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternSpec {
    Literal(char),
    Class(CharClass),
    Set(Vec<SetItem>),
}

impl PatternSpec {
    pub fn matches_char(&self, c: char) -> bool {
        match self {
            PatternSpec::Literal(x) => *x == c,
            PatternSpec::Class(CharClass::Alpha) => c.is_alphabetic(),
            PatternSpec::Class(CharClass::Digit) => c.is_ascii_digit(),
            PatternSpec::Class(CharClass::Any) => true,
            PatternSpec::Set(items) => items.iter().any(|i| i.contains(c)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenDecl {
    pub name: String,
    pub pattern: PatternSpec,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecDecl {
    pub assoc: Assoc,
    pub literals: Vec<char>,
    pub pos: Pos,
}

/// A reference to a symbol inside an alternate or an argument list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymRef {
    Literal(char, Pos),
    Name {
        name: String,
        args: Vec<SymRef>,
        pos: Pos,
    },
}

impl SymRef {
    pub fn pos(&self) -> Pos {
        match self {
            SymRef::Literal(_, pos) | SymRef::Name { pos, .. } => *pos,
        }
    }

    pub fn name(name: &str, args: Vec<SymRef>) -> SymRef {
        SymRef::Name {
            name: name.to_owned(),
            args,
            pos: Pos::default(),
        }
    }

    pub fn literal(c: char) -> SymRef {
        SymRef::Literal(c, Pos::default())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<String>,
    /// Each alternate is a sequence of references; empty means epsilon.
    pub alternates: Vec<Vec<SymRef>>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Token(TokenDecl),
    Precedence(PrecDecl),
    Rule(Definition),
}

/// A parsed grammar file, declarations in source order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarAst {
    pub items: Vec<Item>,
}

impl GrammarAst {
    pub fn tokens(&self) -> impl Iterator<Item = &TokenDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Token(t) => Some(t),
            _ => None,
        })
    }

    pub fn precedence(&self) -> impl Iterator<Item = &PrecDecl> {
        self.items.iter().filter_map(|i| match i {
            Item::Precedence(p) => Some(p),
            _ => None,
        })
    }

    pub fn definitions(&self) -> impl Iterator<Item = &Definition> {
        self.items.iter().filter_map(|i| match i {
            Item::Rule(d) => Some(d),
            _ => None,
        })
    }

    pub fn definition(&self, name: &str) -> Option<&Definition> {
        self.definitions().find(|d| d.name == name)
    }

    pub fn token(&self, name: &str) -> Option<&TokenDecl> {
        self.tokens().find(|t| t.name == name)
    }
}

/// The token name a literal character is registered under: its quoted form.
pub fn literal_name(c: char) -> String {
    format!("'{}'", escape_char(c, '\''))
}

pub(crate) fn escape_char(c: char, quote: char) -> String {
    match c {
        '\\' => "\\\\".into(),
        '\n' => "\\n".into(),
        '\t' => "\\t".into(),
        '\r' => "\\r".into(),
        c if c == quote => format!("\\{c}"),
        c => c.to_string(),
    }
}
