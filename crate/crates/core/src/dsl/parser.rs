//! Lexer and recursive-descent parser for grammar files.

use std::fmt;

use thiserror::Error;

use super::ast::{
    CharClass, Definition, GrammarAst, Item, PatternSpec, Pos, PrecDecl, SetItem, SymRef, TokenDecl,
};
use crate::forest::Assoc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    fn at(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Literal(char),
    Set(Vec<SetItem>),
    Directive(String),
    Colon,
    Bar,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(n) => write!(f, "name `{n}`"),
            Tok::Literal(c) => write!(f, "literal {}", super::ast::literal_name(*c)),
            Tok::Set(_) => f.write_str("character set"),
            Tok::Directive(d) => write!(f, "`%{d}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn escaped(&mut self, start: Pos) -> Result<char, SyntaxError> {
        match self.bump() {
            Some('n') => Ok('\n'),
            Some('t') => Ok('\t'),
            Some('r') => Ok('\r'),
            Some(c) => Ok(c),
            None => Err(SyntaxError::at(start, "unterminated escape")),
        }
    }

    fn literal(&mut self, start: Pos) -> Result<char, SyntaxError> {
        let c = match self.bump() {
            Some('\\') => self.escaped(start)?,
            Some('\'') | Some('\n') | None => {
                return Err(SyntaxError::at(
                    start,
                    "expected a character inside the literal",
                ))
            }
            Some(c) => c,
        };
        match self.bump() {
            Some('\'') => Ok(c),
            _ => Err(SyntaxError::at(start, "expected `'` closing the literal")),
        }
    }

    fn set(&mut self, start: Pos) -> Result<Vec<SetItem>, SyntaxError> {
        let mut items = Vec::new();
        loop {
            let c = match self.bump() {
                None => return Err(SyntaxError::at(start, "expected `]` closing the set")),
                Some(']') => break,
                Some('\\') => self.escaped(start)?,
                Some(c) => c,
            };
            if self.peek() == Some('-') {
                self.bump();
                let hi = match self.bump() {
                    Some('\\') => self.escaped(start)?,
                    Some(']') | None => {
                        return Err(SyntaxError::at(
                            start,
                            "expected the upper bound of a range",
                        ))
                    }
                    Some(hi) => hi,
                };
                if hi < c {
                    return Err(SyntaxError::at(start, format!("empty range {c}-{hi}")));
                }
                items.push(SetItem::Range(c, hi));
            } else {
                items.push(SetItem::Char(c));
            }
        }
        Ok(items)
    }

    fn next_token(&mut self) -> Result<(Tok, Pos), SyntaxError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') => {
                    let start = self.pos();
                    self.bump();
                    if self.peek() != Some('-') {
                        return Err(SyntaxError::at(
                            start,
                            "unexpected `-` (comments start with `--`)",
                        ));
                    }
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let start = self.pos();
        let Some(c) = self.bump() else {
            return Ok((Tok::Eof, start));
        };
        let tok = match c {
            ':' => Tok::Colon,
            '|' => Tok::Bar,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '\'' => Tok::Literal(self.literal(start)?),
            '[' => Tok::Set(self.set(start)?),
            '%' => {
                let word = self.word();
                if word.is_empty() {
                    return Err(SyntaxError::at(
                        start,
                        "expected a directive name after `%`",
                    ));
                }
                Tok::Directive(word)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = c.to_string();
                name.push_str(&self.word());
                Tok::Name(name)
            }
            c => {
                return Err(SyntaxError::at(
                    start,
                    format!("unexpected character `{c}`"),
                ))
            }
        };
        Ok((tok, start))
    }

    fn word(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self
            .peek()
            .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            out.push(c);
            self.bump();
        }
        out
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut lexer = Lexer {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        let (tok, pos) = lexer.next_token()?;
        let end = tok == Tok::Eof;
        out.push((tok, pos));
        if end {
            return Ok(out);
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        tok
    }

    fn expected(&self, what: &str) -> SyntaxError {
        SyntaxError::at(
            self.pos(),
            format!("expected {what}, found {}", self.peek()),
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Tok::Name(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            _ => Err(self.expected(what)),
        }
    }

    fn grammar(&mut self) -> Result<GrammarAst, SyntaxError> {
        let mut items = Vec::new();
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Eof => return Ok(GrammarAst { items }),
                Tok::Directive(d) if d == "token" => {
                    self.bump();
                    let name = self.name("a token name")?;
                    let pattern = self.pattern()?;
                    items.push(Item::Token(TokenDecl { name, pattern, pos }));
                }
                Tok::Directive(d) => {
                    let assoc = match d.as_str() {
                        "left" => Assoc::Left,
                        "right" => Assoc::Right,
                        "nonassoc" => Assoc::NonAssoc,
                        _ => return Err(SyntaxError::at(pos, format!("unknown directive `%{d}`"))),
                    };
                    self.bump();
                    let mut literals = Vec::new();
                    while let Tok::Literal(c) = *self.peek() {
                        literals.push(c);
                        self.bump();
                    }
                    if literals.is_empty() {
                        return Err(self.expected("a literal after the precedence directive"));
                    }
                    items.push(Item::Precedence(PrecDecl {
                        assoc,
                        literals,
                        pos,
                    }));
                }
                Tok::Name(_) => items.push(Item::Rule(self.definition()?)),
                _ => return Err(self.expected("a declaration or a definition")),
            }
        }
    }

    fn pattern(&mut self) -> Result<PatternSpec, SyntaxError> {
        let spec = match self.peek() {
            Tok::Literal(c) => PatternSpec::Literal(*c),
            Tok::Set(items) => PatternSpec::Set(items.clone()),
            Tok::Directive(d) if d == "alpha" => PatternSpec::Class(CharClass::Alpha),
            Tok::Directive(d) if d == "digit" => PatternSpec::Class(CharClass::Digit),
            Tok::Directive(d) if d == "any" => PatternSpec::Class(CharClass::Any),
            _ => return Err(self.expected("a token pattern")),
        };
        self.bump();
        Ok(spec)
    }

    fn definition(&mut self) -> Result<Definition, SyntaxError> {
        let pos = self.pos();
        let name = self.name("a definition name")?;
        let mut params = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            params.push(self.name("a parameter name")?);
            while *self.peek() == Tok::Comma {
                self.bump();
                params.push(self.name("a parameter name")?);
            }
            self.expect(Tok::RParen, "`)` or `,` in the parameter list")?;
        }
        self.expect(Tok::Colon, "`:` after the definition head")?;
        let mut alternates = vec![self.alternate()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            alternates.push(self.alternate()?);
        }
        Ok(Definition {
            name,
            params,
            alternates,
            pos,
        })
    }

    /// Whether the name at the cursor begins the next definition.
    fn at_definition_head(&self) -> bool {
        match self.peek_at(1) {
            Tok::Colon => true,
            Tok::LParen => {
                let mut depth = 0usize;
                let mut i = 1;
                loop {
                    match self.peek_at(i) {
                        Tok::LParen => depth += 1,
                        Tok::RParen => {
                            depth -= 1;
                            if depth == 0 {
                                return *self.peek_at(i + 1) == Tok::Colon;
                            }
                        }
                        Tok::Eof => return false,
                        _ => {}
                    }
                    i += 1;
                }
            }
            _ => false,
        }
    }

    fn alternate(&mut self) -> Result<Vec<SymRef>, SyntaxError> {
        let mut symbols = Vec::new();
        loop {
            match self.peek() {
                Tok::Literal(_) => symbols.push(self.symref()?),
                Tok::Name(_) if !self.at_definition_head() => symbols.push(self.symref()?),
                _ => return Ok(symbols),
            }
        }
    }

    fn symref(&mut self) -> Result<SymRef, SyntaxError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Literal(c) => {
                self.bump();
                Ok(SymRef::Literal(c, pos))
            }
            Tok::Name(name) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    args.push(self.symref()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.symref()?);
                    }
                    self.expect(Tok::RParen, "`)` or `,` in the argument list")?;
                }
                Ok(SymRef::Name { name, args, pos })
            }
            _ => Err(self.expected("a symbol reference")),
        }
    }
}

/// Parses a grammar file.
pub fn parse_grammar(text: &str) -> Result<GrammarAst, SyntaxError> {
    Parser {
        toks: lex(text)?,
        at: 0,
    }
    .grammar()
}

/// Parses a single symbol reference such as `CSV(alpha)` or `'a'`.
pub fn parse_symref(text: &str) -> Result<SymRef, SyntaxError> {
    let mut parser = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let r = parser.symref()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.expected("end of the symbol reference"));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_definition() {
        let ast = parse_grammar("CSV(v): CSV(v) ',' CSV(v) | v").unwrap();
        let def = ast.definition("CSV").unwrap();
        assert_eq!(def.params, vec!["v"]);
        let lens: Vec<_> = def.alternates.iter().map(Vec::len).collect();
        assert_eq!(lens, vec![3, 1]);
    }

    #[test]
    fn within_definition() {
        let ast = parse_grammar("Within(l,r,x): l x r").unwrap();
        let def = ast.definition("Within").unwrap();
        assert_eq!(def.params.len(), 3);
        assert_eq!(def.alternates.len(), 1);
    }

    #[test]
    fn empty_alternate() {
        let ast = parse_grammar("X: X |").unwrap();
        let def = ast.definition("X").unwrap();
        assert_eq!(def.alternates.len(), 2);
        assert!(def.alternates[1].is_empty());
    }

    #[test]
    fn definitions_split_without_separators() {
        let text = "-- comment\nA: B 'x' | C(B)\nB: 'b'\nC(p): p p\n%token d %digit\n%left '+' '-'";
        let ast = parse_grammar(text).unwrap();
        assert_eq!(ast.definitions().count(), 3);
        assert_eq!(ast.definition("A").unwrap().alternates[0].len(), 2);
        assert_eq!(
            ast.token("d").unwrap().pattern,
            PatternSpec::Class(CharClass::Digit)
        );
        let prec: Vec<_> = ast.precedence().collect();
        assert_eq!(prec[0].literals, vec!['+', '-']);
    }

    #[test]
    fn sets_and_escapes() {
        let ast = parse_grammar(r"%token w [a-z_\]] X: '\'' '\\' w").unwrap();
        let PatternSpec::Set(items) = &ast.token("w").unwrap().pattern else {
            panic!("expected a set")
        };
        assert_eq!(
            items,
            &vec![
                SetItem::Range('a', 'z'),
                SetItem::Char('_'),
                SetItem::Char(']')
            ]
        );
        let alt = &ast.definition("X").unwrap().alternates[0];
        assert_eq!(alt[0], SymRef::literal('\''));
        assert_eq!(alt[1], SymRef::literal('\\'));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_grammar("A: 'x\nB: b").unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
        let err = parse_grammar("A 'x'").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        assert!(err.message.contains("`:`"), "{}", err.message);
        let err = parse_grammar("%token t\nA: t").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_grammar("%prec '+'").is_err());
        assert!(parse_grammar("A: B(").is_err());
    }

    #[test]
    fn symref_parsing() {
        assert_eq!(
            parse_symref("CSV(alpha)").unwrap(),
            SymRef::name("CSV", vec![SymRef::name("alpha", vec![])])
        );
        assert!(parse_symref("A B").is_err());
    }
}
