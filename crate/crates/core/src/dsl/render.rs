//! Canonical text form of a grammar AST; parsing the output yields an equal
//! AST.

use std::fmt::Write;

use super::ast::{
    escape_char, literal_name, CharClass, GrammarAst, Item, PatternSpec, SetItem, SymRef,
};
use crate::forest::Assoc;

pub fn render(ast: &GrammarAst) -> String {
    let mut out = String::new();
    for item in &ast.items {
        match item {
            Item::Token(t) => {
                let _ = writeln!(out, "%token {} {}", t.name, render_pattern(&t.pattern));
            }
            Item::Precedence(p) => {
                out.push_str(match p.assoc {
                    Assoc::Left => "%left",
                    Assoc::Right => "%right",
                    Assoc::NonAssoc => "%nonassoc",
                });
                for &c in &p.literals {
                    out.push(' ');
                    out.push_str(&literal_name(c));
                }
                out.push('\n');
            }
            Item::Rule(d) => {
                out.push_str(&d.name);
                if !d.params.is_empty() {
                    let _ = write!(out, "({})", d.params.join(", "));
                }
                out.push(':');
                for (i, alt) in d.alternates.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" |");
                    }
                    for r in alt {
                        out.push(' ');
                        out.push_str(&render_symref(r));
                    }
                }
                out.push('\n');
            }
        }
    }
    out
}

pub fn render_symref(r: &SymRef) -> String {
    match r {
        SymRef::Literal(c, _) => literal_name(*c),
        SymRef::Name { name, args, .. } if args.is_empty() => name.clone(),
        SymRef::Name { name, args, .. } => {
            let args: Vec<String> = args.iter().map(render_symref).collect();
            format!("{name}({})", args.join(", "))
        }
    }
}

fn render_pattern(p: &PatternSpec) -> String {
    match p {
        PatternSpec::Literal(c) => literal_name(*c),
        PatternSpec::Class(CharClass::Alpha) => "%alpha".into(),
        PatternSpec::Class(CharClass::Digit) => "%digit".into(),
        PatternSpec::Class(CharClass::Any) => "%any".into(),
        PatternSpec::Set(items) => {
            let mut out = String::from("[");
            for item in items {
                match *item {
                    SetItem::Char(c) => out.push_str(&set_char(c)),
                    SetItem::Range(lo, hi) => {
                        let _ = write!(out, "{}-{}", set_char(lo), set_char(hi));
                    }
                }
            }
            out.push(']');
            out
        }
    }
}

fn set_char(c: char) -> String {
    match c {
        ']' | '-' => format!("\\{c}"),
        c => escape_char(c, ']'),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_grammar;

    #[test]
    fn round_trip() {
        let text = "%token w [a-z\\-\\]]\n%right '^'\nX(p, q): | p X(q, 'x') '\\''\nY: w\n";
        let ast = parse_grammar(text).unwrap();
        let rendered = render(&ast);
        assert_eq!(
            rendered,
            "%token w [a-z\\-\\]]\n%right '^'\nX(p, q): | p X(q, 'x') '\\''\nY: w\n"
        );
        assert_eq!(parse_grammar(&rendered).unwrap(), ast);
    }
}
