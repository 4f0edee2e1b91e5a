//! Text syntax for formulae, sequents and derivations.
//!
//! ```text
//! form  := "bot" | "top" | atom | "~" form
//!        | "(" form "&" form ")" | "(" form "|" form ")"
//!        | ("forall" | "exists") var "." form
//! atom  := "P" nat "(" [var ("," var)*] ")"
//! var   := "x" nat
//! seq   := "[" [form (";" form)*] "]" "=>" "[" [form (";" form)*] "]"
//! deriv := "(" tag seq deriv* ")"
//! ```
//!
//! Whitespace is insignificant and `#` starts a comment running to the end
//! of the line. Binary connectives are always parenthesized. Named binders
//! are converted to de Bruijn indices with [`bind`] and printed back with
//! the smallest name not free in the quantified formula.

use std::fmt::{self, Write as _};

use craig_core::calculus::{ArityError, Derivation, FormulaSet, RuleKind, Sequent};
use craig_core::formula::{bind, free_var_set, inst, smallest_outside, Formula, PredId, VarId};
use thiserror::Error;

/// Deepest nesting the parser accepts before giving up.
pub const MAX_DEPTH: usize = 256;

/// 1-based position of the offending character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub const START: Position = Position { line: 1, column: 1 };
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected}, found {found}")]
    Unexpected {
        expected: &'static str,
        found: String,
    },
    #[error("unexpected character {0:?}")]
    BadChar(char),
    #[error("number out of range")]
    Number,
    #[error("nesting deeper than {MAX_DEPTH}")]
    TooDeep,
    #[error("unknown rule tag `{0}`")]
    UnknownTag(String),
    #[error(transparent)]
    Arity(ArityError),
    #[error("invalid UTF-8")]
    Utf8,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Position,
    pub kind: ParseErrorKind,
}

/// Decodes input bytes, locating the first invalid sequence.
pub fn decode(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
        ParseError {
            pos: advance(Position::START, valid),
            kind: ParseErrorKind::Utf8,
        }
    })
}

/// Position reached after reading `text` from `from`.
pub(crate) fn advance(from: Position, text: &str) -> Position {
    let mut pos = from;
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Semi,
    Comma,
    Dot,
    Amp,
    Bar,
    Tilde,
    Arrow,
    Colon,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Arrow => f.write_str("`=>`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

/// Recursive-descent parser over a token stream.
pub(crate) struct Parser {
    toks: Vec<(Tok, Position)>,
    at: usize,
    depth: usize,
}

fn lex(text: &str, start: Position) -> Result<Vec<(Tok, Position)>, ParseError> {
    let mut out = Vec::new();
    let mut pos = start;
    let mut end = start;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let here = pos;
        let step = |pos: &mut Position, c: char| {
            if c == '\n' {
                pos.line += 1;
                pos.column = 1;
            } else {
                pos.column += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            step(&mut pos, c);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                step(&mut pos, c);
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                word.push(c);
                chars.next();
                step(&mut pos, c);
            }
            out.push((Tok::Word(word), here));
            end = pos;
            continue;
        }
        chars.next();
        step(&mut pos, c);
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '~' => Tok::Tilde,
            ':' => Tok::Colon,
            '=' if chars.peek() == Some(&'>') => {
                chars.next();
                step(&mut pos, '>');
                Tok::Arrow
            }
            other => {
                return Err(ParseError {
                    pos: here,
                    kind: ParseErrorKind::BadChar(other),
                })
            }
        };
        out.push((tok, here));
        end = pos;
    }
    out.push((Tok::Eof, end));
    Ok(out)
}

// `prefix` followed by a decimal number, e.g. `P12` or `x0`.
fn numbered(word: &str, prefix: char) -> Option<Result<u32, ParseErrorKind>> {
    let digits = word.strip_prefix(prefix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    // Variables are shifted under binders, so leave headroom.
    Some(
        digits
            .parse::<u32>()
            .ok()
            .filter(|&n| n < 1 << 31)
            .ok_or(ParseErrorKind::Number),
    )
}

impl Parser {
    pub(crate) fn new(text: &str, start: Position) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(text, start)?,
            at: 0,
            depth: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Position {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &'static str) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            kind: ParseErrorKind::Unexpected {
                expected,
                found: self.peek().to_string(),
            },
        })
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(expected)
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError {
                pos: self.pos(),
                kind: ParseErrorKind::TooDeep,
            });
        }
        Ok(())
    }

    fn number(&mut self, prefix: char, expected: &'static str) -> Result<u32, ParseError> {
        let pos = self.pos();
        let parsed = match self.peek() {
            Tok::Word(w) => numbered(w, prefix),
            _ => None,
        };
        match parsed {
            Some(Ok(n)) => {
                self.bump();
                Ok(n)
            }
            Some(Err(kind)) => Err(ParseError { pos, kind }),
            None => self.error(expected),
        }
    }

    fn var(&mut self) -> Result<VarId, ParseError> {
        self.number('x', "a variable").map(VarId)
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let f = self.formula_inner()?;
        self.depth -= 1;
        Ok(f)
    }

    fn formula_inner(&mut self) -> Result<Formula, ParseError> {
        const EXPECTED: &str = "a formula";
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.formula()?))
            }
            Tok::LParen => {
                self.bump();
                let a = self.formula()?;
                let and = match self.peek() {
                    Tok::Amp => true,
                    Tok::Bar => false,
                    _ => return self.error("`&` or `|`"),
                };
                self.bump();
                let b = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if and {
                    Formula::and(a, b)
                } else {
                    Formula::or(a, b)
                })
            }
            Tok::Word(w) => match w.as_str() {
                "bot" => {
                    self.bump();
                    Ok(Formula::Bot)
                }
                "top" => {
                    self.bump();
                    Ok(Formula::Top)
                }
                "forall" | "exists" => {
                    let q = if w == "forall" {
                        craig_core::Quantifier::All
                    } else {
                        craig_core::Quantifier::Ex
                    };
                    self.bump();
                    let a = self.var()?;
                    self.expect(Tok::Dot, "`.`")?;
                    let body = self.formula()?;
                    Ok(bind(q, a, &body))
                }
                _ if numbered(&w, 'P').is_some() => {
                    let p = self.number('P', EXPECTED)?;
                    self.expect(Tok::LParen, "`(`")?;
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.var()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.var()?);
                        }
                    }
                    self.expect(Tok::RParen, "`,` or `)`")?;
                    Ok(Formula::Atom(PredId(p), args))
                }
                _ => self.error(EXPECTED),
            },
            _ => self.error(EXPECTED),
        }
    }

    /// `[A; B; ...]`, in surface order.
    pub(crate) fn formula_list(&mut self) -> Result<Vec<Formula>, ParseError> {
        self.expect(Tok::LBrack, "`[`")?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RBrack {
            out.push(self.formula()?);
            while *self.peek() == Tok::Semi {
                self.bump();
                out.push(self.formula()?);
            }
        }
        self.expect(Tok::RBrack, "`;` or `]`")?;
        Ok(out)
    }

    pub(crate) fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let gamma: FormulaSet = self.formula_list()?.into_iter().collect();
        self.expect(Tok::Arrow, "`=>`")?;
        let delta: FormulaSet = self.formula_list()?.into_iter().collect();
        Ok(Sequent::new(gamma, delta))
    }

    pub(crate) fn derivation(&mut self) -> Result<Derivation, ParseError> {
        self.enter()?;
        let open = self.pos();
        self.expect(Tok::LParen, "`(`")?;
        let tag_pos = self.pos();
        let kind = match self.peek() {
            Tok::Word(w) => RuleKind::from_name(w).ok_or_else(|| ParseError {
                pos: tag_pos,
                kind: ParseErrorKind::UnknownTag(w.clone()),
            })?,
            _ => return self.error("a rule tag"),
        };
        self.bump();
        let seq = self.sequent()?;
        let mut subs = Vec::new();
        while *self.peek() == Tok::LParen {
            subs.push(self.derivation()?);
        }
        self.expect(Tok::RParen, "`(` or `)`")?;
        self.depth -= 1;
        Derivation::from_parts(kind, seq, subs).map_err(|e| ParseError {
            pos: open,
            kind: ParseErrorKind::Arity(e),
        })
    }
}

fn parse_all<T>(
    text: &str,
    f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut p = Parser::new(text, Position::START)?;
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_all(text, Parser::formula)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    parse_all(text, Parser::sequent)
}

pub fn parse_derivation(text: &str) -> Result<Derivation, ParseError> {
    parse_all(text, Parser::derivation)
}

pub fn print_formula(a: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, a);
    out
}

fn write_formula(out: &mut String, a: &Formula) {
    match a {
        Formula::Atom(p, args) => {
            let _ = write!(out, "{p}(");
            for (i, v) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push(')');
        }
        Formula::Bot => out.push_str("bot"),
        Formula::Top => out.push_str("top"),
        Formula::And(l, r) | Formula::Or(l, r) => {
            out.push('(');
            write_formula(out, l);
            out.push_str(if matches!(a, Formula::And(..)) {
                " & "
            } else {
                " | "
            });
            write_formula(out, r);
            out.push(')');
        }
        Formula::Not(b) => {
            out.push('~');
            write_formula(out, b);
        }
        Formula::FAll(_) | Formula::FEx(_) => {
            let (q, _) = a.as_quantified().expect("quantified");
            let free = free_var_set(a);
            let name = smallest_outside(|v| free.contains(&v));
            let body = inst(q, name, a).expect("head matches");
            let word = match q {
                craig_core::Quantifier::All => "forall",
                craig_core::Quantifier::Ex => "exists",
            };
            let _ = write!(out, "{word} {name}. ");
            write_formula(out, &body);
        }
    }
}

fn write_list(out: &mut String, xs: &FormulaSet) {
    out.push('[');
    for (i, f) in xs.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        write_formula(out, f);
    }
    out.push(']');
}

pub fn print_formula_list(xs: &FormulaSet) -> String {
    let mut out = String::new();
    write_list(&mut out, xs);
    out
}

pub fn print_sequent(s: &Sequent) -> String {
    let mut out = String::new();
    write_sequent(&mut out, s);
    out
}

fn write_sequent(out: &mut String, s: &Sequent) {
    write_list(out, &s.antecedent);
    out.push_str(" => ");
    write_list(out, &s.succedent);
}

/// Single-line s-expression.
pub fn print_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    write_derivation(&mut out, d);
    out
}

fn write_derivation(out: &mut String, d: &Derivation) {
    out.push('(');
    out.push_str(d.kind().name());
    out.push(' ');
    write_sequent(out, d.root());
    for p in d.premises() {
        out.push(' ');
        write_derivation(out, p);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Formula {
        Formula::atom(n, &[])
    }

    #[test]
    fn formula_examples() {
        assert_eq!(parse_formula("P0()"), Ok(p(0)));
        assert_eq!(
            parse_formula("forall x5. P0(x5,x3)"),
            Ok(Formula::fall(Formula::atom(0, &[0, 4])))
        );
        assert_eq!(
            parse_formula("(~P1() & bot)"),
            Ok(Formula::and(Formula::not(p(1)), Formula::Bot))
        );
        assert_eq!(
            parse_formula(" ( top\r\n|  P2 ( x1 , x0 ) ) "),
            parse_formula("(top | P2(x1,x0))")
        );
    }

    #[test]
    fn print_examples() {
        assert_eq!(
            print_formula(&Formula::fall(Formula::atom(0, &[0]))),
            "forall x0. P0(x0)"
        );
        assert_eq!(
            print_formula(&Formula::fall(Formula::atom(0, &[0, 4]))),
            "forall x0. P0(x0,x3)"
        );
        assert_eq!(
            print_formula(&Formula::fex(Formula::fall(Formula::atom(2, &[1, 0, 2])))),
            "exists x1. forall x2. P2(x1,x2,x0)"
        );
        assert_eq!(
            print_formula(&Formula::or(Formula::Top, Formula::not(Formula::Bot))),
            "(top | ~bot)"
        );
    }

    #[test]
    fn binder_scope_extends_right() {
        let f = parse_formula("forall x0. (P0(x0) & P1(x0))").unwrap();
        assert_eq!(
            f,
            Formula::fall(Formula::and(Formula::atom(0, &[0]), Formula::atom(1, &[0])))
        );
        let g = parse_formula("~forall x0. ~P0(x0)").unwrap();
        assert_eq!(
            g,
            Formula::not(Formula::fall(Formula::not(Formula::atom(0, &[0]))))
        );
    }

    #[test]
    fn derivation_examples() {
        let init = parse_derivation("(Init [P0()] => [P0()])").unwrap();
        assert_eq!(
            init,
            Derivation::Init(Sequent::new(
                FormulaSet::singleton(p(0)),
                FormulaSet::singleton(p(0))
            ))
        );
        let text = "(AndL [(P0() & P1())] => [P0()] (Init [P0();P1();(P0() & P1())] => [P0()]))";
        let d = parse_derivation(text).unwrap();
        assert_eq!(d.kind(), RuleKind::AndL);
        assert_eq!(print_derivation(&d), text);
        // Sides are canonicalized.
        let shuffled = parse_derivation("(Init [P1();P0();P0()] => [P0()])").unwrap();
        assert_eq!(print_derivation(&shuffled), "(Init [P0();P1()] => [P0()])");
    }

    #[test]
    fn arity_error_names_tag() {
        let e = parse_derivation("(AndR [] => [(P0() & P0())] (Init [] => [P0()]))").unwrap_err();
        assert_eq!(e.pos, Position::START);
        assert!(e.to_string().contains("AndR takes 2"), "{e}");
        let e = parse_derivation("(Init [P0()] => [P0()] (Init [P0()] => [P0()]))").unwrap_err();
        assert!(e.to_string().contains("Init takes 0"), "{e}");
    }

    #[test]
    fn error_positions() {
        let e = parse_formula("(P0() &\n  P1() ").unwrap_err();
        assert_eq!(e.pos, Position { line: 2, column: 7 });
        let e = parse_formula("P0(y1)").unwrap_err();
        assert_eq!(e.pos, Position { line: 1, column: 4 });
        let e = parse_formula("P0() $").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BadChar('$'));
        let e = parse_derivation("(Cut [] => [])").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownTag("Cut".into()));
        assert_eq!(
            parse_formula("P4294967296()").unwrap_err().kind,
            ParseErrorKind::Number
        );
        assert_eq!(
            parse_formula("P0(x2147483648)").unwrap_err().kind,
            ParseErrorKind::Number
        );
        assert_eq!(
            decode(b"ab\n\xffc").unwrap_err().pos,
            Position { line: 2, column: 1 }
        );
    }

    #[test]
    fn nesting_limit() {
        let deep = "~".repeat(MAX_DEPTH + 1) + "bot";
        assert_eq!(
            parse_formula(&deep).unwrap_err().kind,
            ParseErrorKind::TooDeep
        );
        let ok = "~".repeat(MAX_DEPTH - 1) + "bot";
        assert!(parse_formula(&ok).is_ok());
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(parse_formula("# a comment\nP0() # trailing"), Ok(p(0)));
    }
}
