//! Propositional syntax: atoms, formulas, parsing, printing, and the
//! structural measures the rest of the crate builds on.
//!
//! Concrete grammar (ASCII connectives, whitespace insignificant):
//!
//! ```text
//! formula ::= disj ("->" formula)?          right-associative
//! disj    ::= conj ("\/" conj)*             left-associative
//! conj    ::= unary ("/\" unary)*           left-associative
//! unary   ::= "~" unary | "bot" | atom | "(" formula ")"
//! atom    ::= letter (letter | digit | "_")*
//! ```
//!
//! `~f` is surface sugar for `f -> bot`; the AST has no negation node.
//! Precedence is `~` > `/\` > `\/` > `->`. The canonical printer emits
//! minimal parentheses and never uses `~`, so printed output reparses to
//! the identical tree.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Surface token for absurdity. Never a legal atom name.
pub const ABSURDITY_TOKEN: &str = "bot";

/// Atom used as the rewrite target when [`normalize_bot`] moves absurdity
/// into conclusion position. Any atom works (`z -> z` is provable no matter
/// what `z` names), so a fixed choice keeps output deterministic.
pub const NORMALIZE_ATOM: &str = "z";

/// A basic sentence: a named propositional atom.
///
/// Parsed atoms match `letter (letter | digit | '_')*` and are never the
/// absurdity token. Internally generated atoms (flattening names such as
/// `#1`) use [`Atom::internal`] and cannot collide with parsed names
/// because `#` is outside the surface grammar.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct Atom(String);

/// Why a string was rejected as an atom name.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtomError {
    #[error("atom name may not be empty")]
    Empty,
    #[error("`{ABSURDITY_TOKEN}` is reserved for absurdity and cannot name an atom")]
    Reserved,
    #[error("invalid atom name {name:?}: expected a letter followed by letters, digits, or underscores")]
    Invalid { name: String },
}

impl Atom {
    /// Validates and interns a surface atom name.
    pub fn new(name: &str) -> Result<Atom, AtomError> {
        if name.is_empty() {
            return Err(AtomError::Empty);
        }
        if name == ABSURDITY_TOKEN {
            return Err(AtomError::Reserved);
        }
        let mut chars = name.chars();
        let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
        if !head_ok || !name.chars().skip(1).all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(AtomError::Invalid { name: name.to_owned() });
        }
        Ok(Atom(name.to_owned()))
    }

    /// Constructs a generated atom (flattening names like `#1`) without the
    /// surface-name check. Generated names must stay unparseable.
    pub(crate) fn internal(name: String) -> Atom {
        debug_assert!(name != ABSURDITY_TOKEN);
        Atom(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A propositional formula over atoms, absurdity, and the three binary
/// connectives. Negation is not a node: `~f` parses to `Impl(f, Absurd)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Atomic(Atom),
    Absurd,
    Conj(Box<Formula>, Box<Formula>),
    Disj(Box<Formula>, Box<Formula>),
    Impl(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atomic(a)
    }

    pub fn conj(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Conj(Box::new(lhs), Box::new(rhs))
    }

    pub fn disj(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Disj(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Impl(Box::new(lhs), Box::new(rhs))
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::implies(f, Formula::Absurd)
    }

    pub fn is_composite(&self) -> bool {
        matches!(self, Formula::Conj(..) | Formula::Disj(..) | Formula::Impl(..))
    }

    /// All atoms occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atomic(a) => {
                out.insert(a.clone());
            }
            Formula::Absurd => {}
            Formula::Conj(l, r) | Formula::Disj(l, r) | Formula::Impl(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, 1)
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Formula, ParseError> {
        parse_formula(s)
    }
}

/// Binding strength used by the printer: implication 1, disjunction 2,
/// conjunction 3, leaves 4. A child is parenthesized when its own level is
/// below the minimum its position demands.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Impl(..) => 1,
        Formula::Disj(..) => 2,
        Formula::Conj(..) => 3,
        Formula::Atomic(_) | Formula::Absurd => 4,
    }
}

fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
    let parens = level(f) < min;
    if parens {
        out.write_str("(")?;
    }
    match f {
        Formula::Atomic(a) => write!(out, "{a}")?,
        Formula::Absurd => out.write_str(ABSURDITY_TOKEN)?,
        Formula::Impl(l, r) => {
            write_formula(out, l, 2)?;
            out.write_str(" -> ")?;
            write_formula(out, r, 1)?;
        }
        Formula::Disj(l, r) => {
            write_formula(out, l, 2)?;
            out.write_str(" \\/ ")?;
            write_formula(out, r, 3)?;
        }
        Formula::Conj(l, r) => {
            write_formula(out, l, 3)?;
            out.write_str(" /\\ ")?;
            write_formula(out, r, 4)?;
        }
    }
    if parens {
        out.write_str(")")?;
    }
    Ok(())
}

/// Canonical text for a formula (minimal parentheses, no `~` sugar).
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

/// A set of formulas used as hypotheses. Order- and duplicate-insensitive.
pub type Context = BTreeSet<Formula>;

/// Parse failure, reported with the byte offset of the offending token.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Unexpected {
        offset: usize,
        expected: &'static str,
        found: String,
    },
    #[error("syntax error at byte {offset}: stray {found:?}")]
    BadChar { offset: usize, found: char },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Bot,
    Arrow,
    And,
    Or,
    Tilde,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("`{name}`"),
            Token::Bot => format!("`{ABSURDITY_TOKEN}`"),
            Token::Arrow => "`->`".into(),
            Token::And => "`/\\`".into(),
            Token::Or => "`\\/`".into(),
            Token::Tilde => "`~`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            '~' => {
                tokens.push((i, Token::Tilde));
                i += 1;
            }
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                tokens.push((i, Token::Arrow));
                i += 2;
            }
            '/' if bytes.get(i + 1) == Some(&b'\\') => {
                tokens.push((i, Token::And));
                i += 2;
            }
            '\\' if bytes.get(i + 1) == Some(&b'/') => {
                tokens.push((i, Token::Or));
                i += 2;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                if word == ABSURDITY_TOKEN {
                    tokens.push((start, Token::Bot));
                } else {
                    tokens.push((start, Token::Ident(word.to_owned())));
                }
            }
            other => {
                return Err(ParseError::BadChar { offset: i, found: other });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some((offset, tok)) => ParseError::Unexpected {
                offset: *offset,
                expected,
                found: tok.describe(),
            },
            None => ParseError::Unexpected {
                offset: self.end,
                expected,
                found: "end of input".into(),
            },
        }
    }

    fn eat(&mut self, want: &Token, expected: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some((_, tok)) if tok == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if let Some((_, Token::Arrow)) = self.peek() {
            self.pos += 1;
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conj()?;
        while let Some((_, Token::Or)) = self.peek() {
            self.pos += 1;
            let rhs = self.conj()?;
            acc = Formula::disj(acc, rhs);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while let Some((_, Token::And)) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = Formula::conj(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some((_, Token::Tilde)) => {
                self.pos += 1;
                let inner = self.unary()?;
                Ok(Formula::neg(inner))
            }
            Some((_, Token::Bot)) => {
                self.pos += 1;
                Ok(Formula::Absurd)
            }
            Some((_, Token::Ident(name))) => {
                let atom = Atom(name.clone());
                self.pos += 1;
                Ok(Formula::Atomic(atom))
            }
            Some((_, Token::LParen)) => {
                self.pos += 1;
                let inner = self.formula()?;
                self.eat(&Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

/// Parses the surface grammar. Errors carry the byte offset of the
/// offending token and what was expected there.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let formula = parser.formula()?;
    if parser.peek().is_some() {
        return Err(parser.unexpected("end of input"));
    }
    Ok(formula)
}

/// Every subformula of `f`, leftmost-innermost first, without duplicates.
/// Children precede their parent, so `f` itself is always last.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    collect_subformulas(f, &mut seen, &mut out);
    out
}

pub(crate) fn collect_subformulas(f: &Formula, seen: &mut BTreeSet<Formula>, out: &mut Vec<Formula>) {
    if let Formula::Conj(l, r) | Formula::Disj(l, r) | Formula::Impl(l, r) = f {
        collect_subformulas(l, seen, out);
        collect_subformulas(r, seen, out);
    }
    if seen.insert(f.clone()) {
        out.push(f.clone());
    }
}

/// Inductive size measure: atoms weigh 0, absurdity 1, and each binary
/// connective adds 1 to the sum of its operands.
pub fn weight(f: &Formula) -> u64 {
    match f {
        Formula::Atomic(_) => 0,
        Formula::Absurd => 1,
        Formula::Conj(l, r) | Formula::Disj(l, r) | Formula::Impl(l, r) => {
            weight(l) + weight(r) + 1
        }
    }
}

/// True when absurdity occurs only as the conclusion of an implication.
pub fn bot_normalized(f: &Formula) -> bool {
    match f {
        Formula::Atomic(_) => true,
        Formula::Absurd => false,
        Formula::Impl(l, r) => {
            bot_normalized(l) && (matches!(**r, Formula::Absurd) || bot_normalized(r))
        }
        Formula::Conj(l, r) | Formula::Disj(l, r) => bot_normalized(l) && bot_normalized(r),
    }
}

/// Rewrites every absurdity that is not already an implication conclusion
/// into `(z -> z) -> bot`, an equivalent formula where it is one. Leaves
/// conclusion-position occurrences alone, so the pass is idempotent.
pub fn normalize_bot(f: &Formula) -> Formula {
    fn guarded_bot() -> Formula {
        let z = Formula::Atomic(Atom(NORMALIZE_ATOM.to_owned()));
        Formula::implies(Formula::implies(z.clone(), z), Formula::Absurd)
    }
    match f {
        Formula::Atomic(_) => f.clone(),
        Formula::Absurd => guarded_bot(),
        Formula::Conj(l, r) => Formula::conj(normalize_bot(l), normalize_bot(r)),
        Formula::Disj(l, r) => Formula::disj(normalize_bot(l), normalize_bot(r)),
        Formula::Impl(l, r) => {
            let rhs = if matches!(**r, Formula::Absurd) {
                Formula::Absurd
            } else {
                normalize_bot(r)
            };
            Formula::implies(normalize_bot(l), rhs)
        }
    }
}

/// Replaces every absurdity occurrence with the atom `a`.
pub fn substitute_bot(f: &Formula, a: &Atom) -> Formula {
    match f {
        Formula::Atomic(_) => f.clone(),
        Formula::Absurd => Formula::Atomic(a.clone()),
        Formula::Conj(l, r) => Formula::conj(substitute_bot(l, a), substitute_bot(r, a)),
        Formula::Disj(l, r) => Formula::disj(substitute_bot(l, a), substitute_bot(r, a)),
        Formula::Impl(l, r) => Formula::implies(substitute_bot(l, a), substitute_bot(r, a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(name: &str) -> Formula {
        Formula::Atomic(Atom::new(name).unwrap())
    }

    fn parse(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn atom_names_are_validated() {
        assert!(Atom::new("p").is_ok());
        assert!(Atom::new("p1_x").is_ok());
        assert_eq!(Atom::new(""), Err(AtomError::Empty));
        assert_eq!(Atom::new("bot"), Err(AtomError::Reserved));
        assert!(matches!(Atom::new("1p"), Err(AtomError::Invalid { .. })));
        assert!(matches!(Atom::new("#1"), Err(AtomError::Invalid { .. })));
        assert!(matches!(Atom::new("p q"), Err(AtomError::Invalid { .. })));
    }

    #[test]
    fn negation_is_sugar_for_implication_to_bot() {
        assert_eq!(parse("~p"), Formula::neg(atom("p")));
        assert_eq!(parse("~p"), parse("p -> bot"));
        assert_eq!(parse("~~p"), Formula::neg(Formula::neg(atom("p"))));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("p /\\ q -> r"),
            Formula::implies(Formula::conj(atom("p"), atom("q")), atom("r"))
        );
        assert_eq!(
            parse("p \\/ q /\\ r"),
            Formula::disj(atom("p"), Formula::conj(atom("q"), atom("r")))
        );
        assert_eq!(
            parse("p -> q -> r"),
            Formula::implies(atom("p"), Formula::implies(atom("q"), atom("r")))
        );
        assert_eq!(
            parse("p /\\ q /\\ r"),
            Formula::conj(Formula::conj(atom("p"), atom("q")), atom("r"))
        );
        assert_eq!(
            parse("p \\/ q \\/ r"),
            Formula::disj(Formula::disj(atom("p"), atom("q")), atom("r"))
        );
        assert_eq!(parse("~p /\\ q"), Formula::conj(Formula::neg(atom("p")), atom("q")));
    }

    #[test]
    fn parses_parenthesized_bot_formula() {
        assert_eq!(
            parse("(p -> bot) \\/ q"),
            Formula::disj(Formula::neg(atom("p")), atom("q"))
        );
    }

    #[test]
    fn printer_uses_minimal_parentheses() {
        assert_eq!(parse("(p -> q) -> p").to_string(), "(p -> q) -> p");
        assert_eq!(parse("p -> (q -> r)").to_string(), "p -> q -> r");
        assert_eq!(parse("p /\\ (q \\/ r)").to_string(), "p /\\ (q \\/ r)");
        assert_eq!(parse("(p /\\ q) \\/ r").to_string(), "p /\\ q \\/ r");
        assert_eq!(parse("~p").to_string(), "p -> bot");
        assert_eq!(parse("~(p \\/ q)").to_string(), "p \\/ q -> bot");
        assert_eq!(parse("p \\/ (q \\/ r)").to_string(), "p \\/ (q \\/ r)");
    }

    #[test]
    fn print_then_parse_is_identity() {
        for text in [
            "p",
            "bot",
            "~~(p \\/ ~p)",
            "((p -> q) -> p) -> p",
            "p /\\ q \\/ r -> ~p",
            "(p \\/ q) /\\ r",
        ] {
            let f = parse(text);
            assert_eq!(parse(&f.to_string()), f, "round trip failed for {text}");
        }
    }

    #[test]
    fn parse_errors_carry_byte_offsets() {
        match parse_formula("p -> ") {
            Err(ParseError::Unexpected { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected unexpected-token error, got {other:?}"),
        }
        match parse_formula("p q") {
            Err(ParseError::Unexpected { offset, found, .. }) => {
                assert_eq!(offset, 2);
                assert_eq!(found, "`q`");
            }
            other => panic!("expected trailing-token error, got {other:?}"),
        }
        match parse_formula("p & q") {
            Err(ParseError::BadChar { offset, found }) => {
                assert_eq!(offset, 2);
                assert_eq!(found, '&');
            }
            other => panic!("expected stray-character error, got {other:?}"),
        }
        match parse_formula("(p -> q") {
            Err(ParseError::Unexpected { offset, expected, .. }) => {
                assert_eq!(offset, 7);
                assert_eq!(expected, "`)`");
            }
            other => panic!("expected missing-paren error, got {other:?}"),
        }
    }

    #[test]
    fn subformulas_are_leftmost_innermost_and_deduplicated() {
        let f = parse("(p -> q) -> p");
        assert_eq!(
            subformulas(&f),
            vec![atom("p"), atom("q"), parse("p -> q"), f.clone()]
        );
        let g = parse("p /\\ p");
        assert_eq!(subformulas(&g), vec![atom("p"), g.clone()]);
    }

    #[test]
    fn weight_counts_connectives_and_bot() {
        assert_eq!(weight(&atom("p")), 0);
        assert_eq!(weight(&Formula::Absurd), 1);
        assert_eq!(weight(&parse("(p -> bot) \\/ q")), 3);
        assert_eq!(weight(&parse("p /\\ q")), 1);
    }

    #[test]
    fn normalize_bot_guards_operand_occurrences() {
        let guarded = parse("(z -> z) -> bot");
        assert_eq!(normalize_bot(&Formula::Absurd), guarded);
        assert_eq!(
            normalize_bot(&parse("bot \\/ p")),
            Formula::disj(guarded.clone(), atom("p"))
        );
        assert_eq!(normalize_bot(&parse("p -> bot")), parse("p -> bot"));
        assert_eq!(normalize_bot(&parse("bot -> p")), parse("((z -> z) -> bot) -> p"));
    }

    #[test]
    fn normalize_bot_is_idempotent_and_normalizes() {
        for text in ["bot", "bot \\/ p", "p /\\ bot -> bot", "~(bot /\\ bot)", "p"] {
            let f = parse(text);
            let n = normalize_bot(&f);
            assert!(bot_normalized(&n), "not normalized on {text}");
            assert_eq!(normalize_bot(&n), n, "not idempotent on {text}");
        }
        assert!(!bot_normalized(&parse("bot \\/ p")));
        assert!(bot_normalized(&parse("p -> bot")));
    }

    #[test]
    fn substitute_bot_replaces_every_occurrence() {
        let b = Atom::new("b2").unwrap();
        assert_eq!(substitute_bot(&parse("bot"), &b), atom("b2"));
        assert_eq!(
            substitute_bot(&parse("(p -> bot) \\/ bot"), &b),
            parse("(p -> b2) \\/ b2")
        );
        assert_eq!(substitute_bot(&parse("p -> q"), &b), parse("p -> q"));
    }
}
