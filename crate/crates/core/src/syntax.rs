//! Surface syntax: tokenizer, precedence parser and NNF conversion.
//!
//! Precedence from loosest to tightest: `->`/`<->` (right associative),
//! `|`, `&`, `U`/`R` (right associative), then the unary operators
//! `!`, `X`, `N`, `G`, `F`.

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

/// A formula as written, before negation normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    True,
    False,
    Atom(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Next(Box<Expr>),
    WeakNext(Box<Expr>),
    Globally(Box<Expr>),
    Eventually(Box<Expr>),
    Until(Box<Expr>, Box<Expr>),
    Release(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn atom(name: &str) -> Expr {
        Expr::Atom(name.to_string())
    }

    pub fn negation(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::Or(Box::new(l), Box::new(r))
    }

    pub fn next(e: Expr) -> Expr {
        Expr::Next(Box::new(e))
    }

    pub fn globally(e: Expr) -> Expr {
        Expr::Globally(Box::new(e))
    }

    pub fn until(l: Expr, r: Expr) -> Expr {
        Expr::Until(Box::new(l), Box::new(r))
    }

    /// Number of nodes, counting a negated atom as a single literal node.
    pub fn node_count(&self) -> usize {
        match self {
            Expr::True | Expr::False | Expr::Atom(_) => 1,
            Expr::Not(e) if matches!(**e, Expr::Atom(_)) => 1,
            Expr::Not(e)
            | Expr::Next(e)
            | Expr::WeakNext(e)
            | Expr::Globally(e)
            | Expr::Eventually(e) => 1 + e.node_count(),
            Expr::And(l, r)
            | Expr::Or(l, r)
            | Expr::Implies(l, r)
            | Expr::Iff(l, r)
            | Expr::Until(l, r)
            | Expr::Release(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    /// Replaces atoms by name; atoms without an entry are kept.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<String>) -> Expr {
        let un = |e: &Expr| Box::new(e.substitute(map));
        match self {
            Expr::True => Expr::True,
            Expr::False => Expr::False,
            Expr::Atom(a) => Expr::Atom(map(a).unwrap_or_else(|| a.clone())),
            Expr::Not(e) => Expr::Not(un(e)),
            Expr::Next(e) => Expr::Next(un(e)),
            Expr::WeakNext(e) => Expr::WeakNext(un(e)),
            Expr::Globally(e) => Expr::Globally(un(e)),
            Expr::Eventually(e) => Expr::Eventually(un(e)),
            Expr::And(l, r) => Expr::And(un(l), un(r)),
            Expr::Or(l, r) => Expr::Or(un(l), un(r)),
            Expr::Implies(l, r) => Expr::Implies(un(l), un(r)),
            Expr::Iff(l, r) => Expr::Iff(un(l), un(r)),
            Expr::Until(l, r) => Expr::Until(un(l), un(r)),
            Expr::Release(l, r) => Expr::Release(un(l), un(r)),
        }
    }

    fn binary(&self) -> Option<(&'static str, &Expr, &Expr)> {
        match self {
            Expr::And(l, r) => Some(("&", l, r)),
            Expr::Or(l, r) => Some(("|", l, r)),
            Expr::Implies(l, r) => Some(("->", l, r)),
            Expr::Iff(l, r) => Some(("<->", l, r)),
            Expr::Until(l, r) => Some(("U", l, r)),
            Expr::Release(l, r) => Some(("R", l, r)),
            _ => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unary = |f: &mut fmt::Formatter<'_>, op: &str, e: &Expr| {
            let atomic = matches!(e, Expr::True | Expr::False | Expr::Atom(_));
            match (atomic, op) {
                (true, "!") => write!(f, "!{e}"),
                (true, _) => write!(f, "{op} {e}"),
                (false, _) => write!(f, "{op}({e})"),
            }
        };
        match self {
            Expr::True => f.write_str("true"),
            Expr::False => f.write_str("false"),
            Expr::Atom(a) => f.write_str(a),
            Expr::Not(e) => unary(f, "!", e),
            Expr::Next(e) => unary(f, "X", e),
            Expr::WeakNext(e) => unary(f, "N", e),
            Expr::Globally(e) => unary(f, "G", e),
            Expr::Eventually(e) => unary(f, "F", e),
            _ => {
                let (op, l, r) = self.binary().expect("binary node");
                // & and | chains print without inner parentheses.
                let assoc = matches!(op, "&" | "|");
                let side = |f: &mut fmt::Formatter<'_>, e: &Expr| match e.binary() {
                    Some((inner, ..)) if !(assoc && inner == op) => write!(f, "({e})"),
                    _ => write!(f, "{e}"),
                };
                side(f, l)?;
                write!(f, " {op} ")?;
                side(f, r)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("{line}:{column}: unexpected {found}, expected one of: {}", expected.join(", "))]
    Syntax {
        line: usize,
        column: usize,
        found: String,
        expected: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    WeakNext,
    Globally,
    Eventually,
    Until,
    Release,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Not => "`!`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Implies => "`->`",
            Tok::Iff => "`<->`",
            Tok::Next => "`X`",
            Tok::WeakNext => "`N`",
            Tok::Globally => "`G`",
            Tok::Eventually => "`F`",
            Tok::Until => "`U`",
            Tok::Release => "`R`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const OPERAND_START: &[&str] = &["atom", "`true`", "`false`", "`(`", "`!`", "`X`", "`N`", "`G`", "`F`"];

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let take = |n: usize, tok: Tok, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            n
        };
        let consumed = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => 1,
            '(' => take(1, Tok::LParen, &mut out),
            ')' => take(1, Tok::RParen, &mut out),
            '!' | '~' => take(1, Tok::Not, &mut out),
            '&' => take(if chars.get(i + 1) == Some(&'&') { 2 } else { 1 }, Tok::And, &mut out),
            '|' => take(if chars.get(i + 1) == Some(&'|') { 2 } else { 1 }, Tok::Or, &mut out),
            '-' if chars.get(i + 1) == Some(&'>') => take(2, Tok::Implies, &mut out),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                take(3, Tok::Iff, &mut out)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "N" => Tok::WeakNext,
                    "G" => Tok::Globally,
                    "F" => Tok::Eventually,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    _ => Tok::Ident(word),
                };
                take(j - i, tok, &mut out)
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    column,
                    found: format!("character `{other}`"),
                    expected: OPERAND_START
                        .iter()
                        .chain(["`&`", "`|`", "`->`", "`U`", "`R`", "`)`"].iter())
                        .map(|s| s.to_string())
                        .collect(),
                })
            }
        };
        i += consumed;
        column += consumed;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError::Syntax {
            line: here.line,
            column: here.column,
            found: here.tok.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn implication(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Implies => {
                self.bump();
                Ok(Expr::Implies(Box::new(lhs), Box::new(self.implication()?)))
            }
            Tok::Iff => {
                self.bump();
                Ok(Expr::Iff(Box::new(lhs), Box::new(self.implication()?)))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Expr::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Expr::and(lhs, self.binary_temporal()?);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                Ok(Expr::Until(Box::new(lhs), Box::new(self.binary_temporal()?)))
            }
            Tok::Release => {
                self.bump();
                Ok(Expr::Release(Box::new(lhs), Box::new(self.binary_temporal()?)))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let wrap: fn(Box<Expr>) -> Expr = match self.peek() {
            Tok::Not => Expr::Not,
            Tok::Next => Expr::Next,
            Tok::WeakNext => Expr::WeakNext,
            Tok::Globally => Expr::Globally,
            Tok::Eventually => Expr::Eventually,
            _ => return self.primary(),
        };
        self.bump();
        Ok(wrap(Box::new(self.unary()?)))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Atom(name))
            }
            Tok::True => {
                self.bump();
                Ok(Expr::True)
            }
            Tok::False => {
                self.bump();
                Ok(Expr::False)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "`&`", "`|`", "`->`", "`<->`", "`U`", "`R`"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(OPERAND_START)),
        }
    }
}

/// Parses the surface syntax without normalizing it.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    if toks.len() == 1 {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser { toks, pos: 0 };
    let e = parser.implication()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(&["end of input", "`&`", "`|`", "`->`", "`<->`", "`U`", "`R`"]));
    }
    Ok(e)
}

/// Parses `text` into a canonical NNF formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_expr(text).map(|e| to_nnf(&e))
}

/// Pushes negations down to literals and expands `G`, `F`, `->` and `<->`.
pub fn to_nnf(e: &Expr) -> Formula {
    nnf(e, true)
}

fn nnf(e: &Expr, pos: bool) -> Formula {
    match e {
        Expr::True => {
            if pos {
                Formula::tt()
            } else {
                Formula::ff()
            }
        }
        Expr::False => nnf(&Expr::True, !pos),
        Expr::Atom(name) => {
            let f = Formula::atom(name);
            if pos {
                f
            } else {
                f.negate()
            }
        }
        Expr::Not(inner) => nnf(inner, !pos),
        Expr::And(l, r) if pos => Formula::and([nnf(l, true), nnf(r, true)]),
        Expr::And(l, r) => Formula::or([nnf(l, false), nnf(r, false)]),
        Expr::Or(l, r) if pos => Formula::or([nnf(l, true), nnf(r, true)]),
        Expr::Or(l, r) => Formula::and([nnf(l, false), nnf(r, false)]),
        Expr::Implies(l, r) if pos => Formula::or([nnf(l, false), nnf(r, true)]),
        Expr::Implies(l, r) => Formula::and([nnf(l, true), nnf(r, false)]),
        Expr::Iff(l, r) => {
            let both = Formula::and([nnf(l, true), nnf(r, true)]);
            let neither = Formula::and([nnf(l, false), nnf(r, false)]);
            let equal = Formula::or([both, neither]);
            if pos {
                equal
            } else {
                equal.negate()
            }
        }
        Expr::Next(inner) if pos => Formula::next(nnf(inner, true)),
        Expr::Next(inner) => Formula::weak_next(nnf(inner, false)),
        Expr::WeakNext(inner) if pos => Formula::weak_next(nnf(inner, true)),
        Expr::WeakNext(inner) => Formula::next(nnf(inner, false)),
        Expr::Globally(inner) if pos => Formula::globally(nnf(inner, true)),
        Expr::Globally(inner) => Formula::eventually(nnf(inner, false)),
        Expr::Eventually(inner) if pos => Formula::eventually(nnf(inner, true)),
        Expr::Eventually(inner) => Formula::globally(nnf(inner, false)),
        Expr::Until(l, r) if pos => Formula::until(nnf(l, true), nnf(r, true)),
        Expr::Until(l, r) => Formula::release(nnf(l, false), nnf(r, false)),
        Expr::Release(l, r) if pos => Formula::release(nnf(l, true), nnf(r, true)),
        Expr::Release(l, r) => Formula::until(nnf(l, false), nnf(r, false)),
    }
}

/// Reads a formula file: `#` starts a comment, and the first line with
/// content holds the formula.
pub fn formula_from_file_text(text: &str) -> Result<Formula, ParseError> {
    let line = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .ok_or(ParseError::Empty)?;
    parse(line)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FormulaKind;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn next_false() {
        assert_eq!(p("X false"), Formula::next(Formula::ff()));
    }

    #[test]
    fn globally_is_false_release() {
        let a_until_b = Formula::until(Formula::atom("a"), Formula::atom("b"));
        assert_eq!(p("G (a U b)"), Formula::release(Formula::ff(), a_until_b));
    }

    #[test]
    fn negated_until_is_release() {
        let na = Formula::atom("a").negate();
        let nb = Formula::atom("b").negate();
        assert_eq!(p("!(a U b)"), Formula::release(na, nb));
    }

    #[test]
    fn nnf_dualities() {
        assert_eq!(p("!X a"), Formula::weak_next(Formula::atom("a").negate()));
        assert_eq!(p("!!a"), Formula::atom("a"));
        assert_eq!(
            p("!(a & X b)"),
            Formula::or([
                Formula::atom("a").negate(),
                Formula::weak_next(Formula::atom("b").negate())
            ])
        );
        assert!(p("!true").is_ff());
        assert!(p("!false").is_tt());
    }

    #[test]
    fn precedence() {
        // U binds tighter than &, & tighter than |, -> loosest.
        assert_eq!(p("a & b U c"), p("a & (b U c)"));
        assert_eq!(p("a | b & c"), p("a | (b & c)"));
        assert_eq!(p("a -> b | c"), p("!a | b | c"));
        assert_eq!(p("a U b U c"), p("a U (b U c)"));
        assert_eq!(p("G a U b"), p("(G a) U b"));
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
    }

    #[test]
    fn printing() {
        assert_eq!(Formula::globally(Formula::atom("a")).to_string(), "false R a");
        assert_eq!(Formula::next(Formula::ff()).to_string(), "X false");
        assert_eq!(Formula::weak_next(Formula::atom("a")).to_string(), "N a");
    }

    #[test]
    fn round_trip_samples() {
        for s in [
            "G (a U b)",
            "G F a & G F !a",
            "a & G F !a",
            "N (a | X !b) R (c U d)",
            "(a -> X b) <-> F c",
            "X X N false",
        ] {
            let f = p(s);
            assert_eq!(p(&f.to_string()), f, "{s} printed as {f}");
        }
    }

    #[test]
    fn order_insensitive() {
        assert_eq!(p("a & b"), p("b & a"));
        assert_eq!(p("(a & b) & c"), p("a & (c & b)"));
        assert_eq!(p("a | a"), p("a"));
        assert!(matches!(p("a & b & a").kind(), FormulaKind::And(cs) if cs.len() == 2));
    }

    #[test]
    fn constant_absorption() {
        assert_eq!(p("true & a"), p("a"));
        assert_eq!(p("false | a"), p("a"));
        assert!(p("false & a").is_ff());
        assert!(p("true | a").is_tt());
    }

    #[test]
    fn errors_report_position() {
        assert_eq!(parse(""), Err(ParseError::Empty));
        assert_eq!(parse("  \n "), Err(ParseError::Empty));
        match parse("a &\n  ) b") {
            Err(ParseError::Syntax { line, column, expected, .. }) => {
                assert_eq!((line, column), (2, 3));
                assert!(expected.contains(&"atom".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(a"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("a b"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("a $ b"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn identifiers_starting_with_keywords() {
        assert_eq!(p("Xa"), Formula::atom("Xa"));
        assert_eq!(p("X a"), Formula::next(Formula::atom("a")));
        assert_eq!(p("G_1"), Formula::atom("G_1"));
    }

    #[test]
    fn file_text() {
        let f = formula_from_file_text("# comment\n\n  G (a U b) # trailing\nX a\n").unwrap();
        assert_eq!(f, p("G (a U b)"));
        assert_eq!(formula_from_file_text("# only\n"), Err(ParseError::Empty));
    }

    #[test]
    fn expr_display() {
        let e = parse_expr("Tail & (Tail U G(!Tail)) & X(Tail & a)").unwrap();
        assert_eq!(e.to_string(), "Tail & (Tail U G(!Tail)) & X(Tail & a)");
    }
}
