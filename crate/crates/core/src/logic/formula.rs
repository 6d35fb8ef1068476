//! Formulas of the Lambek calculus with soft subexponentials.
//!
//! Concrete syntax (ASCII):
//!
//! | construct | syntax   | alternative |
//! |-----------|----------|-------------|
//! | atoms     | `s`, `n` |             |
//! | product   | `A . B`  | `A · B`     |
//! | left div  | `A \ B`  |             |
//! | right div | `B / A`  |             |
//! | storage   | `!A`     |             |
//! | permutable| `@A`     | `∇A`        |
//!
//! Prefix operators bind tightest, then the two divisions, then the product.
//! None of the binary operators associate: `n\s/n` and `s.s.s` are rejected
//! and must be parenthesized.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Atom {
    /// Declarative sentence.
    S,
    /// Noun phrase.
    N,
}

impl Atom {
    pub fn symbol(self) -> char {
        match self {
            Atom::S => 's',
            Atom::N => 'n',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Atom(Atom),
    Product(Box<Formula>, Box<Formula>),
    /// `A\B`, stored as (divisor `A`, result `B`).
    LeftDiv(Box<Formula>, Box<Formula>),
    /// `B/A`, stored as (result `B`, divisor `A`).
    RightDiv(Box<Formula>, Box<Formula>),
    Bang(Box<Formula>),
    Nabla(Box<Formula>),
}

impl Formula {
    pub fn s() -> Self {
        Formula::Atom(Atom::S)
    }

    pub fn n() -> Self {
        Formula::Atom(Atom::N)
    }

    pub fn product(left: Formula, right: Formula) -> Self {
        Formula::Product(Box::new(left), Box::new(right))
    }

    /// `divisor \ result`
    pub fn under(divisor: Formula, result: Formula) -> Self {
        Formula::LeftDiv(Box::new(divisor), Box::new(result))
    }

    /// `result / divisor`
    pub fn over(result: Formula, divisor: Formula) -> Self {
        Formula::RightDiv(Box::new(result), Box::new(divisor))
    }

    pub fn bang(inner: Formula) -> Self {
        Formula::Bang(Box::new(inner))
    }

    pub fn nabla(inner: Formula) -> Self {
        Formula::Nabla(Box::new(inner))
    }

    pub fn is_nabla(&self) -> bool {
        matches!(self, Formula::Nabla(_))
    }

    pub fn contains_bang(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Bang(_) => true,
            Formula::Nabla(a) => a.contains_bang(),
            Formula::Product(a, b) | Formula::LeftDiv(a, b) | Formula::RightDiv(a, b) => {
                a.contains_bang() || b.contains_bang()
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Bang(a) | Formula::Nabla(a) => 1 + a.size(),
            Formula::Product(a, b) | Formula::LeftDiv(a, b) | Formula::RightDiv(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Signed atom occurrences: positive occurrences count +1, negative -1.
    /// Returns `[s, n]`.
    pub(crate) fn atom_balance(&self, positive: bool) -> [i64; 2] {
        let mut acc = [0i64; 2];
        self.accumulate_balance(positive, &mut acc);
        acc
    }

    fn accumulate_balance(&self, positive: bool, acc: &mut [i64; 2]) {
        match self {
            Formula::Atom(a) => {
                let idx = match a {
                    Atom::S => 0,
                    Atom::N => 1,
                };
                acc[idx] += if positive { 1 } else { -1 };
            }
            Formula::Product(a, b) => {
                a.accumulate_balance(positive, acc);
                b.accumulate_balance(positive, acc);
            }
            Formula::LeftDiv(d, r) | Formula::RightDiv(r, d) => {
                d.accumulate_balance(!positive, acc);
                r.accumulate_balance(positive, acc);
            }
            Formula::Bang(a) | Formula::Nabla(a) => a.accumulate_balance(positive, acc),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Atom(_) | Formula::Bang(_) | Formula::Nabla(_) => 3,
            Formula::LeftDiv(..) | Formula::RightDiv(..) => 2,
            Formula::Product(..) => 1,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Operands of a binary operator need parentheses unless they bind
        // strictly tighter; prefix operands only when binary.
        fn operand(f: &mut fmt::Formatter<'_>, x: &Formula, above: u8) -> fmt::Result {
            if x.precedence() > above {
                write!(f, "{x}")
            } else {
                write!(f, "({x})")
            }
        }
        match self {
            Formula::Atom(a) => write!(f, "{}", a.symbol()),
            Formula::Product(a, b) => {
                operand(f, a, 1)?;
                f.write_str(".")?;
                operand(f, b, 1)
            }
            Formula::LeftDiv(d, r) => {
                operand(f, d, 2)?;
                f.write_str("\\")?;
                operand(f, r, 2)
            }
            Formula::RightDiv(r, d) => {
                operand(f, r, 2)?;
                f.write_str("/")?;
                operand(f, d, 2)
            }
            Formula::Bang(a) => {
                f.write_str("!")?;
                operand(f, a, 2)
            }
            Formula::Nabla(a) => {
                f.write_str("@")?;
                operand(f, a, 2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: {message}")]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token {
    Atom(Atom),
    Dot,
    Backslash,
    Slash,
    Bang,
    Nabla,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut out = Vec::new();
    for (pos, ch) in text.chars().enumerate() {
        let tok = match ch {
            c if c.is_whitespace() => continue,
            's' => Token::Atom(Atom::S),
            'n' => Token::Atom(Atom::N),
            '.' | '·' => Token::Dot,
            '\\' => Token::Backslash,
            '/' => Token::Slash,
            '!' => Token::Bang,
            '@' | '∇' => Token::Nabla,
            '(' => Token::Open,
            ')' => Token::Close,
            other => {
                return Err(ParseError {
                    position: pos,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.cursor).map(|&(_, t)| t)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.cursor).map_or(self.end, |&(p, _)| p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.position(),
            message: message.into(),
        })
    }

    fn product(&mut self) -> Result<Formula, ParseError> {
        let left = self.division()?;
        if self.peek() == Some(Token::Dot) {
            self.cursor += 1;
            let right = self.division()?;
            if self.peek() == Some(Token::Dot) {
                return self.error("'.' is not associative; add parentheses");
            }
            return Ok(Formula::product(left, right));
        }
        Ok(left)
    }

    fn division(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        let op = self.peek();
        if !matches!(op, Some(Token::Backslash | Token::Slash)) {
            return Ok(left);
        }
        self.cursor += 1;
        let right = self.unary()?;
        if matches!(self.peek(), Some(Token::Backslash | Token::Slash)) {
            return self.error("'\\' and '/' do not associate; add parentheses");
        }
        Ok(match op {
            Some(Token::Backslash) => Formula::under(left, right),
            _ => Formula::over(left, right),
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Token::Bang) => {
                self.cursor += 1;
                Ok(Formula::bang(self.unary()?))
            }
            Some(Token::Nabla) => {
                self.cursor += 1;
                Ok(Formula::nabla(self.unary()?))
            }
            Some(Token::Atom(a)) => {
                self.cursor += 1;
                Ok(Formula::Atom(a))
            }
            Some(Token::Open) => {
                self.cursor += 1;
                let inner = self.product()?;
                if self.peek() != Some(Token::Close) {
                    return self.error("expected ')'");
                }
                self.cursor += 1;
                Ok(inner)
            }
            Some(_) => self.error("expected a formula"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses the ASCII formula syntax described in the module docs.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        cursor: 0,
        end: text.chars().count(),
    };
    let formula = parser.product()?;
    if parser.cursor != parser.tokens.len() {
        return parser.error("trailing input");
    }
    Ok(formula)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
