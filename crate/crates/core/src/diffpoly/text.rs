//! Plain-text form of differential polynomials, e.g. `-1/4*V_xxx + 3/2*V*V_x`.
//!
//! Terms print in order of decreasing highest derivative, then decreasing field
//! degree; field-free terms come last. Derivatives are written as a `_` followed
//! by one `x` per order. The parser accepts `+ - * ^`, parentheses, rational
//! literals `p/q`, and the Unicode minus sign.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{DMonomial, DiffPoly};
use super::symbol::SymbolTable;
use super::{DiffPolyError, Rational};

fn display_key(m: &DMonomial) -> (i64, i64) {
    let order = m.max_field_order().map(|o| o as i64).unwrap_or(-1);
    (-order, -(m.field_degree() as i64))
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &DMonomial) -> fmt::Result {
    for (i, (var, exp)) in m.factors().iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write!(f, "{var}")?;
        if *exp > 1 {
            write!(f, "^{exp}")?;
        }
    }
    Ok(())
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by(|(a, _), (b, _)| display_key(a).cmp(&display_key(b)).then_with(|| a.cmp(b)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = c.abs();
            if m.is_one() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String, u32),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>, DiffPolyError> {
    let err = |msg: String| DiffPolyError::Parse(msg);
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' | '\u{2212}' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' | '\u{00b7}' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '(' => {
                tokens.push(Token::Open);
                i += 1;
            }
            ')' => {
                tokens.push(Token::Close);
                i += 1;
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let n = BigInt::from_str(&digits).map_err(|e| err(e.to_string()))?;
                tokens.push(Token::Int(n));
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                let mut order = 0;
                if i + 1 < chars.len() && chars[i] == '_' && chars[i + 1] == 'x' {
                    let mut j = i + 1;
                    while j < chars.len() && chars[j] == 'x' {
                        j += 1;
                    }
                    if j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                        return Err(err(format!(
                            "malformed derivative suffix near position {i}"
                        )));
                    }
                    order = (j - i - 1) as u32;
                    i = j;
                }
                tokens.push(Token::Ident(name, order));
            }
            other => return Err(err(format!("unexpected character {other:?}"))),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    table: &'a mut SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<DiffPoly, DiffPolyError> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                -self.term()?
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc += self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly, DiffPolyError> {
        let mut acc = self.factor()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DiffPoly, DiffPolyError> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Token::Int(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| DiffPolyError::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                other => {
                    return Err(DiffPolyError::Parse(format!(
                        "expected integer exponent, found {other:?}"
                    )))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffPoly, DiffPolyError> {
        match self.next() {
            Some(Token::Int(n)) => {
                if let Some(Token::Slash) = self.peek() {
                    self.pos += 1;
                    match self.next() {
                        Some(Token::Int(d)) if !d.is_zero() => {
                            Ok(DiffPoly::constant(Rational::new(n, d)))
                        }
                        other => Err(DiffPolyError::Parse(format!(
                            "expected nonzero denominator, found {other:?}"
                        ))),
                    }
                } else {
                    Ok(DiffPoly::constant(Rational::from_integer(n)))
                }
            }
            Some(Token::Ident(name, order)) => {
                let symbol = self.table.resolve(&name);
                if symbol.is_constant() && order > 0 {
                    return Ok(DiffPoly::zero());
                }
                Ok(DiffPoly::var(&symbol, order))
            }
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(inner),
                    other => Err(DiffPolyError::Parse(format!(
                        "expected ')', found {other:?}"
                    ))),
                }
            }
            Some(Token::Minus) => Ok(-self.atom()?),
            other => Err(DiffPolyError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl DiffPoly {
    /// Parses with the given symbol table; unknown names become fields.
    pub fn parse_with(text: &str, table: &mut SymbolTable) -> Result<DiffPoly, DiffPolyError> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Err(DiffPolyError::Parse("empty expression".into()));
        }
        let mut parser = Parser {
            tokens,
            pos: 0,
            table,
        };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(DiffPolyError::Parse(format!(
                "trailing input at token {}",
                parser.pos
            )));
        }
        Ok(p)
    }

    /// Parses treating every name as a field symbol.
    pub fn parse(text: &str) -> Result<DiffPoly, DiffPolyError> {
        DiffPoly::parse_with(text, &mut SymbolTable::new())
    }
}

impl FromStr for DiffPoly {
    type Err = DiffPolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DiffPoly::parse(s)
    }
}

/// Renders a rational the way the text format writes coefficients.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses `p`, `-p` or `p/q` into a rational.
pub fn parse_rational(text: &str) -> Result<Rational, DiffPolyError> {
    let p = DiffPoly::parse(text.trim())?;
    if p.vars().is_empty() {
        return Ok(p.constant_term());
    }
    Err(DiffPolyError::Parse(format!(
        "not a rational number: {text}"
    )))
}
