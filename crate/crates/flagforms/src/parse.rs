//! Text syntax for Chern-class expressions.
//!
//! ```text
//! expr   := '-'? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nat)?
//! atom   := rational | 'c' nat ('(' bundle ')')? | '(' expr ')'
//! bundle := 'E' | 'U' nat | 'U' nat '/' 'U' nat | 'Q' nat
//! ```
//!
//! A bare `c3` stands for `c3(E)`, so printed Chern polynomials read back.

use std::fmt;
use std::str::FromStr;

use flagforms_core::combinat::DimensionSequence;
use flagforms_core::rootcalc::{BundleSymbol, ChernExpr};
use flagforms_core::charpoly::ChernPoly;
use flagforms_core::{BigRational, Error};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Character offset of the offending token.
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let message = message.into();
        let message = if self.pos >= self.chars.len() {
            format!("{message} at end of input")
        } else {
            message
        };
        Err(ParseError { pos: self.pos, message })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.err(format!("expected '{c}', found '{x}'")),
            None => self.err(format!("expected '{c}'")),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().or_else(|_| {
            self.pos = start;
            self.err("number too large")
        })
    }

    fn expr(&mut self) -> Result<ChernExpr, ParseError> {
        let mut acc = if self.peek() == Some('-') {
            self.pos += 1;
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ChernExpr, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = acc.mul(self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<ChernExpr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let at = self.pos;
            let k = self.nat()?;
            let k = u32::try_from(k).map_err(|_| ParseError {
                pos: at,
                message: "exponent too large".into(),
            })?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ChernExpr, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('c') => {
                self.pos += 1;
                let j = self.nat()? as usize;
                if self.peek() != Some('(') {
                    return Ok(ChernExpr::chern(j, BundleSymbol::E));
                }
                self.expect('(')?;
                let b = self.bundle()?;
                self.expect(')')?;
                Ok(ChernExpr::chern(j, b))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let num = self.nat()?;
                let mut text = num.to_string();
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let den_at = self.pos;
                    let den = self.nat()?;
                    if den == 0 {
                        self.pos = den_at;
                        return self.err("zero denominator");
                    }
                    text = format!("{num}/{den}");
                }
                BigRational::from_str(&text).map(ChernExpr::Num).or_else(|_| {
                    self.pos = start;
                    self.err("bad rational literal")
                })
            }
            Some(c) => self.err(format!("unexpected '{c}'")),
            None => self.err("expected a term"),
        }
    }

    fn bundle(&mut self) -> Result<BundleSymbol, ParseError> {
        match self.peek() {
            Some('E') => {
                self.pos += 1;
                Ok(BundleSymbol::E)
            }
            Some('Q') => {
                self.pos += 1;
                Ok(BundleSymbol::Q(self.nat()? as usize))
            }
            Some('U') => {
                self.pos += 1;
                let l = self.nat()? as usize;
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.expect('U')?;
                    let ell = self.nat()? as usize;
                    return Ok(BundleSymbol::Quotient { l, ell });
                }
                Ok(BundleSymbol::Sub(l))
            }
            Some(c) => self.err(format!("unknown bundle '{c}'")),
            None => self.err("expected a bundle"),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected '{c}'")),
        }
    }
}

/// Parse an expression. Bundle symbols are checked later, against a `ρ`.
pub fn parse(text: &str) -> Result<ChernExpr, ParseError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parse a bundle symbol such as `U2/U1` or `Q2`.
pub fn parse_bundle(text: &str) -> Result<BundleSymbol, ParseError> {
    let mut p = Parser::new(text);
    let b = p.bundle()?;
    p.finish()?;
    Ok(b)
}

/// Parse a comma-separated list of naturals, e.g. `0,1,4`.
pub fn parse_list(text: &str) -> Result<Vec<usize>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        let t = part.trim();
        match t.parse::<usize>() {
            Ok(v) => out.push(v),
            Err(_) => {
                return Err(ParseError {
                    pos: offset,
                    message: format!("expected a natural number, found '{t}'"),
                })
            }
        }
        offset += part.chars().count() + 1;
    }
    Ok(out)
}

/// Parse a dimension sequence written as `0,1,4`.
pub fn parse_rho(text: &str) -> Result<DimensionSequence, String> {
    let v = parse_list(text).map_err(|e| e.to_string())?;
    DimensionSequence::new(v).map_err(|e| e.to_string())
}

/// A polynomial in `c_1(E)..c_r(E)`, e.g. `c1^3 + 2*c1*c2 - c3`.
pub fn parse_chern_poly(text: &str, r: usize) -> Result<ChernPoly, String> {
    let e = parse(text).map_err(|e| e.to_string())?;
    let one = ChernPoly::one(r);
    e.eval(&one, &|q| ChernPoly::constant(r, q.clone()), &mut |j, b| match b {
        BundleSymbol::E if (1..=r).contains(&j) => Ok(ChernPoly::c(r, j)),
        BundleSymbol::E => Err(Error::ChernIndexOutOfRange {
            index: j,
            rank: r,
            bundle: "E".into(),
        }),
        _ => Err(Error::InvalidBundle(format!("{b}: only E is allowed here"))),
    })
    .map_err(|e| e.to_string())
}

/// Parse and check every symbol against `ρ`.
pub fn parse_checked(text: &str, rho: &DimensionSequence) -> Result<ChernExpr, String> {
    let e = parse(text).map_err(|e| e.to_string())?;
    e.validate(rho).map_err(|e| e.to_string())?;
    Ok(e)
}
