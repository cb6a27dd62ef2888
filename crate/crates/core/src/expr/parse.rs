//! Recursive-descent parser for the expression DSL.
//!
//! ```text
//! expr     := term {('+'|'-') term}
//! term     := factor {'*' factor}
//! factor   := rational | 'x' | 'ip(v,' comb ')' | 'q(' oper ')' | '(' expr ')' | '-' factor
//! rational := ['-'] digits ['/' digits]
//! vec      := '[' [idx ':' rational {',' idx ':' rational}] ']'
//!           | 'geo(' rational [',' rational] ')' | 'pow(' rational ',' digits ')'
//! comb     := vec {'+' vec}
//! oper     := 'op(' rational ';' [comb] ';' [pairs] ')'
//! pairs    := '(' comb ',' comb ')' {',' '(' comb ',' comb ')'}
//! point    := 'point(' vec ',' rational ')'
//! ```
//!
//! Whitespace is ignored. `geo(r, c)` is the geometric sequence scaled by `c`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Expression, Point};
use crate::error::{Error, Result};
use crate::opsym::OperatorSymbol;
use crate::rational::Rational;
use crate::seq::{SeqComb, SeqVec};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number '{n}'"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(text[start..i].to_string()), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "()[],;:+-*/=".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(Error::syntax(i, format!("unexpected character '{ch}'")));
        }
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

pub(crate) struct Parser {
    tokens: Vec<(Tok, usize)>,
    idx: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            tokens: lex(text)?,
            idx: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.idx].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.idx + offset).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    pub(crate) fn pos(&self) -> usize {
        self.tokens[self.idx].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.idx].0.clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    pub(crate) fn at_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    pub(crate) fn at_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == name)
    }

    pub(crate) fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> Error {
        Error::syntax(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    pub(crate) fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    pub(crate) fn expect_ident(&mut self, name: &str) -> Result<()> {
        if self.at_ident(name) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{name}'")))
        }
    }

    /// Consumes an identifier and returns it with its position.
    pub(crate) fn ident(&mut self) -> Result<(String, usize)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub(crate) fn parse_full_expr(&mut self) -> Result<Expression> {
        let e = self.expr()?;
        self.expect_end()?;
        Ok(e)
    }

    pub(crate) fn expr(&mut self) -> Result<Expression> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat_sym('+') {
                terms.push(self.term()?);
            } else if self.eat_sym('-') {
                terms.push(-(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expression::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expression> {
        let mut factors = vec![self.factor()?];
        while self.eat_sym('*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expression::Prod(factors)
        })
    }

    /// `[factor '*' ...] comb`: a product coefficient followed by a direction.
    pub(crate) fn coefficient_times_comb(&mut self) -> Result<(Expression, SeqComb)> {
        let mut factors = Vec::new();
        while !self.at_vec_start() {
            factors.push(self.factor()?);
            self.expect_sym('*')?;
        }
        let dir = self.comb()?;
        let coeff = match factors.len() {
            0 => Expression::int(1),
            1 => factors.pop().unwrap(),
            _ => Expression::Prod(factors),
        };
        Ok((coeff, dir))
    }

    fn factor(&mut self) -> Result<Expression> {
        match self.peek().clone() {
            Tok::Num(_) => Ok(Expression::Const(self.rational()?)),
            Tok::Sym('-') => {
                if matches!(self.peek_at(1), Tok::Num(_)) {
                    Ok(Expression::Const(self.rational()?))
                } else {
                    self.bump();
                    Ok(-(self.factor()?))
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => {
                    self.bump();
                    Ok(Expression::X)
                }
                "ip" => {
                    self.bump();
                    self.expect_sym('(')?;
                    self.expect_ident("v")?;
                    self.expect_sym(',')?;
                    let w = self.comb()?;
                    self.expect_sym(')')?;
                    let mut forms = w.closed_forms();
                    Ok(match forms.len() {
                        0 => Expression::Lin(SeqVec::zero()),
                        1 => Expression::Lin(forms.pop().unwrap()),
                        _ => Expression::Sum(forms.into_iter().map(Expression::Lin).collect()),
                    })
                }
                "q" => {
                    self.bump();
                    self.expect_sym('(')?;
                    let a = self.oper()?;
                    self.expect_sym(')')?;
                    Ok(Expression::Quad(a))
                }
                _ => Err(self.unexpected("factor")),
            },
            _ => Err(self.unexpected("factor")),
        }
    }

    pub(crate) fn rational(&mut self) -> Result<Rational> {
        let negative = self.eat_sym('-');
        let num = self.digits()?;
        let mut value = Rational::from_integer(num);
        if self.at_sym('/') {
            let slash = self.pos();
            self.bump();
            let den = self.digits()?;
            if den.is_zero() {
                return Err(Error::syntax(slash, "zero denominator"));
            }
            value = Rational::new(value.to_integer(), den);
        }
        Ok(if negative { -value } else { value })
    }

    fn digits(&mut self) -> Result<BigInt> {
        match self.peek().clone() {
            Tok::Num(s) => {
                self.bump();
                Ok(s.parse::<BigInt>().expect("lexer only produces digits"))
            }
            _ => Err(self.unexpected("digits")),
        }
    }

    fn small_int(&mut self, what: &str) -> Result<usize> {
        let pos = self.pos();
        let n = self.digits()?;
        n.to_string()
            .parse::<usize>()
            .map_err(|_| Error::syntax(pos, format!("{what} out of range")))
    }

    pub(crate) fn at_vec_start(&self) -> bool {
        self.at_sym('[') || self.at_ident("geo") || self.at_ident("pow")
    }

    pub(crate) fn vec(&mut self) -> Result<SeqVec> {
        if self.eat_sym('[') {
            let mut entries = Vec::new();
            if !self.at_sym(']') {
                loop {
                    let k = self.small_int("index")?;
                    self.expect_sym(':')?;
                    let value = self.rational()?;
                    entries.push((k, value));
                    if !self.eat_sym(',') {
                        break;
                    }
                }
            }
            self.expect_sym(']')?;
            return SeqVec::finite(entries);
        }
        if self.at_ident("geo") {
            self.bump();
            self.expect_sym('(')?;
            let ratio = self.rational()?;
            let scale = if self.eat_sym(',') {
                self.rational()?
            } else {
                crate::rational::one()
            };
            self.expect_sym(')')?;
            return SeqVec::scaled_geometric(ratio, scale);
        }
        if self.at_ident("pow") {
            self.bump();
            self.expect_sym('(')?;
            let c = self.rational()?;
            self.expect_sym(',')?;
            let pos = self.pos();
            let s = self.small_int("exponent")?;
            let s = u32::try_from(s).map_err(|_| Error::syntax(pos, "exponent out of range"))?;
            self.expect_sym(')')?;
            return SeqVec::power(c, s);
        }
        Err(self.unexpected("sequence literal"))
    }

    pub(crate) fn comb(&mut self) -> Result<SeqComb> {
        let mut out = self.vec()?.to_comb();
        while self.at_sym('+') && {
            let next = self.peek_at(1);
            *next == Tok::Sym('[') || matches!(next, Tok::Ident(s) if s == "geo" || s == "pow")
        } {
            self.bump();
            out.add_assign(&self.vec()?.to_comb());
        }
        Ok(out)
    }

    pub(crate) fn oper(&mut self) -> Result<OperatorSymbol> {
        self.expect_ident("op")?;
        self.expect_sym('(')?;
        let lambda = self.rational()?;
        self.expect_sym(';')?;
        let diag = if self.at_sym(';') {
            SeqComb::zero()
        } else {
            self.comb()?
        };
        self.expect_sym(';')?;
        let mut pairs = Vec::new();
        if !self.at_sym(')') {
            loop {
                self.expect_sym('(')?;
                let u = self.comb()?;
                self.expect_sym(',')?;
                let w = self.comb()?;
                self.expect_sym(')')?;
                pairs.push((u, w));
                if !self.eat_sym(',') {
                    break;
                }
            }
        }
        self.expect_sym(')')?;
        Ok(OperatorSymbol::new(lambda, diag, pairs))
    }

    pub(crate) fn point(&mut self) -> Result<Point> {
        self.expect_ident("point")?;
        self.expect_sym('(')?;
        let pos = self.pos();
        let v = self.vec()?;
        self.expect_sym(',')?;
        let x = self.rational()?;
        self.expect_sym(')')?;
        match v.as_finite() {
            Some(map) => Ok(Point::new(map.clone(), x)),
            None => Err(Error::syntax(
                pos,
                "point coordinates must be a finite-support vector",
            )),
        }
    }
}

pub fn parse_point(text: &str) -> Result<Point> {
    let mut p = Parser::new(text)?;
    let m = p.point()?;
    p.expect_end()?;
    Ok(m)
}

pub fn parse_seqvec(text: &str) -> Result<SeqVec> {
    let mut p = Parser::new(text)?;
    let v = p.vec()?;
    p.expect_end()?;
    Ok(v)
}

pub fn parse_comb(text: &str) -> Result<SeqComb> {
    let mut p = Parser::new(text)?;
    let v = p.comb()?;
    p.expect_end()?;
    Ok(v)
}

/// Parses an operator literal `op(...)`.
pub fn parse_operator(text: &str) -> Result<OperatorSymbol> {
    let mut p = Parser::new(text)?;
    let a = p.oper()?;
    p.expect_end()?;
    Ok(a)
}
