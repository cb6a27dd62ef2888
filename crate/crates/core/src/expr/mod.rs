//! Expressions on l2 x R: the AST, its text form and exact evaluation.

mod canon;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

pub use canon::{Atom, Monomial, Poly};
pub(crate) use parse::Parser;
pub use parse::{parse_comb, parse_operator, parse_point, parse_seqvec};

use crate::error::{Error, Result};
use crate::opsym::OperatorSymbol;
use crate::rational::{self, Rational};
use crate::seq::{FiniteVec, SeqVec};

/// Symbolic function of `(v, x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expression {
    Const(Rational),
    X,
    /// `<v, w>`
    Lin(SeqVec),
    /// `<A v, v>`
    Quad(OperatorSymbol),
    Sum(Vec<Expression>),
    Prod(Vec<Expression>),
    Scale(Rational, Box<Expression>),
}

impl Expression {
    pub fn constant(c: Rational) -> Self {
        Expression::Const(c)
    }

    pub fn int(n: i64) -> Self {
        Expression::Const(rational::int(n))
    }

    /// `rho(v) = <v, v>`
    pub fn rho() -> Self {
        Expression::Quad(OperatorSymbol::identity())
    }

    pub fn lin(w: SeqVec) -> Self {
        Expression::Lin(w)
    }

    /// The coordinate function `v_k`.
    pub fn coord(k: usize) -> Self {
        Expression::Lin(SeqVec::unit(k))
    }

    pub fn sum(terms: Vec<Expression>) -> Self {
        Expression::Sum(terms)
    }

    pub fn prod(factors: Vec<Expression>) -> Self {
        Expression::Prod(factors)
    }

    pub fn scale(c: Rational, e: Expression) -> Self {
        Expression::Scale(c, Box::new(e))
    }

    /// Canonical polynomial form.
    pub fn canonical(&self) -> Poly {
        Poly::from_expression(self)
    }

    /// Equality as functions, decided on canonical forms.
    pub fn same_function(&self, other: &Expression) -> bool {
        self.canonical() == other.canonical()
    }

    /// Exact value at a point, computed directly on the tree.
    pub fn eval(&self, m: &Point) -> Rational {
        match self {
            Expression::Const(c) => c.clone(),
            Expression::X => m.x.clone(),
            Expression::Lin(w) => w.dot_finite(&m.v),
            Expression::Quad(a) => a.quadratic_form(&m.v),
            Expression::Sum(terms) => terms
                .iter()
                .map(|t| t.eval(m))
                .fold(rational::zero(), |acc, t| acc + t),
            Expression::Prod(factors) => {
                let mut acc = rational::one();
                for f in factors {
                    if acc.is_zero() {
                        break;
                    }
                    acc *= f.eval(m);
                }
                acc
            }
            Expression::Scale(c, e) => c * e.eval(m),
        }
    }

    /// Largest coordinate index referenced by a finite-support part.
    pub fn max_coord(&self) -> usize {
        match self {
            Expression::Const(_) | Expression::X => 0,
            Expression::Lin(w) => w.to_comb().max_coord().unwrap_or(0),
            Expression::Quad(a) => {
                let mut k = a.diag().max_coord().unwrap_or(0);
                for (u, w, _) in a.rank1_terms() {
                    for b in [u, w] {
                        if let crate::seq::Basis::Coord(j) = b {
                            k = k.max(*j);
                        }
                    }
                }
                k
            }
            Expression::Sum(v) | Expression::Prod(v) => {
                v.iter().map(Expression::max_coord).max().unwrap_or(0)
            }
            Expression::Scale(_, e) => e.max_coord(),
        }
    }
}

impl std::ops::Add for Expression {
    type Output = Expression;
    fn add(self, rhs: Expression) -> Expression {
        Expression::Sum(vec![self, rhs])
    }
}

impl std::ops::Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression::Scale(-rational::one(), Box::new(self))
    }
}

impl std::ops::Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        Expression::Sum(vec![self, -rhs])
    }
}

impl std::ops::Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        Expression::Prod(vec![self, rhs])
    }
}

impl fmt::Display for Expression {
    /// Prints the canonical form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

/// A point `(v, x)` with finitely supported `v`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Point {
    pub v: FiniteVec,
    pub x: Rational,
}

impl Point {
    pub fn new(v: FiniteVec, x: Rational) -> Self {
        let v = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Point { v, x }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn from_seq(v: &SeqVec, x: Rational) -> Result<Self> {
        match v.as_finite() {
            Some(map) => Ok(Point::new(map.clone(), x)),
            None => Err(Error::domain(format!(
                "points need a finite-support vector, got {v}"
            ))),
        }
    }

    pub fn max_coord(&self) -> usize {
        self.v.keys().next_back().copied().unwrap_or(0)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "point({},{})",
            SeqVec::FiniteSupport(self.v.clone()),
            self.x
        )
    }
}

impl From<(BTreeMap<usize, Rational>, Rational)> for Point {
    fn from((v, x): (BTreeMap<usize, Rational>, Rational)) -> Self {
        Point::new(v, x)
    }
}

pub fn parse_expr(text: &str) -> Result<Expression> {
    Parser::new(text)?.parse_full_expr()
}

pub fn eval(f: &Expression, m: &Point) -> Rational {
    f.eval(m)
}

/// Canonical text form, re-parseable by [`parse_expr`].
pub fn print_expr(f: &Expression) -> String {
    f.canonical().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::seq::SeqComb;

    fn point(entries: &[(usize, i64)], x: i64) -> Point {
        Point::new(entries.iter().map(|(k, v)| (*k, int(*v))).collect(), int(x))
    }

    #[test]
    fn parse_identity_quad_is_rho() {
        assert_eq!(parse_expr("q(op(1;;))").unwrap(), Expression::rho());
    }

    #[test]
    fn parse_lin_times_x() {
        let e = parse_expr("ip(v,[1:1/2,3:-2]) * x").unwrap();
        let w = SeqVec::finite([(1, rat(1, 2)), (3, int(-2))]).unwrap();
        assert_eq!(e, Expression::Prod(vec![Expression::Lin(w), Expression::X]));
    }

    #[test]
    fn parse_quad_with_diagonal() {
        let e = parse_expr("q(op(2; pow(1,1) ;))").unwrap();
        let d = SeqVec::power(int(1), 1).unwrap().to_comb();
        assert_eq!(e, Expression::Quad(OperatorSymbol::new(int(2), d, [])));
    }

    #[test]
    fn parse_rejects_large_geometric_ratio() {
        let err = parse_expr("ip(v,geo(3/2))").unwrap_err();
        assert_eq!(err.code(), "DomainError");
    }

    #[test]
    fn parse_reports_position() {
        match parse_expr("x + * 2").unwrap_err() {
            Error::Syntax { pos, .. } => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval(&Expression::rho(), &point(&[(1, 2)], 0)), int(4));
        let g = Expression::lin(SeqVec::geometric(rat(1, 2)).unwrap());
        assert_eq!(eval(&g, &point(&[(2, 4)], 0)), int(1));
        let q = parse_expr("q(op(2; pow(1,1) ;))").unwrap();
        assert_eq!(eval(&q, &point(&[(1, 1)], 0)), int(3));
    }

    #[test]
    fn print_examples() {
        assert_eq!(print_expr(&Expression::rho()), "q(op(1;;))");
        assert_eq!(print_expr(&Expression::int(0)), "0");
        assert_eq!(print_expr(&Expression::scale(int(2), Expression::X)), "2*x");
    }

    #[test]
    fn print_negative_terms() {
        let e = parse_expr("1 - x*x + -3/2*x").unwrap();
        assert_eq!(print_expr(&e), "1 - 3/2*x - x*x");
    }

    #[test]
    fn linear_and_quadratic_vanish_at_zero() {
        let m = Point::new(FiniteVec::new(), int(7));
        let w = SeqVec::power(int(3), 2).unwrap();
        assert_eq!(eval(&Expression::lin(w), &m), int(0));
        let a = OperatorSymbol::new(
            int(5),
            SeqComb::zero(),
            [(
                SeqComb::basis(crate::seq::Basis::Coord(1)),
                SeqComb::basis(crate::seq::Basis::Pow(1)),
            )],
        );
        assert_eq!(eval(&Expression::Quad(a), &m), int(0));
    }

    #[test]
    fn point_literal_round_trip() {
        let m = parse_point("point([1:2,4:-1/3], 5/2)").unwrap();
        assert_eq!(m.to_string(), "point([1:2,4:-1/3],5/2)");
        assert_eq!(parse_point("point([],0)").unwrap(), Point::origin());
        assert!(parse_point("point(geo(1/2),0)").is_err());
    }
}
