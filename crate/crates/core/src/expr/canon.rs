//! Canonical polynomial form.
//!
//! Every expression is a polynomial with rational coefficients in the atoms
//!
//! - `x`,
//! - `<v, b>` for a basis sequence `b` (coordinates `v_k`, geometric and power
//!   sequences),
//! - `rho = <v, v>`,
//! - `<D v, v>` for a geometric or power diagonal `D`.
//!
//! These atoms are algebraically independent functions on l2 x R, so two
//! expressions define the same function exactly when their canonical forms are
//! equal. A finite-support diagonal is expanded into squared coordinates and a
//! rank-one quadratic form into a product of two linear atoms.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Expression, Point};
use crate::opsym::OperatorSymbol;
use crate::rational::{self, Rational};
use crate::seq::{Basis, SeqComb, SeqVec};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    X,
    Lin(Basis),
    Rho,
    /// Invariant: never holds `Basis::Coord`.
    Diag(Basis),
}

impl Atom {
    pub fn degree(&self) -> u32 {
        match self {
            Atom::X | Atom::Lin(_) => 1,
            Atom::Rho | Atom::Diag(_) => 2,
        }
    }

    pub fn eval(&self, m: &Point) -> Rational {
        match self {
            Atom::X => m.x.clone(),
            Atom::Lin(b) => SeqComb::basis(b.clone()).dot_finite(&m.v),
            Atom::Rho => {
                m.v.values()
                    .map(|a| a * a)
                    .fold(rational::zero(), |acc, t| acc + t)
            }
            Atom::Diag(b) => {
                m.v.iter()
                    .map(|(k, a)| b.entry(*k) * a * a)
                    .fold(rational::zero(), |acc, t| acc + t)
            }
        }
    }

    pub fn to_expression(&self) -> Expression {
        match self {
            Atom::X => Expression::X,
            Atom::Lin(b) => Expression::Lin(basis_seq(b)),
            Atom::Rho => Expression::rho(),
            Atom::Diag(b) => Expression::Quad(OperatorSymbol::diagonal(SeqComb::basis(b.clone()))),
        }
    }
}

fn basis_seq(b: &Basis) -> SeqVec {
    match b {
        Basis::Coord(k) => SeqVec::unit(*k),
        Basis::Geo(r) => SeqVec::Geometric {
            ratio: r.clone(),
            scale: rational::one(),
        },
        Basis::Pow(s) => SeqVec::Power {
            coeff: rational::one(),
            exponent: *s,
        },
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::X => write!(f, "x"),
            Atom::Lin(b) => write!(f, "ip(v,{})", basis_seq(b)),
            Atom::Rho => write!(f, "q(op(1;;))"),
            Atom::Diag(b) => write!(f, "q(op(0;{};))", basis_seq(b)),
        }
    }
}

/// Product of atoms with positive exponents, sorted by atom. Ordered by total
/// degree first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    degree: u32,
    factors: Vec<(Atom, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn atom(a: Atom) -> Self {
        Monomial {
            degree: a.degree(),
            factors: vec![(a, 1)],
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, ea) = &self.factors[i];
            let (b, eb) = &other.factors[j];
            match a.cmp(b) {
                std::cmp::Ordering::Less => {
                    factors.push((a.clone(), *ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    factors.push((b.clone(), *eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    factors.push((a.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        factors.extend_from_slice(&self.factors[i..]);
        factors.extend_from_slice(&other.factors[j..]);
        Monomial {
            degree: self.degree + other.degree,
            factors,
        }
    }

    /// The monomial with the factor at `idx` lowered by one power.
    fn lower(&self, idx: usize) -> Monomial {
        let mut factors = self.factors.clone();
        let (atom, e) = &mut factors[idx];
        let deg = atom.degree();
        if *e == 1 {
            factors.remove(idx);
        } else {
            *e -= 1;
        }
        Monomial {
            degree: self.degree - deg,
            factors,
        }
    }

    fn eval_with(&self, values: &BTreeMap<Atom, Rational>) -> Rational {
        let mut acc = rational::one();
        for (a, e) in &self.factors {
            acc *= rational::pow(&values[a], *e);
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, e) in &self.factors {
            for _ in 0..*e {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

/// Canonical polynomial: nonzero rational coefficients keyed by monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(rational::one())
    }

    pub fn atom(a: Atom) -> Self {
        Self::term(Monomial::atom(a), rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn x() -> Self {
        Self::atom(Atom::X)
    }

    pub fn coord(k: usize) -> Self {
        Self::atom(Atom::Lin(Basis::Coord(k)))
    }

    pub fn rho() -> Self {
        Self::atom(Atom::Rho)
    }

    /// `<v, w>` for a combination `w`.
    pub fn linear(w: &SeqComb) -> Self {
        let mut p = Self::zero();
        for (b, c) in w.terms() {
            p.add_term(Monomial::atom(Atom::Lin(b.clone())), c.clone());
        }
        p
    }

    /// `<A v, v>`.
    pub fn quadratic(a: &OperatorSymbol) -> Self {
        let mut p = Self::rho().scale(a.lambda());
        for (b, c) in a.diag().terms() {
            match b {
                Basis::Coord(k) => {
                    let vk = Monomial::atom(Atom::Lin(Basis::Coord(*k)));
                    p.add_term(vk.mul(&vk), c.clone());
                }
                _ => p.add_term(Monomial::atom(Atom::Diag(b.clone())), c.clone()),
            }
        }
        for (u, w, c) in a.rank1_terms() {
            let m = Monomial::atom(Atom::Lin(u.clone())).mul(&Monomial::atom(Atom::Lin(w.clone())));
            p.add_term(m, c.clone());
        }
        p
    }

    pub fn from_expression(e: &Expression) -> Self {
        match e {
            Expression::Const(c) => Self::constant(c.clone()),
            Expression::X => Self::x(),
            Expression::Lin(w) => Self::linear(&w.to_comb()),
            Expression::Quad(a) => Self::quadratic(a),
            Expression::Sum(terms) => {
                let mut p = Self::zero();
                for t in terms {
                    p.add_assign(&Self::from_expression(t));
                }
                p
            }
            Expression::Prod(factors) => {
                let mut p = Self::one();
                for f in factors {
                    if p.is_zero() {
                        break;
                    }
                    p = p.mul(&Self::from_expression(f));
                }
                p
            }
            Expression::Scale(c, inner) => Self::from_expression(inner).scale(c),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.factors.iter().map(|(a, _)| a.clone()))
            .collect()
    }

    pub fn max_coord(&self) -> usize {
        self.atoms()
            .iter()
            .filter_map(|a| match a {
                Atom::Lin(Basis::Coord(k)) => Some(*k),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        let mut out = Poly::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-rational::one())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, &-rational::one());
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn eval(&self, m: &Point) -> Rational {
        let values: BTreeMap<Atom, Rational> = self
            .atoms()
            .into_iter()
            .map(|a| {
                let v = a.eval(m);
                (a, v)
            })
            .collect();
        self.terms
            .iter()
            .map(|(mono, c)| c * mono.eval_with(&values))
            .fold(rational::zero(), |acc, t| acc + t)
    }

    /// Applies the derivation determined by its values on atoms.
    pub fn derive<F>(&self, on_atom: F) -> Poly
    where
        F: Fn(&Atom) -> Poly,
    {
        let derived: BTreeMap<Atom, Poly> = self
            .atoms()
            .into_iter()
            .map(|a| {
                let d = on_atom(&a);
                (a, d)
            })
            .collect();
        let mut out = Poly::zero();
        for (mono, c) in &self.terms {
            for (idx, (atom, e)) in mono.factors.iter().enumerate() {
                let da = &derived[atom];
                if da.is_zero() {
                    continue;
                }
                let rest = mono.lower(idx);
                let coeff = c * rational::int(*e as i64);
                for (md, cd) in &da.terms {
                    out.add_term(rest.mul(md), &coeff * cd);
                }
            }
        }
        out
    }

    pub fn to_expression(&self) -> Expression {
        let mut terms: Vec<Expression> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    return Expression::Const(c.clone());
                }
                let mut factors = Vec::new();
                if !c.is_one() {
                    factors.push(Expression::Const(c.clone()));
                }
                for (a, e) in &m.factors {
                    for _ in 0..*e {
                        factors.push(a.to_expression());
                    }
                }
                if factors.len() == 1 {
                    factors.pop().unwrap()
                } else {
                    Expression::Prod(factors)
                }
            })
            .collect();
        match terms.len() {
            0 => Expression::Const(rational::zero()),
            1 => terms.pop().unwrap(),
            _ => Expression::Sum(terms),
        }
    }
}

impl From<&Expression> for Poly {
    fn from(e: &Expression) -> Self {
        Poly::from_expression(e)
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::sub(self, rhs)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let magnitude = if i == 0 { c.clone() } else { c.abs() };
            if i > 0 {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{magnitude}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::rational::{int, rat};

    #[test]
    fn rank_one_quadratic_equals_product_of_linears() {
        let a = parse_expr("q(op(0;;([1:1]+geo(1/2),pow(1,2))))").unwrap();
        let b = parse_expr("(ip(v,[1:1]) + ip(v,geo(1/2))) * ip(v,pow(1,2))").unwrap();
        assert!(a.same_function(&b));
    }

    #[test]
    fn finite_diagonal_expands_into_squares() {
        let a = parse_expr("q(op(0;[2:3];))").unwrap();
        let b = parse_expr("3*ip(v,[2:1])*ip(v,[2:1])").unwrap();
        assert!(a.same_function(&b));
    }

    #[test]
    fn derivation_on_atoms() {
        // d/dx of x^2 * rho
        let p = Poly::from_expression(&parse_expr("x*x*q(op(1;;))").unwrap());
        let d = p.derive(|a| {
            if *a == Atom::X {
                Poly::one()
            } else {
                Poly::zero()
            }
        });
        assert_eq!(
            d,
            Poly::from_expression(&parse_expr("2*x*q(op(1;;))").unwrap())
        );
    }

    #[test]
    fn print_round_trip_of_all_atom_kinds() {
        let text = "x*ip(v,[3:1]) + ip(v,geo(-1/3))*ip(v,pow(1,2)) + q(op(0;geo(1/2);)) - q(op(0;pow(1,1);))*x";
        let p = Poly::from_expression(&parse_expr(text).unwrap());
        let again = Poly::from_expression(&parse_expr(&p.to_string()).unwrap());
        assert_eq!(p, again);
    }

    #[test]
    fn as_constant() {
        assert_eq!(Poly::zero().as_constant(), Some(int(0)));
        assert_eq!(Poly::constant(rat(1, 2)).as_constant(), Some(rat(1, 2)));
        assert_eq!(Poly::x().as_constant(), None);
    }
}
