//! First and second derivatives of expressions.
//!
//! [`gradient`] and [`hessian`] walk the expression tree with the sum and
//! product rules. [`delta_ell`] and [`ddx`] return new expressions, so they
//! act as operational vector fields `C^inf -> C^inf`.
//!
//! `delta_ell(f)` is `m -> ell(f''_m)`. Because `ell` kills every rank-one
//! operator, the product-rule cross terms `f' (x) g' + g' (x) f'` drop out and
//! `delta_ell` obeys the first-order Leibniz rule even though it reads second
//! derivatives.

use std::fmt;

use num_traits::Zero;

use crate::expr::{Atom, Expression, Point, Poly};
use crate::opsym::OperatorSymbol;
use crate::rational::{self, Rational};
use crate::seq::{FiniteVec, SeqComb};

/// Differential of a function at a point: the l2 representative of the
/// `v`-part and the `d/dx` component.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualVector {
    pub vpart: SeqComb,
    pub xpart: Rational,
}

impl DualVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Riesz representative of `<., w>`.
    pub fn riesz(w: SeqComb) -> Self {
        DualVector {
            vpart: w,
            xpart: rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vpart.is_zero() && self.xpart.is_zero()
    }

    pub fn add_scaled(&mut self, other: &DualVector, c: &Rational) {
        self.vpart.add_scaled(&other.vpart, c);
        self.xpart += &other.xpart * c;
    }

    pub fn scale(&self, c: &Rational) -> DualVector {
        DualVector {
            vpart: self.vpart.scale(c),
            xpart: &self.xpart * c,
        }
    }
}

impl fmt::Display for DualVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dual({};{})", self.vpart, self.xpart)
    }
}

/// Second differential split into the `v-v`, `v-x` and `x-x` blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HessianSymbol {
    pub vv: OperatorSymbol,
    pub vx: SeqComb,
    pub xx: Rational,
}

impl HessianSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.vv.is_zero() && self.vx.is_zero() && self.xx.is_zero()
    }

    fn add_scaled(&mut self, other: &HessianSymbol, c: &Rational) {
        self.vv.add_scaled(&other.vv, c);
        self.vx.add_scaled(&other.vx, c);
        self.xx += &other.xx * c;
    }

    /// Adds `c * (a (x) b + b (x) a)`.
    fn add_symmetric_product(&mut self, a: &DualVector, b: &DualVector, c: &Rational) {
        if c.is_zero() {
            return;
        }
        self.vv.add_rank_one(&a.vpart, &b.vpart, c);
        self.vv.add_rank_one(&b.vpart, &a.vpart, c);
        self.vx.add_scaled(&a.vpart, &(c * &b.xpart));
        self.vx.add_scaled(&b.vpart, &(c * &a.xpart));
        self.xx += c * rational::int(2) * &a.xpart * &b.xpart;
    }
}

impl fmt::Display for HessianSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vv={}\nvx={}\nxx={}", self.vv, self.vx, self.xx)
    }
}

/// Value, gradient and Hessian of an expression at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet2 {
    pub value: Rational,
    pub grad: DualVector,
    pub hess: HessianSymbol,
}

impl Jet2 {
    fn constant(c: Rational) -> Self {
        Jet2 {
            value: c,
            grad: DualVector::zero(),
            hess: HessianSymbol::zero(),
        }
    }

    fn scale(&self, c: &Rational) -> Self {
        let mut hess = HessianSymbol::zero();
        hess.add_scaled(&self.hess, c);
        Jet2 {
            value: &self.value * c,
            grad: self.grad.scale(c),
            hess,
        }
    }

    fn add_assign(&mut self, other: &Jet2) {
        self.value += &other.value;
        self.grad.add_scaled(&other.grad, &rational::one());
        self.hess.add_scaled(&other.hess, &rational::one());
    }

    fn mul(&self, other: &Jet2) -> Jet2 {
        let mut grad = self.grad.scale(&other.value);
        grad.add_scaled(&other.grad, &self.value);
        let mut hess = HessianSymbol::zero();
        hess.add_scaled(&self.hess, &other.value);
        hess.add_scaled(&other.hess, &self.value);
        hess.add_symmetric_product(&self.grad, &other.grad, &rational::one());
        Jet2 {
            value: &self.value * &other.value,
            grad,
            hess,
        }
    }
}

/// Exact 2-jet of `f` at `m`.
pub fn jet2(f: &Expression, m: &Point) -> Jet2 {
    match f {
        Expression::Const(c) => Jet2::constant(c.clone()),
        Expression::X => Jet2 {
            value: m.x.clone(),
            grad: DualVector {
                vpart: SeqComb::zero(),
                xpart: rational::one(),
            },
            hess: HessianSymbol::zero(),
        },
        Expression::Lin(w) => Jet2 {
            value: w.dot_finite(&m.v),
            grad: DualVector::riesz(w.to_comb()),
            hess: HessianSymbol::zero(),
        },
        Expression::Quad(a) => {
            let sym = a.symmetrized();
            Jet2 {
                value: a.quadratic_form(&m.v),
                grad: DualVector::riesz(sym.apply(&m.v)),
                hess: HessianSymbol {
                    vv: sym,
                    ..HessianSymbol::zero()
                },
            }
        }
        Expression::Sum(terms) => {
            let mut acc = Jet2::constant(rational::zero());
            for t in terms {
                acc.add_assign(&jet2(t, m));
            }
            acc
        }
        Expression::Prod(factors) => {
            let mut acc = Jet2::constant(rational::one());
            for fac in factors {
                acc = acc.mul(&jet2(fac, m));
            }
            acc
        }
        Expression::Scale(c, inner) => jet2(inner, m).scale(c),
    }
}

/// `f'_m`
pub fn gradient(f: &Expression, m: &Point) -> DualVector {
    jet2(f, m).grad
}

/// `f''_m`; the `vv` block is symmetric.
pub fn hessian(f: &Expression, m: &Point) -> HessianSymbol {
    jet2(f, m).hess
}

/// `delta_ell` by structural recursion on the tree, returned in canonical form.
pub fn delta_ell(f: &Expression) -> Expression {
    delta_ell_tree(f).canonical().to_expression()
}

fn delta_ell_tree(f: &Expression) -> Expression {
    match f {
        Expression::Const(_) | Expression::X | Expression::Lin(_) => Expression::int(0),
        Expression::Quad(a) => Expression::Const(a.symmetrized().ell()),
        Expression::Sum(terms) => Expression::Sum(terms.iter().map(delta_ell_tree).collect()),
        Expression::Prod(factors) => {
            let terms = (0..factors.len())
                .map(|i| {
                    let mut fs = factors.clone();
                    fs[i] = delta_ell_tree(&factors[i]);
                    Expression::Prod(fs)
                })
                .collect();
            Expression::Sum(terms)
        }
        Expression::Scale(c, inner) => Expression::scale(c.clone(), delta_ell_tree(inner)),
    }
}

pub fn ddx(f: &Expression) -> Expression {
    ddx_poly(&f.canonical()).to_expression()
}

/// `delta_ell` on the canonical form: `rho -> 2`, every other atom `-> 0`.
pub fn delta_ell_poly(p: &Poly) -> Poly {
    p.derive(delta_ell_atom)
}

pub fn ddx_poly(p: &Poly) -> Poly {
    p.derive(ddx_atom)
}

/// Partial derivative along the unit vector `e_k`.
pub fn partial_poly(p: &Poly, k: usize) -> Poly {
    p.derive(|a| partial_atom(a, k))
}

pub(crate) fn delta_ell_atom(a: &Atom) -> Poly {
    match a {
        Atom::Rho => Poly::constant(rational::int(2)),
        _ => Poly::zero(),
    }
}

pub(crate) fn ddx_atom(a: &Atom) -> Poly {
    match a {
        Atom::X => Poly::one(),
        _ => Poly::zero(),
    }
}

pub(crate) fn partial_atom(a: &Atom, k: usize) -> Poly {
    match a {
        Atom::X => Poly::zero(),
        Atom::Lin(b) => Poly::constant(b.entry(k)),
        Atom::Rho => Poly::coord(k).scale(&rational::int(2)),
        Atom::Diag(b) => Poly::coord(k).scale(&(rational::int(2) * b.entry(k))),
    }
}

/// `ell(f''_m.vv)`, the jet-based route to `delta_ell`.
pub fn delta_ell_via_hessian(f: &Expression, m: &Point) -> Rational {
    hessian(f, m).vv.ell()
}

/// `<f'_m, w>` for a finitely supported direction.
pub fn directional(f: &Expression, m: &Point, direction: &FiniteVec) -> Rational {
    gradient(f, m).vpart.dot_finite(direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::rational::{int, rat};
    use crate::seq::{Basis, SeqVec};

    fn e(k: usize) -> SeqComb {
        SeqComb::basis(Basis::Coord(k))
    }

    #[test]
    fn gradient_of_rho_at_origin_vanishes() {
        assert!(gradient(&Expression::rho(), &Point::origin()).is_zero());
    }

    #[test]
    fn gradient_of_linear() {
        let w = SeqVec::geometric(rat(1, 3)).unwrap();
        let m = Point::new(FiniteVec::from([(2, int(5))]), int(1));
        assert_eq!(
            gradient(&Expression::lin(w.clone()), &m),
            DualVector::riesz(w.to_comb())
        );
    }

    #[test]
    fn gradient_of_x_rho() {
        let f = Expression::X * Expression::rho();
        let m = Point::new(FiniteVec::from([(1, int(1))]), int(3));
        let g = gradient(&f, &m);
        assert_eq!(g.vpart, e(1).scale(&int(6)));
        assert_eq!(g.xpart, int(1));
    }

    #[test]
    fn hessian_of_rho_is_twice_identity() {
        let m = Point::new(FiniteVec::from([(4, rat(2, 7))]), int(-1));
        let h = hessian(&Expression::rho(), &m);
        assert_eq!(h.vv, OperatorSymbol::scalar(int(2)));
        assert!(h.vx.is_zero());
        assert!(h.xx.is_zero());
    }

    #[test]
    fn hessian_of_linear_is_zero() {
        let w = SeqVec::power(int(2), 1).unwrap();
        assert!(hessian(&Expression::lin(w), &Point::origin()).is_zero());
    }

    #[test]
    fn hessian_of_product_of_linears() {
        let w = SeqVec::finite([(1, int(1)), (2, int(2))]).unwrap();
        let w2 = SeqVec::geometric(rat(1, 2)).unwrap();
        let f = Expression::lin(w.clone()) * Expression::lin(w2.clone());
        let h = hessian(&f, &Point::origin());
        let mut expected = OperatorSymbol::rank_one(&w.to_comb(), &w2.to_comb());
        expected.add_rank_one(&w2.to_comb(), &w.to_comb(), &int(1));
        assert_eq!(h.vv, expected);
        assert!(h.vv.is_symmetric());
    }

    #[test]
    fn delta_ell_examples() {
        assert_eq!(delta_ell(&Expression::rho()), Expression::int(2));
        let w = SeqVec::finite([(3, int(1))]).unwrap();
        assert_eq!(delta_ell(&Expression::lin(w)), Expression::int(0));
        let f = Expression::X * Expression::rho();
        assert_eq!(
            delta_ell(&f),
            Expression::Prod(vec![Expression::int(2), Expression::X])
        );
    }

    #[test]
    fn delta_ell_ignores_compact_parts() {
        let f = parse_expr("q(op(3;pow(1,1)+geo(1/2);([1:1],geo(1/3))))").unwrap();
        assert_eq!(delta_ell(&f), Expression::int(6));
    }

    #[test]
    fn ddx_examples() {
        let x2 = Expression::X * Expression::X;
        assert!(ddx(&x2).same_function(&Expression::scale(int(2), Expression::X)));
        assert_eq!(ddx(&Expression::rho()), Expression::int(0));
        let w = SeqVec::power(int(1), 2).unwrap();
        let f = Expression::X * Expression::lin(w.clone());
        assert!(ddx(&f).same_function(&Expression::lin(w)));
    }

    #[test]
    fn partial_of_quadratic_matches_gradient() {
        let f = parse_expr("q(op(1/2;geo(1/2);([1:1],[3:2]))) * x").unwrap();
        let m = Point::new(FiniteVec::from([(1, int(1)), (3, int(-2))]), rat(1, 3));
        let g = gradient(&f, &m);
        for k in 1..=4 {
            assert_eq!(
                partial_poly(&f.canonical(), k).eval(&m),
                g.vpart.entry(k),
                "k={k}"
            );
        }
    }
}
