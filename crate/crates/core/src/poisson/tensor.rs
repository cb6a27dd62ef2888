use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::bracket::BracketSpec;
use super::field::Slot;
use crate::error::{Error, Result};
use crate::expr::{Expression, Point, Poly};
use crate::jet::{self, DualVector};
use crate::rational::{self, Rational};
use crate::seq::{FiniteVec, SeqComb, SeqVec};

/// A kinematic tangent direction on l2 x R.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Coord(usize),
    Dx,
}

impl Direction {
    /// Pairing of a covector with this direction.
    pub fn pair(self, mu: &DualVector) -> Rational {
        match self {
            Direction::Coord(k) => mu.vpart.entry(k),
            Direction::Dx => mu.xpart.clone(),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Coord(k) => write!(f, "e{k}"),
            Direction::Dx => write!(f, "dx"),
        }
    }
}

/// Kinematic vector `(v, x)` with finitely supported `v`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KinematicVector {
    pub v: FiniteVec,
    pub x: Rational,
}

impl KinematicVector {
    fn add_scaled(&mut self, d: Direction, c: &Rational) {
        match d {
            Direction::Coord(k) => {
                let e = self.v.entry(k).or_insert_with(rational::zero);
                *e += c;
                if e.is_zero() {
                    self.v.remove(&k);
                }
            }
            Direction::Dx => self.x += c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_empty() && self.x.is_zero()
    }
}

impl fmt::Display for KinematicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", SeqVec::FiniteSupport(self.v.clone()), self.x)
    }
}

/// Bivector `sum c * a^b` with `a < b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorAtPoint {
    terms: BTreeMap<(Direction, Direction), Rational>,
}

impl TensorAtPoint {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Adds `c * a^b`, reordering to keep `a < b`.
    pub fn add_wedge(&mut self, a: Direction, b: Direction, c: Rational) {
        if a == b || c.is_zero() {
            return;
        }
        let (key, c) = if a < b { ((a, b), c) } else { ((b, a), -c) };
        let e = self.terms.entry(key).or_insert_with(rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn wedge(a: Direction, b: Direction) -> Self {
        let mut t = Self::zero();
        t.add_wedge(a, b, rational::one());
        t
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Direction, &Direction, &Rational)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Pi(mu, nu)`.
    pub fn pair(&self, mu: &DualVector, nu: &DualVector) -> Rational {
        self.terms
            .iter()
            .map(|((a, b), c)| c * (a.pair(mu) * b.pair(nu) - b.pair(mu) * a.pair(nu)))
            .sum()
    }
}

impl fmt::Display for TensorAtPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{a}^{b}")?;
        }
        Ok(())
    }
}

/// The Poisson tensor `(d1)_m ^ (d2)_m` of an order-one bracket at `m`.
///
/// Linearly dependent fields give the zero tensor. Otherwise a nonzero
/// `delta_ell` coefficient in either field makes the bracket queer at `m`.
pub fn tensor_at(b: &BracketSpec, m: &Point) -> Result<TensorAtPoint> {
    let t1 = b.d1().at(m).components();
    let t2 = b.d2().at(m).components();
    let slots: Vec<Slot> = {
        let mut s: Vec<Slot> = t1.keys().chain(t2.keys()).copied().collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let zero = rational::zero();
    let get = |t: &BTreeMap<Slot, Rational>, s: &Slot| t.get(s).unwrap_or(&zero).clone();

    let mut tensor = TensorAtPoint::zero();
    let mut queer = false;
    for (i, a) in slots.iter().enumerate() {
        for s in &slots[i + 1..] {
            let minor = get(&t1, a) * get(&t2, s) - get(&t1, s) * get(&t2, a);
            if minor.is_zero() {
                continue;
            }
            match (direction(a), direction(s)) {
                (Some(da), Some(ds)) => tensor.add_wedge(da, ds, minor),
                _ => queer = true,
            }
        }
    }
    if queer {
        let field = if t1.contains_key(&Slot::Queer) { 1 } else { 2 };
        return Err(Error::QueerAtPoint {
            field,
            point: m.to_string(),
        });
    }
    Ok(tensor)
}

fn direction(s: &Slot) -> Option<Direction> {
    match s {
        Slot::Coord(k) => Some(Direction::Coord(*k)),
        Slot::Dx => Some(Direction::Dx),
        Slot::Queer => None,
    }
}

/// `#(mu) = Pi(mu, .)`, always a kinematic vector.
pub fn sharp(t: &TensorAtPoint, mu: &DualVector) -> KinematicVector {
    let mut out = KinematicVector::default();
    for ((a, b), c) in &t.terms {
        out.add_scaled(*b, &(c * a.pair(mu)));
        out.add_scaled(*a, &(-(c * b.pair(mu))));
    }
    out
}

/// A certificate of queerness: `f` has zero differential at the point yet
/// `{h, f}` does not vanish there.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub h: Expression,
    pub f: Expression,
    pub value: Rational,
}

/// `rho` re-centred at `m`: `<v - m_v, v - m_v>`, whose differential vanishes
/// at `m` while `delta_ell` of it is 2.
fn recentred_rho(m: &Point) -> Expression {
    if m.v.is_empty() {
        return Expression::rho();
    }
    let w = SeqVec::FiniteSupport(m.v.clone());
    Expression::sum(vec![
        Expression::rho(),
        Expression::scale(rational::int(-2), Expression::lin(w)),
        Expression::Const(crate::seq::dot_finite(&m.v, &m.v)),
    ])
}

fn recentred_quadratics(m: &Point, coords: &[usize]) -> Vec<Expression> {
    let shifted_x = Expression::sum(vec![Expression::X, Expression::Const(-m.x.clone())]);
    let shifted_v = |k: usize| {
        let mk = m.v.get(&k).cloned().unwrap_or_else(rational::zero);
        Expression::sum(vec![Expression::coord(k), Expression::Const(-mk)])
    };
    let mut out = vec![recentred_rho(m), shifted_x.clone() * shifted_x.clone()];
    for &k in coords {
        out.push(shifted_v(k) * shifted_v(k));
        out.push(shifted_x.clone() * shifted_v(k));
    }
    out
}

/// Searches `h` over `-x`, the coordinates `v_k` and `rho`, and `f` over
/// quadratics re-centred at `m`, for a pair with `f'_m = 0` and
/// `{h, f}(m) != 0`.
pub fn queer_witness(b: &BracketSpec, m: &Point) -> Result<Witness> {
    let mut coords = b.d1().support();
    coords.extend(b.d2().support());
    coords.extend(m.v.keys().copied());
    coords.push(1);
    coords.sort_unstable();
    coords.dedup();

    let mut hs = vec![-Expression::X];
    hs.extend(coords.iter().map(|k| Expression::coord(*k)));
    hs.push(Expression::rho());

    let fs: Vec<(Expression, Poly)> = recentred_quadratics(m, &coords)
        .into_iter()
        .filter(|f| jet::gradient(f, m).is_zero())
        .map(|f| {
            let p = f.canonical();
            (f, p)
        })
        .collect();

    for h in &hs {
        let hp = h.canonical();
        for (f, fp) in &fs {
            let value = b.bracket_poly(&hp, fp).eval(m);
            if !value.is_zero() {
                return Ok(Witness {
                    h: h.clone(),
                    f: f.clone(),
                    value,
                });
            }
        }
    }
    Err(Error::WitnessNotFound(format!(
        "no pair in the search family at {m}"
    )))
}

/// Riesz covector of a finitely supported vector plus an `x` component.
pub fn covector(v: &FiniteVec, x: Rational) -> DualVector {
    DualVector {
        vpart: SeqComb::from_finite(v),
        xpart: x,
    }
}
