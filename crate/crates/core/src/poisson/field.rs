use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expr::{Atom, Expression, Parser, Point, Poly};
use crate::jet;
use crate::rational::{self, Rational};
use crate::sample::Sampler;
use crate::seq::{FiniteVec, SeqVec};

/// Operational vector field
/// `sum_k c_k d/dv_k + c_x d/dx + c_q delta_ell`
/// with polynomial coefficients.
///
/// Kinematic directions are finitely supported, so the kinematic part is
/// stored per coordinate. This keeps the representation unique and keeps every
/// pairing a finite exact sum.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperationalField {
    kin: BTreeMap<usize, Poly>,
    dx: Poly,
    queer: Poly,
}

/// Order of an operational tangent vector at a point. On l2 x R the model
/// space is reflexive, so order-one vectors are kinematic and
/// [`Order::Order1`] never comes out of [`order_at`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Kinematic,
    Order1,
    Queer,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Order::Kinematic => "Kinematic",
            Order::Order1 => "Order1",
            Order::Queer => "Queer",
        };
        f.write_str(s)
    }
}

/// Coefficients of a field evaluated at one point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TangentAt {
    pub kin: FiniteVec,
    pub dx: Rational,
    pub queer: Rational,
}

impl TangentAt {
    /// Coordinates in the basis `d/dv_k, d/dx, delta_ell`, keyed so that two
    /// tangents can be compared component by component.
    pub(crate) fn components(&self) -> BTreeMap<Slot, Rational> {
        let mut out = BTreeMap::new();
        for (k, c) in &self.kin {
            out.insert(Slot::Coord(*k), c.clone());
        }
        if !self.dx.is_zero() {
            out.insert(Slot::Dx, self.dx.clone());
        }
        if !self.queer.is_zero() {
            out.insert(Slot::Queer, self.queer.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.kin.is_empty() && self.dx.is_zero() && self.queer.is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Slot {
    Coord(usize),
    Dx,
    Queer,
}

impl OperationalField {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The constant field `delta_ell`.
    pub fn delta_ell() -> Self {
        Self::zero().with_queer(Poly::one())
    }

    /// The constant field `d/dx`.
    pub fn ddx() -> Self {
        Self::zero().with_dx(Poly::one())
    }

    /// Constant kinematic field along a finitely supported direction.
    pub fn kinematic(direction: &FiniteVec) -> Self {
        Self::zero().with_kin(&Poly::one(), direction)
    }

    /// Constant kinematic field along `e_k`.
    pub fn unit(k: usize) -> Self {
        Self::kinematic(&FiniteVec::from([(k, rational::one())]))
    }

    /// Builds a field from optional parts. Kinematic directions must have
    /// finite support.
    pub fn new(
        kin: Option<(Expression, SeqVec)>,
        dx: Option<Expression>,
        queer: Option<Expression>,
    ) -> Result<Self> {
        let mut field = Self::zero();
        if let Some((coeff, dir)) = kin {
            let dir = dir.as_finite().ok_or_else(|| {
                Error::domain(format!(
                    "kinematic direction {dir} must have finite support"
                ))
            })?;
            field = field.with_kin(&coeff.canonical(), dir);
        }
        if let Some(dx) = dx {
            field = field.with_dx(dx.canonical());
        }
        if let Some(q) = queer {
            field = field.with_queer(q.canonical());
        }
        Ok(field)
    }

    /// Adds `coeff * d/dw` for a finitely supported direction `w`.
    pub fn with_kin(mut self, coeff: &Poly, direction: &FiniteVec) -> Self {
        for (k, wk) in direction {
            let slot = self.kin.entry(*k).or_default();
            slot.add_scaled(coeff, wk);
        }
        self.kin.retain(|_, c| !c.is_zero());
        self
    }

    pub fn with_dx(mut self, coeff: Poly) -> Self {
        self.dx.add_assign(&coeff);
        self
    }

    pub fn with_queer(mut self, coeff: Poly) -> Self {
        self.queer.add_assign(&coeff);
        self
    }

    pub fn kin(&self) -> &BTreeMap<usize, Poly> {
        &self.kin
    }

    pub fn dx(&self) -> &Poly {
        &self.dx
    }

    pub fn queer(&self) -> &Poly {
        &self.queer
    }

    pub fn is_zero(&self) -> bool {
        self.kin.is_empty() && self.dx.is_zero() && self.queer.is_zero()
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: &Poly) -> Self {
        let kin = self
            .kin
            .iter()
            .map(|(k, p)| (*k, p.mul(c)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        OperationalField {
            kin,
            dx: self.dx.mul(c),
            queer: self.queer.mul(c),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut kin = self.kin.clone();
        for (k, p) in &other.kin {
            kin.entry(*k).or_default().add_assign(p);
        }
        kin.retain(|_, c| !c.is_zero());
        OperationalField {
            kin,
            dx: self.dx.add(&other.dx),
            queer: self.queer.add(&other.queer),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(&Poly::constant(-rational::one())))
    }

    /// Value of the field on one atom.
    fn on_atom(&self, a: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in &self.kin {
            let d = jet::partial_atom(a, *k);
            if !d.is_zero() {
                out.add_assign(&c.mul(&d));
            }
        }
        if !self.dx.is_zero() {
            out.add_assign(&self.dx.mul(&jet::ddx_atom(a)));
        }
        if !self.queer.is_zero() {
            out.add_assign(&self.queer.mul(&jet::delta_ell_atom(a)));
        }
        out
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        f.derive(|a| self.on_atom(a))
    }

    /// The operational tangent vector at `m`.
    pub fn at(&self, m: &Point) -> TangentAt {
        TangentAt {
            kin: self
                .kin
                .iter()
                .map(|(k, c)| (*k, c.eval(m)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            dx: self.dx.eval(m),
            queer: self.queer.eval(m),
        }
    }

    /// Coordinates that appear in the kinematic part or in any coefficient.
    pub fn support(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.kin.keys().copied().collect();
        for p in self.kin.values().chain([&self.dx, &self.queer]) {
            for a in p.atoms() {
                if let Atom::Lin(crate::seq::Basis::Coord(k)) = a {
                    ks.push(k);
                }
            }
        }
        ks.sort_unstable();
        ks.dedup();
        ks
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, p: &Poly) -> fmt::Result {
    if p.len() > 1 {
        write!(f, "({p})")
    } else {
        write!(f, "{p}")
    }
}

impl fmt::Display for OperationalField {
    /// Literal form `field(kin=c*[k:1]; dx=...; queer=...)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "field(")?;
        let mut first = true;
        for (k, c) in &self.kin {
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            write!(f, "kin=")?;
            write_coeff(f, c)?;
            write!(f, "*[{k}:1]")?;
        }
        for (name, p) in [("dx", &self.dx), ("queer", &self.queer)] {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            write!(f, "{name}={p}")?;
        }
        write!(f, ")")
    }
}

/// Parses `field(kin=<expr>*<vec>; dx=<expr>; queer=<expr>)`; every part may
/// be omitted and `kin` may repeat.
pub fn parse_field(text: &str) -> Result<OperationalField> {
    let mut p = Parser::new(text)?;
    p.expect_ident("field")?;
    p.expect_sym('(')?;
    let mut field = OperationalField::zero();
    if !p.at_sym(')') {
        loop {
            let (name, pos) = p.ident()?;
            p.expect_sym('=')?;
            match name.as_str() {
                "kin" => {
                    let dir_pos = p.pos();
                    let (coeff, dir) = p.coefficient_times_comb()?;
                    let dir = dir.as_finite().ok_or_else(|| {
                        Error::syntax(dir_pos, "kinematic direction must have finite support")
                    })?;
                    field = field.with_kin(&coeff.canonical(), &dir);
                }
                "dx" => field = field.with_dx(p.expr()?.canonical()),
                "queer" => field = field.with_queer(p.expr()?.canonical()),
                other => {
                    return Err(Error::syntax(
                        pos,
                        format!("unknown field part '{other}' (expected kin, dx or queer)"),
                    ))
                }
            }
            if !p.eat_sym(';') {
                break;
            }
        }
    }
    p.expect_sym(')')?;
    p.expect_end()?;
    Ok(field)
}

pub fn apply_field(d: &OperationalField, f: &Expression) -> Expression {
    d.apply(&f.canonical()).to_expression()
}

/// Queer iff the `delta_ell` coefficient is nonzero at `m`.
pub fn order_at(d: &OperationalField, m: &Point) -> Order {
    if d.queer.eval(m).is_zero() {
        Order::Kinematic
    } else {
        Order::Queer
    }
}

/// `[d1, d2] = d1 d2 - d2 d1`, computed coefficient-wise.
///
/// The constant fields `d/dv_k`, `d/dx` and `delta_ell` pairwise commute and
/// all three are derivations of the expression algebra, so
/// `[sum a_i E_i, sum b_j E_j] = sum_j (A(b_j) - B(a_j)) E_j`.
pub fn commutator(d1: &OperationalField, d2: &OperationalField) -> OperationalField {
    let mut keys: Vec<usize> = d1.kin.keys().chain(d2.kin.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let zero = Poly::zero();
    let mut out = OperationalField::zero();
    for k in keys {
        let a = d1.kin.get(&k).unwrap_or(&zero);
        let b = d2.kin.get(&k).unwrap_or(&zero);
        let c = d1.apply(b).sub(&d2.apply(a));
        if !c.is_zero() {
            out.kin.insert(k, c);
        }
    }
    out.dx = d1.apply(&d2.dx).sub(&d2.apply(&d1.dx));
    out.queer = d1.apply(&d2.queer).sub(&d2.apply(&d1.queer));
    out
}

const COMMUTE_SEED: u64 = 0x5eed;

/// Checks `d1(d2 f) = d2(d1 f)` in canonical form on the generators `x`,
/// `v_k` (for every coordinate the fields touch) and `rho`, plus `samples`
/// random expressions.
///
/// The commutator of two derivations is a derivation, and on this function
/// class it is determined by its values on those generators, so the generator
/// part alone decides commutation; the random samples guard the construction.
pub fn commute_check(d1: &OperationalField, d2: &OperationalField, samples: usize) -> bool {
    let mut coords = d1.support();
    coords.extend(d2.support());
    coords.push(1);
    coords.sort_unstable();
    coords.dedup();

    let mut probes: Vec<Poly> = vec![Poly::x(), Poly::rho()];
    probes.extend(coords.iter().map(|k| Poly::coord(*k)));
    let mut sampler = Sampler::new(COMMUTE_SEED);
    probes.extend((0..samples).map(|_| sampler.expression().canonical()));

    probes.iter().all(|f| {
        let lhs = d1.apply(&d2.apply(f));
        let rhs = d2.apply(&d1.apply(f));
        lhs == rhs
    })
}
