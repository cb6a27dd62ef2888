//! Square-summable sequences with exact rational entries given in closed form.
//!
//! [`SeqVec`] is a single closed form as written in the DSL. [`SeqComb`] is a
//! finite linear combination of the basis sequences [`Basis`]; the basis
//! sequences are linearly independent, so a `SeqComb` has a unique
//! representation and structural equality is equality of sequences.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Finitely supported vector, indices start at 1. Zero entries are never stored.
pub type FiniteVec = BTreeMap<usize, Rational>;

/// Basis sequences. `Coord(k)` is the unit vector `e_k`, `Geo(r)` has entry
/// `r^k` and `Pow(s)` has entry `1/k^s`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Coord(usize),
    Geo(Rational),
    Pow(u32),
}

impl Basis {
    pub fn entry(&self, k: usize) -> Rational {
        match self {
            Basis::Coord(j) => {
                if *j == k {
                    rational::one()
                } else {
                    rational::zero()
                }
            }
            Basis::Geo(r) => rational::pow(r, k as u32),
            Basis::Pow(s) => rational::inv_power(k, *s),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Basis::Coord(_))
    }
}

/// One closed-form sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeqVec {
    FiniteSupport(FiniteVec),
    /// Entry k is `scale * ratio^k`; `|ratio| < 1`.
    Geometric {
        ratio: Rational,
        scale: Rational,
    },
    /// Entry k is `coeff / k^exponent`; `exponent >= 1`.
    Power {
        coeff: Rational,
        exponent: u32,
    },
}

impl SeqVec {
    pub fn zero() -> Self {
        SeqVec::FiniteSupport(FiniteVec::new())
    }

    /// Unit vector `e_k`.
    pub fn unit(k: usize) -> Self {
        SeqVec::FiniteSupport(FiniteVec::from([(k, rational::one())]))
    }

    /// Builds a finite-support vector; indices must be positive and strictly
    /// increasing. Zero values are dropped.
    pub fn finite<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut map = FiniteVec::new();
        let mut last = 0usize;
        for (k, value) in entries {
            if k == 0 {
                return Err(Error::domain("sequence indices start at 1"));
            }
            if k <= last {
                return Err(Error::domain(format!(
                    "finite-support indices must be strictly increasing (got {k} after {last})"
                )));
            }
            last = k;
            if !value.is_zero() {
                map.insert(k, value);
            }
        }
        Ok(SeqVec::FiniteSupport(map))
    }

    pub fn geometric(ratio: Rational) -> Result<Self> {
        Self::scaled_geometric(ratio, rational::one())
    }

    pub fn scaled_geometric(ratio: Rational, scale: Rational) -> Result<Self> {
        if ratio.abs() >= rational::one() {
            return Err(Error::domain(format!(
                "geometric ratio {ratio} must satisfy |r| < 1"
            )));
        }
        if ratio.is_zero() || scale.is_zero() {
            return Ok(Self::zero());
        }
        Ok(SeqVec::Geometric { ratio, scale })
    }

    pub fn power(coeff: Rational, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::domain(
                "power decay exponent must be at least 1 for square summability",
            ));
        }
        if coeff.is_zero() {
            return Ok(Self::zero());
        }
        Ok(SeqVec::Power { coeff, exponent })
    }

    pub fn entry(&self, k: usize) -> Rational {
        match self {
            SeqVec::FiniteSupport(map) => map.get(&k).cloned().unwrap_or_else(rational::zero),
            SeqVec::Geometric { ratio, scale } => scale * rational::pow(ratio, k as u32),
            SeqVec::Power { coeff, exponent } => coeff * rational::inv_power(k, *exponent),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteVec> {
        match self {
            SeqVec::FiniteSupport(map) => Some(map),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SeqVec::FiniteSupport(map) if map.is_empty())
    }

    pub fn to_comb(&self) -> SeqComb {
        match self {
            SeqVec::FiniteSupport(map) => SeqComb::from_finite(map),
            SeqVec::Geometric { ratio, scale } => {
                SeqComb::basis(Basis::Geo(ratio.clone())).scale(scale)
            }
            SeqVec::Power { coeff, exponent } => SeqComb::basis(Basis::Pow(*exponent)).scale(coeff),
        }
    }

    /// `<self, v>` for finitely supported `v`.
    pub fn dot_finite(&self, v: &FiniteVec) -> Rational {
        v.iter()
            .map(|(k, vk)| vk * self.entry(*k))
            .fold(rational::zero(), |acc, t| acc + t)
    }
}

impl fmt::Display for SeqVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqVec::FiniteSupport(map) => {
                write!(f, "[")?;
                for (i, (k, v)) in map.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}:{v}")?;
                }
                write!(f, "]")
            }
            SeqVec::Geometric { ratio, scale } => {
                if scale.is_one() {
                    write!(f, "geo({ratio})")
                } else {
                    write!(f, "geo({ratio},{scale})")
                }
            }
            SeqVec::Power { coeff, exponent } => write!(f, "pow({coeff},{exponent})"),
        }
    }
}

/// Finite rational combination of [`Basis`] sequences, stored canonically.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeqComb {
    terms: BTreeMap<Basis, Rational>,
}

impl SeqComb {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: Basis) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(b, rational::one());
        SeqComb { terms }
    }

    pub fn from_finite(v: &FiniteVec) -> Self {
        let mut out = Self::zero();
        for (k, value) in v {
            out.add_term(Basis::Coord(*k), value.clone());
        }
        out
    }

    pub fn add_term(&mut self, b: Basis, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, b: &Basis) -> Rational {
        self.terms.get(b).cloned().unwrap_or_else(rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SeqComb {
            terms: self.terms.iter().map(|(b, v)| (b.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (b, c) in &other.terms {
            self.add_term(b.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (b, v) in &other.terms {
            self.add_term(b.clone(), v * c);
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-rational::one())
    }

    pub fn entry(&self, k: usize) -> Rational {
        self.terms
            .iter()
            .map(|(b, c)| c * b.entry(k))
            .fold(rational::zero(), |acc, t| acc + t)
    }

    /// `<self, v>` for finitely supported `v`.
    pub fn dot_finite(&self, v: &FiniteVec) -> Rational {
        v.iter()
            .map(|(k, vk)| vk * self.entry(*k))
            .fold(rational::zero(), |acc, t| acc + t)
    }

    /// Pointwise product with a finitely supported vector.
    pub fn pointwise_finite(&self, v: &FiniteVec) -> FiniteVec {
        v.iter()
            .filter_map(|(k, vk)| {
                let p = vk * self.entry(*k);
                (!p.is_zero()).then_some((*k, p))
            })
            .collect()
    }

    /// The coordinate part as a finite vector, or `None` if any infinite
    /// closed form is present.
    pub fn as_finite(&self) -> Option<FiniteVec> {
        let mut out = FiniteVec::new();
        for (b, c) in &self.terms {
            match b {
                Basis::Coord(k) => {
                    out.insert(*k, c.clone());
                }
                _ => return None,
            }
        }
        Some(out)
    }

    pub fn max_coord(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|b| match b {
                Basis::Coord(k) => Some(*k),
                _ => None,
            })
            .max()
    }

    /// Split into single closed forms: one finite-support part, then one form
    /// per geometric ratio and per power exponent.
    pub fn closed_forms(&self) -> Vec<SeqVec> {
        let mut finite = FiniteVec::new();
        let mut rest = Vec::new();
        for (b, c) in &self.terms {
            match b {
                Basis::Coord(k) => {
                    finite.insert(*k, c.clone());
                }
                Basis::Geo(r) => rest.push(SeqVec::Geometric {
                    ratio: r.clone(),
                    scale: c.clone(),
                }),
                Basis::Pow(s) => rest.push(SeqVec::Power {
                    coeff: c.clone(),
                    exponent: *s,
                }),
            }
        }
        let mut out = Vec::new();
        if !finite.is_empty() {
            out.push(SeqVec::FiniteSupport(finite));
        }
        out.extend(rest);
        out
    }
}

impl From<&SeqVec> for SeqComb {
    fn from(v: &SeqVec) -> Self {
        v.to_comb()
    }
}

impl fmt::Display for SeqComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let forms = self.closed_forms();
        if forms.is_empty() {
            return write!(f, "[]");
        }
        for (i, form) in forms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{form}")?;
        }
        Ok(())
    }
}

pub fn dot_finite(a: &FiniteVec, b: &FiniteVec) -> Rational {
    a.iter()
        .filter_map(|(k, ak)| b.get(k).map(|bk| ak * bk))
        .fold(rational::zero(), |acc, t| acc + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn geometric_rejects_large_ratio() {
        assert!(SeqVec::geometric(int(1)).is_err());
        assert!(SeqVec::geometric(rat(-3, 2)).is_err());
        assert!(SeqVec::geometric(rat(1, 2)).is_ok());
    }

    #[test]
    fn power_rejects_zero_exponent() {
        assert!(SeqVec::power(int(1), 0).is_err());
    }

    #[test]
    fn finite_rejects_unsorted_and_zero_index() {
        assert!(SeqVec::finite([(2, int(1)), (1, int(1))]).is_err());
        assert!(SeqVec::finite([(0, int(1))]).is_err());
        let v = SeqVec::finite([(1, int(0)), (3, int(2))]).unwrap();
        assert_eq!(v.as_finite().unwrap().len(), 1);
    }

    #[test]
    fn entries_of_closed_forms() {
        let g = SeqVec::geometric(rat(1, 2)).unwrap();
        assert_eq!(g.entry(2), rat(1, 4));
        let p = SeqVec::power(int(3), 2).unwrap();
        assert_eq!(p.entry(3), rat(1, 3));
    }

    #[test]
    fn comb_cancels_to_zero() {
        let mut c = SeqVec::geometric(rat(1, 3)).unwrap().to_comb();
        c.add_scaled(&SeqVec::geometric(rat(1, 3)).unwrap().to_comb(), &int(-1));
        assert!(c.is_zero());
        assert_eq!(c.to_string(), "[]");
    }

    #[test]
    fn comb_display_groups_coordinates() {
        let mut c = SeqComb::from_finite(&FiniteVec::from([(3, int(-1)), (1, int(2))]));
        c.add_term(Basis::Geo(rat(1, 2)), int(3));
        assert_eq!(c.to_string(), "[1:2,3:-1]+geo(1/2,3)");
    }
}
