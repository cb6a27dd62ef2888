//! Structured bounded operators `lambda*I + D + F` on l2.
//!
//! `D` is diagonal with entries given by a [`SeqComb`] (so they tend to zero)
//! and `F` is finite rank. Rank-one terms follow the convention
//! `(u (x) w)(a) = <a, w> u`, so the matrix entry `<(u (x) w) e_k, e_j>` is
//! `u_j w_k`. The finite-rank part is stored as a coefficient map over pairs of
//! basis sequences, which makes structural equality of operators exact.
//!
//! Every operator of this form is `lambda*I` plus a compact operator, and the
//! singular functional [`ell`] returns `lambda`: it sends the identity to 1,
//! vanishes on compact operators, and agrees with the limit of the diagonal
//! entries `<A e_n, e_n>`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::rational::{self, Rational};
use crate::seq::{Basis, FiniteVec, SeqComb};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperatorSymbol {
    lambda: Rational,
    diag: SeqComb,
    rank1: BTreeMap<(Basis, Basis), Rational>,
}

impl OperatorSymbol {
    pub fn new<I>(lambda: Rational, diag: SeqComb, pairs: I) -> Self
    where
        I: IntoIterator<Item = (SeqComb, SeqComb)>,
    {
        let mut op = OperatorSymbol {
            lambda,
            diag,
            rank1: BTreeMap::new(),
        };
        for (u, w) in pairs {
            op.add_rank_one(&u, &w, &rational::one());
        }
        op
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(lambda: Rational) -> Self {
        OperatorSymbol {
            lambda,
            ..Self::default()
        }
    }

    pub fn identity() -> Self {
        Self::scalar(rational::one())
    }

    pub fn diagonal(diag: SeqComb) -> Self {
        OperatorSymbol {
            diag,
            ..Self::default()
        }
    }

    pub fn rank_one(u: &SeqComb, w: &SeqComb) -> Self {
        let mut op = Self::zero();
        op.add_rank_one(u, w, &rational::one());
        op
    }

    /// Adds `c * (u (x) w)`, expanded bilinearly over the basis.
    pub fn add_rank_one(&mut self, u: &SeqComb, w: &SeqComb, c: &Rational) {
        for (bu, cu) in u.terms() {
            for (bw, cw) in w.terms() {
                let coeff = c * cu * cw;
                if coeff.is_zero() {
                    continue;
                }
                match self.rank1.entry((bu.clone(), bw.clone())) {
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
        }
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn diag(&self) -> &SeqComb {
        &self.diag
    }

    /// Finite-rank part as `(u_basis, w_basis, coeff)` triples.
    pub fn rank1_terms(&self) -> impl Iterator<Item = (&Basis, &Basis, &Rational)> {
        self.rank1.iter().map(|((u, w), c)| (u, w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero() && self.diag.is_zero() && self.rank1.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &rational::one());
        out
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        if c.is_zero() {
            return;
        }
        self.lambda += &other.lambda * c;
        self.diag.add_scaled(&other.diag, c);
        for ((bu, bw), v) in &other.rank1 {
            self.add_rank_one(
                &SeqComb::basis(bu.clone()),
                &SeqComb::basis(bw.clone()),
                &(v * c),
            );
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn transpose(&self) -> Self {
        OperatorSymbol {
            lambda: self.lambda.clone(),
            diag: self.diag.clone(),
            rank1: self
                .rank1
                .iter()
                .map(|((u, w), c)| ((w.clone(), u.clone()), c.clone()))
                .collect(),
        }
    }

    /// `A + A^T`, the operator of the symmetric bilinear form `2 <Av, w>_sym`.
    pub fn symmetrized(&self) -> Self {
        self.add(&self.transpose())
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_compact(&self) -> bool {
        self.lambda.is_zero()
    }

    pub fn ell(&self) -> Rational {
        self.lambda.clone()
    }

    /// `A v` for finitely supported `v`.
    pub fn apply(&self, v: &FiniteVec) -> SeqComb {
        let mut out = SeqComb::from_finite(v).scale(&self.lambda);
        out.add_assign(&SeqComb::from_finite(&self.diag.pointwise_finite(v)));
        for ((bu, bw), c) in &self.rank1 {
            let pairing = SeqComb::basis(bw.clone()).dot_finite(v);
            out.add_term(bu.clone(), c * pairing);
        }
        out
    }

    /// `<A e_col, e_row>`.
    pub fn entry(&self, row: usize, col: usize) -> Rational {
        let mut value = rational::zero();
        if row == col {
            value += &self.lambda + self.diag.entry(row);
        }
        for ((bu, bw), c) in &self.rank1 {
            value += c * bu.entry(row) * bw.entry(col);
        }
        value
    }

    pub fn diagonal_entry(&self, n: usize) -> Rational {
        self.entry(n, n)
    }

    /// `<A v, v>` for finitely supported `v`.
    pub fn quadratic_form(&self, v: &FiniteVec) -> Rational {
        let norm2 = v
            .values()
            .map(|a| a * a)
            .fold(rational::zero(), |acc, t| acc + t);
        let mut value = &self.lambda * norm2;
        for (k, vk) in v {
            value += self.diag.entry(*k) * vk * vk;
        }
        for ((bu, bw), c) in &self.rank1 {
            let pu = SeqComb::basis(bu.clone()).dot_finite(v);
            let pw = SeqComb::basis(bw.clone()).dot_finite(v);
            value += c * pu * pw;
        }
        value
    }

    /// Rank-one pairs with the coefficient folded into the left factor.
    pub fn pairs(&self) -> Vec<(SeqComb, SeqComb)> {
        self.rank1
            .iter()
            .map(|((bu, bw), c)| {
                (
                    SeqComb::basis(bu.clone()).scale(c),
                    SeqComb::basis(bw.clone()),
                )
            })
            .collect()
    }
}

impl fmt::Display for OperatorSymbol {
    /// Literal form `op(lambda; diag; (u,w),...)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "op({};", self.lambda)?;
        if !self.diag.is_zero() {
            write!(f, "{}", self.diag)?;
        }
        write!(f, ";")?;
        for (i, (u, w)) in self.pairs().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({u},{w})")?;
        }
        write!(f, ")")
    }
}

pub fn op_add(a: &OperatorSymbol, b: &OperatorSymbol) -> OperatorSymbol {
    a.add(b)
}

pub fn op_transpose(a: &OperatorSymbol) -> OperatorSymbol {
    a.transpose()
}

pub fn op_apply(a: &OperatorSymbol, v: &FiniteVec) -> SeqComb {
    a.apply(v)
}

/// The singular functional on `{lambda*I + compact}`: `ell(I) = 1`,
/// `ell(K) = 0` for compact `K`.
pub fn ell(a: &OperatorSymbol) -> Rational {
    a.ell()
}

pub fn diagonal_entry(a: &OperatorSymbol, n: usize) -> Rational {
    a.diagonal_entry(n)
}

pub fn is_compact(a: &OperatorSymbol) -> bool {
    a.is_compact()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::seq::SeqVec;

    fn harmonic() -> SeqComb {
        SeqVec::power(int(1), 1).unwrap().to_comb()
    }

    fn e(k: usize) -> SeqComb {
        SeqComb::basis(Basis::Coord(k))
    }

    #[test]
    fn identity_plus_identity() {
        let two = op_add(&OperatorSymbol::identity(), &OperatorSymbol::identity());
        assert_eq!(two, OperatorSymbol::scalar(int(2)));
    }

    #[test]
    fn cancellation_leaves_compact_diag() {
        let a = OperatorSymbol::new(int(2), harmonic(), []);
        let b = OperatorSymbol::scalar(int(-2));
        let sum = op_add(&a, &b);
        assert_eq!(sum, OperatorSymbol::diagonal(harmonic()));
        assert!(is_compact(&sum));
    }

    #[test]
    fn rank_one_sums_stay_compact() {
        let a = OperatorSymbol::rank_one(&e(1), &e(2));
        let b = OperatorSymbol::rank_one(&e(3), &harmonic());
        let sum = op_add(&a, &b);
        assert_eq!(sum.rank1_terms().count(), 2);
        assert!(sum.lambda().is_zero());
    }

    #[test]
    fn transpose_rules() {
        assert_eq!(
            op_transpose(&OperatorSymbol::identity()),
            OperatorSymbol::identity()
        );
        let uw = OperatorSymbol::rank_one(&e(1), &harmonic());
        assert_eq!(
            op_transpose(&uw),
            OperatorSymbol::rank_one(&harmonic(), &e(1))
        );
        let ld = OperatorSymbol::new(int(3), harmonic(), []);
        assert_eq!(op_transpose(&ld), ld);
    }

    #[test]
    fn apply_examples() {
        let e1 = FiniteVec::from([(1, int(1))]);
        assert_eq!(op_apply(&OperatorSymbol::identity(), &e1), e(1));

        let two_e3 = FiniteVec::from([(3, int(2))]);
        let d = OperatorSymbol::diagonal(harmonic());
        assert_eq!(op_apply(&d, &two_e3), e(3).scale(&rat(2, 3)));

        let uw = OperatorSymbol::rank_one(&e(1), &e(2));
        assert!(op_apply(&uw, &two_e3).is_zero());
    }

    #[test]
    fn ell_examples() {
        assert_eq!(ell(&OperatorSymbol::scalar(int(2))), int(2));
        let g = SeqVec::geometric(rat(1, 2)).unwrap().to_comb();
        assert_eq!(ell(&OperatorSymbol::rank_one(&g, &harmonic())), int(0));
        assert_eq!(ell(&OperatorSymbol::diagonal(harmonic())), int(0));
    }

    #[test]
    fn diagonal_entry_examples() {
        let a = OperatorSymbol::new(int(2), harmonic(), []);
        assert_eq!(diagonal_entry(&a, 10), rat(21, 10));
        for n in [1, 7, 1000] {
            assert_eq!(diagonal_entry(&OperatorSymbol::identity(), n), int(1));
        }
        assert_eq!(
            diagonal_entry(&OperatorSymbol::rank_one(&e(1), &e(1)), 2),
            int(0)
        );
    }

    #[test]
    fn compactness() {
        let a = op_add(
            &OperatorSymbol::diagonal(harmonic()),
            &OperatorSymbol::rank_one(&e(1), &e(2)),
        );
        assert!(is_compact(&a));
        assert!(!is_compact(&OperatorSymbol::identity()));
        assert!(is_compact(&OperatorSymbol::zero()));
    }

    #[test]
    fn quadratic_form_matches_matrix_entries() {
        let g = SeqVec::geometric(rat(-1, 3)).unwrap().to_comb();
        let mut a = OperatorSymbol::new(rat(1, 2), harmonic(), [(e(2), g.clone())]);
        a.add_rank_one(&g, &harmonic(), &int(3));
        let v = FiniteVec::from([(1, int(2)), (2, rat(-1, 2)), (4, int(1))]);
        let mut brute = rational::zero();
        for (j, vj) in &v {
            for (k, vk) in &v {
                brute += a.entry(*j, *k) * vj * vk;
            }
        }
        assert_eq!(a.quadratic_form(&v), brute);
    }

    #[test]
    fn display_literal() {
        assert_eq!(OperatorSymbol::identity().to_string(), "op(1;;)");
        let a = OperatorSymbol::new(int(2), harmonic(), [(e(1), e(2).scale(&int(3)))]);
        assert_eq!(a.to_string(), "op(2;pow(1,1);([1:3],[2:1]))");
    }
}
