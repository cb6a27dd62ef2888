//! `delta_ell` does not extend to a derivation of vector-valued functions.
//!
//! Take `f(v) = <v, .>` with values in the dual, `g(v) = v` and the duality
//! pairing `B`, so `B(f, g) = rho`. A derivation `D` extending `delta_ell` would
//! satisfy `D(B(f, g)) = B(Df, g) + B(f, Dg)`. At `v = 0` the left side is
//! `delta_ell(rho)(0) = 2` while both terms on the right carry a factor
//! `f(0) = g(0) = 0`.

use crate::expr::{Expression, Point};
use crate::jet;
use crate::rational::Rational;
use crate::seq::{FiniteVec, SeqVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub lhs: Rational,
    pub rhs: Rational,
}

/// `B(Df, g)(0) + B(f, Dg)(0)` for arbitrary values of `Df(0)` and `Dg(0)`.
pub fn extended_leibniz_rhs(df_at_zero: &SeqVec, dg_at_zero: &SeqVec) -> Rational {
    let at_zero = Point::origin();
    let f_at_zero: &FiniteVec = &at_zero.v;
    let g_at_zero: &FiniteVec = &at_zero.v;
    df_at_zero.dot_finite(g_at_zero) + dg_at_zero.dot_finite(f_at_zero)
}

pub fn extension_obstruction_demo() -> ObstructionReport {
    let lhs = jet::delta_ell(&Expression::rho()).eval(&Point::origin());
    let rhs = extended_leibniz_rhs(&SeqVec::unit(1), &SeqVec::unit(1));
    ObstructionReport { lhs, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::sample::Sampler;

    #[test]
    fn sides_disagree() {
        let r = extension_obstruction_demo();
        assert_eq!(r.lhs, int(2));
        assert_eq!(r.rhs, int(0));
    }

    #[test]
    fn rhs_vanishes_for_any_stand_ins() {
        let mut s = Sampler::new(4);
        for _ in 0..20 {
            assert_eq!(extended_leibniz_rhs(&s.seqvec(), &s.seqvec()), int(0));
        }
    }

    #[test]
    fn lhs_via_hessian() {
        assert_eq!(
            jet::delta_ell_via_hessian(&Expression::rho(), &Point::origin()),
            int(2)
        );
    }
}
