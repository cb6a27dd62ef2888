use num_traits::Zero;
use proptest::prelude::*;

use opbracket::expr::{parse_expr, print_expr};
use opbracket::jet::{self, ddx, delta_ell};
use opbracket::opsym::{self, OperatorSymbol};
use opbracket::poisson::{
    apply_field, bracket, hamiltonian_field, sharp, tensor_at, BracketSpec, OperationalField, Order,
};
use opbracket::rational::{self, int};
use opbracket::sample::Sampler;
use opbracket::seq::SeqVec;
use opbracket::trunc::{ell_convergence, truncate};
use opbracket::{Expression, Point};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let e = s.expression();
        let back = parse_expr(&print_expr(&e)).unwrap();
        for _ in 0..20 {
            let m = s.point();
            prop_assert_eq!(back.eval(&m), e.eval(&m));
        }
        prop_assert_eq!(print_expr(&back), print_expr(&e));
    }

    #[test]
    fn eval_is_a_ring_homomorphism(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (f, g, m) = (s.expression(), s.expression(), s.point());
        prop_assert_eq!((f.clone() + g.clone()).eval(&m), f.eval(&m) + g.eval(&m));
        prop_assert_eq!((f.clone() * g.clone()).eval(&m), f.eval(&m) * g.eval(&m));
    }

    #[test]
    fn forms_vanish_at_zero_vector(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let at = Point::new(Default::default(), s.rational());
        prop_assert!(Expression::lin(s.seqvec()).eval(&at).is_zero());
        prop_assert!(Expression::Quad(s.operator()).eval(&at).is_zero());
    }

    #[test]
    fn ell_is_linear(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (a, b) = (s.operator(), s.operator());
        let (alpha, beta) = (s.rational(), s.rational());
        let combo = a.scale(&alpha).add(&b.scale(&beta));
        prop_assert_eq!(opsym::ell(&combo), alpha * opsym::ell(&a) + beta * opsym::ell(&b));
    }

    #[test]
    fn ell_kills_rank_one_and_ignores_transpose(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (u, w) = (s.comb(), s.comb());
        prop_assert!(opsym::ell(&OperatorSymbol::rank_one(&u, &w)).is_zero());
        let a = s.operator();
        prop_assert_eq!(opsym::ell(&opsym::op_transpose(&a)), opsym::ell(&a));
        if opsym::is_compact(&a) {
            prop_assert!(opsym::ell(&a).is_zero());
        }
    }

    #[test]
    fn diagonal_error_is_the_closed_form_tail(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let a = s.operator();
        for r in ell_convergence(&a, &[10, 100, 1000]) {
            let tail = a.diag().entry(r.n) + rank_one_tail(&a, r.n);
            prop_assert_eq!(&r.abs_err, &rational::abs(&tail));
        }
    }

    #[test]
    fn diagonal_error_shrinks_monotonically(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let a = OperatorSymbol::new(s.rational(), s.comb(), Vec::new());
        let rows = ell_convergence(&a, &[10, 100, 1000]);
        for pair in rows.windows(2) {
            prop_assert!(pair[1].abs_err <= pair[0].abs_err);
        }
    }

    #[test]
    fn delta_ell_matches_hessian(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (f, m) = (s.expression(), s.point());
        prop_assert_eq!(delta_ell(&f).eval(&m), jet::delta_ell_via_hessian(&f, &m));
    }

    #[test]
    fn delta_ell_is_pointwise_leibniz(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (f, g, m) = (s.expression(), s.expression(), s.point());
        let lhs = delta_ell(&(f.clone() * g.clone())).eval(&m);
        let rhs = delta_ell(&f).eval(&m) * g.eval(&m) + f.eval(&m) * delta_ell(&g).eval(&m);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn delta_ell_commutes_with_ddx(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let f = s.expression();
        prop_assert!(delta_ell(&ddx(&f)).same_function(&ddx(&delta_ell(&f))));
    }

    #[test]
    fn hessian_is_symmetric(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (f, m) = (s.expression(), s.point());
        prop_assert!(jet::hessian(&f, &m).vv.is_symmetric());
    }

    #[test]
    fn derivations_are_linear(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (f, g, m) = (s.expression(), s.expression(), s.point());
        let (a, b) = (s.rational(), s.rational());
        let combo = Expression::scale(a.clone(), f.clone()) + Expression::scale(b.clone(), g.clone());
        let d = |e: &Expression| delta_ell(e).eval(&m);
        prop_assert_eq!(d(&combo), &a * d(&f) + &b * d(&g));
        let dx = |e: &Expression| ddx(e).eval(&m);
        prop_assert_eq!(dx(&combo), &a * dx(&f) + &b * dx(&g));
        let w = s.finite_vec(3);
        let k = |e: &Expression| jet::directional(e, &m, &w);
        prop_assert_eq!(k(&combo), &a * k(&f) + &b * k(&g));
    }

    #[test]
    fn rho_is_not_kinematically_moved_at_zero(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let at = Point::new(Default::default(), s.rational());
        let w = s.finite_vec(3);
        prop_assert!(jet::directional(&Expression::rho(), &at, &w).is_zero());
        prop_assert_eq!(delta_ell(&Expression::rho()).eval(&at), int(2));
    }

    #[test]
    fn hamiltonian_field_reproduces_bracket(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let b = bracket_family(seed);
        let (h, f, m) = (s.expression(), s.expression(), s.point());
        let xh = hamiltonian_field(&b, &h);
        prop_assert_eq!(apply_field(&xh, &f).eval(&m), bracket(&b, &h, &f).eval(&m));
    }

    #[test]
    fn tensor_exists_iff_no_field_is_queer(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        // coefficient-varying fields that commute with d/dx
        let c = Expression::lin(SeqVec::FiniteSupport(s.finite_vec(2)));
        let d1 = OperationalField::new(Some((Expression::int(1), SeqVec::unit(1))), None, Some(c))
            .unwrap();
        let b = BracketSpec::new(d1.clone(), OperationalField::ddx()).unwrap();
        let m = s.point();
        let queer = opbracket::poisson::order_at(&d1, &m) == Order::Queer;
        prop_assert_eq!(tensor_at(&b, &m).is_ok(), !queer);
    }

    #[test]
    fn tensor_reproduces_bracket_at_order_one_points(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let b = BracketSpec::new(
            OperationalField::unit(1).add(&OperationalField::unit(3).scaled(&Expression::coord(2).canonical())),
            OperationalField::ddx(),
        )
        .unwrap();
        let m = s.point();
        let t = tensor_at(&b, &m).unwrap();
        let (f, g) = (s.expression(), s.expression());
        let lhs = bracket(&b, &f, &g).eval(&m);
        prop_assert_eq!(lhs, t.pair(&jet::gradient(&f, &m), &jet::gradient(&g, &m)));
        let kv = sharp(&t, &jet::gradient(&f, &m));
        // sharp lands in kinematic vectors and Pi(df, dg) = <dg, #df>
        let pairing = jet::gradient(&g, &m).vpart.dot_finite(&kv.v) + jet::gradient(&g, &m).xpart * kv.x;
        prop_assert_eq!(bracket(&b, &f, &g).eval(&m), pairing);
    }

    #[test]
    fn truncation_agrees_with_evaluation(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (f, m) = (s.expression(), s.point());
        let n = 6.max(f.max_coord());
        prop_assert_eq!(truncate(&f, n).eval(&m), f.eval(&m));
    }
}

/// Sum of the rank-one diagonal contributions at index `n`.
fn rank_one_tail(a: &OperatorSymbol, n: usize) -> rational::Rational {
    a.rank1_terms()
        .map(|(u, w, c)| c * u.entry(n) * w.entry(n))
        .fold(rational::zero(), |acc, t| acc + t)
}

fn bracket_family(seed: u64) -> BracketSpec {
    match seed % 3 {
        0 => BracketSpec::queer_example(),
        1 => BracketSpec::new(OperationalField::unit(1), OperationalField::unit(2)).unwrap(),
        _ => BracketSpec::new(
            OperationalField::delta_ell().add(&OperationalField::unit(2)),
            OperationalField::ddx(),
        )
        .unwrap(),
    }
}
