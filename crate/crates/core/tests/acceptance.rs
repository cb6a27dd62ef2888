//! Acceptance criteria, one line of output each.

use std::time::{Duration, Instant};

use num_traits::Zero;

use opbracket::jet::{self, delta_ell};
use opbracket::poisson::{
    apply_field, bracket, check_axioms, extension_obstruction_demo, order_at, parse_field,
    queer_witness, tensor_at, Axiom, BracketSpec, OperationalField, Order,
};
use opbracket::rational::{int, rat};
use opbracket::sample::Sampler;
use opbracket::seq::FiniteVec;
use opbracket::trunc::{self, ell_convergence, fd_report};
use opbracket::{parse_expr, Expression, Point};

type Outcome = Result<(), String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn canonical_pair() -> BracketSpec {
    BracketSpec::new(OperationalField::unit(1), OperationalField::unit(2)).unwrap()
}

fn reference_values() -> Outcome {
    ensure!(
        delta_ell(&Expression::rho()) == Expression::int(2),
        "delta rho = {}",
        delta_ell(&Expression::rho())
    );
    let mut s = Sampler::new(101);
    let origin = Point::origin();
    for _ in 0..20 {
        let w = s.finite_vec(4);
        let value = apply_field(&OperationalField::kinematic(&w), &Expression::rho()).eval(&origin);
        ensure!(
            value.is_zero(),
            "kinematic action of {w:?} on rho at 0 is {value}"
        );
    }
    ensure!(
        jet::gradient(&Expression::rho(), &origin).is_zero(),
        "rho'(0) != 0"
    );

    let b = BracketSpec::queer_example();
    let minus_x = -Expression::X;
    let v = bracket(&b, &minus_x, &Expression::rho());
    ensure!(v == Expression::int(2), "{{-x, rho}} = {v}");
    for _ in 0..20 {
        let w = s.seqvec();
        let v = bracket(&b, &minus_x, &Expression::lin(w.clone()));
        ensure!(v == Expression::int(0), "{{-x, <.,{w}>}} = {v}");
    }
    let demo = extension_obstruction_demo();
    ensure!(
        demo.lhs == int(2) && demo.rhs == int(0),
        "no-extension demo gave ({}, {})",
        demo.lhs,
        demo.rhs
    );
    Ok(())
}

fn exact_axioms() -> Outcome {
    for (name, b) in [
        ("(delta_ell, d/dx)", BracketSpec::queer_example()),
        ("(e1, e2)", canonical_pair()),
    ] {
        let report = check_axioms(&b, 100, 2024);
        ensure!(report.points_per_trial == 5, "points per trial");
        for axiom in Axiom::ALL {
            let row = report.row(axiom);
            ensure!(
                row.trials == 100 && row.failures == 0,
                "{name}: {} failed {} of {}",
                axiom.name(),
                row.failures,
                row.trials
            );
        }
    }
    Ok(())
}

fn tensor_matches_bracket_at_points() -> Outcome {
    let d1 = parse_field("field(queer=x; kin=[1:1])").unwrap();
    let b = BracketSpec::unchecked(d1.clone(), OperationalField::ddx());
    let mut s = Sampler::new(303);

    let at_one = Point::new(s.finite_vec(3), int(1));
    ensure!(
        order_at(&d1, &at_one) == Order::Queer,
        "d1 not queer at x=1"
    );
    match tensor_at(&b, &at_one) {
        Err(e) if e.code() == "QueerAtPoint" => {}
        other => return Err(format!("expected QueerAtPoint at x=1, got {other:?}")),
    }

    let at_zero = Point::new(s.finite_vec(3), int(0));
    ensure!(
        order_at(&d1, &at_zero) == Order::Kinematic,
        "d1 queer at x=0"
    );
    let t = tensor_at(&b, &at_zero).map_err(|e| e.to_string())?;
    for _ in 0..50 {
        let (f, g) = (s.expression(), s.expression());
        let lhs = bracket(&b, &f, &g).eval(&at_zero);
        let rhs = t.pair(&jet::gradient(&f, &at_zero), &jet::gradient(&g, &at_zero));
        ensure!(lhs == rhs, "{{{f}, {g}}} = {lhs} but Pi gives {rhs}");
    }
    Ok(())
}

fn queer_witnesses() -> Outcome {
    let b = BracketSpec::queer_example();
    for m in [
        Point::origin(),
        Point::new(FiniteVec::from([(1, int(1))]), int(0)),
    ] {
        let w = queer_witness(&b, &m).map_err(|e| e.to_string())?;
        ensure!(jet::gradient(&w.f, &m).is_zero(), "f'_m != 0 for {}", w.f);
        let value = bracket(&b, &w.h, &w.f).eval(&m);
        ensure!(
            value == int(2) && w.value == int(2),
            "witness value {value}"
        );
    }
    match queer_witness(
        &canonical_pair(),
        &Point::new(FiniteVec::from([(2, int(3))]), int(1)),
    ) {
        Err(e) if e.code() == "WitnessNotFound" => Ok(()),
        other => Err(format!("kinematic bracket produced {other:?}")),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut s = Sampler::new(505);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (f, m) = (s.expression(), s.point());
        let report = fd_report(&f, &m, 6, 1e-4).map_err(|e| e.to_string())?;
        ensure!(report.exact(), "rational path disagrees for {f} at {m}");
        for row in &report.rows {
            let within = row.max_rel_err <= trunc::FD_TOLERANCE;
            ensure!(
                within,
                "{}: {:e} for {f} at {m}",
                row.block,
                row.max_rel_err
            );
        }
        worst = worst.max(report.max_rel_err());
    }
    println!("    worst relative error {worst:e}");
    Ok(())
}

fn ell_convergence_exact() -> Outcome {
    let Expression::Quad(a) = parse_expr("q(op(2;pow(1,1);))").unwrap() else {
        return Err("not an operator".into());
    };
    let rows = ell_convergence(&a, &[10, 100, 1000]);
    for (row, n) in rows.iter().zip([10i64, 100, 1000]) {
        ensure!(
            row.abs_err == rat(1, n) && row.target == int(2),
            "n={n}: abs_err {}",
            row.abs_err
        );
    }
    Ok(())
}

fn ill_posedness() -> Outcome {
    let b = BracketSpec::queer_example();
    let h = -Expression::X;
    let r = trunc::ill_posedness_demo(&b, &h, &trunc::default_start(), &trunc::DEMO_SIZES);
    ensure!(r.drho_dt == Expression::int(2), "drho/dt = {}", r.drho_dt);
    ensure!(r.dv_dt_zero(), "some velocity bracket is nonzero");
    ensure!(!r.consistent(), "chain rule unexpectedly agrees");
    ensure!(r.runs.len() == 3, "expected runs at n = 2, 4, 8");
    for run in &r.runs {
        ensure!(
            run.initial_drho_dt == 0.0 && run.mean_drho_dt == 0.0,
            "n={}: drho/dt {} / {}",
            run.n,
            run.initial_drho_dt,
            run.mean_drho_dt
        );
    }
    Ok(())
}

fn locality() -> Outcome {
    let mut s = Sampler::new(808);
    let brackets = [BracketSpec::queer_example(), canonical_pair()];
    for case in 0..50 {
        let b = &brackets[case % 2];
        let (f, g, m) = (s.expression(), s.expression(), s.point());
        let c = s.vanishing_cubic(&m);
        let base = bracket(b, &f, &g).eval(&m);
        let left = bracket(b, &(f.clone() + c.clone()), &g).eval(&m);
        let right = bracket(b, &f, &(g.clone() + c)).eval(&m);
        ensure!(
            left == base && right == base,
            "case {case}: {base} vs {left} / {right}"
        );
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("reference-value regression", 1, reference_values),
        ("exact Poisson axioms", 30, exact_axioms),
        (
            "tensor equivalence at points",
            10,
            tensor_matches_bracket_at_points,
        ),
        ("queer witness", 5, queer_witnesses),
        ("oracle equivalence", 30, oracle_equivalence),
        ("ell convergence", 1, ell_convergence_exact),
        ("ill-posedness demo", 10, ill_posedness),
        ("locality surrogate", 10, locality),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(*limit);
        let verdict = match (&result, elapsed < limit) {
            (Ok(()), true) => "PASS".to_string(),
            (Ok(()), false) => format!("FAIL (over the {}s limit)", limit.as_secs()),
            (Err(e), _) => format!("FAIL ({e})"),
        };
        println!(
            "criterion {} {name}: {verdict} in {:.3}s",
            i + 1,
            elapsed.as_secs_f64()
        );
        if !verdict.starts_with("PASS") {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
