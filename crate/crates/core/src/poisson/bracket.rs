use std::fmt;

use log::debug;

use super::field::{commute_check, OperationalField};
use crate::error::{Error, Result};
use crate::expr::{Expression, Point, Poly};
use crate::sample::Sampler;

/// Bracket `{f, g} = d1(f) d2(g) - d2(f) d1(g)` from two commuting fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketSpec {
    d1: OperationalField,
    d2: OperationalField,
}

/// Random expressions used by the construction-time commutation guard.
const CONSTRUCTION_SAMPLES: usize = 8;

impl BracketSpec {
    /// Fails with [`Error::NonCommutingFields`] unless the fields commute.
    pub fn new(d1: OperationalField, d2: OperationalField) -> Result<Self> {
        if !commute_check(&d1, &d2, CONSTRUCTION_SAMPLES) {
            return Err(Error::NonCommutingFields(format!("{d1} and {d2}")));
        }
        Ok(BracketSpec { d1, d2 })
    }

    /// Skips the commutation guard. The formula is still skew and a
    /// biderivation; the Jacobi identity may fail.
    pub fn unchecked(d1: OperationalField, d2: OperationalField) -> Self {
        BracketSpec { d1, d2 }
    }

    /// The queer bracket on l2 x R built from `delta_ell` and `d/dx`.
    pub fn queer_example() -> Self {
        BracketSpec {
            d1: OperationalField::delta_ell(),
            d2: OperationalField::ddx(),
        }
    }

    pub fn d1(&self) -> &OperationalField {
        &self.d1
    }

    pub fn d2(&self) -> &OperationalField {
        &self.d2
    }

    pub fn bracket_poly(&self, f: &Poly, g: &Poly) -> Poly {
        let a = self.d1.apply(f).mul(&self.d2.apply(g));
        let b = self.d2.apply(f).mul(&self.d1.apply(g));
        a.sub(&b)
    }

    /// `X_h = d1(h) d2 - d2(h) d1`, so that `X_h(f) = {h, f}`.
    pub fn hamiltonian(&self, h: &Poly) -> OperationalField {
        let c1 = self.d1.apply(h);
        let c2 = self.d2.apply(h);
        self.d2.scaled(&c1).sub(&self.d1.scaled(&c2))
    }
}

impl fmt::Display for BracketSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bracket({}, {})", self.d1, self.d2)
    }
}

pub fn bracket(b: &BracketSpec, f: &Expression, g: &Expression) -> Expression {
    b.bracket_poly(&f.canonical(), &g.canonical())
        .to_expression()
}

pub fn hamiltonian_field(b: &BracketSpec, h: &Expression) -> OperationalField {
    b.hamiltonian(&h.canonical())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    Skew,
    Jacobi,
    Leibniz,
}

impl Axiom {
    pub const ALL: [Axiom; 3] = [Axiom::Skew, Axiom::Jacobi, Axiom::Leibniz];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Skew => "skew",
            Axiom::Jacobi => "jacobi",
            Axiom::Leibniz => "leibniz",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub f: Expression,
    pub g: Expression,
    pub h: Expression,
    /// `None` when the canonical identity failed before any point was tried.
    pub point: Option<Point>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomRow {
    pub axiom: Axiom,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub rows: Vec<AxiomRow>,
    pub points_per_trial: usize,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.failures == 0)
    }

    pub fn row(&self, axiom: Axiom) -> &AxiomRow {
        self.rows
            .iter()
            .find(|r| r.axiom == axiom)
            .expect("every axiom has a row")
    }

    /// The first failure as an [`Error::AxiomViolation`].
    pub fn into_result(self) -> Result<AxiomReport> {
        for row in &self.rows {
            if let Some(cx) = &row.first_failure {
                return Err(Error::AxiomViolation {
                    axiom: row.axiom.name().to_string(),
                    f: cx.f.to_string(),
                    g: cx.g.to_string(),
                    h: cx.h.to_string(),
                    point: cx
                        .point
                        .as_ref()
                        .map(|p| p.to_string())
                        .unwrap_or_else(|| "canonical form".to_string()),
                });
            }
        }
        Ok(self)
    }
}

pub const POINTS_PER_TRIAL: usize = 5;

/// Checks skew-symmetry, the Jacobi identity and the Leibniz rule exactly on
/// `trials` random triples: each defect must be the zero polynomial and must
/// vanish at [`POINTS_PER_TRIAL`] random points.
pub fn check_axioms(b: &BracketSpec, trials: usize, seed: u64) -> AxiomReport {
    let mut sampler = Sampler::new(seed);
    let mut rows: Vec<AxiomRow> = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomRow {
            axiom,
            trials,
            failures: 0,
            first_failure: None,
        })
        .collect();

    for trial in 0..trials {
        let (fe, ge, he) = (
            sampler.expression(),
            sampler.expression(),
            sampler.expression(),
        );
        let points: Vec<Point> = (0..POINTS_PER_TRIAL).map(|_| sampler.point()).collect();
        let (f, g, h) = (fe.canonical(), ge.canonical(), he.canonical());
        let br = |p: &Poly, q: &Poly| b.bracket_poly(p, q);

        let fg = br(&f, &g);
        let skew = fg.add(&br(&g, &f));
        let jacobi = br(&fg, &h)
            .add(&br(&br(&g, &h), &f))
            .add(&br(&br(&h, &f), &g));
        let leibniz = br(&f, &g.mul(&h))
            .sub(&br(&f, &g).mul(&h))
            .sub(&g.mul(&br(&f, &h)));

        for (row, defect) in rows.iter_mut().zip([skew, jacobi, leibniz]) {
            let failing_point = if !defect.is_zero() {
                Some(None)
            } else {
                points
                    .iter()
                    .find(|m| !num_traits::Zero::is_zero(&defect.eval(m)))
                    .map(|m| Some(m.clone()))
            };
            if let Some(point) = failing_point {
                debug!("{} fails on trial {trial}", row.axiom.name());
                row.failures += 1;
                if row.first_failure.is_none() {
                    row.first_failure = Some(Counterexample {
                        f: fe.clone(),
                        g: ge.clone(),
                        h: he.clone(),
                        point,
                    });
                }
            }
        }
    }
    AxiomReport {
        rows,
        points_per_trial: POINTS_PER_TRIAL,
    }
}
