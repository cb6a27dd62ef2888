//! Seeded random generators for expressions, operators and points.
//!
//! Used by the axiom checker and by property tests. The stream is
//! reproducible across platforms for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Expression, Point};
use crate::opsym::OperatorSymbol;
use crate::rational::{self, Rational};
use crate::seq::{FiniteVec, SeqComb, SeqVec};

const GEO_RATIOS: [(i64, i64); 5] = [(1, 2), (-1, 2), (1, 3), (2, 3), (-1, 4)];

pub struct Sampler {
    rng: ChaCha8Rng,
    /// Largest coordinate index used by finite-support vectors.
    pub max_support: usize,
    /// Degree budget per monomial (`x` and `<v,w>` count 1, `<Av,v>` counts 2).
    pub max_degree: u32,
    /// Upper bound on the number of summands in a random expression.
    pub max_terms: usize,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_support: 5,
            max_degree: 3,
            max_terms: 3,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn rational(&mut self) -> Rational {
        let n = self.rng.gen_range(-4i64..=4);
        let d = self.rng.gen_range(1i64..=3);
        rational::rat(n, d)
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != rational::zero() {
                return r;
            }
        }
    }

    pub fn finite_vec(&mut self, max_entries: usize) -> FiniteVec {
        let count = self.rng.gen_range(1..=max_entries.max(1));
        let mut v = FiniteVec::new();
        for _ in 0..count {
            let k = self.rng.gen_range(1..=self.max_support);
            let c = self.nonzero_rational();
            v.insert(k, c);
        }
        v
    }

    pub fn seqvec(&mut self) -> SeqVec {
        match self.rng.gen_range(0..10) {
            0..=5 => SeqVec::FiniteSupport(self.finite_vec(3)),
            6 | 7 => {
                let (n, d) = GEO_RATIOS[self.rng.gen_range(0..GEO_RATIOS.len())];
                let scale = self.nonzero_rational();
                SeqVec::scaled_geometric(rational::rat(n, d), scale).expect("|r| < 1")
            }
            _ => {
                let s = self.rng.gen_range(1..=3);
                SeqVec::power(self.nonzero_rational(), s).expect("s >= 1")
            }
        }
    }

    pub fn comb(&mut self) -> SeqComb {
        self.seqvec().to_comb()
    }

    pub fn operator(&mut self) -> OperatorSymbol {
        let lambda = if self.rng.gen_bool(0.7) {
            self.nonzero_rational()
        } else {
            rational::zero()
        };
        let diag = if self.rng.gen_bool(0.5) {
            self.comb()
        } else {
            SeqComb::zero()
        };
        let pairs = (0..self.rng.gen_range(0..=2))
            .map(|_| (self.comb(), self.comb()))
            .collect::<Vec<_>>();
        OperatorSymbol::new(lambda, diag, pairs)
    }

    pub fn point(&mut self) -> Point {
        let v = if self.rng.gen_bool(0.15) {
            FiniteVec::new()
        } else {
            self.finite_vec(3)
        };
        Point::new(v, self.rational())
    }

    fn factor(&mut self, budget: u32) -> (Expression, u32) {
        let roll = self.rng.gen_range(0..10);
        if budget >= 2 && roll < 3 {
            return (Expression::Quad(self.operator()), 2);
        }
        match roll % 3 {
            0 => (Expression::X, 1),
            _ => (Expression::Lin(self.seqvec()), 1),
        }
    }

    /// Random polynomial expression with at most `max_terms` summands, each of
    /// degree at most `max_degree`.
    pub fn expression(&mut self) -> Expression {
        let terms = self.rng.gen_range(1..=self.max_terms);
        let mut summands = Vec::with_capacity(terms);
        for _ in 0..terms {
            let target = self.rng.gen_range(0..=self.max_degree);
            let mut factors = vec![Expression::Const(self.nonzero_rational())];
            let mut used = 0;
            while used < target {
                let (f, d) = self.factor(target - used);
                factors.push(f);
                used += d;
            }
            summands.push(if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Expression::Prod(factors)
            });
        }
        Expression::Sum(summands)
    }

    /// Affine function vanishing at `m`: `<v - m_v, w> + c (x - m_x)`.
    pub fn affine_vanishing_at(&mut self, m: &Point) -> Expression {
        let w = self.seqvec();
        let offset = w.dot_finite(&m.v);
        let c = self.rational();
        Expression::Sum(vec![
            Expression::Lin(w),
            Expression::Const(-offset),
            Expression::scale(c.clone(), Expression::X),
            Expression::Const(-(c * &m.x)),
        ])
    }

    /// Product of three affine factors vanishing at `m`, so the function and
    /// its first two derivatives vanish there.
    pub fn vanishing_cubic(&mut self, m: &Point) -> Expression {
        Expression::Prod(vec![
            self.affine_vanishing_at(m),
            self.affine_vanishing_at(m),
            self.affine_vanishing_at(m),
        ])
    }
}
