//! Finite-dimensional truncation: keep `v_1..v_n` and `x`.
//!
//! The truncated polynomial is built straight from the expression tree, using
//! matrix entries of each operator, so it shares no code with the canonical
//! form or the jet rules it is used to check.

use std::collections::BTreeMap;
use std::fmt;

use log::debug;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::{Expression, Point};
use crate::jet;
use crate::opsym::OperatorSymbol;
use crate::poisson::{bracket, hamiltonian_field, BracketSpec, OperationalField};
use crate::rational::{self, Rational};
use crate::seq::{FiniteVec, SeqVec};

/// Polynomial in `v_1..v_n, x`. Exponent vectors have length `n + 1`, the last
/// slot belonging to `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MPoly {
    pub fn zero(n: usize) -> Self {
        MPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n + 1], c);
        p
    }

    /// Variable `i`, where `0..n` are `v_1..v_n` and `n` is `x`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n + 1];
        e[i] = 1;
        let mut p = Self::zero(n);
        p.add_term(e, rational::one());
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        let mut out = Self::zero(self.n);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn partial(&self, i: usize) -> MPoly {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * rational::int(e[i] as i64));
        }
        out
    }

    pub fn eval(&self, p: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(p)
                    .fold(c.clone(), |acc, (k, a)| acc * rational::pow(a, *k))
            })
            .fold(rational::zero(), |acc, t| acc + t)
    }

    pub fn eval_f64(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(p)
                    .fold(rational::to_f64(c), |acc, (k, a)| acc * a.powi(*k as i32))
            })
            .sum()
    }

    fn var_name(&self, i: usize) -> String {
        if i == self.n {
            "x".to_string()
        } else {
            format!("v{}", i + 1)
        }
    }
}

impl fmt::Display for MPoly {
    /// Terms by descending degree, then with lower-indexed variables first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut order: Vec<(&Vec<u32>, &Rational)> = self.terms.iter().collect();
        order.sort_by(|(a, _), (b, _)| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (idx, (e, c)) in order.into_iter().enumerate() {
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(i, k)| {
                    if *k == 1 {
                        self.var_name(i)
                    } else {
                        format!("{}^{k}", self.var_name(i))
                    }
                })
                .collect();
            let mag = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub n: usize,
    pub poly: MPoly,
}

impl Truncation {
    /// Coordinates `(v_1..v_n, x)` of a point; entries past `n` are dropped.
    pub fn coords(&self, m: &Point) -> Vec<Rational> {
        let mut p: Vec<Rational> = (1..=self.n)
            .map(|k| m.v.get(&k).cloned().unwrap_or_else(rational::zero))
            .collect();
        p.push(m.x.clone());
        p
    }

    pub fn eval(&self, m: &Point) -> Rational {
        self.poly.eval(&self.coords(m))
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

fn linear(w: &SeqVec, n: usize) -> MPoly {
    let mut p = MPoly::zero(n);
    for k in 1..=n {
        p = p.add(&MPoly::var(n, k - 1).scale(&w.entry(k)));
    }
    p
}

fn quadratic(a: &OperatorSymbol, n: usize) -> MPoly {
    let mut p = MPoly::zero(n);
    for i in 1..=n {
        for j in 1..=n {
            let aij = a.entry(i, j);
            if !aij.is_zero() {
                p = p.add(&MPoly::var(n, i - 1).mul(&MPoly::var(n, j - 1)).scale(&aij));
            }
        }
    }
    p
}

pub fn truncate(f: &Expression, n: usize) -> Truncation {
    fn go(f: &Expression, n: usize) -> MPoly {
        match f {
            Expression::Const(c) => MPoly::constant(n, c.clone()),
            Expression::X => MPoly::var(n, n),
            Expression::Lin(w) => linear(w, n),
            Expression::Quad(a) => quadratic(a, n),
            Expression::Sum(ts) => ts.iter().fold(MPoly::zero(n), |acc, t| acc.add(&go(t, n))),
            Expression::Prod(fs) => fs
                .iter()
                .fold(MPoly::constant(n, rational::one()), |acc, t| {
                    acc.mul(&go(t, n))
                }),
            Expression::Scale(c, e) => go(e, n).scale(c),
        }
    }
    Truncation { n, poly: go(f, n) }
}

pub const FD_TOLERANCE: f64 = 1e-5;
pub const DEFAULT_STEP: f64 = 1e-4;

pub const BLOCKS: [&str; 5] = ["grad_v", "grad_x", "hess_vv", "hess_vx", "hess_xx"];

/// Symbolic derivatives of `f` at `m` laid out on the `n + 1` truncated
/// coordinates, block by block.
#[derive(Clone, Debug, PartialEq)]
struct Blocks<T> {
    grad_v: Vec<T>,
    grad_x: T,
    hess_vv: Vec<Vec<T>>,
    hess_vx: Vec<T>,
    hess_xx: T,
}

impl<T: Clone> Blocks<T> {
    fn flat(&self) -> [Vec<T>; 5] {
        [
            self.grad_v.clone(),
            vec![self.grad_x.clone()],
            self.hess_vv.concat(),
            self.hess_vx.clone(),
            vec![self.hess_xx.clone()],
        ]
    }
}

fn symbolic_blocks(f: &Expression, m: &Point, n: usize) -> Blocks<Rational> {
    let j = jet::jet2(f, m);
    Blocks {
        grad_v: (1..=n).map(|k| j.grad.vpart.entry(k)).collect(),
        grad_x: j.grad.xpart.clone(),
        hess_vv: (1..=n)
            .map(|i| (1..=n).map(|k| j.hess.vv.entry(i, k)).collect())
            .collect(),
        hess_vx: (1..=n).map(|k| j.hess.vx.entry(k)).collect(),
        hess_xx: j.hess.xx.clone(),
    }
}

fn exact_blocks(t: &Truncation, m: &Point) -> Blocks<Rational> {
    let n = t.n;
    let p = t.coords(m);
    let grads: Vec<MPoly> = (0..=n).map(|i| t.poly.partial(i)).collect();
    let second = |i: usize, k: usize| grads[i].partial(k).eval(&p);
    Blocks {
        grad_v: (0..n).map(|i| grads[i].eval(&p)).collect(),
        grad_x: grads[n].eval(&p),
        hess_vv: (0..n)
            .map(|i| (0..n).map(|k| second(i, k)).collect())
            .collect(),
        hess_vx: (0..n).map(|i| second(i, n)).collect(),
        hess_xx: second(n, n),
    }
}

fn central_blocks(t: &Truncation, m: &Point, h: f64) -> Blocks<f64> {
    let n = t.n;
    let base: Vec<f64> = t.coords(m).iter().map(rational::to_f64).collect();
    let at = |shifts: &[(usize, f64)]| {
        let mut q = base.clone();
        for (i, s) in shifts {
            q[*i] += s;
        }
        t.poly.eval_f64(&q)
    };
    let first = |i: usize| (at(&[(i, h)]) - at(&[(i, -h)])) / (2.0 * h);
    let second = |i: usize, k: usize| {
        if i == k {
            (at(&[(i, h)]) - 2.0 * at(&[]) + at(&[(i, -h)])) / (h * h)
        } else {
            (at(&[(i, h), (k, h)]) - at(&[(i, h), (k, -h)]) - at(&[(i, -h), (k, h)])
                + at(&[(i, -h), (k, -h)]))
                / (4.0 * h * h)
        }
    };
    Blocks {
        grad_v: (0..n).map(first).collect(),
        grad_x: first(n),
        hess_vv: (0..n)
            .map(|i| (0..n).map(|k| second(i, k)).collect())
            .collect(),
        hess_vx: (0..n).map(|i| second(i, n)).collect(),
        hess_xx: second(n, n),
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdRow {
    pub block: &'static str,
    pub max_rel_err: f64,
    /// Whether exact differentiation of the truncated polynomial reproduces
    /// the symbolic block.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdReport {
    pub n: usize,
    pub h: f64,
    pub rows: Vec<FdRow>,
}

impl FdReport {
    pub fn max_rel_err(&self) -> f64 {
        self.rows.iter().map(|r| r.max_rel_err).fold(0.0, f64::max)
    }

    pub fn exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact)
    }

    /// Fails with [`Error::ToleranceExceeded`] on the first block that
    /// disagrees with the symbolic jet.
    pub fn check(self, tolerance: f64) -> Result<FdReport> {
        for r in &self.rows {
            if !r.exact {
                return Err(Error::ToleranceExceeded {
                    block: format!("{} (exact)", r.block),
                    error: r.max_rel_err,
                    tolerance: 0.0,
                });
            }
            if r.max_rel_err.is_nan() || r.max_rel_err > tolerance {
                return Err(Error::ToleranceExceeded {
                    block: r.block.to_string(),
                    error: r.max_rel_err,
                    tolerance,
                });
            }
        }
        Ok(self)
    }
}

/// Compares the symbolic gradient and Hessian of `f` at `m` with central
/// differences of the truncation (float path) and with exact derivatives of
/// the truncation (rational path), without failing.
pub fn fd_report(f: &Expression, m: &Point, n: usize, h: f64) -> Result<FdReport> {
    if n == 0 {
        return Err(Error::domain("truncation size must be positive"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("step must be positive, got {h}")));
    }
    let needed = m.max_coord().max(f.max_coord());
    if needed > n {
        return Err(Error::domain(format!(
            "truncation n={n} does not cover coordinate {needed}"
        )));
    }
    let t = truncate(f, n);
    let sym = symbolic_blocks(f, m, n);
    let exact = exact_blocks(&t, m);
    let approx = central_blocks(&t, m, h);

    let rows = BLOCKS
        .iter()
        .zip(
            sym.flat()
                .iter()
                .zip(exact.flat().iter().zip(approx.flat().iter())),
        )
        .map(|(block, (s, (e, a)))| {
            let max_rel_err = s
                .iter()
                .zip(a)
                .map(|(s, a)| rel_err(*a, rational::to_f64(s)))
                .fold(0.0, f64::max);
            FdRow {
                block,
                max_rel_err,
                exact: s == e,
            }
        })
        .collect();
    Ok(FdReport { n, h, rows })
}

pub fn fd_check(f: &Expression, m: &Point, n: usize, h: f64) -> Result<FdReport> {
    fd_report(f, m, n, h)?.check(FD_TOLERANCE)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub ell_n: Rational,
    pub target: Rational,
    pub abs_err: Rational,
}

impl ConvergenceRow {
    pub fn ell_n_f64(&self) -> f64 {
        rational::to_f64(&self.ell_n)
    }

    pub fn abs_err_f64(&self) -> f64 {
        rational::to_f64(&self.abs_err)
    }
}

/// Diagonal entries `<A e_n, e_n>` against `ell(A)`.
pub fn ell_convergence(a: &OperatorSymbol, ns: &[usize]) -> Vec<ConvergenceRow> {
    let target = a.ell();
    ns.iter()
        .map(|&n| {
            let ell_n = a.diagonal_entry(n);
            let abs_err = (&ell_n - &target).abs();
            ConvergenceRow {
                n,
                ell_n,
                target: target.clone(),
                abs_err,
            }
        })
        .collect()
}

pub const RK4_STEP: f64 = 1e-2;
pub const RK4_HORIZON: f64 = 1.0;
pub const DEMO_SIZES: [usize; 3] = [2, 4, 8];

/// Kinematic part of a field truncated to `n` coordinates; the `delta_ell`
/// part has no finite-dimensional counterpart and is dropped.
struct TruncatedFlow {
    n: usize,
    kin: Vec<MPoly>,
    dx: MPoly,
}

impl TruncatedFlow {
    fn new(d: &OperationalField, n: usize) -> Self {
        let kin = (1..=n)
            .map(|k| match d.kin().get(&k) {
                Some(c) => truncate(&c.to_expression(), n).poly,
                None => MPoly::zero(n),
            })
            .collect();
        TruncatedFlow {
            n,
            kin,
            dx: truncate(&d.dx().to_expression(), n).poly,
        }
    }

    fn velocity(&self, state: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.kin.iter().map(|c| c.eval_f64(state)).collect();
        out.push(self.dx.eval_f64(state));
        out
    }

    fn rho(&self, state: &[f64]) -> f64 {
        state[..self.n].iter().map(|a| a * a).sum()
    }

    fn drho_dt(&self, state: &[f64]) -> f64 {
        let vel = self.velocity(state);
        2.0 * (0..self.n).map(|k| state[k] * vel[k]).sum::<f64>()
    }

    fn rk4(&self, start: &[f64], step: f64, horizon: f64) -> Vec<f64> {
        let steps = (horizon / step).round() as usize;
        let mut y = start.to_vec();
        let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> {
            y.iter().zip(k).map(|(a, b)| a + s * b).collect()
        };
        for _ in 0..steps {
            let k1 = self.velocity(&y);
            let k2 = self.velocity(&axpy(&y, &k1, step / 2.0));
            let k3 = self.velocity(&axpy(&y, &k2, step / 2.0));
            let k4 = self.velocity(&axpy(&y, &k3, step));
            for i in 0..y.len() {
                y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedRun {
    pub n: usize,
    pub initial_drho_dt: f64,
    /// `(rho(T) - rho(0)) / T` along the integrated flow.
    pub mean_drho_dt: f64,
    pub final_state: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IllPosedReport {
    pub start: Point,
    pub hamiltonian: OperationalField,
    /// `{h, rho}` as an expression and at the start point.
    pub drho_dt: Expression,
    pub drho_dt_at_start: Rational,
    /// `{h, <., w>}` for each sample direction `w`.
    pub velocities: Vec<(String, Expression)>,
    /// `2 <v, dv/dt>` at the start, with `dv_k/dt = {h, v_k}`.
    pub chain_rule_at_start: Rational,
    pub runs: Vec<TruncatedRun>,
}

impl IllPosedReport {
    pub fn dv_dt_zero(&self) -> bool {
        self.velocities.iter().all(|(_, e)| e.canonical().is_zero())
    }

    /// Whether the symbolic `d rho/dt` agrees with the chain rule applied to
    /// the coordinate velocities.
    pub fn consistent(&self) -> bool {
        self.drho_dt_at_start == self.chain_rule_at_start
    }
}

pub fn sample_directions() -> Vec<(String, SeqVec)> {
    let mut out: Vec<(String, SeqVec)> = (1..=4)
        .map(|k| (format!("e{k}"), SeqVec::unit(k)))
        .collect();
    let geo = SeqVec::geometric(rational::rat(1, 2)).expect("|1/2| < 1");
    let pow = SeqVec::power(rational::one(), 1).expect("s = 1");
    out.push((geo.to_string(), geo));
    out.push((pow.to_string(), pow));
    out
}

pub fn default_start() -> Point {
    Point::new(FiniteVec::from([(1, rational::one())]), rational::zero())
}

/// Hamilton's equations for `h` read two ways: symbolically through the
/// bracket, and as a kinematic ODE on each truncation in `ns`.
pub fn ill_posedness_demo(
    b: &BracketSpec,
    h: &Expression,
    start: &Point,
    ns: &[usize],
) -> IllPosedReport {
    let hamiltonian = hamiltonian_field(b, h);
    let drho_dt = bracket(b, h, &Expression::rho());
    let drho_dt_at_start = drho_dt.eval(start);
    let velocities = sample_directions()
        .into_iter()
        .map(|(name, w)| (name, bracket(b, h, &Expression::lin(w))))
        .collect();

    let mut coords: Vec<usize> = start.v.keys().copied().collect();
    coords.extend(hamiltonian.kin().keys().copied());
    coords.sort_unstable();
    coords.dedup();
    let chain_rule_at_start = coords
        .iter()
        .map(|&k| {
            let vk = start.v.get(&k).cloned().unwrap_or_else(rational::zero);
            rational::int(2) * vk * bracket(b, h, &Expression::coord(k)).eval(start)
        })
        .fold(rational::zero(), |acc, t| acc + t);

    let runs = ns
        .iter()
        .map(|&n| {
            let flow = TruncatedFlow::new(&hamiltonian, n);
            let mut y0: Vec<f64> = (1..=n)
                .map(|k| start.v.get(&k).map(rational::to_f64).unwrap_or(0.0))
                .collect();
            y0.push(rational::to_f64(&start.x));
            let y1 = flow.rk4(&y0, RK4_STEP, RK4_HORIZON);
            let run = TruncatedRun {
                n,
                initial_drho_dt: flow.drho_dt(&y0),
                mean_drho_dt: (flow.rho(&y1) - flow.rho(&y0)) / RK4_HORIZON,
                final_state: y1,
            };
            debug!("truncated run {run:?}");
            run
        })
        .collect();

    IllPosedReport {
        start: start.clone(),
        hamiltonian,
        drho_dt,
        drho_dt_at_start,
        velocities,
        chain_rule_at_start,
        runs,
    }
}
