//! Exact symbolic engine for operational vector fields and higher-order
//! ("queer") Poisson brackets on the sequence space l2 x R.
//!
//! Smooth functions are drawn from a closed polynomial class generated by
//! constants, the coordinate `x`, linear functionals `<v, w>` and quadratic
//! forms `<Av, v>` where `A = lambda*I + D + F` (identity multiple, diagonal
//! part with entries tending to zero, finite-rank part). Every coefficient is an
//! exact rational, so bracket axioms are verified by exact identity rather than
//! by tolerance.
//!
//! The pieces:
//!
//! - [`expr`]: expression AST, the text DSL, canonical polynomial form and
//!   evaluation at finitely supported points.
//! - [`opsym`]: structured operator symbols and the singular functional
//!   [`opsym::ell`] that kills compact operators and sends the identity to 1.
//! - [`jet`]: exact gradients and Hessians, the second-order derivation
//!   [`jet::delta_ell`] and `d/dx`.
//! - [`poisson`]: operational vector fields, brackets built from two commuting
//!   fields, axiom checks, pointwise tensors and queerness witnesses.
//! - [`trunc`]: finite-dimensional truncation used as a numerical oracle.
//!
//! ```
//! use opbracket::poisson::{bracket, tensor_at, BracketSpec};
//! use opbracket::{parse_expr, parse_point};
//!
//! let b = BracketSpec::queer_example();
//! let f = parse_expr("0-x").unwrap();
//! let g = parse_expr("q(op(1;;))").unwrap();
//! assert_eq!(bracket(&b, &f, &g).to_string(), "2");
//! assert!(tensor_at(&b, &parse_point("point([],0)").unwrap()).is_err());
//! ```

pub mod error;
pub mod expr;
pub mod jet;
pub mod opsym;
pub mod poisson;
pub mod rational;
pub mod sample;
pub mod seq;
pub mod trunc;

pub use error::{Error, Result};
pub use expr::{parse_expr, parse_point, print_expr, Expression, Point, Poly};
pub use jet::{DualVector, HessianSymbol};
pub use opsym::OperatorSymbol;
pub use poisson::{BracketSpec, OperationalField, Order, TensorAtPoint};
pub use rational::Rational;
pub use seq::{Basis, SeqComb, SeqVec};
