//! Exact arithmetic substrate: rationals, sparse multivariate polynomials,
//! univariate weight polynomials, fraction-free linear solving and
//! interpolation.

mod exponents;
mod interpolate;
mod lambda;
mod linsolve;
mod multipoly;
pub mod rational;

pub use exponents::Exponents;
pub use interpolate::interpolate_lambda;
pub use lambda::LambdaPoly;
pub use linsolve::{solve_linear_exact, LinearSolution};
pub use multipoly::{poly_arith, MultiPoly, PolyOp};
pub use rational::{parse_rational, rat, Rational};

pub(crate) use multipoly::{write_monomial, write_signed_term};
