//! Numerical experiments on ranks of elliptic surfaces
//! `y^2 = x^3 + A(T) x + B(T)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`ff`], [`fpoly`]: prime fields, extension fields, quadratic characters
//!   and polynomials over `F_l`.
//! - [`point_count`]: Frobenius traces by character sums, baby-step
//!   giant-step and the Weil recursion.
//! - [`surface`]: surfaces over `Q` and `F_l`, reduction, place
//!   classification and conductor degree.
//! - [`lfunction`]: exact L-polynomials over `F_l(T)` and analytic ranks.
//! - [`nagao`]: rank estimators over `Q` (Nagao, Heath-Brown, BSD product,
//!   Rubinstein).
//! - [`families`]: Mahler measure, `P_d(M)`, `S_{m,n}(M)` enumeration and
//!   sampling.
//! - [`stochastic`]: the random Weierstrass-equation model and its
//!   simulations.
//! - [`experiments`]: positive-rank proportions, the CRT product experiment
//!   and average-rank surveys.
//! - [`io`], [`cli`]: output formats and the command-line front end.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod arith;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod families;
pub mod ff;
pub mod fpoly;
pub mod io;
pub mod lfunction;
pub mod nagao;
pub mod par;
pub mod point_count;
pub mod primes;
pub mod qpoly;
pub mod rng;
pub mod roots;
pub mod stochastic;
pub mod surface;

pub use error::{Error, Result};
