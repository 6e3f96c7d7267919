//! Exact computations in algebras of double cosets of symmetric groups with
//! respect to Young subgroups.
//!
//! * [`coset`]: coset matrices, their sizes, off-diagonal types.
//! * [`perm`]: brute-force permutation oracle.
//! * [`algebra`]: the finite algebra and its structure constants.
//! * [`eps`]: the coefficient ring in `eps_1, .., eps_nu` with `(1 - m eps_j)` inverted.
//! * [`universal`]: the algebra with formal parameters `eps_j = 1/n_j`.
//! * [`braid`]: transposition elements and infinitesimal braid relations.
//! * [`nu2`]: two-block constants and their `4F3(1)` closed forms.
//! * [`graded`]: the commutative limit and its Poisson bracket.
//! * [`cli`]: the `young-cosets` command.

pub mod algebra;
pub mod arith;
pub mod braid;
pub mod cli;
pub mod coset;
pub mod eps;
pub mod error;
pub mod graded;
pub mod nu2;
pub mod perm;
pub mod tables;
pub mod universal;

pub use arith::Rational;
pub use error::{Error, Result};
