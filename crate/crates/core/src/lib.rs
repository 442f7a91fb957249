//! Arbitrary-precision skew-orthogonal polynomials for the orthogonal and
//! symplectic ensembles, and a numerical construction of the
//! `(d+1) x (d+1)` Riemann-Hilbert problem that characterizes them.
//!
//! The pipeline runs bottom-up:
//!
//! * [`potweights`]: the potential `V`, the weights `W = e^{-2V}` and `w_n`,
//!   and a tabulation of them on a quadrature grid;
//! * [`moments`]: skew moment matrices and inner products;
//! * [`skewalg`]: skew elimination, Pfaffians and the polynomial families;
//! * [`pfafflattice`]: the recursion operator `L` and the Pfaff-lattice flow;
//! * [`rhp`]: the Riemann-Hilbert solutions `Y_n(z)` and their checks;
//! * [`zeros`]: root finding, reality and interlacing of zeros.

pub mod error;
pub mod moments;
pub mod numerics;
pub mod pfafflattice;
pub mod potweights;
pub mod quadrature;
pub mod rhp;
pub mod skewalg;
pub mod zeros;

pub use error::{Error, Result};
pub use numerics::{Complex, PrecisionContext, Real};
