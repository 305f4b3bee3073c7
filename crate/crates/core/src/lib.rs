//! Orthogonal polynomials of R_I type under single-level perturbations.
//!
//! Family generation, zeros and interlacing, Stieltjes homographies,
//! perturbed relativistic Toda flows, and chain sequences with their
//! Szegő polynomials. Structural identities are checked exactly over
//! `BigRational`; root finding and flows run in `f64`.

pub mod chainseq;
pub mod error;
pub mod exec;
pub mod family;
pub mod harness;
pub mod perturbation;
pub mod poly;
pub mod recurrence;
pub mod scalar;
pub mod stieltjes;
pub mod toda;
pub mod zeros;

pub use error::{Error, Result};
pub use exec::Exec;
pub use perturbation::{Perturbation, PerturbationKind};
pub use poly::{MonicPolynomial, Poly, PolyMatrix};
pub use recurrence::{CoefficientSequences, Sequence};
pub use scalar::{Rational, RealScalar, Scalar};
pub use stieltjes::{ContinuedFraction, Homography};
