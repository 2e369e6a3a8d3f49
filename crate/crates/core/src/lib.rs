//! Fractional and natural spline wavelets, Riemann-Liouville integrals,
//! weighted Besov sequence norms and two-weight discrete Hardy constants.

pub mod battle_lemarie;
pub mod besov;
pub mod frac_wavelets;
pub mod fracint;
pub mod error;
pub mod functions;
pub mod hardy;
pub mod harness;
pub mod quad;
pub mod specfun;
pub mod splines;

pub use error::{Error, Result};
