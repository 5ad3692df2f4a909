//! Exact linear algebra over the rationals and prime fields.

mod elim;
mod matrix;
mod scalar;
pub mod sparse;

pub use elim::{
    cokernel, cokernel_of_span, inverse, kernel_basis, rank, rank_reversed, rref, solve, Cokernel, Echelon,
    Rref,
};
pub use matrix::Matrix;
pub use scalar::{Field, Scalar};
pub use sparse::{Acc, Lin};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("{0} is not prime")]
    NotPrime(u32),
}
