//! Exact scalar, polynomial and matrix arithmetic.

pub mod factor;
pub mod matrix;
pub mod poly;
pub mod scalar;

pub use factor::{factor_poly, irreducibles_up_to_degree, is_irreducible, Factorization};
pub use matrix::{smith_normal_form, EuclideanDomain, PidMatrix, SmithForm};
pub use poly::{Degree, Poly};
pub use scalar::{Field, Scalar};
