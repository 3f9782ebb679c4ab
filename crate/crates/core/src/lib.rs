//! Exact computational algebra for classifying subcategories of module and
//! sheaf categories: torsionfree classes, torsion classes, IE-closed and
//! Serre subcategories, verified exhaustively inside finite windows.

pub mod affine;
pub mod dvr;
pub mod error;
pub mod exact;
pub mod p1;
pub mod partition;
pub mod subcat;

pub use error::{Error, Result};
