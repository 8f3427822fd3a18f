//! Numerical building blocks shared by the tail estimators: special
//! functions, adaptive Gauss-Kronrod quadrature and bracketed root finding.

pub mod quad;
pub mod roots;
pub mod special;

pub use quad::{integrate, QuadResult, Tolerance};
pub use roots::{bisect, central_derivative, log_add_exp};
