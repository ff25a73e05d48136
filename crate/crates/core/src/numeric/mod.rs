//! Numerical building blocks shared by the model code: adaptive quadrature,
//! cubic Hermite splines and bracketed root finding.

pub mod quad;
pub mod roots;
pub mod spline;
