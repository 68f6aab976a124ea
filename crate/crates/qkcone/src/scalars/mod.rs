//! Exact coefficient arithmetic: cyclotomic numbers, parameter monomials,
//! Laurent polynomials and rational functions with factored denominators.

pub mod cyclo;
pub mod mono;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod symbol;

pub use cyclo::Cyclo;
pub use mono::Mono;
pub use poly::{MonoSubst, Poly};
pub use scalar::{canonical as canonical_poly, Scalar};
pub use series::Series;
pub use symbol::Sym;
