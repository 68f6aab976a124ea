//! Exact symbolic engine for rational loop spaces of permutation-invariant
//! quantum K-theory and the cone transforms acting on them.

pub mod equivariant;
pub mod error;
pub mod json;
pub mod kring;
pub mod loopspace;
pub mod qrational;
pub mod scalars;
pub mod twists;

pub use error::{Error, Result};
pub use scalars::{Cyclo, Mono, MonoSubst, Poly, Scalar, Series, Sym};
