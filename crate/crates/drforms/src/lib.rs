//! Exact q-expansions for Jacobi forms of index `D_r` (`r ∈ {1,3,5,7}`), the
//! half-integral weight and eta-type forms they correspond to, and level-2
//! elliptic newforms, together with the Hecke operators on all of them.
//!
//! Every coefficient is an exact rational. Nothing is ever evaluated at a
//! numeric `τ`; identities are checked coefficient by coefficient.

pub mod arith;
pub mod corresp;
pub mod error;
pub mod etaforms;
pub mod halfint;
pub mod jacobi;
pub mod level2;
pub mod linalg;
pub mod qseries;
pub mod rat;
pub mod verify;

pub use error::{Error, Result};
pub use qseries::QSeries;
pub use rat::Q;

/// The guide's chapters, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/jacobi.md")]
    mod jacobi {}
    #[doc = include_str!("../../../book/src/half-integral.md")]
    mod half_integral {}
    #[doc = include_str!("../../../book/src/eta.md")]
    mod eta {}
    #[doc = include_str!("../../../book/src/level2.md")]
    mod level2 {}
    #[doc = include_str!("../../../book/src/correspondence.md")]
    mod correspondence {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
