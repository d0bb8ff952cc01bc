#![allow(clippy::needless_range_loop)]

pub mod exterior;
pub mod operator;
pub mod scalar;
pub mod groth;
pub mod linalg;
pub mod models;
pub mod identities;
pub mod harmonic;
pub mod report;
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/exterior.md")]
    mod exterior {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
    #[doc = include_str!("../../../book/src/harmonic.md")]
    mod harmonic {}
    #[doc = include_str!("../../../book/src/order.md")]
    mod order {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
