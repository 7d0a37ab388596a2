//! Exact-arithmetic experiments on random symmetric integer matrices.

pub mod bigser;
pub mod chain;
pub mod concentration;
pub mod dist;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod report;
pub mod seed;
pub mod structure;
pub mod survey;

pub use error::{Error, Result};

// README and guide code blocks run as doc-tests, one module per file.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/linalg.md")]
    mod linalg {}
    #[doc = include_str!("../../../book/src/structure.md")]
    mod structure {}
    #[doc = include_str!("../../../book/src/concentration.md")]
    mod concentration {}
    #[doc = include_str!("../../../book/src/chains.md")]
    mod chains {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
