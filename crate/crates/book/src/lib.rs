//! Compiles the guide's Rust listings as doc-tests, one module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/vocabulary.md")]
pub mod vocabulary {}
#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}
#[doc = include_str!("../../../book/src/patterns.md")]
pub mod patterns {}
#[doc = include_str!("../../../book/src/validation.md")]
pub mod validation {}
#[doc = include_str!("../../../book/src/documentation.md")]
pub mod documentation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
