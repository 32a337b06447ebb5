//! The chapters of `book/` compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/specifications.md")]
pub mod specifications {}

#[doc = include_str!("../../../book/src/joins.md")]
pub mod joins {}

#[doc = include_str!("../../../book/src/runtime-models.md")]
pub mod runtime_models {}

#[doc = include_str!("../../../book/src/training.md")]
pub mod training {}

#[doc = include_str!("../../../book/src/planning.md")]
pub mod planning {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
