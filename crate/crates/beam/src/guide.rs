//! The user guide, mirrored from the `book/` directory.
//!
//! Each chapter of the mdbook is included here verbatim, so every Rust
//! code block in the book compiles and runs as a doc-test — the guide
//! cannot drift from the library it documents.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/data-model.md")]
pub mod data_model {}

#[doc = include_str!("../../../book/src/mollification.md")]
pub mod mollification {}

#[doc = include_str!("../../../book/src/discretization.md")]
pub mod discretization {}

#[doc = include_str!("../../../book/src/diagnostics.md")]
pub mod diagnostics {}

#[doc = include_str!("../../../book/src/sweeps.md")]
pub mod sweeps {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
