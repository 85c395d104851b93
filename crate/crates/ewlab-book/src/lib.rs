//! Every code block in the guide under `book/` is compiled and run by this
//! crate's doc-tests: each chapter is included verbatim as module
//! documentation, so `cargo test -p ewlab-book --doc` fails whenever a
//! sample drifts from the library's actual API or behavior.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/terms.md")]
pub mod terms {}

#[doc = include_str!("../../../book/src/syntax.md")]
pub mod syntax {}

#[doc = include_str!("../../../book/src/assemblies.md")]
pub mod assemblies {}

#[doc = include_str!("../../../book/src/orders.md")]
pub mod orders {}

#[doc = include_str!("../../../book/src/heyting.md")]
pub mod heyting {}

#[doc = include_str!("../../../book/src/weihrauch.md")]
pub mod weihrauch {}

#[doc = include_str!("../../../book/src/category.md")]
pub mod category {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
