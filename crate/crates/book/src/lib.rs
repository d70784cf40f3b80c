//! Code listings from the guide in `book/`, run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/diffpoly.md")]
pub mod diffpoly {}

#[doc = include_str!("../../../book/src/hierarchy.md")]
pub mod hierarchy {}

#[doc = include_str!("../../../book/src/canonical.md")]
pub mod canonical {}

#[doc = include_str!("../../../book/src/numlab.md")]
pub mod numlab {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
