//! The guide's code listings, compiled and run by `cargo test --doc`.
//!
//! One module per chapter so a failing listing points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/precision.md")]
pub mod precision {}
#[doc = include_str!("../../../book/src/moments.md")]
pub mod moments {}
#[doc = include_str!("../../../book/src/skew.md")]
pub mod skew {}
#[doc = include_str!("../../../book/src/zeros.md")]
pub mod zeros {}
#[doc = include_str!("../../../book/src/rhp.md")]
pub mod rhp {}
#[doc = include_str!("../../../book/src/pfaff.md")]
pub mod pfaff {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
